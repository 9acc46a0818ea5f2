#ifndef UDSEQ_GROUPS_HPP
#define UDSEQ_GROUPS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "udseq/random.hpp"

namespace udseq {

enum class GroupKind { torus, cyclic, product, permutation, su2 };

/// Descriptor of a concrete compact metrizable group.
///
/// Textual form: `torus:d`, `cyclic:n`, `product:n1xn2x...`, `perm:n`, `su2`.
class GroupSpec {
 public:
  static constexpr int kMaxPermutationDegree = 12;

  static GroupSpec torus(int dimension);
  static GroupSpec cyclic(int order);
  static GroupSpec product(std::vector<int> orders);
  static GroupSpec permutation(int degree);
  static GroupSpec su2();

  /// Throws std::invalid_argument with a human-readable reason.
  static GroupSpec parse(std::string_view text);

  GroupKind kind() const noexcept { return kind_; }

  /// Number of scalar components of an element: d for the torus, 1 for a
  /// cyclic group, the factor count for products, the degree for
  /// permutations and 4 for SU(2).
  int components() const noexcept;

  /// Torus dimension; throws unless kind() == torus.
  int dimension() const;

  /// Factor orders (cyclic: one entry; product: one per factor).
  const std::vector<int>& orders() const noexcept { return params_; }

  /// Permutation degree; throws unless kind() == permutation.
  int degree() const;

  bool is_finite() const noexcept;

  /// Group order for finite groups.
  std::optional<std::uint64_t> order() const noexcept;

  std::string to_string() const;

  bool operator==(const GroupSpec&) const = default;

 private:
  GroupSpec(GroupKind kind, std::vector<int> params) : kind_(kind), params_(std::move(params)) {}

  GroupKind kind_ = GroupKind::torus;
  std::vector<int> params_;
};

using TorusPoint = Eigen::VectorXd;
using IntTuple = std::vector<int>;
using Quaternion = Eigen::Quaterniond;

/// Value of a group element. Torus points are coordinate vectors in
/// [0,1)^d; cyclic, product and permutation elements are integer tuples
/// (a permutation p is stored in one-line notation, i -> p[i]); SU(2)
/// elements are unit quaternions.
using GroupElement = std::variant<TorusPoint, IntTuple, Quaternion>;

/// Reduces a real number into [0, 1).
template <typename Scalar>
inline Scalar wrap_unit(Scalar x) noexcept {
  const Scalar r = x - std::floor(x);
  return r < Scalar(1) ? r : Scalar(0);
}

/// Distance on the circle R/Z.
template <typename Scalar>
inline Scalar circle_distance(Scalar a, Scalar b) noexcept {
  const Scalar d = std::abs(a - b);
  return std::min(d, Scalar(1) - d);
}

/// Geodesic angle on S^3 divided by pi, computed without the precision
/// loss of acos near 1.
template <typename Scalar>
inline Scalar sphere3_distance(const Eigen::Quaternion<Scalar>& p,
                               const Eigen::Quaternion<Scalar>& q) noexcept {
  const Scalar diff = (p.coeffs() - q.coeffs()).norm();
  const Scalar sum = (p.coeffs() + q.coeffs()).norm();
  return Scalar(2) * std::atan2(diff, sum) / Scalar(EIGEN_PI);
}

bool is_valid(const GroupSpec& spec, const GroupElement& a);

/// Throws std::invalid_argument when `a` is not an element of `spec`.
void require_valid(const GroupSpec& spec, const GroupElement& a, std::string_view what = "element");

GroupElement identity(const GroupSpec& spec);

/// Group product a * b. For permutations (a * b)[i] = a[b[i]].
GroupElement compose(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);

GroupElement inverse(const GroupSpec& spec, const GroupElement& a);

/// Bi-invariant metric: max circle distance on the torus, discrete 0/1 on
/// finite groups, normalized geodesic angle on SU(2). Values lie in [0,1].
double metric(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);

/// One draw from Haar measure.
GroupElement haar_sample(const GroupSpec& spec, CounterRng& rng);

/// Element at enumeration position `rank` of a finite group (mixed radix
/// for products, Lehmer code for permutations).
GroupElement element_at(const GroupSpec& spec, std::uint64_t rank);
std::uint64_t element_rank(const GroupSpec& spec, const GroupElement& a);

/// Scalar components for CSV output (quaternions as w, x, y, z).
std::vector<double> components(const GroupSpec& spec, const GroupElement& a);

/// Parses an element from whitespace-separated components. Torus
/// coordinates accept decimal or rational `p/q` literals.
GroupElement parse_element(const GroupSpec& spec, std::string_view text);
std::string format_element(const GroupSpec& spec, const GroupElement& a);

/// Parses a real number written as a decimal or as `p/q`.
double parse_real(std::string_view text);

/// Finite list of elements claimed to generate a dense subgroup.
struct GeneratorSet {
  GroupSpec spec;
  std::vector<GroupElement> elements;
  bool density_claim = true;

  /// Validates every element against `spec`; throws on an empty list.
  GeneratorSet(GroupSpec spec, std::vector<GroupElement> elements, bool density_claim = true);
};

}  // namespace udseq

#endif  // UDSEQ_GROUPS_HPP

#ifndef UDSEQ_EQUIDIST_HPP
#define UDSEQ_EQUIDIST_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "udseq/groups.hpp"

namespace udseq {

/// |(1/N) Σ_n exp(2πi k·x_n)| for torus points stored column-wise (d x N).
template <typename Derived>
typename Derived::Scalar weyl_sum(const Eigen::MatrixBase<Derived>& points, const Eigen::Ref<const Eigen::VectorXi>& k) {
  using Scalar = typename Derived::Scalar;
  if (points.cols() < 1) throw std::invalid_argument("weyl_sum: need at least one point");
  if (k.size() != points.rows()) throw std::invalid_argument("weyl_sum: frequency dimension mismatch");
  if (k.isZero()) throw std::invalid_argument("weyl_sum: k = 0 is the trivial character");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> kk = k.cast<Scalar>();
  Scalar re = 0;
  Scalar im = 0;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  for (Eigen::Index n = 0; n < points.cols(); ++n) {
    const Scalar phase = two_pi * kk.dot(points.col(n));
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const auto count = static_cast<Scalar>(points.cols());
  return std::hypot(re, im) / count;
}

/// Exact star discrepancy of points in [0,1):
/// max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted points.
template <typename Derived>
typename Derived::Scalar star_discrepancy_1d(const Eigen::DenseBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  if (points.size() < 1) throw std::invalid_argument("star_discrepancy_1d: need at least one point");
  std::vector<Scalar> x(static_cast<std::size_t>(points.size()));
  for (Eigen::Index i = 0; i < points.size(); ++i) x[static_cast<std::size_t>(i)] = points.derived().coeff(i);
  std::sort(x.begin(), x.end());
  const auto n = static_cast<Scalar>(x.size());
  Scalar d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar upper = static_cast<Scalar>(i + 1) / n - x[i];
    const Scalar lower = x[i] - static_cast<Scalar>(i) / n;
    d = std::max({d, upper, lower});
  }
  return d;
}

/// Grid-anchored star discrepancy for d in {2, 3}: the maximum over boxes
/// [0, j_1/G) x ... x [0, j_d/G) of |empirical mass - volume|. This is a
/// lower bound on the true star discrepancy.
template <typename Derived>
typename Derived::Scalar star_discrepancy_grid(const Eigen::MatrixBase<Derived>& points, int resolution) {
  using Scalar = typename Derived::Scalar;
  const auto d = static_cast<int>(points.rows());
  if (d < 2 || d > 3) throw std::invalid_argument("star_discrepancy_grid: only d = 2 and d = 3 are supported");
  if (resolution < 1 || resolution > 64) throw std::invalid_argument("star_discrepancy_grid: resolution must be in [1, 64]");
  if (points.cols() < 1) throw std::invalid_argument("star_discrepancy_grid: need at least one point");
  const int g = resolution;
  const int side = g + 1;
  const std::size_t cells = static_cast<std::size_t>(d == 2 ? side * side : side * side * side);
  std::vector<double> count(cells, 0.0);
  auto flat = [&](int a, int b, int c) { return static_cast<std::size_t>((a * side + b) * (d == 3 ? side : 1) + c); };
  for (Eigen::Index n = 0; n < points.cols(); ++n) {
    int idx[3] = {0, 0, 0};
    for (int i = 0; i < d; ++i) {
      idx[i] = std::min(g - 1, static_cast<int>(std::floor(points(i, n) * g)));
      idx[i] = std::max(idx[i], 0);
    }
    // Cell c sits at prefix-sum slot c + 1 so slot j counts cells < j.
    if (d == 2) {
      count[flat(idx[0] + 1, idx[1] + 1, 0)] += 1;
    } else {
      count[flat(idx[0] + 1, idx[1] + 1, idx[2] + 1)] += 1;
    }
  }
  // Inclusive prefix sums along each axis.
  const int zmax = d == 3 ? side : 1;
  for (int a = 1; a < side; ++a)
    for (int b = 0; b < side; ++b)
      for (int c = 0; c < zmax; ++c) count[flat(a, b, c)] += count[flat(a - 1, b, c)];
  for (int a = 0; a < side; ++a)
    for (int b = 1; b < side; ++b)
      for (int c = 0; c < zmax; ++c) count[flat(a, b, c)] += count[flat(a, b - 1, c)];
  if (d == 3) {
    for (int a = 0; a < side; ++a)
      for (int b = 0; b < side; ++b)
        for (int c = 1; c < side; ++c) count[flat(a, b, c)] += count[flat(a, b, c - 1)];
  }
  const auto total = static_cast<Scalar>(points.cols());
  Scalar best = 0;
  for (int a = 1; a < side; ++a)
    for (int b = 1; b < side; ++b)
      for (int c = (d == 3 ? 1 : 0); c < zmax; ++c) {
        Scalar volume = Scalar(a) / g * (Scalar(b) / g);
        if (d == 3) volume *= Scalar(c) / g;
        best = std::max(best, std::abs(static_cast<Scalar>(count[flat(a, b, c)]) / total - volume));
      }
  return best;
}

/// Nonzero frequencies in [-cutoff, cutoff]^d whose first nonzero entry is
/// positive (one of each ±k pair), ordered by height max|k_i| and then
/// lexicographically.
std::vector<Eigen::VectorXi> canonical_frequencies(int d, int cutoff);

/// Packs torus elements into a d x N matrix.
Eigen::MatrixXd torus_matrix(const GroupSpec& spec, std::span<const GroupElement> points);

/// Label of an irreducible representation:
///   torus       frequency vector k
///   cyclic      {j}, character x -> exp(2πi j x / n)
///   product     {j_1, ..., j_m}
///   permutation {0} sign, {1} standard (fixed points - 1)
///   su2         {2j}, spin-j character
struct RepIndex {
  std::vector<int> values;
};

/// |(1/N) Σ χ(x_n)| for a nontrivial irreducible character χ.
double character_average(const GroupSpec& spec, std::span<const GroupElement> points, const RepIndex& rep);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct TestRecord {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double alpha = 0.0;  // false-alarm probability of this test under Haar i.i.d. sampling
};

/// Outcome of a battery of equidistribution tests at a finite sample
/// size. A pass is a calibrated statistical decision, not a certificate.
struct EquidistReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<TestRecord> tests;
  Verdict verdict = Verdict::inconclusive;
  double family_alpha = 0.0;  // union (Bonferroni) bound on the false-alarm rate of the verdict
};

struct EquidistConfig {
  int frequency_cutoff = 8;         // torus Weyl tests use max |k_i| ≤ cutoff
  int max_twice_spin = 4;           // SU(2) spins j = 1/2, 1, ..., 2
  double constant = 3.0;            // thresholds are constant / sqrt(N)
  double discrepancy_constant = 2.5;
  int grid_resolution = 32;
  std::size_t max_character_tests = 4096;
  std::size_t chi_square_max_classes = 4096;
  std::size_t min_n = 1000;         // below this the verdict is inconclusive
  /// Variance scale of the SU(2) character averages, entry 2j-1 for spin j:
  /// thresholds become constant * sqrt(var) / sqrt(N). Missing entries
  /// use 1, the value for i.i.d. Haar samples.
  std::vector<double> su2_character_variance;
};

EquidistReport equidist_report(const GroupSpec& spec, std::span<const GroupElement> points,
                               const EquidistConfig& cfg = {}, std::uint64_t seed = 0);

/// Weyl moduli for every canonical frequency with 1 ≤ max|k_i| ≤ cutoff
/// (one of each ±k pair), in the order used by equidist_report.
std::vector<std::pair<Eigen::VectorXi, double>> weyl_spectrum(const Eigen::MatrixXd& points, int cutoff);

/// (N, statistic) at prefixes N = 10^2, ..., 10^6 not exceeding the input
/// size, where the statistic is the largest Weyl or character modulus.
std::vector<std::pair<std::size_t, double>> convergence_curve(const GroupSpec& spec, std::span<const GroupElement> points,
                                                              const EquidistConfig& cfg = {});

}  // namespace udseq

#endif  // UDSEQ_EQUIDIST_HPP

#ifndef UDSEQ_MEASURES_HPP
#define UDSEQ_MEASURES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "udseq/actions.hpp"
#include "udseq/test_functions.hpp"

namespace udseq {

/// An indexed family f_1, f_2, ... of bounded continuous functions on X
/// used to build the weak* metric.
///
///   torus        cos and sin of the characters k·x, frequencies ordered by
///                height and then lexicographically (one of each ±k pair)
///   finite       indicators of the elements in enumeration order; the
///                family is complete when |G| ≤ max_terms
///   su2          the monomials w^a x^b y^c z^d of degree ≥ 1 ordered by
///                degree; polynomials in the coordinates are dense in C(S^3)
///
/// Every family separates probability measures on its space (the finite
/// family only when complete).
class DenseFunctionFamily {
 public:
  explicit DenseFunctionFamily(GroupSpec space, std::size_t max_terms = 64);

  const GroupSpec& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return functions_.size(); }
  bool complete() const noexcept { return complete_; }

  /// f_{n+1} (zero-based).
  const TestFunction& operator[](std::size_t n) const { return functions_.at(n); }
  double eval(std::size_t n, const GroupElement& x) const { return functions_.at(n).eval(x); }
  double sup_norm(std::size_t n) const { return functions_.at(n).sup_norm; }
  double haar_integral(std::size_t n) const { return functions_.at(n).haar_integral; }
  const std::string& name(std::size_t n) const { return functions_.at(n).name; }

 private:
  GroupSpec space_;
  std::vector<TestFunction> functions_;
  bool complete_ = false;
};

/// A finitely supported probability measure.
class EmpiricalMeasure {
 public:
  /// Weights must be non-negative and sum to 1 within 1e-12.
  EmpiricalMeasure(GroupSpec space, std::vector<GroupElement> points, std::vector<double> weights);

  static EmpiricalMeasure dirac(GroupSpec space, GroupElement x);
  static EmpiricalMeasure uniform(GroupSpec space, std::vector<GroupElement> points);
  /// Σ lambda_i sigma_i; the lambdas must form a probability vector.
  static EmpiricalMeasure mixture(std::span<const EmpiricalMeasure> parts, std::span<const double> lambdas);

  const GroupSpec& space() const noexcept { return space_; }
  const std::vector<GroupElement>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  GroupSpec space_;
  std::vector<GroupElement> points_;
  std::vector<double> weights_;
};

/// ∫ f_n dsigma for n = 1..min(M, |family|).
std::vector<double> moments(const DenseFunctionFamily& family, const EmpiricalMeasure& sigma, std::size_t truncation);
/// ∫ f_n dHaar for n = 1..min(M, |family|).
std::vector<double> haar_moments(const DenseFunctionFamily& family, std::size_t truncation);

/// Truncated distance and a bound on the omitted terms; the true distance
/// lies in [value, value + tail_bound].
struct DistanceBound {
  double value = 0.0;
  double tail_bound = 0.0;
  double upper() const noexcept { return value + tail_bound; }
};

/// 2^{1-M'} with M' = min(M, |family|), or 0 when the family is complete
/// and fully used.
double truncation_tail(const DenseFunctionFamily& family, std::size_t truncation);

/// Σ_{n ≤ M} |a_n - b_n| / (2^n ‖f_n‖) for precomputed moment vectors.
double moment_distance(const DenseFunctionFamily& family, std::span<const double> a, std::span<const double> b);

/// d(sigma, nu) = Σ_n |∫f_n dsigma - ∫f_n dnu| / (2^n ‖f_n‖), truncated at M.
DistanceBound weakstar_distance(const DenseFunctionFamily& family, const EmpiricalMeasure& sigma,
                                const EmpiricalMeasure& nu, std::size_t truncation = 20);
DistanceBound weakstar_distance_to_haar(const DenseFunctionFamily& family, const EmpiricalMeasure& sigma,
                                        std::size_t truncation = 20);

/// Image of sigma under Phi_w: every atom moves, weights are unchanged.
EmpiricalMeasure push_forward(const ActionSpec& action, const Word& w, const EmpiricalMeasure& sigma);

/// Uniform mixture of the pushforwards of nu over a finite set of words.
EmpiricalMeasure folner_average(const ActionSpec& action, std::span<const Word> folner_set, const EmpiricalMeasure& nu);
/// Same over group elements g acting by x -> x * g.
EmpiricalMeasure folner_average(const GroupSpec& spec, std::span<const GroupElement> folner_set,
                                const EmpiricalMeasure& nu);

/// {e, g, g^2, ..., g^{m-1}}: the image of the interval {0, ..., m-1} of Z
/// under j -> g^j.
std::vector<GroupElement> interval_folner_set(const GroupSpec& spec, const GroupElement& g, std::size_t m);

/// Σ lambda_k delta_{w_k}, acting on measures by sigma -> Σ lambda_k Phi_{w_k} sigma.
class ConvexWordCombination {
 public:
  ConvexWordCombination(std::vector<Word> words, std::vector<double> weights);
  static ConvexWordCombination uniform(std::vector<Word> words);

  const std::vector<Word>& words() const noexcept { return words_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return words_.size(); }

  EmpiricalMeasure apply(const ActionSpec& action, const EmpiricalMeasure& sigma) const;

 private:
  std::vector<Word> words_;
  std::vector<double> weights_;
};

struct ApproxOptions {
  std::size_t rounds = 32;             // m
  std::size_t max_length = 32;         // L
  std::size_t truncation = 20;         // M
  std::size_t exhaustive_length = 4;   // all words up to this length are candidates
  std::size_t random_candidates = 256;
  std::uint64_t seed = 0;
};

struct ApproxStage {
  std::size_t m = 0;
  ConvexWordCombination combination;
  double worst_probe_distance = 0.0;
  double tail_bound = 0.0;
  bool improved = false;  // false when this round did not beat the best so far
};

/// Greedy construction of rho_1, rho_2, ...: each round appends the candidate
/// word that minimizes the worst distance max_sigma d(rho(sigma), target)
/// over the probes when all chosen words get equal weight. Stage m records
/// the best combination found in rounds 1..m, so the recorded worst-case
/// distance never increases.
std::vector<ApproxStage> convex_word_approx_stages(const ActionSpec& action, const DenseFunctionFamily& family,
                                                   std::span<const double> target_moments,
                                                   std::span<const EmpiricalMeasure> probes, const ApproxOptions& options);

/// Final stage of convex_word_approx_stages with the target given as a measure.
ApproxStage convex_word_approx(const ActionSpec& action, const DenseFunctionFamily& family, const EmpiricalMeasure& target,
                               std::span<const EmpiricalMeasure> probes, const ApproxOptions& options);

/// Dirac masses on `count` low-discrepancy points of X plus `mixtures`
/// seeded random convex combinations of them.
std::vector<EmpiricalMeasure> default_probe_set(const GroupSpec& spec, std::uint64_t seed, std::size_t count = 100,
                                                std::size_t mixtures = 10);

}  // namespace udseq

#endif  // UDSEQ_MEASURES_HPP

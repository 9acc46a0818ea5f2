#ifndef UDSEQ_PRODUCTS_HPP
#define UDSEQ_PRODUCTS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "udseq/actions.hpp"
#include "udseq/bernoulli.hpp"
#include "udseq/test_functions.hpp"

namespace udseq {

/// composition:          w_n = Phi_{r_n}(w_{n-1}),  w_0 = x
/// right_multiplication: y_n = x * (z_{r_1} * ... * z_{r_n}), the product
///                       accumulated separately and applied to x last.
enum class ProductOrder { composition, right_multiplication };

struct OrbitConfig {
  ActionSpec action;
  GroupElement start;
  ProbabilitySequence law;
  std::size_t length = 1;
  std::uint64_t seed = 0;
  ProductOrder order = ProductOrder::composition;
};

/// The index sequence driving an orbit: coordinate n of this window is r_n.
ShiftWindow driving_window(const ProbabilitySequence& law, std::uint64_t seed);

/// Incremental random-product orbit; each step applies one generator.
class RandomProductOrbit {
 public:
  explicit RandomProductOrbit(OrbitConfig cfg);

  /// Advances one step and returns the new point; throws std::out_of_range
  /// once done().
  const GroupElement& next();

  bool done() const noexcept { return step_ >= cfg_.length; }
  std::size_t step() const noexcept { return step_; }
  std::size_t length() const noexcept { return cfg_.length; }
  const GroupElement& current() const noexcept { return current_; }
  Symbol last_index() const noexcept { return last_index_; }

 private:
  OrbitConfig cfg_;
  ShiftWindow window_;
  std::size_t step_ = 0;
  GroupElement current_;
  GroupElement accumulated_;  // z_{r_1} ... z_{r_n} for right multiplication
  Symbol last_index_ = Symbol::infinity();
};

/// Collects w_1, ..., w_N.
std::vector<GroupElement> random_product_orbit(const OrbitConfig& cfg);

/// State (x, r) of the skew product on X x Y.
struct SkewState {
  GroupElement x;
  ShiftWindow window;
};

/// (x, r) -> (Phi_{r_1}(x), T r).
SkewState skew_step(const ActionSpec& action, const SkewState& s);

struct ProductMeasureReport {
  double time_average = 0.0;
  double target = 0.0;  // (∫ f dμ) · λ(c)
  double deviation = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
};

/// Time average of f(x_k) · 1[window_k ∈ c] along the skew orbit started
/// at (start, driving_window(law, seed)), compared with (∫ f dμ) · λ(c).
/// Requires n ≥ 10^4.
ProductMeasureReport product_measure_test(const ActionSpec& action, const ProbabilitySequence& law,
                                          const TestFunction& f, const Cylinder& c, std::size_t n,
                                          std::uint64_t seed, std::size_t burn_in = 0,
                                          std::optional<GroupElement> start = std::nullopt);

/// Smallest sample size product_measure_test accepts.
inline constexpr std::size_t kMinProductTestSize = 10'000;

/// q_i = Σ p_n over the indices n that resolve to generator i.
std::vector<double> generator_weights(const ActionSpec& action, const ProbabilitySequence& law);

/// Long-run variance lim N Var((1/N) Σ χ_j(x_n)) of the spin-j character
/// average along the walk x_n = x_{n-1} * z_{r_n} on SU(2) started from
/// Haar measure:
///
///   1 + (2 / (2j+1)) Re tr(P (I - P)^{-1}),   P = Σ q_i π_j(z_i).
///
/// Equals 1 for i.i.d. Haar samples; infinite when P has eigenvalue 1.
double su2_character_long_run_variance(const ActionSpec& action, const ProbabilitySequence& law, int twice_spin);

}  // namespace udseq

#endif  // UDSEQ_PRODUCTS_HPP

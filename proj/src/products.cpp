#include "udseq/products.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>
#include <stdexcept>

namespace udseq {

ShiftWindow driving_window(const ProbabilitySequence& law, std::uint64_t seed) {
  return ShiftWindow(law, derive_key(seed, Stream::index_sequence));
}

RandomProductOrbit::RandomProductOrbit(OrbitConfig cfg)
    : cfg_(std::move(cfg)), window_(driving_window(cfg_.law, cfg_.seed)), current_(cfg_.start) {
  cfg_.action.require_invertible("random_product_orbit");
  if (cfg_.length < 1) throw std::invalid_argument("orbit length must be ≥ 1");
  require_valid(cfg_.action.space(), cfg_.start, "start point");
  accumulated_ = identity(cfg_.action.space());
}

const GroupElement& RandomProductOrbit::next() {
  if (done()) throw std::out_of_range("orbit exhausted");
  ++step_;
  last_index_ = window_.read(static_cast<std::int64_t>(step_));
  if (cfg_.order == ProductOrder::composition) {
    current_ = apply_generator(cfg_.action, last_index_, current_);
  } else {
    accumulated_ = apply_generator(cfg_.action, last_index_, accumulated_);
    current_ = compose(cfg_.action.space(), cfg_.start, accumulated_);
  }
  return current_;
}

std::vector<GroupElement> random_product_orbit(const OrbitConfig& cfg) {
  RandomProductOrbit orbit(cfg);
  std::vector<GroupElement> points;
  points.reserve(cfg.length);
  while (!orbit.done()) points.push_back(orbit.next());
  return points;
}

SkewState skew_step(const ActionSpec& action, const SkewState& s) {
  return {apply_generator(action, s.window.read(1), s.x), shift(s.window)};
}

ProductMeasureReport product_measure_test(const ActionSpec& action, const ProbabilitySequence& law,
                                          const TestFunction& f, const Cylinder& c, std::size_t n,
                                          std::uint64_t seed, std::size_t burn_in,
                                          std::optional<GroupElement> start) {
  action.require_invertible("product_measure_test");
  if (n < kMinProductTestSize) {
    throw std::invalid_argument("product_measure_test needs n ≥ " + std::to_string(kMinProductTestSize));
  }
  SkewState state{start ? *start : identity(action.space()), driving_window(law, seed)};
  require_valid(action.space(), state.x, "start point");
  for (std::size_t k = 0; k < burn_in; ++k) state = skew_step(action, state);

  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (matches(c, state.window)) sum += f.eval(state.x);
    state = skew_step(action, state);
  }
  ProductMeasureReport report;
  report.time_average = sum / static_cast<double>(n);
  report.target = f.haar_integral * cylinder_measure(law, c);
  report.deviation = report.time_average - report.target;
  report.n = n;
  report.seed = seed;
  report.burn_in = burn_in;
  return report;
}

std::vector<double> generator_weights(const ActionSpec& action, const ProbabilitySequence& law) {
  std::vector<double> q(action.generator_count(), 0.0);
  constexpr std::uint64_t kMaxTerms = 10'000'000;
  std::uint64_t n = 1;
  for (; n <= kMaxTerms; ++n) {
    const double p = law.probability(n);
    if (p > 0.0) q[action.resolve(Symbol(n))] += p;
    if (law.mass_above(n) <= 1e-17) return q;
  }
  // Slowly decaying laws: spread the remainder evenly.
  const double rest = law.mass_above(n - 1) / static_cast<double>(q.size());
  for (auto& v : q) v += rest;
  return q;
}

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

// Spin-j image of a unit quaternion: the action of its 2x2 unitary on
// homogeneous polynomials of degree 2j in (u, v).
ComplexMatrix spin_matrix(const Quaternion& q, int twice_spin) {
  using C = std::complex<double>;
  const C a(q.w(), q.x()), b(q.y(), q.z());
  const C c(-q.y(), q.z()), d(q.w(), -q.x());
  const int n = twice_spin;
  ComplexMatrix out = ComplexMatrix::Zero(n + 1, n + 1);
  // Basis u^(n-m) v^m is sent to (a u + c v)^(n-m) (b u + d v)^m.
  for (int m = 0; m <= n; ++m) {
    std::vector<C> poly{C(1.0)};  // coefficients of v^0, v^1, ...
    auto times = [&poly](C lead_u, C lead_v) {
      std::vector<C> next(poly.size() + 1, C(0.0));
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i] * lead_u;
        next[i + 1] += poly[i] * lead_v;
      }
      poly = std::move(next);
    };
    for (int i = 0; i < n - m; ++i) times(a, c);
    for (int i = 0; i < m; ++i) times(b, d);
    for (int r = 0; r <= n; ++r) out(r, m) = poly[static_cast<std::size_t>(r)];
  }
  return out;
}

}  // namespace

double su2_character_long_run_variance(const ActionSpec& action, const ProbabilitySequence& law, int twice_spin) {
  if (action.space().kind() != GroupKind::su2 || action.kind() != ActionKind::translation) {
    throw std::invalid_argument("su2_character_long_run_variance: needs a translation action on su2");
  }
  if (twice_spin < 1) throw std::invalid_argument("su2_character_long_run_variance: spin must be positive");
  const auto q = generator_weights(action, law);
  const int dim = twice_spin + 1;
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < q.size(); ++i) {
    p += q[i] * spin_matrix(std::get<Quaternion>(action.generators().elements[i]), twice_spin);
  }
  const ComplexMatrix gap = ComplexMatrix::Identity(dim, dim) - p;
  Eigen::FullPivLU<ComplexMatrix> lu(gap);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
  const std::complex<double> t = (p * lu.inverse()).trace();
  return 1.0 + 2.0 * t.real() / dim;
}

}  // namespace udseq

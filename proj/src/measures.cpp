#include "udseq/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "udseq/equidist.hpp"

namespace udseq {

namespace {

// Neumaier summation; weight vectors of a million equal atoms must still
// normalize to 1 within 1e-12.
double compensated_sum(std::span<const double> v) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

void check_probability_vector(std::span<const double> w, std::string_view who) {
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": weights must be finite and non-negative");
  }
  if (std::abs(compensated_sum(w) - 1.0) > 1e-12) throw std::invalid_argument(std::string(who) + ": weights must sum to 1");
}

TestFunction quaternion_monomial(const std::array<int, 4>& a) {
  const int degree = a[0] + a[1] + a[2] + a[3];
  double sup = 1.0;
  bool even = true;
  double log_gamma = 0.0;
  for (int e : a) {
    if (e > 0) sup *= std::pow(static_cast<double>(e) / degree, e / 2.0);
    even = even && e % 2 == 0;
    log_gamma += std::lgamma((e + 1) / 2.0);
  }
  // Moments of the uniform law on S^3.
  const double integral =
      even ? std::exp(log_gamma - std::lgamma((degree + 4) / 2.0)) / (std::numbers::pi * std::numbers::pi) : 0.0;
  std::string name = "mono:";
  for (int i = 0; i < 4; ++i) name += (i ? " " : "") + std::to_string(a[i]);
  return {name,
          [a](const GroupElement& x) {
            const auto& q = std::get<Quaternion>(x);
            const double c[4] = {q.w(), q.x(), q.y(), q.z()};
            double v = 1.0;
            for (int i = 0; i < 4; ++i) {
              for (int k = 0; k < a[i]; ++k) v *= c[i];
            }
            return v;
          },
          integral, sup};
}

}  // namespace

DenseFunctionFamily::DenseFunctionFamily(GroupSpec space, std::size_t max_terms) : space_(std::move(space)) {
  if (max_terms < 1) throw std::invalid_argument("function family needs at least one term");
  switch (space_.kind()) {
    case GroupKind::torus: {
      const int d = space_.dimension();
      const std::size_t want = (max_terms + 1) / 2;
      std::vector<Eigen::VectorXi> freqs;
      for (int h = 1; freqs.size() < want; ++h) freqs = canonical_frequencies(d, h);
      for (std::size_t i = 0; i < want && functions_.size() < max_terms; ++i) {
        functions_.push_back(torus_cos(freqs[i]));
        if (functions_.size() < max_terms) functions_.push_back(torus_sin(freqs[i]));
      }
      break;
    }
    case GroupKind::cyclic:
    case GroupKind::product:
    case GroupKind::permutation: {
      const auto order = *space_.order();
      const auto n = std::min<std::uint64_t>(order, max_terms);
      for (std::uint64_t r = 0; r < n; ++r) functions_.push_back(finite_indicator(space_, element_at(space_, r)));
      complete_ = order <= max_terms;
      break;
    }
    case GroupKind::su2: {
      for (int degree = 1; functions_.size() < max_terms; ++degree) {
        for (int a = degree; a >= 0 && functions_.size() < max_terms; --a)
          for (int b = degree - a; b >= 0 && functions_.size() < max_terms; --b)
            for (int c = degree - a - b; c >= 0 && functions_.size() < max_terms; --c) {
              functions_.push_back(quaternion_monomial({a, b, c, degree - a - b - c}));
            }
      }
      break;
    }
  }
}

EmpiricalMeasure::EmpiricalMeasure(GroupSpec space, std::vector<GroupElement> points, std::vector<double> weights)
    : space_(std::move(space)), points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw std::invalid_argument("empirical measure needs at least one atom");
  if (points_.size() != weights_.size()) throw std::invalid_argument("empirical measure: points and weights differ in length");
  for (const auto& p : points_) require_valid(space_, p, "atom");
  check_probability_vector(weights_, "empirical measure");
}

EmpiricalMeasure EmpiricalMeasure::dirac(GroupSpec space, GroupElement x) {
  return EmpiricalMeasure(std::move(space), {std::move(x)}, {1.0});
}

EmpiricalMeasure EmpiricalMeasure::uniform(GroupSpec space, std::vector<GroupElement> points) {
  if (points.empty()) throw std::invalid_argument("empirical measure needs at least one atom");
  std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
  return EmpiricalMeasure(std::move(space), std::move(points), std::move(w));
}

EmpiricalMeasure EmpiricalMeasure::mixture(std::span<const EmpiricalMeasure> parts, std::span<const double> lambdas) {
  if (parts.empty() || parts.size() != lambdas.size()) throw std::invalid_argument("mixture: need one weight per part");
  check_probability_vector(lambdas, "mixture");
  std::vector<GroupElement> points;
  std::vector<double> weights;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!(parts[i].space() == parts[0].space())) throw std::invalid_argument("mixture: parts live on different spaces");
    for (std::size_t j = 0; j < parts[i].size(); ++j) {
      points.push_back(parts[i].points()[j]);
      weights.push_back(lambdas[i] * parts[i].weights()[j]);
    }
  }
  return EmpiricalMeasure(parts[0].space(), std::move(points), std::move(weights));
}

std::vector<double> moments(const DenseFunctionFamily& family, const EmpiricalMeasure& sigma, std::size_t truncation) {
  if (!(family.space() == sigma.space())) throw std::invalid_argument("moments: measure and family live on different spaces");
  const auto m = std::min(truncation, family.size());
  std::vector<double> out(m, 0.0);
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    for (std::size_t n = 0; n < m; ++n) out[n] += sigma.weights()[a] * family.eval(n, sigma.points()[a]);
  }
  return out;
}

std::vector<double> haar_moments(const DenseFunctionFamily& family, std::size_t truncation) {
  const auto m = std::min(truncation, family.size());
  std::vector<double> out(m);
  for (std::size_t n = 0; n < m; ++n) out[n] = family.haar_integral(n);
  return out;
}

double truncation_tail(const DenseFunctionFamily& family, std::size_t truncation) {
  const auto m = std::min(truncation, family.size());
  if (family.complete() && m == family.size()) return 0.0;
  return std::ldexp(1.0, 1 - static_cast<int>(m));
}

double moment_distance(const DenseFunctionFamily& family, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() > family.size()) throw std::invalid_argument("moment_distance: length mismatch");
  double d = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    d += std::abs(a[n] - b[n]) / (std::ldexp(1.0, static_cast<int>(n) + 1) * family.sup_norm(n));
  }
  return d;
}

DistanceBound weakstar_distance(const DenseFunctionFamily& family, const EmpiricalMeasure& sigma, const EmpiricalMeasure& nu,
                                std::size_t truncation) {
  if (truncation < 1) throw std::invalid_argument("truncation must be ≥ 1");
  const auto a = moments(family, sigma, truncation);
  const auto b = moments(family, nu, truncation);
  return {moment_distance(family, a, b), truncation_tail(family, truncation)};
}

DistanceBound weakstar_distance_to_haar(const DenseFunctionFamily& family, const EmpiricalMeasure& sigma,
                                        std::size_t truncation) {
  if (truncation < 1) throw std::invalid_argument("truncation must be ≥ 1");
  const auto a = moments(family, sigma, truncation);
  const auto b = haar_moments(family, truncation);
  return {moment_distance(family, a, b), truncation_tail(family, truncation)};
}

EmpiricalMeasure push_forward(const ActionSpec& action, const Word& w, const EmpiricalMeasure& sigma) {
  if (!(action.space() == sigma.space())) throw std::invalid_argument("push_forward: measure does not live on the action's space");
  std::vector<GroupElement> points;
  points.reserve(sigma.size());
  for (const auto& p : sigma.points()) points.push_back(apply_word(action, w, p));
  return EmpiricalMeasure(sigma.space(), std::move(points), sigma.weights());
}

EmpiricalMeasure folner_average(const ActionSpec& action, std::span<const Word> folner_set, const EmpiricalMeasure& nu) {
  if (folner_set.empty()) throw std::invalid_argument("folner_average: empty set");
  if (!(action.space() == nu.space())) throw std::invalid_argument("folner_average: measure does not live on the action's space");
  const double share = 1.0 / static_cast<double>(folner_set.size());
  std::vector<GroupElement> points;
  std::vector<double> weights;
  points.reserve(folner_set.size() * nu.size());
  weights.reserve(folner_set.size() * nu.size());
  for (const auto& w : folner_set) {
    for (std::size_t a = 0; a < nu.size(); ++a) {
      points.push_back(apply_word(action, w, nu.points()[a]));
      weights.push_back(share * nu.weights()[a]);
    }
  }
  return EmpiricalMeasure(nu.space(), std::move(points), std::move(weights));
}

EmpiricalMeasure folner_average(const GroupSpec& spec, std::span<const GroupElement> folner_set, const EmpiricalMeasure& nu) {
  if (folner_set.empty()) throw std::invalid_argument("folner_average: empty set");
  if (!(spec == nu.space())) throw std::invalid_argument("folner_average: measure does not live on the group");
  const double share = 1.0 / static_cast<double>(folner_set.size());
  std::vector<GroupElement> points;
  std::vector<double> weights;
  points.reserve(folner_set.size() * nu.size());
  weights.reserve(folner_set.size() * nu.size());
  for (const auto& g : folner_set) {
    for (std::size_t a = 0; a < nu.size(); ++a) {
      points.push_back(compose(spec, nu.points()[a], g));
      weights.push_back(share * nu.weights()[a]);
    }
  }
  return EmpiricalMeasure(spec, std::move(points), std::move(weights));
}

std::vector<GroupElement> interval_folner_set(const GroupSpec& spec, const GroupElement& g, std::size_t m) {
  if (m < 1) throw std::invalid_argument("interval_folner_set: m must be ≥ 1");
  require_valid(spec, g, "generator");
  std::vector<GroupElement> out;
  out.reserve(m);
  out.push_back(identity(spec));
  for (std::size_t j = 1; j < m; ++j) out.push_back(compose(spec, out.back(), g));
  return out;
}

ConvexWordCombination::ConvexWordCombination(std::vector<Word> words, std::vector<double> weights)
    : words_(std::move(words)), weights_(std::move(weights)) {
  if (words_.empty()) throw std::invalid_argument("convex combination needs at least one word");
  if (words_.size() != weights_.size()) throw std::invalid_argument("convex combination: one weight per word");
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("convex combination weights must be positive");
  }
  check_probability_vector(weights_, "convex combination");
}

ConvexWordCombination ConvexWordCombination::uniform(std::vector<Word> words) {
  if (words.empty()) throw std::invalid_argument("convex combination needs at least one word");
  std::vector<double> w(words.size(), 1.0 / static_cast<double>(words.size()));
  return ConvexWordCombination(std::move(words), std::move(w));
}

EmpiricalMeasure ConvexWordCombination::apply(const ActionSpec& action, const EmpiricalMeasure& sigma) const {
  std::vector<GroupElement> points;
  std::vector<double> weights;
  for (std::size_t k = 0; k < words_.size(); ++k) {
    for (std::size_t a = 0; a < sigma.size(); ++a) {
      points.push_back(apply_word(action, words_[k], sigma.points()[a]));
      weights.push_back(weights_[k] * sigma.weights()[a]);
    }
  }
  return EmpiricalMeasure(sigma.space(), std::move(points), std::move(weights));
}

namespace {

std::vector<Word> candidate_words(const ActionSpec& action, const ApproxOptions& o) {
  const auto k = static_cast<std::uint64_t>(action.generator_count());
  std::vector<Word> out;
  std::set<std::string> seen;
  auto add = [&](Word w) {
    if (seen.insert(w.to_string()).second) out.push_back(std::move(w));
  };
  // Exhaustive short words, capped so large generator sets stay tractable.
  constexpr std::size_t kExhaustiveCap = 4096;
  std::vector<std::vector<std::uint64_t>> layer{{}};
  for (std::size_t len = 1; len <= std::min(o.exhaustive_length, o.max_length); ++len) {
    if (layer.size() * k > kExhaustiveCap) break;
    std::vector<std::vector<std::uint64_t>> next;
    for (const auto& prefix : layer) {
      for (std::uint64_t s = 1; s <= k; ++s) {
        auto w = prefix;
        w.push_back(s);
        std::vector<Symbol> symbols;
        for (auto i : w) symbols.emplace_back(i);
        add(Word(std::move(symbols)));
        next.push_back(std::move(w));
      }
    }
    layer = std::move(next);
  }
  for (std::uint64_t s = 1; s <= k; ++s)
    for (std::size_t len = 1; len <= o.max_length; ++len) add(Word::repeat(s, len));
  CounterRng rng(derive_key(o.seed, Stream::words));
  for (std::size_t i = 0; i < o.random_candidates; ++i) {
    const auto len = 1 + uniform_index(rng, o.max_length);
    std::vector<Symbol> symbols;
    for (std::uint64_t j = 0; j < len; ++j) symbols.emplace_back(1 + uniform_index(rng, k));
    add(Word(std::move(symbols)));
  }
  return out;
}

}  // namespace

std::vector<ApproxStage> convex_word_approx_stages(const ActionSpec& action, const DenseFunctionFamily& family,
                                                   std::span<const double> target_moments,
                                                   std::span<const EmpiricalMeasure> probes, const ApproxOptions& o) {
  if (o.rounds < 1 || o.max_length < 1) throw std::invalid_argument("convex_word_approx: m and L must be ≥ 1");
  if (o.truncation < 1) throw std::invalid_argument("convex_word_approx: truncation must be ≥ 1");
  if (probes.empty()) throw std::invalid_argument("convex_word_approx: empty probe set");
  if (!(family.space() == action.space())) throw std::invalid_argument("convex_word_approx: family lives on another space");
  const auto m = std::min(o.truncation, family.size());
  if (target_moments.size() != m) throw std::invalid_argument("convex_word_approx: target moment length mismatch");

  const auto words = candidate_words(action, o);
  const std::size_t nc = words.size();
  const std::size_t np = probes.size();

  // cand[(c * np + p) * m + n] = ∫ f_n d(Phi_{w_c} probe_p)
  std::vector<double> cand(nc * np * m, 0.0);
  std::vector<double> atom(m);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t p = 0; p < np; ++p) {
      double* row = &cand[(c * np + p) * m];
      for (std::size_t a = 0; a < probes[p].size(); ++a) {
        const auto y = apply_word(action, words[c], probes[p].points()[a]);
        const double w = probes[p].weights()[a];
        for (std::size_t n = 0; n < m; ++n) row[n] += w * family.eval(n, y);
      }
    }
  }

  auto worst_for = [&](const std::vector<double>& sums, std::size_t c, double count) {
    double worst = 0.0;
    std::vector<double> mix(m);
    for (std::size_t p = 0; p < np; ++p) {
      const double* row = &cand[(c * np + p) * m];
      for (std::size_t n = 0; n < m; ++n) mix[n] = (sums[p * m + n] + row[n]) / count;
      worst = std::max(worst, moment_distance(family, mix, target_moments));
    }
    return worst;
  };

  const double tail = truncation_tail(family, o.truncation);
  std::vector<double> sums(np * m, 0.0);
  std::vector<Word> chosen;
  std::vector<ApproxStage> stages;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Word> best_words;
  for (std::size_t round = 1; round <= o.rounds; ++round) {
    std::size_t pick = 0;
    double pick_value = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < nc; ++c) {
      const double v = worst_for(sums, c, static_cast<double>(round));
      if (v < pick_value) {
        pick_value = v;
        pick = c;
      }
    }
    chosen.push_back(words[pick]);
    for (std::size_t p = 0; p < np; ++p) {
      const double* row = &cand[(pick * np + p) * m];
      for (std::size_t n = 0; n < m; ++n) sums[p * m + n] += row[n];
    }
    // Gains at the level of summation roundoff do not count.
    const bool improved = pick_value < best - 1e-12;
    if (improved) {
      best = pick_value;
      best_words = chosen;
    }
    stages.push_back({round, ConvexWordCombination::uniform(best_words), best, tail, improved});
  }
  return stages;
}

ApproxStage convex_word_approx(const ActionSpec& action, const DenseFunctionFamily& family, const EmpiricalMeasure& target,
                               std::span<const EmpiricalMeasure> probes, const ApproxOptions& options) {
  const auto target_moments = moments(family, target, options.truncation);
  return convex_word_approx_stages(action, family, target_moments, probes, options).back();
}

std::vector<EmpiricalMeasure> default_probe_set(const GroupSpec& spec, std::uint64_t seed, std::size_t count,
                                                std::size_t mixtures) {
  if (count < 1) throw std::invalid_argument("probe set needs at least one point");
  CounterRng rng(derive_key(seed, Stream::probes));
  std::vector<GroupElement> points;
  if (spec.kind() == GroupKind::torus) {
    static constexpr double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const int d = spec.dimension();
    for (std::size_t i = 0; i < count; ++i) {
      TorusPoint x(d);
      x[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      for (int j = 1; j < d; ++j) {
        const double alpha = std::sqrt(kPrimes[static_cast<std::size_t>(j - 1) % std::size(kPrimes)]);
        x[j] = wrap_unit((static_cast<double>(i) + 0.5) * alpha);
      }
      points.push_back(std::move(x));
    }
  } else if (spec.is_finite() && *spec.order() <= count) {
    for (std::uint64_t r = 0; r < *spec.order(); ++r) points.push_back(element_at(spec, r));
  } else {
    for (std::size_t i = 0; i < count; ++i) points.push_back(haar_sample(spec, rng));
  }
  std::vector<EmpiricalMeasure> probes;
  for (const auto& p : points) probes.push_back(EmpiricalMeasure::dirac(spec, p));
  const std::size_t diracs = probes.size();
  for (std::size_t i = 0; i < mixtures; ++i) {
    const std::size_t parts = std::min<std::size_t>(diracs, 2 + uniform_index(rng, 4));
    std::vector<GroupElement> atoms;
    std::vector<double> weights;
    for (std::size_t j = 0; j < parts; ++j) {
      atoms.push_back(points[uniform_index(rng, diracs)]);
      weights.push_back(-std::log(uniform_left_open(rng)));
    }
    const double total = compensated_sum(weights);
    for (auto& w : weights) w /= total;
    weights.back() = 1.0 - compensated_sum(std::span<const double>(weights).first(weights.size() - 1));
    probes.emplace_back(spec, std::move(atoms), std::move(weights));
  }
  return probes;
}

}  // namespace udseq

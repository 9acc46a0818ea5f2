#include "udseq/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace udseq {

namespace {

std::vector<GroupElement> base_points(const GroupSpec& spec, std::size_t grid, std::size_t random, std::uint64_t seed) {
  std::vector<GroupElement> out;
  CounterRng rng(derive_key(derive_key(seed, Stream::probes), 1));
  for (std::size_t i = 0; i < grid; ++i) {
    switch (spec.kind()) {
      case GroupKind::torus: {
        const int d = spec.dimension();
        TorusPoint x(d);
        x[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
        for (int j = 1; j < d; ++j) x[j] = wrap_unit((static_cast<double>(i) + 0.5) * std::sqrt(2.0 + j));
        out.push_back(std::move(x));
        break;
      }
      case GroupKind::su2: out.push_back(haar_sample(spec, rng)); break;
      default: out.push_back(element_at(spec, i % *spec.order())); break;
    }
  }
  for (std::size_t i = 0; i < random; ++i) out.push_back(haar_sample(spec, rng));
  return out;
}

// A point at distance `dist` from x (sup-norm on the torus, geodesic on
// SU(2)); finite groups only have y = x below distance 1.
GroupElement perturb(const GroupSpec& spec, const GroupElement& x, double dist, CounterRng& rng) {
  switch (spec.kind()) {
    case GroupKind::torus: {
      TorusPoint y = std::get<TorusPoint>(x);
      const auto lead = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(y.size())));
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double step = i == lead ? dist : dist * (2.0 * uniform01(rng) - 1.0);
        const double sign = (i == lead && uniform01(rng) < 0.5) ? -1.0 : 1.0;
        y[i] = wrap_unit(y[i] + sign * step);
      }
      return y;
    }
    case GroupKind::su2: {
      const double phi = dist * std::numbers::pi;
      Eigen::Vector3d axis(standard_normal(rng), standard_normal(rng), standard_normal(rng));
      axis.normalize();
      const Quaternion r(std::cos(phi), std::sin(phi) * axis.x(), std::sin(phi) * axis.y(), std::sin(phi) * axis.z());
      return compose(spec, x, GroupElement(r));
    }
    default:
      if (dist < 1.0) return x;
      return element_at(spec, (element_rank(spec, x) + 1) % *spec.order());
  }
}

struct Track {
  double worst = -1.0;
  std::size_t word = 0;
  std::size_t length = 0;
};

// Worst separation of (x, y) over every prefix of every word; stops once
// the separation reaches `stop_at`.
Track track(const ActionSpec& action, const std::vector<Word>& words, const GroupElement& x, const GroupElement& y,
            double stop_at = 2.0) {
  const auto& spec = action.space();
  Track t;
  for (std::size_t w = 0; w < words.size(); ++w) {
    GroupElement a = x;
    GroupElement b = y;
    const auto& symbols = words[w].symbols();
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      a = apply_generator(action, symbols[i], a);
      b = apply_generator(action, symbols[i], b);
      const double d = metric(spec, a, b);
      if (d > t.worst) t = {d, w, i + 1};
      if (t.worst >= stop_at) return t;
    }
  }
  return t;
}

Word prefix(const Word& w, std::size_t length) {
  return Word(std::vector<Symbol>(w.symbols().begin(), w.symbols().begin() + static_cast<std::ptrdiff_t>(length)));
}

void require_small_torus(const ActionSpec& action, std::string_view who) {
  if (action.space().kind() != GroupKind::torus || action.space().dimension() > 2) {
    throw std::invalid_argument(std::string(who) + " supports torus:1 and torus:2 only");
  }
}

TorusPoint cell_centre(const EkEstimate& e, std::size_t cell) {
  TorusPoint c(e.dimension);
  const double w = 1.0 / e.resolution;
  if (e.dimension == 1) {
    c[0] = (static_cast<double>(cell) + 0.5) * w;
  } else {
    c[0] = (static_cast<double>(cell / static_cast<std::size_t>(e.resolution)) + 0.5) * w;
    c[1] = (static_cast<double>(cell % static_cast<std::size_t>(e.resolution)) + 0.5) * w;
  }
  return c;
}

}  // namespace

void SensitivityProbeConfig::validate() const {
  if (beta_levels.empty()) throw std::invalid_argument("sensitivity: need at least one beta level");
  for (double b : beta_levels) {
    if (!(b > 0.0)) throw std::invalid_argument("sensitivity: beta levels must be positive");
  }
  if (delta_ladder.empty()) throw std::invalid_argument("sensitivity: delta ladder is empty");
  for (std::size_t i = 0; i < delta_ladder.size(); ++i) {
    if (!(delta_ladder[i] > 0.0)) throw std::invalid_argument("sensitivity: delta ladder must be positive");
    if (i > 0 && !(delta_ladder[i] < delta_ladder[i - 1])) {
      throw std::invalid_argument("sensitivity: delta ladder must be strictly decreasing");
    }
  }
  if (grid_points + random_points < 1) throw std::invalid_argument("sensitivity: need at least one base point");
  if (word_count + exhaustive_length < 1 || max_word_length < 1) throw std::invalid_argument("sensitivity: word budget must be ≥ 1");
}

std::string to_string(SensitivityOutcome o) {
  switch (o) {
    case SensitivityOutcome::sensitive_witnessed: return "sensitive-witnessed";
    case SensitivityOutcome::non_sensitive_at_resolution: return "non-sensitive-at-resolution";
    case SensitivityOutcome::inconclusive: return "inconclusive";
  }
  return {};
}

std::vector<Word> sample_words(const ActionSpec& action, std::size_t exhaustive_length, std::size_t count,
                               std::size_t max_length, std::uint64_t seed) {
  const auto k = static_cast<std::uint64_t>(action.generator_count());
  std::vector<Word> out;
  // Maximal exhaustive words only: their prefixes cover the shorter ones.
  const auto len = std::min(exhaustive_length, max_length);
  if (len > 0 && std::pow(static_cast<double>(k), static_cast<double>(len)) <= 4096.0) {
    std::vector<std::uint64_t> digits(len, 1);
    while (true) {
      std::vector<Symbol> symbols;
      for (auto d : digits) symbols.emplace_back(d);
      out.emplace_back(std::move(symbols));
      std::size_t i = len;
      while (i > 0 && digits[i - 1] == k) digits[--i] = 1;
      if (i == 0) break;
      ++digits[i - 1];
    }
  }
  CounterRng rng(derive_key(seed, Stream::words));
  for (std::size_t i = 0; i < count; ++i) {
    const auto n = 1 + uniform_index(rng, max_length);
    std::vector<Symbol> symbols;
    for (std::uint64_t j = 0; j < n; ++j) symbols.emplace_back(1 + uniform_index(rng, k));
    out.emplace_back(std::move(symbols));
  }
  return out;
}

SensitivityVerdict probe_sensitivity(const ActionSpec& action, const SensitivityProbeConfig& cfg) {
  cfg.validate();
  const auto& spec = action.space();
  const auto words = sample_words(action, cfg.exhaustive_length, cfg.word_count, cfg.max_word_length, cfg.seed);
  const auto points = base_points(spec, cfg.grid_points, cfg.random_points, cfg.seed);
  CounterRng rng(derive_key(derive_key(cfg.seed, Stream::probes), 2));

  SensitivityVerdict v;
  v.max_separation.assign(cfg.delta_ladder.size(), 0.0);
  for (const auto& x : points) {
    for (std::size_t j = 0; j < cfg.delta_ladder.size(); ++j) {
      const double delta = cfg.delta_ladder[j];
      std::optional<SeparationRecord> best;
      for (double theta : {0.5, 0.999}) {
        auto y = perturb(spec, x, theta * delta, rng);
        const double d0 = metric(spec, x, y);
        const auto t = track(action, words, x, y);
        if (!best || t.worst > best->worst_separation) {
          best = SeparationRecord{x, std::move(y), delta, d0, t.worst, prefix(words[t.word], t.length)};
        }
      }
      v.max_separation[j] = std::max(v.max_separation[j], best->worst_separation);
      v.evidence.push_back(std::move(*best));
    }
  }

  auto levels = cfg.beta_levels;
  std::sort(levels.begin(), levels.end(), std::greater<>());
  for (double beta : levels) {
    const bool all = std::all_of(v.evidence.begin(), v.evidence.end(),
                                 [beta](const SeparationRecord& r) { return r.worst_separation >= beta; });
    if (all) {
      v.outcome = SensitivityOutcome::sensitive_witnessed;
      v.beta = beta;
      for (const auto& r : v.evidence) {
        if (r.worst_separation >= beta) v.witnesses.push_back(r);
      }
      return v;
    }
  }
  v.outcome = v.max_separation.back() < levels.back() ? SensitivityOutcome::non_sensitive_at_resolution
                                                      : SensitivityOutcome::inconclusive;
  return v;
}

double replay_separation(const ActionSpec& action, const SeparationRecord& r) {
  return metric(action.space(), apply_word(action, r.word, r.x), apply_word(action, r.word, r.y));
}

std::size_t EkEstimate::count() const { return static_cast<std::size_t>(std::count(member.begin(), member.end(), true)); }

std::size_t EkEstimate::cell_of(const TorusPoint& x) const {
  auto index = [&](double v) {
    return static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(v * resolution)), 0, resolution - 1));
  };
  if (dimension == 1) return index(x[0]);
  return index(x[0]) * static_cast<std::size_t>(resolution) + index(x[1]);
}

EkEstimate estimate_Ek(const ActionSpec& action, int k, int resolution, std::size_t word_budget, std::size_t max_word_length,
                       std::uint64_t seed) {
  require_small_torus(action, "estimate_Ek");
  if (k < 1) throw std::invalid_argument("estimate_Ek: k must be ≥ 1");
  if (resolution < 1) throw std::invalid_argument("estimate_Ek: resolution must be ≥ 1");
  EkEstimate e;
  e.k = k;
  e.resolution = resolution;
  e.dimension = action.space().dimension();
  e.word_budget = word_budget;
  e.max_word_length = max_word_length;
  const std::size_t cells = e.dimension == 1 ? static_cast<std::size_t>(resolution)
                                             : static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  e.member.assign(cells, true);

  const auto words = sample_words(action, 4, word_budget, max_word_length, seed);
  const double width = 1.0 / resolution;
  const double eps = 1.0 / k;
  // Dyadic offset 2^-m ≤ width / 4, so dyadic pairs stay inside their cell.
  const int m = static_cast<int>(std::ceil(std::log2(4.0 * resolution)));
  const double offset = std::ldexp(1.0, -m);
  CounterRng rng(derive_key(derive_key(seed, Stream::probes), 3));
  constexpr int kRandomPairs = 4;

  for (std::size_t cell = 0; cell < cells; ++cell) {
    const TorusPoint centre = cell_centre(e, cell);
    std::vector<std::pair<TorusPoint, TorusPoint>> pairs;
    TorusPoint a = centre;
    a[0] = std::floor(centre[0] / offset) * offset;
    TorusPoint b = a;
    b[0] += offset;
    pairs.emplace_back(a, b);
    for (int i = 0; i < kRandomPairs; ++i) {
      TorusPoint p(e.dimension);
      TorusPoint q(e.dimension);
      for (int j = 0; j < e.dimension; ++j) {
        const double lo = centre[j] - width / 2;
        p[j] = lo + width * uniform01(rng);
        q[j] = lo + width * uniform01(rng);
      }
      pairs.emplace_back(p, q);
    }
    for (const auto& [p, q] : pairs) {
      if (track(action, words, p, q, eps).worst >= eps) {
        e.member[cell] = false;
        break;
      }
    }
  }
  return e;
}

double ek_forward_invariance(const ActionSpec& action, const EkEstimate& e) {
  std::size_t total = 0;
  std::size_t kept = 0;
  for (std::size_t cell = 0; cell < e.member.size(); ++cell) {
    if (!e.member[cell]) continue;
    const GroupElement c = cell_centre(e, cell);
    for (std::uint64_t s = 1; s <= action.generator_count(); ++s) {
      const auto image = apply_generator(action, Symbol(s), c);
      ++total;
      kept += e.member[e.cell_of(std::get<TorusPoint>(image))];
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(kept) / static_cast<double>(total);
}

double ek_hit_rate(const ActionSpec& action, const EkEstimate& e, std::size_t word_budget, std::uint64_t seed) {
  const auto words = sample_words(action, 4, word_budget, e.max_word_length, seed);
  std::size_t outside = 0;
  std::size_t hits = 0;
  for (std::size_t cell = 0; cell < e.member.size(); ++cell) {
    if (e.member[cell]) continue;
    ++outside;
    bool hit = false;
    for (const auto& w : words) {
      GroupElement x = cell_centre(e, cell);
      for (const auto& s : w.symbols()) {
        x = apply_generator(action, s, x);
        if (e.member[e.cell_of(std::get<TorusPoint>(x))]) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    hits += hit;
  }
  return outside == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(outside);
}

std::vector<ModulusEntry> equicontinuity_modulus(const ActionSpec& action, const std::vector<double>& epsilons,
                                                 std::size_t word_budget, std::size_t max_word_length, std::uint64_t seed) {
  const auto& spec = action.space();
  const auto words = sample_words(action, 4, word_budget, max_word_length, seed);
  const auto points = base_points(spec, 8, 8, seed);
  std::vector<ModulusEntry> out;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("equicontinuity_modulus: epsilon must be positive");
    std::vector<double> candidates;
    for (int j = 1; j <= 32; ++j) candidates.push_back(eps * j / 16.0);
    for (int i = 1; i <= 60; ++i) candidates.push_back(std::ldexp(eps, -i));
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    ModulusEntry entry{eps, 0.0};
    for (double delta : candidates) {
      CounterRng rng(derive_key(derive_key(seed, Stream::probes), 4));
      bool separated = false;
      for (const auto& x : points) {
        for (double theta : {0.5, 0.999}) {
          const auto y = perturb(spec, x, theta * delta, rng);
          if (track(action, words, x, y, eps).worst >= eps) {
            separated = true;
            break;
          }
        }
        if (separated) break;
      }
      if (!separated) {
        entry.delta = delta;
        break;
      }
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace udseq

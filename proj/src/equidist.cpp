#include "udseq/equidist.hpp"

#include <cmath>
#include <numbers>

#include "udseq/test_functions.hpp"

namespace udseq {

namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string join(const Eigen::VectorXi& k) { return join(std::vector<int>(k.data(), k.data() + k.size())); }

double complex_alpha(double c) { return std::exp(-c * c); }
double real_alpha(double c) { return std::erfc(c / std::numbers::sqrt2); }

double chi_square_quantile(double df, double z) {
  const double a = 2.0 / (9.0 * df);
  const double t = 1.0 - a + z * std::sqrt(a);
  return df * t * t * t;
}

}  // namespace

std::vector<Eigen::VectorXi> canonical_frequencies(int d, int cutoff) {
  std::vector<Eigen::VectorXi> out;
  for (int h = 1; h <= cutoff; ++h) {
    Eigen::VectorXi k = Eigen::VectorXi::Constant(d, -h);
    while (true) {
      const int height = k.cwiseAbs().maxCoeff();
      int first = 0;
      for (int i = 0; i < d; ++i) {
        if (k[i] != 0) {
          first = k[i];
          break;
        }
      }
      if (height == h && first > 0) out.push_back(k);
      int i = d - 1;
      while (i >= 0 && k[i] == h) {
        k[i] = -h;
        --i;
      }
      if (i < 0) break;
      ++k[i];
    }
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return {};
}

Eigen::MatrixXd torus_matrix(const GroupSpec& spec, std::span<const GroupElement> points) {
  const int d = spec.dimension();
  Eigen::MatrixXd m(d, static_cast<Eigen::Index>(points.size()));
  for (std::size_t n = 0; n < points.size(); ++n) m.col(static_cast<Eigen::Index>(n)) = std::get<TorusPoint>(points[n]);
  return m;
}

std::vector<std::pair<Eigen::VectorXi, double>> weyl_spectrum(const Eigen::MatrixXd& points, int cutoff) {
  const auto d = static_cast<int>(points.rows());
  const auto freqs = canonical_frequencies(d, cutoff);
  std::vector<Complex> sums(freqs.size(), Complex(0.0, 0.0));
  // powers[i][m + cutoff] = exp(2πi m x_i)
  std::vector<std::vector<Complex>> powers(static_cast<std::size_t>(d), std::vector<Complex>(2 * cutoff + 1));
  for (Eigen::Index n = 0; n < points.cols(); ++n) {
    for (int i = 0; i < d; ++i) {
      auto& p = powers[static_cast<std::size_t>(i)];
      const Complex base = std::polar(1.0, kTwoPi * points(i, n));
      p[cutoff] = 1.0;
      for (int m = 1; m <= cutoff; ++m) {
        p[cutoff + m] = p[cutoff + m - 1] * base;
        p[cutoff - m] = std::conj(p[cutoff + m]);
      }
    }
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      Complex term = powers[0][static_cast<std::size_t>(freqs[f][0] + cutoff)];
      for (int i = 1; i < d; ++i) term *= powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(freqs[f][i] + cutoff)];
      sums[f] += term;
    }
  }
  std::vector<std::pair<Eigen::VectorXi, double>> out;
  out.reserve(freqs.size());
  const auto count = static_cast<double>(points.cols());
  for (std::size_t f = 0; f < freqs.size(); ++f) out.emplace_back(freqs[f], std::abs(sums[f]) / count);
  return out;
}

double character_average(const GroupSpec& spec, std::span<const GroupElement> points, const RepIndex& rep) {
  if (points.empty()) throw std::invalid_argument("character_average: need at least one point");
  const auto& r = rep.values;
  const auto count = static_cast<double>(points.size());
  switch (spec.kind()) {
    case GroupKind::torus: {
      if (static_cast<int>(r.size()) != spec.dimension()) throw std::invalid_argument("character_average: frequency dimension mismatch");
      const Eigen::VectorXi k = Eigen::Map<const Eigen::VectorXi>(r.data(), static_cast<Eigen::Index>(r.size()));
      if (k.isZero()) throw std::invalid_argument("character_average: trivial representation");
      return weyl_sum(torus_matrix(spec, points), k);
    }
    case GroupKind::cyclic:
    case GroupKind::product: {
      const auto& orders = spec.orders();
      if (r.size() != orders.size()) throw std::invalid_argument("character_average: label length mismatch");
      bool trivial = true;
      for (std::size_t i = 0; i < r.size(); ++i) trivial = trivial && (r[i] % orders[i] == 0);
      if (trivial) throw std::invalid_argument("character_average: trivial representation");
      Complex sum(0.0, 0.0);
      for (const auto& p : points) {
        const auto& x = std::get<IntTuple>(p);
        double phase = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
          const long long jx = static_cast<long long>(r[i]) * x[i] % orders[i];
          phase += static_cast<double>(jx) / orders[i];
        }
        sum += std::polar(1.0, kTwoPi * phase);
      }
      return std::abs(sum) / count;
    }
    case GroupKind::permutation: {
      if (r.size() != 1 || (r[0] != 0 && r[0] != 1)) throw std::invalid_argument("character_average: permutation label must be {0} or {1}");
      if (spec.degree() < 2) throw std::invalid_argument("character_average: trivial representation");
      double sum = 0.0;
      for (const auto& p : points) {
        const auto& perm = std::get<IntTuple>(p);
        if (r[0] == 0) {
          // Sign from the cycle decomposition: (-1)^(n - cycles).
          std::vector<bool> seen(perm.size(), false);
          int cycles = 0;
          for (std::size_t i = 0; i < perm.size(); ++i) {
            if (seen[i]) continue;
            ++cycles;
            for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
          }
          sum += ((static_cast<int>(perm.size()) - cycles) % 2 == 0) ? 1.0 : -1.0;
        } else {
          int fixed = 0;
          for (std::size_t i = 0; i < perm.size(); ++i) fixed += perm[i] == static_cast<int>(i);
          sum += fixed - 1;
        }
      }
      return std::abs(sum) / count;
    }
    case GroupKind::su2: {
      if (r.size() != 1 || r[0] < 1) throw std::invalid_argument("character_average: su2 label must be {2j} with j ≥ 1/2");
      double sum = 0.0;
      for (const auto& p : points) sum += su2_character(std::get<Quaternion>(p).w(), r[0]);
      return std::abs(sum) / count;
    }
  }
  return 0.0;
}

EquidistReport equidist_report(const GroupSpec& spec, std::span<const GroupElement> points, const EquidistConfig& cfg,
                               std::uint64_t seed) {
  EquidistReport report;
  report.n = points.size();
  report.seed = seed;
  if (points.empty()) return report;

  const double root_n = std::sqrt(static_cast<double>(points.size()));
  const double c = cfg.constant;
  auto add = [&](std::string name, double value, double threshold, double alpha) {
    report.tests.push_back({std::move(name), value, threshold, value <= threshold, alpha});
  };

  switch (spec.kind()) {
    case GroupKind::torus: {
      const int d = spec.dimension();
      int cutoff = cfg.frequency_cutoff;
      // Keep the number of frequencies bounded in high dimension.
      while (cutoff > 1 && (std::pow(2.0 * cutoff + 1.0, d) - 1.0) / 2.0 > static_cast<double>(cfg.max_character_tests)) --cutoff;
      const auto m = torus_matrix(spec, points);
      for (const auto& [k, value] : weyl_spectrum(m, cutoff)) {
        add("weyl[" + join(k) + "]", value, c / root_n, complex_alpha(c));
      }
      if (d == 1) {
        const double cd = cfg.discrepancy_constant;
        add("star_discrepancy", star_discrepancy_1d(m.row(0)), cd / root_n, 2.0 * std::exp(-2.0 * cd * cd));
      } else if (d <= 3) {
        const int g = cfg.grid_resolution;
        const double cg = c * std::sqrt(std::log(static_cast<double>(g)));
        const double boxes = std::pow(static_cast<double>(g), d);
        add("grid_discrepancy[G=" + std::to_string(g) + "]", star_discrepancy_grid(m, g), cg / root_n,
            std::min(1.0, boxes * 2.0 * std::exp(-2.0 * cg * cg)));
      }
      break;
    }
    case GroupKind::cyclic:
    case GroupKind::product: {
      const auto order = *spec.order();
      const auto& orders = spec.orders();
      const std::uint64_t labels = std::min<std::uint64_t>(order, cfg.max_character_tests + 1);
      for (std::uint64_t rank = 1; rank < labels; ++rank) {
        const auto label = std::get<IntTuple>(element_at(spec, rank));
        bool real = true;
        for (std::size_t i = 0; i < label.size(); ++i) real = real && ((2 * label[i]) % orders[i] == 0);
        add("character[" + join(label) + "]", character_average(spec, points, RepIndex{label}), c / root_n,
            real ? real_alpha(c) : complex_alpha(c));
      }
      break;
    }
    case GroupKind::permutation: {
      if (spec.degree() >= 2) add("character[sign]", character_average(spec, points, RepIndex{{0}}), c / root_n, real_alpha(c));
      if (spec.degree() >= 3) {
        add("character[standard]", character_average(spec, points, RepIndex{{1}}), c / root_n, real_alpha(c));
      }
      break;
    }
    case GroupKind::su2: {
      for (int tj = 1; tj <= cfg.max_twice_spin; ++tj) {
        const auto slot = static_cast<std::size_t>(tj - 1);
        const double var = slot < cfg.su2_character_variance.size() ? cfg.su2_character_variance[slot] : 1.0;
        if (!(var > 0.0) || !std::isfinite(var)) throw std::invalid_argument("equidist_report: character variance must be positive and finite");
        add("character[2j=" + std::to_string(tj) + "]", character_average(spec, points, RepIndex{{tj}}),
            c * std::sqrt(var) / root_n, real_alpha(c));
      }
      break;
    }
  }

  if (spec.is_finite()) {
    const auto order = *spec.order();
    if (order >= 2 && order <= cfg.chi_square_max_classes && points.size() >= 5 * order) {
      std::vector<double> counts(order, 0.0);
      for (const auto& p : points) counts[element_rank(spec, p)] += 1.0;
      const double expected = static_cast<double>(points.size()) / static_cast<double>(order);
      double x2 = 0.0;
      for (double o : counts) x2 += (o - expected) * (o - expected) / expected;
      const double df = static_cast<double>(order - 1);
      add("chi_square", x2, chi_square_quantile(df, c), 0.5 * std::erfc(c / std::numbers::sqrt2));
    }
  }

  for (const auto& t : report.tests) report.family_alpha += t.alpha;
  if (points.size() < cfg.min_n) {
    report.verdict = Verdict::inconclusive;
  } else {
    const bool all = std::all_of(report.tests.begin(), report.tests.end(), [](const TestRecord& t) { return t.pass; });
    report.verdict = all ? Verdict::pass : Verdict::fail;
  }
  return report;
}

std::vector<std::pair<std::size_t, double>> convergence_curve(const GroupSpec& spec, std::span<const GroupElement> points,
                                                              const EquidistConfig& cfg) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t n = 100; n <= 1'000'000 && n <= points.size(); n *= 10) {
    const auto report = equidist_report(spec, points.first(n), cfg);
    double stat = 0.0;
    for (const auto& t : report.tests) {
      if (t.name.starts_with("weyl") || t.name.starts_with("character")) stat = std::max(stat, t.value);
    }
    out.emplace_back(n, stat);
  }
  return out;
}

}  // namespace udseq

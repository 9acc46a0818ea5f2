// Acceptance gate: one PASS/FAIL line per criterion, fixed seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "udseq/equidist.hpp"
#include "udseq/experiment.hpp"
#include "udseq/measures.hpp"
#include "udseq/products.hpp"
#include "udseq/sensitivity.hpp"

using namespace udseq;

namespace {

constexpr std::uint64_t kSeed = 1;
const double kAlpha = std::sqrt(2.0) - 1.0;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double time_limit, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= time_limit) {
    c.ok = false;
    c.detail << " [over time limit " << time_limit << " s]";
  }
  std::printf("%s %d %s:%s (%.2f s)\n", c.ok ? "PASS" : "FAIL", id, name, c.detail.str().c_str(), secs);
  std::fflush(stdout);
  failures += !c.ok;
}

GroupElement t1(double x) { return TorusPoint(Eigen::VectorXd::Constant(1, x)); }

ActionSpec torus_pair() { return ActionSpec::rotation_family({kAlpha, kGolden}); }

double brute_star_discrepancy(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (double t : x) {
    int below = 0;
    int upto = 0;
    for (double y : x) {
      below += y < t;
      upto += y <= t;
    }
    d = std::max({d, std::abs(upto / n - t), std::abs(below / n - t)});
  }
  return d;
}

void torus_dense(Check& c) {
  const std::size_t n = 100000;
  const auto pts = random_product_orbit(
      {torus_pair(), t1(0.0), ProbabilitySequence::geometric(0.5), n, kSeed, ProductOrder::composition});
  const auto m = torus_matrix(GroupSpec::torus(1), pts);
  const double limit = 3.0 / std::sqrt(static_cast<double>(n));
  double worst = 0.0;
  for (const auto& [k, v] : weyl_spectrum(m, 8)) worst = std::max(worst, v);
  const double dstar = star_discrepancy_1d(m.row(0));
  const auto report = equidist_report(GroupSpec::torus(1), pts, {}, kSeed);
  c.detail << " max Weyl |k|<=8 = " << worst << " (limit " << limit << "), D* = " << dstar << ", verdict "
           << to_string(report.verdict);
  c.require(worst <= limit, "Weyl statistics");
  c.require(dstar < 1e-2, "D*");
  c.require(report.verdict == Verdict::pass, "equidist_report");
}

void su2_dense(Check& c) {
  const std::size_t n = 100000;
  const auto action = ActionSpec::parse("translation(su2; gens=haar:2)", kSeed);
  const auto law = ProbabilitySequence::geometric(0.5);
  const auto pts =
      random_product_orbit({action, identity(action.space()), law, n, kSeed, ProductOrder::composition});
  for (int tj : {1, 2}) {
    const double var = su2_character_long_run_variance(action, law, tj);
    const double value = character_average(action.space(), pts, {{tj}});
    const double limit = 3.0 * std::sqrt(var) / std::sqrt(static_cast<double>(n));
    c.detail << " spin " << tj << "/2: |avg| = " << value << ", long-run var = " << var << ", limit " << limit
             << " (i.i.d. scale " << 3.0 / std::sqrt(static_cast<double>(n)) << ");";
    c.require(std::isfinite(var) && value <= limit, "spin " + std::to_string(tj) + "/2");
  }
}

void rational_control(Check& c) {
  const auto pts = random_product_orbit({ActionSpec::rotation_family({1.0 / 6.0}), t1(0.0),
                                         ProbabilitySequence::geometric(0.5), 10000, kSeed, ProductOrder::composition});
  const auto report = equidist_report(GroupSpec::torus(1), pts);
  double k6 = -1.0;
  for (const auto& t : report.tests)
    if (t.name == "weyl[6]") k6 = t.value;
  c.detail << " verdict " << to_string(report.verdict) << ", Weyl k=6 = " << k6;
  c.require(report.verdict == Verdict::fail, "verdict");
  c.require(std::abs(k6 - 1.0) <= 1e-12, "k=6 statistic");
}

void skew_product(Check& c) {
  const auto action = torus_pair();
  const auto law = ProbabilitySequence::geometric(0.5);
  const std::size_t n = 1000000;
  const auto main = product_measure_test(action, law, torus_cos(Eigen::VectorXi::Constant(1, 1)), Cylinder::parse("1"), n, kSeed);
  c.detail << " cos/(1): deviation " << main.deviation << ";";
  c.require(std::abs(main.deviation) < 5e-3, "cos with cylinder (1)");
  double worst = 0.0;
  const char* functions[] = {"one", "sin:1", "cos:2"};
  const char* cylinders[] = {"2", "1 1", "-1:1 3"};
  for (const char* f : functions)
    for (const char* cyl : cylinders) {
      const auto r = product_measure_test(action, law, parse_test_function(action.space(), f), Cylinder::parse(cyl),
                                          n / 4, kSeed);
      worst = std::max(worst, std::abs(r.deviation));
    }
  c.detail << " 3x3 grid (N=" << n / 4 << "): max |deviation| " << worst;
  c.require(worst < 5e-3, "3x3 grid");
}

void folner(Check& c) {
  const auto s = GroupSpec::torus(1);
  const DenseFunctionFamily fam(s);
  const auto probes = default_probe_set(s, kSeed, 100, 0);
  double prev = 2.0;
  bool monotone = true;
  double last = 0.0;
  for (std::size_t m : {100u, 1000u, 10000u}) {
    const auto set = interval_folner_set(s, t1(kAlpha), m);
    double worst = 0.0;
    for (const auto& p : probes) worst = std::max(worst, weakstar_distance_to_haar(fam, folner_average(s, set, p), 20).value);
    c.detail << " m=" << m << ": " << worst << ";";
    monotone = monotone && worst <= prev;
    prev = last = worst;
  }
  c.require(monotone, "non-increasing");
  c.require(last < 5e-3, "final distance");
}

void convex_words(Check& c) {
  const auto action = torus_pair();
  const DenseFunctionFamily fam(action.space());
  ApproxOptions o;
  o.rounds = 32;
  o.max_length = 32;
  o.seed = kSeed;
  const auto probes = default_probe_set(action.space(), kSeed, 100, 10);
  const auto stages = convex_word_approx_stages(action, fam, haar_moments(fam, o.truncation), probes, o);
  bool monotone = true;
  for (std::size_t i = 1; i < stages.size(); ++i) monotone = monotone && stages[i].worst_probe_distance <= stages[i - 1].worst_probe_distance;
  c.detail << " m=1: " << stages.front().worst_probe_distance << ", m=32: " << stages.back().worst_probe_distance;
  c.require(stages.size() == 32, "stage count");
  c.require(monotone, "non-increasing");
  c.require(stages.back().worst_probe_distance < 1e-2, "final distance");
}

void oracles(Check& c) {
  CounterRng rng(kSeed);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 1 + uniform_index(rng, 50);
    std::vector<double> x(n);
    for (auto& v : x) v = uniform01(rng);
    mismatches += star_discrepancy_1d(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n))) !=
                  brute_star_discrepancy(x);
  }
  c.detail << " D* mismatches " << mismatches << "/200;";
  c.require(mismatches == 0, "D* brute force");

  const auto law = ProbabilitySequence::geometric(0.5);
  const std::size_t samples = 200000;
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::uint64_t> sym;
    const auto len = 1 + uniform_index(rng, 3);
    for (std::size_t j = 0; j < len; ++j) sym.push_back(1 + uniform_index(rng, 3));
    const Cylinder cyl(static_cast<std::int64_t>(uniform_index(rng, 7)) - 3, sym);
    const double p = cylinder_measure(law, cyl);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) hits += matches(cyl, ShiftWindow(law, derive_key(kSeed + 100 + i, s)));
    const double z = std::abs(static_cast<double>(hits) / samples - p) / std::sqrt(p * (1 - p) / samples);
    worst_z = std::max(worst_z, z);
  }
  c.detail << " cylinder max |z| " << worst_z << ";";
  c.require(worst_z < 4.0, "cylinder Monte Carlo");

  double worst_gap = 0.0;
  for (double a : {kAlpha, kGolden, 0.1234567}) {
    const int n = 10000;
    Eigen::MatrixXd p(1, n);
    for (int j = 1; j <= n; ++j) p(0, j - 1) = std::fmod(j * a, 1.0);
    for (int k = 1; k <= 8; ++k) {
      const double closed = std::abs(std::sin(M_PI * n * k * a) / (n * std::sin(M_PI * k * a)));
      worst_gap = std::max(worst_gap, std::abs(weyl_sum(p, Eigen::VectorXi::Constant(1, k)) - closed));
    }
  }
  c.detail << " Weyl closed-form gap " << worst_gap;
  c.require(worst_gap <= 1e-10, "Weyl closed form");
}

SensitivityProbeConfig probe_config() {
  SensitivityProbeConfig cfg;
  cfg.seed = kSeed;
  return cfg;
}

void sensitivity_translation(Check& c) {
  const auto v = probe_sensitivity(torus_pair(), probe_config());
  double gap = 0.0;
  for (const auto& r : v.evidence) gap = std::max(gap, std::abs(r.worst_separation - r.initial_distance));
  c.detail << " outcome " << to_string(v.outcome) << ", max |separation - initial| " << gap;
  c.require(v.outcome == SensitivityOutcome::non_sensitive_at_resolution, "outcome");
  c.require(gap <= 1e-12, "separation equals initial distance");
}

void sensitivity_doubling(Check& c) {
  const auto action = ActionSpec::doubling_fixture();
  const auto v = probe_sensitivity(action, probe_config());
  const auto again = probe_sensitivity(action, probe_config());
  bool replayed = !v.witnesses.empty();
  for (const auto& w : v.witnesses) replayed = replayed && replay_separation(action, w) == w.worst_separation;
  bool same = v.evidence.size() == again.evidence.size();
  for (std::size_t i = 0; same && i < v.evidence.size(); ++i)
    same = v.evidence[i].word == again.evidence[i].word && v.evidence[i].worst_separation == again.evidence[i].worst_separation;
  c.detail << " outcome " << to_string(v.outcome) << ", beta " << v.beta << ", witnesses " << v.witnesses.size();
  c.require(v.outcome == SensitivityOutcome::sensitive_witnessed && v.beta == 0.25, "outcome");
  c.require(replayed, "witness replay");
  c.require(same, "rerun reproduces the evidence");
}

void invariants(Check& c) {
  CounterRng rng(kSeed);
  int broken = 0;
  for (const auto& s : {GroupSpec::torus(2), GroupSpec::cyclic(7), GroupSpec::product({2, 3}), GroupSpec::permutation(5),
                        GroupSpec::su2()}) {
    const auto e = identity(s);
    for (int i = 0; i < 50; ++i) {
      const auto a = haar_sample(s, rng), b = haar_sample(s, rng), g = haar_sample(s, rng);
      broken += metric(s, compose(s, compose(s, a, b), g), compose(s, a, compose(s, b, g))) > 1e-12;
      broken += metric(s, compose(s, a, inverse(s, a)), e) > 1e-12;
      broken += metric(s, compose(s, a, e), a) > 1e-12;
      const double ab = metric(s, a, b);
      broken += std::abs(ab - metric(s, b, a)) > 1e-15 || ab < 0.0;
      broken += ab > metric(s, a, g) + metric(s, g, b) + 1e-12;
      broken += std::abs(metric(s, compose(s, g, a), compose(s, g, b)) - ab) > 1e-12;
    }
  }
  c.detail << " group/metric violations " << broken << ";";
  c.require(broken == 0, "group and metric axioms");

  // Haar invariance: a translated Haar sample still passes the battery.
  int haar_fail = 0;
  for (const auto& s : {GroupSpec::torus(1), GroupSpec::cyclic(12), GroupSpec::permutation(4), GroupSpec::su2()}) {
    const auto g = haar_sample(s, rng);
    std::vector<GroupElement> pts;
    for (int i = 0; i < 20000; ++i) pts.push_back(compose(s, g, haar_sample(s, rng)));
    haar_fail += equidist_report(s, pts).verdict != Verdict::pass;
  }
  c.detail << " translated Haar failures " << haar_fail << ";";
  c.require(haar_fail == 0, "Haar invariance");

  const auto law = ProbabilitySequence::geometric(0.5);
  bool shift_ok = true;
  const std::vector<std::uint64_t> sym{1, 2, 1};
  for (int off = -5; off <= 5; ++off) shift_ok = shift_ok && cylinder_measure(law, Cylinder(off, sym)) == cylinder_measure(law, Cylinder(0, sym));
  c.require(shift_ok, "shift invariance of the cylinder measure");

  const auto action = ActionSpec::parse("translation(torus:2; gens=0.1 0.7,0.3 0.2)");
  const DenseFunctionFamily fam(action.space());
  const auto sigma = EmpiricalMeasure::uniform(action.space(), {haar_sample(action.space(), rng), haar_sample(action.space(), rng)});
  const Word u{1, 2}, v{2, 2, 1};
  const double hom = weakstar_distance(fam, push_forward(action, concat(u, v), sigma),
                                       push_forward(action, v, push_forward(action, u, sigma))).value;
  c.detail << " pushforward gap " << hom << ";";
  c.require(hom <= 1e-12, "pushforward homomorphism");

  const auto parsed = parse_config("[experiment]\nkind = orbit\nseed = 5\nn = 500\n[model]\naction = translation(su2; gens=haar:3)\n");
  const bool det = parsed.config && run_experiment(*parsed.config, false).payload == run_experiment(*parsed.config, false).payload;
  c.require(det, "determinism of (config, seed)");
}

}  // namespace

int main() {
  criterion(1, "torus random product equidistributes", 5.0, torus_dense);
  criterion(2, "SU(2) random product character averages", 10.0, su2_dense);
  criterion(3, "rational rotation negative control", 5.0, rational_control);
  criterion(4, "skew-product time averages match the product measure", 30.0, skew_product);
  criterion(5, "Folner averages approach Lebesgue", 10.0, folner);
  criterion(6, "greedy convex word approximation", 60.0, convex_words);
  criterion(7, "oracle equivalences", 60.0, oracles);
  criterion(8, "sensitivity: translation fixture", 5.0, sensitivity_translation);
  criterion(8, "sensitivity: doubling fixture", 5.0, sensitivity_doubling);
  criterion(9, "invariant suites", 60.0, invariants);
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "SOME FAIL", failures);
  return failures == 0 ? 0 : 1;
}

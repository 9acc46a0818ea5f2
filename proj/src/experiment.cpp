#include "udseq/experiment.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "model.hpp"
#include "strings.hpp"
#include "udseq/equidist.hpp"
#include "udseq/measures.hpp"
#include "udseq/products.hpp"
#include "udseq/sensitivity.hpp"

#ifndef UDSEQ_VERSION
#define UDSEQ_VERSION "0.0.0"
#endif

namespace udseq {

namespace {

using json = nlohmann::ordered_json;

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json element_json(const GroupSpec& spec, const GroupElement& x) { return components(spec, x); }

json word_json(const Word& w) {
  json out = json::array();
  for (const auto& s : w.symbols()) {
    if (s.is_infinite()) {
      out.push_back("inf");
    } else {
      out.push_back(s.index());
    }
  }
  return out;
}

struct Outcome {
  json payload;
  std::string csv;
  std::string verdict;
};

Outcome run_orbit(const ExperimentConfig& cfg, const ActionSpec& action) {
  OrbitConfig oc{action, detail::model_start(cfg, action), detail::model_law(cfg), cfg.get_uint("experiment", "n"),
                 cfg.seed(), detail::model_order(cfg)};
  const auto thin = cfg.get_uint("orbit", "thin");
  const auto& space = action.space();
  const auto width = static_cast<std::size_t>(space.components());
  std::string csv = "step";
  for (std::size_t i = 0; i < width; ++i) csv += ",x_" + std::to_string(i);
  csv += "\n";
  RandomProductOrbit orbit(oc);
  std::size_t rows = 0;
  while (!orbit.done()) {
    const auto& x = orbit.next();
    if (orbit.step() % thin != 0) continue;
    csv += std::to_string(orbit.step());
    for (double c : components(space, x)) csv += "," + detail::format_double(c);
    csv += "\n";
    ++rows;
  }
  json p;
  p["kind"] = "orbit";
  p["n"] = oc.length;
  p["seed"] = cfg.seed();
  p["thin"] = thin;
  p["rows"] = rows;
  p["last"] = element_json(space, orbit.current());
  return {p, csv, "complete"};
}

Outcome run_equidist(const ExperimentConfig& cfg, const ActionSpec& action) {
  OrbitConfig oc{action, detail::model_start(cfg, action), detail::model_law(cfg), cfg.get_uint("experiment", "n"),
                 cfg.seed(), detail::model_order(cfg)};
  const auto points = random_product_orbit(oc);
  EquidistConfig ec;
  ec.frequency_cutoff = static_cast<int>(cfg.get_uint("equidist", "cutoff"));
  ec.max_twice_spin = static_cast<int>(cfg.get_uint("equidist", "max_twice_spin"));
  ec.constant = cfg.get_real("equidist", "constant");
  ec.discrepancy_constant = cfg.get_real("equidist", "discrepancy_constant");
  ec.grid_resolution = static_cast<int>(cfg.get_uint("equidist", "grid"));
  ec.min_n = cfg.get_uint("equidist", "min_n");
  // Orbit points are a Markov chain; SU(2) character thresholds use the
  // long-run variance of the walk. Generators fixing a spin-j vector give
  // an infinite variance and fall back to the i.i.d. scale.
  json variances = json::array();
  if (action.space().kind() == GroupKind::su2 && action.kind() == ActionKind::translation) {
    for (int tj = 1; tj <= ec.max_twice_spin; ++tj) {
      const double v = su2_character_long_run_variance(action, oc.law, tj);
      ec.su2_character_variance.push_back(std::isfinite(v) ? v : 1.0);
      variances.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    }
  }
  const auto report = equidist_report(action.space(), points, ec, cfg.seed());

  json p;
  p["n"] = report.n;
  p["seed"] = report.seed;
  json tests = json::array();
  for (const auto& t : report.tests) {
    tests.push_back({{"name", t.name}, {"value", t.value}, {"threshold", t.threshold}, {"pass", t.pass}});
  }
  p["tests"] = std::move(tests);
  p["verdict"] = to_string(report.verdict);
  p["family_alpha"] = report.family_alpha;
  if (!variances.empty()) p["character_variance"] = std::move(variances);

  std::string csv = "N,statistic\n";
  for (const auto& [n, stat] : convergence_curve(action.space(), points, ec)) {
    csv += std::to_string(n) + "," + detail::format_double(stat) + "\n";
  }
  return {p, csv, to_string(report.verdict)};
}

Outcome run_skew(const ExperimentConfig& cfg, const ActionSpec& action) {
  const auto f = parse_test_function(action.space(), cfg.get("skew-test", "function"));
  const auto c = Cylinder::parse(cfg.get("skew-test", "cylinder"));
  const auto r = product_measure_test(action, detail::model_law(cfg), f, c, cfg.get_uint("experiment", "n"), cfg.seed(),
                                      cfg.get_uint("skew-test", "burn_in"), detail::model_start(cfg, action));
  const double tol = cfg.get_real("skew-test", "tolerance");
  const bool pass = std::abs(r.deviation) < tol;
  json p;
  p["time_average"] = r.time_average;
  p["target"] = r.target;
  p["deviation"] = r.deviation;
  p["n"] = r.n;
  p["seed"] = r.seed;
  p["burn_in"] = r.burn_in;
  p["function"] = f.name;
  p["cylinder"] = c.to_string();
  p["tolerance"] = tol;
  p["pass"] = pass;
  return {p, {}, pass ? "pass" : "fail"};
}

Outcome run_folner(const ExperimentConfig& cfg, const ActionSpec& action) {
  action.require_invertible("folner");
  const auto& space = action.space();
  const GroupElement g =
      cfg.has("folner", "generator") ? parse_element(space, cfg.get("folner", "generator")) : action.generators().elements.front();
  const DenseFunctionFamily family(space);
  const auto probes = default_probe_set(space, cfg.seed(), cfg.get_uint("folner", "probes"), 0);
  const auto truncation = cfg.get_uint("folner", "truncation");
  const double tol = cfg.get_real("folner", "tolerance");

  json stages = json::array();
  std::string csv = "m,max_distance\n";
  bool non_increasing = true;
  double previous = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (auto m : cfg.get_uints("folner", "m")) {
    const auto set = interval_folner_set(space, g, m);
    double worst = 0.0;
    double tail = 0.0;
    for (const auto& nu : probes) {
      const auto d = weakstar_distance_to_haar(family, folner_average(space, set, nu), truncation);
      worst = std::max(worst, d.value);
      tail = d.tail_bound;
    }
    non_increasing = non_increasing && worst <= previous;
    previous = worst;
    last = worst;
    stages.push_back({{"m", m}, {"max_distance", worst}, {"tail_bound", tail}});
    csv += std::to_string(m) + "," + detail::format_double(worst) + "\n";
  }
  const bool pass = non_increasing && last < tol;
  json p;
  p["generator"] = element_json(space, g);
  p["probes"] = probes.size();
  p["truncation"] = truncation;
  p["stages"] = std::move(stages);
  p["non_increasing"] = non_increasing;
  p["tolerance"] = tol;
  p["verdict"] = pass ? "pass" : "fail";
  return {p, csv, pass ? "pass" : "fail"};
}

Outcome run_measure_approx(const ExperimentConfig& cfg, const ActionSpec& action) {
  action.require_invertible("measure-approx");
  const auto& space = action.space();
  ApproxOptions o;
  o.rounds = cfg.get_uint("measure-approx", "rounds");
  o.max_length = cfg.get_uint("measure-approx", "max_length");
  o.truncation = cfg.get_uint("measure-approx", "truncation");
  o.exhaustive_length = cfg.get_uint("measure-approx", "exhaustive_length");
  o.random_candidates = cfg.get_uint("measure-approx", "random_candidates");
  o.seed = cfg.seed();
  const DenseFunctionFamily family(space);
  const auto probes =
      default_probe_set(space, cfg.seed(), cfg.get_uint("measure-approx", "probes"), cfg.get_uint("measure-approx", "mixtures"));
  const auto target = haar_moments(family, o.truncation);
  const auto stages = convex_word_approx_stages(action, family, target, probes, o);
  const double tol = cfg.get_real("measure-approx", "tolerance");

  json out = json::array();
  std::string csv = "m,worst_probe_distance\n";
  for (const auto& s : stages) {
    json words = json::array();
    for (std::size_t k = 0; k < s.combination.size(); ++k) {
      words.push_back({{"indices", word_json(s.combination.words()[k])}, {"weight", s.combination.weights()[k]}});
    }
    out.push_back({{"m", s.m},
                   {"worst_probe_distance", s.worst_probe_distance},
                   {"tail_bound", s.tail_bound},
                   {"improved", s.improved},
                   {"words", std::move(words)}});
    csv += std::to_string(s.m) + "," + detail::format_double(s.worst_probe_distance) + "\n";
  }
  const bool pass = stages.back().worst_probe_distance < tol;
  json p;
  p["probes"] = probes.size();
  p["stages"] = std::move(out);
  p["tolerance"] = tol;
  p["verdict"] = pass ? "pass" : "fail";
  return {p, csv, pass ? "pass" : "fail"};
}

json record_json_entry(const GroupSpec& space, const SeparationRecord& r) {
  return {{"x", element_json(space, r.x)},
          {"y", element_json(space, r.y)},
          {"delta", r.delta},
          {"initial_distance", r.initial_distance},
          {"separation", r.worst_separation},
          {"word", word_json(r.word)}};
}

Outcome run_sensitivity(const ExperimentConfig& cfg, const ActionSpec& action) {
  const auto& space = action.space();
  SensitivityProbeConfig pc;
  pc.beta_levels = cfg.get_reals("sensitivity", "beta");
  pc.delta_ladder = cfg.get_reals("sensitivity", "deltas");
  pc.grid_points = cfg.get_uint("sensitivity", "grid_points");
  pc.random_points = cfg.get_uint("sensitivity", "random_points");
  pc.word_count = cfg.get_uint("sensitivity", "words");
  pc.max_word_length = cfg.get_uint("sensitivity", "max_length");
  pc.exhaustive_length = cfg.get_uint("sensitivity", "exhaustive_length");
  pc.seed = cfg.seed();
  const auto v = probe_sensitivity(action, pc);

  json p;
  p["outcome"] = to_string(v.outcome);
  if (v.outcome == SensitivityOutcome::sensitive_witnessed) p["beta"] = v.beta;
  json table = json::array();
  for (std::size_t j = 0; j < pc.delta_ladder.size(); ++j) {
    table.push_back({{"delta", pc.delta_ladder[j]}, {"max_separation", v.max_separation[j]}});
  }
  p["max_separation"] = std::move(table);
  json witnesses = json::array();
  for (const auto& r : v.witnesses) witnesses.push_back(record_json_entry(space, r));
  p["witnesses"] = std::move(witnesses);
  json evidence = json::array();
  for (const auto& r : v.evidence) evidence.push_back(record_json_entry(space, r));
  p["evidence"] = std::move(evidence);

  json modulus = json::array();
  for (const auto& e : equicontinuity_modulus(action, cfg.get_reals("sensitivity", "epsilons"), pc.word_count,
                                              pc.max_word_length, cfg.seed())) {
    modulus.push_back({{"epsilon", e.epsilon}, {"delta", e.delta}});
  }
  p["equicontinuity_modulus"] = std::move(modulus);

  std::string csv;
  if (space.kind() == GroupKind::torus && space.dimension() <= 2) {
    const auto k = static_cast<int>(cfg.get_uint("sensitivity", "ek_k"));
    const auto res = static_cast<int>(cfg.get_uint("sensitivity", "ek_resolution"));
    const auto e = estimate_Ek(action, k, res, pc.word_count, pc.max_word_length, cfg.seed());
    p["ek"] = {{"k", k},
               {"resolution", res},
               {"cells", e.member.size()},
               {"kept", e.count()},
               {"word_budget", e.word_budget},
               {"forward_invariance", ek_forward_invariance(action, e)},
               {"hit_rate", ek_hit_rate(action, e, pc.word_count, cfg.seed())}};
    csv = e.dimension == 1 ? "cell,x_0,member\n" : "cell,x_0,x_1,member\n";
    for (std::size_t c = 0; c < e.member.size(); ++c) {
      csv += std::to_string(c);
      const double w = 1.0 / res;
      if (e.dimension == 1) {
        csv += "," + detail::format_double((static_cast<double>(c) + 0.5) * w);
      } else {
        csv += "," + detail::format_double((static_cast<double>(c / static_cast<std::size_t>(res)) + 0.5) * w);
        csv += "," + detail::format_double((static_cast<double>(c % static_cast<std::size_t>(res)) + 0.5) * w);
      }
      csv += e.member[c] ? ",1\n" : ",0\n";
    }
  }
  return {p, csv, "complete"};
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string version() { return UDSEQ_VERSION; }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

RunRecord run_experiment(const ExperimentConfig& cfg, bool write_files) {
  RunRecord r;
  r.config_text = serialize(cfg);
  r.version = version();
  r.started = utc_now();
  Outcome o;
  try {
    const auto action = detail::model_action(cfg);
    const auto law = detail::model_law(cfg);
    if (!law.conforming()) {
      r.warnings.push_back("sequence " + law.to_string() + " is non-conforming: some p_n are zero");
    }
    switch (cfg.kind()) {
      case ExperimentKind::orbit: o = run_orbit(cfg, action); break;
      case ExperimentKind::equidist: o = run_equidist(cfg, action); break;
      case ExperimentKind::skew_test: o = run_skew(cfg, action); break;
      case ExperimentKind::folner: o = run_folner(cfg, action); break;
      case ExperimentKind::measure_approx: o = run_measure_approx(cfg, action); break;
      case ExperimentKind::sensitivity: o = run_sensitivity(cfg, action); break;
    }
  } catch (const std::exception& e) {
    throw ExperimentError(e.what(), r.config_text);
  }
  r.payload = o.payload.dump(2);
  r.csv = std::move(o.csv);
  r.verdict = o.verdict;
  r.finished = utc_now();

  const auto dir_name = to_string(cfg.kind()) + "-" + sha256_hex(r.config_text).substr(0, 12);
  r.directory = std::filesystem::path(cfg.get("output", "dir")) / dir_name;
  r.digests["report.json"] = sha256_hex(r.payload + "\n");
  if (!r.csv.empty()) r.digests["data.csv"] = sha256_hex(r.csv);
  if (write_files) {
    try {
      std::filesystem::create_directories(r.directory);
      write_file(r.directory / "report.json", r.payload + "\n");
      if (!r.csv.empty()) write_file(r.directory / "data.csv", r.csv);
      write_file(r.directory / "record.json", record_json(r) + "\n");
    } catch (const std::exception& e) {
      throw ExperimentError(e.what(), r.config_text);
    }
  }
  return r;
}

std::string record_json(const RunRecord& r) {
  json j;
  j["version"] = r.version;
  j["started"] = r.started;
  j["finished"] = r.finished;
  j["config"] = r.config_text;
  j["verdict"] = r.verdict;
  j["warnings"] = r.warnings;
  j["digests"] = r.digests;
  j["payload"] = json::parse(r.payload);
  return j.dump(2);
}

}  // namespace udseq

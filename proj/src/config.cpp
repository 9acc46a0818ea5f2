#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "model.hpp"
#include "strings.hpp"
#include "udseq/experiment.hpp"
#include "udseq/sensitivity.hpp"
#include "udseq/test_functions.hpp"

namespace udseq {

namespace {

std::string section_of(ExperimentKind k) { return to_string(k); }

const OptionDoc* find_option(std::string_view section, std::string_view key) {
  for (const auto& o : option_registry()) {
    if (o.section == section && o.key == key) return &o;
  }
  return nullptr;
}

bool known_section(std::string_view s) {
  return std::any_of(option_registry().begin(), option_registry().end(), [s](const OptionDoc& o) { return o.section == s; });
}

std::string slot(std::string_view section, std::string_view key) { return std::string(section) + "." + std::string(key); }

std::uint64_t parse_uint(std::string_view text) {
  const auto t = detail::trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(t) + "'");
  }
  return v;
}

void check_type(OptionType type, std::string_view value) {
  switch (type) {
    case OptionType::integer: parse_uint(value); break;
    case OptionType::real: parse_real(value); break;
    case OptionType::text: break;
    case OptionType::real_list:
      for (auto part : detail::split(value, ',')) parse_real(part);
      break;
    case OptionType::integer_list:
      for (auto part : detail::split(value, ',')) parse_uint(part);
      break;
  }
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::orbit: return "orbit";
    case ExperimentKind::equidist: return "equidist";
    case ExperimentKind::skew_test: return "skew-test";
    case ExperimentKind::folner: return "folner";
    case ExperimentKind::measure_approx: return "measure-approx";
    case ExperimentKind::sensitivity: return "sensitivity";
  }
  return {};
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds{ExperimentKind::orbit,  ExperimentKind::equidist,
                                                 ExperimentKind::skew_test, ExperimentKind::folner,
                                                 ExperimentKind::measure_approx, ExperimentKind::sensitivity};
  return kinds;
}

std::optional<ExperimentKind> parse_kind(std::string_view text) {
  const auto t = detail::trim(text);
  for (auto k : all_kinds()) {
    if (to_string(k) == t) return k;
  }
  return std::nullopt;
}

const std::vector<OptionDoc>& option_registry() {
  using T = OptionType;
  static const std::vector<OptionDoc> registry{
      {"experiment", "kind", T::text, "", "orbit | equidist | skew-test | folner | measure-approx | sensitivity"},
      {"experiment", "seed", T::integer, "", "64-bit seed; required, every random stream derives from it"},
      {"experiment", "n", T::integer, "100000", "orbit length N"},

      {"model", "action", T::text, "",
       "action string, e.g. translation(torus:1; gens=0.414,0.618), rotation-family(angles=...), doubling-fixture"},
      {"model", "group", T::text, "", "group for a translation action (torus:d, cyclic:n, product:n1xn2, perm:n, su2)"},
      {"model", "generators", T::text, "", "generators for `group`: comma-separated elements or haar:K"},
      {"model", "sequence", T::text, "geometric:0.5", "index law: geometric:q, uniform:K, custom:[p1,...];tail=q"},
      {"model", "start", T::text, "", "start point, whitespace-separated components (default: identity)"},
      {"model", "order", T::text, "composition", "composition (w_n) | right (x * z_r1 ... z_rn)"},

      {"orbit", "thin", T::integer, "1", "write every thin-th point"},

      {"equidist", "cutoff", T::integer, "8", "torus Weyl tests use max |k_i| <= cutoff"},
      {"equidist", "max_twice_spin", T::integer, "4", "SU(2) characters for 2j = 1..max_twice_spin"},
      {"equidist", "constant", T::real, "3", "thresholds are constant / sqrt(N), times sqrt(long-run variance) for SU(2) walks"},
      {"equidist", "discrepancy_constant", T::real, "2.5", "1-d star discrepancy threshold constant"},
      {"equidist", "grid", T::integer, "32", "grid resolution for d = 2, 3 discrepancy"},
      {"equidist", "min_n", T::integer, "1000", "smaller samples give an inconclusive verdict"},

      {"skew-test", "function", T::text, "cos:1", "test function: one, cos:k.., sin:k.., chi:2j, indicator:.."},
      {"skew-test", "cylinder", T::text, "1", "cylinder `start:s1 s2 ...` or `s1 s2 ...`"},
      {"skew-test", "burn_in", T::integer, "0", "skew steps discarded before averaging"},
      {"skew-test", "tolerance", T::real, "0.005", "pass when |deviation| < tolerance"},

      {"folner", "generator", T::text, "", "element g acting by x -> x * g (default: first generator)"},
      {"folner", "m", T::integer_list, "100,1000,10000", "sizes of the sets {e, g, ..., g^(m-1)}"},
      {"folner", "probes", T::integer, "100", "number of Dirac probes"},
      {"folner", "truncation", T::integer, "20", "metric truncation M"},
      {"folner", "tolerance", T::real, "0.005", "pass when the final worst distance is below tolerance"},

      {"measure-approx", "rounds", T::integer, "32", "number of greedy rounds m"},
      {"measure-approx", "max_length", T::integer, "32", "word length cap L"},
      {"measure-approx", "truncation", T::integer, "20", "metric truncation M"},
      {"measure-approx", "probes", T::integer, "100", "number of Dirac probes"},
      {"measure-approx", "mixtures", T::integer, "10", "random convex combinations of probes"},
      {"measure-approx", "exhaustive_length", T::integer, "4", "all words up to this length are candidates"},
      {"measure-approx", "random_candidates", T::integer, "256", "seeded random candidate words"},
      {"measure-approx", "tolerance", T::real, "0.01", "pass when the final worst distance is below tolerance"},

      {"sensitivity", "beta", T::real_list, "0.25,0.125", "candidate separation levels"},
      {"sensitivity", "deltas", T::real_list, "0.1,0.01,0.001,0.0001", "strictly decreasing resolutions"},
      {"sensitivity", "grid_points", T::integer, "16", "grid base points"},
      {"sensitivity", "random_points", T::integer, "16", "Haar-random base points"},
      {"sensitivity", "words", T::integer, "64", "random words"},
      {"sensitivity", "max_length", T::integer, "64", "random word length cap"},
      {"sensitivity", "exhaustive_length", T::integer, "4", "all words up to this length are tried"},
      {"sensitivity", "ek_k", T::integer, "2", "E_k estimate uses separation 1/k (torus:1 and torus:2 only)"},
      {"sensitivity", "ek_resolution", T::integer, "16", "E_k grid cells per axis"},
      {"sensitivity", "epsilons", T::real_list, "0.1,0.01", "epsilon ladder for the equicontinuity modulus"},

      {"output", "dir", T::text, "out", "output root; runs go to <dir>/<kind>-<config digest>/"},
  };
  return registry;
}

std::string config_reference() {
  std::ostringstream out;
  std::string section;
  for (const auto& o : option_registry()) {
    if (o.section != section) {
      section = o.section;
      out << "[" << section << "]\n";
    }
    out << "  " << o.key;
    if (!o.default_value.empty()) out << " = " << o.default_value;
    out << "\n      " << o.doc << "\n";
  }
  return out.str();
}

std::string ExperimentConfig::get(std::string_view section, std::string_view key) const {
  const auto* o = find_option(section, key);
  if (!o) throw std::invalid_argument("unknown config key " + slot(section, key));
  const auto it = values_.find(slot(section, key));
  return it != values_.end() ? it->second : o->default_value;
}

bool ExperimentConfig::has(std::string_view section, std::string_view key) const {
  return values_.contains(slot(section, key));
}

double ExperimentConfig::get_real(std::string_view section, std::string_view key) const { return parse_real(get(section, key)); }

std::uint64_t ExperimentConfig::get_uint(std::string_view section, std::string_view key) const {
  return parse_uint(get(section, key));
}

std::vector<double> ExperimentConfig::get_reals(std::string_view section, std::string_view key) const {
  std::vector<double> out;
  const auto v = get(section, key);
  for (auto part : detail::split(v, ',')) out.push_back(parse_real(part));
  return out;
}

std::vector<std::uint64_t> ExperimentConfig::get_uints(std::string_view section, std::string_view key) const {
  std::vector<std::uint64_t> out;
  const auto v = get(section, key);
  for (auto part : detail::split(v, ',')) out.push_back(parse_uint(part));
  return out;
}

void ExperimentConfig::set(std::string_view section, std::string_view key, std::string value) {
  if (section == "experiment" && key == "kind") {
    const auto k = parse_kind(value);
    if (!k) throw std::invalid_argument("unknown experiment kind '" + value + "'");
    kind_ = *k;
  } else if (section == "experiment" && key == "seed") {
    seed_ = parse_uint(value);
  }
  values_[slot(section, key)] = std::move(value);
}

std::string to_string(const ConfigError& e) {
  return e.line > 0 ? "line " + std::to_string(e.line) + ": " + e.message : e.message;
}

ParseResult parse_config(std::string_view text, const ConfigOverrides& overrides) {
  ParseResult result;
  auto& errors = result.errors;
  ExperimentConfig cfg;
  std::map<std::string, int> lines;  // slot -> line number
  std::string section;
  bool section_ok = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    auto line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back({line_no, "malformed section header '" + std::string(line) + "'"});
        section_ok = false;
        continue;
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      section_ok = known_section(section);
      if (!section_ok) errors.push_back({line_no, "unknown section [" + section + "]"});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({line_no, "expected key = value"});
      continue;
    }
    const auto key = std::string(detail::trim(line.substr(0, eq)));
    const auto value = std::string(detail::trim(line.substr(eq + 1)));
    if (section.empty()) {
      errors.push_back({line_no, "key '" + key + "' appears before any [section]"});
      continue;
    }
    if (!section_ok) continue;
    const auto* o = find_option(section, key);
    if (!o) {
      errors.push_back({line_no, "unknown key '" + key + "' in [" + section + "]"});
      continue;
    }
    if (lines.contains(slot(section, key))) {
      errors.push_back({line_no, "duplicate key '" + key + "' in [" + section + "]"});
      continue;
    }
    try {
      check_type(o->type, value);
      cfg.set(section, key, value);
      lines[slot(section, key)] = line_no;
    } catch (const std::exception& e) {
      errors.push_back({line_no, section + "." + key + ": " + e.what()});
    }
  }

  auto line_of = [&](std::string_view s, std::string_view k) {
    const auto it = lines.find(slot(s, k));
    return it == lines.end() ? 0 : it->second;
  };

  if (overrides.seed) cfg.set("experiment", "seed", std::to_string(*overrides.seed));
  if (overrides.output_dir) cfg.set("output", "dir", *overrides.output_dir);
  if (overrides.kind) {
    if (cfg.has("experiment", "kind") && cfg.kind() != *overrides.kind) {
      errors.push_back({line_of("experiment", "kind"), "config kind '" + cfg.get("experiment", "kind") +
                                                           "' does not match the requested '" + to_string(*overrides.kind) + "'"});
    }
    cfg.set("experiment", "kind", to_string(*overrides.kind));
  }
  if (!cfg.has("experiment", "seed")) errors.push_back({0, "missing experiment.seed (there is no default seed)"});
  if (!cfg.has("experiment", "kind")) errors.push_back({0, "missing experiment.kind"});
  if (cfg.has("experiment", "n") && cfg.get_uint("experiment", "n") < 1) {
    errors.push_back({line_of("experiment", "n"), "experiment.n must be ≥ 1"});
  }

  // Model checks; each failure is reported at the line of the offending key.
  const bool has_action = cfg.has("model", "action");
  const bool has_group = cfg.has("model", "group");
  std::optional<ActionSpec> action;
  if (has_action && (has_group || cfg.has("model", "generators"))) {
    errors.push_back({line_of("model", "action"), "give either model.action or model.group + model.generators, not both"});
  } else if (!has_action && !has_group) {
    errors.push_back({0, "missing model.action (or model.group + model.generators)"});
  } else {
    bool group_ok = true;
    if (has_group) {
      try {
        GroupSpec::parse(cfg.get("model", "group"));
      } catch (const std::exception& e) {
        group_ok = false;
        errors.push_back({line_of("model", "group"), std::string("model.group: ") + e.what()});
      }
      if (!cfg.has("model", "generators")) {
        group_ok = false;
        errors.push_back({line_of("model", "group"), "model.group needs model.generators"});
      }
    }
    if (group_ok) {
      try {
        action = detail::model_action(cfg);
      } catch (const std::exception& e) {
        const auto* key = has_action ? "action" : "generators";
        errors.push_back({line_of("model", key), "model." + std::string(key) + ": " + e.what()});
      }
    }
  }
  try {
    detail::model_law(cfg);
  } catch (const std::exception& e) {
    errors.push_back({line_of("model", "sequence"), std::string("model.sequence: ") + e.what()});
  }
  try {
    detail::model_order(cfg);
  } catch (const std::exception& e) {
    errors.push_back({line_of("model", "order"), std::string("model.order: ") + e.what()});
  }
  if (action) {
    try {
      detail::model_start(cfg, *action);
    } catch (const std::exception& e) {
      errors.push_back({line_of("model", "start"), std::string("model.start: ") + e.what()});
    }
  }

  // Kind-specific checks.
  const auto kind_section = section_of(cfg.kind());
  for (const auto& [s, l] : lines) {
    const auto sec = s.substr(0, s.find('.'));
    const bool shared = sec == "experiment" || sec == "model" || sec == "output";
    if (!shared && sec != kind_section && cfg.has("experiment", "kind")) {
      errors.push_back({l, "section [" + sec + "] does not apply to kind " + kind_section});
    }
  }
  if (action && cfg.has("experiment", "kind")) {
    auto check = [&](std::string_view key, auto&& fn) {
      try {
        fn();
      } catch (const std::exception& e) {
        errors.push_back({line_of(kind_section, key), kind_section + "." + std::string(key) + ": " + e.what()});
      }
    };
    const auto& space = action->space();
    switch (cfg.kind()) {
      case ExperimentKind::orbit:
        check("thin", [&] {
          if (cfg.get_uint("orbit", "thin") < 1) throw std::invalid_argument("must be ≥ 1");
        });
        break;
      case ExperimentKind::equidist:
        check("grid", [&] {
          const auto g = cfg.get_uint("equidist", "grid");
          if (g < 1 || g > 64) throw std::invalid_argument("must be in [1, 64]");
        });
        break;
      case ExperimentKind::skew_test:
        check("function", [&] { parse_test_function(space, cfg.get("skew-test", "function")); });
        check("cylinder", [&] { Cylinder::parse(cfg.get("skew-test", "cylinder")); });
        break;
      case ExperimentKind::folner:
        check("generator", [&] {
          if (cfg.has("folner", "generator")) parse_element(space, cfg.get("folner", "generator"));
        });
        check("m", [&] {
          for (auto m : cfg.get_uints("folner", "m")) {
            if (m < 1) throw std::invalid_argument("sizes must be ≥ 1");
          }
        });
        break;
      case ExperimentKind::measure_approx:
        check("rounds", [&] {
          if (cfg.get_uint("measure-approx", "rounds") < 1) throw std::invalid_argument("must be ≥ 1");
        });
        check("max_length", [&] {
          if (cfg.get_uint("measure-approx", "max_length") < 1) throw std::invalid_argument("must be ≥ 1");
        });
        break;
      case ExperimentKind::sensitivity:
        check("deltas", [&] {
          SensitivityProbeConfig p;
          p.beta_levels = cfg.get_reals("sensitivity", "beta");
          p.delta_ladder = cfg.get_reals("sensitivity", "deltas");
          p.validate();
        });
        break;
    }
  }

  std::stable_sort(errors.begin(), errors.end(), [](const ConfigError& a, const ConfigError& b) {
    return (a.line == 0 ? 1 << 30 : a.line) < (b.line == 0 ? 1 << 30 : b.line);
  });
  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

std::string serialize(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto kind_section = section_of(cfg.kind());
  std::string current;
  for (const char* sec : {"experiment", "model", "", "output"}) {
    const std::string name = *sec ? sec : kind_section;
    bool header = false;
    for (const auto& o : option_registry()) {
      if (o.section != name) continue;
      const auto value = cfg.get(o.section, o.key);
      if (value.empty()) continue;
      if (!header) {
        if (!current.empty()) out << "\n";
        out << "[" << name << "]\n";
        header = true;
        current = name;
      }
      out << o.key << " = " << value << "\n";
    }
  }
  return out.str();
}

namespace detail {

std::string model_action_text(const ExperimentConfig& cfg) {
  if (cfg.has("model", "action")) return cfg.get("model", "action");
  return "translation(" + cfg.get("model", "group") + "; gens=" + cfg.get("model", "generators") + ")";
}

ActionSpec model_action(const ExperimentConfig& cfg) { return ActionSpec::parse(model_action_text(cfg), cfg.seed()); }

ProbabilitySequence model_law(const ExperimentConfig& cfg) { return ProbabilitySequence::parse(cfg.get("model", "sequence")); }

GroupElement model_start(const ExperimentConfig& cfg, const ActionSpec& action) {
  if (!cfg.has("model", "start")) return identity(action.space());
  return parse_element(action.space(), cfg.get("model", "start"));
}

ProductOrder model_order(const ExperimentConfig& cfg) {
  const auto v = cfg.get("model", "order");
  if (v == "composition") return ProductOrder::composition;
  if (v == "right") return ProductOrder::right_multiplication;
  throw std::invalid_argument("expected composition or right, got '" + v + "'");
}

}  // namespace detail

}  // namespace udseq

#ifndef UDSEQ_EXPERIMENT_HPP
#define UDSEQ_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace udseq {

enum class ExperimentKind { orbit, equidist, skew_test, folner, measure_approx, sensitivity };

std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_kind(std::string_view text);
const std::vector<ExperimentKind>& all_kinds();

enum class OptionType { integer, real, text, real_list, integer_list };

/// One documented config key.
struct OptionDoc {
  std::string section;
  std::string key;
  OptionType type;
  std::string default_value;  // empty: no default
  std::string doc;
};

/// Every accepted key, in serialization order.
const std::vector<OptionDoc>& option_registry();

/// Human-readable key reference, one line per key grouped by section.
std::string config_reference();

/// A validated experiment description.
///
/// Grammar: `key = value` lines grouped under `[section]` headers; `#`
/// starts a comment. Sections: experiment, model, output and one per kind
/// (orbit, equidist, skew-test, folner, measure-approx, sensitivity).
class ExperimentConfig {
 public:
  ExperimentKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Explicit value or documented default; throws for unknown keys.
  std::string get(std::string_view section, std::string_view key) const;
  bool has(std::string_view section, std::string_view key) const;
  double get_real(std::string_view section, std::string_view key) const;
  std::uint64_t get_uint(std::string_view section, std::string_view key) const;
  std::vector<double> get_reals(std::string_view section, std::string_view key) const;
  std::vector<std::uint64_t> get_uints(std::string_view section, std::string_view key) const;

  /// Stores a value without validation; `experiment.kind` and
  /// `experiment.seed` must already be well-formed.
  void set(std::string_view section, std::string_view key, std::string value);

  bool operator==(const ExperimentConfig&) const = default;

 private:
  ExperimentKind kind_ = ExperimentKind::orbit;
  std::uint64_t seed_ = 0;
  std::map<std::string, std::string> values_;  // "section.key" -> normalized value
};

struct ConfigError {
  int line = 0;  // 0 when the problem is not tied to a line
  std::string message;
};

std::string to_string(const ConfigError& e);

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<ExperimentKind> kind;
  std::optional<std::string> output_dir;
};

/// Either a config or every error found.
struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
};

ParseResult parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Canonical text: experiment, model, the kind's section and output, every
/// key with its effective value. Serializing the parse of the output
/// reproduces it exactly.
std::string serialize(const ExperimentConfig& cfg);

/// Thrown by run_experiment; carries the config snapshot.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& what, std::string config_text)
      : std::runtime_error(what), config_text_(std::move(config_text)) {}
  const std::string& config_text() const noexcept { return config_text_; }

 private:
  std::string config_text_;
};

struct RunRecord {
  std::string config_text;  // serialize(cfg)
  std::string version;
  std::string started;      // UTC, ISO 8601
  std::string finished;
  std::string payload;      // report JSON; byte-identical for equal configs
  std::string csv;          // plot data, empty when the kind has none
  std::vector<std::string> warnings;
  std::string verdict;      // pass, fail, inconclusive or complete
  std::filesystem::path directory;
  std::map<std::string, std::string> digests;  // file name -> SHA-256 hex

  /// 0 for pass or complete, 1 otherwise.
  int exit_code() const noexcept { return verdict == "pass" || verdict == "complete" ? 0 : 1; }
};

/// Runs the experiment. With `write_files`, writes report.json, data.csv
/// and record.json under <output.dir>/<kind>-<config digest>/.
RunRecord run_experiment(const ExperimentConfig& cfg, bool write_files = true);

/// The record as JSON (timestamps, warnings, digests, payload).
std::string record_json(const RunRecord& r);

std::string sha256_hex(std::string_view data);

std::string version();

}  // namespace udseq

#endif  // UDSEQ_EXPERIMENT_HPP

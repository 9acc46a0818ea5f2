// Command-line runner: one experiment per invocation.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "udseq/experiment.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kInternalError = 3;

const char* kGroups = R"(torus:d          d-dimensional torus R^d/Z^d, elements "x_1 ... x_d" (decimals or p/q)
cyclic:n         Z/nZ, elements "j"
product:n1xn2    Z/n1 x Z/n2 x ..., elements "j1 j2 ..."
perm:n           symmetric group S_n (n <= 12), elements in one-line notation "p_0 ... p_{n-1}"
su2              unit quaternions, elements "w x y z"
)";

int run(udseq::ExperimentKind kind, const std::string& config_path, const std::optional<std::uint64_t>& seed,
        const std::optional<std::string>& out, bool as_json) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return kUsageError;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const auto parsed = udseq::parse_config(buf.str(), {seed, kind, out});
  if (!parsed.config) {
    for (const auto& e : parsed.errors) std::cerr << config_path << ": " << udseq::to_string(e) << "\n";
    return kUsageError;
  }
  try {
    const auto record = udseq::run_experiment(*parsed.config);
    for (const auto& w : record.warnings) std::cerr << "warning: " << w << "\n";
    if (as_json) {
      std::cout << record.payload << "\n";
    } else {
      std::cout << udseq::to_string(kind) << ": " << record.verdict << "\n" << "output: " << record.directory.string() << "\n";
    }
    return record.exit_code();
  } catch (const udseq::ExperimentError& e) {
    std::cerr << "error: " << e.what() << "\nconfig:\n" << e.config_text();
    return kInternalError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random products on compact groups: orbits, equidistribution tests, skew-product and measure experiments"};
  app.require_subcommand(1);
  app.footer("Config keys:\n" + udseq::config_reference() +
             "\nExit codes: 0 pass or complete, 1 fail or inconclusive verdict, 2 usage error, 3 internal error.");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool as_json = false;

  std::optional<udseq::ExperimentKind> chosen;
  for (auto kind : udseq::all_kinds()) {
    auto* sub = app.add_subcommand(udseq::to_string(kind), "run an experiment of kind " + udseq::to_string(kind));
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "override experiment.seed");
    sub->add_option("--out", out, "override output.dir");
    sub->add_flag("--json", as_json, "print the report JSON to stdout");
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  auto* list = app.add_subcommand("list-groups", "print the group grammar");
  list->callback([] { std::cout << kGroups; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  if (!chosen) return 0;
  try {
    return run(*chosen, config_path, seed, out, as_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternalError;
  }
}

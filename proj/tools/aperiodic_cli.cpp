// Command-line front end. Exit status: 0 clean, 1 a check failed or the
// computation raised an error, 2 the config or the flags are invalid.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aperiodic/experiment.hpp"

namespace {

constexpr int kConfigError = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  unsigned threads = 1;
  bool verbose = false;
};

int run(const std::string& command, const Options& opt) {
  using namespace aperiodic;
  nlohmann::json doc;
  try {
    std::ifstream in(opt.config);
    if (!in) throw ConfigError("--config", "cannot open '" + opt.config + "'");
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    auto config = cli::parse_config(doc);
    if (opt.seed) config.seed = *opt.seed;
    if (opt.verbose) std::cerr << command << ": running with seed " << config.seed << "\n";
    const auto result = cli::run_experiment(command, config, opt.threads);
    cli::write_artifacts(opt.out, result.artifacts);
    if (opt.verbose)
      for (const auto& a : result.artifacts) std::cerr << "wrote " << opt.out << "/" << a.name << "\n";
    std::cout << command << ": " << result.summary << "\n";
    return result.status;
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aperiodicity experiments on rotations, shifts and geodesic flows"};
  app.require_subcommand(1);
  Options opt;
  std::string chosen;
  for (const auto& name : aperiodic::cli::commands()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--verbose", opt.verbose, "progress on stderr");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  return run(chosen, opt);
}

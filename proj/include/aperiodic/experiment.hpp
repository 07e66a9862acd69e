#pragma once

// Experiment configs and the runner behind the command-line tool. A run
// computes every artifact in memory first; files are written only when the
// whole run succeeded, each through a temporary file and a rename.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aperiodic/bernoulli.hpp"
#include "aperiodic/geodesic_flow.hpp"
#include "aperiodic/torus.hpp"

namespace aperiodic::cli {

inline constexpr int kSchemaVersion = 1;

enum class SystemKind { Torus, Bernoulli, Schottky };

struct SystemConfig {
  SystemKind kind = SystemKind::Torus;
  // torus
  std::vector<long double> alpha;
  std::optional<std::string> continued_fraction;
  std::vector<long double> base;
  // bernoulli
  unsigned alphabet = 2;
  std::optional<std::string> word;
  std::size_t order = 10;  // de Bruijn order of the candidate set
  // schottky
  double translation = 0.0;  // 0: the default generator length
  std::size_t ball_radius = 2;
};

struct ExperimentConfig {
  SystemConfig system;
  std::vector<double> grid;  // strictly decreasing
  std::size_t horizon = 1000;
  std::size_t max_shift = 100'000;
  std::vector<std::size_t> lengths{0, 1, 2, 3, 4, 5, 6, 7, 8};
  double entropy_epsilon = 0.5;
  std::size_t candidates = 2000;
  std::size_t starts = 1;  // sampled starting points for profile and report
  std::size_t events = 1000;  // recurrence events for check-closing
  std::size_t instances = 1000;  // randomized instances for the hyperbolic suites
  std::size_t word_radius = 6;   // orbital counting
  double delta = 0.5;            // phi(l) = n^{delta l} for the word search
  std::size_t target_length = 200;
  std::optional<std::size_t> l0;
  std::size_t max_l0 = 16;
  double tolerance = 0.15;  // slack in the complexity inequalities
  std::uint64_t seed = 0;
};

/// Validates a JSON config. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);

struct Artifact {
  std::string name;
  std::string content;
};

struct RunResult {
  int status = 0;  // 0 clean, 1 some check failed
  std::vector<Artifact> artifacts;
  std::string summary;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"profile",    "dimension", "entropy",       "torus",
                                              "bernoulli",  "hyperbolic", "check-closing", "report"};
  return names;
}

/// Runs one subcommand. Throws ConfigError when the config does not fit the
/// command (for instance a torus-only command on another system).
RunResult run_experiment(const std::string& command, const ExperimentConfig& config, unsigned threads = 1);

/// Writes every artifact as dir/name via a temporary file and a rename.
void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts);

/// Engineered eps-recurrences of the golden-style rotation: eps is a random
/// multiple in (1, 3] of the recurrence distance, capped at 1/2.
std::vector<RecurrenceEvent<torus::TorusRotation>> torus_recurrence_events(const torus::TorusRotation& sys,
                                                                           std::size_t count,
                                                                           std::uint64_t seed);

/// Engineered Bowen recurrences of the full shift: x(m) = x(m + s) for
/// m = 1..l + j at eps = e^{-j}.
std::vector<RecurrenceEvent<bernoulli::BernoulliShift>> bernoulli_recurrence_events(
    const bernoulli::BernoulliShift& sys, std::size_t count, std::uint64_t seed);

struct SuiteTally {
  std::size_t instances = 0;
  std::size_t violations = 0;
  std::size_t rejected = 0;  // constructions that missed a hypothesis
  double min_slack = hyperbolic::kInfinity;
};

/// Random (psi, z) with |psi| in [4 delta0, 20] and d(z, A_psi) <= 10.
SuiteTally translation_suite(std::size_t count, std::uint64_t seed);

/// Segments whose ends lie exactly D from a line, D in [eps, 5].
SuiteTally neighbor_suite(std::size_t count, std::uint64_t seed);

/// Segments with ends eps0 / 4 off the axis of psi, s = |psi|, eps0 cycling
/// through 0.05, 0.1, 0.2. Counts only constructions meeting every
/// hypothesis; the rest are tallied as rejected.
SuiteTally closing_suite(std::size_t count, std::uint64_t seed);

/// CSV-safe decimal text independent of the global locale.
std::string format_number(double x);

}  // namespace aperiodic::cli

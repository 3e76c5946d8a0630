#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "remest/cli/config.hpp"
#include "remest/harq.hpp"
#include "remest/lti_kalman.hpp"
#include "remest/mdp.hpp"
#include "remest/policy_grid.hpp"

namespace remest::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitUnstable = 2,
  kExitSolver = 3,
};

/// Derived model objects for one configuration.
struct Experiment {
  ExperimentConfig config;
  LtiSystem system;
  HarqModel channel;
  SteadyKalman kalman;
  StabilityReport stability;

  static Experiment build(const ExperimentConfig& cfg);

  RviOptions rvi_options() const;
  TruncatedMdp mse_mdp() const;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  bool force = false;
  std::size_t threads = 0;
};

/// Policy sources understood by simulate/verify-policy: the five named
/// policies, or a path to an `r,q,action` CSV.
inline const std::vector<std::string> kPolicyNames{"optimal", "myopic", "delay", "arq", "psi"};

/// Builds a named policy or reads one from a CSV file.
PolicyGrid resolve_policy(const Experiment& ex, const std::string& source);

int cmd_stability(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const ExperimentConfig& cfg, CostKind kind, const RunOptions& opts, std::ostream& out,
              std::ostream& err);
/// `source` is a policy name, "all", or a CSV path.
int cmd_simulate(const ExperimentConfig& cfg, const std::string& source, const RunOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_compare(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify_policy(const ExperimentConfig& cfg, const std::string& source, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing included).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Threads allowed by REMEST_THREADS (unset or invalid: hardware concurrency).
std::size_t threads_from_env();

}  // namespace remest::cli

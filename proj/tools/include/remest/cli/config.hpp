#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "remest/errors.hpp"
#include "remest/harq.hpp"
#include "remest/lti_kalman.hpp"
#include "remest/simulator.hpp"

namespace remest::cli {

/// Malformed or invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using Rows = std::vector<std::vector<double>>;

struct SystemSection {
  Rows a{{1.8, 0.2}, {0.2, 0.8}};
  Rows c{{1.0, 1.0}};
  Rows q{{1.0, 0.0}, {0.0, 1.0}};
  Rows r{{1.0}};
  friend bool operator==(const SystemSection&, const SystemSection&) = default;
};

struct ChannelSection {
  double lambda = 0.8;
  double h = 0.5;
  std::optional<std::vector<double>> g_table;
  friend bool operator==(const ChannelSection&, const ChannelSection&) = default;
};

struct MdpSection {
  std::size_t q_max = 20;
  double tol = 1e-9;
  long max_iter = 100'000;
  friend bool operator==(const MdpSection&, const MdpSection&) = default;
};

struct SimSection {
  std::size_t K = 2000;
  std::size_t runs = 2000;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::analytic;
  friend bool operator==(const SimSection&, const SimSection&) = default;
};

struct OutputSection {
  std::string directory = "remest-out";
  std::vector<std::string> formats{"csv", "json"};
  friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

/// One experiment. Default-constructed values reproduce the reference
/// setting: A = [[1.8,0.2],[0.2,0.8]], C = [1 1], Q = I, R = 1, λ = 0.8,
/// h = 0.5, q_max = 20, K = runs = 2000.
struct ExperimentConfig {
  SystemSection system;
  ChannelSection channel;
  MdpSection mdp;
  SimSection sim;
  OutputSection outputs;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  bool wants(const std::string& format) const;

  /// Builders re-validate the model invariants; failures become ConfigError.
  LtiSystem build_system() const;
  HarqModel build_channel() const;
  SimConfig build_sim_config() const;
};

/// Strict JSON parse: unknown keys, wrong types and invalid values throw
/// ConfigError. Missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace remest::cli

// Copyright 2026 The QSL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsl/grape.hpp"
#include "qsl/model.hpp"
#include "qsl/spinchain.hpp"
#include "qsl/targets.hpp"

namespace qsl::cli {

enum class Scenario { speedlimit_sweep, analytic_checks, toffoli, transfer };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitCheckFailed = 3;

/// Bad or unreadable configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemConfig {
  int n_qubits = 2;
  CouplingKind coupling = CouplingKind::ising;
  Geometry geometry = Geometry::chain;
  ControlMode mode = ControlMode::fixed_delta;
  double J = 0.01;
  std::vector<double> deltas;  // empty: default_qubits
  double epsilon_bound = 20.0;
  double delta_bound = 2.0;
};

struct EstimateConfig {
  std::vector<double> thresholds{0.98};
  bool sine_fit = true;
};

struct AnalyticConfig {
  double J = 0.01;
  double delta = 1.0;
  std::vector<double> iswap_ratios{0.001, 0.01};
};

struct ToffoliConfig {
  /// Allowed time in units of pi/(4J).
  double time_factor = 1.9 * 1.10;
  std::vector<Geometry> geometries{Geometry::triangle};
};

struct TransferConfig {
  ChainSpec chain{100, 1.0, CouplingKind::ising};
  Wavepacket packet{1.0, kPi / 2, 10.0};
  std::size_t n_samples = 401;
  double probability_threshold = 1e-6;
};

struct Bound {
  std::optional<double> min;
  std::optional<double> max;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::speedlimit_sweep;
  std::uint64_t seed = 0;
  std::string output_dir = "qsl_out";
  SystemConfig system;
  StandardGate gate = StandardGate::cnot;
  /// Grid times in units of the gate's reference time.
  std::vector<double> grid_factors;
  OptimizerConfig optimizer;
  EstimateConfig estimate;
  AnalyticConfig analytic;
  ToffoliConfig toffoli;
  TransferConfig transfer;
  /// Replaces the registered bounds when present.
  std::optional<std::map<std::string, Bound>> acceptance;
  nlohmann::json raw;
};

/**
 * Validates and fills defaults. Every object level rejects unknown keys and
 * sections the scenario does not use. `seed_override` (from QSL_SEED) wins
 * over the config's seed. Throws ConfigError.
 */
ExperimentConfig parse_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {});

const char* to_string(Scenario s);
std::vector<std::string> scenario_names();

/// Models built from the system section.
SystemModel build_model(const SystemConfig& system);

struct Artifact {
  std::string name;  // relative to the output directory
  std::string content;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  /// Named scalars the acceptance bounds refer to.
  std::map<std::string, double> metrics;
  std::string summary;
};

using ProgressSink = std::function<void(const std::string& line)>;

/// Runs the scenario fully in memory; nothing touches the disk.
Outcome run_scenario(const ExperimentConfig& config, std::size_t jobs, const ProgressSink& progress = {});

/// Registered bounds for the scenario, or the config override. Empty when
/// nothing is registered for this setup.
std::map<std::string, Bound> acceptance_bounds(const ExperimentConfig& config);

struct Verdict {
  bool passed = true;
  nlohmann::json report;
  std::vector<std::string> failed;
};

Verdict evaluate(const std::map<std::string, Bound>& bounds, const std::map<std::string, double>& metrics);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

/// Writes every artifact plus manifest.json into dir.
void write_outputs(const std::string& dir, const ExperimentConfig& config, const std::vector<Artifact>& artifacts);

/// Entry point of the qsl tool. Progress goes to err, the verdict line to out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qsl::cli

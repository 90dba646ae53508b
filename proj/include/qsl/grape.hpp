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
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "qsl/model.hpp"
#include "qsl/propagator.hpp"
#include "qsl/targets.hpp"

namespace qsl {

/// Gate fidelity |Tr(U_target^dagger u)|^2 / 4^n.
double fidelity(const TargetGate& target, const CMatrix& u);

class StaleCacheError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/**
 * Exact derivative of the gate fidelity with respect to every amplitude,
 * slice-major like ControlPulse::amplitudes().
 *
 * Uses each slice's eigendecomposition: in the eigenbasis the derivative of
 * exp(-i H dt) along C is C_pq times the divided difference
 * (e^{-i l_p dt} - e^{-i l_q dt}) / (l_p - l_q), replaced by -i dt e^{-i l_p dt}
 * when |l_p - l_q| < 1e-12.
 *
 * Throws StaleCacheError when the cache was built from a different pulse.
 */
std::vector<double> gradient(const SystemModel& model, const ControlPulse& pulse,
                             const TargetGate& target, const PropagatorCache& cache);

enum class StepRule { gradient_ascent, lbfgs };

struct OptimizerConfig {
  std::size_t n_slices = 500;
  std::size_t max_iterations = 10000;
  std::size_t n_restarts = 4;
  StepRule step_rule = StepRule::gradient_ascent;
  /// Stop when the fidelity gains less than this over `convergence_window`
  /// iterations.
  double convergence_tol = 1e-9;
  std::size_t convergence_window = 100;
  /// Random starts are uniform within this fraction of each bound.
  double init_fraction = 0.1;
  double step_growth = 1.5;
  std::size_t lbfgs_memory = 10;
  std::uint64_t seed = 0;
};

struct RestartResult {
  std::size_t restart_index = 0;
  double fidelity = 0.0;
  ControlPulse pulse;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

struct OptimizationReport {
  double best_fidelity = 0.0;
  ControlPulse best_pulse;
  std::size_t best_restart = 0;
  /// Iterations of the best restart.
  std::size_t iterations_used = 0;
  std::vector<double> restart_fidelities;
  std::vector<std::size_t> restart_iterations;
  double gradient_norm_final = 0.0;
};

/// Independent sub-seed for restart r; distinct restarts never share a stream.
std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart_index);

/// Starting pulse: zero for restart 0, uniform random otherwise.
ControlPulse initial_pulse(const SystemModel& model, double duration, const OptimizerConfig& config,
                           std::size_t restart_index);

/// Projects every amplitude onto its control's [lower, upper].
void clip_to_bounds(const SystemModel& model, ControlPulse& pulse);

/// One restart of the ascent, deterministic in (config.seed, restart_index).
RestartResult optimize_restart(const SystemModel& model, const TargetGate& target, double duration,
                               const OptimizerConfig& config, std::size_t restart_index);

/// Best of the given restarts. Ties go to the lowest restart index.
OptimizationReport merge_restarts(std::vector<RestartResult> restarts);

/// All restarts in sequence, merged.
OptimizationReport optimize(const SystemModel& model, const TargetGate& target, double duration,
                            const OptimizerConfig& config);

nlohmann::json to_json(const OptimizerConfig& config);
nlohmann::json to_json(const OptimizationReport& report);
const char* to_string(StepRule rule);

}  // namespace qsl

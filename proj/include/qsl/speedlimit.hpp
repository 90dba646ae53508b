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

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsl/grape.hpp"

namespace qsl {

struct CurvePoint {
  double t = 0.0;
  double fidelity = 0.0;
  OptimizationReport report;
};

struct FidelityCurve {
  std::vector<CurvePoint> points;  // strictly increasing t
  std::string model_tag;
  std::string target_tag;
  /// Fitted curves are pinned to this value at t = 0.
  double zero_time_fidelity = 0.0;
};

enum class EstimateMethod { threshold, sine_fit };
enum class EstimateStatus { ok, left_censored, not_bracketed };

struct SpeedLimitEstimate {
  double t_min = 0.0;  // NaN when not bracketed
  EstimateMethod method = EstimateMethod::threshold;
  EstimateStatus status = EstimateStatus::ok;
  double threshold_value = 0.0;
  double fit_f0 = 0.0;
  double fit_rmse = 0.0;
  std::size_t n_fit_points = 0;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Called once per finished (T point, restart) job, from the worker thread.
using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

/// Seed of grid point i; restarts then split it further with restart_seed.
std::uint64_t point_seed(std::uint64_t seed, std::size_t point_index);

/**
 * One optimize() per grid time, each from fresh restarts. Jobs are
 * (point, restart) pairs spread over `jobs` threads; results are merged by
 * key, so the curve does not depend on the thread count.
 *
 * zero_time_fidelity is set to the target's no-interaction bound
 * (local_fidelity_bound).
 */
FidelityCurve sweep(const SystemModel& model, const TargetGate& target, const std::vector<double>& t_grid,
                    const OptimizerConfig& config, std::size_t jobs = 1, const SweepProgress& progress = {});

/// Linear interpolation at the first upward crossing of `threshold`.
/// All points above: first grid time, status left_censored. None reaching
/// it: status not_bracketed.
SpeedLimitEstimate threshold_crossing(const FidelityCurve& curve, double threshold);

inline constexpr double kSaturationCutoff = 0.995;

/// F(t) = f0 + (1 - f0) sin(pi t / (2 t_min)).
double sine_model(double t, double f0, double t_min);

/**
 * Single-parameter least-squares fit of sine_model with f0 pinned to
 * curve.zero_time_fidelity, over points below kSaturationCutoff. A coarse
 * log-spaced scan brackets the minimum, golden-section search refines it to
 * 1e-8 relative. Throws InsufficientDataError with fewer than 4 usable points.
 */
SpeedLimitEstimate fit_sine(const FidelityCurve& curve);
SpeedLimitEstimate fit_sine(const FidelityCurve& curve, double f0);

/**
 * Analytic reference time for a gate: pi/(4J) for CNOT and CZ, pi/(2J) for
 * iSWAP, pi/(8J) (Heisenberg) or 3pi/(8J) (Ising) for sqrt(SWAP). The
 * Toffoli has no closed form; its unit is the CNOT time pi/(4J).
 */
double reference_gate_time(StandardGate gate, CouplingKind coupling, double J);

/// Toffoli time in units of pi/(4J) from long fixed-Delta runs, target on
/// qubit 3 (a side qubit of the chain): chain 3.8 / 2.6 and triangle 1.9 /
/// 1.4 for Ising / Heisenberg. Used to size default grids.
double toffoli_time_factor(Geometry geometry, CouplingKind coupling);

/// n points evenly spaced over [lo, hi] * reference_time.
std::vector<double> default_t_grid(double reference_time, std::size_t n = 12, double lo = 0.1,
                                   double hi = 1.05);

/// Columns t, <norm_label>, fidelity, restarts, iterations; 12 significant digits.
void write_curve_csv(std::ostream& os, const FidelityCurve& curve, double reference_time,
                     const std::string& norm_label);

nlohmann::json to_json(const SpeedLimitEstimate& e, double reference_time);
const char* to_string(EstimateMethod m);
const char* to_string(EstimateStatus s);

}  // namespace qsl

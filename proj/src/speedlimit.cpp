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

#include "qsl/speedlimit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace qsl {

std::uint64_t point_seed(std::uint64_t seed, std::size_t point_index) {
  return restart_seed(seed ^ 0x5157'4545'5045'4550ULL, point_index);
}

FidelityCurve sweep(const SystemModel& model, const TargetGate& target, const std::vector<double>& t_grid,
                    const OptimizerConfig& config, std::size_t jobs, const SweepProgress& progress) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw std::invalid_argument("sweep: grid times must be > 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("sweep: grid must be increasing");
  }
  if (config.n_restarts == 0) throw std::invalid_argument("sweep: n_restarts must be > 0");
  if (!t_grid.empty()) check_discretization(model, t_grid.back(), config.n_slices);

  const std::size_t n_restarts = config.n_restarts;
  const std::size_t total = t_grid.size() * n_restarts;
  std::vector<RestartResult> results(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t point = job / n_restarts;
      const std::size_t restart = job % n_restarts;
      try {
        OptimizerConfig c = config;
        c.seed = point_seed(config.seed, point);
        results[job] = optimize_restart(model, target, t_grid[point], c, restart);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) progress(finished, total);
    }
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, total));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  FidelityCurve curve;
  curve.target_tag = target.label;
  curve.zero_time_fidelity = local_fidelity_bound(target);
  for (std::size_t p = 0; p < t_grid.size(); ++p) {
    std::vector<RestartResult> rs(std::make_move_iterator(results.begin() + p * n_restarts),
                                  std::make_move_iterator(results.begin() + (p + 1) * n_restarts));
    auto report = merge_restarts(std::move(rs));
    curve.points.push_back({t_grid[p], report.best_fidelity, std::move(report)});
  }
  return curve;
}

SpeedLimitEstimate threshold_crossing(const FidelityCurve& curve, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold_crossing: threshold must lie in (0, 1)");
  }
  SpeedLimitEstimate e;
  e.method = EstimateMethod::threshold;
  e.threshold_value = threshold;
  const auto& pts = curve.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].fidelity >= threshold) {
      if (i == 0) {
        e.t_min = pts[0].t;
        e.status = EstimateStatus::left_censored;
      } else {
        const auto& a = pts[i - 1];
        const auto& b = pts[i];
        e.t_min = a.t + (threshold - a.fidelity) / (b.fidelity - a.fidelity) * (b.t - a.t);
      }
      return e;
    }
  }
  e.t_min = std::numeric_limits<double>::quiet_NaN();
  e.status = EstimateStatus::not_bracketed;
  return e;
}

double sine_model(double t, double f0, double t_min) {
  return f0 + (1.0 - f0) * std::sin(kPi * t / (2.0 * t_min));
}

SpeedLimitEstimate fit_sine(const FidelityCurve& curve) { return fit_sine(curve, curve.zero_time_fidelity); }

SpeedLimitEstimate fit_sine(const FidelityCurve& curve, double f0) {
  std::vector<std::pair<double, double>> data;
  for (const auto& p : curve.points)
    if (p.fidelity < kSaturationCutoff) data.emplace_back(p.t, p.fidelity);
  if (data.size() < 4) {
    throw InsufficientDataError("fit_sine: need at least 4 points below " +
                                std::to_string(kSaturationCutoff) + ", have " + std::to_string(data.size()));
  }
  auto sse = [&](double tau) {
    double s = 0.0;
    for (const auto& [t, f] : data) {
      const double r = sine_model(t, f0, tau) - f;
      s += r * r;
    }
    return s;
  };

  double t_max = 0.0;
  for (const auto& d : data) t_max = std::max(t_max, d.first);
  // Coarse scan over [0.2, 50] * t_max, log-spaced.
  constexpr int kScan = 600;
  const double lo = 0.2 * t_max, hi = 50.0 * t_max;
  const double ratio = std::pow(hi / lo, 1.0 / kScan);
  int best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double v = sse(lo * std::pow(ratio, i));
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  double a = lo * std::pow(ratio, std::max(best_i - 1, 0));
  double b = lo * std::pow(ratio, std::min(best_i + 1, kScan));

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = sse(c), fd = sse(d);
  for (int iter = 0; iter < 200 && (b - a) > 1e-14 * 0.5 * (a + b); ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sse(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sse(d);
    }
  }
  SpeedLimitEstimate e;
  e.method = EstimateMethod::sine_fit;
  e.t_min = 0.5 * (a + b);
  e.fit_f0 = f0;
  e.n_fit_points = data.size();
  e.fit_rmse = std::sqrt(sse(e.t_min) / static_cast<double>(data.size()));
  return e;
}

double reference_gate_time(StandardGate gate, CouplingKind coupling, double J) {
  if (!(J > 0.0)) throw std::invalid_argument("reference_gate_time: J must be > 0");
  switch (gate) {
    case StandardGate::cnot:
    case StandardGate::cz:
    case StandardGate::toffoli:
      return kPi / (4.0 * J);
    case StandardGate::iswap:
      return kPi / (2.0 * J);
    case StandardGate::sqrt_swap:
      return (coupling == CouplingKind::heisenberg ? 1.0 : 3.0) * kPi / (8.0 * J);
  }
  return kPi / (4.0 * J);
}

double toffoli_time_factor(Geometry geometry, CouplingKind coupling) {
  const bool ising = coupling == CouplingKind::ising;
  if (geometry == Geometry::triangle) return ising ? 1.9 : 1.4;
  return ising ? 3.8 : 2.6;
}

std::vector<double> default_t_grid(double reference_time, std::size_t n, double lo, double hi) {
  if (n == 0) return {};
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    grid[i] = frac * reference_time;
  }
  return grid;
}

void write_curve_csv(std::ostream& os, const FidelityCurve& curve, double reference_time,
                     const std::string& norm_label) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << "t," << norm_label << ",fidelity,restarts,iterations\n" << std::setprecision(12);
  for (const auto& p : curve.points) {
    os << p.t << ',' << p.t / reference_time << ',' << p.fidelity << ','
       << p.report.restart_fidelities.size() << ',' << p.report.iterations_used << '\n';
  }
  os.flags(old_flags);
  os.precision(old_prec);
}

const char* to_string(EstimateMethod m) { return m == EstimateMethod::threshold ? "threshold" : "sine_fit"; }

const char* to_string(EstimateStatus s) {
  switch (s) {
    case EstimateStatus::ok: return "ok";
    case EstimateStatus::left_censored: return "left_censored";
    case EstimateStatus::not_bracketed: return "not_bracketed";
  }
  return "?";
}

nlohmann::json to_json(const SpeedLimitEstimate& e, double reference_time) {
  nlohmann::json j = {{"method", to_string(e.method)}, {"status", to_string(e.status)}};
  if (std::isfinite(e.t_min)) {
    j["t_min"] = e.t_min;
    j["normalized_factor"] = e.t_min / reference_time;
  } else {
    j["t_min"] = nullptr;
    j["normalized_factor"] = nullptr;
  }
  if (e.method == EstimateMethod::threshold) {
    j["threshold"] = e.threshold_value;
  } else {
    j["f0"] = e.fit_f0;
    j["rmse"] = e.fit_rmse;
    j["n_fit_points"] = e.n_fit_points;
  }
  return j;
}

}  // namespace qsl

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

#include "qsl/grape.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

namespace qsl {

double fidelity(const TargetGate& target, const CMatrix& u) { return trace_fidelity(target.matrix, u); }

namespace {

constexpr double kDegenerateGap = 1e-12;

Complex trace_product(const CMatrix& a, const CMatrix& b) {
  // Tr(a b)
  const std::size_t d = a.dim();
  Complex s = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) s += a(i, k) * b(k, i);
  return s;
}

// Q^dagger m Q
CMatrix to_eigenbasis(const CMatrix& q, const CMatrix& m) { return q.adjoint() * m * q; }

}  // namespace

std::vector<double> gradient(const SystemModel& model, const ControlPulse& pulse,
                             const TargetGate& target, const PropagatorCache& cache) {
  if (cache.pulse_fingerprint != pulse.fingerprint() ||
      cache.slice_unitaries.size() != pulse.n_slices()) {
    throw StaleCacheError("gradient: propagator cache does not belong to this pulse");
  }
  if (target.matrix.dim() != model.dim()) throw std::invalid_argument("gradient: dimension mismatch");

  const std::size_t d = model.dim();
  const std::size_t n_slices = pulse.n_slices();
  const std::size_t n_controls = pulse.n_controls();
  const CMatrix v_dag = target.matrix.adjoint();
  const Complex g = trace_product(v_dag, cache.total());
  const double norm = 2.0 / static_cast<double>(d * d);

  std::vector<double> grad(n_slices * n_controls, 0.0);
  CMatrix vb(d), m(d), kernel(d);
  for (std::size_t s = 0; s < n_slices; ++s) {
    const auto& eig = cache.slice_eigs[s];
    const CMatrix& q = eig.vectors;
    const double dt = pulse.width(s);

    // dg/du = Tr(M dU) with M = F_{s} V^dag B_{s+1}.
    multiply_into(v_dag, cache.backward[s + 1], vb);
    multiply_into(cache.forward[s], vb, m);
    const CMatrix m_eig = to_eigenbasis(q, m);

    // kernel_pq = M~_qp * Gamma_pq
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t r = 0; r < d; ++r) {
        const double lp = eig.values[p], lr = eig.values[r];
        Complex gamma;
        if (std::abs(lp - lr) < kDegenerateGap) {
          gamma = Complex(0.0, -dt) * std::polar(1.0, -lp * dt);
        } else {
          gamma = (std::polar(1.0, -lp * dt) - std::polar(1.0, -lr * dt)) / (lp - lr);
        }
        kernel(p, r) = m_eig(r, p) * gamma;
      }

    for (std::size_t j = 0; j < n_controls; ++j) {
      const CMatrix c_eig = to_eigenbasis(q, model.controls[j].op);
      Complex dg = 0.0;
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t r = 0; r < d; ++r) dg += kernel(p, r) * c_eig(p, r);
      grad[s * n_controls + j] = norm * (std::conj(g) * dg).real();
    }
  }
  return grad;
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart_index) {
  // splitmix64 of a per-restart offset
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(restart_index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void clip_to_bounds(const SystemModel& model, ControlPulse& pulse) {
  const std::size_t nc = pulse.n_controls();
  auto amps = pulse.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto& c = model.controls[i % nc];
    amps[i] = std::clamp(amps[i], c.lower, c.upper);
  }
}

ControlPulse initial_pulse(const SystemModel& model, double duration, const OptimizerConfig& config,
                           std::size_t restart_index) {
  ControlPulse pulse(duration, config.n_slices, model.n_controls());
  if (restart_index > 0) {
    std::mt19937_64 rng(restart_seed(config.seed, restart_index));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t k = 0; k < pulse.n_slices(); ++k)
      for (std::size_t j = 0; j < pulse.n_controls(); ++j) {
        const auto& c = model.controls[j];
        const double scale = config.init_fraction * std::max(std::abs(c.lower), std::abs(c.upper));
        pulse.amplitude(k, j) = scale * unit(rng);
      }
  }
  clip_to_bounds(model, pulse);
  return pulse;
}

namespace {

// Zeroes components that would push an amplitude through an active bound.
void project_direction(const SystemModel& model, const ControlPulse& pulse, std::vector<double>& dir) {
  const std::size_t nc = pulse.n_controls();
  auto amps = pulse.amplitudes();
  for (std::size_t i = 0; i < dir.size(); ++i) {
    const auto& c = model.controls[i % nc];
    if ((amps[i] >= c.upper && dir[i] > 0.0) || (amps[i] <= c.lower && dir[i] < 0.0)) dir[i] = 0.0;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

struct Curvature {
  std::vector<double> s, y;
  double rho;
};

// Two-loop recursion for the ascent direction H * g, where H approximates the
// inverse Hessian of -F.
std::vector<double> lbfgs_direction(const std::deque<Curvature>& memory, const std::vector<double>& g) {
  std::vector<double> q = g;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * dot(memory[i].s, q);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] -= alpha[i] * memory[i].y[k];
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& x : q) x *= gamma;
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * dot(memory[i].y, q);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += (alpha[i] - beta) * memory[i].s[k];
  }
  return q;
}

}  // namespace

RestartResult optimize_restart(const SystemModel& model, const TargetGate& target, double duration,
                               const OptimizerConfig& config, std::size_t restart_index) {
  if (!(duration > 0.0)) throw std::invalid_argument("optimize: duration must be > 0");
  if (target.matrix.dim() != model.dim()) throw std::invalid_argument("optimize: dimension mismatch");
  if (config.n_slices == 0) throw std::invalid_argument("optimize: n_slices must be > 0");

  ControlPulse pulse = initial_pulse(model, duration, config, restart_index);
  PropagatorCache cache = build_cache(model, pulse);
  double f = fidelity(target, cache.total());
  std::vector<double> grad = gradient(model, pulse, target, cache);

  double min_range = std::numeric_limits<double>::infinity();
  for (const auto& c : model.controls) min_range = std::min(min_range, c.upper - c.lower);
  if (model.controls.empty() || !(min_range > 0.0)) {
    return {restart_index, f, pulse, 0, 0.0};
  }

  std::deque<Curvature> memory;
  std::vector<double> history{f};
  double step = 0.0;
  std::size_t iterations = 0;
  std::vector<double> pgrad = grad;
  project_direction(model, pulse, pgrad);

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    if (f >= 1.0 - 1e-14) break;
    if (max_abs(pgrad) == 0.0) break;

    std::vector<double> dir = pgrad;
    bool quasi_newton = false;
    if (config.step_rule == StepRule::lbfgs && !memory.empty()) {
      dir = lbfgs_direction(memory, grad);
      project_direction(model, pulse, dir);
      if (dot(dir, pgrad) > 0.0) {
        quasi_newton = true;
      } else {
        memory.clear();
        dir = pgrad;
      }
    }

    double trial_step;
    if (quasi_newton) {
      trial_step = 1.0;
    } else {
      if (step == 0.0) step = 0.05 * min_range / max_abs(dir);
      trial_step = step;
    }

    bool accepted = false;
    ControlPulse trial;
    PropagatorCache trial_cache;
    double f_trial = f;
    for (int tries = 0; tries < 60; ++tries) {
      trial = pulse;
      auto amps = trial.amplitudes();
      for (std::size_t i = 0; i < amps.size(); ++i) amps[i] += trial_step * dir[i];
      clip_to_bounds(model, trial);
      trial_cache = build_cache(model, trial);
      f_trial = fidelity(target, trial_cache.total());
      if (f_trial >= f) {
        accepted = true;
        break;
      }
      trial_step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> grad_next = gradient(model, trial, target, trial_cache);
    if (config.step_rule == StepRule::lbfgs) {
      Curvature c;
      c.s.resize(grad.size());
      c.y.resize(grad.size());
      auto a_new = trial.amplitudes();
      auto a_old = pulse.amplitudes();
      for (std::size_t i = 0; i < grad.size(); ++i) {
        c.s[i] = a_new[i] - a_old[i];
        c.y[i] = grad[i] - grad_next[i];  // gradient change of -F
      }
      const double sy = dot(c.s, c.y);
      if (sy > 1e-16 * std::sqrt(dot(c.s, c.s) * dot(c.y, c.y)) && sy > 0.0) {
        c.rho = 1.0 / sy;
        memory.push_back(std::move(c));
        if (memory.size() > config.lbfgs_memory) memory.pop_front();
      }
    }
    if (!quasi_newton) step = trial_step * config.step_growth;

    pulse = std::move(trial);
    cache = std::move(trial_cache);
    f = f_trial;
    grad = std::move(grad_next);
    pgrad = grad;
    project_direction(model, pulse, pgrad);
    ++iterations;
    history.push_back(f);

    const std::size_t w = config.convergence_window;
    if (w > 0 && history.size() > w && f - history[history.size() - 1 - w] < config.convergence_tol) break;
  }

  return {restart_index, f, std::move(pulse), iterations, std::sqrt(dot(pgrad, pgrad))};
}

OptimizationReport merge_restarts(std::vector<RestartResult> restarts) {
  if (restarts.empty()) throw std::invalid_argument("merge_restarts: no restarts");
  std::sort(restarts.begin(), restarts.end(),
            [](const auto& a, const auto& b) { return a.restart_index < b.restart_index; });
  OptimizationReport report;
  std::size_t best = 0;
  for (std::size_t i = 0; i < restarts.size(); ++i) {
    report.restart_fidelities.push_back(restarts[i].fidelity);
    report.restart_iterations.push_back(restarts[i].iterations);
    if (restarts[i].fidelity > restarts[best].fidelity) best = i;
  }
  report.best_fidelity = restarts[best].fidelity;
  report.best_restart = restarts[best].restart_index;
  report.iterations_used = restarts[best].iterations;
  report.gradient_norm_final = restarts[best].gradient_norm;
  report.best_pulse = std::move(restarts[best].pulse);
  return report;
}

OptimizationReport optimize(const SystemModel& model, const TargetGate& target, double duration,
                            const OptimizerConfig& config) {
  if (config.n_restarts == 0) throw std::invalid_argument("optimize: n_restarts must be > 0");
  check_discretization(model, duration, config.n_slices);
  std::vector<RestartResult> restarts;
  for (std::size_t r = 0; r < config.n_restarts; ++r)
    restarts.push_back(optimize_restart(model, target, duration, config, r));
  return merge_restarts(std::move(restarts));
}

const char* to_string(StepRule rule) {
  return rule == StepRule::gradient_ascent ? "gradient_ascent" : "lbfgs";
}

nlohmann::json to_json(const OptimizerConfig& c) {
  return {{"n_slices", c.n_slices},
          {"max_iterations", c.max_iterations},
          {"n_restarts", c.n_restarts},
          {"step_rule", to_string(c.step_rule)},
          {"convergence_tol", c.convergence_tol},
          {"convergence_window", c.convergence_window},
          {"init_fraction", c.init_fraction},
          {"step_growth", c.step_growth},
          {"lbfgs_memory", c.lbfgs_memory},
          {"seed", c.seed}};
}

nlohmann::json to_json(const OptimizationReport& r) {
  return {{"best_fidelity", r.best_fidelity},
          {"best_restart", r.best_restart},
          {"iterations_used", r.iterations_used},
          {"restart_fidelities", r.restart_fidelities},
          {"restart_iterations", r.restart_iterations},
          {"gradient_norm_final", r.gradient_norm_final},
          {"duration", r.best_pulse.duration()},
          {"n_slices", r.best_pulse.n_slices()}};
}

}  // namespace qsl

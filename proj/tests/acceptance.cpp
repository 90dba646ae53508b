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

// Acceptance suite: one PASS/FAIL line per criterion on stdout.
//
//   acceptance [--toffoli] [--only 1,2,...] [--jobs N]
//
// Criterion 7 (three-qubit Toffoli) takes hours on one core and only runs
// with --toffoli; otherwise it reports SKIP.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qsl/cli.hpp"
#include "qsl/grape.hpp"
#include "qsl/log.hpp"
#include "qsl/model.hpp"
#include "qsl/propagator.hpp"
#include "qsl/speedlimit.hpp"
#include "qsl/spinchain.hpp"
#include "qsl/targets.hpp"

#ifndef QSL_CONFIG_DIR
#define QSL_CONFIG_DIR "configs"
#endif

using namespace qsl;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
  bool skipped = false;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t g_jobs = 1;

Result analytic_cz() {
  const double J = 0.01;
  const auto u = expm_hermitian(cz_drift(0.0, 0.0, J), kPi / (4.0 * J));
  const auto c = fidelity_local_z_corrected(u, standard_gate(StandardGate::cz));
  return {c.fidelity >= 1.0 - 1e-9, fmt("local-corrected F = 1 - %.2e (phases %.4f, %.4f)", 1.0 - c.fidelity,
                                        c.phases[0], c.phases[1])};
}

Result analytic_sqrt_swap() {
  const double J = 0.01, delta = 1.0;
  CMatrix h = coupling_term(CouplingKind::heisenberg, 1, 2, 2, J);
  add_scaled(h, pauli_embed(PauliAxis::x, 1, 2), -delta / 2.0);
  add_scaled(h, pauli_embed(PauliAxis::x, 2, 2), -delta / 2.0);
  const auto u = to_x_eigenbasis(expm_hermitian(h, kPi / (8.0 * J)));
  const auto c = fidelity_local_z_corrected(u, standard_gate(StandardGate::sqrt_swap));
  return {c.fidelity >= 1.0 - 1e-6, fmt("local-corrected F = 1 - %.2e", 1.0 - c.fidelity)};
}

Result analytic_iswap() {
  const double delta = 1.0;
  auto f = [&](double ratio) {
    const double J = ratio * delta;
    const auto u = to_x_eigenbasis(expm_hermitian(resonant_iswap_drift(delta, J), kPi / (2.0 * J)));
    return fidelity_local_z_corrected(u, standard_gate(StandardGate::iswap)).fidelity;
  };
  const double f1 = f(0.001), f2 = f(0.01);
  return {f1 >= 0.999 && f2 >= 0.98, fmt("J/Delta=0.001: F = %.9f (>= 0.999); J/Delta=0.01: F = %.9f (>= 0.98)", f1, f2)};
}

Result gradient_check() {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const StandardGate two_qubit[] = {StandardGate::cnot, StandardGate::cz, StandardGate::iswap,
                                    StandardGate::sqrt_swap};
  double worst = 0.0;
  int instances = 0, dim8 = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const int n = trial % 2 == 0 ? 2 : 3;
    const auto kind = (trial / 2) % 2 == 0 ? CouplingKind::ising : CouplingKind::heisenberg;
    const auto mode = (trial / 4) % 2 == 0 ? ControlMode::fixed_delta : ControlMode::tunable_delta;
    const auto geom = n == 3 && trial % 3 == 0 ? Geometry::triangle : Geometry::chain;
    auto qubits = default_qubits(n);
    const auto model = build_system(qubits, CouplingSpec::for_geometry(geom, n, 0.01 + 0.05 * unit(rng), kind), mode);
    const auto target = n == 3 ? standard_gate(StandardGate::toffoli) : standard_gate(two_qubit[trial % 4]);
    const double duration = 1.0 + 20.0 * unit(rng);
    ControlPulse pulse(duration, 10, model.n_controls());
    for (std::size_t k = 0; k < pulse.n_slices(); ++k) {
      for (std::size_t j = 0; j < model.n_controls(); ++j) {
        const auto& c = model.controls[j];
        pulse.amplitude(k, j) = c.lower + (0.05 + 0.9 * unit(rng)) * (c.upper - c.lower);
      }
    }
    const auto cache = build_cache(model, pulse);
    const auto g = gradient(model, pulse, target, cache);
    const double h = 1e-6;
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ControlPulse p = pulse, m = pulse;
      p.amplitudes()[i] += h;
      m.amplitudes()[i] -= h;
      const double fd = (fidelity(target, evolve(model, p)) - fidelity(target, evolve(model, m))) / (2.0 * h);
      diff = std::max(diff, std::abs(fd - g[i]));
      scale = std::max(scale, std::abs(g[i]));
    }
    worst = std::max(worst, diff / scale);
    ++instances;
    if (n == 3) ++dim8;
  }
  return {worst <= 1e-6, fmt("%d instances (%d at dim 8), max relative error %.2e", instances, dim8, worst)};
}

cli::Outcome run_config(const std::string& name) {
  const auto config = cli::load_config(std::string(QSL_CONFIG_DIR) + "/" + name);
  return cli::run_scenario(config, g_jobs, [&](const std::string& line) {
    std::fprintf(stderr, "  [%s] %s\n", name.c_str(), line.c_str());
  });
}

double metric(const cli::Outcome& o, const std::string& key) {
  const auto it = o.metrics.find(key);
  return it == o.metrics.end() ? std::nan("") : it->second;
}

Result fig2() {
  const auto o = run_config("fig2_sqrt_swap_heisenberg.json");
  const double factor = metric(o, "sine_fit_factor");
  const double dev = metric(o, "max_reference_deviation");
  const bool ok = dev <= 0.03 && std::abs(factor - 1.0) <= 0.03;
  return {ok, fmt("max |F - (5/8 + 3/8 sin 4Jt)| = %.4f (<= 0.03); sine-fit factor %.4f (1.00 +- 0.03)", dev, factor)};
}

Result table1() {
  struct Case {
    const char* file;
    const char* label;
    double lo, hi;
  };
  const Case cases[] = {{"table1_cz_heisenberg.json", "Heisenberg fixed CZ", 0.97, 1.05},
                        {"table1_cnot_ising.json", "Ising fixed CNOT", 1.05, 1.20},
                        {"table1_iswap_ising_tunable.json", "Ising tunable iSWAP", 1.00, 1.10}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto o = run_config(c.file);
    const double f = metric(o, "sine_fit_factor");
    const bool pass = f >= c.lo && f <= c.hi;
    ok = ok && pass;
    detail += fmt("%s%s %.4f in [%.2f, %.2f] %s", detail.empty() ? "" : "; ", c.label, f, c.lo, c.hi,
                  pass ? "ok" : (f > c.hi ? "above" : "below"));
  }
  return {ok, detail};
}

bool g_toffoli = false;

Result toffoli() {
  if (!g_toffoli) return {false, "opt-in; rerun with --toffoli", true};
  const auto o = run_config("toffoli_triangle_ising.json");
  const double f = metric(o, "best_fidelity_triangle");
  return {f >= 0.99, fmt("triangle, Ising, t = 2.09 pi/(4J): best F = %.6f (>= 0.99)", f)};
}

Result chain_analytics() {
  const ChainSpec ising{100, 1.0, CouplingKind::ising};
  const ChainSpec heis{100, 1.0, CouplingKind::heisenberg};
  const double a = t_min_transfer(ising), b = t_min_transfer(heis);
  const double ratio_i = sequential_iswap_time(ising) / a;
  const double ratio_h = sequential_iswap_time(heis) / (2.0 * b);
  const bool ok = a == 50.0 && b == 25.0 && ratio_i == kPi && ratio_h == kPi;
  return {ok, fmt("Ising N=100: %.17g; Heisenberg N=100: %.17g; sequential iSWAP / T_min = %.17g", a, b, ratio_i)};
}

Result chain_simulation() {
  const Wavepacket packet{1.0, kPi / 2, 10.0};
  const auto ri = simulate_transfer({100, 1.0, CouplingKind::ising}, packet);
  const auto rh = simulate_transfer({100, 1.0, CouplingKind::heisenberg}, packet);
  const double qi = ri.arrival_time / ri.t_min_analytic, qh = rh.arrival_time / rh.t_min_analytic;
  // Sample s of the Heisenberg run is at t_s, of the Ising run at 2 t_s.
  double dual = 0.0;
  for (std::size_t s = 0; s < rh.times.size(); ++s) {
    for (std::size_t i = 0; i < 100; ++i) {
      dual = std::max(dual, std::abs(rh.probabilities[s][i] - ri.probabilities[s][i]));
    }
  }
  const bool ok = std::abs(qi - 1.0) <= 0.1 && std::abs(qh - 1.0) <= 0.1 && dual <= 1e-10;
  return {ok, fmt("arrival/T_min: Ising %.4f, Heisenberg %.4f; duality max deviation %.2e", qi, qh, dual)};
}

Result full_space() {
  const ChainSpec spec{8, 1.0, CouplingKind::heisenberg};
  const auto psi0 = wavepacket_amplitudes({1.0, kPi / 2, 1.5}, 8);
  std::vector<double> times;
  for (int i = 0; i <= 80; ++i) times.push_back(8.0 * i / 80.0);
  const auto ff = compare_with_effective(full_space_chain_hamiltonian(spec, 1.0, FullSpaceForm::heisenberg_flip_flop),
                                         effective_hopping_hamiltonian(spec), psi0, times);
  CMatrix h_edge = effective_hopping_hamiltonian(spec);
  h_edge(0, 0) += 2.0;
  h_edge(7, 7) += 2.0;
  const auto xxx = compare_with_effective(full_space_chain_hamiltonian(spec, 1.0, FullSpaceForm::heisenberg_xxx),
                                          h_edge, psi0, times);
  const bool ok = ff.max_state_error <= 1e-8 && ff.max_leakage <= 1e-8;
  return {ok, fmt("flip-flop coupling: state error %.2e, leakage %.2e; full XXX vs effective + 2J end shift: %.2e",
                  ff.max_state_error, ff.max_leakage, xxx.max_state_error)};
}

Result unit_values() {
  const double a = fidelity(standard_gate(StandardGate::sqrt_swap), CMatrix::identity(4));
  const double b = fidelity(standard_gate(StandardGate::cz), CMatrix::identity(4));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t d = i % 2 == 0 ? 4 : 8;
    CMatrix h(d);
    for (std::size_t r = 0; r < d; ++r) {
      h(r, r) = normal(rng);
      for (std::size_t c = r + 1; c < d; ++c) {
        h(r, c) = Complex(normal(rng), normal(rng));
        h(c, r) = std::conj(h(r, c));
      }
    }
    const TargetGate t{"random", expm_hermitian(h, 1.0), d == 4 ? 2 : 3};
    worst = std::max(worst, std::abs(fidelity(t, t.matrix) - 1.0));
  }
  const bool ok = std::abs(a - 0.625) <= 1e-12 && std::abs(b - 0.25) <= 1e-12 && worst <= 1e-12;
  return {ok, fmt("F(sqrt SWAP, I) = %.15f; F(CZ, I) = %.15f; max |F(U,U) - 1| = %.1e", a, b, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_flag("--toffoli", g_toffoli, "Also run the three-qubit Toffoli criterion (hours)");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  g_jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--jobs", g_jobs, "Worker threads for the sweeps");
  CLI11_PARSE(app, argc, argv);

  // Coarse-slice warnings are expected at the scaled-down slice counts.
  set_warning_sink([](std::string_view msg) { std::fprintf(stderr, "  warning: %.*s\n", int(msg.size()), msg.data()); });

  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"analytic CZ", analytic_cz},
      {"analytic sqrt(SWAP)", analytic_sqrt_swap},
      {"analytic iSWAP (rotating wave)", analytic_iswap},
      {"gradient vs finite differences", gradient_check},
      {"sqrt(SWAP) fidelity curve and sine fit", fig2},
      {"two-qubit speed-limit spot checks", table1},
      {"Toffoli on an Ising triangle", toffoli},
      {"spin-chain transfer times", chain_analytics},
      {"spin-chain wavepacket arrival", chain_simulation},
      {"full-space cross-check N=8", full_space},
      {"fidelity unit values", unit_values},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    if (!r.skipped && !r.pass) ++failed;
    std::printf("criterion %2d %s: %s | %s (%.1f s)\n", id, tag, criteria[i].first, r.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("acceptance: %d failed\n", failed);
  return failed == 0 ? 0 : 1;
}

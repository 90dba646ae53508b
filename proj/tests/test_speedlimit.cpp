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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qsl/log.hpp"
#include "qsl/model.hpp"
#include "qsl/speedlimit.hpp"

using namespace qsl;

namespace {

FidelityCurve make_curve(const std::vector<std::pair<double, double>>& pts, double f0 = 0.0) {
  FidelityCurve c;
  c.zero_time_fidelity = f0;
  for (const auto& [t, f] : pts) c.points.push_back({t, f, {}});
  return c;
}

FidelityCurve synthetic(double f0, double t_min, std::size_t n, double lo, double hi) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_min * (lo + (hi - lo) * i / (n - 1));
    pts.emplace_back(t, sine_model(t, f0, t_min));
  }
  return make_curve(pts, f0);
}

struct Quiet {
  Quiet() { set_warning_sink([](std::string_view) {}); }
  ~Quiet() { set_warning_sink({}); }
};

}  // namespace

TEST_CASE("threshold crossing interpolates linearly") {
  const auto e = threshold_crossing(make_curve({{1.0, 0.9}, {2.0, 0.99}}), 0.98);
  CHECK(e.status == EstimateStatus::ok);
  CHECK(e.t_min == doctest::Approx(1.0 + 0.08 / 0.09).epsilon(1e-15));
  CHECK(e.threshold_value == 0.98);
}

TEST_CASE("threshold crossing boundary outcomes") {
  const auto above = threshold_crossing(make_curve({{1.0, 0.99}, {2.0, 0.999}}), 0.98);
  CHECK(above.status == EstimateStatus::left_censored);
  CHECK(above.t_min == 1.0);
  const auto below = threshold_crossing(make_curve({{1.0, 0.5}, {2.0, 0.9}}), 0.98);
  CHECK(below.status == EstimateStatus::not_bracketed);
  CHECK(std::isnan(below.t_min));
  CHECK_THROWS_AS(threshold_crossing(make_curve({{1.0, 0.5}}), 1.0), std::invalid_argument);
}

TEST_CASE("threshold crossing time grows with the threshold") {
  const auto c = synthetic(0.5, 10.0, 12, 0.1, 1.1);
  double last = 0.0;
  for (double th = 0.6; th < 0.999; th += 0.01) {
    const auto e = threshold_crossing(c, th);
    REQUIRE(e.status != EstimateStatus::not_bracketed);
    CHECK(e.t_min >= last);
    last = e.t_min;
  }
}

TEST_CASE("sine fit recovers its own model exactly") {
  const double J = 0.01;
  const double t_min = kPi / (8.0 * J);
  const auto e = fit_sine(synthetic(0.625, t_min, 10, 0.1, 1.0));
  CHECK(e.method == EstimateMethod::sine_fit);
  CHECK(std::abs(e.t_min - t_min) <= 1e-10 * t_min);
  CHECK(e.fit_rmse <= 1e-12);
  CHECK(e.fit_f0 == 0.625);
  CHECK(e.n_fit_points == 8);  // 0.9 and 1.0 lie above the saturation cutoff
}

TEST_CASE("sine fit is invariant under rescaling time") {
  const double J = 0.01;
  const double ref = kPi / (4.0 * J);
  std::vector<std::pair<double, double>> raw, scaled;
  std::mt19937_64 rng(16);
  std::normal_distribution<double> noise(0.0, 0.005);
  for (int i = 1; i <= 10; ++i) {
    const double t = 0.1 * i * ref;
    const double f = std::min(1.0, sine_model(t, 0.5, 1.1 * ref) + noise(rng));
    raw.emplace_back(t, f);
    scaled.emplace_back(t / ref, f);
  }
  const auto a = fit_sine(make_curve(raw, 0.5));
  const auto b = fit_sine(make_curve(scaled, 0.5));
  CHECK(a.t_min / ref == doctest::Approx(b.t_min).epsilon(1e-10));
}

TEST_CASE("sine fit tolerates optimizer noise") {
  // 20 grid points; with 10 the statistical floor is about 2.1 sigma.
  const double t_min = 40.0, sigma = 0.01;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, sigma);
  double sq = 0.0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 1; i <= 20; ++i) {
      const double t = 0.05 * i * t_min;
      pts.emplace_back(t, std::min(1.0, sine_model(t, 0.625, t_min) + noise(rng)));
    }
    const double err = fit_sine(make_curve(pts, 0.625)).t_min - t_min;
    sq += err * err;
  }
  CHECK(std::sqrt(sq / trials) <= 2.0 * sigma * t_min);
}

TEST_CASE("sine fit needs unsaturated points") {
  CHECK_THROWS_AS(fit_sine(make_curve({{1, 0.6}, {2, 0.8}, {3, 0.999}, {4, 1.0}}, 0.5)), InsufficientDataError);
}

TEST_CASE("reference times") {
  const double J = 0.01;
  CHECK(reference_gate_time(StandardGate::cz, CouplingKind::heisenberg, J) == doctest::Approx(kPi / (4 * J)));
  CHECK(reference_gate_time(StandardGate::cnot, CouplingKind::ising, J) == doctest::Approx(kPi / (4 * J)));
  CHECK(reference_gate_time(StandardGate::iswap, CouplingKind::ising, J) == doctest::Approx(kPi / (2 * J)));
  CHECK(reference_gate_time(StandardGate::sqrt_swap, CouplingKind::heisenberg, J) == doctest::Approx(kPi / (8 * J)));
  CHECK_THROWS_AS(reference_gate_time(StandardGate::cz, CouplingKind::ising, 0.0), std::invalid_argument);
  for (auto k : {CouplingKind::ising, CouplingKind::heisenberg})
    CHECK(toffoli_time_factor(Geometry::triangle, k) < toffoli_time_factor(Geometry::chain, k));
}

TEST_CASE("default grid") {
  const auto g = default_t_grid(10.0, 12, 0.1, 1.05);
  REQUIRE(g.size() == 12);
  CHECK(g.front() == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(10.5));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("uncoupled qubits cannot entangle") {
  Quiet quiet;
  const auto m = build_system(default_qubits(2), CouplingSpec{}, ControlMode::fixed_delta);
  const auto t = standard_gate(StandardGate::cz);
  OptimizerConfig c;
  c.n_slices = 20;
  c.n_restarts = 2;
  c.max_iterations = 60;
  const auto curve = sweep(m, t, {5.0, 20.0, 80.0}, c);
  const double bound = local_fidelity_bound(t);
  CHECK(curve.zero_time_fidelity == doctest::Approx(bound));
  for (const auto& p : curve.points) CHECK(p.fidelity <= bound + 1e-9);
}

TEST_CASE("sweep results do not depend on the worker count") {
  Quiet quiet;
  std::vector<QubitParams> q(2);
  q[1].delta = 0.9;
  const auto m = build_system(q, CouplingSpec::chain(2, 0.05, CouplingKind::heisenberg), ControlMode::fixed_delta);
  OptimizerConfig c;
  c.n_slices = 20;
  c.n_restarts = 3;
  c.max_iterations = 20;
  c.seed = 11;
  std::size_t calls = 0;
  const auto a = sweep(m, standard_gate(StandardGate::sqrt_swap), {2.0, 4.0}, c, 1,
                       [&](std::size_t, std::size_t total) {
                         ++calls;
                         CHECK(total == 6);
                       });
  const auto b = sweep(m, standard_gate(StandardGate::sqrt_swap), {2.0, 4.0}, c, 3);
  CHECK(calls == 6);
  REQUIRE(a.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.points[i].fidelity == b.points[i].fidelity);
    CHECK(a.points[i].report.best_pulse == b.points[i].report.best_pulse);
  }
  CHECK(point_seed(11, 0) != point_seed(11, 1));
  CHECK_THROWS_AS(sweep(m, standard_gate(StandardGate::cz), {2.0, 1.0}, c), std::invalid_argument);
  CHECK_THROWS_AS(sweep(m, standard_gate(StandardGate::cz), {0.0, 1.0}, c), std::invalid_argument);
}

TEST_CASE("curve CSV and estimate JSON") {
  auto c = make_curve({{1.0, 0.5}, {2.0, 2.0 / 3.0}});
  std::ostringstream os;
  write_curve_csv(os, c, 4.0, "t_over_ref");
  CHECK(os.str() == "t,t_over_ref,fidelity,restarts,iterations\n1,0.25,0.5,0,0\n2,0.5,0.666666666667,0,0\n");

  const auto ok = threshold_crossing(make_curve({{1.0, 0.9}, {2.0, 0.99}}), 0.98);
  const auto j = to_json(ok, 2.0);
  CHECK(j.at("method") == "threshold");
  CHECK(j.at("status") == "ok");
  CHECK(j.at("normalized_factor").get<double>() == doctest::Approx(ok.t_min / 2.0));
  const auto nb = to_json(threshold_crossing(make_curve({{1.0, 0.5}}), 0.98), 2.0);
  CHECK(nb.at("t_min").is_null());
  CHECK(nb.at("status") == "not_bracketed");
}

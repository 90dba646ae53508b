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

#include "qsl/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qsl/linalg.hpp"
#include "qsl/propagator.hpp"
#include "qsl/speedlimit.hpp"

namespace qsl::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Strict JSON object reading

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where(key) + ": must be finite");
    return x;
  }

  double positive(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x > 0.0)) throw ConfigError(where(key) + ": must be > 0");
    return x;
  }

  std::uint64_t count(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(where(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  /// Throws on any key that was never read.
  void finish(const std::string& hint = "") const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError(where(k) + ": unknown key" + hint);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class E>
E parse_enum(const std::string& where, const std::string& value,
             std::initializer_list<std::pair<const char*, E>> options) {
  std::string allowed;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(where + ": '" + value + "' is not one of " + allowed);
}

CouplingKind parse_coupling(const std::string& where, const std::string& v) {
  return parse_enum<CouplingKind>(where, v, {{"ising", CouplingKind::ising}, {"heisenberg", CouplingKind::heisenberg}});
}

Geometry parse_geometry(const std::string& where, const std::string& v) {
  return parse_enum<Geometry>(where, v, {{"chain", Geometry::chain}, {"triangle", Geometry::triangle}});
}

std::string tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void check_increasing(const std::string& where, const std::vector<double>& v) {
  if (v.empty()) throw ConfigError(where + ": must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw ConfigError(where + ": values must be > 0");
    if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(where + ": values must be strictly increasing");
  }
}

SystemConfig parse_system(ObjectReader& top, int default_qubits_count) {
  SystemConfig s;
  s.n_qubits = default_qubits_count;
  if (!top.has("system")) return s;
  ObjectReader r(top.at("system"), "system");
  s.n_qubits = static_cast<int>(r.count("n_qubits", static_cast<std::uint64_t>(s.n_qubits)));
  if (s.n_qubits < 2 || s.n_qubits > 3) throw ConfigError("system.n_qubits: must be 2 or 3");
  s.coupling = parse_coupling("system.coupling", r.string("coupling", "ising"));
  s.geometry = parse_geometry("system.geometry", r.string("geometry", "chain"));
  s.mode = parse_enum<ControlMode>("system.mode", r.string("mode", "fixed_delta"),
                                   {{"fixed_delta", ControlMode::fixed_delta},
                                    {"tunable_delta", ControlMode::tunable_delta}});
  s.J = r.positive("J", s.J);
  s.deltas = r.numbers("deltas", {});
  if (!s.deltas.empty() && s.deltas.size() != static_cast<std::size_t>(s.n_qubits)) {
    throw ConfigError("system.deltas: need one value per qubit");
  }
  for (double d : s.deltas)
    if (!(d > 0.0)) throw ConfigError("system.deltas: values must be > 0");
  s.epsilon_bound = r.positive("epsilon_bound", s.epsilon_bound);
  s.delta_bound = r.positive("delta_bound", s.delta_bound);
  r.finish();
  if (s.geometry == Geometry::triangle && s.n_qubits != 3) {
    throw ConfigError("system.geometry: triangle needs n_qubits = 3");
  }
  return s;
}

OptimizerConfig parse_optimizer(ObjectReader& top, OptimizerConfig o) {
  if (!top.has("optimizer")) return o;
  ObjectReader r(top.at("optimizer"), "optimizer");
  o.n_slices = r.count("n_slices", o.n_slices);
  o.max_iterations = r.count("max_iterations", o.max_iterations);
  o.n_restarts = r.count("n_restarts", o.n_restarts);
  o.step_rule = parse_enum<StepRule>("optimizer.step_rule", r.string("step_rule", to_string(o.step_rule)),
                                     {{"gradient_ascent", StepRule::gradient_ascent}, {"lbfgs", StepRule::lbfgs}});
  o.convergence_tol = r.number("convergence_tol", o.convergence_tol);
  o.convergence_window = r.count("convergence_window", o.convergence_window);
  o.init_fraction = r.number("init_fraction", o.init_fraction);
  o.step_growth = r.number("step_growth", o.step_growth);
  o.lbfgs_memory = r.count("lbfgs_memory", o.lbfgs_memory);
  r.finish();
  if (o.n_slices == 0) throw ConfigError("optimizer.n_slices: must be > 0");
  if (o.n_restarts == 0) throw ConfigError("optimizer.n_restarts: must be > 0");
  if (o.convergence_window == 0) throw ConfigError("optimizer.convergence_window: must be > 0");
  if (!(o.convergence_tol >= 0.0)) throw ConfigError("optimizer.convergence_tol: must be >= 0");
  if (!(o.init_fraction >= 0.0 && o.init_fraction <= 1.0)) {
    throw ConfigError("optimizer.init_fraction: must lie in [0, 1]");
  }
  if (!(o.step_growth >= 1.0)) throw ConfigError("optimizer.step_growth: must be >= 1");
  if (o.step_rule == StepRule::lbfgs && o.lbfgs_memory == 0) {
    throw ConfigError("optimizer.lbfgs_memory: must be > 0");
  }
  return o;
}

std::vector<double> parse_grid(ObjectReader& top, const ExperimentConfig& c) {
  double lo = 0.1, hi = 1.05;
  std::size_t n = 12;
  if (c.gate == StandardGate::toffoli) {
    const double f = toffoli_time_factor(c.system.geometry, c.system.coupling);
    lo = 0.1 * f;
    hi = 1.5 * f;
  }
  if (top.has("grid")) {
    ObjectReader r(top.at("grid"), "grid");
    if (r.has("factors")) {
      if (r.has("lo") || r.has("hi") || r.has("n")) throw ConfigError("grid: give either factors or lo/hi/n");
      auto f = r.numbers("factors", {});
      check_increasing("grid.factors", f);
      r.finish();
      return f;
    }
    lo = r.positive("lo", lo);
    hi = r.positive("hi", hi);
    n = r.count("n", n);
    r.finish();
  }
  if (n == 0) throw ConfigError("grid.n: must be > 0");
  if (n > 1 && !(hi > lo)) throw ConfigError("grid: hi must exceed lo");
  return default_t_grid(1.0, n, lo, hi);
}

EstimateConfig parse_estimate(ObjectReader& top) {
  EstimateConfig e;
  if (!top.has("estimate")) return e;
  ObjectReader r(top.at("estimate"), "estimate");
  e.thresholds = r.numbers("thresholds", e.thresholds);
  for (double t : e.thresholds)
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("estimate.thresholds: values must lie in (0, 1)");
  e.sine_fit = r.boolean("sine_fit", e.sine_fit);
  r.finish();
  return e;
}

AnalyticConfig parse_analytic(ObjectReader& top) {
  AnalyticConfig a;
  if (!top.has("analytic")) return a;
  ObjectReader r(top.at("analytic"), "analytic");
  a.J = r.positive("J", a.J);
  a.delta = r.positive("delta", a.delta);
  a.iswap_ratios = r.numbers("iswap_ratios", a.iswap_ratios);
  for (double x : a.iswap_ratios)
    if (!(x > 0.0)) throw ConfigError("analytic.iswap_ratios: values must be > 0");
  r.finish();
  return a;
}

ToffoliConfig parse_toffoli(ObjectReader& top) {
  ToffoliConfig t;
  if (!top.has("toffoli")) return t;
  ObjectReader r(top.at("toffoli"), "toffoli");
  t.time_factor = r.positive("time_factor", t.time_factor);
  if (r.has("geometries")) {
    const json& g = r.at("geometries");
    if (!g.is_array() || g.empty()) throw ConfigError("toffoli.geometries: expected a non-empty array");
    t.geometries.clear();
    for (const auto& x : g) {
      if (!x.is_string()) throw ConfigError("toffoli.geometries: expected strings");
      const auto geom = parse_geometry("toffoli.geometries", x.get<std::string>());
      if (std::find(t.geometries.begin(), t.geometries.end(), geom) != t.geometries.end()) {
        throw ConfigError("toffoli.geometries: duplicate entry");
      }
      t.geometries.push_back(geom);
    }
  }
  r.finish();
  return t;
}

TransferConfig parse_transfer(ObjectReader& top) {
  TransferConfig t;
  if (!top.has("chain")) return t;
  ObjectReader r(top.at("chain"), "chain");
  t.chain.n_sites = r.count("n_sites", t.chain.n_sites);
  t.chain.J = r.positive("J", t.chain.J);
  t.chain.coupling = parse_coupling("chain.coupling", r.string("coupling", "ising"));
  if (r.has("packet")) {
    ObjectReader p(r.at("packet"), "chain.packet");
    t.packet.center_site = p.number("center_site", t.packet.center_site);
    t.packet.center_momentum = p.number("momentum", t.packet.center_momentum);
    t.packet.width = p.positive("width", t.packet.width);
    p.finish();
  }
  t.n_samples = r.count("n_samples", t.n_samples);
  t.probability_threshold = r.positive("probability_threshold", t.probability_threshold);
  r.finish();
  if (t.chain.n_sites < 2 || t.chain.n_sites > kMaxEffectiveSites) {
    throw ConfigError("chain.n_sites: must lie in [2, " + std::to_string(kMaxEffectiveSites) + "]");
  }
  if (t.n_samples < 2) throw ConfigError("chain.n_samples: must be >= 2");
  try {
    (void)wavepacket_amplitudes(t.packet, t.chain.n_sites);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("chain.packet: ") + e.what());
  }
  return t;
}

std::map<std::string, Bound> parse_acceptance(const json& j) {
  if (!j.is_object()) throw ConfigError("acceptance: expected an object of {min, max} bounds");
  std::map<std::string, Bound> out;
  for (const auto& [name, v] : j.items()) {
    ObjectReader r(v, "acceptance." + name);
    Bound b;
    if (r.has("min")) b.min = r.number("min", 0.0);
    if (r.has("max")) b.max = r.number("max", 0.0);
    r.finish();
    if (!b.min && !b.max) throw ConfigError("acceptance." + name + ": needs min or max");
    if (b.min && b.max && *b.min > *b.max) throw ConfigError("acceptance." + name + ": min exceeds max");
    out[name] = b;
  }
  return out;
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::speedlimit_sweep: return "speedlimit_sweep";
    case Scenario::analytic_checks: return "analytic_checks";
    case Scenario::toffoli: return "toffoli";
    case Scenario::transfer: return "transfer";
  }
  return "?";
}

std::vector<std::string> scenario_names() {
  return {"speedlimit_sweep", "analytic_checks", "toffoli", "transfer"};
}

ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed_override) {
  ExperimentConfig c;
  c.raw = j;
  ObjectReader top(j, "");
  if (!top.has("scenario")) throw ConfigError("scenario: required");
  c.scenario = parse_enum<Scenario>("scenario", top.string("scenario", ""),
                                    {{"speedlimit_sweep", Scenario::speedlimit_sweep},
                                     {"analytic_checks", Scenario::analytic_checks},
                                     {"toffoli", Scenario::toffoli},
                                     {"transfer", Scenario::transfer}});
  c.seed = top.count("seed", 0);
  if (seed_override) c.seed = *seed_override;
  c.output_dir = top.string("output_dir", c.output_dir);
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  if (top.has("acceptance")) c.acceptance = parse_acceptance(top.at("acceptance"));

  switch (c.scenario) {
    case Scenario::speedlimit_sweep: {
      c.system = parse_system(top, 2);
      const std::string gate = top.string("gate", "");
      if (gate.empty()) throw ConfigError("gate: required for speedlimit_sweep");
      try {
        c.gate = parse_gate_name(gate);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("gate: ") + e.what());
      }
      if (standard_gate(c.gate).n_qubits != c.system.n_qubits) {
        throw ConfigError("gate: " + gate + " does not act on " + std::to_string(c.system.n_qubits) + " qubits");
      }
      OptimizerConfig o;
      o.n_slices = c.system.n_qubits == 3 ? 2000 : 500;
      c.optimizer = parse_optimizer(top, o);
      c.grid_factors = parse_grid(top, c);
      c.estimate = parse_estimate(top);
      break;
    }
    case Scenario::analytic_checks:
      c.analytic = parse_analytic(top);
      break;
    case Scenario::toffoli: {
      c.system = parse_system(top, 3);
      if (c.system.n_qubits != 3) throw ConfigError("system.n_qubits: toffoli needs 3 qubits");
      c.gate = StandardGate::toffoli;
      OptimizerConfig o;
      o.n_slices = 2000;
      o.max_iterations = 5000;
      c.optimizer = parse_optimizer(top, o);
      c.toffoli = parse_toffoli(top);
      break;
    }
    case Scenario::transfer:
      c.transfer = parse_transfer(top);
      break;
  }
  top.finish(std::string(" for scenario ") + to_string(c.scenario));
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j, seed_override);
}

SystemModel build_model(const SystemConfig& s) {
  auto qubits = default_qubits(s.n_qubits);
  for (int i = 0; i < s.n_qubits; ++i) {
    if (!s.deltas.empty()) qubits[i].delta = s.deltas[i];
    qubits[i].epsilon_bound = s.epsilon_bound;
    qubits[i].delta_bound = s.delta_bound;
  }
  return build_system(qubits, CouplingSpec::for_geometry(s.geometry, s.n_qubits, s.J, s.coupling), s.mode);
}

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string normalization_label(StandardGate gate, CouplingKind coupling) {
  switch (gate) {
    case StandardGate::iswap: return "2Jt_over_pi";
    case StandardGate::sqrt_swap: return coupling == CouplingKind::heisenberg ? "8Jt_over_pi" : "8Jt_over_3pi";
    default: return "4Jt_over_pi";
  }
}

json system_json(const SystemConfig& s, const SystemModel& m) {
  std::vector<double> deltas = s.deltas;
  if (deltas.empty())
    for (const auto& q : default_qubits(s.n_qubits)) deltas.push_back(q.delta);
  return {{"n_qubits", s.n_qubits},
          {"deltas", deltas},
          {"coupling", to_string(s.coupling)},
          {"geometry", to_string(s.geometry)},
          {"mode", to_string(s.mode)},
          {"J", s.J},
          {"epsilon_bound", s.epsilon_bound},
          {"delta_bound", s.delta_bound},
          {"coupling_ratio", m.coupling_ratio},
          {"weak_coupling", m.weak_coupling}};
}

std::vector<std::string> control_labels(const SystemModel& m) {
  std::vector<std::string> labels;
  for (const auto& c : m.controls) labels.push_back(c.label);
  return labels;
}

SweepProgress sweep_progress(const ProgressSink& sink, const std::string& what) {
  if (!sink) return {};
  return [sink, what](std::size_t done, std::size_t total) {
    sink(what + ": " + std::to_string(done) + "/" + std::to_string(total) + " optimizations done");
  };
}

Outcome run_speedlimit(const ExperimentConfig& c, std::size_t jobs, const ProgressSink& progress) {
  const auto model = build_model(c.system);
  const auto target = standard_gate(c.gate);
  const double ref = reference_gate_time(c.gate, c.system.coupling, c.system.J);
  std::vector<double> times;
  for (double f : c.grid_factors) times.push_back(f * ref);
  OptimizerConfig oc = c.optimizer;
  oc.seed = c.seed;

  auto curve = sweep(model, target, times, oc, jobs, sweep_progress(progress, "sweep"));
  curve.model_tag = std::string(to_string(c.system.coupling)) + "/" + to_string(c.system.mode);

  Outcome out;
  const std::string label = normalization_label(c.gate, c.system.coupling);
  json estimates = json::array();
  for (double th : c.estimate.thresholds) {
    const auto e = threshold_crossing(curve, th);
    estimates.push_back(to_json(e, ref));
    if (std::isfinite(e.t_min) && e.status == EstimateStatus::ok) {
      out.metrics["threshold_factor_" + tag(th)] = e.t_min / ref;
    }
  }
  if (c.estimate.sine_fit) {
    try {
      const auto e = fit_sine(curve);
      estimates.push_back(to_json(e, ref));
      out.metrics["sine_fit_factor"] = e.t_min / ref;
      out.metrics["sine_fit_rmse"] = e.fit_rmse;
    } catch (const InsufficientDataError& e) {
      estimates.push_back({{"method", "sine_fit"}, {"status", "insufficient_data"}, {"message", e.what()}});
    }
  }

  double max_dev = 0.0, max_f = 0.0;
  json points = json::array();
  for (const auto& p : curve.points) {
    const double model_f = sine_model(p.t, curve.zero_time_fidelity, ref);
    max_dev = std::max(max_dev, std::abs(p.fidelity - model_f));
    max_f = std::max(max_f, p.fidelity);
    points.push_back({{"t", p.t},
                      {label, p.t / ref},
                      {"fidelity", p.fidelity},
                      {"reference_curve", model_f},
                      {"report", to_json(p.report)}});
  }
  out.metrics["max_reference_deviation"] = max_dev;
  out.metrics["max_fidelity"] = max_f;
  out.metrics["zero_time_fidelity"] = curve.zero_time_fidelity;

  std::ostringstream csv;
  write_curve_csv(csv, curve, ref, label);
  out.artifacts.push_back({"curve.csv", csv.str()});
  json est = {{"gate", to_string(c.gate)},
              {"system", system_json(c.system, model)},
              {"optimizer", to_json(oc)},
              {"reference_time", ref},
              {"normalization", label},
              {"zero_time_fidelity", curve.zero_time_fidelity},
              {"estimates", estimates},
              {"metrics", out.metrics}};
  out.artifacts.push_back({"estimate.json", dump(est)});
  out.artifacts.push_back({"points.json", dump(points)});

  std::ostringstream s;
  s << to_string(c.gate) << " " << curve.points.size() << " points";
  if (out.metrics.count("sine_fit_factor")) {
    s << ", sine-fit factor " << std::setprecision(4) << out.metrics["sine_fit_factor"];
  }
  out.summary = s.str();
  return out;
}

Outcome run_analytic(const ExperimentConfig& c) {
  const auto& a = c.analytic;
  Outcome out;
  json checks = json::array();
  auto record = [&](const std::string& name, double value, json extra) {
    out.metrics[name] = value;
    extra["name"] = name;
    extra["value"] = value;
    checks.push_back(std::move(extra));
  };

  {
    const auto target = standard_gate(StandardGate::cz);
    const double t = kPi / (4.0 * a.J);
    const auto corr = fidelity_local_z_corrected(expm_hermitian(cz_drift(0.0, 0.0, a.J), t), target);
    record("cz_fidelity", corr.fidelity, {{"t", t}, {"phases", corr.phases}});
  }
  {
    const auto target = standard_gate(StandardGate::sqrt_swap);
    const double t = kPi / (8.0 * a.J);
    CMatrix h = coupling_term(CouplingKind::heisenberg, 1, 2, 2, a.J);
    add_scaled(h, pauli_embed(PauliAxis::x, 1, 2), -a.delta / 2.0);
    add_scaled(h, pauli_embed(PauliAxis::x, 2, 2), -a.delta / 2.0);
    const auto corr = fidelity_local_z_corrected(to_x_eigenbasis(expm_hermitian(h, t)), target);
    record("sqrt_swap_fidelity", corr.fidelity, {{"t", t}, {"phases", corr.phases}});
  }
  for (double ratio : a.iswap_ratios) {
    const auto target = standard_gate(StandardGate::iswap);
    const double j = ratio * a.delta;
    const double t = kPi / (2.0 * j);
    const auto corr = fidelity_local_z_corrected(to_x_eigenbasis(expm_hermitian(resonant_iswap_drift(a.delta, j), t)),
                                                 target);
    record("iswap_fidelity_ratio_" + tag(ratio), corr.fidelity,
           {{"t", t}, {"J_over_delta", ratio}, {"phases", corr.phases}});
  }
  {
    const RotationSpec spec{kPi / 2, kPi / 4, kPi / 3};
    const double bound = 20.0 * a.delta;
    const auto model = build_system({QubitParams{a.delta, 0.0, bound, 2.0}}, CouplingSpec{}, ControlMode::fixed_delta);
    const auto pulse = single_qubit_recipe(spec, a.delta, bound);
    const auto u = evolve(model, pulse);
    const double f = trace_fidelity(rotation_unitary(spec), u);
    record("recipe_infidelity", 1.0 - f,
           {{"beta", spec.beta}, {"theta", spec.theta}, {"phi", spec.phi}, {"eps_bound", bound},
            {"duration", pulse.duration()}});
  }
  record("identity_fidelity_sqrt_swap",
         fidelity(standard_gate(StandardGate::sqrt_swap), CMatrix::identity(4)), json::object());
  record("identity_fidelity_cz", fidelity(standard_gate(StandardGate::cz), CMatrix::identity(4)), json::object());

  out.artifacts.push_back({"analytic.json", dump({{"J", a.J}, {"delta", a.delta}, {"checks", checks}})});
  out.summary = std::to_string(checks.size()) + " analytic checks";
  return out;
}

Outcome run_toffoli(const ExperimentConfig& c, std::size_t jobs, const ProgressSink& progress) {
  const auto target = standard_gate(StandardGate::toffoli);
  const double t = c.toffoli.time_factor * reference_gate_time(StandardGate::toffoli, c.system.coupling, c.system.J);
  OptimizerConfig oc = c.optimizer;
  oc.seed = c.seed;
  Outcome out;
  json runs = json::array();
  std::map<Geometry, double> best;
  for (Geometry g : c.toffoli.geometries) {
    SystemConfig s = c.system;
    s.geometry = g;
    const auto model = build_model(s);
    auto curve = sweep(model, target, {t}, oc, jobs, sweep_progress(progress, std::string("toffoli ") + to_string(g)));
    const auto& rep = curve.points.front().report;
    best[g] = rep.best_fidelity;
    out.metrics[std::string("best_fidelity_") + to_string(g)] = rep.best_fidelity;
    runs.push_back({{"geometry", to_string(g)}, {"system", system_json(s, model)}, {"report", to_json(rep)}});
    std::ostringstream csv;
    write_pulse_csv(csv, rep.best_pulse, control_labels(model));
    out.artifacts.push_back({std::string("pulse_") + to_string(g) + ".csv", csv.str()});
  }
  if (best.count(Geometry::chain) && best.count(Geometry::triangle)) {
    out.metrics["triangle_minus_chain"] = best[Geometry::triangle] - best[Geometry::chain];
  }
  out.artifacts.push_back({"toffoli.json", dump({{"time", t},
                                                  {"time_factor", c.toffoli.time_factor},
                                                  {"optimizer", to_json(oc)},
                                                  {"runs", runs},
                                                  {"metrics", out.metrics}})});
  std::ostringstream s;
  s << "toffoli at " << c.toffoli.time_factor << " x pi/(4J)";
  for (const auto& [g, f] : best) s << ", " << to_string(g) << " F=" << std::setprecision(6) << f;
  out.summary = s.str();
  return out;
}

Outcome run_transfer(const ExperimentConfig& c, const ProgressSink& progress) {
  const auto& t = c.transfer;
  if (progress) progress("transfer: evolving " + std::to_string(t.chain.n_sites) + "-site chain");
  TransferOptions opts;
  opts.n_samples = t.n_samples;
  const auto r = simulate_transfer(t.chain, t.packet, opts);
  Outcome out;
  std::ostringstream csv;
  write_trajectory_csv(csv, r, t.probability_threshold);
  out.artifacts.push_back({"trajectory.csv", csv.str()});
  auto summary = transfer_summary(t.chain, r);
  summary["packet"] = {{"center_site", t.packet.center_site},
                       {"momentum", t.packet.center_momentum},
                       {"width", t.packet.width}};
  out.artifacts.push_back({"summary.json", dump(summary)});
  out.metrics["arrival_ratio"] = r.arrival_time / r.t_min_analytic;
  out.metrics["arrival_fidelity"] = r.arrival_fidelity;
  std::ostringstream s;
  s << "arrival " << r.arrival_time << " vs t_min " << r.t_min_analytic;
  out.summary = s.str();
  return out;
}

}  // namespace

Outcome run_scenario(const ExperimentConfig& c, std::size_t jobs, const ProgressSink& progress) {
  switch (c.scenario) {
    case Scenario::speedlimit_sweep: return run_speedlimit(c, jobs, progress);
    case Scenario::analytic_checks: return run_analytic(c);
    case Scenario::toffoli: return run_toffoli(c, jobs, progress);
    case Scenario::transfer: return run_transfer(c, progress);
  }
  throw std::logic_error("unhandled scenario");
}

std::map<std::string, Bound> acceptance_bounds(const ExperimentConfig& c) {
  if (c.acceptance) return *c.acceptance;
  std::map<std::string, Bound> b;
  switch (c.scenario) {
    case Scenario::speedlimit_sweep: {
      const auto& s = c.system;
      const bool heis = s.coupling == CouplingKind::heisenberg;
      const bool fixed = s.mode == ControlMode::fixed_delta;
      if (heis && fixed && c.gate == StandardGate::sqrt_swap) {
        b["sine_fit_factor"] = {0.97, 1.03};
        b["max_reference_deviation"] = {std::nullopt, 0.03};
      } else if (heis && fixed && c.gate == StandardGate::cz) {
        b["sine_fit_factor"] = {0.97, 1.05};
      } else if (!heis && fixed && c.gate == StandardGate::cnot) {
        b["sine_fit_factor"] = {1.05, 1.20};
      } else if (!heis && !fixed && c.gate == StandardGate::iswap) {
        b["sine_fit_factor"] = {1.00, 1.10};
      }
      break;
    }
    case Scenario::analytic_checks:
      b["cz_fidelity"] = {1.0 - 1e-9, std::nullopt};
      b["sqrt_swap_fidelity"] = {1.0 - 1e-6, std::nullopt};
      for (double r : c.analytic.iswap_ratios) {
        if (r == 0.001) b["iswap_fidelity_ratio_" + tag(r)] = {0.999, std::nullopt};
        if (r == 0.01) b["iswap_fidelity_ratio_" + tag(r)] = {0.98, std::nullopt};
      }
      b["identity_fidelity_sqrt_swap"] = {0.625 - 1e-12, 0.625 + 1e-12};
      b["identity_fidelity_cz"] = {0.25 - 1e-12, 0.25 + 1e-12};
      break;
    case Scenario::toffoli:
      for (Geometry g : c.toffoli.geometries) {
        if (g == Geometry::triangle && c.system.coupling == CouplingKind::ising) {
          b["best_fidelity_triangle"] = {0.99, std::nullopt};
        }
      }
      if (c.toffoli.geometries.size() == 2) b["triangle_minus_chain"] = {0.0, std::nullopt};
      break;
    case Scenario::transfer:
      b["arrival_ratio"] = {0.9, 1.1};
      break;
  }
  return b;
}

Verdict evaluate(const std::map<std::string, Bound>& bounds, const std::map<std::string, double>& metrics) {
  Verdict v;
  v.report = json::array();
  for (const auto& [name, b] : bounds) {
    json entry = {{"metric", name}};
    if (b.min) entry["min"] = *b.min;
    if (b.max) entry["max"] = *b.max;
    bool ok = false;
    const auto it = metrics.find(name);
    if (it == metrics.end()) {
      entry["value"] = nullptr;
      entry["note"] = "metric not produced";
    } else {
      const double x = it->second;
      entry["value"] = x;
      ok = std::isfinite(x) && (!b.min || x >= *b.min) && (!b.max || x <= *b.max);
    }
    entry["pass"] = ok;
    if (!ok) {
      v.passed = false;
      v.failed.push_back(name);
    }
    v.report.push_back(entry);
  }
  return v;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

void write_outputs(const std::string& dir, const ExperimentConfig& c, const std::vector<Artifact>& artifacts) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json files = json::array();
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
  };
  for (const auto& a : artifacts) {
    write(a.name, a.content);
    files.push_back({{"path", a.name}, {"bytes", a.content.size()}, {"sha256", sha256_hex(a.content)}});
  }
  json manifest = {{"scenario", to_string(c.scenario)}, {"seed", c.seed}, {"config", c.raw}, {"files", files}};
  write("manifest.json", dump(manifest));
}

namespace {

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("QSL_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const char* end = s + std::char_traits<char>::length(s);
  const auto [ptr, ec] = std::from_chars(s, end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(std::string("QSL_SEED: not an unsigned integer: ") + s);
  return v;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speed limits for quantum gates and spin-chain state transfer"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  auto* check = app.add_subcommand("check", "Run a scenario and compare it against its acceptance bounds");
  for (auto* sub : {run, check}) {
    sub->add_option("config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  }
  auto* list = app.add_subcommand("list-scenarios", "Print the known scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list->parsed()) {
    for (const auto& name : scenario_names()) out << name << "\n";
    return kExitOk;
  }

  const bool checking = check->parsed();
  ExperimentConfig config;
  std::map<std::string, Bound> bounds;
  try {
    config = load_config(config_path, seed_from_env());
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (checking) {
      bounds = acceptance_bounds(config);
      if (bounds.empty()) {
        throw ConfigError(std::string("no acceptance bounds registered for this ") + to_string(config.scenario) +
                          " setup; add an acceptance section");
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::mutex progress_mutex;
  const ProgressSink progress = [&](const std::string& line) {
    std::lock_guard lock(progress_mutex);
    err << "[qsl] " << line << "\n" << std::flush;
  };

  try {
    auto outcome = run_scenario(config, jobs, progress);
    Verdict verdict;
    if (checking) {
      verdict = evaluate(bounds, outcome.metrics);
      outcome.artifacts.push_back({"verdict.json", dump({{"scenario", to_string(config.scenario)},
                                                         {"passed", verdict.passed},
                                                         {"bounds", verdict.report}})});
    }
    write_outputs(config.output_dir, config, outcome.artifacts);
    if (!checking) {
      out << "ok " << to_string(config.scenario) << ": " << outcome.summary << " -> " << config.output_dir << "\n";
      return kExitOk;
    }
    if (verdict.passed) {
      out << "PASS " << to_string(config.scenario) << ": " << bounds.size() << " bounds met (" << outcome.summary
          << ")\n";
      return kExitOk;
    }
    out << "FAIL " << to_string(config.scenario) << ": ";
    for (std::size_t i = 0; i < verdict.failed.size(); ++i) out << (i ? ", " : "") << verdict.failed[i];
    out << " out of bounds (" << outcome.summary << ")\n";
    return kExitCheckFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    out << "ERROR " << to_string(config.scenario) << ": " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace qsl::cli

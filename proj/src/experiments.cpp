// Copyright 2026 The cavsim Authors
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

#include "cavsim/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <boost/version.hpp>
#include <ceres/version.h>
#include <Eigen/Core>

#include "cavsim/fock.hpp"
#include "cavsim/limits.hpp"
#include "cavsim/qudit.hpp"
#include "cavsim/readout.hpp"
#include "cavsim/rng.hpp"
#include "cavsim/vrbs.hpp"

namespace cavsim {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- schema

class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string where(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double num(const std::string& k, double def, double lo = -HUGE_VAL, double hi = HUGE_VAL) {
    used_.insert(k);
    if (!j_.contains(k)) return def;
    return check_num(j_.at(k), where(k), lo, hi);
  }
  long integer(const std::string& k, long def, long lo, long hi) {
    used_.insert(k);
    if (!j_.contains(k)) return def;
    return check_int(j_.at(k), where(k), lo, hi);
  }
  bool flag(const std::string& k, bool def) {
    used_.insert(k);
    if (!j_.contains(k)) return def;
    if (!j_.at(k).is_boolean()) throw ConfigError(where(k), "expected true or false");
    return j_.at(k).get<bool>();
  }
  std::string str(const std::string& k, const std::string& def, const std::vector<std::string>& allowed = {}) {
    used_.insert(k);
    if (!j_.contains(k)) return def;
    return check_str(j_.at(k), where(k), allowed);
  }
  std::vector<double> nums(const std::string& k, std::vector<double> def, double lo = -HUGE_VAL,
                           double hi = HUGE_VAL) {
    used_.insert(k);
    if (!j_.contains(k)) return def;
    const json& a = array(k);
    std::vector<double> out;
    for (size_t i = 0; i < a.size(); ++i) out.push_back(check_num(a[i], item(k, i), lo, hi));
    return out;
  }
  std::vector<int> ints(const std::string& k, std::vector<int> def, long lo, long hi) {
    used_.insert(k);
    if (!j_.contains(k)) return def;
    const json& a = array(k);
    std::vector<int> out;
    for (size_t i = 0; i < a.size(); ++i) out.push_back(static_cast<int>(check_int(a[i], item(k, i), lo, hi)));
    return out;
  }
  std::vector<std::string> strs(const std::string& k, std::vector<std::string> def,
                                const std::vector<std::string>& allowed) {
    used_.insert(k);
    if (!j_.contains(k)) return def;
    const json& a = array(k);
    std::vector<std::string> out;
    for (size_t i = 0; i < a.size(); ++i) out.push_back(check_str(a[i], item(k, i), allowed));
    return out;
  }
  // Missing key gives an empty object.
  Obj sub(const std::string& k) {
    used_.insert(k);
    static const json empty = json::object();
    return Obj(j_.contains(k) ? j_.at(k) : empty, where(k));
  }
  const json* raw(const std::string& k) {
    used_.insert(k);
    return j_.contains(k) ? &j_.at(k) : nullptr;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(where(it.key()), "unknown key");
    }
  }

 private:
  std::string item(const std::string& k, size_t i) const { return where(k) + "[" + std::to_string(i) + "]"; }
  const json& array(const std::string& k) const {
    const json& a = j_.at(k);
    if (!a.is_array() || a.empty()) throw ConfigError(where(k), "expected a non-empty array");
    return a;
  }
  static double check_num(const json& v, const std::string& w, double lo, double hi) {
    if (!v.is_number()) throw ConfigError(w, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi) {
      std::ostringstream s;
      s << "value " << x << " outside [" << lo << ", " << hi << "]";
      throw ConfigError(w, s.str());
    }
    return x;
  }
  static long check_int(const json& v, const std::string& w, long lo, long hi) {
    if (!v.is_number_integer()) throw ConfigError(w, "expected an integer");
    long x = v.get<long>();
    if (x < lo || x > hi) {
      throw ConfigError(w, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }
  static std::string check_str(const json& v, const std::string& w, const std::vector<std::string>& allowed) {
    if (!v.is_string()) throw ConfigError(w, "expected a string");
    std::string s = v.get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      throw ConfigError(w, "'" + s + "' is not one of {" + opts + "}");
    }
    return s;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const std::vector<std::string> kModes{"Alice", "Bob"};

SystemParams parse_params(Obj o) {
  SystemParams p;
  static const std::vector<std::pair<const char*, double SystemParams::*>> fields{
      {"omega_a", &SystemParams::omega_a}, {"omega_b", &SystemParams::omega_b},
      {"omega_q", &SystemParams::omega_q}, {"omega_r", &SystemParams::omega_r},
      {"alpha", &SystemParams::alpha},     {"g_a", &SystemParams::g_a},
      {"g_b", &SystemParams::g_b},         {"chi_e_a", &SystemParams::chi_e_a},
      {"chi_e_b", &SystemParams::chi_e_b}, {"chi_qr", &SystemParams::chi_qr},
      {"T1_A", &SystemParams::T1_A},       {"T2_A", &SystemParams::T2_A},
      {"T1_B", &SystemParams::T1_B},       {"T2_B", &SystemParams::T2_B},
      {"T1_ge", &SystemParams::T1_ge},     {"T2_ge", &SystemParams::T2_ge},
      {"T2E_ge", &SystemParams::T2E_ge},   {"T1_f", &SystemParams::T1_f},
      {"T2_gf", &SystemParams::T2_gf},     {"n_th_q", &SystemParams::n_th_q},
      {"n_th_a", &SystemParams::n_th_a},   {"n_th_b", &SystemParams::n_th_b},
      {"readout_time", &SystemParams::readout_time}};
  for (auto [name, ptr] : fields) p.*ptr = o.num(name, p.*ptr);
  std::string d = o.str("dephasing", "literal", {"literal", "ramsey"});
  p.dephasing = d == "ramsey" ? SystemParams::Dephasing::Ramsey : SystemParams::Dephasing::Literal;
  o.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("params", e.what());
  }
  return p;
}

NoiseToggles parse_toggles(Obj o) {
  NoiseToggles t;
  for (Channel c : all_channels()) t.set(c, o.flag(channel_name(c), true));
  o.finish();
  return t;
}

DrivenNoise parse_driven_noise(Obj o) {
  DrivenNoise n = DrivenNoise::fitted();
  n.decay = o.num("decay", n.decay, 0.0);
  n.heating = o.num("heating", n.heating, 0.0);
  n.dephasing = o.num("dephasing", n.dephasing, 0.0);
  n.kappa_a = o.num("kappa_a", n.kappa_a, 0.0);
  n.kappa_b = o.num("kappa_b", n.kappa_b, 0.0);
  o.finish();
  return n;
}

VrbsConfig parse_vrbs(Obj& o, double default_detuning, int default_cutoff) {
  VrbsConfig c;
  c.detuning = default_detuning;
  c.g_sb_a = o.num("g_sb_a_hz", c.g_sb_a, 0.0);
  c.g_sb_b = o.num("g_sb_b_hz", c.g_sb_b, 0.0);
  c.transmon_levels = static_cast<int>(o.integer("transmon_levels", c.transmon_levels, 3, 8));
  c.cutoff_a = c.cutoff_b = static_cast<int>(o.integer("cutoff", default_cutoff, 2, 8));
  c.direct_four_wave = o.flag("direct_four_wave", false);
  return c;
}

// ---------------------------------------------------------------- output

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strs(header); }
  template <class... T>
  void row(const T&... cells) {
    std::vector<std::string> v{cell(cells)...};
    row_strs(v);
  }
  std::string str() const { return s_.str(); }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double x) { return num(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(size_t x) { return std::to_string(x); }
  void row_strs(const std::vector<std::string>& v) {
    for (size_t i = 0; i < v.size(); ++i) s_ << (i ? "," : "") << v[i];
    s_ << "\n";
  }
  std::ostringstream s_;
};

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> tables;  // name, content
  std::vector<std::pair<std::string, std::string>> extra;   // json files
  json summary = json::object();
  json plots = json::array();

  void table(const std::string& name, const Csv& c) { tables.push_back({name, c.str()}); }
  void plot(const std::string& file, const std::string& x, const std::vector<std::string>& y, const std::string& title) {
    plots.push_back({{"file", file}, {"x", x}, {"y", y}, {"title", title}});
  }
};

template <class T, class F>
std::vector<T> parallel_map(int n, int workers, F&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> err(n);
  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      int i = next++;
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

struct Context {
  SystemParams params;
  uint64_t seed = 0;
  int workers = 1;
};

using Runner = std::function<Artifacts(Obj&, const Context&)>;

// ---------------------------------------------------------------- experiments

Artifacts run_fock_prep(Obj& o, const Context& ctx) {
  std::vector<int> targets = o.ints("targets", {1, 5, 10, 15, 20}, 1, 40);
  std::vector<std::string> protos = o.strs("protocols", {"SB", "SFP", "SFP+PF"}, {"SB", "SFP", "SB+PF", "SFP+PF"});
  ProtocolConfig base;
  base.mode = parse_mode(o.str("mode", "Alice", kModes));
  base.durations.pi_ge = o.num("pi_ge_s", base.durations.pi_ge, 1e-9, 1e-3);
  base.durations.pi_ef = o.num("pi_ef_s", base.durations.pi_ef, 1e-9, 1e-3);
  base.durations.sideband_pi0 = o.num("sideband_pi0_s", base.durations.sideband_pi0, 1e-9, 1e-2);
  base.durations.sqrt_scaling = o.flag("sqrt_scaling", true);
  base.max_feedforward_retries = static_cast<int>(o.integer("max_retries", 2, 0, 10));
  base.trotter_steps = static_cast<int>(o.integer("trotter_steps", 4, 1, 64));
  base.angle_error = o.num("angle_error", 0.0, -0.5, 0.5);
  base.pf_noisy_wait = o.flag("pf_noisy_wait", false);
  base.noise = parse_toggles(o.sub("noise"));
  base.readout = o.str("readout", "device", {"device", "ideal"}) == "ideal" ? ReadoutModel::ideal()
                                                                            : ReadoutModel::device();
  bool ceiling = o.flag("ceiling", false);
  o.finish();

  struct Point {
    ProtocolResult r;
    CeilingResult c;
  };
  const int np = static_cast<int>(protos.size());
  const int n = static_cast<int>(targets.size()) * np;
  Artifacts a;
  if (ctx.workers < 0) return a;  // validation only
  auto pts = parallel_map<Point>(n, ctx.workers, [&](int i) {
    ProtocolConfig c = base;
    c.target_n = targets[i / np];
    c.protocol = parse_protocol(protos[i % np]);
    c.validate();
    Point p;
    p.r = simulate_protocol(c, ctx.params);
    if (ceiling) p.c = ceiling_analysis(c, ctx.params, all_channels());
    return p;
  });

  std::vector<std::string> hdr{"N"};
  for (const auto& s : protos) hdr.push_back("F_" + s);
  Csv det({"N", "protocol", "fidelity", "keep_probability", "branch_count", "uncorrected_probability",
                      "truncation_leakage", "peak_ratio"});
  Csv pop({"N", "protocol", "n", "population"});
  Csv ceil({"N", "protocol", "channel", "contribution"});
  for (size_t t = 0; t < targets.size(); ++t) {
    for (int k = 0; k < np; ++k) {
      const auto& pt = pts[t * np + k];
      const auto& r = pt.r;
      det.row(targets[t], protos[k], r.fidelity, r.keep_probability, r.branch_count, r.uncorrected_probability,
              r.truncation_leakage, r.peak_ratio());
      for (int m = 0; m < r.population.size(); ++m) pop.row(targets[t], protos[k], m, r.population(m));
      if (ceiling)
        for (auto [ch, v] : pt.c.contribution) ceil.row(targets[t], protos[k], channel_name(ch), v);
      a.summary["points"].push_back({{"N", targets[t]}, {"protocol", protos[k]}, {"fidelity", r.fidelity},
                                     {"keep_probability", r.keep_probability},
                                     {"truncation_warning", r.truncation_warning}});
    }
  }
  std::ostringstream m;
  for (size_t i = 0; i < hdr.size(); ++i) m << (i ? "," : "") << hdr[i];
  m << "\n";
  for (size_t t = 0; t < targets.size(); ++t) {
    m << targets[t];
    for (int k = 0; k < np; ++k) m << "," << num(pts[t * np + k].r.fidelity);
    m << "\n";
  }
  a.tables.push_back({"fock_prep.csv", m.str()});
  a.table("fock_prep_details.csv", det);
  a.table("fock_populations.csv", pop);
  if (ceiling) a.table("ceiling.csv", ceil);
  std::vector<std::string> ys(hdr.begin() + 1, hdr.end());
  a.plot("fock_prep.csv", "N", ys, "Fock state preparation fidelity");
  return a;
}

Artifacts run_fock_lifetime(Obj& o, const Context& ctx) {
  std::vector<int> ns = o.ints("n", {1, 2, 5, 10, 20}, 1, 60);
  Mode mode = parse_mode(o.str("mode", "Alice", kModes));
  int samples = static_cast<int>(o.integer("samples", 200, 5, 100000));
  o.finish();
  Artifacts a;
  if (ctx.workers < 0) return a;
  auto pts = parallel_map<LifetimePoint>(static_cast<int>(ns.size()), ctx.workers, [&](int i) {
    return fock_lifetime_scan({ns[i]}, ctx.params, mode, samples).front();
  });
  const double T1 = mode == Mode::Alice ? ctx.params.T1_A : ctx.params.T1_B;
  Csv c({"n", "T1_fit_s", "T1_stderr_s", "T1_expected_s", "relative_error"});
  for (const auto& p : pts) c.row(p.n, p.T1_fit, p.T1_stderr, T1 / p.n, p.T1_fit * p.n / T1 - 1.0);
  a.table("fock_lifetime.csv", c);
  a.plot("fock_lifetime.csv", "n", {"T1_fit_s", "T1_expected_s"}, "Fock state lifetime");
  a.summary["T1_1"] = T1;
  return a;
}

Artifacts run_vrbs_sweep(Obj& o, const Context& ctx) {
  std::vector<double> det = o.nums("detunings_hz", {-2e6, -3e6, -4e6, -5e6, -7.5e6, -10e6, -15e6, -20e6}, -1e9, 1e9);
  VrbsConfig base = parse_vrbs(o, -5e6, 2);
  double periods = o.num("periods", 8.0, 3.0, 1000.0);
  int samples = static_cast<int>(o.integer("samples", 400, 16, 100000));
  bool traces = o.flag("save_traces", false);
  DrivenNoise noise = parse_driven_noise(o.sub("noise"));
  o.finish();
  for (size_t i = 0; i < det.size(); ++i)
    if (det[i] == 0.0) throw ConfigError("vrbs_sweep.detunings_hz[" + std::to_string(i) + "]", "zero detuning");
  Artifacts a;
  if (ctx.workers < 0) return a;
  struct Point {
    SweepPoint s;
    double rate_formula = 0.0;
    VrbsTrace tr;
  };
  auto pts = parallel_map<Point>(static_cast<int>(det.size()), ctx.workers, [&](int i) {
    VrbsConfig c = base;
    c.detuning = det[i];
    double g = dressed_frame(vrbs_hamiltonian(c, ctx.params), vrbs_space(c)).g_bs;
    double tmax = periods * kPi / g;
    Point p;
    p.tr = simulate_vrbs(c, ctx.params, noise, tmax, samples);
    auto fit = fit_bs_oscillation(p.tr.t, p.tr.p_alice);
    p.s = {c.detuning, fit.g_bs, fit.kappa_1, fit.kappa_phi, bs_fidelity(fit).F_BS};
    p.rate_formula = std::abs(effective_bs_rate(c, ctx.params).rate);
    return p;
  });
  Csv c({"detuning_hz", "g_bs_hz", "kappa_1", "kappa_phi", "F_BS", "F_SWAP", "g_bs_formula_hz"});
  Csv t({"detuning_hz", "t_s", "p_alice", "p_bob", "p_excited"});
  for (const auto& p : pts) {
    c.row(p.s.detuning, p.s.g_bs / kTwoPi, p.s.kappa_1, p.s.kappa_phi, p.s.F_BS,
          bs_fidelity(p.s.g_bs, p.s.kappa_1, p.s.kappa_phi).F_SWAP, p.rate_formula / kTwoPi);
    if (traces)
      for (size_t k = 0; k < p.tr.t.size(); ++k) t.row(p.s.detuning, p.tr.t[k], p.tr.p_alice[k], p.tr.p_bob[k], p.tr.p_excited[k]);
  }
  a.table("vrbs_sweep.csv", c);
  if (traces) a.table("vrbs_traces.csv", t);
  a.plot("vrbs_sweep.csv", "detuning_hz", {"g_bs_hz", "F_BS"}, "Beamsplitter rate and fidelity vs detuning");
  return a;
}

Artifacts run_vrbs_swap(Obj& o, const Context& ctx) {
  VrbsConfig cfg = parse_vrbs(o, 0.0, 2);
  cfg.detuning = o.num("detuning_hz", -5e6, -1e9, 1e9);
  if (cfg.detuning == 0.0) throw ConfigError("vrbs_swap.detuning_hz", "zero detuning");
  int n = static_cast<int>(o.integer("n_swaps", 100, 1, 100000));
  double p_heat = o.num("p_heat", 0.01167, 0.0, 0.5);
  std::vector<std::string> checks = o.strs("checks", {"none", "erasure_final", "heating_each"},
                                           {"none", "erasure_final", "heating_each"});
  DrivenNoise noise = parse_driven_noise(o.sub("noise"));
  o.finish();
  Artifacts a;
  if (ctx.workers < 0) return a;
  if (p_heat > 0.0) noise.heating = tune_heating_rate(cfg, ctx.params, noise, p_heat);
  auto res = parallel_map<SwapSequenceResult>(static_cast<int>(checks.size()), ctx.workers, [&](int i) {
    return swap_sequence(cfg, ctx.params, noise, n, parse_swap_check(checks[i]));
  });
  Csv c({"check", "swap", "p10", "p01", "p00", "keep", "detected"});
  for (size_t i = 0; i < checks.size(); ++i) {
    for (size_t k = 0; k < res[i].steps.size(); ++k) {
      const auto& s = res[i].steps[k];
      c.row(checks[i], k + 1, s.p10, s.p01, s.p00, s.keep, s.detected);
    }
    a.summary["checks"][checks[i]] = {{"correct", res[i].correct}, {"infidelity_per_swap", res[i].infidelity_per_swap}};
  }
  a.summary["swap_time_s"] = res.front().swap_time;
  a.summary["heating_rate"] = noise.heating;
  a.table("vrbs_swap.csv", c);
  a.plot("vrbs_swap.csv", "swap", {"p10", "p01", "keep"}, "Swap sequence populations");
  return a;
}

Artifacts run_heating_fit(Obj& o, const Context& ctx) {
  std::vector<double> n = o.nums("n", {10, 20, 50, 100, 200}, 1.0, 1e9);
  std::vector<double> rates = o.nums("rates", {}, 0.0, 1.0);
  double p_up = o.num("p_up", 0.01167, 0.0, 1.0);
  long shots = o.integer("shots", 20000, 1, 1000000000);
  o.finish();
  if (!rates.empty() && rates.size() != n.size()) throw ConfigError("heating_fit.rates", "length differs from n");
  Artifacts a;
  if (ctx.workers < 0) return a;
  bool synthetic = rates.empty();
  if (synthetic) {
    for (size_t i = 0; i < n.size(); ++i) {
      Rng rng = make_rng(ctx.seed, i);
      std::binomial_distribution<long> b(shots, 1.0 - std::pow(1.0 - p_up, n[i]));
      rates.push_back(static_cast<double>(b(rng)) / shots);
    }
  }
  HeatingFit f = heating_fit(n, rates);
  Csv c({"n", "rate", "model"});
  for (size_t i = 0; i < n.size(); ++i) c.row(n[i], rates[i], 1.0 - std::pow(1.0 - f.p_up, n[i]));
  a.table("heating_fit.csv", c);
  a.plot("heating_fit.csv", "n", {"rate", "model"}, "Heating detection rate vs swaps");
  a.summary = {{"p_up", f.p_up}, {"stderr", f.stderr_}, {"degenerate", f.degenerate}, {"synthetic", synthetic}};
  return a;
}

Mat named_gate(const std::string& g, int d, const VrbsConfig& cfg, const SystemParams& p) {
  if (g == "csum") return csum(d);
  if (g == "identity") return Mat::Identity(d * d, d * d);
  return extract_vrbs_unitary(cfg, p, vrbs_quarter_time(cfg, p), d).matrix;
}

Artifacts run_entangling_power(Obj& o, const Context& ctx) {
  std::vector<std::string> gates = o.strs("gates", {"csum", "identity", "vrbs"}, {"csum", "identity", "vrbs"});
  int d = static_cast<int>(o.integer("d", 3, 2, 4));
  int samples = static_cast<int>(o.integer("samples", 100000, 1, 100000000));
  VrbsConfig cfg = parse_vrbs(o, 0.0, d);
  cfg.detuning = o.num("detuning_hz", -5.5e6, -1e9, 1e9);
  o.finish();
  if (cfg.cutoff_a < d) throw ConfigError("entangling_power.cutoff", "must be >= d");
  Artifacts a;
  if (ctx.workers < 0) return a;
  auto res = parallel_map<std::pair<EntanglingPower, double>>(static_cast<int>(gates.size()), ctx.workers, [&](int i) {
    Mat U = named_gate(gates[i], d, cfg, ctx.params);
    return std::make_pair(entangling_power(U, d, samples, derive_seed(ctx.seed, i)), entangling_power_exact(U, d));
  });
  Csv c({"gate", "e_p", "stderr", "exact"});
  for (size_t i = 0; i < gates.size(); ++i) c.row(gates[i], res[i].first.value, res[i].first.stderr_, res[i].second);
  a.table("entangling_power.csv", c);
  return a;
}

Artifacts run_gate_synthesis(Obj& o, const Context& ctx) {
  std::string target = o.str("target", "csum", {"csum", "vrbs"});
  int d = static_cast<int>(o.integer("d", 3, 2, 4));
  int max_blocks = static_cast<int>(o.integer("max_blocks", 6, 1, 20));
  SynthesisOptions opt;
  opt.restarts = static_cast<int>(o.integer("restarts", 32, 1, 100000));
  opt.max_iterations = static_cast<int>(o.integer("max_iterations", 3000, 1, 1000000));
  VrbsConfig cfg = parse_vrbs(o, 0.0, d);
  cfg.detuning = o.num("detuning_hz", -5.5e6, -1e9, 1e9);
  o.finish();
  if (cfg.cutoff_a < d) throw ConfigError("gate_synthesis.cutoff", "must be >= d");
  Artifacts a;
  if (ctx.workers < 0) return a;
  opt.seed = ctx.seed;
  opt.workers = ctx.workers;
  Mat E = named_gate("vrbs", d, cfg, ctx.params);
  Mat T = named_gate(target, d, cfg, ctx.params);
  auto ladder = synthesis_ladder(T, E, d, max_blocks, opt);
  Csv c({"n_blocks", "fidelity", "infidelity"});
  json angles = json::array();
  for (const auto& r : ladder) {
    c.row(r.n_blocks, r.fidelity, 1.0 - r.fidelity);
    angles.push_back({{"n_blocks", r.n_blocks}, {"fidelity", r.fidelity}, {"angles", r.angles}});
  }
  a.table("synthesis_ladder.csv", c);
  a.extra.push_back({"synthesis_angles.json", angles.dump(2) + "\n"});
  a.plot("synthesis_ladder.csv", "n_blocks", {"fidelity"}, "Gate synthesis fidelity vs number of blocks");
  return a;
}

Artifacts run_tls_fit(Obj& o, const Context& ctx) {
  Mode mode = parse_mode(o.str("mode", "Alice", kModes));
  bool alice = mode == Mode::Alice;
  TlsParams tp;
  tp.f0 = o.num("f0_hz", alice ? 5.779e9 : 6.872e9, 1.0);
  tp.G = o.num("G_ohm", alice ? 295.0 : 298.0, 1e-6);
  std::string data = o.str("data_csv", "");
  Obj s = o.sub("synthetic");
  tp.F_delta0 = s.num("F_delta0", alice ? 8.0e-10 : 7.9e-10, 0.0);
  tp.R_res = s.num("R_res_ohm", alice ? 73.4e-9 : 121.9e-9, 0.0);
  tp.beta = s.num("beta", 1.0, 1e-3, 1e3);
  std::vector<double> T = s.nums("temperatures_k", {}, 1e-4, 10.0);
  double noise = s.num("relative_noise", 0.0, 0.0, 0.5);
  s.finish();
  o.finish();
  if (T.empty())
    for (int i = 0; i < 25; ++i) T.push_back(0.01 + 0.02 * i);
  Artifacts a;
  if (ctx.workers < 0) return a;
  std::vector<double> Q;
  if (!data.empty()) {
    std::ifstream in(data);
    if (!in) throw ConfigError("tls_fit.data_csv", "cannot open '" + data + "'");
    T.clear();
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string a1, a2;
      std::getline(ls, a1, ',');
      std::getline(ls, a2, ',');
      try {
        T.push_back(std::stod(a1));
        Q.push_back(std::stod(a2));
      } catch (const std::exception&) {
        throw ConfigError("tls_fit.data_csv", "bad row '" + line + "'");
      }
    }
  } else {
    Rng rng = make_rng(ctx.seed);
    std::normal_distribution<double> nz(0.0, noise);
    for (double t : T) Q.push_back(tls_q0(tp, t) * (1.0 + (noise > 0 ? nz(rng) : 0.0)));
  }
  TlsFit f = tls_fit(T, Q, tp.f0, tp.G);
  Csv c({"T_k", "Q0", "Q0_model"});
  for (size_t i = 0; i < T.size(); ++i) c.row(T[i], Q[i], tls_q0(f.params, T[i]));
  a.table("tls_fit.csv", c);
  a.plot("tls_fit.csv", "T_k", {"Q0", "Q0_model"}, "Internal quality factor vs temperature");
  a.summary = {{"F_delta0", f.params.F_delta0}, {"R_res_ohm", f.params.R_res}, {"beta", f.params.beta},
               {"stderrs", f.fit.stderrs}};
  return a;
}

Artifacts run_readout_fit(Obj& o, const Context& ctx) {
  const json* conf = o.raw("confusion");
  bool dual = o.flag("dual_rail", true);
  o.finish();
  RMat M(3, 3);
  if (conf) {
    if (!conf->is_array() || conf->size() != 3) throw ConfigError("readout_fit.confusion", "expected a 3x3 array");
    for (int r = 0; r < 3; ++r) {
      const json& row = (*conf)[r];
      if (!row.is_array() || row.size() != 3) throw ConfigError("readout_fit.confusion[" + std::to_string(r) + "]", "expected 3 numbers");
      for (int c = 0; c < 3; ++c) {
        if (!row[c].is_number()) throw ConfigError("readout_fit.confusion[" + std::to_string(r) + "]", "expected numbers");
        M(r, c) = row[c].get<double>();
      }
    }
    if (!is_column_stochastic(M, 1e-6)) throw ConfigError("readout_fit.confusion", "columns must sum to 1");
  } else {
    M = predicted_confusion(ReadoutModel::device());
  }
  Artifacts a;
  if (ctx.workers < 0) return a;
  ReadoutFit f = fit_readout_model(M);
  Mat3 P = predicted_confusion(f.model);
  Csv c({"assigned", "prepared", "measured", "model"});
  const char* lab[3] = {"g", "e", "f"};
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) c.row(lab[r], lab[k], M(r, k), P(r, k));
  a.table("readout_confusion.csv", c);
  a.summary = {{"p_relax_eg", f.model.p_relax_eg}, {"p_relax_fe", f.model.p_relax_fe}, {"c_ge", f.c_ge},
               {"c_ef", f.c_ef},  {"c_gf", f.c_gf}, {"residual", f.residual}, {"converged", f.converged},
               {"assignment_fidelity", assignment_fidelity(M)}};
  if (dual) {
    Mat3 D = dual_rail_confusion(ctx.params, f.model);
    Mat3 R = mapping_confusion_reference();
    const char* st[3] = {"00", "10", "01"};
    Csv d({"assigned", "prepared", "simulated", "reference"});
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) d.row(st[r], st[k], D(r, k), R(r, k));
    a.table("dual_rail_confusion.csv", d);
  }
  return a;
}

Artifacts run_limits(Obj& o, const Context& ctx) {
  o.finish();
  Artifacts a;
  if (ctx.workers < 0) return a;
  const SystemParams& p = ctx.params;
  Csv c({"quantity", "mode", "value", "unit"});
  const double pa = purcell_limit(p.omega_q - p.omega_a, p.g_a, p.T2E_ge);
  const double pb = purcell_limit(p.omega_q - p.omega_b, p.g_b, p.T2E_ge);
  const double ta = thermal_dephasing_limit(p.chi_e_a, p.T1_ge, p.n_th_q);
  const double tb = thermal_dephasing_limit(p.chi_e_b, p.T1_ge, p.n_th_q);
  c.row("purcell_limit", "Alice", pa, "s");
  c.row("purcell_limit", "Bob", pb, "s");
  c.row("thermal_dephasing_limit", "Alice", ta, "s");
  c.row("thermal_dephasing_limit", "Bob", tb, "s");
  c.row("pure_dephasing_rate", "Alice", pure_dephasing_rate(p.T1_A, p.T2_A), "1/s");
  c.row("pure_dephasing_rate", "Bob", pure_dephasing_rate(p.T1_B, p.T2_B), "1/s");
  c.row("pure_dephasing_rate", "transmon", pure_dephasing_rate(p.T1_ge, p.T2_ge), "1/s");
  a.table("limits.csv", c);
  a.summary["purcell_limit_s"] = {{"Alice", pa}, {"Bob", pb}};
  // JSON has no infinity; a zero thermal population reports null.
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  a.summary["thermal_dephasing_limit_s"] = {{"Alice", finite(ta)}, {"Bob", finite(tb)}};
  return a;
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"fock-prep", run_fock_prep},          {"fock-lifetime", run_fock_lifetime},
      {"vrbs-sweep", run_vrbs_sweep},        {"vrbs-swap", run_vrbs_swap},
      {"heating-fit", run_heating_fit},      {"entangling-power", run_entangling_power},
      {"gate-synthesis", run_gate_synthesis}, {"tls-fit", run_tls_fit},
      {"readout-fit", run_readout_fit},      {"limits", run_limits}};
  return r;
}

struct Parsed {
  std::string name;
  uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
};

// Validates everything; with workers < 0 the runner only parses its section.
Artifacts parse_and_run(const json& cfg, Parsed& out, int workers_override, bool execute) {
  Obj top(cfg, "");
  out.name = top.str("experiment", "");
  if (out.name.empty()) throw ConfigError("experiment", "missing experiment name");
  const ExperimentInfo& info = experiment_info(out.name);
  if (!cfg.contains("seed")) throw ConfigError("seed", "missing seed");
  out.seed = static_cast<uint64_t>(top.integer("seed", 0, 0, std::numeric_limits<long>::max()));
  out.workers = static_cast<int>(top.integer("workers", 1, 1, 1024));
  out.out_dir = top.str("output_dir", "");
  top.str("description", "");
  Context ctx;
  ctx.params = parse_params(top.sub("params"));
  ctx.seed = out.seed;
  if (workers_override > 0) out.workers = workers_override;
  ctx.workers = execute ? out.workers : -1;
  Obj sec = top.sub(info.section);
  top.finish();
  return runners().at(out.name)(sec, ctx);
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> r{
      {"fock-prep", "Fock state preparation with SB / SFP / parity-filter protocols", "fock_prep",
       {"fock_prep.csv", "fock_prep_details.csv", "fock_populations.csv", "ceiling.csv"}},
      {"fock-lifetime", "Fock state lifetimes under cavity decay", "fock_lifetime", {"fock_lifetime.csv"}},
      {"vrbs-sweep", "Beamsplitter rate and fidelity vs sideband detuning", "vrbs_sweep",
       {"vrbs_sweep.csv", "vrbs_traces.csv"}},
      {"vrbs-swap", "Repeated swaps with erasure and heating checks", "vrbs_swap", {"vrbs_swap.csv"}},
      {"heating-fit", "Per-swap heating probability from detection rates", "heating_fit", {"heating_fit.csv"}},
      {"entangling-power", "Entangling power of two-qudit gates", "entangling_power", {"entangling_power.csv"}},
      {"gate-synthesis", "CSUM synthesis ladder from VRBS entanglers and local rotations", "gate_synthesis",
       {"synthesis_ladder.csv", "synthesis_angles.json"}},
      {"tls-fit", "TLS + residual resistance fit of Q0(T)", "tls_fit", {"tls_fit.csv"}},
      {"readout-fit", "Readout confusion model fit and dual-rail mapping confusion", "readout_fit",
       {"readout_confusion.csv", "dual_rail_confusion.csv"}},
      {"limits", "Purcell and thermal dephasing limits", "limits", {"limits.csv"}},
  };
  return r;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& e : experiment_registry()) out.push_back(e.name);
  return out;
}

const ExperimentInfo& experiment_info(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return e;
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    throw ConfigError(std::to_string(line) + ":" + std::to_string(col), pos == std::string::npos ? msg : msg.substr(pos));
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

void validate_config(const json& cfg) {
  Parsed p;
  parse_and_run(cfg, p, 0, false);
}

std::string config_hash(const json& cfg) {
  std::string s = cfg.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json example_config(const std::string& name, bool quick) {
  const ExperimentInfo& info = experiment_info(name);
  json c = {{"experiment", name}, {"seed", 1234}};
  json s = json::object();
  if (name == "fock-prep") {
    s = {{"targets", quick ? json{1, 3} : json{1, 5, 10, 15, 20}}, {"protocols", {"SB", "SFP", "SFP+PF"}}, {"mode", "Alice"}};
  } else if (name == "fock-lifetime") {
    s = {{"n", {1, 2, 5, 10, 20}}, {"mode", "Alice"}};
  } else if (name == "vrbs-sweep") {
    s = {{"detunings_hz", quick ? json{-5e6, -10e6} : json{-2e6, -3e6, -4e6, -5e6, -7.5e6, -10e6, -15e6, -20e6}}};
    if (quick) s["samples"] = 100;
  } else if (name == "vrbs-swap") {
    s = {{"detuning_hz", -5e6}, {"n_swaps", quick ? 10 : 100}, {"p_heat", 0.01167}};
  } else if (name == "heating-fit") {
    s = {{"n", {10, 20, 50, 100, 200}}, {"p_up", 0.01167}, {"shots", 20000}};
  } else if (name == "entangling-power") {
    s = {{"gates", {"csum", "identity", "vrbs"}}, {"d", 3}, {"samples", quick ? 2000 : 100000}, {"detuning_hz", -5.5e6}};
  } else if (name == "gate-synthesis") {
    s = {{"target", "csum"}, {"d", 3}, {"max_blocks", quick ? 2 : 6}, {"restarts", quick ? 3 : 32},
         {"detuning_hz", -5.5e6}};
    if (quick) s["max_iterations"] = 200;
  } else if (name == "tls-fit") {
    s = {{"mode", "Alice"}, {"synthetic", {{"relative_noise", 0.002}}}};
  } else if (name == "readout-fit") {
    s = {{"dual_rail", !quick}};
  }
  c[info.section] = s;
  return c;
}

RunResult run_experiment(const json& cfg, const RunOptions& opt) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();
  std::time_t started = std::time(nullptr);
  Parsed p;
  validate_config(cfg);
  Artifacts a = parse_and_run(cfg, p, opt.workers, true);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunResult r;
  if (!opt.out_dir.empty()) r.out_dir = opt.out_dir;
  else if (!p.out_dir.empty()) r.out_dir = p.out_dir;
  else if (const char* env = std::getenv("SIM_OUTPUT_DIR"); env && *env) r.out_dir = (fs::path(env) / p.name).string();
  else r.out_dir = (fs::path("results") / p.name).string();
  fs::create_directories(r.out_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(r.out_dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(r.out_dir) / name).string());
    out << content;
    r.files.push_back(name);
  };
  for (const auto& [name, content] : a.tables) {
    write(name, content);
    r.tables.push_back(name);
  }
  for (const auto& [name, content] : a.extra) write(name, content);
  json result = {{"experiment", p.name}, {"seed", p.seed}, {"summary", a.summary}};
  write("result.json", result.dump(2) + "\n");
  if (!a.plots.empty()) write("plots.json", a.plots.dump(2) + "\n");

  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started));
  std::vector<std::string> listed = r.files;
  listed.push_back("manifest.json");
  json manifest = {{"experiment", p.name},
                   {"config_hash", config_hash(cfg)},
                   {"seed", p.seed},
                   {"workers", p.workers},
                   {"versions",
                    {{"cavsim", CAVSIM_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"ceres", CERES_VERSION_STRING},
                     {"boost", BOOST_LIB_VERSION},
                     {"compiler", __VERSION__}}},
                   {"started_utc", ts},
                   {"wall_time_s", wall},
                   {"files", listed}};
  write("manifest.json", manifest.dump(2) + "\n");
  r.summary = a.summary;
  r.wall_time = wall;
  return r;
}

}  // namespace cavsim

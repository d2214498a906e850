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

// Acceptance checks. One PASS/FAIL line per criterion; optional arguments select criteria by number.

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cavsim/experiments.hpp"
#include "cavsim/fock.hpp"
#include "cavsim/lindblad.hpp"
#include "cavsim/limits.hpp"
#include "cavsim/qudit.hpp"
#include "cavsim/readout.hpp"
#include "cavsim/rng.hpp"
#include "cavsim/vrbs.hpp"

using namespace cavsim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Outcome fock_decay_law() {
  SystemParams p;
  std::vector<int> ns{1, 2, 5, 10, 20};
  auto pts = fock_lifetime_scan(ns, p, Mode::Alice);
  bool ok = true;
  std::string d;
  for (const auto& pt : pts) {
    double want = p.T1_A / pt.n;
    double rel = std::abs(pt.T1_fit / want - 1.0);
    ok = ok && rel < 0.01;
    d += fmt("n=%d T1=%.4f ms (rel %.1e) ", pt.n, pt.T1_fit * 1e3, rel);
  }
  return {ok, d};
}

Outcome coherence_limits() {
  SystemParams p;
  double pa = purcell_limit(p.omega_q - p.omega_a, p.g_a, p.T2E_ge);
  double pb = purcell_limit(p.omega_q - p.omega_b, p.g_b, p.T2E_ge);
  double ta = thermal_dephasing_limit(p.chi_e_a, p.T1_ge, p.n_th_q);
  double tb = thermal_dephasing_limit(p.chi_e_b, p.T1_ge, p.n_th_q);
  bool ok = std::abs(pa - 1.17) <= 0.01 && std::abs(pb - 0.34) <= 0.01 && std::abs(ta - 59e-3) <= 1e-3 &&
            std::abs(tb - 59e-3) <= 1e-3;
  return {ok, fmt("Purcell A=%.3f s B=%.3f s; thermal dephasing A=%.2f ms B=%.2f ms", pa, pb, ta * 1e3, tb * 1e3)};
}

Outcome trotter_convergence() {
  SystemParams p;
  HilbertSpace sp({3});
  auto jumps = operators(transmon_jumps(p, sp, 0));
  const double theta = kPi, T = 50e-9;
  const LevelPairs pairs{{0, 1}};
  Mat ref = exact_rotation_channel(3, pairs, theta, jumps, T);
  std::vector<double> err;
  std::string d = "errors:";
  for (int m : {2, 4, 8, 16, 32}) {
    err.push_back((noisy_rotation(3, pairs, theta, jumps, T, m) - ref).norm());
    d += fmt(" %.3e", err.back());
  }
  bool ok = true;
  d += "; ratios:";
  for (size_t i = 1; i < err.size(); ++i) {
    double r = err[i - 1] / err[i];
    ok = ok && std::abs(r - 4.0) <= 0.5;
    d += fmt(" %.3f", r);
  }
  double cmin = choi_min_eigenvalue(noisy_rotation(3, pairs, theta, jumps, T, 4));
  ok = ok && cmin >= -1e-8 && is_trace_preserving(noisy_rotation(3, pairs, theta, jumps, T, 4));
  d += fmt("; m=4 Choi min eig %.2e", cmin);
  return {ok, d};
}

Outcome protocol_ordering() {
  SystemParams p;
  bool ok = true;
  std::string d;
  for (int N : {5, 10, 15, 20}) {
    ProtocolConfig c;
    c.target_n = N;
    c.protocol = Protocol::SB;
    auto sb = simulate_protocol(c, p);
    c.protocol = Protocol::SFP;
    auto sfp = simulate_protocol(c, p);
    c.protocol = Protocol::SFP_PF;
    auto pf = simulate_protocol(c, p);
    bool order = sb.fidelity < sfp.fidelity && sfp.fidelity < pf.fidelity;
    bool peak = sfp.peak_ratio() > sb.peak_ratio();
    ok = ok && order && peak;
    d += fmt("N=%d SB=%.4f SFP=%.4f SFP+PF=%.4f peak(SB)=%.2f peak(SFP)=%.2f; ", N, sb.fidelity, sfp.fidelity,
             pf.fidelity, sb.peak_ratio(), sfp.peak_ratio());
  }
  return {ok, d};
}

Outcome ceiling() {
  SystemParams p;
  ProtocolConfig c;
  c.target_n = 10;
  const auto& ch = all_channels();
  c.protocol = Protocol::SB;
  auto sb = ceiling_analysis(c, p, ch);
  c.protocol = Protocol::SFP;
  auto sfp = ceiling_analysis(c, p, ch);
  auto get = [](const CeilingResult& r, Channel k) { return r.contribution.at(k); };
  bool dec = get(sfp, Channel::TransmonDecay) < get(sb, Channel::TransmonDecay);
  bool deph = get(sfp, Channel::TransmonDephasing) < get(sb, Channel::TransmonDephasing);
  double dominant = get(sfp, Channel::ReadoutError) + get(sfp, Channel::CavityDecay);
  double rest = 0.0;
  for (auto [k, v] : sfp.contribution)
    if (k != Channel::ReadoutError && k != Channel::CavityDecay) rest += v;
  std::string d = "SB:";
  for (auto [k, v] : sb.contribution) d += fmt(" %s=%.4f", channel_name(k).c_str(), v);
  d += "; SFP:";
  for (auto [k, v] : sfp.contribution) d += fmt(" %s=%.4f", channel_name(k).c_str(), v);
  return {dec && deph && dominant > rest, d};
}

Outcome vrbs_physics() {
  SystemParams p;
  DrivenNoise noise = DrivenNoise::fitted();
  std::vector<double> det{2e6, 3e6, 4e6, 5e6, 7.5e6, 10e6, 15e6, 20e6};
  std::vector<SweepPoint> pts;
  std::string d;
  for (double x : det) {
    VrbsConfig cfg;
    cfg.detuning = -x;
    double g = dressed_frame(vrbs_hamiltonian(cfg, p), vrbs_space(cfg)).g_bs;
    pts.push_back(vrbs_sweep_point(cfg, p, noise, 8.0 * kPi / g, 400));
    d += fmt("%.1f MHz: g=%.4g F=%.5f; ", x / 1e6, pts.back().g_bs / kTwoPi, pts.back().F_BS);
  }
  // log-log slope over [5, 20] MHz
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (size_t i = 0; i < det.size(); ++i) {
    if (det[i] < 5e6) continue;
    double x = std::log(det[i]), y = std::log(pts[i].g_bs);
    sx += x, sy += y, sxx += x * x, sxy += x * y, m += 1;
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  size_t best = 0;
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].F_BS > pts[best].F_BS) best = i;
  bool interior = best > 0 && best + 1 < pts.size();

  // Round trip on a synthetic trace.
  const double g = kTwoPi * 40e3, k1 = 800.0, kp = 1500.0;
  std::vector<double> t, y;
  Rng rng = make_rng(7);
  std::normal_distribution<double> nz(0.0, 1e-4);
  for (int i = 0; i < 600; ++i) {
    t.push_back(i * 2.0e-7 * 2);
    y.push_back(bs_model(t.back(), g, k1, kp, 1) + nz(rng));
  }
  auto f = fit_bs_oscillation(t, y);
  double eg = std::abs(f.g_bs / g - 1), e1 = std::abs(f.kappa_1 / k1 - 1), ep = std::abs(f.kappa_phi / kp - 1);
  bool rt = eg < 0.01 && e1 < 0.01 && ep < 0.01;
  d += fmt("slope=%.3f, F max at %.1f MHz, round-trip rel errors g=%.1e k1=%.1e kphi=%.1e", slope, det[best] / 1e6,
           eg, e1, ep);
  return {std::abs(slope + 1.0) <= 0.1 && interior && rt, d};
}

Outcome fidelity_and_swaps() {
  auto bf = bs_fidelity(1.0, 4.0 / kPi * 0.003, 0.0);
  bool arith = std::abs(bf.F_BS - 0.997) < 1e-12 && std::abs(bf.F_SWAP - 0.994) < 1e-12;
  SystemParams p;
  VrbsConfig cfg;
  const double P = 0.01167;
  const int n = 100;
  double rate = tune_heating_rate(cfg, p, DrivenNoise::heating_only(0.0), P);
  auto seq = swap_sequence(cfg, p, DrivenNoise::heating_only(rate), n, SwapCheck::HeatingEach);
  double keep = seq.steps.back().keep, want = std::pow(1.0 - P, n);
  bool keep_ok = std::abs(keep - want) <= 1e-3;

  DrivenNoise full = DrivenNoise::fitted();
  full.heating = tune_heating_rate(cfg, p, full, P);
  auto er = swap_sequence(cfg, p, full, n, SwapCheck::ErasureFinal);
  auto he = swap_sequence(cfg, p, full, n, SwapCheck::HeatingEach);
  double ratio = er.infidelity_per_swap / he.infidelity_per_swap;
  bool ratio_ok = ratio >= 1.0 && ratio <= 3.0;
  return {arith && keep_ok && ratio_ok,
          fmt("F_BS=%.12f F_SWAP=%.12f; heating-only keep=%.5f vs %.5f; full noise: erasure-only eps=%.2e, "
              "per-swap check eps=%.2e, ratio=%.1f (target 2 +/- 50%%)",
              bf.F_BS, bf.F_SWAP, keep, want, er.infidelity_per_swap, he.infidelity_per_swap, ratio)};
}

Outcome heating() {
  const double P = 0.01167;
  std::vector<double> n{10, 20, 50, 100, 200}, r;
  Rng rng = make_rng(11);
  for (double k : n) {
    std::binomial_distribution<int> b(20000, 1.0 - std::pow(1.0 - P, k));
    r.push_back(b(rng) / 20000.0);
  }
  auto f = heating_fit(n, r);
  return {std::abs(f.p_up - P) <= 5e-4, fmt("P_up=%.5f +/- %.5f", f.p_up, f.stderr_)};
}

Outcome entangling() {
  auto c = entangling_power(csum(3), 3, 100000, 3);
  auto id = entangling_power(Mat::Identity(9, 9), 3, 100000, 3);
  SystemParams p;
  VrbsConfig cfg;
  cfg.detuning = -5.5e6;
  cfg.cutoff_a = cfg.cutoff_b = 3;
  auto U = extract_vrbs_unitary(cfg, p, vrbs_quarter_time(cfg, p), 3);
  auto v = entangling_power(U.matrix, 3, 100000, 3);
  bool ok = std::abs(c.value - 0.375) <= 0.003 && id.value < 1e-12 && std::abs(v.value - 0.379) <= 0.01;
  return {ok, fmt("CSUM3=%.4f(%.4f) exact %.4f; identity=%.2e; VRBS=%.4f(%.4f) exact %.4f, leakage %.1e", c.value,
                  c.stderr_, entangling_power_exact(csum(3), 3), id.value, v.value, v.stderr_,
                  entangling_power_exact(U.matrix, 3), U.leakage)};
}

Outcome synthesis() {
  SystemParams p;
  VrbsConfig cfg;
  cfg.detuning = -5.5e6;
  cfg.cutoff_a = cfg.cutoff_b = 3;
  auto U = extract_vrbs_unitary(cfg, p, vrbs_quarter_time(cfg, p), 3);
  SynthesisOptions o;
  o.restarts = 32;
  o.seed = 5;
  auto ladder = synthesis_ladder(csum(3), U.matrix, 3, 6, o);
  bool mono = true;
  std::string d = "ladder:";
  for (size_t i = 0; i < ladder.size(); ++i) {
    d += fmt(" %d:%.6f", ladder[i].n_blocks, ladder[i].fidelity);
    if (i > 0 && ladder[i].fidelity < ladder[i - 1].fidelity) mono = false;
  }
  bool ok = mono && ladder[4].fidelity >= 0.985 && ladder[5].fidelity >= 0.999;
  return {ok, d};
}

Outcome fits() {
  // TLS, seeded from the Alice row.
  TlsParams tp{8.0e-10, 73.4e-9, 1.0, 295.0, 5.779e9};
  std::vector<double> T, Q;
  for (int i = 0; i < 25; ++i) {
    T.push_back(0.01 + i * 0.02);
    Q.push_back(tls_q0(tp, T.back()));
  }
  auto tf = tls_fit(T, Q, tp.f0, tp.G);
  double e1 = std::abs(tf.params.F_delta0 / tp.F_delta0 - 1), e2 = std::abs(tf.params.R_res / tp.R_res - 1),
         e3 = std::abs(tf.params.beta / tp.beta - 1);
  bool tls_ok = e1 < 0.05 && e2 < 0.05 && e3 < 0.05;

  bool ring_ok = true;
  std::string d = fmt("TLS rel errors %.1e %.1e %.1e; ringdown:", e1, e2, e3);
  for (double tau : {25.545e-3, 19.299e-3}) {
    std::vector<double> t, y;
    for (int i = 0; i < 400; ++i) {
      t.push_back(i * 5 * tau / 399);
      y.push_back(std::exp(-t.back() / tau));
    }
    auto f = exp_decay_fit(t, y);
    double e = std::abs(f.tau / tau - 1);
    ring_ok = ring_ok && e < 1e-3;
    d += fmt(" %.4f ms", f.tau * 1e3);
  }

  ReadoutModel m;
  m.p_relax_eg = 0.0055;
  m.p_relax_fe = 0.011;
  m.classifier = symmetric_classifier(0.0024, 0.0010);
  auto rf = fit_readout_model(predicted_confusion(m));
  double err = std::max({std::abs(rf.model.p_relax_eg - m.p_relax_eg), std::abs(rf.model.p_relax_fe - m.p_relax_fe),
                         std::abs(rf.c_ge - 0.0024), std::abs(rf.c_ef - 0.0010), std::abs(rf.c_gf)});
  d += fmt("; readout max param error %.1e", err);
  return {tls_ok && ring_ok && err <= 2e-4, d};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "cavsim_acceptance";
  fs::remove_all(base);
  bool ok = true;
  std::string d;
  for (const auto& name : experiment_names()) {
    nlohmann::json cfg = example_config(name, /*quick=*/true);
    std::vector<std::string> first;
    for (int run = 0; run < 3; ++run) {
      fs::path out = base / name / std::to_string(run);
      RunOptions o;
      o.out_dir = out.string();
      o.workers = run == 2 ? 3 : 1;
      auto res = run_experiment(cfg, o);
      std::vector<std::string> payload;
      for (const auto& f : res.tables) {
        std::ifstream in(out / f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        payload.push_back(ss.str());
      }
      if (run == 0) first = payload;
      else if (payload != first) {
        ok = false;
        d += name + " differs (run " + std::to_string(run) + "); ";
      }
    }
  }
  fs::remove_all(base);
  if (ok) d = fmt("%zu experiments byte-identical across reruns and worker counts", experiment_names().size());
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<std::string, std::function<Outcome()>>> crit{
      {"Fock-decay law", fock_decay_law},
      {"coherence-limit arithmetic", coherence_limits},
      {"Trotter convergence and CPTP", trotter_convergence},
      {"protocol ordering", protocol_ordering},
      {"ceiling analysis", ceiling},
      {"VRBS physics", vrbs_physics},
      {"fidelity formula and swap post-selection", fidelity_and_swaps},
      {"heating fit", heating},
      {"entangling power", entangling},
      {"gate synthesis ladder", synthesis},
      {"fit round-trips", fits},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int failed = 0;
  for (size_t i = 0; i < crit.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = crit[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s [%2d] %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", id, crit[i].first.c_str(), s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

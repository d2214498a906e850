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

#include "cavsim/fock.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cavsim/lindblad.hpp"
#include "cavsim/limits.hpp"

namespace cavsim {

double GateDurations::sideband(int n) const {
  return sqrt_scaling ? sideband_pi0 / std::sqrt(static_cast<double>(n + 1)) : sideband_pi0;
}

Protocol parse_protocol(const std::string& s) {
  if (s == "SB") return Protocol::SB;
  if (s == "SFP") return Protocol::SFP;
  if (s == "SB+PF") return Protocol::SB_PF;
  if (s == "SFP+PF") return Protocol::SFP_PF;
  throw std::invalid_argument("unknown protocol '" + s + "'");
}

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::SB: return "SB";
    case Protocol::SFP: return "SFP";
    case Protocol::SB_PF: return "SB+PF";
    case Protocol::SFP_PF: return "SFP+PF";
  }
  return "?";
}

void ProtocolConfig::validate() const {
  if (target_n < 1) throw std::invalid_argument("target_n must be >= 1");
  if (cutoff != 0 && cutoff < target_n + 1) throw std::invalid_argument("cavity cutoff must exceed target_n");
  if (max_feedforward_retries < 0) throw std::invalid_argument("max_feedforward_retries must be >= 0");
  if (trotter_steps < 1) throw std::invalid_argument("trotter_steps must be >= 1");
  if (durations.pi_ge < 0 || durations.pi_ef < 0 || durations.sideband_pi0 < 0) {
    throw std::invalid_argument("gate durations must be >= 0");
  }
  readout.validate();
}

double ProtocolResult::peak_ratio() const {
  const int N = target_n;
  if (N < 2) return 0.0;
  double below = population.head(N - 1).sum();
  return below > 0 ? population(N - 1) / below : std::numeric_limits<double>::infinity();
}

namespace {

struct Ladder {
  HilbertSpace space;
  std::vector<Mat> jumps;       // all enabled channels
  std::vector<Mat> idle_jumps;  // cavity channels only
  int nc;

  int g(int n) const { return n; }
  int e(int n) const { return nc + n; }
  int f(int n) const { return 2 * nc + n; }
};

Ladder make_ladder(const ProtocolConfig& cfg, const SystemParams& p) {
  int nc = cfg.cutoff > 0 ? cfg.cutoff : cfg.target_n + 2;
  Ladder l{HilbertSpace({3, nc}, {"transmon", mode_name(cfg.mode)}), {}, {}, nc};
  for (auto& j : transmon_jumps(p, l.space, 0, cfg.noise)) l.jumps.push_back(j.op);
  for (auto& j : cavity_jumps(p, l.space, 1, cfg.mode, cfg.noise)) {
    l.jumps.push_back(j.op);
    l.idle_jumps.push_back(j.op);
  }
  return l;
}

class Runner {
 public:
  Runner(const ProtocolConfig& cfg, const SystemParams& p) : cfg_(cfg), l_(make_ladder(cfg, p)) {
    for (int n = 0; n < l_.nc; ++n) {
      ge_.push_back({l_.g(n), l_.e(n)});
      ef_.push_back({l_.e(n), l_.f(n)});
    }
    ro_ = cfg.noise.readout_error ? cfg.readout : ReadoutModel::ideal(cfg.readout.duration);
    chi_hz_ = cfg.mode == Mode::Alice ? p.chi_e_a : p.chi_e_b;
  }

  const Ladder& ladder() const { return l_; }
  double chi_hz() const { return chi_hz_; }

  Mat pulse(const Mat& rho, const LevelPairs& pairs, double duration) const {
    double theta = kPi * (1.0 + cfg_.angle_error);
    return apply_noisy_rotation(rho, pairs, theta, l_.jumps, duration, cfg_.trotter_steps);
  }
  Mat pi_ge(const Mat& rho) const { return pulse(rho, ge_, cfg_.durations.pi_ge); }
  Mat pi_ef(const Mat& rho) const { return pulse(rho, ef_, cfg_.durations.pi_ef); }
  Mat sideband(const Mat& rho, int n) const {
    return pulse(rho, LevelPairs{{l_.f(n), l_.g(n + 1)}}, cfg_.durations.sideband(n));
  }

  std::array<Mat, 3> measure(const Mat& rho) const { return readout_unnormalized(ro_, rho, l_.space, l_.idle_jumps); }

 private:
  const ProtocolConfig& cfg_;
  Ladder l_;
  LevelPairs ge_, ef_;
  ReadoutModel ro_;
  double chi_hz_;
};

bool uses_feedforward(Protocol p) { return p == Protocol::SFP || p == Protocol::SFP_PF; }
bool uses_filter(Protocol p) { return p == Protocol::SB_PF || p == Protocol::SFP_PF; }

}  // namespace

ParityFilterResult apply_parity_filter(const Mat& rho, const HilbertSpace& space, int target_n, double chi_hz,
                                       const std::vector<Mat>& wait_jumps) {
  if (space.num_subsystems() != 2 || space.dims()[0] != 3) {
    throw std::invalid_argument("apply_parity_filter: expected [3 transmon levels, cavity]");
  }
  if (chi_hz == 0.0) throw std::invalid_argument("apply_parity_filter: chi must be nonzero");
  const int nc = space.dims()[1];
  // Reset: trace out the transmon and start it in |g>.
  Mat cav = partial_trace(rho, space, {1});
  Mat r = Mat::Zero(space.dim(), space.dim());
  r.block(0, 0, nc, nc) = cav;
  LevelPairs ge;
  for (int n = 0; n < nc; ++n) ge.push_back({n, nc + n});
  Mat half = rotation_unitary(space.dim(), ge, kPi / 2);
  r = half * r * half.adjoint();
  // Dispersive phase chi (n - N) on |e> for a wait of pi/|chi|.
  const double chi = kTwoPi * chi_hz;
  const double wait = kPi / std::abs(chi);
  Mat H = Mat::Zero(space.dim(), space.dim());
  for (int n = 0; n < nc; ++n) H(nc + n, nc + n) = chi * (n - target_n);
  if (wait_jumps.empty()) {
    Vec ph(space.dim());
    for (int i = 0; i < space.dim(); ++i) ph(i) = std::exp(-kI * H(i, i).real() * wait);
    r = ph.asDiagonal() * r * ph.conjugate().asDiagonal();
  } else {
    DrivenHamiltonian dh{H, {}};
    r = evolve(dh, wait_jumps, r, {0.0, wait}).back();
  }
  Mat back = rotation_unitary(space.dim(), ge, -kPi / 2);
  r = back * r * back.adjoint();
  ParityFilterResult out;
  Mat kept = Mat::Zero(space.dim(), space.dim());
  kept.block(0, 0, nc, nc) = r.block(0, 0, nc, nc);
  out.keep_probability = kept.trace().real();
  out.rho_kept = out.keep_probability > 0 ? Mat(kept / out.keep_probability) : kept;
  return out;
}

ProtocolResult simulate_protocol(const ProtocolConfig& cfg, const SystemParams& p) {
  cfg.validate();
  p.validate();
  Runner run(cfg, p);
  const Ladder& l = run.ladder();
  const int N = cfg.target_n;
  const int R = cfg.max_feedforward_retries;
  const bool ff = uses_feedforward(cfg.protocol);

  ProtocolResult res;
  res.target_n = N;
  res.branch_count = 1;
  if (ff) {
    long per_step = (1L << (R + 1)) - 1;  // readout nodes per ladder step
    res.branch_count = per_step * N;
    if (R > 40 || res.branch_count > cfg.max_branches) {
      throw std::length_error("resource limit: feedforward branch count exceeds max_branches; reduce max_feedforward_retries");
    }
  }

  Mat rho = Mat::Zero(l.space.dim(), l.space.dim());
  rho(l.g(0), l.g(0)) = 1.0;
  for (int n = 0; n < N; ++n) {
    rho = run.sideband(run.pi_ef(run.pi_ge(rho)), n);
    if (!ff) continue;
    Mat pool = rho;
    Mat acc = Mat::Zero(rho.rows(), rho.cols());
    for (int r = 0; r <= R; ++r) {
      auto br = run.measure(pool);
      acc += br[0];
      if (r == R) {
        res.uncorrected_probability += (br[1] + br[2]).trace().real();
        acc += br[1] + br[2];
        break;
      }
      // f: the sideband did not fire, repeat it. e: return to f first.
      pool = run.sideband(br[2], n) + run.sideband(run.pi_ef(br[1]), n);
    }
    rho = acc;
  }

  if (uses_filter(cfg.protocol)) {
    std::vector<Mat> wait_jumps = cfg.pf_noisy_wait ? l.jumps : std::vector<Mat>{};
    auto pf = apply_parity_filter(rho, l.space, N, run.chi_hz(), wait_jumps);
    rho = pf.rho_kept;
    res.keep_probability = pf.keep_probability;
  }

  Mat cav = partial_trace(rho, l.space, {1});
  res.population = cav.diagonal().real();
  res.fidelity = res.population(N);
  res.truncation_leakage = res.population(l.nc - 1);
  res.truncation_warning = res.truncation_leakage > 1e-4;
  return res;
}

ProtocolResult simulate_sb(ProtocolConfig cfg, const SystemParams& p) {
  cfg.protocol = Protocol::SB;
  return simulate_protocol(cfg, p);
}

ProtocolResult simulate_sfp(ProtocolConfig cfg, const SystemParams& p) {
  cfg.protocol = Protocol::SFP;
  return simulate_protocol(cfg, p);
}

CeilingResult ceiling_analysis(const ProtocolConfig& cfg, const SystemParams& p, const std::vector<Channel>& channels) {
  CeilingResult out;
  out.fidelity = simulate_protocol(cfg, p).fidelity;
  for (Channel c : channels) {
    ProtocolConfig off = cfg;
    off.noise.set(c, false);
    out.contribution[c] = simulate_protocol(off, p).fidelity - out.fidelity;
  }
  return out;
}

std::vector<LifetimePoint> fock_lifetime_scan(const std::vector<int>& n_list, const SystemParams& p, Mode mode,
                                              int samples) {
  p.validate();
  if (samples < 5) throw std::invalid_argument("fock_lifetime_scan: need at least 5 samples");
  std::vector<LifetimePoint> out;
  const double T1 = mode == Mode::Alice ? p.T1_A : p.T1_B;
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("fock_lifetime_scan: n must be >= 1");
    HilbertSpace sp({n + 1}, {mode_name(mode)});
    auto ops = operators(cavity_jumps(p, sp, 0, mode));
    Mat L = lindbladian_matrix(Mat::Zero(n + 1, n + 1), ops);
    const double tmax = 3.0 * T1 / n;
    const double dt = tmax / (samples - 1);
    Mat step = propagator(L, dt);
    Vec v = vec(ket_to_dm(sp.basis({n})));
    std::vector<double> t, y;
    for (int k = 0; k < samples; ++k) {
      t.push_back(k * dt);
      y.push_back(v(n * (n + 1) + n).real());
      v = step * v;
    }
    auto fit = exp_decay_fit(t, y, true);
    out.push_back({n, fit.tau, fit.fit.stderrs[1]});
  }
  return out;
}

}  // namespace cavsim

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

#include "cavsim/vrbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "cavsim/lindblad.hpp"

namespace cavsim {

TransmonRelations transmon_relations(const SystemParams& p) {
  if (!(p.alpha < 0.0)) throw std::invalid_argument("transmon_relations: alpha must be negative");
  TransmonRelations r;
  r.E_C = -p.alpha;
  r.E_J = (p.omega_q + r.E_C) * (p.omega_q + r.E_C) / (8.0 * r.E_C);
  r.theta_q = std::pow(2.0 * r.E_C / r.E_J, 0.25);
  return r;
}

double drive_displacement(double epsilon_hz, double drive_hz, double omega_q_hz) {
  double d = drive_hz - omega_q_hz;
  if (d == 0.0) throw std::invalid_argument("drive_displacement: resonant drive");
  return epsilon_hz / (2.0 * d);
}

double sideband_drive_frequency(const SystemParams& p, Mode mode, double delta_hz) {
  double w = mode == Mode::Alice ? p.omega_a : p.omega_b;
  return 2.0 * p.omega_q + p.alpha - w - delta_hz;
}

double mode_detuning(const SystemParams& p, Mode mode) {
  return p.omega_q - (mode == Mode::Alice ? p.omega_a : p.omega_b);
}

double sideband_rate_from_xi(const SystemParams& p, Mode mode, double xi) {
  double g = mode == Mode::Alice ? p.g_a : p.g_b;
  return std::sqrt(2.0) * std::abs(p.alpha * xi * g / mode_detuning(p, mode));
}

namespace {

double xi_from_rate(const SystemParams& p, Mode mode, double g_sb) {
  double g = mode == Mode::Alice ? p.g_a : p.g_b;
  return g_sb * mode_detuning(p, mode) / (std::sqrt(2.0) * p.alpha * g);
}

}  // namespace

double VrbsConfig::xi_1(const SystemParams& p) const {
  if (epsilon_1 > 0.0) {
    return drive_displacement(epsilon_1, sideband_drive_frequency(p, Mode::Alice, detuning), p.omega_q);
  }
  return xi_from_rate(p, Mode::Alice, g_sb_a);
}

double VrbsConfig::xi_2(const SystemParams& p) const {
  if (epsilon_2 > 0.0) {
    return drive_displacement(epsilon_2, sideband_drive_frequency(p, Mode::Bob, detuning), p.omega_q);
  }
  return xi_from_rate(p, Mode::Bob, g_sb_b);
}

double VrbsConfig::sideband_a(const SystemParams& p) const {
  return epsilon_1 > 0.0 ? sideband_rate_from_xi(p, Mode::Alice, xi_1(p)) : g_sb_a;
}

double VrbsConfig::sideband_b(const SystemParams& p) const {
  return epsilon_2 > 0.0 ? sideband_rate_from_xi(p, Mode::Bob, xi_2(p)) : g_sb_b;
}

void VrbsConfig::validate() const {
  if (transmon_levels < 3) throw std::invalid_argument("vrbs: transmon_levels must be >= 3");
  if (cutoff_a < 1 || cutoff_b < 1) throw std::invalid_argument("vrbs: cutoffs must be >= 1");
  if (g_sb_a < 0 || g_sb_b < 0 || epsilon_1 < 0 || epsilon_2 < 0) {
    throw std::invalid_argument("vrbs: drive strengths must be >= 0");
  }
}

BsRate effective_bs_rate(const VrbsConfig& cfg, const SystemParams& p) {
  if (cfg.detuning == 0.0) throw std::invalid_argument("effective_bs_rate: Delta = 0 is outside the perturbative regime");
  double da = mode_detuning(p, Mode::Alice), db = mode_detuning(p, Mode::Bob);
  if (da == 0.0 || db == 0.0) throw std::invalid_argument("effective_bs_rate: resonant mode");
  BsRate r;
  r.bracket = 2.0 * p.alpha / cfg.detuning + 0.5;
  r.ratio_to_direct = r.bracket / 0.5;
  double base = kTwoPi * p.alpha * cfg.xi_1(p) * cfg.xi_2(p) * (p.g_a / da) * (p.g_b / db);
  r.rate = r.bracket * base;
  return r;
}

Mat nonlinear_bs_hamiltonian(double g_bs, double chi, double delta, int d) {
  if (d < 1) throw std::invalid_argument("nonlinear_bs_hamiltonian: d must be >= 1");
  if (delta == 0.0) throw std::invalid_argument("nonlinear_bs_hamiltonian: Delta = 0");
  HilbertSpace sp({d, d});
  Mat a = sp.annihilation(0), b = sp.annihilation(1);
  Mat hop = a * b.adjoint() + a.adjoint() * b;
  Mat corr = Mat::Identity(sp.dim(), sp.dim()) - (2.0 * chi / delta) * (sp.number(0) + sp.number(1) - sp.identity());
  Mat H = g_bs * hop * corr;
  return 0.5 * (H + H.adjoint());
}

HilbertSpace vrbs_space(const VrbsConfig& cfg) {
  return HilbertSpace({cfg.transmon_levels, cfg.cutoff_a, cfg.cutoff_b}, {"transmon", "Alice", "Bob"});
}

Mat vrbs_hamiltonian(const VrbsConfig& cfg, const SystemParams& p) {
  cfg.validate();
  HilbertSpace sp = vrbs_space(cfg);
  const double D = kTwoPi * cfg.detuning, al = kTwoPi * p.alpha;
  const double chia = kTwoPi * (cfg.common_chi ? cfg.chi : p.chi_e_a);
  const double chib = kTwoPi * (cfg.common_chi ? cfg.chi : p.chi_e_b);
  Mat q = sp.annihilation(0), a = sp.annihilation(1), b = sp.annihilation(2);
  Mat nq = sp.number(0);
  Mat H = Mat::Zero(sp.dim(), sp.dim());
  for (int l = 0; l < cfg.transmon_levels; ++l) {
    double e = l * (D - al) / 2.0 + al / 2.0 * l * (l - 1);
    H += e * sp.projector(0, l);
  }
  H += chia * nq * sp.number(1) + chib * nq * sp.number(2);
  const double ca = kTwoPi * cfg.sideband_a(p) / std::sqrt(2.0);
  const double cb = kTwoPi * cfg.sideband_b(p) / std::sqrt(2.0);
  Mat q2 = q.adjoint() * q.adjoint();
  Mat V = ca * q2 * a + cb * q2 * b;
  if (cfg.direct_four_wave) V += (ca * cb / (2.0 * al)) * a * b.adjoint();
  H += V + V.adjoint();
  return H;
}

DrivenNoise DrivenNoise::fitted() { return DrivenNoise{}; }

DrivenNoise DrivenNoise::none() { return DrivenNoise{0, 0, 0, 0, 0}; }

DrivenNoise DrivenNoise::heating_only(double rate) { return DrivenNoise{0, rate, 0, 0, 0}; }

std::vector<Mat> driven_jumps(const HilbertSpace& space, const DrivenNoise& n) {
  std::vector<Mat> out;
  Mat q = space.annihilation(0);
  auto add = [&](double rate, const Mat& op) {
    if (rate < 0.0) throw std::invalid_argument("driven_jumps: negative rate");
    if (rate > 0.0) out.push_back(std::sqrt(rate) * op);
  };
  add(n.decay, q);
  add(n.heating, q.adjoint());
  add(n.dephasing, space.number(0));
  add(n.kappa_a, space.annihilation(1));
  add(n.kappa_b, space.annihilation(2));
  return out;
}

namespace {

// Columns of V (eigenvectors) whose weight on `rows` is largest, excluding `taken`.
std::vector<int> pick_states(const Mat& V, const std::vector<int>& rows, std::vector<char>& taken) {
  const int n = static_cast<int>(V.cols());
  std::vector<double> w(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i : rows) w[j] += std::norm(V(i, j));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return w[x] > w[y]; });
  std::vector<int> sel;
  for (int j : order) {
    if (static_cast<int>(sel.size()) == static_cast<int>(rows.size())) break;
    if (taken[j]) continue;
    sel.push_back(j);
    taken[j] = 1;
  }
  return sel;
}

}  // namespace

DressedFrame dressed_frame(const Mat& H, const HilbertSpace& space) {
  if (H.rows() != space.dim()) throw std::invalid_argument("dressed_frame: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.adjoint()));
  const Mat& V = es.eigenvectors();
  const RVec& E = es.eigenvalues();
  const int nq = space.dims()[0];
  const int block = space.dim() / nq;
  std::vector<char> taken(space.dim(), 0);
  DressedFrame out;
  out.basis = Mat::Zero(space.dim(), space.dim());
  for (int l = 0; l < nq; ++l) {
    std::vector<int> rows(block);
    std::iota(rows.begin(), rows.end(), l * block);
    std::vector<int> sel = pick_states(V, rows, taken);
    Mat X(block, block);
    Mat Vs(space.dim(), block);
    RVec Es(block);
    for (int c = 0; c < block; ++c) {
      Vs.col(c) = V.col(sel[c]);
      Es(c) = E(sel[c]);
      for (int r = 0; r < block; ++r) X(r, c) = V(rows[r], sel[c]);
    }
    Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat W = svd.matrixU() * svd.matrixV().adjoint();
    Mat emb = Vs * W.adjoint();
    out.basis.middleCols(l * block, block) = emb;
    if (l == 0) {
      out.g_indices = rows;
      out.H_eff = W * Es.asDiagonal() * W.adjoint();
      out.projector = Vs * Vs.adjoint();
      out.embedding = emb;
      out.min_overlap = svd.singularValues().minCoeff();
    }
  }
  if (space.num_subsystems() == 3 && space.dims()[1] >= 2 && space.dims()[2] >= 2) {
    int i10 = space.index({0, 1, 0}), i01 = space.index({0, 0, 1});
    out.g_bs = std::abs(out.H_eff(i10, i01));
  }
  return out;
}

SidebandCalibration calibrate_sideband(const SystemParams& p, Mode mode, double epsilon_hz, double half_width_hz,
                                       int points, double centre_hz, int transmon_levels) {
  if (!(epsilon_hz > 0.0)) throw CalibrationError("calibrate_sideband: no oscillation (zero drive amplitude)");
  if (points < 3 || !(half_width_hz > 0.0)) throw std::invalid_argument("calibrate_sideband: bad scan window");
  const double bare = sideband_drive_frequency(p, mode, 0.0);
  if (centre_hz == 0.0) centre_hz = bare;
  HilbertSpace sp({transmon_levels, 2}, {"transmon", mode_name(mode)});
  const double al = kTwoPi * p.alpha;
  const double chi = kTwoPi * (mode == Mode::Alice ? p.chi_e_a : p.chi_e_b);
  Mat q = sp.annihilation(0), a = sp.annihilation(1);
  Mat q2a = q.adjoint() * q.adjoint() * a;
  const int g1 = sp.index({0, 1}), f0 = sp.index({2, 0});

  struct Eval {
    double contrast;
    double g_sb;
  };
  auto evaluate = [&](double drive_hz) -> Eval {
    double xi = drive_displacement(epsilon_hz, drive_hz, p.omega_q);
    double stark = 2.0 * al * xi * xi;
    double delta = kTwoPi * (bare - drive_hz);
    Mat H = Mat::Zero(sp.dim(), sp.dim());
    for (int l = 0; l < transmon_levels; ++l) {
      double e = l * (delta - al) / 2.0 + al / 2.0 * l * (l - 1) + stark * l;
      H += e * sp.projector(0, l);
    }
    H += chi * sp.number(0) * sp.number(1);
    double c = kTwoPi * sideband_rate_from_xi(p, mode, xi) / std::sqrt(2.0);
    H += c * (q2a + q2a.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const Mat& V = es.eigenvectors();
    std::vector<std::pair<double, int>> amp;
    double total = 0.0;
    for (int k = 0; k < sp.dim(); ++k) {
      double w = std::abs(std::conj(V(f0, k)) * V(g1, k));
      total += w;
      amp.push_back({w, k});
    }
    std::sort(amp.begin(), amp.end(), [](auto x, auto y) { return x.first > y.first; });
    double split = std::abs(es.eigenvalues()(amp[0].second) - es.eigenvalues()(amp[1].second));
    return {std::min(1.0, total * total), split / 2.0 / kTwoPi};
  };

  SidebandCalibration out;
  int best = 0;
  for (int i = 0; i < points; ++i) {
    double f = centre_hz - half_width_hz + 2.0 * half_width_hz * i / (points - 1);
    out.scan_frequency.push_back(f);
    out.scan_contrast.push_back(evaluate(f).contrast);
    if (out.scan_contrast[i] > out.scan_contrast[best]) best = i;
  }
  if (best == 0 || best == points - 1) throw CalibrationError("calibrate_sideband: resonance not inside the scan window");
  double lo = out.scan_frequency[best - 1], hi = out.scan_frequency[best + 1];
  auto r = boost::math::tools::brent_find_minima([&](double f) { return -evaluate(f).contrast; }, lo, hi, 50);
  Eval e = evaluate(r.first);
  if (e.contrast < 0.5) throw CalibrationError("calibrate_sideband: no resonant oscillation detected");
  out.resonance_hz = r.first;
  out.contrast = e.contrast;
  out.g_sb = e.g_sb;
  return out;
}

VrbsTrace simulate_vrbs(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, double t_max,
                        int samples) {
  if (cfg.cutoff_a < 2 || cfg.cutoff_b < 2) throw std::invalid_argument("simulate_vrbs: cutoffs must be >= 2");
  if (samples < 2 || !(t_max > 0.0)) throw std::invalid_argument("simulate_vrbs: bad sampling");
  HilbertSpace sp = vrbs_space(cfg);
  Mat H = vrbs_hamiltonian(cfg, p);
  Mat L = lindbladian_matrix(H, driven_jumps(sp, noise));
  const double dt = t_max / (samples - 1);
  Mat P = propagator(L, dt);
  const int d = sp.dim();
  const int block = d / cfg.transmon_levels;
  const int i10 = sp.index({0, 1, 0}), i01 = sp.index({0, 0, 1});
  Vec v = vec(ket_to_dm(sp.basis({0, 1, 0})));
  VrbsTrace tr;
  for (int k = 0; k < samples; ++k) {
    double pg = 0.0;
    for (int i = 0; i < block; ++i) pg += v(i * d + i).real();
    tr.t.push_back(k * dt);
    tr.p_alice.push_back(v(i10 * d + i10).real() / pg);
    tr.p_bob.push_back(v(i01 * d + i01).real() / pg);
    tr.p_excited.push_back(1.0 - pg);
    if (k + 1 < samples) v = P * v;
  }
  if (!std::isfinite(tr.p_alice.back())) throw NumericalError("simulate_vrbs: non-finite populations");
  return tr;
}

double bs_model(double t, double g, double k1, double kphi, int sign) {
  return 0.5 * std::exp(-k1 * t) * (1.0 + sign * std::exp(-kphi * t) * std::cos(2.0 * g * t));
}

BsOscillationFit fit_bs_oscillation(const std::vector<double>& t, const std::vector<double>& y) {
  const size_t n = t.size();
  if (n != y.size() || n < 16) throw std::invalid_argument("fit_bs_oscillation: need >= 16 matching samples");
  const double dt = t[1] - t[0];
  if (!(dt > 0.0)) throw std::invalid_argument("fit_bs_oscillation: times must increase");
  for (size_t i = 1; i < n; ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt) throw std::invalid_argument("fit_bs_oscillation: non-uniform sampling");
  }
  const double T = t.back() - t.front();
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  std::vector<double> yc(n);
  for (size_t i = 0; i < n; ++i) yc[i] = y[i] - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, yc);
  size_t peak = 1;
  for (size_t k = 1; k <= n / 2; ++k) {
    if (std::abs(spectrum[k]) > std::abs(spectrum[peak])) peak = k;
  }
  const double df = 1.0 / (n * dt);
  double f0 = peak * df;
  // Refine the peak with a direct correlation scan.
  double best = -1.0, fbest = f0;
  for (int k = 0; k <= 2000; ++k) {
    double f = f0 - 2.0 * df + 4.0 * df * k / 2000.0;
    if (f <= 0) continue;
    std::complex<double> s = 0.0;
    for (size_t i = 0; i < n; ++i) s += yc[i] * std::exp(std::complex<double>(0.0, -kTwoPi * f * (t[i] - t[0])));
    if (std::abs(s) > best) {
      best = std::abs(s);
      fbest = f;
    }
  }
  const double g0 = kPi * fbest;
  if (g0 * T / kPi < 3.0) throw std::invalid_argument("fit_bs_oscillation: trace spans fewer than 3 periods");
  const int sign = y.front() >= 0.5 ? 1 : -1;

  // Envelope estimates over one-period windows.
  const double period = kPi / g0;
  size_t w = std::max<size_t>(2, static_cast<size_t>(period / dt));
  std::vector<double> tm, lm, la;
  for (size_t s = 0; s + w <= n; s += w) {
    double mu = 0.0, mx = -1e300, mn = 1e300;
    for (size_t i = s; i < s + w; ++i) {
      mu += y[i];
      mx = std::max(mx, y[i]);
      mn = std::min(mn, y[i]);
    }
    mu /= w;
    if (mu <= 0.0 || mx - mn <= 0.0) continue;
    tm.push_back(t[s] + 0.5 * w * dt - t[0]);
    lm.push_back(std::log(2.0 * mu));
    la.push_back(std::log(mx - mn));
  }
  auto slope = [](const std::vector<double>& x, const std::vector<double>& v) {
    double m = static_cast<double>(x.size());
    if (m < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += v[i];
      sxx += x[i] * x[i];
      sxy += x[i] * v[i];
    }
    double den = m * sxx - sx * sx;
    return den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
  };
  double k1_0 = std::max(0.0, -slope(tm, lm));
  double kp_0 = std::max(0.0, -slope(tm, la) - k1_0);

  LeastSquaresProblem prob;
  prob.names = {"g_bs", "kappa_1", "kappa_phi"};
  prob.initial = {0.0, k1_0 * T, kp_0 * T};
  prob.lower = {-0.5, 0.0, 0.0};
  prob.upper = {0.5, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  prob.num_residuals = static_cast<int>(n);
  const double t0 = t.front();
  prob.residuals = [&](const double* x, double* r) {
    double g = g0 * (1.0 + x[0]), k1 = x[1] / T, kp = x[2] / T;
    for (size_t i = 0; i < n; ++i) r[i] = bs_model(t[i] - t0, g, k1, kp, sign) - y[i];
  };
  prob.jacobian = [&](const double* x, double* J) {
    double g = g0 * (1.0 + x[0]), k1 = x[1] / T, kp = x[2] / T;
    for (size_t i = 0; i < n; ++i) {
      double tt = t[i] - t0;
      double e1 = std::exp(-k1 * tt), ep = std::exp(-kp * tt);
      double c = std::cos(2.0 * g * tt), s = std::sin(2.0 * g * tt);
      double m = 0.5 * e1 * (1.0 + sign * ep * c);
      J[3 * i + 0] = 0.5 * e1 * sign * ep * (-s) * 2.0 * tt * g0;
      J[3 * i + 1] = -m * tt / T;
      J[3 * i + 2] = 0.5 * e1 * sign * (-tt / T) * ep * c;
    }
  };
  FitResult f = least_squares(prob);
  if (!f.converged) throw NumericalError("fit_bs_oscillation: " + f.message);
  BsOscillationFit out;
  out.sign = sign;
  out.g_bs = g0 * (1.0 + f.params[0]);
  out.kappa_1 = f.params[1] / T;
  out.kappa_phi = f.params[2] / T;
  RVec s(3);
  s << g0, 1.0 / T, 1.0 / T;
  f.covariance = s.asDiagonal() * f.covariance * s.asDiagonal();
  for (int i = 0; i < 3; ++i) f.stderrs[i] *= s(i);
  f.params = {out.g_bs, out.kappa_1, out.kappa_phi};
  out.fit = f;
  return out;
}

BsFidelity bs_fidelity(double g_bs, double kappa_1, double kappa_phi) {
  if (!(g_bs > 0.0)) throw std::invalid_argument("bs_fidelity: g_BS must be > 0");
  double kbs = kappa_1 + kappa_phi / 2.0;
  BsFidelity f;
  f.F_BS = 1.0 - kPi / 4.0 * kbs / g_bs;
  f.F_SWAP = 1.0 - kPi / 2.0 * kbs / g_bs;
  f.valid = f.F_BS >= 0.5 && f.F_SWAP >= 0.5;
  return f;
}

BsFidelity bs_fidelity(const BsOscillationFit& fit) { return bs_fidelity(fit.g_bs, fit.kappa_1, fit.kappa_phi); }

SweepPoint vrbs_sweep_point(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, double t_max,
                            int samples) {
  VrbsTrace tr = simulate_vrbs(cfg, p, noise, t_max, samples);
  BsOscillationFit fit = fit_bs_oscillation(tr.t, tr.p_alice);
  SweepPoint s;
  s.detuning = cfg.detuning;
  s.g_bs = fit.g_bs;
  s.kappa_1 = fit.kappa_1;
  s.kappa_phi = fit.kappa_phi;
  s.F_BS = bs_fidelity(fit).F_BS;
  return s;
}

SwapCheck parse_swap_check(const std::string& s) {
  if (s == "none") return SwapCheck::None;
  if (s == "erasure_final") return SwapCheck::ErasureFinal;
  if (s == "heating_each") return SwapCheck::HeatingEach;
  throw std::invalid_argument("unknown swap check '" + s + "'");
}

std::string swap_check_name(SwapCheck c) {
  switch (c) {
    case SwapCheck::None: return "none";
    case SwapCheck::ErasureFinal: return "erasure_final";
    case SwapCheck::HeatingEach: return "heating_each";
  }
  return "?";
}

namespace {

struct SwapSetup {
  HilbertSpace space;
  DressedFrame frame;
  double swap_time;
  Mat P;  // one-swap propagator
  Vec rho0;
};

SwapSetup swap_setup(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise) {
  if (cfg.cutoff_a < 2 || cfg.cutoff_b < 2) throw std::invalid_argument("swap_sequence: cutoffs must be >= 2");
  HilbertSpace sp = vrbs_space(cfg);
  Mat H = vrbs_hamiltonian(cfg, p);
  DressedFrame fr = dressed_frame(H, sp);
  if (!(fr.g_bs > 0.0)) throw NumericalError("swap_sequence: vanishing beamsplitter rate");
  double tsw = kPi / (2.0 * fr.g_bs);
  Mat P = propagator(lindbladian_matrix(H, driven_jumps(sp, noise)), tsw);
  Vec psi = fr.basis.col(sp.index({0, 1, 0}));
  return {sp, fr, tsw, P, vec(ket_to_dm(psi))};
}

double first_detection(const SwapSetup& s) {
  Mat r = unvec(s.P * s.rho0);
  return 1.0 - (s.frame.projector * r * s.frame.projector).trace().real();
}

}  // namespace

SwapSequenceResult swap_sequence(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, int n_swaps,
                                 SwapCheck check) {
  if (n_swaps < 1) throw std::invalid_argument("swap_sequence: n_swaps must be >= 1");
  SwapSetup s = swap_setup(cfg, p, noise);
  const HilbertSpace& sp = s.space;
  const int nq = cfg.transmon_levels;
  SwapSequenceResult out;
  out.swap_time = s.swap_time;
  Vec v = s.rho0;
  double keep = 1.0;
  const Mat& B = s.frame.basis;
  const Mat& Pd = s.frame.projector;
  for (int k = 1; k <= n_swaps; ++k) {
    v = s.P * v;
    Mat r = unvec(v);
    SwapStep st;
    if (check == SwapCheck::HeatingEach) {
      r = Pd * r * Pd;
      double surv = r.trace().real();
      st.detected = 1.0 - surv;
      keep *= surv;
      r /= surv;
      v = vec(r);
    }
    st.keep = keep;
    Mat rr = B.adjoint() * r * B;
    for (int l = 0; l < nq; ++l) {
      st.p10 += rr(sp.index({l, 1, 0}), sp.index({l, 1, 0})).real();
      st.p01 += rr(sp.index({l, 0, 1}), sp.index({l, 0, 1})).real();
      st.p00 += rr(sp.index({l, 0, 0}), sp.index({l, 0, 0})).real();
    }
    out.steps.push_back(st);
  }
  const SwapStep& last = out.steps.back();
  double correct = (n_swaps % 2 == 1) ? last.p01 : last.p10;
  out.correct = check == SwapCheck::None ? correct : correct / (last.p10 + last.p01);
  double contrast = std::max(0.0, 2.0 * out.correct - 1.0);
  out.infidelity_per_swap = 0.5 * (1.0 - std::pow(contrast, 1.0 / n_swaps));
  return out;
}

double tune_heating_rate(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, double p_per_swap) {
  if (!(p_per_swap > 0.0 && p_per_swap < 1.0)) throw std::invalid_argument("tune_heating_rate: probability outside (0, 1)");
  auto detect = [&](double rate) {
    DrivenNoise n = noise;
    n.heating = rate;
    return first_detection(swap_setup(cfg, p, n)) - p_per_swap;
  };
  double lo = 0.0, hi = 1000.0;
  if (detect(lo) >= 0.0) throw NumericalError("tune_heating_rate: detection exceeds target without heating");
  int guard = 0;
  while (detect(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60) throw NumericalError("tune_heating_rate: could not bracket the target");
  }
  boost::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
  auto r = boost::math::tools::toms748_solve(detect, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

HeatingFit heating_fit(const std::vector<double>& n, const std::vector<double>& rates) {
  if (n.size() != rates.size() || n.empty()) throw std::invalid_argument("heating_fit: length mismatch");
  for (size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] >= 1.0)) throw std::invalid_argument("heating_fit: n must be >= 1");
    if (!(rates[i] >= 0.0 && rates[i] <= 1.0)) throw std::invalid_argument("heating_fit: rates must lie in [0, 1]");
  }
  HeatingFit out;
  if (std::all_of(rates.begin(), rates.end(), [](double r) { return r == 0.0; })) {
    out.degenerate = true;
    out.stderr_ = std::numeric_limits<double>::infinity();
    return out;
  }
  if (n.size() == 1) {
    out.p_up = 1.0 - std::pow(1.0 - rates[0], 1.0 / n[0]);
    out.stderr_ = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  // Initial value from the pooled log-survival.
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n.size(); ++i) {
    if (rates[i] < 1.0) {
      num += n[i] * std::log1p(-rates[i]);
      den += n[i] * n[i];
    }
  }
  double p0 = den > 0 ? 1.0 - std::exp(num / den) : 0.5;
  LeastSquaresProblem prob;
  prob.names = {"p_up"};
  prob.initial = {p0};
  prob.lower = {0.0};
  prob.upper = {1.0};
  prob.num_residuals = static_cast<int>(n.size());
  prob.residuals = [&](const double* x, double* r) {
    for (size_t i = 0; i < n.size(); ++i) r[i] = 1.0 - std::pow(1.0 - x[0], n[i]) - rates[i];
  };
  prob.jacobian = [&](const double* x, double* J) {
    for (size_t i = 0; i < n.size(); ++i) J[i] = n[i] * std::pow(1.0 - x[0], n[i] - 1.0);
  };
  FitResult f = least_squares(prob);
  if (!f.converged && f.residual_norm > 1e-8) throw NumericalError("heating_fit: " + f.message);
  out.p_up = f.params[0];
  out.stderr_ = f.stderrs[0];
  return out;
}

}  // namespace cavsim

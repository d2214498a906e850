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

#include "cavsim/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cavsim/types.hpp"

namespace cavsim {

double purcell_limit(double delta_hz, double g_hz, double T2E) {
  if (g_hz == 0.0) throw std::invalid_argument("purcell_limit: g must be nonzero");
  if (T2E <= 0.0) throw std::invalid_argument("purcell_limit: T2E must be > 0");
  double r = delta_hz / g_hz;
  return r * r * T2E / 2.0;
}

double thermal_dephasing_limit(double chi_hz, double T1q, double n_th) {
  if (chi_hz == 0.0) throw std::invalid_argument("thermal_dephasing_limit: chi must be nonzero");
  if (T1q <= 0.0) throw std::invalid_argument("thermal_dephasing_limit: T1 must be > 0");
  if (n_th < 0.0) throw std::invalid_argument("thermal_dephasing_limit: n_th must be >= 0");
  if (n_th == 0.0) return std::numeric_limits<double>::infinity();
  double chi = kTwoPi * chi_hz;
  double g = 1.0 / T1q;
  return (chi * chi + g * g) / (n_th * g * chi * chi);
}

double loss_rate_from_participation(double f_hz, double p, double tan_delta) {
  if (p < 0.0 || tan_delta < 0.0) throw std::invalid_argument("loss_rate_from_participation: negative input");
  return kTwoPi * f_hz * p * tan_delta;
}

double surface_loss_rate(double f_hz, const std::vector<SurfaceLoss>& interfaces) {
  double k = 0.0;
  for (const auto& s : interfaces) k += loss_rate_from_participation(f_hz, s.p, s.tan_delta);
  return k;
}

double internal_q(double q_loaded, double q_ext) {
  if (q_loaded <= 0.0 || q_ext <= 0.0) throw std::invalid_argument("internal_q: Q must be > 0");
  double inv = 1.0 / q_loaded - 1.0 / q_ext;
  if (inv <= 0.0) throw std::invalid_argument("internal_q: Q_loaded must be below Q_ext");
  return 1.0 / inv;
}

double tls_inverse_q(const TlsParams& p, double T) {
  if (T <= 0.0) throw std::invalid_argument("tls_inverse_q: temperature must be > 0");
  if (p.G <= 0.0) throw std::invalid_argument("tls_inverse_q: geometry factor must be > 0");
  double x = p.beta * constants::hbar * kTwoPi * p.f0 / (2.0 * constants::kB * T);
  return p.F_delta0 * std::tanh(x) + p.R_res / p.G;
}

double tls_q0(const TlsParams& p, double T) { return 1.0 / tls_inverse_q(p, T); }

TlsFit tls_fit(const std::vector<double>& T, const std::vector<double>& Q0, double f0, double G) {
  if (T.size() != Q0.size()) throw std::invalid_argument("tls_fit: length mismatch");
  if (T.size() < 4) throw std::invalid_argument("tls_fit: need at least 4 points");
  if (G <= 0.0 || f0 <= 0.0) throw std::invalid_argument("tls_fit: G and f0 must be > 0");
  const size_t n = T.size();
  for (size_t i = 0; i < n; ++i) {
    if (!(T[i] > 0.0) || !(Q0[i] > 0.0)) throw std::invalid_argument("tls_fit: T and Q0 must be > 0");
  }
  // Initial values from the coldest and hottest points.
  size_t lo = std::min_element(T.begin(), T.end()) - T.begin();
  size_t hi = std::max_element(T.begin(), T.end()) - T.begin();
  double inv_lo = 1.0 / Q0[lo], inv_hi = 1.0 / Q0[hi];
  auto th = [&](double beta, double t) {
    return std::tanh(beta * constants::hbar * kTwoPi * f0 / (2.0 * constants::kB * t));
  };
  double a = th(1.0, T[lo]), b = th(1.0, T[hi]);
  double F0 = (a - b) > 1e-6 ? (inv_lo - inv_hi) / (a - b) : inv_lo;
  double R0 = std::max(0.0, inv_lo - F0 * a) * G;
  if (!(F0 > 0.0)) throw NumericalError("tls_fit: data show no temperature dependence");
  const double fs = F0, rs = std::max(R0, 1e-3 * F0 * G);

  LeastSquaresProblem p;
  p.names = {"F_delta0", "R_res", "beta"};
  p.initial = {1.0, R0 / rs, 1.0};
  p.lower = {0.0, 0.0, 1e-3};
  p.upper = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 1e3};
  p.num_residuals = static_cast<int>(n);
  p.residuals = [&](const double* x, double* r) {
    TlsParams q{x[0] * fs, x[1] * rs, x[2], G, f0};
    for (size_t i = 0; i < n; ++i) r[i] = tls_inverse_q(q, T[i]) * Q0[i] - 1.0;
  };
  FitResult f = least_squares(p);
  if (!f.converged) throw NumericalError("tls_fit: " + f.message);
  TlsFit out;
  out.params = {f.params[0] * fs, f.params[1] * rs, f.params[2], G, f0};
  f.params = {out.params.F_delta0, out.params.R_res, out.params.beta};
  f.stderrs[0] *= fs;
  f.stderrs[1] *= rs;
  RVec s(3);
  s << fs, rs, 1.0;
  f.covariance = s.asDiagonal() * f.covariance * s.asDiagonal();
  out.fit = f;
  return out;
}

ExpDecayFit exp_decay_fit(const std::vector<double>& t, const std::vector<double>& y, bool with_offset) {
  if (t.size() != y.size()) throw std::invalid_argument("exp_decay_fit: length mismatch");
  if (t.size() < 5) throw std::invalid_argument("exp_decay_fit: need at least 5 points");
  const size_t n = t.size();
  double ymin = *std::min_element(y.begin(), y.end());
  double ymax = *std::max_element(y.begin(), y.end());
  double span = ymax - ymin;
  if (!(span > 0.0)) throw NumericalError("exp_decay_fit: flat data");
  double c0 = with_offset ? ymin - 0.01 * span : 0.0;
  // Log-linear estimate.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < n; ++i) {
    double v = y[i] - c0;
    if (v <= 0.02 * span) continue;
    double l = std::log(v);
    sx += t[i];
    sy += l;
    sxx += t[i] * t[i];
    sxy += t[i] * l;
    ++m;
  }
  double slope = (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  if (!(slope < 0.0)) throw NumericalError("exp_decay_fit: data are not decaying");
  double tau0 = -1.0 / slope;
  double a0 = std::exp((sy - slope * sx) / m);
  const double t0 = t.front();
  const double ts = tau0, as = std::max(std::abs(a0), 1e-300);

  LeastSquaresProblem p;
  p.names = with_offset ? std::vector<std::string>{"amplitude", "tau", "offset"}
                        : std::vector<std::string>{"amplitude", "tau"};
  p.initial = with_offset ? std::vector<double>{a0 * std::exp(-t0 / tau0) / as, 1.0, c0 / as}
                          : std::vector<double>{a0 * std::exp(-t0 / tau0) / as, 1.0};
  p.num_residuals = static_cast<int>(n);
  p.residuals = [&](const double* x, double* r) {
    double c = with_offset ? x[2] : 0.0;
    for (size_t i = 0; i < n; ++i) r[i] = (x[0] * std::exp(-(t[i] - t0) / (x[1] * ts)) + c) - y[i] / as;
  };
  p.jacobian = [&](const double* x, double* J) {
    const int k = with_offset ? 3 : 2;
    for (size_t i = 0; i < n; ++i) {
      double tt = (t[i] - t0) / ts;
      double e = std::exp(-tt / x[1]);
      J[i * k + 0] = e;
      J[i * k + 1] = x[0] * e * tt / (x[1] * x[1]);
      if (with_offset) J[i * k + 2] = 1.0;
    }
  };
  FitResult f = least_squares(p);
  if (!f.converged || !(f.params[1] > 0.0)) throw NumericalError("exp_decay_fit: " + f.message);
  ExpDecayFit out;
  out.tau = f.params[1] * ts;
  out.amplitude = f.params[0] * as * std::exp(t0 / out.tau);
  out.offset = with_offset ? f.params[2] * as : 0.0;
  f.params[0] = out.amplitude;
  f.params[1] = out.tau;
  if (with_offset) f.params[2] = out.offset;
  RVec s(f.params.size());
  s(0) = as * std::exp(t0 / out.tau);
  s(1) = ts;
  if (with_offset) s(2) = as;
  f.covariance = s.asDiagonal() * f.covariance * s.asDiagonal();
  for (Eigen::Index i = 0; i < s.size(); ++i) f.stderrs[i] *= s(i);
  f.residual_norm *= as;
  out.fit = f;
  return out;
}

}  // namespace cavsim

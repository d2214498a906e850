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

#pragma once

#include <vector>

#include "cavsim/fit.hpp"

namespace cavsim {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double kB = 1.380649e-23;       // J/K
}  // namespace constants

// (delta/g)^2 * T2E / 2. delta and g in Hz, T2E in s.
double purcell_limit(double delta_hz, double g_hz, double T2E);

// (chi^2 + T1^-2) / (n_th T1^-1 chi^2) with chi in rad/s; +inf when n_th == 0.
double thermal_dephasing_limit(double chi_hz, double T1q, double n_th);

// kappa = omega p tan(delta), omega = 2 pi f. Returns 1/s.
double loss_rate_from_participation(double f_hz, double p, double tan_delta);

struct SurfaceLoss {
  double p;
  double tan_delta;
};
double surface_loss_rate(double f_hz, const std::vector<SurfaceLoss>& interfaces);

// 1/Q0 = 1/QL - 1/Qext
double internal_q(double q_loaded, double q_ext);

struct TlsParams {
  double F_delta0 = 0.0;
  double R_res = 0.0;  // ohm
  double beta = 1.0;
  double G = 0.0;      // ohm
  double f0 = 0.0;     // Hz
};

double tls_inverse_q(const TlsParams& p, double T);
double tls_q0(const TlsParams& p, double T);

struct TlsFit {
  TlsParams params;
  FitResult fit;
};

// Fits F_delta0, R_res and beta; G and f0 are inputs.
TlsFit tls_fit(const std::vector<double>& T, const std::vector<double>& Q0, double f0, double G);

struct ExpDecayFit {
  double amplitude = 0.0;
  double tau = 0.0;
  double offset = 0.0;
  FitResult fit;
};

// y = A exp(-t/tau) + C
ExpDecayFit exp_decay_fit(const std::vector<double>& t, const std::vector<double>& y, bool with_offset = true);

}  // namespace cavsim

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

#include <string>
#include <vector>

#include "cavsim/fit.hpp"
#include "cavsim/noise.hpp"
#include "cavsim/state.hpp"

namespace cavsim {

// Transmon quantities implied by (omega_q, alpha): E_C = -alpha,
// omega_q = sqrt(8 E_J E_C) - E_C, theta_q = (2 E_C / E_J)^(1/4). Hz.
struct TransmonRelations {
  double E_J = 0.0;
  double E_C = 0.0;
  double theta_q = 0.0;
};
TransmonRelations transmon_relations(const SystemParams& p);

// Linear-response displacement of a transmon driven at drive_hz.
double drive_displacement(double epsilon_hz, double drive_hz, double omega_q_hz);
// 2 omega_q + alpha - omega_mode - delta
double sideband_drive_frequency(const SystemParams& p, Mode mode, double delta_hz);
// |<f0|V|g1>| = sqrt(2) |alpha xi g / Delta_mode|, Hz.
double sideband_rate_from_xi(const SystemParams& p, Mode mode, double xi);
// omega_q - omega_mode, Hz.
double mode_detuning(const SystemParams& p, Mode mode);

struct VrbsConfig {
  double detuning = -5e6;     // Delta, Hz
  double g_sb_a = 0.5e6;      // sideband rates, Hz
  double g_sb_b = 0.5e6;
  double epsilon_1 = 0.0;     // when > 0, g_sb_a follows from the drive amplitude
  double epsilon_2 = 0.0;
  int transmon_levels = 4;
  int cutoff_a = 2;
  int cutoff_b = 2;
  bool common_chi = false;    // use chi for both modes
  double chi = -71e3;
  bool direct_four_wave = false;  // add the direct a b^dag term

  // Displacements implied by the sideband rates (or drive amplitudes).
  double xi_1(const SystemParams& p) const;
  double xi_2(const SystemParams& p) const;
  double sideband_a(const SystemParams& p) const;
  double sideband_b(const SystemParams& p) const;
  void validate() const;
};

struct BsRate {
  double rate = 0.0;            // rad/s, coefficient of a b^dag
  double bracket = 0.0;         // 2 alpha / Delta + 1/2
  double ratio_to_direct = 0.0; // bracket / (1/2)
};

BsRate effective_bs_rate(const VrbsConfig& cfg, const SystemParams& p);

// g (a b^dag + a^dag b)[1 - (2 chi / Delta)(n_a + n_b - 1)] on d x d, rad/s inputs.
Mat nonlinear_bs_hamiltonian(double g_bs, double chi, double delta, int d);

// Effective Hamiltonian (rad/s) on [transmon, Alice, Bob] in the frame rotating with the drives.
HilbertSpace vrbs_space(const VrbsConfig& cfg);
Mat vrbs_hamiltonian(const VrbsConfig& cfg, const SystemParams& p);

// Driven-regime dissipation, all rates in 1/s.
struct DrivenNoise {
  double decay = 1.0 / 168e-6;            // D[q]
  double heating = 0.04 / 168e-6;         // D[q^dag]
  double dephasing = 2.0 / 700e-6;        // D[q^dag q]
  double kappa_a = 1.0 / 26e-3;           // D[a]
  double kappa_b = 1.0 / 20e-3;           // D[b]

  static DrivenNoise fitted();
  static DrivenNoise none();
  static DrivenNoise heating_only(double rate);
};

std::vector<Mat> driven_jumps(const HilbertSpace& space, const DrivenNoise& n);

// Adiabatic (dressed) continuation of the transmon-ground manifold.
struct DressedFrame {
  std::vector<int> g_indices;  // bare g-manifold indices in the full space
  Mat H_eff;                   // on the g-manifold, in dressed coordinates
  Mat projector;               // full-space projector onto the dressed g-manifold
  Mat embedding;               // full x |g-manifold|: dressed state for each bare label
  Mat basis;                   // full x full: dressed state for every bare label
  double min_overlap = 1.0;    // smallest singular value of the overlap block
  double g_bs = 0.0;           // |<g01|H_eff|g10>|, rad/s
};

DressedFrame dressed_frame(const Mat& H, const HilbertSpace& space);

struct SidebandCalibration {
  double resonance_hz = 0.0;  // drive frequency of best transfer
  double g_sb = 0.0;          // Hz, from the resonant transfer time
  double contrast = 0.0;
  std::vector<double> scan_frequency;   // chevron axis
  std::vector<double> scan_contrast;
};

class CalibrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Sweeps the sideband drive frequency in [centre - half_width, centre + half_width],
// centre defaulting to the bare resonance.
SidebandCalibration calibrate_sideband(const SystemParams& p, Mode mode, double epsilon_hz, double half_width_hz,
                                       int points = 201, double centre_hz = 0.0, int transmon_levels = 4);

struct VrbsTrace {
  std::vector<double> t;
  std::vector<double> p_alice;  // conditioned on transmon g
  std::vector<double> p_bob;
  std::vector<double> p_excited;  // 1 - P(transmon g), unconditioned
};

// Start in |g,1,0>.
VrbsTrace simulate_vrbs(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, double t_max,
                        int samples);

struct BsOscillationFit {
  double g_bs = 0.0;      // rad/s
  double kappa_1 = 0.0;   // 1/s
  double kappa_phi = 0.0;
  int sign = 1;           // +1: trace starts at 1, -1: starts at 0
  FitResult fit;
};

// P = 1/2 exp(-k1 t)(1 +/- exp(-kphi t) cos(2 g t)); the sign follows the first sample.
double bs_model(double t, double g, double k1, double kphi, int sign);
BsOscillationFit fit_bs_oscillation(const std::vector<double>& t, const std::vector<double>& y);

struct BsFidelity {
  double F_BS = 1.0;
  double F_SWAP = 1.0;
  bool valid = true;  // false when below 0.5 (outside the approximation)
};

BsFidelity bs_fidelity(double g_bs, double kappa_1, double kappa_phi);
BsFidelity bs_fidelity(const BsOscillationFit& fit);

struct SweepPoint {
  double detuning = 0.0;  // Hz
  double g_bs = 0.0;      // rad/s
  double kappa_1 = 0.0;
  double kappa_phi = 0.0;
  double F_BS = 0.0;
};

SweepPoint vrbs_sweep_point(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, double t_max,
                            int samples);

enum class SwapCheck { None, ErasureFinal, HeatingEach };
SwapCheck parse_swap_check(const std::string& s);
std::string swap_check_name(SwapCheck c);

struct SwapStep {
  double p10 = 0.0;  // dressed-basis populations, transmon traced out
  double p01 = 0.0;
  double p00 = 0.0;
  double keep = 1.0;       // cumulative survival of the heating checks
  double detected = 0.0;   // heating detection probability at this swap, given survival
};

struct SwapSequenceResult {
  double swap_time = 0.0;  // s
  std::vector<SwapStep> steps;
  double correct = 0.0;          // P(correct rail | not erased) after the last swap
  double infidelity_per_swap = 0.0;
};

SwapSequenceResult swap_sequence(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, int n_swaps,
                                 SwapCheck check);

// Heating rate (1/s) at which the first swap has detection probability p_per_swap.
double tune_heating_rate(const VrbsConfig& cfg, const SystemParams& p, const DrivenNoise& noise, double p_per_swap);

struct HeatingFit {
  double p_up = 0.0;
  double stderr_ = 0.0;
  bool degenerate = false;  // all-zero data
};

// R(n) = 1 - (1 - P)^n
HeatingFit heating_fit(const std::vector<double>& n, const std::vector<double>& rates);

}  // namespace cavsim

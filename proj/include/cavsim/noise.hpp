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

#include "cavsim/state.hpp"

namespace cavsim {

// Calibrated device parameters. Frequencies in Hz (linear), times in seconds.
struct SystemParams {
  double omega_a = 5.779e9;
  double omega_b = 6.872e9;
  double omega_q = 6.402e9;
  double omega_r = 8.379e9;
  double alpha = -245e6;
  double g_a = 5.841e6;
  double g_b = 8.114e6;
  double chi_e_a = -71e3;
  double chi_e_b = -96e3;
  double chi_qr = -411e3;
  double T1_A = 20.6e-3;
  double T2_A = 21.1e-3;
  double T1_B = 15.6e-3;
  double T2_B = 21.7e-3;
  double T1_ge = 147.4e-6;
  double T2_ge = 47.3e-6;
  double T2E_ge = 205.8e-6;
  double T1_f = 80.1e-6;
  double T2_gf = 45e-6;
  double n_th_q = 0.0025;
  double n_th_a = 0.0;
  double n_th_b = 0.0;
  double readout_time = 1700e-9;
  // Literal: sqrt(g_phi)|e><e|, sqrt(2 g_phi)|f><f|, sqrt(g_phi) n. These damp the
  // g-e (0-1) coherence at g_phi/2. Ramsey: operators scaled by sqrt(2) so the
  // coherence decays at exactly 1/T2.
  enum class Dephasing { Literal, Ramsey } dephasing = Dephasing::Literal;

  // Throws InconsistentParameters on non-physical values.
  void validate() const;
};

enum class Mode { Alice, Bob };
Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

// Rad/s helper for linear-frequency inputs.
inline double angular(double hz) { return kTwoPi * hz; }

// 1/T2 - 1/(2 T1), clipped to zero when negative within 1e-6/T2.
double pure_dephasing_rate(double T1, double T2);

enum class Channel { TransmonDecay, TransmonDephasing, TransmonHeating, CavityDecay, CavityDephasing, ReadoutError };
std::string channel_name(Channel c);
Channel parse_channel(const std::string& s);
const std::vector<Channel>& all_channels();

struct NoiseToggles {
  bool transmon_decay = true;
  bool transmon_dephasing = true;
  bool transmon_heating = true;
  bool cavity_decay = true;
  bool cavity_dephasing = true;
  bool readout_error = true;

  bool get(Channel c) const;
  void set(Channel c, bool on);
  static NoiseToggles none();
};

struct Jump {
  std::string label;
  Channel channel;
  double rate = 0.0;  // 1/s, the coefficient squared into the operator
  Mat op;             // already scaled by sqrt(rate)
};

using JumpList = std::vector<Jump>;

// Three-level transmon model on subsystem `s` (levels g, e, f; higher levels untouched).
JumpList transmon_jumps(const SystemParams& p, const HilbertSpace& space, int s,
                        const NoiseToggles& on = {});
// Decay and dephasing of one cavity mode living on subsystem `s`.
JumpList cavity_jumps(const SystemParams& p, const HilbertSpace& space, int s, Mode mode,
                      const NoiseToggles& on = {});

std::vector<Mat> operators(const JumpList& jumps);
JumpList select(const JumpList& jumps, Channel c);

}  // namespace cavsim

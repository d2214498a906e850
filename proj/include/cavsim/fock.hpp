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

#include <map>
#include <string>
#include <vector>

#include "cavsim/noise.hpp"
#include "cavsim/readout.hpp"

namespace cavsim {

struct GateDurations {
  double pi_ge = 50e-9;
  double pi_ef = 50e-9;
  double sideband_pi0 = 1.0e-6;  // |f,0> <-> |g,1>
  bool sqrt_scaling = true;      // step n lasts sideband_pi0 / sqrt(n+1)

  double sideband(int n) const;
};

enum class Protocol { SB, SFP, SB_PF, SFP_PF };
Protocol parse_protocol(const std::string& s);
std::string protocol_name(Protocol p);

struct ProtocolConfig {
  int target_n = 1;
  Protocol protocol = Protocol::SB;
  Mode mode = Mode::Alice;
  GateDurations durations;
  NoiseToggles noise;
  ReadoutModel readout = ReadoutModel::device();
  int max_feedforward_retries = 2;
  int cutoff = 0;             // cavity levels; 0 means target_n + 2
  int trotter_steps = 4;
  double angle_error = 0.0;   // relative over-rotation of every pulse
  bool pf_noisy_wait = false; // decoherence during the parity-filter wait
  long max_branches = 1'000'000;

  void validate() const;
};

struct ProtocolResult {
  int target_n = 0;
  RVec population;            // photon-number distribution, transmon traced out
  double fidelity = 0.0;
  double keep_probability = 1.0;
  long branch_count = 1;
  double uncorrected_probability = 0.0;  // mass that hit the retry bound
  double truncation_leakage = 0.0;       // population in the top cavity level
  bool truncation_warning = false;
  std::map<std::string, double> infidelity_breakdown;

  // P(N-1) / sum_{k<N-1} P(k)
  double peak_ratio() const;
};

ProtocolResult simulate_protocol(const ProtocolConfig& cfg, const SystemParams& p);
ProtocolResult simulate_sb(ProtocolConfig cfg, const SystemParams& p);
ProtocolResult simulate_sfp(ProtocolConfig cfg, const SystemParams& p);

struct ParityFilterResult {
  Mat rho_kept;
  double keep_probability = 0.0;
};

// rho on [3 transmon levels, cavity]; the transmon is reset to |g> on entry.
ParityFilterResult apply_parity_filter(const Mat& rho, const HilbertSpace& space, int target_n, double chi_hz,
                                       const std::vector<Mat>& wait_jumps = {});

struct CeilingResult {
  double fidelity = 0.0;  // all configured channels on
  std::map<Channel, double> contribution;
};

CeilingResult ceiling_analysis(const ProtocolConfig& cfg, const SystemParams& p, const std::vector<Channel>& channels);

struct LifetimePoint {
  int n = 0;
  double T1_fit = 0.0;
  double T1_stderr = 0.0;
};

std::vector<LifetimePoint> fock_lifetime_scan(const std::vector<int>& n_list, const SystemParams& p,
                                              Mode mode = Mode::Alice, int samples = 200);

}  // namespace cavsim

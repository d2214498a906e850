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

#include "cavsim/noise.hpp"

#include <cmath>

namespace cavsim {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InconsistentParameters(std::string(name) + " must be > 0");
}

void require_population(double v, const char* name) {
  if (!(v >= 0.0 && v < 1.0)) throw InconsistentParameters(std::string(name) + " must be in [0, 1)");
}

void require_t2(double T1, double T2, const char* name) {
  if (T2 > 2.0 * T1 * (1.0 + 1e-12)) throw InconsistentParameters(std::string(name) + ": T2 exceeds 2*T1");
}

double dephasing_scale(const SystemParams& p) { return p.dephasing == SystemParams::Dephasing::Ramsey ? 2.0 : 1.0; }

}  // namespace

void SystemParams::validate() const {
  require_positive(omega_a, "omega_a");
  require_positive(omega_b, "omega_b");
  require_positive(omega_q, "omega_q");
  require_positive(omega_r, "omega_r");
  require_positive(T1_A, "T1_A");
  require_positive(T2_A, "T2_A");
  require_positive(T1_B, "T1_B");
  require_positive(T2_B, "T2_B");
  require_positive(T1_ge, "T1_ge");
  require_positive(T2_ge, "T2_ge");
  require_positive(T2E_ge, "T2E_ge");
  require_positive(T1_f, "T1_f");
  require_positive(T2_gf, "T2_gf");
  if (readout_time < 0.0) throw InconsistentParameters("readout_time must be >= 0");
  require_population(n_th_q, "n_th_q");
  require_population(n_th_a, "n_th_a");
  require_population(n_th_b, "n_th_b");
  require_t2(T1_ge, T2_ge, "transmon");
  require_t2(T1_A, T2_A, "Alice");
  require_t2(T1_B, T2_B, "Bob");
}

Mode parse_mode(const std::string& s) {
  if (s == "Alice" || s == "alice" || s == "A") return Mode::Alice;
  if (s == "Bob" || s == "bob" || s == "B") return Mode::Bob;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string mode_name(Mode m) { return m == Mode::Alice ? "Alice" : "Bob"; }

double pure_dephasing_rate(double T1, double T2) {
  if (!(T1 > 0.0) || !(T2 > 0.0)) throw std::invalid_argument("pure_dephasing_rate: T1, T2 must be > 0");
  double g = 1.0 / T2 - 1.0 / (2.0 * T1);
  if (g < 0.0) {
    if (-g <= 1e-6 / T2) return 0.0;
    throw InconsistentParameters("pure_dephasing_rate: T2 > 2*T1");
  }
  return g;
}

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::TransmonDecay: return "transmon_decay";
    case Channel::TransmonDephasing: return "transmon_dephasing";
    case Channel::TransmonHeating: return "transmon_heating";
    case Channel::CavityDecay: return "cavity_decay";
    case Channel::CavityDephasing: return "cavity_dephasing";
    case Channel::ReadoutError: return "readout_error";
  }
  return "?";
}

const std::vector<Channel>& all_channels() {
  static const std::vector<Channel> all{Channel::TransmonDecay, Channel::TransmonDephasing, Channel::TransmonHeating,
                                        Channel::CavityDecay,   Channel::CavityDephasing,   Channel::ReadoutError};
  return all;
}

Channel parse_channel(const std::string& s) {
  for (Channel c : all_channels()) {
    if (channel_name(c) == s) return c;
  }
  throw std::invalid_argument("unknown noise channel '" + s + "'");
}

bool NoiseToggles::get(Channel c) const {
  switch (c) {
    case Channel::TransmonDecay: return transmon_decay;
    case Channel::TransmonDephasing: return transmon_dephasing;
    case Channel::TransmonHeating: return transmon_heating;
    case Channel::CavityDecay: return cavity_decay;
    case Channel::CavityDephasing: return cavity_dephasing;
    case Channel::ReadoutError: return readout_error;
  }
  return false;
}

void NoiseToggles::set(Channel c, bool on) {
  switch (c) {
    case Channel::TransmonDecay: transmon_decay = on; break;
    case Channel::TransmonDephasing: transmon_dephasing = on; break;
    case Channel::TransmonHeating: transmon_heating = on; break;
    case Channel::CavityDecay: cavity_decay = on; break;
    case Channel::CavityDephasing: cavity_dephasing = on; break;
    case Channel::ReadoutError: readout_error = on; break;
  }
}

NoiseToggles NoiseToggles::none() {
  NoiseToggles t;
  for (Channel c : all_channels()) t.set(c, false);
  return t;
}

JumpList transmon_jumps(const SystemParams& p, const HilbertSpace& space, int s, const NoiseToggles& on) {
  p.validate();
  if (space.dims().at(s) < 3) throw std::invalid_argument("transmon_jumps: transmon needs at least 3 levels");
  const double gamma = 1.0 / p.T1_ge;
  const double nth = p.n_th_q;
  const double gphi = pure_dephasing_rate(p.T1_ge, p.T2_ge) * dephasing_scale(p);
  const double r2 = std::sqrt(2.0);
  Mat ge = space.transition(s, 0, 1), ef = space.transition(s, 1, 2);
  JumpList out;
  if (on.transmon_decay) {
    double r = gamma * (1.0 + nth);
    out.push_back({"transmon_decay", Channel::TransmonDecay, r, std::sqrt(r) * (r2 * ef + ge)});
  }
  if (on.transmon_heating) {
    double r = gamma * nth;
    out.push_back({"transmon_heating", Channel::TransmonHeating, r,
                   std::sqrt(r) * (r2 * ef.adjoint() + ge.adjoint())});
  }
  if (on.transmon_dephasing) {
    out.push_back({"transmon_dephasing_f", Channel::TransmonDephasing, 2.0 * gphi,
                   std::sqrt(2.0 * gphi) * space.projector(s, 2)});
    out.push_back({"transmon_dephasing_e", Channel::TransmonDephasing, gphi,
                   std::sqrt(gphi) * space.projector(s, 1)});
  }
  return out;
}

JumpList cavity_jumps(const SystemParams& p, const HilbertSpace& space, int s, Mode mode, const NoiseToggles& on) {
  p.validate();
  double T1 = mode == Mode::Alice ? p.T1_A : p.T1_B;
  double T2 = mode == Mode::Alice ? p.T2_A : p.T2_B;
  std::string name = mode_name(mode);
  JumpList out;
  if (on.cavity_decay) {
    double r = 1.0 / T1;
    out.push_back({name + "_decay", Channel::CavityDecay, r, std::sqrt(r) * space.annihilation(s)});
  }
  if (on.cavity_dephasing) {
    double r = pure_dephasing_rate(T1, T2) * dephasing_scale(p);
    out.push_back({name + "_dephasing", Channel::CavityDephasing, r, std::sqrt(r) * space.number(s)});
  }
  return out;
}

std::vector<Mat> operators(const JumpList& jumps) {
  std::vector<Mat> ops;
  ops.reserve(jumps.size());
  for (const auto& j : jumps) ops.push_back(j.op);
  return ops;
}

JumpList select(const JumpList& jumps, Channel c) {
  JumpList out;
  for (const auto& j : jumps) {
    if (j.channel == c) out.push_back(j);
  }
  return out;
}

}  // namespace cavsim

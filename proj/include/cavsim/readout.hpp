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

#include <array>
#include <vector>

#include "cavsim/noise.hpp"
#include "cavsim/state.hpp"

namespace cavsim {

using Mat3 = Eigen::Matrix3d;

// Columns: prepared (true) state, rows: assigned label. Order g, e, f.
struct ReadoutModel {
  double p_relax_eg = 0.0;  // e -> g during readout
  double p_relax_fe = 0.0;  // f -> e during readout
  Mat3 classifier = Mat3::Identity();
  double duration = 1700e-9;

  static ReadoutModel ideal(double duration = 1700e-9);
  // Fitted values quoted for the device.
  static ReadoutModel device();
  void validate() const;
};

// Symmetric misassignment between adjacent labels plus a g<->f term.
Mat3 symmetric_classifier(double c_ge, double c_ef, double c_gf = 0.0);
Mat3 relaxation_matrix(double p_eg, double p_fe);
Mat3 predicted_confusion(const ReadoutModel& m);
bool is_column_stochastic(const RMat& m, double tol = 1e-9);
double assignment_fidelity(const RMat& confusion);

struct ReadoutBranch {
  int label = 0;
  double probability = 0.0;
  Mat state;  // normalized; zero matrix if probability == 0
};

// Transmon is subsystem 0 with exactly 3 levels. Cavity decoherence for the
// readout duration is applied before the outcome split.
std::array<Mat, 3> readout_unnormalized(const ReadoutModel& m, const Mat& rho, const HilbertSpace& space,
                                        const std::vector<Mat>& idle_jumps);
std::vector<ReadoutBranch> readout_channel(const ReadoutModel& m, const Mat& rho, const HilbertSpace& space,
                                           const std::vector<Mat>& idle_jumps);

struct ReadoutFit {
  ReadoutModel model;
  double c_ge = 0.0, c_ef = 0.0, c_gf = 0.0;
  double residual = 0.0;  // Frobenius distance
  bool converged = false;
};

ReadoutFit fit_readout_model(const RMat& measured);

struct CorrectedPopulations {
  RVec probs;
  bool clipped = false;
};

CorrectedPopulations correct_populations(const RVec& measured, const RMat& confusion);

// Printed mapping confusion (columns |00>, |10>, |01>).
Mat3 mapping_confusion_reference();

struct DualRailMapConfig {
  double sideband_pi_alice = 1.0e-6;
  double sideband_pi_bob = 1.0e-6;
  double pi_ef = 50e-9;
  int trotter_steps = 4;
  NoiseToggles noise;
};

struct DualRailMap {
  HilbertSpace space{{3, 2, 2}, {"transmon", "Alice", "Bob"}};
  Mat superop;                      // channel on transmon (x) Alice (x) Bob
  std::array<int, 3> decode{0, 1, 2};  // transmon label -> dual-rail state index (|00>, |10>, |01>)
};

DualRailMap dual_rail_map_channel(const SystemParams& p, const DualRailMapConfig& cfg = {});
// Probability of each label for the three prepared dual-rail states.
Mat3 dual_rail_confusion(const SystemParams& p, const ReadoutModel& ro, const DualRailMapConfig& cfg = {});

}  // namespace cavsim

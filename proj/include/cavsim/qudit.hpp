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

#include <cstdint>
#include <vector>

#include "cavsim/noise.hpp"
#include "cavsim/types.hpp"
#include "cavsim/vrbs.hpp"

namespace cavsim {

struct TwoQuditUnitary {
  int d = 0;
  Mat matrix;            // d^2 x d^2, first qudit is the slow index
  double leakage = 0.0;  // largest population lost from the qudit subspace before re-unitarization
};

class LeakageError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Two-level pairs (r-1, r) of the Givens factorization, in application order.
std::vector<std::pair<int, int>> givens_pairs(int d);
inline int su_angle_count(int d) { return d * d - 1; }

// Layout: [theta_1, phi_1, ..., theta_P, phi_P, psi_1, ..., psi_{d-1}].
Mat single_qudit_rotation(int d, const std::vector<double>& angles);
// Same, also filling d/d(angle_i) for every angle.
Mat single_qudit_rotation(int d, const double* angles, std::vector<Mat>* grad);

struct Decomposition {
  std::vector<double> angles;
  double residual = 0.0;  // 1 - |Tr(R^dag U)|^2 / d^2
};
Decomposition decompose_su(const Mat& U, int restarts = 8, uint64_t seed = 1);

Mat csum(int d);

// |Tr(V^dag U)|^2 / D^2
double gate_fidelity(const Mat& U, const Mat& V);

struct EntanglingPower {
  double value = 0.0;
  double stderr_ = 0.0;
};
// Mean linear entropy of U|psi1>|psi2> over Haar-random product inputs.
EntanglingPower entangling_power(const Mat& U, int d, int n_samples, uint64_t seed);
// Closed form from the operator entanglement of U and U*SWAP.
double entangling_power_exact(const Mat& U, int d);

// Noiseless VRBS propagator on the dressed transmon-ground manifold, restricted
// to at most d-1 photons per mode and re-unitarized.
TwoQuditUnitary extract_vrbs_unitary(const VrbsConfig& cfg, const SystemParams& p, double gate_time, int d,
                                     double max_leakage = 1e-2);
// pi / (4 g_BS) for the configuration's dressed beamsplitter rate.
double vrbs_quarter_time(const VrbsConfig& cfg, const SystemParams& p);

struct SynthesisOptions {
  int restarts = 32;
  int max_iterations = 3000;
  double gradient_tolerance = 1e-12;
  uint64_t seed = 1;
  int workers = 1;
  std::vector<double> warm_start;  // used as an extra start when non-empty
};

struct SynthesisResult {
  int n_blocks = 0;
  std::vector<double> angles;
  double fidelity = 0.0;
  std::vector<double> restart_fidelities;  // per start, warm start last
};

// U = K_0 * prod_i (E * K_i), K_i = R(a_i) (x) R(b_i).
Mat synthesis_circuit(const Mat& entangler, int d, int n_blocks, const std::vector<double>& angles);
SynthesisResult synthesize(const Mat& target, const Mat& entangler, int d, int n_blocks,
                           const SynthesisOptions& opt = {});
// n_blocks = 1..max_blocks, each warm-started from the previous solution padded with identity rotations.
std::vector<SynthesisResult> synthesis_ladder(const Mat& target, const Mat& entangler, int d, int max_blocks,
                                              const SynthesisOptions& opt = {});

}  // namespace cavsim

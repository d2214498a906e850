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

#include "cavsim/noise.hpp"
#include "cavsim/state.hpp"

namespace cavsim {

// Generator of d rho/dt = -i[H, rho] + sum D[A] rho, column-stacked.
Mat lindbladian_matrix(const Mat& H, const std::vector<Mat>& jumps);
Mat apply_lindbladian(const Mat& H, const std::vector<Mat>& jumps, const Mat& rho);
Mat apply_dissipators(const std::vector<Mat>& jumps, const Mat& rho);

// exp(L t) by scaling and squaring.
Mat propagator(const Mat& L, double t);

// Second-order symmetric split of a two-level rotation with noise, m steps.
Mat noisy_rotation(int dim, const LevelPairs& pairs, double theta, const std::vector<Mat>& jumps,
                   double gate_time, int m = 4);
// Same channel applied directly to rho (no superoperator is formed).
Mat apply_noisy_rotation(const Mat& rho, const LevelPairs& pairs, double theta, const std::vector<Mat>& jumps,
                         double gate_time, int m = 4);
// Reference: exp of the full generator with a constant rotation Hamiltonian.
Mat exact_rotation_channel(int dim, const LevelPairs& pairs, double theta, const std::vector<Mat>& jumps,
                           double gate_time);

// Free decoherence for time t under jumps only (RK4, steps chosen from the rates).
Mat idle(const Mat& rho, const std::vector<Mat>& jumps, double t);

struct Drive {
  Mat op;             // Hermitian coupling operator
  double amplitude;   // rad/s
  double frequency;   // rad/s
  double phase = 0.0;
};

struct DrivenHamiltonian {
  Mat H0;
  std::vector<Drive> drives;

  Mat at(double t) const;
  double max_frequency() const;
};

struct EvolveOptions {
  double dt = 0.0;        // fixed step; 0 picks one from the drive and generator scales
  bool adaptive = false;  // Dormand-Prince with error control
  double rtol = 1e-8;
  double atol = 1e-10;
  long max_steps = 50'000'000;
};

// Samples rho(t) at each requested time (monotone, starting at times.front()).
std::vector<Mat> evolve(const DrivenHamiltonian& H, const std::vector<Mat>& jumps, const Mat& rho0,
                        const std::vector<double>& times, const EvolveOptions& opt = {});

}  // namespace cavsim

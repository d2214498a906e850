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

#include <functional>
#include <string>
#include <vector>

#include "cavsim/types.hpp"

namespace cavsim {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> stderrs;  // sqrt(diag(covariance)); NaN when unavailable
  RMat covariance;
  double residual_norm = 0.0;   // ||r||_2 at the optimum
  bool converged = false;
  std::string message;

  double operator[](const std::string& name) const;
};

using ResidualFn = std::function<void(const double* p, double* r)>;
// Fills J (row-major, num_residuals x num_params). Optional.
using JacobianFn = std::function<void(const double* p, double* J)>;

struct LeastSquaresProblem {
  std::vector<std::string> names;
  std::vector<double> initial;
  std::vector<double> lower;  // empty or one per parameter (use -inf/inf)
  std::vector<double> upper;
  int num_residuals = 0;
  ResidualFn residuals;
  JacobianFn jacobian;
  int max_iterations = 500;
  double tolerance = 1e-14;
  bool covariance = true;
};

// Levenberg-Marquardt with optional bounds.
FitResult least_squares(const LeastSquaresProblem& problem);

using ObjectiveFn = std::function<double(const double* x, double* grad)>;

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Unconstrained L-BFGS on a smooth objective with analytic gradient.
MinimizeResult minimize_lbfgs(const ObjectiveFn& f, std::vector<double> x0, int max_iterations = 2000,
                              double gradient_tolerance = 1e-12);

}  // namespace cavsim

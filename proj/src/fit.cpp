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

#include "cavsim/fit.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <ceres/ceres.h>

namespace cavsim {

double FitResult::operator[](const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return params[i];
  }
  throw std::invalid_argument("FitResult: no parameter '" + name + "'");
}

namespace {

class WrappedCost : public ceres::CostFunction {
 public:
  WrappedCost(const LeastSquaresProblem& p) : p_(p) {
    set_num_residuals(p.num_residuals);
    mutable_parameter_block_sizes()->push_back(static_cast<int>(p.initial.size()));
  }

  bool Evaluate(double const* const* parameters, double* residuals, double** jacobians) const override {
    const double* x = parameters[0];
    p_.residuals(x, residuals);
    for (int i = 0; i < p_.num_residuals; ++i) {
      if (!std::isfinite(residuals[i])) return false;
    }
    if (jacobians && jacobians[0]) {
      const int n = static_cast<int>(p_.initial.size());
      if (p_.jacobian) {
        p_.jacobian(x, jacobians[0]);
      } else {
        std::vector<double> xp(x, x + n), rp(p_.num_residuals), rm(p_.num_residuals);
        for (int j = 0; j < n; ++j) {
          double h = 1e-6 * std::max(1e-3, std::abs(x[j]));
          xp[j] = x[j] + h;
          p_.residuals(xp.data(), rp.data());
          xp[j] = x[j] - h;
          p_.residuals(xp.data(), rm.data());
          xp[j] = x[j];
          for (int i = 0; i < p_.num_residuals; ++i) jacobians[0][i * n + j] = (rp[i] - rm[i]) / (2 * h);
        }
      }
    }
    return true;
  }

 private:
  const LeastSquaresProblem& p_;
};

class WrappedObjective : public ceres::FirstOrderFunction {
 public:
  WrappedObjective(const ObjectiveFn& f, int n) : f_(f), n_(n) {}
  bool Evaluate(const double* x, double* cost, double* grad) const override {
    *cost = f_(x, grad);
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return n_; }

 private:
  const ObjectiveFn& f_;
  int n_;
};

}  // namespace

FitResult least_squares(const LeastSquaresProblem& p) {
  const int n = static_cast<int>(p.initial.size());
  if (n == 0 || p.num_residuals < 1 || !p.residuals) throw std::invalid_argument("least_squares: empty problem");
  if (!p.lower.empty() && static_cast<int>(p.lower.size()) != n) throw std::invalid_argument("least_squares: bad bounds");
  if (!p.upper.empty() && static_cast<int>(p.upper.size()) != n) throw std::invalid_argument("least_squares: bad bounds");

  std::vector<double> x = p.initial;
  ceres::Problem::Options popt;
  popt.cost_function_ownership = ceres::TAKE_OWNERSHIP;
  ceres::Problem problem(popt);
  problem.AddResidualBlock(new WrappedCost(p), nullptr, x.data());
  for (int i = 0; i < n; ++i) {
    if (!p.lower.empty() && std::isfinite(p.lower[i])) problem.SetParameterLowerBound(x.data(), i, p.lower[i]);
    if (!p.upper.empty() && std::isfinite(p.upper[i])) problem.SetParameterUpperBound(x.data(), i, p.upper[i]);
  }
  ceres::Solver::Options opt;
  opt.linear_solver_type = ceres::DENSE_QR;
  opt.trust_region_strategy_type = ceres::LEVENBERG_MARQUARDT;
  opt.max_num_iterations = p.max_iterations;
  opt.function_tolerance = p.tolerance;
  opt.gradient_tolerance = p.tolerance * 1e-2;
  opt.parameter_tolerance = p.tolerance;
  opt.num_threads = 1;
  opt.logging_type = ceres::SILENT;
  ceres::Solver::Summary summary;
  ceres::Solve(opt, &problem, &summary);

  FitResult r;
  r.names = p.names;
  r.params = x;
  r.converged = summary.IsSolutionUsable() && summary.termination_type == ceres::CONVERGENCE;
  r.message = summary.message;
  r.residual_norm = std::sqrt(2.0 * summary.final_cost);
  r.stderrs.assign(n, std::numeric_limits<double>::quiet_NaN());
  r.covariance = RMat::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  if (p.covariance && p.num_residuals > n) {
    ceres::Covariance::Options copt;
    copt.algorithm_type = ceres::DENSE_SVD;
    copt.null_space_rank = -1;
    copt.min_reciprocal_condition_number = 1e-14;
    ceres::Covariance cov(copt);
    std::vector<std::pair<const double*, const double*>> blocks{{x.data(), x.data()}};
    if (cov.Compute(blocks, &problem)) {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c(n, n);
      cov.GetCovarianceBlock(x.data(), x.data(), c.data());
      double s2 = 2.0 * summary.final_cost / (p.num_residuals - n);
      r.covariance = c * s2;
      for (int i = 0; i < n; ++i) r.stderrs[i] = std::sqrt(std::max(0.0, r.covariance(i, i)));
    }
  }
  return r;
}

MinimizeResult minimize_lbfgs(const ObjectiveFn& f, std::vector<double> x0, int max_iterations,
                              double gradient_tolerance) {
  const int n = static_cast<int>(x0.size());
  ceres::GradientProblem problem(new WrappedObjective(f, n));
  ceres::GradientProblemSolver::Options opt;
  opt.line_search_direction_type = ceres::LBFGS;
  opt.max_num_iterations = max_iterations;
  opt.gradient_tolerance = gradient_tolerance;
  opt.function_tolerance = 1e-16;
  opt.parameter_tolerance = 1e-14;
  opt.logging_type = ceres::SILENT;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(opt, problem, x0.data(), &summary);
  MinimizeResult r;
  r.x = std::move(x0);
  r.value = summary.final_cost;
  r.iterations = static_cast<int>(summary.iterations.size());
  r.converged = summary.termination_type == ceres::CONVERGENCE;
  return r;
}

}  // namespace cavsim

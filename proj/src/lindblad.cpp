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

#include "cavsim/lindblad.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace cavsim {

namespace {

double inf_norm(const Mat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double dissipative_scale(const std::vector<Mat>& jumps) {
  double s = 0.0;
  for (const auto& a : jumps) s += inf_norm(a.adjoint() * a);
  return s;
}

void check_jumps(const std::vector<Mat>& jumps, Eigen::Index d) {
  for (const auto& a : jumps) {
    if (a.rows() != d || a.cols() != d) throw std::invalid_argument("jump operator dimension mismatch");
  }
}

}  // namespace

Mat lindbladian_matrix(const Mat& H, const std::vector<Mat>& jumps) {
  if (H.rows() != H.cols()) throw std::invalid_argument("lindbladian_matrix: H not square");
  if (hermiticity_error(H) > 1e-12 * std::max(1.0, inf_norm(H))) {
    throw std::invalid_argument("lindbladian_matrix: H not Hermitian");
  }
  check_jumps(jumps, H.rows());
  Mat L = -kI * (spre(H) - spost(H));
  for (const auto& a : jumps) L += dissipator(a);
  return L;
}

Mat apply_dissipators(const std::vector<Mat>& jumps, const Mat& rho) {
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  for (const auto& a : jumps) out += apply_dissipator(a, rho);
  return out;
}

Mat apply_lindbladian(const Mat& H, const std::vector<Mat>& jumps, const Mat& rho) {
  Mat out = -kI * (H * rho - rho * H);
  out += apply_dissipators(jumps, rho);
  return out;
}

Mat propagator(const Mat& L, double t) { return (L * t).exp(); }

Mat noisy_rotation(int dim, const LevelPairs& pairs, double theta, const std::vector<Mat>& jumps, double gate_time,
                   int m) {
  if (gate_time < 0.0) throw std::invalid_argument("noisy_rotation: negative gate_time");
  if (m < 1) throw std::invalid_argument("noisy_rotation: m must be >= 1");
  check_jumps(jumps, dim);
  Mat r = unitary_superop(rotation_unitary(dim, pairs, theta / (2.0 * m)));
  Mat step = r;
  if (gate_time > 0.0 && !jumps.empty()) {
    Mat d = identity_superop(dim);
    Mat sum = Mat::Zero(d.rows(), d.cols());
    for (const auto& a : jumps) sum += dissipator(a);
    step = r * (d + (gate_time / m) * sum) * r;
  } else {
    step = r * r;
  }
  Mat out = identity_superop(dim);
  for (int i = 0; i < m; ++i) out = step * out;
  return out;
}

Mat apply_noisy_rotation(const Mat& rho, const LevelPairs& pairs, double theta, const std::vector<Mat>& jumps,
                         double gate_time, int m) {
  if (gate_time < 0.0) throw std::invalid_argument("apply_noisy_rotation: negative gate_time");
  if (m < 1) throw std::invalid_argument("apply_noisy_rotation: m must be >= 1");
  const int dim = static_cast<int>(rho.rows());
  check_jumps(jumps, dim);
  // R is real: only the touched rows/columns change.
  Mat r = rotation_unitary(dim, pairs, theta / (2.0 * m));
  Mat out = rho;
  for (int i = 0; i < m; ++i) {
    out = r * out * r.adjoint();
    if (gate_time > 0.0 && !jumps.empty()) out += (gate_time / m) * apply_dissipators(jumps, out);
    out = r * out * r.adjoint();
  }
  return out;
}

Mat exact_rotation_channel(int dim, const LevelPairs& pairs, double theta, const std::vector<Mat>& jumps,
                           double gate_time) {
  if (gate_time <= 0.0) throw std::invalid_argument("exact_rotation_channel: gate_time must be > 0");
  Mat K = Mat::Zero(dim, dim);
  for (auto [j, k] : pairs) {
    K(k, j) += 1.0;
    K(j, k) -= 1.0;
  }
  // exp(-i H T) = exp((theta/2) K)
  Mat H = kI * (theta / (2.0 * gate_time)) * K;
  return propagator(lindbladian_matrix(H, jumps), gate_time);
}

Mat idle(const Mat& rho, const std::vector<Mat>& jumps, double t) {
  if (t < 0.0) throw std::invalid_argument("idle: negative time");
  if (t == 0.0 || jumps.empty()) return rho;
  check_jumps(jumps, rho.rows());
  double scale = dissipative_scale(jumps);
  int steps = std::max(1, static_cast<int>(std::ceil(t * scale / 0.05)));
  double h = t / steps;
  Mat r = rho;
  for (int i = 0; i < steps; ++i) {
    Mat k1 = apply_dissipators(jumps, r);
    Mat k2 = apply_dissipators(jumps, r + 0.5 * h * k1);
    Mat k3 = apply_dissipators(jumps, r + 0.5 * h * k2);
    Mat k4 = apply_dissipators(jumps, r + h * k3);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

Mat DrivenHamiltonian::at(double t) const {
  Mat h = H0;
  for (const auto& d : drives) h += (d.amplitude * std::cos(d.frequency * t + d.phase)) * d.op;
  return h;
}

double DrivenHamiltonian::max_frequency() const {
  double f = 0.0;
  for (const auto& d : drives) f = std::max(f, std::abs(d.frequency));
  return f;
}

namespace {

using State = std::vector<cplx>;

struct Rhs {
  const DrivenHamiltonian& H;
  const std::vector<Mat>& jumps;
  Eigen::Index d;

  void operator()(const State& x, State& dxdt, double t) const {
    Eigen::Map<const Mat> rho(x.data(), d, d);
    Eigen::Map<Mat> out(dxdt.data(), d, d);
    out = apply_lindbladian(H.at(t), jumps, Mat(rho));
  }
};

std::vector<Mat> evolve_fixed(const DrivenHamiltonian& H, const std::vector<Mat>& jumps, const Mat& rho0,
                              const std::vector<double>& times, const EvolveOptions& opt) {
  double dt = opt.dt;
  if (dt <= 0.0) {
    double scale = 2.0 * inf_norm(H.H0) + dissipative_scale(jumps);
    for (const auto& d : H.drives) scale += 2.0 * std::abs(d.amplitude) * inf_norm(d.op);
    dt = scale > 0.0 ? 0.05 / scale : 1.0;
    double fmax = H.max_frequency();
    if (fmax > 0.0) dt = std::min(dt, kTwoPi / (50.0 * fmax));
  }
  std::vector<Mat> out;
  out.reserve(times.size());
  Mat rho = rho0;
  double t = times.front();
  out.push_back(rho);
  long total = 0;
  for (size_t i = 1; i < times.size(); ++i) {
    double span = times[i] - t;
    long n = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / dt)));
    total += n;
    if (total > opt.max_steps) throw NumericalError("evolve: step budget exhausted");
    double h = span / n;
    for (long s = 0; s < n; ++s) {
      double ts = t + s * h;
      Mat k1 = apply_lindbladian(H.at(ts), jumps, rho);
      Mat k2 = apply_lindbladian(H.at(ts + 0.5 * h), jumps, rho + 0.5 * h * k1);
      Mat k3 = apply_lindbladian(H.at(ts + 0.5 * h), jumps, rho + 0.5 * h * k2);
      Mat k4 = apply_lindbladian(H.at(ts + h), jumps, rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = times[i];
    out.push_back(rho);
  }
  return out;
}

std::vector<Mat> evolve_adaptive(const DrivenHamiltonian& H, const std::vector<Mat>& jumps, const Mat& rho0,
                                 const std::vector<double>& times, const EvolveOptions& opt) {
  namespace ode = boost::numeric::odeint;
  const Eigen::Index d = rho0.rows();
  State x(rho0.data(), rho0.data() + rho0.size());
  std::vector<Mat> out;
  out.reserve(times.size());
  Rhs rhs{H, jumps, d};
  auto observer = [&](const State& s, double) { out.push_back(Eigen::Map<const Mat>(s.data(), d, d)); };
  double dt0 = (times.size() > 1) ? (times[1] - times[0]) / 100.0 : 1e-9;
  try {
    auto stepper = ode::make_dense_output(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observer,
                         ode::max_step_checker(static_cast<int>(std::min<long>(opt.max_steps, 1'000'000'000L))));
  } catch (const std::exception& e) {
    throw NumericalError(std::string("evolve: adaptive integrator failed: ") + e.what());
  }
  return out;
}

}  // namespace

std::vector<Mat> evolve(const DrivenHamiltonian& H, const std::vector<Mat>& jumps, const Mat& rho0,
                        const std::vector<double>& times, const EvolveOptions& opt) {
  if (times.empty()) return {};
  if (H.H0.rows() != rho0.rows()) throw std::invalid_argument("evolve: dimension mismatch");
  check_jumps(jumps, rho0.rows());
  for (const auto& d : H.drives) {
    if (d.op.rows() != rho0.rows()) throw std::invalid_argument("evolve: drive dimension mismatch");
    if (hermiticity_error(d.op) > 1e-12) throw std::invalid_argument("evolve: drive operator not Hermitian");
  }
  bool up = true, down = true;
  for (size_t i = 1; i < times.size(); ++i) {
    up = up && times[i] >= times[i - 1];
    down = down && times[i] <= times[i - 1];
  }
  if (!up && !down) throw std::invalid_argument("evolve: sample times must be monotone");
  if (times.back() - times.front() < 0.0 && opt.adaptive) throw std::invalid_argument("evolve: adaptive mode runs forward only");
  auto out = opt.adaptive ? evolve_adaptive(H, jumps, rho0, times, opt) : evolve_fixed(H, jumps, rho0, times, opt);
  for (const auto& r : out) {
    if (!r.allFinite()) throw NumericalError("evolve: non-finite state");
  }
  return out;
}

}  // namespace cavsim

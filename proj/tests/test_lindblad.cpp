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

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "cavsim/lindblad.hpp"
#include "cavsim/noise.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {

Mat pauli(char c) {
  Mat m = Mat::Zero(2, 2);
  if (c == 'x') m << 0, 1, 1, 0;
  if (c == 'y') m << 0, -kI, kI, 0;
  if (c == 'z') m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("lindbladian matrix") {
  CHECK(lindbladian_matrix(Mat::Zero(3, 3), {}).norm() == 0.0);
  const double g = 2.5;
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = std::sqrt(g);
  Mat L = lindbladian_matrix(Mat::Zero(2, 2), {a});
  Eigen::ComplexEigenSolver<Mat> es(L);
  std::vector<double> ev;
  for (int i = 0; i < 4; ++i) ev.push_back(es.eigenvalues()(i).real());
  auto has = [&](double x) { return std::any_of(ev.begin(), ev.end(), [&](double e) { return std::abs(e - x) < 1e-12; }); };
  CHECK(has(-g));
  CHECK(has(-g / 2));
  // trace row: vec(I)^T L = 0
  Mat H = 0.3 * pauli('x') + 0.1 * pauli('z');
  Mat L2 = lindbladian_matrix(H, {a, 0.2 * pauli('z')});
  Vec id = vec(Mat::Identity(2, 2));
  CHECK((id.transpose() * L2).norm() < 1e-14);
  CHECK_THROWS_AS(lindbladian_matrix(Mat::Zero(2, 2), {Mat::Zero(3, 3)}), std::invalid_argument);
  CHECK_THROWS_AS(lindbladian_matrix(pauli('y') * kI, {}), std::invalid_argument);
}

TEST_CASE("noisy rotation") {
  SystemParams p;
  HilbertSpace sp({3});
  auto jumps = operators(transmon_jumps(p, sp, 0));
  const LevelPairs pairs{{1, 2}};
  for (int m : {1, 3, 8}) {
    Mat S = noisy_rotation(3, pairs, 1.3, {}, 1e-6, m);
    CHECK((S - unitary_superop(rotation_unitary(3, pairs, 1.3))).norm() < 1e-12);
  }
  Mat S4 = noisy_rotation(3, pairs, kPi, jumps, 1e-6, 4);
  CHECK(is_trace_preserving(S4, 1e-10));
  Mat rho = Mat::Zero(3, 3);
  rho(1, 1) = 1.0;
  CHECK(std::abs(apply_superop(S4, rho).trace().real() - 1.0) < 1e-10);
  // direct application agrees with the superoperator
  CHECK((apply_noisy_rotation(rho, pairs, kPi, jumps, 1e-6, 4) - apply_superop(S4, rho)).norm() < 1e-13);
  CHECK_THROWS_AS(noisy_rotation(3, pairs, 1.0, jumps, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(noisy_rotation(3, pairs, 1.0, jumps, 1e-6, 0), std::invalid_argument);
}

TEST_CASE("noisy rotation converges at second order") {
  SystemParams p;
  HilbertSpace sp({3});
  auto jumps = operators(transmon_jumps(p, sp, 0));
  // The dissipator factor is linear in T/m, so the scheme is second order only while
  // m stays below roughly 1/(T*|D|); a realistic 50 ns gate keeps m <= 32 in that range.
  const LevelPairs pairs{{0, 2}};
  const double th = 2.3, T = 50e-9;
  Mat ref = exact_rotation_channel(3, pairs, th, jumps, T);
  double prev = (noisy_rotation(3, pairs, th, jumps, T, 2) - ref).norm();
  for (int m : {4, 8, 16, 32}) {
    double e = (noisy_rotation(3, pairs, th, jumps, T, m) - ref).norm();
    CHECK(prev / e == doctest::Approx(4.0).epsilon(0.125));
    prev = e;
  }
  for (int m : {4, 8}) CHECK(choi_min_eigenvalue(noisy_rotation(3, pairs, th, jumps, 50e-9, m)) >= -1e-8);
}

TEST_CASE("evolve against oracles") {
  // static H: compare with the generator exponential
  Mat H = 2 * kPi * 1e5 * (0.7 * pauli('x') + 0.2 * pauli('z'));
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = std::sqrt(3e4);
  Mat rho0 = Mat::Zero(2, 2);
  rho0(1, 1) = 1.0;
  DrivenHamiltonian dh{H, {}};
  std::vector<double> times{0.0, 2e-6, 5e-6, 10e-6};
  auto fixed = evolve(dh, {a}, rho0, times);
  EvolveOptions ad;
  ad.adaptive = true;
  auto adapt = evolve(dh, {a}, rho0, times, ad);
  Mat L = lindbladian_matrix(H, {a});
  for (size_t k = 0; k < times.size(); ++k) {
    Mat want = unvec(propagator(L, times[k]) * vec(rho0));
    CHECK((fixed[k] - want).norm() < 1e-6);
    CHECK((adapt[k] - want).norm() < 1e-7);
    CHECK(hermiticity_error(fixed[k]) < 1e-10);
    CHECK(std::abs(fixed[k].trace().real() - 1.0) < 1e-8);
  }

  // fourth order in an explicit step
  EvolveOptions s1, s2;
  s1.dt = 1e-7;
  s2.dt = 0.5e-7;
  Mat want = unvec(propagator(L, 10e-6) * vec(rho0));
  double e1 = (evolve(dh, {a}, rho0, {0.0, 10e-6}, s1)[1] - want).norm();
  double e2 = (evolve(dh, {a}, rho0, {0.0, 10e-6}, s2)[1] - want).norm();
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));

  // amplitude damping of |1>
  const double T1 = 20e-6;
  Mat b = std::sqrt(1.0 / T1) * destroy(3);
  Mat one = Mat::Zero(3, 3);
  one(1, 1) = 1.0;
  auto d = evolve(DrivenHamiltonian{Mat::Zero(3, 3), {}}, {b}, one, {0.0, 10e-6, 40e-6});
  CHECK(std::abs(d[1](1, 1).real() - std::exp(-0.5)) < 1e-6);
  CHECK(std::abs(d[2](1, 1).real() - std::exp(-2.0)) < 1e-6);
}

TEST_CASE("evolve: resonant circular drive gives exact Rabi oscillation") {
  const double w = 2 * kPi * 5e6, Om = 2 * kPi * 0.5e6;
  DrivenHamiltonian dh;
  dh.H0 = 0.5 * w * pauli('z');
  dh.drives.push_back({pauli('x'), 0.5 * Om, w, 0.0});
  dh.drives.push_back({pauli('y'), 0.5 * Om, w, -kPi / 2});
  Mat up = Mat::Zero(2, 2);
  up(0, 0) = 1.0;
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(k * 0.2e-6);
  auto tr = evolve(dh, {}, up, times);
  for (size_t k = 0; k < times.size(); ++k) {
    double s = std::sin(Om * times[k] / 2);
    CHECK(std::abs(tr[k](1, 1).real() - s * s) < 1e-6);
  }
}

TEST_CASE("evolve is time reversible for unitary problems") {
  DrivenHamiltonian dh;
  dh.H0 = 2 * kPi * 1e6 * pauli('z');
  dh.drives.push_back({pauli('x'), 2 * kPi * 0.3e6, 2 * kPi * 1.7e6, 0.4});
  Mat rho0 = Mat::Zero(2, 2);
  rho0 << 0.7, 0.2 - 0.1 * kI, 0.2 + 0.1 * kI, 0.3;
  auto fwd = evolve(dh, {}, rho0, {0.0, 3e-6});
  auto back = evolve(dh, {}, fwd[1], {3e-6, 0.0});
  CHECK((back[1] - rho0).norm() < 1e-8);
  CHECK_THROWS_AS(evolve(dh, {}, rho0, {0.0, 2e-6, 1e-6}), std::invalid_argument);
}

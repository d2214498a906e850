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
#include "cavsim/limits.hpp"
#include "cavsim/noise.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {

// exp(L t) applied to rho0, element (i, j) sampled on a grid.
std::vector<double> trace_element(const Mat& L, const Mat& rho0, int i, int j, double dt, int n, bool imag = false) {
  Mat P = propagator(L, dt);
  Vec v = vec(rho0);
  const int d = static_cast<int>(rho0.rows());
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    out.push_back(imag ? std::abs(v(j * d + i)) : v(j * d + i).real());
    v = P * v;
  }
  return out;
}

NoiseToggles only(Channel c) {
  NoiseToggles t = NoiseToggles::none();
  t.set(c, true);
  return t;
}

}  // namespace

TEST_CASE("pure dephasing rate") {
  CHECK(pure_dephasing_rate(147.4e-6, 47.3e-6) == doctest::Approx(1.775e4).epsilon(1e-3));
  CHECK(1.0 / pure_dephasing_rate(147.4e-6, 47.3e-6) == doctest::Approx(56.3e-6).epsilon(1e-3));
  CHECK(pure_dephasing_rate(1e-3, 2e-3) == 0.0);
  CHECK(1.0 / pure_dephasing_rate(20.6e-3, 21.1e-3) == doctest::Approx(43e-3).epsilon(0.01));
  // T2 slightly above 2 T1 within tolerance clips to zero
  CHECK(pure_dephasing_rate(1.0, 2.0 * (1 + 1e-7)) == 0.0);
  CHECK_THROWS_AS(pure_dephasing_rate(1.0, 2.5), InconsistentParameters);
  CHECK_THROWS_AS(pure_dephasing_rate(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("SystemParams validation") {
  SystemParams p;
  CHECK_NOTHROW(p.validate());
  p.T2_A = 3 * p.T1_A;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  SystemParams q;
  q.n_th_q = 1.2;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("transmon jump operators") {
  SystemParams p;
  HilbertSpace sp({3}, {"transmon"});
  JumpList all = transmon_jumps(p, sp, 0);
  const double g = 1.0 / p.T1_ge;
  auto dec = select(all, Channel::TransmonDecay);
  REQUIRE(dec.size() == 1);
  CHECK(dec[0].rate == doctest::Approx(g * (1 + p.n_th_q)).epsilon(1e-14));
  CHECK(std::abs(dec[0].op(0, 1) - std::sqrt(dec[0].rate)) < 1e-12);
  CHECK(std::abs(dec[0].op(1, 2) - std::sqrt(2 * dec[0].rate)) < 1e-12);

  SystemParams cold = p;
  cold.n_th_q = 0.0;
  for (const auto& j : select(transmon_jumps(cold, sp, 0), Channel::TransmonHeating)) CHECK(j.op.norm() == 0.0);

  // |f> decays into |e> at 2 gamma (1 + n)
  Mat L = lindbladian_matrix(Mat::Zero(3, 3), operators(dec));
  Mat f = Mat::Zero(3, 3);
  f(2, 2) = 1.0;
  Mat d = unvec(L * vec(f));
  CHECK(d(1, 1).real() == doctest::Approx(2 * g * (1 + p.n_th_q)).epsilon(1e-12));
  Mat later = unvec(propagator(L, 1e-6) * vec(f));
  CHECK(later(2, 2).real() == doctest::Approx(std::exp(-2 * g * (1 + p.n_th_q) * 1e-6)).epsilon(1e-10));

  // dephasing operators are diagonal; others have zero diagonal
  for (const auto& j : all) {
    bool diag = j.channel == Channel::TransmonDephasing;
    CHECK((j.op.diagonal().norm() == 0.0) == !diag);
    if (diag) CHECK((j.op - Mat(j.op.diagonal().asDiagonal())).norm() == 0.0);
  }
  CHECK_THROWS_AS(transmon_jumps(p, HilbertSpace({2}), 0), std::invalid_argument);
}

TEST_CASE("transmon T1 and Ramsey decay") {
  SystemParams p;
  HilbertSpace sp({3});
  Mat e = Mat::Zero(3, 3);
  e(1, 1) = 1.0;
  auto ops = operators(transmon_jumps(p, sp, 0, only(Channel::TransmonDecay)));
  Mat L = lindbladian_matrix(Mat::Zero(3, 3), ops);
  const double dt = 4 * p.T1_ge / 199;
  std::vector<double> t, y;
  auto ys = trace_element(L, e, 1, 1, dt, 200);
  for (int k = 0; k < 200; ++k) t.push_back(k * dt);
  auto fit = exp_decay_fit(t, ys);
  // Decay alone carries the (1 + n_th) factor.
  CHECK(fit.tau * (1 + p.n_th_q) == doctest::Approx(p.T1_ge).epsilon(0.005));

  Mat plus = Mat::Zero(3, 3);
  plus.block(0, 0, 2, 2).setConstant(0.5);
  NoiseToggles t2 = NoiseToggles::none();
  t2.transmon_decay = t2.transmon_dephasing = true;
  SystemParams lit = p, ram = p;
  lit.n_th_q = ram.n_th_q = 0.0;
  ram.dephasing = SystemParams::Dephasing::Ramsey;
  const double gphi = pure_dephasing_rate(p.T1_ge, p.T2_ge);
  for (auto* q : {&lit, &ram}) {
    Mat Lq = lindbladian_matrix(Mat::Zero(3, 3), operators(transmon_jumps(*q, sp, 0, t2)));
    const double ddt = 3 * p.T2_ge / 199;
    auto c = trace_element(Lq, plus, 0, 1, ddt, 200, true);
    std::vector<double> tt;
    for (int k = 0; k < 200; ++k) tt.push_back(k * ddt);
    auto f2 = exp_decay_fit(tt, c, false);
    double rate = 1.0 / f2.tau;
    if (q == &ram) {
      CHECK(rate == doctest::Approx(1.0 / p.T2_ge).epsilon(0.005));
    } else {
      CHECK(rate == doctest::Approx(1.0 / (2 * p.T1_ge) + gphi / 2).epsilon(0.005));
    }
  }
}

TEST_CASE("cavity jump operators") {
  SystemParams p;
  HilbertSpace sp({6}, {"Alice"});
  JumpList j = cavity_jumps(p, sp, 0, Mode::Alice);
  auto dec = select(j, Channel::CavityDecay);
  REQUIRE(dec.size() == 1);
  CHECK((dec[0].op - std::sqrt(1.0 / 0.0206) * destroy(6)).norm() < 1e-12);
  for (int n = 1; n < 6; ++n) {
    Mat r = Mat::Zero(6, 6);
    r(n, n) = 1.0;
    CHECK(-apply_dissipator(dec[0].op, r)(n, n).real() == doctest::Approx(n / p.T1_A).epsilon(1e-12));
  }
  SystemParams q = p;
  q.T2_B = 2 * q.T1_B;
  for (const auto& d : select(cavity_jumps(q, sp, 0, Mode::Bob), Channel::CavityDephasing)) CHECK(d.op.norm() == 0.0);
  CHECK_THROWS_AS(parse_mode("Carol"), std::invalid_argument);
}

TEST_CASE("channel names round-trip") {
  for (Channel c : all_channels()) CHECK(parse_channel(channel_name(c)) == c);
  CHECK_THROWS_AS(parse_channel("gremlins"), std::invalid_argument);
}

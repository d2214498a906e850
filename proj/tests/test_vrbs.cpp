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

#include <random>

#include "cavsim/rng.hpp"
#include "cavsim/vrbs.hpp"
#include "doctest.h"

using namespace cavsim;

TEST_CASE("transmon relations and sideband arithmetic") {
  SystemParams p;
  auto tr = transmon_relations(p);
  CHECK(tr.E_C == doctest::Approx(245e6));
  CHECK(std::sqrt(8 * tr.E_J * tr.E_C) - tr.E_C == doctest::Approx(p.omega_q));
  CHECK(std::pow(2 * tr.E_C / tr.E_J, 0.25) == doctest::Approx(tr.theta_q));
  CHECK(mode_detuning(p, Mode::Alice) == doctest::Approx(p.omega_q - p.omega_a));
  CHECK(sideband_drive_frequency(p, Mode::Bob, 0.0) == doctest::Approx(2 * p.omega_q + p.alpha - p.omega_b));
  // round trip between rate and displacement
  VrbsConfig c;
  CHECK(sideband_rate_from_xi(p, Mode::Alice, c.xi_1(p)) == doctest::Approx(c.g_sb_a).epsilon(1e-12));
  CHECK(sideband_rate_from_xi(p, Mode::Bob, c.xi_2(p)) == doctest::Approx(c.g_sb_b).epsilon(1e-12));
}

TEST_CASE("effective beamsplitter rate") {
  SystemParams p;
  VrbsConfig c;
  c.detuning = -5e6;
  auto r = effective_bs_rate(c, p);
  CHECK(r.bracket == doctest::Approx(98.5));
  CHECK(r.ratio_to_direct == doctest::Approx(197.0));
  // far detuned: only the direct four-wave term survives
  VrbsConfig far = c;
  far.detuning = -1e15;
  auto rf = effective_bs_rate(far, p);
  double direct = 0.5 * kTwoPi * p.alpha * c.xi_1(p) * c.xi_2(p) * (p.g_a / mode_detuning(p, Mode::Alice)) *
                  (p.g_b / mode_detuning(p, Mode::Bob));
  CHECK(rf.rate == doctest::Approx(direct).epsilon(1e-6));
  // linear in each drive
  VrbsConfig twice = c;
  twice.g_sb_b *= 2;
  CHECK(effective_bs_rate(twice, p).rate == doctest::Approx(2 * r.rate));
  c.detuning = 0.0;
  CHECK_THROWS_AS(effective_bs_rate(c, p), std::invalid_argument);
}

TEST_CASE("nonlinear beamsplitter hamiltonian") {
  const double g = 1.0, chi = -0.1, delta = -2.0;
  const int d = 4;
  Mat H = nonlinear_bs_hamiltonian(g, chi, delta, d);
  auto idx = [&](int a, int b) { return a * d + b; };
  CHECK(std::abs(H(idx(0, 1), idx(1, 0)) - g) < 1e-15);
  CHECK(std::abs(H(idx(1, 1), idx(2, 0)) - g * std::sqrt(2.0) * (1 - 2 * chi / delta)) < 1e-14);
  Mat N = Mat::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) N(idx(a, b), idx(a, b)) = a + b;
  CHECK((H * N - N * H).norm() < 1e-12);
  CHECK(hermiticity_error(H) < 1e-15);
}

TEST_CASE("driven hamiltonian and dressed frame") {
  SystemParams p;
  VrbsConfig c;
  Mat H = vrbs_hamiltonian(c, p);
  CHECK(H.rows() == vrbs_space(c).dim());
  CHECK(hermiticity_error(H) < 1e-12);
  auto df = dressed_frame(H, vrbs_space(c));
  CHECK(df.min_overlap > 0.9);
  CHECK((df.basis.adjoint() * df.basis - Mat::Identity(H.rows(), H.cols())).norm() < 1e-10);
  // the dressed rate follows the perturbative estimate to leading order
  CHECK(df.g_bs == doctest::Approx(std::abs(effective_bs_rate(c, p).rate)).epsilon(0.1));
  VrbsConfig bad;
  bad.transmon_levels = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sideband calibration") {
  SystemParams p;
  CHECK_THROWS_AS(calibrate_sideband(p, Mode::Alice, 0.0, 3e6), CalibrationError);
  const double bare = sideband_drive_frequency(p, Mode::Alice, 0.0);
  auto c1 = calibrate_sideband(p, Mode::Alice, 5e6, 3e6);
  auto c2 = calibrate_sideband(p, Mode::Alice, 10e6, 3e6);
  CHECK(c1.contrast > 0.99);
  CHECK(c2.g_sb / c1.g_sb == doctest::Approx(2.0).epsilon(0.1));
  // the residual offset is the Stark shift of |f>: 2 * (2 alpha xi^2)
  const double xi = drive_displacement(5e6, bare, p.omega_q);
  CHECK(c1.resonance_hz - bare == doctest::Approx(4 * p.alpha * xi * xi).epsilon(0.05));
  CHECK((c2.resonance_hz - bare) / (c1.resonance_hz - bare) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(c1.scan_frequency.size() == c1.scan_contrast.size());
}

TEST_CASE("simulated oscillation") {
  SystemParams p;
  VrbsConfig c;
  c.detuning = -20e6;
  double g = dressed_frame(vrbs_hamiltonian(c, p), vrbs_space(c)).g_bs;
  auto tr = simulate_vrbs(c, p, DrivenNoise::none(), 4 * kPi / g, 201);
  CHECK(tr.p_alice.front() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tr.p_bob.front() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(*std::max_element(tr.p_bob.begin(), tr.p_bob.end()) > 0.98);
  for (size_t i = 0; i < tr.t.size(); ++i) CHECK(tr.p_alice[i] + tr.p_bob[i] <= 1 + 1e-9);
  auto f = fit_bs_oscillation(tr.t, tr.p_alice);
  CHECK(f.g_bs == doctest::Approx(g).epsilon(0.01));
  CHECK(f.sign == 1);
}

TEST_CASE("oscillation fit round trip") {
  const double g = kTwoPi * 1e3, k1 = 10.0, kp = 20.0;
  Rng rng = make_rng(3);
  std::normal_distribution<double> nz(0.0, 1e-3);
  std::vector<double> t, y, y0;
  for (int i = 0; i < 2000; ++i) {
    t.push_back(i * 10e-6);
    y.push_back(bs_model(t.back(), g, k1, kp, 1) + nz(rng));
    y0.push_back(bs_model(t.back(), g, 0, 0, -1));
  }
  auto f = fit_bs_oscillation(t, y);
  CHECK(f.g_bs == doctest::Approx(g).epsilon(0.01));
  CHECK(f.kappa_1 == doctest::Approx(k1).epsilon(0.01));
  CHECK(f.kappa_phi == doctest::Approx(kp).epsilon(0.01));
  auto f0 = fit_bs_oscillation(t, y0);
  CHECK(f0.sign == -1);
  CHECK(std::abs(f0.kappa_1) < 1e-3 * g);
  CHECK(std::abs(f0.kappa_phi) < 1e-3 * g);
  std::vector<double> few(t.begin(), t.begin() + 10), fy(y.begin(), y.begin() + 10);
  CHECK_THROWS(fit_bs_oscillation(few, fy));
}

TEST_CASE("beamsplitter fidelity arithmetic") {
  auto ideal = bs_fidelity(1.0, 0.0, 0.0);
  CHECK(ideal.F_BS == 1.0);
  CHECK(ideal.F_SWAP == 1.0);
  auto f = bs_fidelity(1.0, 4.0 / kPi * 0.003, 0.0);
  CHECK(f.F_BS == doctest::Approx(0.997).epsilon(1e-12));
  CHECK(1 - f.F_SWAP == doctest::Approx(2 * (1 - f.F_BS)));
  auto g = bs_fidelity(2.0, 0.01, 0.02);
  CHECK(1 - g.F_SWAP == doctest::Approx(2 * (1 - g.F_BS)));
  CHECK(bs_fidelity(2.0, 0.02, 0.02).F_BS < g.F_BS);
  CHECK(bs_fidelity(3.0, 0.01, 0.02).F_BS > g.F_BS);
  CHECK_FALSE(bs_fidelity(1.0, 1.0, 0.0).valid);
}

TEST_CASE("swap sequence") {
  SystemParams p;
  VrbsConfig c;
  auto s = swap_sequence(c, p, DrivenNoise::none(), 6, SwapCheck::HeatingEach);
  REQUIRE(s.steps.size() == 6);
  for (size_t k = 0; k < s.steps.size(); ++k) {
    bool odd = k % 2 == 0;  // after 1, 3, 5 swaps the photon sits in Bob
    CHECK((odd ? s.steps[k].p01 : s.steps[k].p10) > 1 - 1e-3);
    CHECK(s.steps[k].keep == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(parse_swap_check(swap_check_name(SwapCheck::ErasureFinal)) == SwapCheck::ErasureFinal);
  CHECK_THROWS_AS(parse_swap_check("sometimes"), std::invalid_argument);
}

TEST_CASE("heating fit") {
  const double P = 0.01167;
  std::vector<double> n{1, 5, 10, 20, 50}, r;
  for (double k : n) r.push_back(1 - std::pow(1 - P, k));
  auto f = heating_fit(n, r);
  CHECK(std::abs(f.p_up - P) < 5e-4);
  auto z = heating_fit(n, std::vector<double>(n.size(), 0.0));
  CHECK(z.p_up == 0.0);
  CHECK(z.degenerate);
  CHECK(heating_fit({1.0}, {0.01}).p_up == doctest::Approx(0.01).epsilon(1e-14));
}

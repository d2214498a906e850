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

#include "cavsim/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavsim/fit.hpp"
#include "cavsim/rng.hpp"

namespace cavsim {

std::vector<std::pair<int, int>> givens_pairs(int d) {
  if (d < 2) throw std::invalid_argument("givens_pairs: d must be >= 2");
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < d - 1; ++c)
    for (int r = d - 1; r > c; --r) out.push_back({r - 1, r});
  return out;
}

Mat single_qudit_rotation(int d, const double* a, std::vector<Mat>* grad) {
  auto pairs = givens_pairs(d);
  const int P = static_cast<int>(pairs.size());
  std::vector<Mat> G(P), dth(P), dph(P);
  for (int i = 0; i < P; ++i) {
    auto [j, k] = pairs[i];
    double th = a[2 * i], ph = a[2 * i + 1];
    cplx e = std::exp(kI * ph), c = std::cos(th), s = std::sin(th);
    G[i] = Mat::Identity(d, d);
    G[i](j, j) = c;
    G[i](k, k) = c;
    G[i](j, k) = -std::conj(e) * s;
    G[i](k, j) = e * s;
    if (grad) {
      dth[i] = Mat::Zero(d, d);
      dth[i](j, j) = -s;
      dth[i](k, k) = -s;
      dth[i](j, k) = -std::conj(e) * c;
      dth[i](k, j) = e * c;
      dph[i] = Mat::Zero(d, d);
      dph[i](j, k) = kI * std::conj(e) * s;
      dph[i](k, j) = kI * e * s;
    }
  }
  const double* psi = a + 2 * P;
  Vec D(d);
  double sum = 0.0;
  for (int i = 0; i < d - 1; ++i) {
    D(i) = std::exp(kI * psi[i]);
    sum += psi[i];
  }
  D(d - 1) = std::exp(-kI * sum);

  // prefix[i] = G_0 ... G_{i-1}; suffix[i] = G_i ... G_{P-1} D
  std::vector<Mat> prefix(P + 1), suffix(P + 1);
  prefix[0] = Mat::Identity(d, d);
  for (int i = 0; i < P; ++i) prefix[i + 1] = prefix[i] * G[i];
  suffix[P] = D.asDiagonal();
  for (int i = P - 1; i >= 0; --i) suffix[i] = G[i] * suffix[i + 1];
  if (grad) {
    grad->assign(d * d - 1, Mat());
    for (int i = 0; i < P; ++i) {
      (*grad)[2 * i] = prefix[i] * dth[i] * suffix[i + 1];
      (*grad)[2 * i + 1] = prefix[i] * dph[i] * suffix[i + 1];
    }
    for (int i = 0; i < d - 1; ++i) {
      Vec dD = Vec::Zero(d);
      dD(i) = kI * D(i);
      dD(d - 1) = -kI * D(d - 1);
      (*grad)[2 * P + i] = prefix[P] * dD.asDiagonal();
    }
  }
  return suffix[0];
}

Mat single_qudit_rotation(int d, const std::vector<double>& angles) {
  if (d < 2) throw std::invalid_argument("single_qudit_rotation: d must be >= 2");
  if (static_cast<int>(angles.size()) != su_angle_count(d)) {
    throw std::invalid_argument("single_qudit_rotation: expected d^2 - 1 angles");
  }
  return single_qudit_rotation(d, angles.data(), nullptr);
}

namespace {

double overlap_loss(const Mat& R, const Mat& U, const std::vector<Mat>* dR, double* grad) {
  const double D = static_cast<double>(U.rows());
  cplx tau = (U.adjoint() * R).trace();
  if (grad && dR) {
    for (size_t i = 0; i < dR->size(); ++i) {
      cplx dt = (U.adjoint() * (*dR)[i]).trace();
      grad[i] = -2.0 * std::real(std::conj(tau) * dt) / (D * D);
    }
  }
  return 1.0 - std::norm(tau) / (D * D);
}

std::vector<double> uniform_angles(Rng& rng, int n) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

}  // namespace

Decomposition decompose_su(const Mat& U, int restarts, uint64_t seed) {
  const int d = static_cast<int>(U.rows());
  if (U.cols() != d || d < 2) throw std::invalid_argument("decompose_su: square matrix with d >= 2 required");
  const int n = su_angle_count(d);
  auto f = [&](const double* x, double* g) {
    std::vector<Mat> dR;
    Mat R = single_qudit_rotation(d, x, g ? &dR : nullptr);
    return overlap_loss(R, U, &dR, g);
  };
  Decomposition best;
  best.residual = 2.0;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Rng rng = make_rng(seed, r);
    MinimizeResult m = minimize_lbfgs(f, uniform_angles(rng, n), 2000, 1e-14);
    double v = f(m.x.data(), nullptr);
    if (v < best.residual) {
      best.residual = v;
      best.angles = m.x;
    }
    if (best.residual < 1e-14) break;
  }
  return best;
}

Mat csum(int d) {
  if (d < 1) throw std::invalid_argument("csum: d must be >= 1");
  Mat C = Mat::Zero(d * d, d * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) C(m * d + (m + n) % d, m * d + n) = 1.0;
  return C;
}

double gate_fidelity(const Mat& U, const Mat& V) {
  if (U.rows() != V.rows() || U.cols() != V.cols() || U.rows() != U.cols()) {
    throw std::invalid_argument("gate_fidelity: dimension mismatch");
  }
  const double D = static_cast<double>(U.rows());
  return std::norm((V.adjoint() * U).trace()) / (D * D);
}

namespace {

void check_two_qudit(const Mat& U, int d) {
  if (d < 2 || U.rows() != d * d || U.cols() != d * d) throw std::invalid_argument("expected a d^2 x d^2 matrix");
  if ((U.adjoint() * U - Mat::Identity(d * d, d * d)).norm() > 1e-8) throw std::invalid_argument("matrix is not unitary");
}

Vec haar_vector(Rng& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) {
    double re = n(rng), im = n(rng);
    v(i) = cplx(re, im);
  }
  return v / v.norm();
}

// Linear entropy of normalized subsystem purities of the operator Schmidt spectrum.
double operator_entanglement(const Mat& U, int d) {
  Mat R(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) R(i * d + k, j * d + l) = U(i * d + j, k * d + l);
  Eigen::JacobiSVD<Mat> svd(R);
  double sum = 0.0;
  const double norm = static_cast<double>(d * d);
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    double lam = svd.singularValues()(i) * svd.singularValues()(i) / norm;
    sum += lam * lam;
  }
  return 1.0 - sum;
}

Mat swap_gate(int d) {
  Mat S = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S(j * d + i, i * d + j) = 1.0;
  return S;
}

}  // namespace

EntanglingPower entangling_power(const Mat& U, int d, int n_samples, uint64_t seed) {
  check_two_qudit(U, d);
  if (n_samples < 1) throw std::invalid_argument("entangling_power: n_samples must be >= 1");
  Rng rng = make_rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    Vec a = haar_vector(rng, d), b = haar_vector(rng, d);
    Vec out = U * Eigen::kroneckerProduct(a, b).eval();
    Eigen::Map<const Mat> M(out.data(), d, d);  // column-major: M(j, i) = out(i d + j)
    Mat rho = M.transpose() * M.transpose().adjoint();
    double e = 1.0 - (rho * rho).trace().real();
    e = std::max(0.0, e);
    sum += e;
    sum2 += e * e;
  }
  EntanglingPower r;
  r.value = sum / n_samples;
  double var = n_samples > 1 ? (sum2 - n_samples * r.value * r.value) / (n_samples - 1) : 0.0;
  r.stderr_ = std::sqrt(std::max(0.0, var) / n_samples);
  return r;
}

double entangling_power_exact(const Mat& U, int d) {
  check_two_qudit(U, d);
  Mat S = swap_gate(d);
  double f = static_cast<double>(d) / (d + 1);
  return f * f * (operator_entanglement(U, d) + operator_entanglement(U * S, d) - operator_entanglement(S, d));
}

double vrbs_quarter_time(const VrbsConfig& cfg, const SystemParams& p) {
  DressedFrame fr = dressed_frame(vrbs_hamiltonian(cfg, p), vrbs_space(cfg));
  if (!(fr.g_bs > 0.0)) throw NumericalError("vrbs_quarter_time: vanishing beamsplitter rate");
  return kPi / (4.0 * fr.g_bs);
}

TwoQuditUnitary extract_vrbs_unitary(const VrbsConfig& cfg, const SystemParams& p, double gate_time, int d,
                                     double max_leakage) {
  if (d < 2) throw std::invalid_argument("extract_vrbs_unitary: d must be >= 2");
  if (cfg.cutoff_a < d || cfg.cutoff_b < d) throw std::invalid_argument("extract_vrbs_unitary: cutoffs must be >= d");
  if (gate_time < 0.0) throw std::invalid_argument("extract_vrbs_unitary: negative gate time");
  HilbertSpace sp = vrbs_space(cfg);
  Mat H = vrbs_hamiltonian(cfg, p);
  DressedFrame fr = dressed_frame(H, sp);
  Mat Ug = fr.embedding.adjoint() * (-kI * H * gate_time).exp() * fr.embedding;
  std::vector<int> sub;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) sub.push_back(sp.index({0, m, n}));
  Mat M(d * d, d * d);
  for (int r = 0; r < d * d; ++r)
    for (int c = 0; c < d * d; ++c) M(r, c) = Ug(sub[r], sub[c]);
  TwoQuditUnitary out;
  out.d = d;
  for (int c = 0; c < d * d; ++c) out.leakage = std::max(out.leakage, 1.0 - M.col(c).squaredNorm());
  if (out.leakage > max_leakage) {
    throw LeakageError("extract_vrbs_unitary: leakage " + std::to_string(out.leakage) + " exceeds limit");
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.matrix = svd.matrixU() * svd.matrixV().adjoint();
  return out;
}

namespace {

struct Circuit {
  const Mat& E;
  int d;
  int nb;
  int na;  // angles per rotation

  Mat local(const double* x, std::vector<Mat>* ga, std::vector<Mat>* gb, Mat* Ra, Mat* Rb) const {
    *Ra = single_qudit_rotation(d, x, ga);
    *Rb = single_qudit_rotation(d, x + na, gb);
    return Eigen::kroneckerProduct(*Ra, *Rb).eval();
  }

  Mat eval(const double* x) const {
    Mat Ra, Rb;
    Mat U = local(x, nullptr, nullptr, &Ra, &Rb);
    for (int i = 1; i <= nb; ++i) U = U * E * local(x + 2 * na * i, nullptr, nullptr, &Ra, &Rb);
    return U;
  }

  // 1 - |Tr(C^dag U)|^2 / D^2 and its gradient.
  double loss(const Mat& C, const double* x, double* g) const {
    const int D = d * d;
    std::vector<Mat> K(nb + 1), Ra(nb + 1), Rb(nb + 1);
    std::vector<std::vector<Mat>> ga(nb + 1), gb(nb + 1);
    for (int i = 0; i <= nb; ++i) K[i] = local(x + 2 * na * i, g ? &ga[i] : nullptr, g ? &gb[i] : nullptr, &Ra[i], &Rb[i]);
    // prefix[i]: everything left of K_i; suffix[i]: everything right of K_i.
    std::vector<Mat> prefix(nb + 1), suffix(nb + 1);
    prefix[0] = Mat::Identity(D, D);
    for (int i = 1; i <= nb; ++i) prefix[i] = prefix[i - 1] * K[i - 1] * E;
    suffix[nb] = Mat::Identity(D, D);
    for (int i = nb - 1; i >= 0; --i) suffix[i] = E * K[i + 1] * suffix[i + 1];
    Mat U = prefix[nb] * K[nb];
    cplx tau = (C.adjoint() * U).trace();
    const double DD = static_cast<double>(D) * D;
    if (g) {
      for (int i = 0; i <= nb; ++i) {
        Mat Mt = (suffix[i] * C.adjoint() * prefix[i]).transpose();
        for (int k = 0; k < na; ++k) {
          cplx da = Mt.cwiseProduct(Eigen::kroneckerProduct(ga[i][k], Rb[i]).eval()).sum();
          cplx db = Mt.cwiseProduct(Eigen::kroneckerProduct(Ra[i], gb[i][k]).eval()).sum();
          g[2 * na * i + k] = -2.0 * std::real(std::conj(tau) * da) / DD;
          g[2 * na * i + na + k] = -2.0 * std::real(std::conj(tau) * db) / DD;
        }
      }
    }
    return 1.0 - std::norm(tau) / DD;
  }
};

}  // namespace

Mat synthesis_circuit(const Mat& entangler, int d, int n_blocks, const std::vector<double>& angles) {
  const int na = su_angle_count(d);
  if (n_blocks < 0 || static_cast<int>(angles.size()) != (n_blocks + 1) * 2 * na) {
    throw std::invalid_argument("synthesis_circuit: expected (n_blocks + 1) * 2 * (d^2 - 1) angles");
  }
  if (entangler.rows() != d * d || entangler.cols() != d * d) throw std::invalid_argument("synthesis_circuit: entangler size");
  Circuit c{entangler, d, n_blocks, na};
  return c.eval(angles.data());
}

SynthesisResult synthesize(const Mat& target, const Mat& entangler, int d, int n_blocks, const SynthesisOptions& opt) {
  if (n_blocks < 1) throw std::invalid_argument("synthesize: n_blocks must be >= 1");
  check_two_qudit(target, d);
  check_two_qudit(entangler, d);
  const int na = su_angle_count(d);
  const int n = (n_blocks + 1) * 2 * na;
  if (!opt.warm_start.empty() && static_cast<int>(opt.warm_start.size()) != n) {
    throw std::invalid_argument("synthesize: warm start has the wrong length");
  }
  Circuit circ{entangler, d, n_blocks, na};
  const int restarts = std::max(0, opt.restarts);
  const int total = restarts + (opt.warm_start.empty() ? 0 : 1);
  if (total == 0) throw std::invalid_argument("synthesize: no starting points");
  std::vector<std::vector<double>> xs(total);
  std::vector<double> fid(total, 0.0);

  auto run = [&](int r) {
    std::vector<double> x0;
    if (r < restarts) {
      Rng rng = make_rng(opt.seed, r);
      x0 = uniform_angles(rng, n);
    } else {
      x0 = opt.warm_start;
    }
    auto f = [&](const double* x, double* g) { return circ.loss(target, x, g); };
    MinimizeResult m = minimize_lbfgs(f, x0, opt.max_iterations, opt.gradient_tolerance);
    // Keep the starting point if the optimizer did not improve on it.
    double v0 = f(x0.data(), nullptr), v = f(m.x.data(), nullptr);
    if (v0 < v) {
      m.x = x0;
      v = v0;
    }
    xs[r] = m.x;
    fid[r] = 1.0 - v;
  };
  const int workers = std::max(1, std::min(opt.workers, total));
  if (workers == 1) {
    for (int r = 0; r < total; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < total; r += workers) run(r);
      });
    }
    for (auto& t : pool) t.join();
  }
  SynthesisResult out;
  out.n_blocks = n_blocks;
  out.restart_fidelities = fid;
  int best = 0;
  for (int r = 1; r < total; ++r)
    if (fid[r] > fid[best]) best = r;
  out.angles = xs[best];
  out.fidelity = fid[best];
  return out;
}

std::vector<SynthesisResult> synthesis_ladder(const Mat& target, const Mat& entangler, int d, int max_blocks,
                                              const SynthesisOptions& opt) {
  if (max_blocks < 1) throw std::invalid_argument("synthesis_ladder: max_blocks must be >= 1");
  std::vector<SynthesisResult> out;
  const int na = su_angle_count(d);
  SynthesisOptions o = opt;
  for (int nb = 1; nb <= max_blocks; ++nb) {
    o.seed = derive_seed(opt.seed, static_cast<uint64_t>(nb));
    if (!out.empty()) {
      o.warm_start = out.back().angles;
      o.warm_start.resize(static_cast<size_t>((nb + 1) * 2 * na), 0.0);
    }
    out.push_back(synthesize(target, entangler, d, nb, o));
  }
  return out;
}

}  // namespace cavsim

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

#include "cavsim/readout.hpp"

#include <algorithm>
#include <cmath>

#include "cavsim/fit.hpp"
#include "cavsim/lindblad.hpp"

namespace cavsim {

ReadoutModel ReadoutModel::ideal(double duration) {
  ReadoutModel m;
  m.duration = duration;
  return m;
}

ReadoutModel ReadoutModel::device() {
  ReadoutModel m;
  m.p_relax_eg = 0.0055;
  m.p_relax_fe = 0.0110;
  m.classifier << 0.9976, 0.0024, 0.0000,
                  0.0024, 0.9966, 0.0010,
                  0.0000, 0.0010, 0.9990;
  return m;
}

void ReadoutModel::validate() const {
  if (p_relax_eg < 0 || p_relax_eg > 1 || p_relax_fe < 0 || p_relax_fe > 1) {
    throw std::invalid_argument("ReadoutModel: relaxation probability outside [0, 1]");
  }
  if (!is_column_stochastic(classifier)) throw std::invalid_argument("ReadoutModel: classifier not column-stochastic");
  if (duration < 0) throw std::invalid_argument("ReadoutModel: negative duration");
}

Mat3 symmetric_classifier(double c_ge, double c_ef, double c_gf) {
  Mat3 c;
  c << 1 - c_ge - c_gf, c_ge, c_gf,
       c_ge, 1 - c_ge - c_ef, c_ef,
       c_gf, c_ef, 1 - c_ef - c_gf;
  return c;
}

Mat3 relaxation_matrix(double p_eg, double p_fe) {
  Mat3 t;
  t << 1, p_eg, 0,
       0, 1 - p_eg, p_fe,
       0, 0, 1 - p_fe;
  return t;
}

Mat3 predicted_confusion(const ReadoutModel& m) { return m.classifier * relaxation_matrix(m.p_relax_eg, m.p_relax_fe); }

bool is_column_stochastic(const RMat& m, double tol) {
  if ((m.array() < -tol).any() || (m.array() > 1 + tol).any()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (std::abs(m.col(j).sum() - 1.0) > tol) return false;
  }
  return true;
}

double assignment_fidelity(const RMat& confusion) {
  if (confusion.rows() != confusion.cols() || confusion.rows() == 0) {
    throw std::invalid_argument("assignment_fidelity: matrix not square");
  }
  return confusion.diagonal().mean();
}

std::array<Mat, 3> readout_unnormalized(const ReadoutModel& m, const Mat& rho, const HilbertSpace& space,
                                        const std::vector<Mat>& idle_jumps) {
  if (space.dims().at(0) != 3) throw std::invalid_argument("readout: transmon must be subsystem 0 with 3 levels");
  if (rho.rows() != space.dim()) throw std::invalid_argument("readout: dimension mismatch");
  Mat r = idle(rho, idle_jumps, m.duration);
  const int n = space.dim() / 3;
  const Mat3 t = relaxation_matrix(m.p_relax_eg, m.p_relax_fe);
  std::array<Mat, 3> out;
  for (auto& o : out) o = Mat::Zero(space.dim(), space.dim());
  for (int s = 0; s < 3; ++s) {
    Mat blk = r.block(s * n, s * n, n, n);
    for (int sp = 0; sp < 3; ++sp) {
      if (t(sp, s) == 0.0) continue;
      for (int l = 0; l < 3; ++l) {
        double w = m.classifier(l, sp) * t(sp, s);
        if (w == 0.0) continue;
        out[l].block(sp * n, sp * n, n, n) += w * blk;
      }
    }
  }
  return out;
}

std::vector<ReadoutBranch> readout_channel(const ReadoutModel& m, const Mat& rho, const HilbertSpace& space,
                                           const std::vector<Mat>& idle_jumps) {
  m.validate();
  auto un = readout_unnormalized(m, rho, space, idle_jumps);
  std::vector<ReadoutBranch> out;
  for (int l = 0; l < 3; ++l) {
    ReadoutBranch b;
    b.label = l;
    b.probability = un[l].trace().real();
    b.state = b.probability > 0 ? Mat(un[l] / b.probability) : Mat::Zero(space.dim(), space.dim());
    out.push_back(std::move(b));
  }
  return out;
}

ReadoutFit fit_readout_model(const RMat& measured) {
  if (measured.rows() != 3 || measured.cols() != 3) throw std::invalid_argument("fit_readout_model: need a 3x3 matrix");
  if (!is_column_stochastic(measured, 1e-6)) throw std::invalid_argument("fit_readout_model: matrix not column-stochastic");
  const RMat& M = measured;
  auto clip = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
  double c_ge = clip(M(1, 0), 0.5), c_gf = clip(M(2, 0), 0.5);
  double c_ef = clip(M(2, 1), 0.5);
  double c00 = 1 - c_ge - c_gf, c11 = 1 - c_ge - c_ef;
  double p_eg = clip((M(0, 1) - c_ge) / (c00 - c_ge), 1.0);
  double p_fe = clip((M(1, 2) - c_ef) / (c11 - c_ef), 1.0);

  LeastSquaresProblem p;
  p.names = {"p_relax_eg", "p_relax_fe", "c_ge", "c_ef", "c_gf"};
  p.initial = {p_eg, p_fe, c_ge, c_ef, c_gf};
  p.lower = {0, 0, 0, 0, 0};
  p.upper = {1, 1, 0.5, 0.5, 0.5};
  p.num_residuals = 9;
  p.covariance = false;
  p.residuals = [&M](const double* x, double* r) {
    Mat3 pred = symmetric_classifier(x[2], x[3], x[4]) * relaxation_matrix(x[0], x[1]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[3 * i + j] = pred(i, j) - M(i, j);
  };
  FitResult f = least_squares(p);
  ReadoutFit out;
  out.model.p_relax_eg = f.params[0];
  out.model.p_relax_fe = f.params[1];
  out.c_ge = f.params[2];
  out.c_ef = f.params[3];
  out.c_gf = f.params[4];
  out.model.classifier = symmetric_classifier(out.c_ge, out.c_ef, out.c_gf);
  out.residual = f.residual_norm;
  out.converged = f.converged;
  if (!f.converged && f.residual_norm > 1e-6) throw NumericalError("fit_readout_model: " + f.message);
  return out;
}

CorrectedPopulations correct_populations(const RVec& measured, const RMat& confusion) {
  if (confusion.rows() != confusion.cols() || confusion.rows() != measured.size()) {
    throw std::invalid_argument("correct_populations: dimension mismatch");
  }
  Eigen::FullPivLU<RMat> lu(confusion);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) {
    throw std::invalid_argument("correct_populations: confusion matrix is singular");
  }
  CorrectedPopulations out;
  out.probs = lu.solve(measured);
  for (Eigen::Index i = 0; i < out.probs.size(); ++i) {
    if (out.probs(i) < 0) {
      if (out.probs(i) < -1e-12) out.clipped = true;
      out.probs(i) = 0;
    }
  }
  double s = out.probs.sum();
  if (s <= 0) throw std::invalid_argument("correct_populations: nothing left after clipping");
  out.probs /= s;
  return out;
}

Mat3 mapping_confusion_reference() {
  Mat3 m;
  m << 0.9959, 0.0491, 0.0100,
       0.0018, 0.9467, 0.0172,
       0.0022, 0.0042, 0.9728;
  return m;
}

DualRailMap dual_rail_map_channel(const SystemParams& p, const DualRailMapConfig& cfg) {
  DualRailMap map;
  const HilbertSpace& sp = map.space;
  JumpList jumps = transmon_jumps(p, sp, 0, cfg.noise);
  for (auto& j : cavity_jumps(p, sp, 1, Mode::Alice, cfg.noise)) jumps.push_back(j);
  for (auto& j : cavity_jumps(p, sp, 2, Mode::Bob, cfg.noise)) jumps.push_back(j);
  auto ops = operators(jumps);
  const int d = sp.dim();
  LevelPairs sb_a{{sp.index({0, 1, 0}), sp.index({2, 0, 0})}};
  LevelPairs sb_b{{sp.index({0, 0, 1}), sp.index({2, 0, 0})}};
  LevelPairs ef;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) ef.push_back({sp.index({1, m, n}), sp.index({2, m, n})});
  Mat s1 = noisy_rotation(d, sb_a, kPi, ops, cfg.sideband_pi_alice, cfg.trotter_steps);
  Mat s2 = noisy_rotation(d, ef, kPi, ops, cfg.pi_ef, cfg.trotter_steps);
  Mat s3 = noisy_rotation(d, sb_b, kPi, ops, cfg.sideband_pi_bob, cfg.trotter_steps);
  map.superop = s3 * s2 * s1;
  return map;
}

Mat3 dual_rail_confusion(const SystemParams& p, const ReadoutModel& ro, const DualRailMapConfig& cfg) {
  DualRailMap map = dual_rail_map_channel(p, cfg);
  const HilbertSpace& sp = map.space;
  const Mat3 conf = cfg.noise.readout_error ? predicted_confusion(ro) : Mat3::Identity();
  const std::array<std::vector<int>, 3> prepared{{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Mat3 out;
  for (int c = 0; c < 3; ++c) {
    Mat rho = ket_to_dm(sp.basis(prepared[c]));
    Mat r = apply_superop(map.superop, rho);
    Mat tq = partial_trace(r, sp, {0});
    Eigen::Vector3d pops(tq(0, 0).real(), tq(1, 1).real(), tq(2, 2).real());
    out.col(c) = conf * pops;
  }
  return out;
}

}  // namespace cavsim

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

#include "cavsim/state.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace cavsim {

HilbertSpace::HilbertSpace(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.empty()) throw std::invalid_argument("HilbertSpace: no subsystems");
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("HilbertSpace: subsystem dimension must be >= 1");
  }
  if (labels_.empty()) {
    for (size_t i = 0; i < dims_.size(); ++i) labels_.push_back("s" + std::to_string(i));
  }
  if (labels_.size() != dims_.size()) throw std::invalid_argument("HilbertSpace: label count mismatch");
  strides_.assign(dims_.size(), 1);
  for (int i = static_cast<int>(dims_.size()) - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * dims_[i + 1];
  total_ = strides_[0] * dims_[0];
}

int HilbertSpace::subsystem(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("unknown subsystem '" + label + "'");
  return static_cast<int>(it - labels_.begin());
}

int HilbertSpace::index(const std::vector<int>& multi) const {
  if (multi.size() != dims_.size()) throw std::invalid_argument("index: wrong multi-index length");
  int idx = 0;
  for (size_t i = 0; i < dims_.size(); ++i) {
    if (multi[i] < 0 || multi[i] >= dims_[i]) throw std::out_of_range("index: level out of range");
    idx += multi[i] * strides_[i];
  }
  return idx;
}

std::vector<int> HilbertSpace::multi_index(int index) const {
  if (index < 0 || index >= total_) throw std::out_of_range("multi_index: index out of range");
  std::vector<int> m(dims_.size());
  for (size_t i = 0; i < dims_.size(); ++i) {
    m[i] = index / strides_[i];
    index %= strides_[i];
  }
  return m;
}

Vec HilbertSpace::basis(const std::vector<int>& multi) const {
  Vec v = Vec::Zero(total_);
  v(index(multi)) = 1.0;
  return v;
}

Mat HilbertSpace::embed(int s, const Mat& local) const {
  if (s < 0 || s >= num_subsystems()) throw std::invalid_argument("embed: bad subsystem");
  if (local.rows() != dims_[s] || local.cols() != dims_[s]) throw std::invalid_argument("embed: dimension mismatch");
  int left = total_ / (strides_[s] * dims_[s]);
  int right = strides_[s];
  Mat out = Mat::Zero(total_, total_);
  for (int l = 0; l < left; ++l) {
    for (int a = 0; a < dims_[s]; ++a) {
      for (int b = 0; b < dims_[s]; ++b) {
        cplx x = local(a, b);
        if (x == cplx(0.0)) continue;
        int ra = (l * dims_[s] + a) * right;
        int cb = (l * dims_[s] + b) * right;
        for (int r = 0; r < right; ++r) out(ra + r, cb + r) = x;
      }
    }
  }
  return out;
}

Mat destroy(int n) {
  Mat a = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i) a(i - 1, i) = std::sqrt(static_cast<double>(i));
  return a;
}

Mat HilbertSpace::annihilation(int s) const { return embed(s, destroy(dims_.at(s))); }
Mat HilbertSpace::creation(int s) const { return embed(s, destroy(dims_.at(s)).adjoint()); }

Mat HilbertSpace::number(int s) const {
  Mat n = Mat::Zero(dims_.at(s), dims_.at(s));
  for (int i = 0; i < dims_[s]; ++i) n(i, i) = static_cast<double>(i);
  return embed(s, n);
}

Mat HilbertSpace::projector(int s, int j) const { return transition(s, j, j); }

Mat HilbertSpace::transition(int s, int j, int k) const {
  int d = dims_.at(s);
  if (j < 0 || j >= d || k < 0 || k >= d) throw std::invalid_argument("transition: level out of range");
  Mat m = Mat::Zero(d, d);
  m(j, k) = 1.0;
  return embed(s, m);
}

Mat HilbertSpace::identity() const { return Mat::Identity(total_, total_); }

HilbertSpace build_space(const std::vector<int>& dims) { return HilbertSpace(dims); }

Mat make_operator(const HilbertSpace& space, const OperatorLabel& label) {
  int s = space.subsystem(label.subsystem);
  switch (label.kind) {
    case OpKind::Annihilation: return space.annihilation(s);
    case OpKind::Creation: return space.creation(s);
    case OpKind::Number: return space.number(s);
    case OpKind::Projector: return space.projector(s, label.j);
    case OpKind::Transition: return space.transition(s, label.j, label.k);
  }
  throw std::invalid_argument("make_operator: bad kind");
}

Mat rotation_unitary(int dim, int j, int k, double theta) {
  return rotation_unitary(dim, LevelPairs{{j, k}}, theta);
}

Mat rotation_unitary(int dim, const LevelPairs& pairs, double theta) {
  Mat r = Mat::Identity(dim, dim);
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  std::vector<char> used(dim, 0);
  for (auto [j, k] : pairs) {
    if (j == k) throw std::invalid_argument("rotation_unitary: j == k");
    if (j < 0 || k < 0 || j >= dim || k >= dim) throw std::invalid_argument("rotation_unitary: level out of range");
    if (used[j] || used[k]) throw std::invalid_argument("rotation_unitary: level pairs overlap");
    used[j] = used[k] = 1;
    r(j, j) = c;
    r(k, k) = c;
    r(k, j) = s;
    r(j, k) = -s;
  }
  return r;
}

Vec vec(const Mat& rho) { return Eigen::Map<const Vec>(rho.data(), rho.size()); }

Mat unvec(const Vec& v) {
  int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  if (static_cast<Eigen::Index>(d) * d != v.size()) throw std::invalid_argument("unvec: length is not a square");
  return Eigen::Map<const Mat>(v.data(), d, d);
}

Mat spre(const Mat& a) { return Eigen::kroneckerProduct(Mat::Identity(a.rows(), a.rows()), a).eval(); }
Mat spost(const Mat& b) { return Eigen::kroneckerProduct(b.transpose(), Mat::Identity(b.rows(), b.rows())).eval(); }
Mat sprepost(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(b.transpose(), a).eval(); }
Mat unitary_superop(const Mat& u) { return sprepost(u, u.adjoint()); }
Mat identity_superop(int dim) { return Mat::Identity(dim * dim, dim * dim); }

Mat dissipator(const Mat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("dissipator: operator not square");
  Mat ada = a.adjoint() * a;
  return sprepost(a, a.adjoint()) - 0.5 * spre(ada) - 0.5 * spost(ada);
}

Mat apply_dissipator(const Mat& a, const Mat& rho) {
  if (a.rows() != a.cols() || a.rows() != rho.rows() || rho.rows() != rho.cols())
    throw std::invalid_argument("apply_dissipator: dimension mismatch");
  Mat ar = a * rho;
  Mat ada = a.adjoint() * a;
  Mat out = ar * a.adjoint();
  out.noalias() -= 0.5 * (ada * rho);
  out.noalias() -= 0.5 * (rho * ada);
  return out;
}

Mat apply_superop(const Mat& s, const Mat& rho) {
  if (s.rows() != rho.size()) throw std::invalid_argument("apply_superop: dimension mismatch");
  return unvec(s * vec(rho));
}

bool is_trace_preserving(const Mat& s, double tol) {
  int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.rows()))));
  Vec id = vec(Mat::Identity(d, d));
  return ((id.transpose() * s) - id.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Mat choi_matrix(const Mat& s) {
  int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.rows()))));
  // J = sum_{ij} |i><j| (x) S(|i><j|)
  Mat j = Mat::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Mat out = unvec(s.col(b * d + a));
      j.block(a * d, b * d, d, d) = out;
    }
  }
  return j;
}

double choi_min_eigenvalue(const Mat& s) {
  Mat j = choi_matrix(s);
  Mat h = 0.5 * (j + j.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat partial_trace(const Mat& rho, const HilbertSpace& space, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) throw std::invalid_argument("partial_trace: dimension mismatch");
  std::vector<int> ks = keep;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (int s : ks) {
    if (s < 0 || s >= space.num_subsystems()) throw std::invalid_argument("partial_trace: bad subsystem");
  }
  const auto& dims = space.dims();
  int n = space.num_subsystems();
  std::vector<char> kept(n, 0);
  for (int s : ks) kept[s] = 1;
  int dk = 1;
  for (int s : ks) dk *= dims[s];
  // Split every global index into a kept index and a traced index.
  std::vector<int> kidx(space.dim()), tidx(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    auto m = space.multi_index(i);
    int a = 0, b = 0;
    for (int s = 0; s < n; ++s) {
      if (kept[s]) a = a * dims[s] + m[s];
      else b = b * dims[s] + m[s];
    }
    kidx[i] = a;
    tidx[i] = b;
  }
  Mat out = Mat::Zero(dk, dk);
  for (int j = 0; j < space.dim(); ++j) {
    for (int i = 0; i < space.dim(); ++i) {
      if (tidx[i] == tidx[j]) out(kidx[i], kidx[j]) += rho(i, j);
    }
  }
  return out;
}

Mat ket_to_dm(const Vec& psi) { return psi * psi.adjoint(); }

double purity(const Mat& rho) { return (rho * rho).trace().real(); }

double hermiticity_error(const Mat& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

void check_density(const Mat& rho, double trace_tol) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix not square");
  if (hermiticity_error(rho) > 1e-12) throw std::invalid_argument("density matrix not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > trace_tol) throw std::invalid_argument("density matrix trace != 1");
  Mat h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw std::invalid_argument("density matrix not positive");
}

}  // namespace cavsim

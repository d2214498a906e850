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

#include <string>
#include <utility>
#include <vector>

#include "cavsim/types.hpp"

namespace cavsim {

// Tensor-product space, first subsystem slowest.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims, std::vector<std::string> labels = {});

  int dim() const { return total_; }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int subsystem(const std::string& label) const;

  int index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(int index) const;
  Vec basis(const std::vector<int>& multi) const;

  // Embed a local operator on subsystem s.
  Mat embed(int s, const Mat& local) const;
  Mat annihilation(int s) const;
  Mat creation(int s) const;
  Mat number(int s) const;
  Mat projector(int s, int j) const;
  Mat transition(int s, int j, int k) const;  // |j><k| on subsystem s
  Mat identity() const;

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::vector<int> strides_;
  int total_ = 1;
};

HilbertSpace build_space(const std::vector<int>& dims);

enum class OpKind { Annihilation, Creation, Number, Projector, Transition };

struct OperatorLabel {
  std::string subsystem;
  OpKind kind = OpKind::Annihilation;
  int j = 0;
  int k = 0;
};

Mat make_operator(const HilbertSpace& space, const OperatorLabel& label);

Mat destroy(int n);

using LevelPairs = std::vector<std::pair<int, int>>;

// R_jk(theta) on a dim-dimensional space.
Mat rotation_unitary(int dim, int j, int k, double theta);
// Same rotation applied to several disjoint level pairs at once.
Mat rotation_unitary(int dim, const LevelPairs& pairs, double theta);

// Column-stacking vectorization.
Vec vec(const Mat& rho);
Mat unvec(const Vec& v);

Mat spre(const Mat& a);                    // rho -> a rho
Mat spost(const Mat& b);                   // rho -> rho b
Mat sprepost(const Mat& a, const Mat& b);  // rho -> a rho b
Mat unitary_superop(const Mat& u);
Mat dissipator(const Mat& a);
Mat identity_superop(int dim);

// D[a] rho without forming the superoperator.
Mat apply_dissipator(const Mat& a, const Mat& rho);
Mat apply_superop(const Mat& s, const Mat& rho);

bool is_trace_preserving(const Mat& s, double tol = 1e-10);
Mat choi_matrix(const Mat& s);
double choi_min_eigenvalue(const Mat& s);

Mat partial_trace(const Mat& rho, const HilbertSpace& space, const std::vector<int>& keep);

Mat ket_to_dm(const Vec& psi);
double purity(const Mat& rho);
double hermiticity_error(const Mat& m);
// Throws std::invalid_argument unless rho is a valid density matrix.
void check_density(const Mat& rho, double trace_tol = 1e-10);

}  // namespace cavsim

// Copyright 2026 The schwinger-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "schwinger/errors.hpp"

namespace schwinger {

inline void require_symmetric(const Eigen::MatrixXd& h, double tol = 1e-10) {
  if (h.rows() != h.cols()) throw numerical_error("NonSymmetric", "matrix is not square");
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw numerical_error("NonSymmetric", "matrix is not symmetric");
}

// k smallest eigenvalues, ascending.
inline std::vector<double> eigenvalues(const Eigen::MatrixXd& h, int k) {
  require_symmetric(h);
  if (k < 1 || k > h.rows())
    throw validation_error("InvalidParams", "requested " + std::to_string(k) + " eigenvalues of a " +
                                                std::to_string(h.rows()) + "-dim matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("EigenFailure", "eigensolver did not converge");
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

inline double lowest_eigenvalue(const Eigen::MatrixXd& h) { return eigenvalues(h, 1).front(); }

}  // namespace schwinger

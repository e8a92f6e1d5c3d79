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

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "schwinger/closed_form.hpp"
#include "schwinger/hamiltonian.hpp"
#include "schwinger/linalg.hpp"

namespace testing_support {

using namespace schwinger;

// Largest entrywise difference after matching rows and columns by state label;
// infinity when the label sets differ.
inline double aligned_difference(const HamiltonianMatrix& a, const HamiltonianMatrix& b) {
  if (a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  std::map<StateLabel, Eigen::Index> where;
  for (std::size_t i = 0; i < b.dim(); ++i) where[b.labels[i]] = static_cast<Eigen::Index>(i);
  std::vector<Eigen::Index> p(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto it = where.find(a.labels[i]);
    if (it == where.end()) return std::numeric_limits<double>::infinity();
    p[i] = it->second;
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      d = std::max(d, std::abs(a.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                               b.entries(p[i], p[j])));
  return d;
}

// Strong-coupling part e^2 A + m M restricted to the states with gauge number n.
inline Eigen::MatrixXd h0_at_n(const HamiltonianMatrix& h, int n, double e, double m) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < h.dim(); ++i)
    if (h.labels[i].n == n) idx.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXd H0 = e * e * h.A + m * h.M;
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd B(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) B(a, b) = H0(idx[a], idx[b]);
  return B;
}

inline double lowest_at_n(const HamiltonianMatrix& h, int n, double e, double m) {
  return lowest_eigenvalue(h0_at_n(h, n, e, m));
}

}  // namespace testing_support

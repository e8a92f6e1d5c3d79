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

// Closed-form sector Hamiltonians for L = 2, 3, 4 in the orbit basis
// |p = ne, x; theta>, written with phi = theta - n pi / L.  This path shares
// no code with the operator-algebra builder beyond the label type.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "schwinger/basis.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/hamiltonian.hpp"

namespace schwinger {

namespace closed_form {

inline constexpr double pi = std::numbers::pi;
inline const double sqrt2 = std::sqrt(2.0);
inline const double sqrt3 = std::sqrt(3.0);

struct Family {
  std::string config;
  double hop;  // <n+1, x|H1|n, x>
};

inline std::vector<Family> families(int L) {
  switch (L) {
    case 2: return {{"0011", -1.0 / sqrt2}};
    case 3: return {{"000111", -1.0}, {"101010", 0.0}};
    case 4:
      return {{"00001111", -sqrt2 * std::cos(pi / 8)},
              {"10010110", -sqrt2 * std::sin(pi / 8)},
              {"01100110", 0.0}};
    default: throw validation_error("UnsupportedL", "closed forms exist for L = 2, 3, 4 only");
  }
}

// d = theta_k - n, so phi = d pi / L.
inline bool exists(int L, int family, int d) {
  auto mod = [](int a, int b) { return ((a % b) + b) % b; };
  if (L == 3 && family == 1) return mod(d, 3) == 0;
  if (L == 4 && family == 2) return mod(d, 2) == 0;
  return true;
}

// Strong-coupling block at fixed n in the orbit basis: A (coefficient of e^2)
// and M (coefficient of m), including the n^2/(4L) term.
struct Block {
  Eigen::MatrixXd A, M;
};

inline Block h0_block(int L, int n, int theta_k) {
  Block b;
  const auto F = static_cast<Eigen::Index>(families(L).size());
  b.A = Eigen::MatrixXd::Zero(F, F);
  b.M = Eigen::MatrixXd::Zero(F, F);
  const int d = theta_k - n;
  const double phi = d * pi / L;
  const double c = std::cos(phi);
  const double n2 = static_cast<double>(n) * n;
  if (L == 2) {
    double s2 = std::pow(std::sin(phi / 2), 2), c2 = std::pow(std::cos(phi / 2), 2);
    b.A(0, 0) = n2 / 8 + 0.5 * s2 * (1 + c2);
    b.M(0, 0) = -2 * c;
  } else if (L == 3) {
    if (!exists(3, 1, d)) {
      b.A(0, 0) = (n2 + 4) / 12 + std::pow(3 - 2 * c, 2) / 48;
      b.M(0, 0) = -2 * c;
    } else {
      // alpha = (sqrt3 A - B)/2, beta = (A + sqrt3 B)/2
      double Aa = n2 / 12 + 0.75 * std::pow(std::sin(phi / 2), 4), Ma = -3 * c;
      double Ab = (n2 + 8) / 12 + std::pow(3 + c, 2) / 48, Mb = c;
      Eigen::Matrix2d R;
      R << sqrt3 / 2, -0.5, 0.5, sqrt3 / 2;
      b.A = R.transpose() * Eigen::Vector2d(Aa, Ab).asDiagonal() * R;
      b.M = R.transpose() * Eigen::Vector2d(Ma, Mb).asDiagonal() * R;
    }
  } else if (L == 4) {
    double c2p = std::cos(2 * phi), c3p = std::cos(3 * phi), c4p = std::cos(4 * phi);
    double s2 = std::pow(std::sin(phi), 2);
    b.A(0, 0) = n2 / 16 + 15.0 / 16 - sqrt2 / 8 - c / 4 + (sqrt2 / 8 - 3.0 / 16) * c2p;
    b.A(1, 1) = n2 / 16 + 15.0 / 16 + sqrt2 / 8 - (3.0 / 16 + sqrt2 / 8) * c2p - c3p / 4;
    b.A(2, 2) = n2 / 16 + 1.0;
    b.A(0, 1) = b.A(1, 0) = -(3.0 / 32 + sqrt2 / 16) - c / 4 - c2p / 16 + (sqrt2 / 16 - 3.0 / 32) * c4p;
    b.A(0, 2) = b.A(2, 0) = -(2 - sqrt2) / 8 * s2;
    b.A(1, 2) = b.A(2, 1) = (2 + sqrt2) / 8 * s2;
    b.M(0, 0) = -2 * c;
    b.M(0, 1) = b.M(1, 0) = -2 * c;
    b.M(1, 1) = -2 * c3p;
  }
  return b;
}

}  // namespace closed_form

// Basis order matches build_sector_basis: (|n|, n < 0, config string).
inline HamiltonianMatrix closed_form_oracle(const LatticeParams& params, Parity parity = Parity::none) {
  validate(params);
  const int L = params.L;
  const auto fams = closed_form::families(L);
  if (parity != Parity::none && params.theta_k != 0 && params.theta_k != L)
    throw validation_error("InvalidSector", "parity sectors exist only for theta = 0, pi");
  const int F = static_cast<int>(fams.size());
  std::vector<int> forder(fams.size());
  for (int f = 0; f < F; ++f) forder[static_cast<std::size_t>(f)] = f;
  std::sort(forder.begin(), forder.end(), [&](int a, int b) { return fams[a].config < fams[b].config; });

  struct Entry {
    int n;
    int f;
  };
  std::vector<Entry> states;
  const int ps = parity_sign(parity);
  for (int an = 0; an <= params.n_max; ++an)
    for (int sgn : {1, -1}) {
      if (an == 0 && sgn == -1) continue;
      if (ps != 0 && sgn == -1) continue;
      int n = sgn * an;
      for (int f : forder) {
        if (!closed_form::exists(L, f, params.theta_k - n)) continue;
        if (ps == -1 && n == 0) continue;
        states.push_back({n, f});
      }
    }
  const auto N = static_cast<Eigen::Index>(states.size());
  if (N == 0) throw validation_error("EmptyBasis", "every closed-form state vanishes");
  std::map<std::pair<int, int>, Eigen::Index> where;
  for (Eigen::Index i = 0; i < N; ++i) where[{states[i].n, states[i].f}] = i;

  HamiltonianMatrix h;
  h.params = params;
  h.parity = parity;
  h.A = Eigen::MatrixXd::Zero(N, N);
  h.M = h.A;
  h.K = h.A;
  for (const auto& s : states) h.labels.push_back({s.n, fams[s.f].config, parity});
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& si = states[i];
    auto blk = closed_form::h0_block(L, si.n, params.theta_k);
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto& sj = states[j];
      if (sj.n != si.n) continue;
      h.A(i, j) = blk.A(si.f, sj.f);
      h.M(i, j) = blk.M(si.f, sj.f);
    }
    // H1 couples n and n + 1 within a family; in the parity basis the n = 0
    // state collects both neighbours.
    auto it = where.find({si.n + 1, si.f});
    if (ps == 0) {
      if (it != where.end()) h.K(i, it->second) = h.K(it->second, i) = fams[si.f].hop;
    } else if (si.n >= 0 && it != where.end()) {
      double w = (si.n == 0) ? closed_form::sqrt2 : 1.0;
      h.K(i, it->second) = h.K(it->second, i) = w * fams[si.f].hop;
    }
  }
  h.entries = h.at(params.e, params.m);
  h.provenance = "closed-form";
  return h;
}

}  // namespace schwinger

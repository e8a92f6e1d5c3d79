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

// Brute-force reference in position space: 2L staggered sites, every
// half-filled occupation, gauge zero mode |n| <= n_max, Gauss law imposed
// by building the electric field from the charges, theta sector selected
// by the large-gauge phase, then projected onto translation eigenvalue +1.
// Shares nothing with the momentum-space builder.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Sign of c^+_a c_b acting on occupation x (a != b); 0 if it annihilates.
inline int hop_sign(std::uint32_t x, int a, int b, std::uint32_t& out) {
  if (!((x >> b) & 1u) || ((x >> a) & 1u)) return 0;
  int s = (std::popcount(x & ((1u << b) - 1u)) & 1) ? -1 : 1;
  std::uint32_t y = x & ~(1u << b);
  s *= (std::popcount(y & ((1u << a) - 1u)) & 1) ? -1 : 1;
  out = y | (1u << a);
  return s;
}

struct PositionModel {
  int L = 2;
  int n_max = 20;
  int theta_k = 0;
  std::vector<std::pair<int, std::uint32_t>> states;
  Eigen::MatrixXcd H;
  Eigen::MatrixXcd T;
};

inline double field_energy(int L, int n, std::uint32_t x, double e) {
  const int S = 2 * L;
  std::vector<double> E(static_cast<std::size_t>(S));
  double acc = 0.0;
  for (int r = 0; r < S; ++r) {
    acc += static_cast<double>((x >> r) & 1u) - static_cast<double>(r % 2);
    E[static_cast<std::size_t>(r)] = e * acc;
  }
  double mean = 0.0;
  for (double v : E) mean += v / S;
  const double shift = n * e / S - mean;
  double h = 0.0;
  for (double v : E) h += 0.5 * (v + shift) * (v + shift);
  return h;
}

inline PositionModel build(int L, int theta_k, int n_max, double e, double m) {
  const int S = 2 * L;
  PositionModel pm{L, n_max, theta_k, {}, {}, {}};
  auto mod = [&](int a) { return ((a % S) + S) % S; };
  std::map<std::pair<int, std::uint32_t>, Eigen::Index> index;
  for (int n = -n_max; n <= n_max; ++n)
    for (std::uint32_t x = 0; x < (1u << S); ++x) {
      if (std::popcount(x) != L) continue;
      int rsum = 0;
      for (int r = 0; r < S; ++r)
        if ((x >> r) & 1u) rsum += r;
      if (mod(n + rsum) != mod(theta_k + L * L)) continue;
      index[{n, x}] = static_cast<Eigen::Index>(pm.states.size());
      pm.states.push_back({n, x});
    }
  const auto N = static_cast<Eigen::Index>(pm.states.size());
  pm.H = Eigen::MatrixXcd::Zero(N, N);
  pm.T = Eigen::MatrixXcd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    auto [n, x] = pm.states[static_cast<std::size_t>(i)];
    double stag = 0.0;
    for (int r = 0; r < S; ++r)
      if ((x >> r) & 1u) stag += (r % 2 == 0) ? 1.0 : -1.0;
    pm.H(i, i) += field_energy(L, n, x, e) + m * stag;
    // (i/2) e^{ieq} c^+_r c_{r+1} + h.c., with c_{2L} = -c_0
    for (int r = 0; r < S; ++r) {
      const int b = (r + 1) % S;
      const double wrap = (r == S - 1) ? -1.0 : 1.0;
      std::uint32_t y = 0;
      if (int s = hop_sign(x, r, b, y)) {
        auto it = index.find({n + 1, y});
        if (it != index.end()) pm.H(it->second, i) += cplx(0, 0.5) * wrap * static_cast<double>(s);
      }
      if (int s = hop_sign(x, b, r, y)) {
        auto it = index.find({n - 1, y});
        if (it != index.end()) pm.H(it->second, i) += cplx(0, -0.5) * wrap * static_cast<double>(s);
      }
    }
    // T: two-site translation with antiperiodic wrap, times (-1)^L
    std::vector<int> modes;
    double sign = (L % 2) ? -1.0 : 1.0;
    for (int r = 0; r < S; ++r)
      if ((x >> r) & 1u) {
        int t = r + 2;
        if (t >= S) {
          t -= S;
          sign = -sign;
        }
        modes.push_back(t);
      }
    for (std::size_t a = 0; a < modes.size(); ++a)
      for (std::size_t b = a + 1; b < modes.size(); ++b)
        if (modes[a] > modes[b]) sign = -sign;
    std::uint32_t y = 0;
    for (int t : modes) y |= 1u << t;
    pm.T(index.at({n, y}), i) = sign;
  }
  return pm;
}

// Lowest k eigenvalues of H restricted to the translation-invariant subspace.
inline std::vector<double> lowest(const PositionModel& pm, int k) {
  const auto N = pm.H.rows();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(N, N);
  Eigen::MatrixXcd Tk = Eigen::MatrixXcd::Identity(N, N);
  for (int j = 0; j < pm.L; ++j) {
    P += Tk / static_cast<double>(pm.L);
    Tk = pm.T * Tk;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ps(0.5 * (P + P.adjoint()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < N; ++i)
    if (ps.eigenvalues()(i) > 0.5) keep.push_back(i);
  Eigen::MatrixXcd V(N, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) V.col(static_cast<Eigen::Index>(c)) = ps.eigenvectors().col(keep[c]);
  Eigen::MatrixXcd Hs = V.adjoint() * pm.H * V;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (Hs + Hs.adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < k && i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

}  // namespace oracle

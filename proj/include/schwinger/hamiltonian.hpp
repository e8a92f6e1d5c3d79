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

// H = H_EM + H_f on gauge-invariant states.  Because e and m enter only as
// e^2 and m, every sector matrix is stored as H = e^2 A + m M + K, where K is
// the hopping part H1 and e^2 A + m M is the strong-coupling part H0.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/basis.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/fock.hpp"

namespace schwinger {

struct StateLabel {
  int n = 0;
  std::string config;
  Parity parity = Parity::none;

  auto operator<=>(const StateLabel&) const = default;
  std::string str() const {
    std::string s = std::to_string(n) + ":" + config;
    if (parity != Parity::none) s += ":" + to_string(parity);
    return s;
  }
};

struct HamiltonianMatrix {
  LatticeParams params;
  Parity parity = Parity::none;
  std::vector<StateLabel> labels;
  Eigen::MatrixXd A, M, K;
  Eigen::MatrixXd entries;  // at params.e, params.m
  std::string provenance;

  std::size_t dim() const { return labels.size(); }
  Eigen::MatrixXd at(double e, double m) const { return e * e * A + m * M + K; }
  Eigen::MatrixXd h0() const { return params.e * params.e * A + params.m * M; }
  const Eigen::MatrixXd& h1() const { return K; }
};

namespace ops {

// j_l = sum_s b_{s+l}^+ b_s acting on the fermion part of every ket.
inline StateVec apply_j(const StateVec& v, int l, int L) {
  const int M = 2 * L;
  l = ((l % M) + M) % M;
  StateVec out;
  for (const auto& [k, a] : v)
    for (int s = 0; s < M; ++s)
      if (auto h = fock::hop(k.second, (s + l) % M, s)) out[{k.first, h->first}] += a * static_cast<double>(h->second);
  return out;
}

// n^2/(4L) + 1/(8L) sum_{l=1}^{L-1} csc^2(pi l/2L) j_l^+ j_l + 1/(16L) (j_L + L)^2
inline StateVec apply_em(const StateVec& v, int L) {
  StateVec out;
  for (const auto& [k, a] : v) out[k] += a * (static_cast<double>(k.first) * k.first / (4.0 * L));
  for (int l = 1; l < L; ++l) {
    double s = std::sin(std::numbers::pi * l / (2.0 * L));
    StateVec t = apply_j(apply_j(v, l, L), 2 * L - l, L);
    axpy(out, 1.0 / (8.0 * L * s * s), t);
  }
  StateVec t = apply_j(v, L, L);
  axpy(t, static_cast<double>(L), v);
  StateVec t2 = apply_j(t, L, L);
  axpy(t2, static_cast<double>(L), t);
  axpy(out, 1.0 / (16.0 * L), t2);
  return out;
}

inline StateVec apply_mass(const StateVec& v, int L) { return apply_j(v, L, L); }

// sum_l n_l sin((2l+1)pi/2L - e q): e^{ieq} raises n by one.
inline StateVec apply_hopping(const StateVec& v, int L) {
  const int M = 2 * L;
  StateVec out;
  const cplx two_i(0.0, 2.0);
  for (const auto& [k, a] : v)
    for (int l = 0; l < M; ++l) {
      if (!((k.second >> l) & 1u)) continue;
      double al = (2 * l + 1) * std::numbers::pi / (2.0 * L);
      out[{k.first - 1, k.second}] += a * std::exp(cplx(0.0, al)) / two_i;
      out[{k.first + 1, k.second}] -= a * std::exp(cplx(0.0, -al)) / two_i;
    }
  return out;
}

inline StateVec apply_full(const StateVec& v, int L, double e, double m) {
  StateVec out = apply_hopping(v, L);
  axpy(out, e * e, apply_em(v, L));
  axpy(out, m, apply_mass(v, L));
  return out;
}

}  // namespace ops

inline void check_same_lattice(const BasisState& a, const BasisState& b, const LatticeParams& p) {
  if (a.rep.L != p.L || b.rep.L != p.L)
    throw validation_error("BasisMismatch", "states do not belong to an L=" + std::to_string(p.L) + " basis");
}

inline double real_part_checked(cplx z) {
  if (std::abs(z.imag()) > 1e-9)
    throw numerical_error("ComplexSector", "matrix element has imaginary part " + std::to_string(z.imag()));
  return z.real();
}

inline double matrix_element_h0(const BasisState& i, const BasisState& j, const LatticeParams& p) {
  check_same_lattice(i, j, p);
  StateVec t = ops::apply_em(j.vec, p.L);
  for (auto& [k, a] : t) a *= p.e * p.e;
  axpy(t, p.m, ops::apply_mass(j.vec, p.L));
  return real_part_checked(inner(i.vec, t));
}

inline double matrix_element_h1(const BasisState& i, const BasisState& j, const LatticeParams& p) {
  check_same_lattice(i, j, p);
  return real_part_checked(inner(i.vec, ops::apply_hopping(j.vec, p.L)));
}

inline std::vector<StateLabel> labels_of(const SectorBasis& b) {
  std::vector<StateLabel> out;
  for (const auto& s : b.states) out.push_back({s.n, s.rep.str(), s.parity});
  return out;
}

inline HamiltonianMatrix build_hamiltonian(const SectorBasis& basis) {
  const std::size_t N = basis.size();
  if (N == 0) throw validation_error("EmptyBasis", "cannot build a Hamiltonian on an empty basis");
  const int L = basis.params.L;
  // ket -> (basis index, conj(coefficient))
  std::map<Ket, std::vector<std::pair<int, cplx>>> index;
  for (std::size_t i = 0; i < N; ++i)
    for (const auto& [k, a] : basis.states[i].vec) index[k].push_back({static_cast<int>(i), std::conj(a)});

  auto project = [&](const StateVec& hv, Eigen::MatrixXcd& out, std::size_t col) {
    for (const auto& [k, a] : hv) {
      auto it = index.find(k);
      if (it == index.end()) continue;
      for (const auto& [i, c] : it->second) out(i, static_cast<Eigen::Index>(col)) += c * a;
    }
  };
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n), M = A, K = A;
  for (std::size_t j = 0; j < N; ++j) {
    const StateVec& v = basis.states[j].vec;
    project(ops::apply_em(v, L), A, j);
    project(ops::apply_mass(v, L), M, j);
    project(ops::apply_hopping(v, L), K, j);
  }
  auto to_real = [](const Eigen::MatrixXcd& X, const char* what) {
    if (X.imag().cwiseAbs().maxCoeff() > 1e-9)
      throw numerical_error("ComplexSector", std::string(what) + " has a non-negligible imaginary part");
    Eigen::MatrixXd R = X.real();
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw numerical_error("NonSymmetric", std::string(what) + " is not symmetric");
    return Eigen::MatrixXd(0.5 * (R + R.transpose()));
  };
  HamiltonianMatrix h;
  h.params = basis.params;
  h.parity = basis.parity;
  h.labels = labels_of(basis);
  h.A = to_real(A, "H_EM");
  h.M = to_real(M, "mass term");
  h.K = to_real(K, "H1");
  h.entries = h.at(basis.params.e, basis.params.m);
  h.provenance = "operator-algebra";
  return h;
}

// Dense dump with basis labels, one matrix entry per line.
inline std::string dump_csv(const HamiltonianMatrix& h) {
  std::string s = "row,col,row_label,col_label,value\n";
  for (std::size_t i = 0; i < h.dim(); ++i)
    for (std::size_t j = 0; j < h.dim(); ++j) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", h.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      s += std::to_string(i) + "," + std::to_string(j) + "," + h.labels[i].str() + "," + h.labels[j].str() + "," +
           buf + "\n";
    }
  return s;
}

// Restriction to a subset of basis states in a chosen order and sign.
struct TruncatedHamiltonian {
  int dim = 0;
  std::vector<int> selected_states;  // parent indices, in slot order
  std::vector<int> signs;            // slot sign flips
  std::vector<StateLabel> labels;
  Eigen::MatrixXd A, M, K;
  Eigen::MatrixXd entries;

  Eigen::MatrixXd at(double e, double m) const { return e * e * A + m * M + K; }
};

inline TruncatedHamiltonian restrict_to(const HamiltonianMatrix& h, const std::vector<int>& idx,
                                        const std::vector<int>& signs) {
  TruncatedHamiltonian t;
  t.dim = static_cast<int>(idx.size());
  t.selected_states = idx;
  t.signs = signs;
  const auto d = static_cast<Eigen::Index>(idx.size());
  auto sub = [&](const Eigen::MatrixXd& X) {
    Eigen::MatrixXd Y(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        Y(a, b) = signs[static_cast<std::size_t>(a)] * signs[static_cast<std::size_t>(b)] *
                  X(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    return Y;
  };
  t.A = sub(h.A);
  t.M = sub(h.M);
  t.K = sub(h.K);
  t.entries = sub(h.entries);
  for (int i : idx) t.labels.push_back(h.labels[static_cast<std::size_t>(i)]);
  return t;
}

// Keeps the dim states carrying the largest weight in the sector ground state
// at the reference point, ordered by decreasing weight and signed so that the
// reference eigenvector is non-negative in the new basis.
inline TruncatedHamiltonian truncate(const HamiltonianMatrix& h, int dim, double e_ref, double m_ref) {
  if (dim < 1 || static_cast<std::size_t>(dim) > h.dim())
    throw validation_error("DimTooLarge", "truncation dimension " + std::to_string(dim) + " exceeds basis size " +
                                              std::to_string(h.dim()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.at(e_ref, m_ref));
  Eigen::VectorXd g = es.eigenvectors().col(0);
  std::vector<int> order(h.dim());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(g(a)) > std::abs(g(b)); });
  order.resize(static_cast<std::size_t>(dim));
  std::vector<int> signs;
  for (int i : order) signs.push_back(g(i) < 0 ? -1 : 1);
  return restrict_to(h, order, signs);
}

}  // namespace schwinger

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

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/errors.hpp"
#include "schwinger/fock.hpp"

namespace schwinger {

// theta = theta_k * pi / L with theta_k in [-(L-1), L].
struct LatticeParams {
  int L = 2;
  double e = 1.0;
  double m = 0.0;
  int theta_k = 0;
  int n_max = 20;

  double theta() const { return theta_k * std::numbers::pi / L; }
};

// The library accepts L = 1 because gap ratios at L = 2 need it.
inline void validate(const LatticeParams& p) {
  if (p.L < 1 || p.L > kMaxL) throw validation_error("InvalidParams", "L out of range: " + std::to_string(p.L));
  if (p.n_max < 1) throw validation_error("InvalidParams", "n_max must be >= 1");
  if (!(p.e > 0.0) || !std::isfinite(p.e)) throw validation_error("InvalidParams", "e must be positive");
  if (!std::isfinite(p.m)) throw validation_error("InvalidParams", "m must be finite");
  if (p.theta_k < -(p.L - 1) || p.theta_k > p.L)
    throw validation_error("InvalidSector", "theta index out of range: " + std::to_string(p.theta_k));
}

// Maps theta (radians) onto its sector index, rejecting values that are not k*pi/L.
inline int theta_index(double theta, int L) {
  double k = theta * L / std::numbers::pi;
  double r = std::round(k);
  if (std::abs(k - r) > 1e-9)
    throw validation_error("InvalidSector", "theta is not a multiple of pi/L: " + std::to_string(theta));
  int ki = static_cast<int>(r);
  ki = ((ki % (2 * L)) + 2 * L) % (2 * L);
  if (ki > L) ki -= 2 * L;
  return ki;
}

enum class Parity { even, odd, none };

inline int parity_sign(Parity p) { return p == Parity::even ? 1 : (p == Parity::odd ? -1 : 0); }

inline std::string to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "none";
  }
}

// (n, config bits) -> amplitude
using Ket = std::pair<int, Bits>;
using StateVec = std::map<Ket, cplx>;

inline cplx inner(const StateVec& a, const StateVec& b) {
  const StateVec& small = a.size() <= b.size() ? a : b;
  const StateVec& big = a.size() <= b.size() ? b : a;
  cplx s = 0.0;
  for (const auto& [k, v] : small) {
    auto it = big.find(k);
    if (it == big.end()) continue;
    s += (&small == &a) ? std::conj(v) * it->second : std::conj(it->second) * v;
  }
  return s;
}

inline double norm(const StateVec& a) {
  double s = 0.0;
  for (const auto& [k, v] : a) s += std::norm(v);
  return std::sqrt(s);
}

inline void axpy(StateVec& y, cplx a, const StateVec& x) {
  for (const auto& [k, v] : x) y[k] += a * v;
}

inline void prune(StateVec& v, double tol = 1e-14) {
  std::erase_if(v, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

// U_1 on |p = ne> (x) |x>: the gauge factor is exp(-i pi n / L).
inline StateVec apply_lgt(const StateVec& v, int L) {
  StateVec out;
  for (const auto& [k, a] : v) {
    SignedConfig s = apply_lgt(FermionConfig{L, k.second}, 1);
    cplx ph = std::exp(cplx(0.0, -std::numbers::pi * k.first / L));
    out[{k.first, s.config.bits}] += a * ph * static_cast<double>(s.sign);
  }
  return out;
}

inline StateVec apply_parity(const StateVec& v, int L) {
  StateVec out;
  for (const auto& [k, a] : v) {
    SignedConfig s = apply_parity(FermionConfig{L, k.second});
    out[{-k.first, s.config.bits}] += a * static_cast<double>(s.sign);
  }
  return out;
}

struct OrbitTerm {
  cplx amplitude;
  int n_shift = 0;  // U_1 only rephases |p = ne>
  FermionConfig config;
};

struct GaugeInvariantState {
  int n = 0;
  FermionConfig rep;
  int theta_k = 0;
  std::vector<OrbitTerm> orbit;  // normalized amplitudes
  double norm = 0.0;             // length of the raw orbit sum

  StateVec expand() const {
    StateVec v;
    for (const auto& t : orbit) v[{n + t.n_shift, t.config.bits}] += t.amplitude;
    return v;
  }
};

// sum_l e^{i l theta} U_1^l |p = ne>|x>, normalized; nullopt if it vanishes.
inline std::optional<GaugeInvariantState> make_gauge_invariant_state(int n, const FermionConfig& rep, int theta_k) {
  const int L = rep.L;
  const int M = 2 * L;
  const double theta = theta_k * std::numbers::pi / L;
  std::map<Bits, cplx> acc;
  FermionConfig y = rep;
  int sign = 1;
  for (int l = 0; l < M; ++l) {
    cplx ph = std::exp(cplx(0.0, l * theta - std::numbers::pi * n * l / L));
    acc[y.bits] += ph * static_cast<double>(sign);
    SignedConfig s = apply_lgt(y, 1);
    y = s.config;
    sign *= s.sign;
  }
  double nrm = 0.0;
  for (const auto& [x, a] : acc) nrm += std::norm(a);
  nrm = std::sqrt(nrm);
  if (nrm < 1e-10) return std::nullopt;
  GaugeInvariantState st;
  st.n = n;
  st.rep = rep;
  st.theta_k = theta_k;
  st.norm = nrm;
  // representative first, then the rest of the orbit in mode order
  auto push = [&](Bits x, cplx a) {
    if (std::abs(a) > 1e-12 * nrm) st.orbit.push_back({a / nrm, 0, FermionConfig{L, x}});
  };
  push(rep.bits, acc[rep.bits]);
  for (const auto& [x, a] : acc)
    if (x != rep.bits) push(x, a);
  return st;
}

// Configurations reachable from the Dirac sea under H, grouped into U_1 orbits.
// Each orbit is represented by a parity self-conjugate member when one exists,
// which keeps every sector Hamiltonian real.
inline std::vector<FermionConfig> gauge_families(int L) {
  const int M = 2 * L;
  FermionConfig sea = dirac_sea(L);
  auto neighbours = [&](Bits x) {
    std::vector<Bits> out;
    for (int s = 0; s < M; ++s)
      if (auto h = fock::hop(x, (s + L) % M, s)) out.push_back(h->first);
    for (int l = 1; l < L; ++l)
      for (int s = 0; s < M; ++s)
        if (auto h1 = fock::hop(x, (s + l) % M, s))
          for (int t = 0; t < M; ++t)
            if (auto h2 = fock::hop(h1->first, (t + M - l) % M, t)) out.push_back(h2->first);
    return out;
  };
  std::set<Bits> seen{sea.bits};
  std::vector<Bits> todo{sea.bits};
  while (!todo.empty()) {
    Bits x = todo.back();
    todo.pop_back();
    for (Bits y : neighbours(x))
      if (seen.insert(y).second) todo.push_back(y);
  }
  std::vector<Bits> starts{sea.bits};
  for (Bits x : seen)
    if (x != sea.bits) starts.push_back(x);
  std::set<Bits> done;
  std::vector<FermionConfig> reps;
  for (Bits x0 : starts) {
    if (done.count(x0)) continue;
    std::vector<FermionConfig> orbit;
    FermionConfig y{L, x0};
    for (int l = 0; l < M; ++l) {
      orbit.push_back(y);
      done.insert(y.bits);
      y = apply_lgt(y, 1).config;
    }
    FermionConfig rep = orbit.front();
    for (const auto& c : orbit)
      if (apply_parity(c).config == c) {
        rep = c;
        break;
      }
    reps.push_back(rep);
  }
  return reps;
}

struct BasisState {
  int n = 0;
  FermionConfig rep;
  Parity parity = Parity::none;
  StateVec vec;

  std::string label() const {
    std::string s = "n=" + std::to_string(n) + " x=" + rep.str();
    if (parity != Parity::none) s += " P=" + to_string(parity);
    return s;
  }
};

struct SectorBasis {
  LatticeParams params;
  Parity parity = Parity::none;
  int translation = 1;
  std::vector<BasisState> states;

  std::size_t size() const { return states.size(); }
};

inline SectorBasis build_sector_basis(const LatticeParams& params, Parity parity,
                                      std::vector<FermionConfig> reps) {
  validate(params);
  const int L = params.L;
  if (parity != Parity::none && params.theta_k != 0 && params.theta_k != L)
    throw validation_error("InvalidSector", "parity sectors exist only for theta = 0, pi");
  if (reps.empty()) throw validation_error("EmptyBasis", "no representative configurations");
  int tsign = 0;
  for (const auto& r : reps) {
    if (r.L != L || !r.half_filled())
      throw validation_error("InvalidConfig", "representative " + r.str() + " is not a half-filled L=" +
                                                  std::to_string(L) + " configuration");
    int t = translation_sign(r);
    if (tsign == 0) tsign = t;
    if (t == 0 || t != tsign) throw validation_error("InvalidConfig", "representatives mix translation sectors");
  }
  std::sort(reps.begin(), reps.end(), [](const FermionConfig& a, const FermionConfig& b) { return a.str() < b.str(); });
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());

  struct Cand {
    int n;
    FermionConfig rep;
  };
  std::vector<Cand> cands;
  for (int n = -params.n_max; n <= params.n_max; ++n)
    for (const auto& r : reps) cands.push_back({n, r});
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (std::abs(a.n) != std::abs(b.n)) return std::abs(a.n) < std::abs(b.n);
    return (a.n < 0) < (b.n < 0);
  });

  SectorBasis B;
  B.params = params;
  B.parity = parity;
  B.translation = tsign;
  const int ps = parity_sign(parity);
  for (const auto& c : cands) {
    auto g = make_gauge_invariant_state(c.n, c.rep, params.theta_k);
    if (!g) continue;
    StateVec v = g->expand();
    if (ps != 0) axpy(v, static_cast<double>(ps), apply_parity(v, L));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : B.states) axpy(v, -inner(b.vec, v), b.vec);
    double nv = norm(v);
    if (nv < 1e-8) continue;
    for (auto& [k, a] : v) a /= nv;
    prune(v);
    B.states.push_back({c.n, c.rep, parity, std::move(v)});
  }
  if (B.states.empty()) throw validation_error("EmptyBasis", "every basis state vanishes in this sector");
  return B;
}

inline SectorBasis build_sector_basis(const LatticeParams& params, Parity parity) {
  return build_sector_basis(params, parity, gauge_families(params.L));
}

}  // namespace schwinger

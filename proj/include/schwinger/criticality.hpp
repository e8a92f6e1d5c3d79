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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/basis.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/hamiltonian.hpp"
#include "schwinger/linalg.hpp"

namespace schwinger {

struct GapResult {
  LatticeParams params;
  double E0 = 0.0;
  double E1 = 0.0;
  double gap = 0.0;
};

// Sector Hamiltonians for one (L, theta, n_max), reusable across (e, m).
// For theta = 0, pi the ground and first excited states are the lowest
// levels of the even and odd sectors; otherwise the two lowest levels of
// the single sector are used.
class GapModel {
 public:
  GapModel(int L, int theta_k, int n_max) : L_(L), theta_k_(theta_k), n_max_(n_max) {
    LatticeParams p{L, 1.0, 0.0, theta_k, n_max};
    validate(p);
    split_ = (theta_k == 0 || theta_k == L);
    if (split_) {
      even_ = build_hamiltonian(build_sector_basis(p, Parity::even));
      odd_ = build_hamiltonian(build_sector_basis(p, Parity::odd));
    } else {
      even_ = build_hamiltonian(build_sector_basis(p, Parity::none));
    }
  }

  GapResult gap(double e, double m) const {
    GapResult r;
    r.params = {L_, e, m, theta_k_, n_max_};
    if (split_) {
      r.E0 = lowest_eigenvalue(even_.at(e, m));
      r.E1 = lowest_eigenvalue(odd_.at(e, m));
    } else {
      auto ev = eigenvalues(even_.at(e, m), 2);
      r.E0 = ev[0];
      r.E1 = ev[1];
    }
    r.gap = r.E1 - r.E0;
    return r;
  }

  int L() const { return L_; }
  const HamiltonianMatrix& even() const { return even_; }
  const HamiltonianMatrix& odd() const { return odd_; }

 private:
  int L_, theta_k_, n_max_;
  bool split_ = false;
  HamiltonianMatrix even_, odd_;
};

inline GapResult mass_gap(const LatticeParams& p) {
  validate(p);
  if (p.theta_k != 0 && p.theta_k != p.L)
    throw validation_error("InvalidSector", "mass_gap uses the parity split, theta must be 0 or pi");
  return GapModel(p.L, p.theta_k, p.n_max).gap(p.e, p.m);
}

inline double scaled_ratio(int L, double gap_L, double gap_Lm1) {
  if (std::abs(gap_Lm1) < 1e-14) throw numerical_error("ZeroDenominator", "gap at L-1 vanishes");
  return L * gap_L / ((L - 1) * gap_Lm1);
}

// R_L = L Delta_L / ((L-1) Delta_{L-1}) in the theta = pi sector.
class RatioModel {
 public:
  RatioModel(int L, int n_max) : L_(L), hi_(L, L, n_max), lo_(L - 1, L - 1, n_max) {
    if (L < 2) throw validation_error("InvalidParams", "gap ratio needs L >= 2");
  }
  double operator()(double e, double m) const { return scaled_ratio(L_, hi_.gap(e, m).gap, lo_.gap(e, m).gap); }
  int L() const { return L_; }

 private:
  int L_;
  GapModel hi_, lo_;
};

inline double gap_ratio(int L, double e, double m, int n_max) { return RatioModel(L, n_max)(e, m); }

// Bisection to a tight bracket, then secant polish, |dx| < tol.
inline double find_root(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-6) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw numerical_error("NoBracket", "function does not change sign on the bracket");
  while (hi - lo > 64 * tol) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  // secant steps kept inside the bracket, bisection fallback
  for (int it = 0; it < 100 && hi - lo > tol; ++it) {
    double x = lo - flo * (hi - lo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (flo > 0)) {
      double step = x - lo;
      lo = x;
      flo = fx;
      if (step < tol && hi - lo > tol) {
        double y = std::min(hi, lo + tol);
        double fy = f(y);
        if ((fy > 0) != (flo > 0)) return 0.5 * (lo + y);
        lo = y;
        flo = fy;
      }
    } else {
      double step = hi - x;
      hi = x;
      fhi = fx;
      if (step < tol && hi - lo > tol) {
        double y = std::max(lo, hi - tol);
        double fy = f(y);
        if ((fy > 0) == (flo > 0)) return 0.5 * (y + hi);
        hi = y;
        fhi = fy;
      }
    }
  }
  return 0.5 * (lo + hi);
}

// First sign change of f along an increasing grid.
inline std::optional<std::pair<double, double>> scan_bracket(const std::function<double(double)>& f,
                                                             const std::vector<double>& grid) {
  if (grid.size() < 2) return std::nullopt;
  double prev = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double cur = f(grid[i]);
    if (prev == 0.0) return std::make_pair(grid[i - 1], grid[i - 1]);
    if ((prev > 0) != (cur > 0)) return std::make_pair(grid[i - 1], grid[i]);
    prev = cur;
  }
  return std::nullopt;
}

struct PseudoCriticalPoint {
  int L = 0;
  double e = 0.0;
  double m_star = 0.0;
  double sigma = std::numeric_limits<double>::quiet_NaN();  // NaN when the L-1 point is missing
  bool has_sigma() const { return std::isfinite(sigma); }
  double ratio() const { return m_star / e; }
};

// Default scan of m/e used to locate a bracket.
inline std::vector<double> default_ratio_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 150; ++i) g.push_back(0.02 * i);
  return g;
}

// Root of R_L(m) = 1 in m for fixed e.
inline double ratio_root(const RatioModel& R, double e, std::pair<double, double> bracket, double tol = 1e-6) {
  auto f = [&](double m) { return R(e, m) - 1.0; };
  if (bracket.first == bracket.second) {
    if (f(bracket.first) == 0.0) return bracket.first;
    throw numerical_error("NoBracket", "degenerate bracket");
  }
  return find_root(f, bracket.first, bracket.second, tol);
}

inline std::optional<double> locate_ratio_root(const RatioModel& R, double e, double tol = 1e-6) {
  auto f = [&](double r) { return R(e, r * e) - 1.0; };
  auto br = scan_bracket(f, default_ratio_grid());
  if (!br) return std::nullopt;
  return ratio_root(R, e, {br->first * e, br->second * e}, tol);
}

// m_star from the given bracket; sigma from the (L-1) point located by scan.
// For L = 2 the L-1 point would need L = 0 and sigma stays undefined.
inline PseudoCriticalPoint pseudo_critical(int L, double e, int n_max, std::pair<double, double> bracket) {
  RatioModel R(L, n_max);
  PseudoCriticalPoint p;
  p.L = L;
  p.e = e;
  p.m_star = ratio_root(R, e, bracket);
  if (L >= 3) {
    RatioModel Rm(L - 1, n_max);
    if (auto lower = locate_ratio_root(Rm, e)) p.sigma = std::abs(p.m_star / e - *lower / e);
  }
  return p;
}

// Same, but the bracket comes from scanning m/e over default_ratio_grid().
inline std::optional<PseudoCriticalPoint> pseudo_critical_scan(int L, double e, int n_max) {
  RatioModel R(L, n_max);
  auto f = [&](double r) { return R(e, r * e) - 1.0; };
  auto br = scan_bracket(f, default_ratio_grid());
  if (!br) return std::nullopt;
  return pseudo_critical(L, e, n_max, {br->first * e, br->second * e});
}

struct CriticalPointEstimate {
  double intercept = 0.0;
  double slope = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  int points_used = 0;
  bool weighted = false;
  double intercept_error() const { return std::sqrt(std::max(0.0, covariance(0, 0))); }
};

// Weighted least squares of m_star/e against e with weights 1/sigma^2.
// Points with undefined sigma are left out; if every sigma is zero the fit is unweighted.
inline CriticalPointEstimate extrapolate_critical(const std::vector<PseudoCriticalPoint>& points) {
  std::vector<const PseudoCriticalPoint*> use;
  for (const auto& p : points)
    if (p.has_sigma()) use.push_back(&p);
  if (use.size() < 2) throw numerical_error("DegenerateFit", "need at least two points with defined weights");
  bool all_zero = std::all_of(use.begin(), use.end(), [](auto* p) { return p->sigma == 0.0; });
  double min_pos = std::numeric_limits<double>::infinity();
  for (auto* p : use)
    if (p->sigma > 0) min_pos = std::min(min_pos, p->sigma);
  const auto n = static_cast<Eigen::Index>(use.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = use[static_cast<std::size_t>(i)]->e;
    y(i) = use[static_cast<std::size_t>(i)]->ratio();
    double s = all_zero ? 1.0 : std::max(use[static_cast<std::size_t>(i)]->sigma, min_pos);
    w(i) = 1.0 / (s * s);
  }
  double emin = X.col(1).minCoeff(), emax = X.col(1).maxCoeff();
  if (emax - emin < 1e-12) throw numerical_error("DegenerateFit", "all couplings are equal");
  Eigen::Matrix2d N = X.transpose() * w.asDiagonal() * X;
  Eigen::Vector2d b = X.transpose() * w.asDiagonal() * y;
  Eigen::Vector2d beta = N.ldlt().solve(b);
  CriticalPointEstimate est;
  est.intercept = beta(0);
  est.slope = beta(1);
  est.points_used = static_cast<int>(n);
  est.weighted = !all_zero;
  if (all_zero) {
    Eigen::VectorXd r = y - X * beta;
    double s2 = n > 2 ? r.squaredNorm() / static_cast<double>(n - 2) : 0.0;
    est.covariance = s2 * N.inverse();
  } else {
    est.covariance = N.inverse();
  }
  return est;
}

inline std::vector<GapResult> theta_scan(int L, double e, int theta_k, const std::vector<double>& m_values,
                                         int n_max) {
  GapModel g(L, theta_k, n_max);
  std::vector<GapResult> out;
  for (double m : m_values) out.push_back(g.gap(e, m));
  return out;
}

struct TruncationRow {
  int L = 0;
  double e = 0.0;
  double m = 0.0;
  int n_max = 0;
  double gap = 0.0;
  int n_ref = 0;
  double gap_ref = 0.0;
  double rel_err = 0.0;
};

inline std::vector<TruncationRow> truncation_study(int L, double e, const std::vector<double>& m_values,
                                                   const std::vector<int>& cutoffs, int n_ref = 20) {
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end()))
    throw validation_error("InvalidParams", "cutoffs must be ascending");
  GapModel ref(L, L, n_ref);
  std::vector<GapModel> models;
  for (int c : cutoffs) models.emplace_back(L, L, c);
  std::vector<TruncationRow> out;
  for (double m : m_values) {
    double gr = ref.gap(e, m).gap;
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
      double g = models[i].gap(e, m).gap;
      out.push_back({L, e, m, cutoffs[i], g, n_ref, gr, std::abs(g - gr) / std::abs(gr)});
    }
  }
  return out;
}

}  // namespace schwinger

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

// Stand-in device noise: two-qubit depolarizing after every CNOT and
// classical readout flips, plus the mitigation steps applied to it.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/errors.hpp"
#include "schwinger/vqe.hpp"

namespace schwinger {

struct NoiseModel {
  double p2 = 0.01;
  std::vector<std::pair<double, double>> ro_flip;  // per qubit (p(0->1), p(1->0))
  std::uint64_t seed = 0;

  static NoiseModel standard(int n_qubits, double p2 = 0.01, double p01 = 0.02, double p10 = 0.04) {
    NoiseModel nm;
    nm.p2 = p2;
    nm.ro_flip.assign(static_cast<std::size_t>(n_qubits), {p01, p10});
    return nm;
  }
  static NoiseModel noiseless(int n_qubits) { return standard(n_qubits, 0.0, 0.0, 0.0); }
};

inline void validate(const NoiseModel& nm, int n_qubits) {
  auto bad = [](double p) { return !(p >= 0.0 && p <= 1.0); };
  if (bad(nm.p2)) throw validation_error("InvalidNoise", "p2 must lie in [0, 1]");
  if (static_cast<int>(nm.ro_flip.size()) != n_qubits)
    throw validation_error("InvalidNoise", "readout flips must be given for every qubit");
  for (auto [a, b] : nm.ro_flip)
    if (bad(a) || bad(b)) throw validation_error("InvalidNoise", "readout flip probabilities must lie in [0, 1]");
}

using DensityMatrix = Eigen::MatrixXcd;

namespace dm {

using Mat2 = Eigen::Matrix2cd;

inline Mat2 ry(double t) {
  Mat2 u;
  u << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return u;
}

// rho -> (u on qubit q) rho (u on qubit q)^+
inline void apply_1q(DensityMatrix& rho, const Mat2& u, int q) {
  const auto D = rho.rows();
  const Eigen::Index bit = Eigen::Index{1} << q;
  for (Eigen::Index c = 0; c < D; ++c)
    for (Eigen::Index i = 0; i < D; ++i)
      if (!(i & bit)) {
        cplx a0 = rho(i, c), a1 = rho(i | bit, c);
        rho(i, c) = u(0, 0) * a0 + u(0, 1) * a1;
        rho(i | bit, c) = u(1, 0) * a0 + u(1, 1) * a1;
      }
  for (Eigen::Index r = 0; r < D; ++r)
    for (Eigen::Index j = 0; j < D; ++j)
      if (!(j & bit)) {
        cplx a0 = rho(r, j), a1 = rho(r, j | bit);
        rho(r, j) = a0 * std::conj(u(0, 0)) + a1 * std::conj(u(0, 1));
        rho(r, j | bit) = a0 * std::conj(u(1, 0)) + a1 * std::conj(u(1, 1));
      }
}

inline void apply_cx(DensityMatrix& rho, int c, int t) {
  const auto D = rho.rows();
  const Eigen::Index cb = Eigen::Index{1} << c, tb = Eigen::Index{1} << t;
  auto perm = [&](Eigen::Index i) { return (i & cb) ? (i ^ tb) : i; };
  DensityMatrix out(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j) out(perm(i), perm(j)) = rho(i, j);
  rho = std::move(out);
}

// With probability p the pair (a, b) is replaced by the maximally mixed state.
inline void depolarize2(DensityMatrix& rho, int a, int b, double p) {
  if (p == 0.0) return;
  const auto D = rho.rows();
  const Eigen::Index ab = (Eigen::Index{1} << a) | (Eigen::Index{1} << b);
  DensityMatrix mixed = DensityMatrix::Zero(D, D);
  // (Tr_ab rho) (x) I/4: entries survive only when i and j agree on a and b
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j) {
      if ((i & ab) != (j & ab)) continue;
      cplx s = 0.0;
      for (Eigen::Index k : {Eigen::Index{0}, Eigen::Index{1} << a, Eigen::Index{1} << b, ab})
        s += rho((i & ~ab) | k, (j & ~ab) | k);
      mixed(i, j) = 0.25 * s;
    }
  rho = (1.0 - p) * rho + p * mixed;
}

}  // namespace dm

inline DensityMatrix simulate_noisy(const Circuit& c, const std::vector<double>& theta, double p2) {
  if (static_cast<int>(theta.size()) < c.n_params())
    throw validation_error("UnboundParameter", "circuit needs " + std::to_string(c.n_params()) + " angles");
  const auto D = Eigen::Index{1} << c.n_qubits;
  DensityMatrix rho = DensityMatrix::Zero(D, D);
  rho(0, 0) = 1.0;
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::RY: dm::apply_1q(rho, dm::ry(g.angle.eval(theta)), g.target); break;
      case GateKind::X: {
        dm::Mat2 x;
        x << 0, 1, 1, 0;
        dm::apply_1q(rho, x, g.target);
        break;
      }
      case GateKind::CX:
        dm::apply_cx(rho, g.control, g.target);
        dm::depolarize2(rho, g.control, g.target, p2);
        break;
    }
  }
  return rho;
}

// Rotates every non-Z factor of the Pauli string into the computational basis.
inline Eigen::VectorXd measurement_distribution(DensityMatrix rho, const std::string& ops) {
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t q = 0; q < ops.size(); ++q) {
    dm::Mat2 u;
    if (ops[q] == 'X')
      u << r, r, r, -r;
    else if (ops[q] == 'Y')
      u << r, cplx(0, -r), r, cplx(0, r);  // H S^+
    else
      continue;
    dm::apply_1q(rho, u, static_cast<int>(q));
  }
  Eigen::VectorXd p = rho.diagonal().real().cwiseMax(0.0);
  return p / p.sum();
}

// Column-stochastic readout channel: column = true outcome, row = observed.
inline Eigen::MatrixXd readout_channel(const NoiseModel& nm) {
  const int n = static_cast<int>(nm.ro_flip.size());
  const auto D = Eigen::Index{1} << n;
  Eigen::MatrixXd C = Eigen::MatrixXd::Ones(D, D);
  for (Eigen::Index obs = 0; obs < D; ++obs)
    for (Eigen::Index tru = 0; tru < D; ++tru)
      for (int q = 0; q < n; ++q) {
        bool t = (tru >> q) & 1, o = (obs >> q) & 1;
        auto [p01, p10] = nm.ro_flip[static_cast<std::size_t>(q)];
        C(obs, tru) *= t ? (o ? 1 - p10 : p10) : (o ? p01 : 1 - p01);
      }
  return C;
}

inline std::vector<long> sample_counts(const Eigen::VectorXd& p, long shots, std::mt19937_64& rng) {
  std::vector<long> counts(static_cast<std::size_t>(p.size()), 0);
  long left = shots;
  double mass = 1.0;
  for (Eigen::Index i = 0; i < p.size() && left > 0; ++i) {
    if (i == p.size() - 1) {
      counts[static_cast<std::size_t>(i)] = left;
      break;
    }
    double q = mass > 0 ? std::clamp(p(i) / mass, 0.0, 1.0) : 0.0;
    long k = std::binomial_distribution<long>(left, q)(rng);
    counts[static_cast<std::size_t>(i)] = k;
    left -= k;
    mass -= p(i);
  }
  return counts;
}

// Counts of measuring one Pauli term on the noisy circuit.
inline std::vector<long> noisy_sample(const Circuit& c, const std::vector<double>& theta, const NoiseModel& nm,
                                      long shots, const std::string& ops, std::mt19937_64& rng) {
  validate(nm, c.n_qubits);
  if (shots < 1) throw validation_error("InvalidParams", "shots must be >= 1");
  Eigen::VectorXd p = readout_channel(nm) * measurement_distribution(simulate_noisy(c, theta, nm.p2), ops);
  return sample_counts(p, shots, rng);
}

struct CalibrationMatrix {
  Eigen::MatrixXd matrix;
};

inline CalibrationMatrix calibrate_readout(const NoiseModel& nm, long shots_per_state, std::mt19937_64& rng) {
  if (shots_per_state < 1) throw validation_error("InvalidParams", "shots_per_state must be >= 1");
  Eigen::MatrixXd C = readout_channel(nm);
  CalibrationMatrix cal;
  cal.matrix = Eigen::MatrixXd::Zero(C.rows(), C.cols());
  for (Eigen::Index b = 0; b < C.cols(); ++b) {
    auto counts = sample_counts(C.col(b), shots_per_state, rng);
    for (Eigen::Index r = 0; r < C.rows(); ++r)
      cal.matrix(r, b) = static_cast<double>(counts[static_cast<std::size_t>(r)]) / static_cast<double>(shots_per_state);
  }
  return cal;
}

// Euclidean projection onto the probability simplex.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) tau = t;
  }
  return (v.array() - tau).cwiseMax(0.0).matrix();
}

struct ReadoutCorrection {
  Eigen::VectorXd probabilities;
  bool singular = false;
};

// min |C x - p|^2 over the simplex, by accelerated projected gradient.  A
// badly conditioned C is flagged and solved by pseudo-inverse plus projection.
inline ReadoutCorrection correct_readout(const Eigen::VectorXd& p_raw, const CalibrationMatrix& cal,
                                         double max_condition = 1e8) {
  const Eigen::MatrixXd& C = cal.matrix;
  if (p_raw.size() != C.cols()) throw validation_error("BadDimension", "distribution does not match calibration");
  Eigen::VectorXd p = p_raw / std::max(p_raw.sum(), 1e-300);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  const auto& sv = svd.singularValues();
  ReadoutCorrection out;
  if (sv(sv.size() - 1) <= 0 || sv(0) / sv(sv.size() - 1) > max_condition) {
    out.singular = true;
    Eigen::MatrixXd pinv = C.completeOrthogonalDecomposition().pseudoInverse();
    out.probabilities = project_simplex(pinv * p);
    return out;
  }
  Eigen::MatrixXd G = C.transpose() * C;
  Eigen::VectorXd b = C.transpose() * p;
  const double step = 1.0 / (sv(0) * sv(0));
  Eigen::VectorXd x = project_simplex(p), y = x;
  double t = 1.0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd xn = project_simplex(y - step * (G * y - b));
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = xn + ((t - 1.0) / tn) * (xn - x);
    double change = (xn - x).cwiseAbs().maxCoeff();
    x = std::move(xn);
    t = tn;
    if (change < 1e-15) break;
  }
  out.probabilities = x;
  return out;
}

inline Eigen::VectorXd correct_readout(const std::vector<long>& counts, const CalibrationMatrix& cal) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) p(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]);
  return correct_readout(p, cal).probabilities;
}

// <P> from a distribution over measured bitstrings in P's eigenbasis.
inline double pauli_parity_mean(const Eigen::VectorXd& p, const std::string& ops) {
  std::size_t mask = 0;
  for (std::size_t q = 0; q < ops.size(); ++q)
    if (ops[q] != 'I') mask |= std::size_t{1} << q;
  double s = 0.0;
  for (Eigen::Index b = 0; b < p.size(); ++b)
    s += ((std::popcount(static_cast<std::size_t>(b) & mask) & 1) ? -1.0 : 1.0) * p(b);
  return s;
}

inline Circuit fold_cnots(const Circuit& c, int fold) {
  if (fold < 1 || fold % 2 == 0) throw validation_error("EvenFold", "fold must be a positive odd integer");
  Circuit out;
  out.n_qubits = c.n_qubits;
  for (const auto& g : c.gates) {
    if (g.kind != GateKind::CX) {
      out.gates.push_back(g);
      continue;
    }
    for (int k = 0; k < fold; ++k) out.gates.push_back(g);
  }
  return out;
}

struct FoldedCircuitSet {
  Circuit base;
  std::vector<std::pair<int, Circuit>> replicas;
};

inline FoldedCircuitSet fold_set(const Circuit& c, const std::vector<int>& folds = {1, 3, 5, 7}) {
  FoldedCircuitSet s{c, {}};
  for (int f : folds) s.replicas.push_back({f, fold_cnots(c, f)});
  return s;
}

struct FoldPoint {
  int fold = 1;
  double value = 0.0;
  double error = 0.0;
};

struct Extrapolation {
  double value = 0.0;
  double error = 0.0;
};

// Least-squares polynomial of the given degree in the fold count, evaluated
// at fold 0; errors propagate linearly through the fit.
inline Extrapolation richardson_fit(const std::vector<FoldPoint>& pts, int degree) {
  std::vector<int> folds;
  for (const auto& p : pts) folds.push_back(p.fold);
  std::sort(folds.begin(), folds.end());
  if (std::adjacent_find(folds.begin(), folds.end()) != folds.end())
    throw validation_error("InsufficientPoints", "fold counts must be distinct");
  if (static_cast<int>(pts.size()) < degree + 1)
    throw validation_error("InsufficientPoints", "degree " + std::to_string(degree) + " needs " +
                                                     std::to_string(degree + 1) + " folds, got " +
                                                     std::to_string(pts.size()));
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd X(n, degree + 1);
  Eigen::VectorXd y(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k <= degree; ++k) X(i, k) = std::pow(static_cast<double>(pts[static_cast<std::size_t>(i)].fold), k);
    y(i) = pts[static_cast<std::size_t>(i)].value;
    s(i) = pts[static_cast<std::size_t>(i)].error;
  }
  // row 0 of (X^T X)^{-1} X^T maps data to the intercept
  Eigen::MatrixXd XtX = X.transpose() * X;
  Eigen::MatrixXd W = XtX.ldlt().solve(X.transpose());
  Eigen::VectorXd a = W.row(0).transpose();
  return {a.dot(y), std::sqrt((a.array().square() * s.array().square()).sum())};
}

struct RichardsonResult {
  Extrapolation linear, quadratic;
};

inline RichardsonResult richardson(const std::vector<FoldPoint>& pts) {
  return {richardson_fit(pts, 1), richardson_fit(pts, 2)};
}

struct RunSummary {
  std::vector<double> per_run;
  double mean = 0.0, std_error = 0.0;
  int best_group = 0;
  double best_mean = 0.0, best_std_error = 0.0;
};

inline std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

// run(i, group) returns one run's energy; the best group is the one with the
// lowest mean energy.
inline RunSummary multi_run_protocol(const std::function<double(int, int)>& run, int n_runs = 10, int group_size = 5) {
  if (n_runs < 1 || group_size < 1 || n_runs % group_size != 0)
    throw validation_error("InvalidParams", "n_runs must be a positive multiple of group_size");
  RunSummary s;
  for (int i = 0; i < n_runs; ++i) s.per_run.push_back(run(i, i / group_size));
  std::tie(s.mean, s.std_error) = mean_stderr(s.per_run);
  s.best_mean = std::numeric_limits<double>::infinity();
  for (int g = 0; g < n_runs / group_size; ++g) {
    std::vector<double> part(s.per_run.begin() + g * group_size, s.per_run.begin() + (g + 1) * group_size);
    auto [m, se] = mean_stderr(part);
    if (m < s.best_mean) {
      s.best_mean = m;
      s.best_std_error = se;
      s.best_group = g;
    }
  }
  return s;
}

// Per-fold energy estimates of one sector; values are means over runs.
struct MitigationReport {
  EnergyEstimate raw;           // fold 1, no readout correction
  EnergyEstimate ro_corrected;  // fold 1, readout corrected
  EnergyEstimate linear;
  EnergyEstimate quadratic;
  std::vector<std::pair<int, EnergyEstimate>> per_fold;  // readout corrected
};

inline std::vector<FoldPoint> fold_points(const MitigationReport& r) {
  std::vector<FoldPoint> pts;
  for (const auto& [f, e] : r.per_fold) pts.push_back({f, e.mean, e.std_error});
  return pts;
}

inline void fill_extrapolations(MitigationReport& r) {
  auto res = richardson(fold_points(r));
  r.linear.mean = res.linear.value;
  r.linear.std_error = res.linear.error;
  r.quadratic.mean = res.quadratic.value;
  r.quadratic.std_error = res.quadratic.error;
}

struct SectorReports {
  MitigationReport even, odd;
};

struct RatioEstimate {
  double value = 0.0;
  double error = 0.0;
  bool contains_one() const { return std::abs(value - 1.0) <= error; }
};

// R = L dE_L / ((L-1) dE_{L-1}) with independent first-order errors.
inline RatioEstimate ratio_estimate(int L, Extrapolation e0_hi, Extrapolation e1_hi, Extrapolation e0_lo,
                                    Extrapolation e1_lo) {
  double num = e1_hi.value - e0_hi.value, den = e1_lo.value - e0_lo.value;
  if (std::abs(den) < 1e-14) throw numerical_error("ZeroDenominator", "L-1 gap vanishes");
  double vnum = e1_hi.error * e1_hi.error + e0_hi.error * e0_hi.error;
  double vden = e1_lo.error * e1_lo.error + e0_lo.error * e0_lo.error;
  double R = L * num / ((L - 1) * den);
  double rel2 = vnum / (num * num) + vden / (den * den);
  return {R, std::abs(R) * std::sqrt(rel2)};
}

// Linear extrapolation for L = 3 and quadratic for L = 4; every report must
// carry all four folds.
inline RatioEstimate mixed_extrapolation(const SectorReports& l3, const SectorReports& l4) {
  for (const auto* r : {&l3.even, &l3.odd, &l4.even, &l4.odd}) {
    std::vector<int> folds;
    for (const auto& [f, e] : r->per_fold) folds.push_back(f);
    std::sort(folds.begin(), folds.end());
    if (folds != std::vector<int>{1, 3, 5, 7})
      throw validation_error("InsufficientPoints", "mixed extrapolation needs folds 1, 3, 5, 7 in every report");
  }
  auto lin = [](const MitigationReport& r) { return richardson_fit(fold_points(r), 1); };
  auto quad = [](const MitigationReport& r) { return richardson_fit(fold_points(r), 2); };
  return ratio_estimate(4, quad(l4.even), quad(l4.odd), lin(l3.even), lin(l3.odd));
}

}  // namespace schwinger

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

// The VQE pseudo-critical search (exact and sampled) and the noisy
// multi-run mitigation protocol, built from the library pieces.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/basis.hpp"
#include "schwinger/criticality.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/hamiltonian.hpp"
#include "schwinger/noise.hpp"
#include "schwinger/parallel.hpp"
#include "schwinger/vqe.hpp"

namespace schwinger {

// start, start + step, ... up to stop inclusive, rounded to 1e-10.
inline std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start)
    throw validation_error("InvalidGrid", "grid needs step > 0 and stop >= start");
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (n > 1000000) throw validation_error("InvalidGrid", "grid has too many points");
  std::vector<double> g;
  for (long i = 0; i < n; ++i) g.push_back(std::round((start + static_cast<double>(i) * step) * 1e10) / 1e10);
  return g;
}

// Independent random stream for one task, keyed by the run seed and task ids.
inline std::mt19937_64 task_stream(std::uint64_t seed, std::initializer_list<std::uint32_t> ids) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  words.insert(words.end(), ids.begin(), ids.end());
  std::seed_seq sq(words.begin(), words.end());
  return std::mt19937_64(sq);
}

// L = 3 even, L = 3 odd, L = 4 even, L = 4 odd; all at theta = pi.
inline constexpr std::array<std::pair<int, Parity>, 4> kVqeSectors{
    {{3, Parity::even}, {3, Parity::odd}, {4, Parity::even}, {4, Parity::odd}}};

inline int truncation_dim(AnsatzKind kind) { return kind == AnsatzKind::L3 ? 6 : 8; }

// Truncation tuned to the trial circuit.  The candidates are the `pool`
// largest components of the sector ground state at (e, m); every dim-subset
// is ordered by weight, and that order and each single transposition of it
// are scored by the lowest energy the circuit can reach.  Signs make the
// reference vector non-negative.
inline TruncatedHamiltonian select_truncation(const HamiltonianMatrix& h, AnsatzKind kind, double e, double m,
                                              int pool = 9) {
  const int dim = truncation_dim(kind);
  const int N = static_cast<int>(h.dim());
  if (dim > N)
    throw validation_error("DimTooLarge", "truncation dimension " + std::to_string(dim) + " exceeds basis size " +
                                              std::to_string(N));
  pool = std::clamp(pool, dim, N);
  const Eigen::MatrixXd H = h.at(e, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw numerical_error("EigenFailure", "eigensolver did not converge");
  const Eigen::VectorXd g = es.eigenvectors().col(0);
  std::vector<int> order(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(g(a)) > std::abs(g(b)); });
  order.resize(static_cast<std::size_t>(pool));

  auto score = [&](const std::vector<int>& o) {
    Eigen::MatrixXd T(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        int i = o[static_cast<std::size_t>(a)], j = o[static_cast<std::size_t>(b)];
        T(a, b) = (g(i) < 0 ? -1 : 1) * (g(j) < 0 ? -1 : 1) * H(i, j);
      }
    return ansatz_manifold_minimum(kind, pad_to_register(T));
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_order;
  std::vector<bool> pick(static_cast<std::size_t>(pool), false);
  std::fill(pick.begin(), pick.begin() + dim, true);
  do {
    std::vector<int> base;
    for (int k = 0; k < pool; ++k)
      if (pick[static_cast<std::size_t>(k)]) base.push_back(order[static_cast<std::size_t>(k)]);
    std::vector<std::vector<int>> cands{base};
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        auto o = base;
        std::swap(o[static_cast<std::size_t>(a)], o[static_cast<std::size_t>(b)]);
        cands.push_back(std::move(o));
      }
    for (auto& o : cands) {
      double E = score(o);
      if (E < best - 1e-12) {
        best = E;
        best_order = o;
      }
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));

  std::vector<int> signs;
  for (int i : best_order) signs.push_back(g(i) < 0 ? -1 : 1);
  TruncatedHamiltonian t = restrict_to(h, best_order, signs);
  t.entries = t.at(e, m);
  return t;
}

struct VqeSector {
  int L = 0;
  Parity parity = Parity::even;
  AnsatzKind kind = AnsatzKind::L3;
  TruncatedHamiltonian trunc;
  Circuit circuit;

  Eigen::MatrixXd padded(double e, double m, Padding mode = Padding::penalty) const {
    return pad_to_register(trunc.at(e, m), mode);
  }
};

inline VqeSector make_vqe_sector(int L, Parity parity, double e, double m_ref, int n_max, int pool = 9) {
  LatticeParams p{L, e, m_ref, L, n_max};
  VqeSector s;
  s.L = L;
  s.parity = parity;
  s.kind = ansatz_for(L, parity);
  s.trunc = select_truncation(build_hamiltonian(build_sector_basis(p, parity)), s.kind, e, m_ref, pool);
  s.circuit = make_ansatz(s.kind);
  return s;
}

struct VqeOptions {
  std::vector<double> m_grid = linear_grid(0.05, 0.39, 0.01);
  int cutoff_factor = 2;  // parent basis n_max = cutoff_factor * L
  int n_ref = 20;         // cutoff of the classical reference point
  int pool = 9;
  int budget = 200;
};

struct SectorEnergy {
  double energy = 0.0;      // VQE estimate
  double std_error = 0.0;   // zero in exact mode
  double manifold = 0.0;    // lowest energy on the trial manifold
  double eigenvalue = 0.0;  // lowest eigenvalue of the truncated matrix
  std::vector<double> angles;
  int evaluations = 0;
  bool budget_exhausted = false;
};

struct VqeGridPoint {
  double m = 0.0;
  std::array<SectorEnergy, 4> sectors;
  double ratio = 0.0;
};

struct VqeSweep {
  double e = 0.0;
  double m_ref = 0.0;
  std::array<VqeSector, 4> sectors;
  std::vector<VqeGridPoint> grid;
  std::size_t best = 0;
  PseudoCriticalPoint point;
};

inline double vqe_ratio(const std::array<SectorEnergy, 4>& s) {
  return scaled_ratio(4, s[3].energy - s[2].energy, s[1].energy - s[0].energy);
}

// Grid point minimizing |R_4 - 1|; sigma = 0 because a grid search carries no
// per-point uncertainty.
inline void pick_crossing(VqeSweep& sw) {
  if (sw.grid.empty()) throw validation_error("InvalidGrid", "mass grid is empty");
  sw.best = 0;
  for (std::size_t i = 1; i < sw.grid.size(); ++i)
    if (std::abs(sw.grid[i].ratio - 1.0) < std::abs(sw.grid[sw.best].ratio - 1.0)) sw.best = i;
  sw.point = {4, sw.e, sw.grid[sw.best].m, 0.0};
}

// Truncations at the classical pseudo-critical mass of the untruncated L = 4 problem.
inline std::array<VqeSector, 4> prepare_vqe_sectors(double e, const VqeOptions& opt, double* m_ref_out = nullptr) {
  RatioModel R(4, opt.n_ref);
  auto root = locate_ratio_root(R, e);
  if (!root) throw numerical_error("NoBracket", "no classical L=4 pseudo-critical point at e=" + std::to_string(e));
  if (m_ref_out) *m_ref_out = *root;
  std::array<VqeSector, 4> out;
  for (std::size_t s = 0; s < 4; ++s)
    out[s] = make_vqe_sector(kVqeSectors[s].first, kVqeSectors[s].second, e, *root, opt.cutoff_factor * kVqeSectors[s].first,
                             opt.pool);
  return out;
}

inline std::vector<std::vector<double>> default_starts() {
  const double h = std::numbers::pi / 2;
  std::vector<std::vector<double>> out;
  for (double a : {-h, 0.0, h, 2 * h})
    for (double b : {-h, 0.0, h, 2 * h})
      for (double c : {-h, 0.0, h}) out.push_back({a, b, c});
  return out;
}

// Exact-statevector sweep over the mass grid at one coupling.  The first grid
// point is multi-started; later points start from the previous optimum and
// from the origin, keeping the better result.
inline VqeSweep exact_vqe_sweep(double e, const VqeOptions& opt) {
  VqeSweep sw;
  sw.e = e;
  sw.sectors = prepare_vqe_sectors(e, opt, &sw.m_ref);
  if (opt.m_grid.empty()) throw validation_error("InvalidGrid", "mass grid is empty");
  std::array<std::vector<double>, 4> warm;
  for (std::size_t k = 0; k < opt.m_grid.size(); ++k) {
    VqeGridPoint gp;
    gp.m = opt.m_grid[k];
    for (std::size_t s = 0; s < 4; ++s) {
      const auto& sec = sw.sectors[s];
      Eigen::MatrixXd H = sec.padded(e, gp.m);
      auto dec = pauli_decompose(H);
      std::vector<std::vector<double>> starts = (k == 0) ? default_starts() : std::vector<std::vector<double>>{warm[s], {0, 0, 0}};
      VqeResult best;
      best.energy.mean = std::numeric_limits<double>::infinity();
      int evals = 0;
      for (const auto& x0 : starts) {
        VqeResult r = vqe_minimize(sec.circuit, dec, x0, opt.budget);
        evals += r.evaluations;
        if (r.energy.mean < best.energy.mean) best = r;
      }
      warm[s] = best.angles;
      SectorEnergy& se = gp.sectors[s];
      se.energy = best.energy.mean;
      se.angles = best.angles;
      se.evaluations = evals;
      se.budget_exhausted = best.budget_exhausted;
      se.manifold = ansatz_manifold_minimum(sec.kind, H);
      se.eigenvalue = lowest_eigenvalue(sec.trunc.at(e, gp.m));
    }
    gp.ratio = vqe_ratio(gp.sectors);
    sw.grid.push_back(std::move(gp));
  }
  pick_crossing(sw);
  return sw;
}

// Same grid with shot noise: each evaluation samples every Pauli term with
// `shots` shots and the optimizer keeps the best-seen estimate.  Starts at
// the exact optimum of each grid point.
inline VqeSweep sampled_vqe_sweep(const VqeSweep& exact, long shots, int budget, std::uint64_t seed,
                                  std::uint32_t point_id) {
  if (shots < 1) throw validation_error("InvalidParams", "shots must be >= 1");
  VqeSweep sw;
  sw.e = exact.e;
  sw.m_ref = exact.m_ref;
  sw.sectors = exact.sectors;
  for (std::size_t k = 0; k < exact.grid.size(); ++k) {
    VqeGridPoint gp;
    gp.m = exact.grid[k].m;
    for (std::size_t s = 0; s < 4; ++s) {
      const auto& sec = sw.sectors[s];
      auto dec = pauli_decompose(sec.padded(sw.e, gp.m, Padding::zero));
      auto rng = task_stream(seed, {point_id, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(s)});
      VqeResult r = vqe_minimize(sec.circuit, dec, exact.grid[k].sectors[s].angles, budget, shots, &rng);
      SectorEnergy& se = gp.sectors[s];
      se.energy = r.energy.mean;
      se.std_error = r.energy.std_error;
      se.angles = r.angles;
      se.evaluations = r.evaluations;
      se.budget_exhausted = r.budget_exhausted;
      se.manifold = exact.grid[k].sectors[s].manifold;
      se.eigenvalue = exact.grid[k].sectors[s].eigenvalue;
    }
    gp.ratio = vqe_ratio(gp.sectors);
    sw.grid.push_back(std::move(gp));
  }
  pick_crossing(sw);
  return sw;
}

inline CriticalPointEstimate fit_vqe_points(const std::vector<VqeSweep>& sweeps) {
  std::vector<PseudoCriticalPoint> pts;
  for (const auto& s : sweeps) pts.push_back(s.point);
  return extrapolate_critical(pts);
}

struct MitigationOptions {
  NoiseModel noise = NoiseModel::standard(3);
  int runs = 10;
  int group_size = 5;
  std::vector<int> folds{1, 3, 5, 7};
  long shots = 8192;
  long calibration_shots = 8192;
};

struct RunRecord {
  int sector = 0;
  int run = 0;
  int group = 0;
  int fold = 0;
  double raw = 0.0;
  double corrected = 0.0;
};

struct MitigationPoint {
  double e = 0.0;
  double m = 0.0;
  std::array<MitigationReport, 4> reports;
  std::array<double, 4> noiseless{};  // energy at the evaluated angles, no noise
  std::array<RunSummary, 4> groups;  // fold-1 corrected energies per run
  std::vector<RunRecord> runs;
  double exact_ratio = 0.0;
  RatioEstimate raw, ro_corrected, linear, quadratic, mixed;
};

inline Extrapolation as_extrapolation(const EnergyEstimate& e) { return {e.mean, e.std_error}; }

inline RatioEstimate ratio_of(const std::array<MitigationReport, 4>& r, EnergyEstimate MitigationReport::*field) {
  return ratio_estimate(4, as_extrapolation(r[2].*field), as_extrapolation(r[3].*field), as_extrapolation(r[0].*field),
                        as_extrapolation(r[1].*field));
}

// Noisy runs at the crossing of an exact sweep, evaluated at the noiseless
// optimal angles.  One calibration matrix per group of runs.
inline MitigationPoint mitigate_point(const VqeSweep& sw, const MitigationOptions& opt, std::uint64_t seed,
                                      std::uint32_t point_id) {
  validate(opt.noise, 3);
  if (opt.runs < 1 || opt.group_size < 1 || opt.runs % opt.group_size != 0)
    throw validation_error("InvalidParams", "runs must be a positive multiple of group_size");
  if (opt.shots < 1 || opt.calibration_shots < 1) throw validation_error("InvalidParams", "shots must be >= 1");
  if (opt.folds.empty() || std::find(opt.folds.begin(), opt.folds.end(), 1) == opt.folds.end())
    throw validation_error("InvalidParams", "folds must include 1");
  const VqeGridPoint& gp = sw.grid.at(sw.best);
  MitigationPoint out;
  out.e = sw.e;
  out.m = gp.m;
  out.exact_ratio = gp.ratio;
  const int n_groups = opt.runs / opt.group_size;
  std::vector<CalibrationMatrix> cal;
  for (int g = 0; g < n_groups; ++g) {
    auto rng = task_stream(seed, {point_id, 1000u + static_cast<std::uint32_t>(g)});
    cal.push_back(calibrate_readout(opt.noise, opt.calibration_shots, rng));
  }
  const Eigen::MatrixXd channel = readout_channel(opt.noise);
  for (std::size_t s = 0; s < 4; ++s) {
    const auto& sec = sw.sectors[s];
    const auto& angles = gp.sectors[s].angles;
    auto dec = pauli_decompose(sec.padded(sw.e, gp.m, Padding::zero));
    out.noiseless[s] = measure_energy(apply_circuit(sec.circuit, angles), dec, 0).mean;
    std::vector<std::pair<int, DensityMatrix>> states;
    for (int f : opt.folds) states.push_back({f, simulate_noisy(fold_cnots(sec.circuit, f), angles, opt.noise.p2)});
    std::vector<std::vector<double>> raw(opt.folds.size()), cor(opt.folds.size());
    for (int run = 0; run < opt.runs; ++run) {
      const int group = run / opt.group_size;
      auto rng = task_stream(seed, {point_id, static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(run)});
      for (std::size_t fi = 0; fi < states.size(); ++fi) {
        double e_raw = 0.0, e_cor = 0.0;
        for (const auto& t : dec.terms) {
          if (t.ops.find_first_not_of('I') == std::string::npos) {
            e_raw += t.coef;
            e_cor += t.coef;
            continue;
          }
          Eigen::VectorXd p = channel * measurement_distribution(states[fi].second, t.ops);
          auto counts = sample_counts(p, opt.shots, rng);
          Eigen::VectorXd freq(static_cast<Eigen::Index>(counts.size()));
          for (std::size_t b = 0; b < counts.size(); ++b)
            freq(static_cast<Eigen::Index>(b)) = static_cast<double>(counts[b]) / static_cast<double>(opt.shots);
          e_raw += t.coef * pauli_parity_mean(freq, t.ops);
          e_cor += t.coef * pauli_parity_mean(correct_readout(freq, cal[static_cast<std::size_t>(group)]).probabilities, t.ops);
        }
        raw[fi].push_back(e_raw);
        cor[fi].push_back(e_cor);
        out.runs.push_back({static_cast<int>(s), run, group, states[fi].first, e_raw, e_cor});
      }
    }
    MitigationReport& rep = out.reports[s];
    auto est = [&](const std::vector<double>& v) {
      EnergyEstimate x;
      std::tie(x.mean, x.std_error) = mean_stderr(v);
      x.shots = opt.shots;
      x.mode = EnergyEstimate::Mode::sampled;
      return x;
    };
    for (std::size_t fi = 0; fi < states.size(); ++fi) {
      rep.per_fold.push_back({states[fi].first, est(cor[fi])});
      if (states[fi].first == 1) {
        rep.raw = est(raw[fi]);
        rep.ro_corrected = est(cor[fi]);
        out.groups[s] = multi_run_protocol([&](int i, int) { return cor[fi][static_cast<std::size_t>(i)]; }, opt.runs,
                                           opt.group_size);
      }
    }
    if (opt.folds.size() >= 3) fill_extrapolations(rep);
  }
  out.raw = ratio_of(out.reports, &MitigationReport::raw);
  out.ro_corrected = ratio_of(out.reports, &MitigationReport::ro_corrected);
  if (opt.folds.size() >= 3) {
    out.linear = ratio_of(out.reports, &MitigationReport::linear);
    out.quadratic = ratio_of(out.reports, &MitigationReport::quadratic);
  }
  SectorReports l3{out.reports[0], out.reports[1]}, l4{out.reports[2], out.reports[3]};
  out.mixed = mixed_extrapolation(l3, l4);
  return out;
}

}  // namespace schwinger

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

// Acceptance checks.  `acceptance --criterion N` prints one line
//   criterion N: PASS|FAIL <details>
// and exits nonzero on FAIL.  Without arguments every criterion runs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "position_oracle.hpp"
#include "schwinger/closed_form.hpp"
#include "schwinger/criticality.hpp"
#include "schwinger/noise.hpp"
#include "schwinger/parallel.hpp"
#include "schwinger/pipeline.hpp"

using namespace schwinger;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string num(double x, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

const int kJobs = default_jobs();
constexpr std::uint64_t kSeed = 1000;

double aligned_difference(const HamiltonianMatrix& a, const HamiltonianMatrix& b) {
  if (a.dim() != b.dim()) return INFINITY;
  std::map<StateLabel, Eigen::Index> where;
  for (std::size_t i = 0; i < b.dim(); ++i) where[b.labels[i]] = static_cast<Eigen::Index>(i);
  std::vector<Eigen::Index> p;
  for (const auto& l : a.labels) {
    auto it = where.find(l);
    if (it == where.end()) return INFINITY;
    p.push_back(it->second);
  }
  const auto d = static_cast<Eigen::Index>(a.dim());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      worst = std::max(worst, std::abs(a.entries(i, j) - b.entries(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)])));
  return worst;
}

// Lowest eigenvalue of e^2 A + m M on the states with gauge number n.
double strong_coupling_energy(const HamiltonianMatrix& h, int n, double e, double m) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < h.dim(); ++i)
    if (h.labels[i].n == n) idx.push_back(static_cast<Eigen::Index>(i));
  if (idx.empty()) return NAN;
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd H0 = e * e * h.A + m * h.M, B(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) B(a, b) = H0(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return lowest_eigenvalue(B);
}

std::vector<double> union_lowest(int L, int k, int n_max, double e, double m, int count) {
  LatticeParams p{L, e, m, k, n_max};
  std::vector<Parity> ps = (k == 0 || k == L) ? std::vector<Parity>{Parity::even, Parity::odd} : std::vector<Parity>{Parity::none};
  std::vector<double> all;
  for (Parity par : ps) {
    auto h = build_hamiltonian(build_sector_basis(p, par));
    auto ev = eigenvalues(h.at(e, m), std::min<int>(count, static_cast<int>(h.dim())));
    all.insert(all.end(), ev.begin(), ev.end());
  }
  std::sort(all.begin(), all.end());
  all.resize(static_cast<std::size_t>(count));
  return all;
}

std::vector<double> vqe_couplings() { return linear_grid(0.5, 1.0, 0.1); }

std::vector<VqeSweep> exact_sweeps() {
  auto es = vqe_couplings();
  std::vector<VqeSweep> out(es.size());
  parallel_for(es.size(), kJobs, [&](std::size_t i) { out[i] = exact_vqe_sweep(es[i], VqeOptions{}); });
  return out;
}

// ---- criteria ----

void criterion1(Outcome& o) {
  double worst = 0.0;
  int sectors = 0;
  for (int L : {2, 3, 4})
    for (int k = -(L - 1); k <= L; ++k) {
      std::vector<Parity> ps{Parity::none};
      if (k == 0 || k == L) ps.insert(ps.end(), {Parity::even, Parity::odd});
      for (Parity p : ps) {
        LatticeParams lp{L, 0.83, 0.27, k, 20};
        double d = aligned_difference(build_hamiltonian(build_sector_basis(lp, p)), closed_form_oracle(lp, p));
        worst = std::max(worst, d);
        ++sectors;
      }
    }
  o.detail << "sectors=" << sectors << " max_entry_diff=" << num(worst, 3);
  o.require(worst < 1e-10, "max_entry_diff < 1e-10");
}

void criterion2(Outcome& o) {
  const double e = 0.7, m = 0.45;
  struct Case {
    int L, k, n;
    double want;
    const char* name;
  };
  const Case cases[] = {{2, 0, 0, -2 * m, "L2_theta0"},
                        {2, 2, 2, e * e / 2 - 2 * m, "L2_thetapi_n2"},
                        {2, 2, -2, e * e / 2 - 2 * m, "L2_thetapi_n-2"},
                        {3, 0, 0, -3 * m, "L3_theta0"},
                        {3, 3, 3, 0.75 * e * e - 3 * m, "L3_thetapi_n3"},
                        {3, 3, -3, 0.75 * e * e - 3 * m, "L3_thetapi_n-3"},
                        {4, 0, 0, -4 * m, "L4_theta0"},
                        {4, 4, 4, e * e - 4 * m, "L4_thetapi_n4"}};
  double worst = 0.0;
  for (const auto& c : cases) {
    auto h = build_hamiltonian(build_sector_basis({c.L, e, m, c.k, 20}, Parity::none));
    double got = strong_coupling_energy(h, c.n, e, m);
    double err = std::isfinite(got) ? std::abs(got - c.want) : INFINITY;
    if (!(err < 1e-12)) o.require(false, std::string(c.name) + " got " + num(got, 15));
    worst = std::max(worst, err);
  }
  o.detail << "cases=8 max_err=" << num(worst, 3);
}

void critical_intercept(Outcome& o, int L, double want) {
  auto es = linear_grid(0.1, 1.0, 0.1);
  std::vector<std::optional<PseudoCriticalPoint>> pts(es.size());
  parallel_for(es.size(), kJobs, [&](std::size_t i) { pts[i] = pseudo_critical_scan(L, es[i], 20); });
  std::vector<PseudoCriticalPoint> ok;
  for (const auto& p : pts)
    if (p) ok.push_back(*p);
  auto fit = extrapolate_critical(ok);
  o.detail << "L=" << L << " intercept=" << num(fit.intercept) << " +- " << num(fit.intercept_error(), 3)
           << " points_used=" << fit.points_used << " weighted=" << fit.weighted << " target=" << want << "+-0.01";
  o.require(std::abs(fit.intercept - want) <= 0.01, "|intercept - " + num(want) + "| <= 0.01");
}

void criterion5(Outcome& o) {
  auto sweeps = exact_sweeps();
  auto fit = fit_vqe_points(sweeps);
  double worst = 0.0;
  for (const auto& sw : sweeps)
    for (const auto& s : sw.grid[sw.best].sectors) worst = std::max(worst, s.energy - s.eigenvalue);
  o.detail << "intercept=" << num(fit.intercept) << " slope=" << num(fit.slope) << " points=" << fit.points_used
           << " max_vqe_minus_truncated_eigenvalue=" << num(worst, 3) << " crossings:";
  for (const auto& sw : sweeps) o.detail << " " << num(sw.point.ratio(), 4);
  o.require(worst < 1e-4, "ansatz reaches truncated eigenvalues to < 1e-4");
  o.require(std::abs(fit.intercept - 0.335) <= 0.01, "|intercept - 0.335| <= 0.01");
}

void criterion6(Outcome& o) {
  auto exact = exact_sweeps();
  const int n_seeds = 20;
  std::vector<std::vector<VqeSweep>> runs(n_seeds, std::vector<VqeSweep>(exact.size()));
  parallel_for(runs.size() * exact.size(), kJobs, [&](std::size_t i) {
    std::size_t s = i / exact.size(), p = i % exact.size();
    runs[s][p] = sampled_vqe_sweep(exact[p], 8192, 200, kSeed + s, static_cast<std::uint32_t>(p));
  });
  std::vector<double> icpt;
  for (const auto& r : runs) icpt.push_back(fit_vqe_points(r).intercept);
  auto [mean, se] = mean_stderr(icpt);
  const double sd = se * std::sqrt(static_cast<double>(icpt.size()));
  auto [lo, hi] = std::minmax_element(icpt.begin(), icpt.end());
  o.detail << "seeds=" << n_seeds << " mean=" << num(mean) << " sd=" << num(sd, 3) << " min=" << num(*lo, 4)
           << " max=" << num(*hi, 4);
  o.require(mean >= 0.30 && mean <= 0.34, "mean in [0.30, 0.34]");
  o.require(*hi - *lo > 1e-6, "seed scatter");
}

void criterion7(Outcome& o) {
  // (a) readout round trip
  std::mt19937_64 rng(kSeed);
  auto nm = NoiseModel::standard(3);
  auto cal = calibrate_readout(nm, 1'000'000, rng);
  std::uniform_real_distribution<double> U(0.05, 1.0);
  double rt = 0.0;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd p(8);
    for (auto& x : p) x = U(rng);
    p /= p.sum();
    rt = std::max(rt, (correct_readout(readout_channel(nm) * p, cal).probabilities - p).cwiseAbs().maxCoeff());
  }
  o.detail << "(a) roundtrip_max=" << num(rt, 3);
  o.require(rt < 1e-3, "(a) round trip < 1e-3");

  // (b) noiseless fold equivalence
  double fe = 0.0;
  std::uniform_real_distribution<double> A(-std::numbers::pi, std::numbers::pi);
  for (auto kind : {AnsatzKind::L3, AnsatzKind::L4_ground, AnsatzKind::L4_excited})
    for (int t = 0; t < 5; ++t) {
      std::vector<double> th{A(rng), A(rng), A(rng)};
      Circuit c = make_ansatz(kind);
      Eigen::VectorXcd base = apply_circuit(c, th).vec();
      for (const auto& [f, folded] : fold_set(c).replicas) {
        fe = std::max(fe, (apply_circuit(folded, th).vec() - base).cwiseAbs().maxCoeff());
        fe = std::max(fe, (simulate_noisy(folded, th, 0.0) - base * base.adjoint()).cwiseAbs().maxCoeff());
      }
    }
  o.detail << " (b) fold_max_diff=" << num(fe, 3);
  o.require(fe < 1e-12, "(b) fold equivalence < 1e-12");

  // (c) depolarizing series: the closed-form channel series, then the simulated
  // circuits at every pseudo-critical point, both without sampling noise
  int series = 0, better = 0;
  for (double p : {0.005, 0.01, 0.02})
    for (double E0 : {-1.7, -0.4, 0.9})
      for (double Einf : {0.0, 0.3}) {
        std::vector<FoldPoint> pts;
        for (int f : {1, 3, 5, 7}) pts.push_back({f, Einf + (E0 - Einf) * std::pow(1 - p, f), 0.0});
        ++series;
        better += std::abs(richardson_fit(pts, 2).value - E0) < std::abs(pts[0].value - E0);
      }
  auto sweeps = exact_sweeps();
  for (const auto& sw : sweeps) {
    const auto& gp = sw.grid[sw.best];
    for (std::size_t s = 0; s < 4; ++s) {
      const auto& sec = sw.sectors[s];
      auto dec = pauli_decompose(sec.padded(sw.e, gp.m, Padding::zero));
      const auto& th = gp.sectors[s].angles;
      const double E0 = measure_energy(apply_circuit(sec.circuit, th), dec, 0).mean;
      std::vector<FoldPoint> pts;
      for (int f : {1, 3, 5, 7}) {
        auto rho = simulate_noisy(fold_cnots(sec.circuit, f), th, nm.p2);
        double E = 0.0;
        for (const auto& t : dec.terms)
          E += t.ops.find_first_not_of('I') == std::string::npos
                   ? t.coef
                   : t.coef * pauli_parity_mean(measurement_distribution(rho, t.ops), t.ops);
        pts.push_back({f, E, 0.0});
      }
      ++series;
      better += std::abs(richardson_fit(pts, 2).value - E0) < std::abs(pts[0].value - E0);
    }
  }
  o.detail << " (c) quadratic_beats_raw=" << better << "/" << series;
  o.require(better == series, "(c) quadratic error < raw error on every series");

  std::vector<MitigationPoint> mp(sweeps.size());
  parallel_for(sweeps.size(), kJobs,
               [&](std::size_t i) { mp[i] = mitigate_point(sweeps[i], MitigationOptions{}, kSeed, static_cast<std::uint32_t>(i)); });
  int inside = 0;
  o.detail << " R4_mixed:";
  for (const auto& p : mp) {
    inside += p.mixed.contains_one();
    o.detail << " " << num(p.mixed.value, 4) << "+-" << num(p.mixed.error, 2);
  }
  o.detail << " contains_one=" << inside << "/" << mp.size();
  o.require(inside >= 5, "(c) R4 contains 1 at >= 5 of 6 points");
}

void criterion8(Outcome& o) {
  const int n_max = 20;
  double conj = 0.0, nflip = 0.0, refl = 0.0, ortho = 0.0, min_gap = INFINITY;
  for (int L : {2, 3, 4}) {
    // theta -> -theta: full spectra of conjugate sectors
    for (int k = 1; k < L; ++k) {
      auto a = build_hamiltonian(build_sector_basis({L, 1.0, 0.0, k, n_max}, Parity::none));
      auto b = build_hamiltonian(build_sector_basis({L, 1.0, 0.0, -k, n_max}, Parity::none));
      if (a.dim() != b.dim()) {
        conj = INFINITY;
        continue;
      }
      for (auto [e, m] : {std::pair{0.6, 0.2}, std::pair{1.3, -0.4}}) {
        const int d = static_cast<int>(a.dim());
        auto x = eigenvalues(a.at(e, m), d), y = eigenvalues(b.at(e, m), d);
        for (int i = 0; i < d; ++i) conj = std::max(conj, std::abs(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]));
        // (n, theta) -> (-n, -theta) on the strong-coupling blocks
        for (int n = -n_max; n <= n_max; ++n) {
          double p = strong_coupling_energy(a, n, e, m), q = strong_coupling_energy(b, -n, e, m);
          if (std::isnan(p) != std::isnan(q))
            nflip = INFINITY;
          else if (!std::isnan(p))
            nflip = std::max(nflip, std::abs(p - q));
        }
      }
    }
    // reflection about m = -e^2/8
    GapModel z(L, 0, n_max), pi(L, L, n_max);
    for (double e : {0.3, 0.8, 1.5})
      for (double m : {-0.6, -0.1, 0.2, 0.9}) refl = std::max(refl, std::abs(z.gap(e, m).gap - pi.gap(e, -e * e / 4 - m).gap));
    // parity sectors
    for (int k : {0, L}) {
      LatticeParams lp{L, 1.0, 0.0, k, 6};
      auto ev = build_sector_basis(lp, Parity::even), od = build_sector_basis(lp, Parity::odd);
      for (const auto& a : ev.states)
        for (const auto& b : od.states) ortho = std::max(ortho, std::abs(inner(a.vec, b.vec)));
    }
    // gap grid
    for (int k : {0, L}) {
      GapModel g(L, k, n_max);
      for (double e : linear_grid(0.2, 2.0, 0.2))
        for (double m : linear_grid(0.0, 0.9, 0.1)) min_gap = std::min(min_gap, g.gap(e, m).gap);
    }
  }
  o.detail << "conjugation=" << num(conj, 3) << " n_theta_flip=" << num(nflip, 3) << " reflection=" << num(refl, 3)
           << " parity_overlap=" << num(ortho, 3) << " min_gap=" << num(min_gap, 4);
  o.require(conj < 1e-8, "theta conjugation");
  o.require(nflip < 1e-8, "(n, theta) -> (-n, -theta)");
  o.require(refl < 1e-8, "reflection");
  o.require(ortho < 1e-12, "parity orthogonality");
  o.require(min_gap >= -1e-10, "gap >= 0");
}

void criterion9(Outcome& o) {
  auto ms = linear_grid(0.12, 0.22, 0.01);
  for (int L : {3, 4}) {
    auto rows = truncation_study(L, 0.5, ms, {2 * L}, 20);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(r.rel_err));
    o.detail << "L=" << L << " max_rel_err=" << num(100 * worst, 4) << "% ";
    o.require(worst < 0.02, "L=" + std::to_string(L) + " relative gap error < 2%");
  }
}

void criterion10(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> E(0.2, 2.0), M(-0.5, 1.5);
  std::uniform_int_distribution<int> K(-1, 2);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double e = E(rng), m = M(rng);
    const int k = K(rng);
    auto ref = oracle::lowest(oracle::build(2, k, 20, e, m), 2);
    auto got = union_lowest(2, k, 20, e, m, 2);
    const double d = std::max(std::abs(ref[0] - got[0]), std::abs(ref[1] - got[1]));
    o.detail << "(e=" << num(e, 3) << " m=" << num(m, 3) << " theta_k=" << k << " diff=" << num(d, 2) << ") ";
    worst = std::max(worst, d);
  }
  o.require(worst < 1e-8, "two lowest eigenvalues agree to 1e-8");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc)
      which.push_back(std::atoi(argv[++i]));
    else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 64;
    }
  }
  if (which.empty())
    for (int n = 1; n <= 10; ++n) which.push_back(n);

  const std::function<void(Outcome&)> table[] = {
      criterion1,
      criterion2,
      [](Outcome& o) { critical_intercept(o, 4, 0.339); },
      [](Outcome& o) { critical_intercept(o, 5, 0.331); },
      criterion5,
      criterion6,
      criterion7,
      criterion8,
      criterion9,
      criterion10};
  bool all = true;
  for (int n : which) {
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 64;
    }
    Outcome o;
    try {
      table[n - 1](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::printf("criterion %d: %s %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

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

// Command-line driver: spectrum, critical, vqe, truncation, theta.
//
// Each command reads a JSON config (defaults below), applies flag overrides,
// validates everything, then writes CSV tables and a manifest entry into the
// output directory.  Exit codes: 0 ok, 1 validation, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "schwinger/basis.hpp"
#include "schwinger/criticality.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/hamiltonian.hpp"
#include "schwinger/io.hpp"
#include "schwinger/parallel.hpp"
#include "schwinger/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace schwinger;

namespace {

constexpr const char* kVersion = "0.1.0";

json defaults_for(const std::string& cmd) {
  if (cmd == "spectrum")
    return json::parse(R"({
      "L": 2, "theta": ["0", "pi"], "n_max": 20,
      "e": {"start": 0.2, "stop": 2.0, "step": 0.2},
      "m": {"start": 0.0, "stop": 2.0, "step": 0.1}, "seed": 1000})");
  if (cmd == "critical")
    return json::parse(R"({
      "L": 4, "n_max": 20, "e": {"start": 0.1, "stop": 1.0, "step": 0.1}, "seed": 1000})");
  if (cmd == "truncation")
    return json::parse(R"({
      "L": [3, 4], "e": 0.5, "m": {"start": 0.12, "stop": 0.22, "step": 0.01},
      "cutoffs": null, "n_ref": 20,
      "dim_study": {"enabled": true, "e": 0.75, "m": {"start": 0.12, "stop": 0.22, "step": 0.01},
                    "cutoff_factor": 2, "pool": 9},
      "seed": 1000})");
  if (cmd == "theta")
    return json::parse(R"({
      "L": [2, 3, 4, 5], "e": 0.5, "theta": ["0", "pi"], "n_max": 20,
      "m": {"start": 0.0, "stop": 2.0, "step": 0.1}, "seed": 1000})");
  if (cmd == "vqe")
    return json::parse(R"({
      "e": {"start": 0.5, "stop": 1.0, "step": 0.1},
      "m": {"start": 0.05, "stop": 0.39, "step": 0.01},
      "cutoff_factor": 2, "n_ref": 20, "pool": 9, "budget": 200,
      "shots": {"enabled": true, "shots": 8192, "seeds": 20, "budget": 200},
      "mitigation": {"enabled": true, "runs": 10, "group_size": 5, "folds": [1, 3, 5, 7],
                     "shots": 8192, "calibration_shots": 8192,
                     "noise": {"p2": 0.01, "p01": 0.02, "p10": 0.04}},
      "seed": 1000})");
  throw validation_error("UnknownCommand", cmd);
}

// Every user key must exist in the defaults; a null default accepts anything.
void check_keys(const json& user, const json& def, const std::string& path) {
  if (!user.is_object()) throw validation_error("InvalidConfig", "expected an object at '" + path + "'");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string p = path.empty() ? it.key() : path + "." + it.key();
    if (!def.contains(it.key())) throw validation_error("InvalidConfig", "unknown key '" + p + "'");
    const json& d = def[it.key()];
    if (d.is_object() && it.value().is_object() && !d.contains("start")) check_keys(it.value(), d, p);
  }
}

void set_path(json& cfg, const std::string& dotted, const json& value) {
  json* node = &cfg;
  std::string rest = dotted;
  for (auto pos = rest.find('.'); pos != std::string::npos; pos = rest.find('.')) {
    node = &(*node)[rest.substr(0, pos)];
    rest = rest.substr(pos + 1);
  }
  (*node)[rest] = value;
}

[[noreturn]] void bad(const std::string& what) { throw validation_error("InvalidConfig", what); }

double num(const json& j, const std::string& name) {
  if (!j.is_number()) bad("'" + name + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& name) {
  if (!j.is_number_integer()) bad("'" + name + "' must be an integer");
  return j.get<int>();
}

bool flag(const json& j, const std::string& name) {
  if (!j.is_boolean()) bad("'" + name + "' must be true or false");
  return j.get<bool>();
}

// A list of numbers, or {"start", "stop", "step"}.
std::vector<double> grid(const json& j, const std::string& name) {
  std::vector<double> g;
  if (j.is_number()) {
    g.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& v : j) g.push_back(num(v, name));
  } else if (j.is_object()) {
    for (const char* k : {"start", "stop", "step"})
      if (!j.contains(k)) bad("'" + name + "' needs start, stop and step");
    g = linear_grid(num(j["start"], name), num(j["stop"], name), num(j["step"], name));
  } else {
    bad("'" + name + "' must be a number, a list, or a start/stop/step object");
  }
  if (g.empty()) throw validation_error("InvalidGrid", "'" + name + "' is empty");
  for (double v : g)
    if (!std::isfinite(v)) throw validation_error("InvalidGrid", "'" + name + "' has a non-finite value");
  return g;
}

std::vector<int> int_list(const json& j, const std::string& name) {
  std::vector<int> out;
  if (j.is_number_integer()) return {j.get<int>()};
  if (!j.is_array() || j.empty()) bad("'" + name + "' must be an integer or a non-empty list");
  for (const auto& v : j) out.push_back(integer(v, name));
  return out;
}

// Radians, or strings such as "0", "pi", "-pi/2", "2pi/3", "2*pi/3".
double parse_theta(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) bad("theta values must be numbers or strings like \"pi/2\"");
  std::string s = j.get<std::string>();
  std::string t;
  for (char c : s)
    if (c != ' ') t += c;
  auto pi_at = t.find("pi");
  try {
    if (pi_at == std::string::npos) {
      std::size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) bad("cannot parse theta '" + s + "'");
      return v;
    }
    std::string pre = t.substr(0, pi_at), post = t.substr(pi_at + 2);
    if (!pre.empty() && pre.back() == '*') pre.pop_back();
    double k = 1.0;
    if (pre == "-")
      k = -1.0;
    else if (!pre.empty() && pre != "+") {
      std::size_t used = 0;
      k = std::stod(pre, &used);
      if (used != pre.size()) bad("cannot parse theta '" + s + "'");
    }
    double d = 1.0;
    if (!post.empty()) {
      if (post[0] != '/') bad("cannot parse theta '" + s + "'");
      std::size_t used = 0;
      d = std::stod(post.substr(1), &used);
      if (used != post.size() - 1 || d == 0.0) bad("cannot parse theta '" + s + "'");
    }
    return k * std::numbers::pi / d;
  } catch (const std::logic_error&) {
    bad("cannot parse theta '" + s + "'");
  }
}

std::vector<double> theta_list(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    if (j.empty()) throw validation_error("InvalidGrid", "'theta' is empty");
    for (const auto& v : j) out.push_back(parse_theta(v));
  } else {
    out.push_back(parse_theta(j));
  }
  return out;
}

void check_L(int L, int lo, int hi) {
  if (L < lo || L > hi)
    throw validation_error("InvalidParams", "L=" + std::to_string(L) + " outside [" + std::to_string(lo) + ", " +
                                                std::to_string(hi) + "]");
}

void check_e(const std::vector<double>& es) {
  for (double e : es)
    if (!(e > 0)) throw validation_error("InvalidParams", "e must be positive");
}

struct Context {
  std::string command;
  json config;
  std::string hash;
  fs::path out;
  int jobs = 1;
  std::vector<std::string> files;
  json notes = json::object();
  std::mutex log_mu;

  std::uint64_t seed() const { return config["seed"].get<std::uint64_t>(); }

  void log(const std::string& line) {
    std::lock_guard lock(log_mu);
    std::cerr << "[" << command << "] " << line << "\n";
  }

  void write(const std::string& name, CsvTable& t) {
    t.comment("schwinger_lab " + command + " " + name);
    t.comment("config_hash " + hash);
    t.write((out / name).string());
    files.push_back(name);
  }
};

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One entry per run; earlier entries that own any of this run's files are dropped
// so that every CSV is reachable from exactly one entry.
void write_manifest(Context& ctx, const std::string& status) {
  fs::path path = ctx.out / "manifest.json";
  json m = {{"entries", json::array()}};
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      m = json::parse(in);
    } catch (const json::exception&) {
      m = {{"entries", json::array()}};
    }
  }
  std::set<std::string> mine(ctx.files.begin(), ctx.files.end());
  json kept = json::array();
  for (const auto& e : m.value("entries", json::array())) {
    bool clash = false;
    for (const auto& f : e.value("files", json::array()))
      if (f.is_string() && mine.count(f.get<std::string>())) clash = true;
    if (!clash) kept.push_back(e);
  }
  json entry = {{"command", ctx.command},   {"config_hash", ctx.hash}, {"timestamp", now_utc()},
                {"artifact_version", kVersion}, {"status", status},     {"files", ctx.files},
                {"config", ctx.config},        {"notes", ctx.notes}};
  kept.push_back(entry);
  m["entries"] = kept;
  std::ofstream out(path, std::ios::trunc);
  out << m.dump(2) << "\n";
}

// ---- spectrum ----

void run_spectrum(Context& ctx) {
  const json& c = ctx.config;
  const int L = integer(c["L"], "L");
  check_L(L, 1, kMaxL);
  const int n_max = integer(c["n_max"], "n_max");
  auto es = grid(c["e"], "e");
  auto ms = grid(c["m"], "m");
  check_e(es);
  std::vector<int> ks;
  for (double th : theta_list(c["theta"])) {
    int k = theta_index(th, L);
    if (k != 0 && k != L) throw validation_error("InvalidSector", "spectrum uses the parity split; theta must be 0 or pi");
    ks.push_back(k);
  }
  validate(LatticeParams{L, es[0], ms[0], ks[0], n_max});

  CsvTable t({"L", "theta_k", "theta", "e", "m", "n_max", "E0", "E1", "gap"});
  for (int k : ks) {
    GapModel model(L, k, n_max);
    std::vector<GapResult> res(es.size() * ms.size());
    parallel_for(res.size(), ctx.jobs, [&](std::size_t i) {
      res[i] = model.gap(es[i / ms.size()], ms[i % ms.size()]);
      ctx.log("theta_k=" + std::to_string(k) + " e=" + fmt(res[i].params.e) + " m=" + fmt(res[i].params.m) +
              " gap=" + fmt(res[i].gap));
    });
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : res) {
      t.row(L, k, k * std::numbers::pi / L, r.params.e, r.params.m, n_max, r.E0, r.E1, r.gap);
      min_gap = std::min(min_gap, r.gap);
    }
    std::cout << "spectrum L=" << L << " theta_k=" << k << " points=" << res.size() << " min_gap=" << fmt(min_gap)
              << "\n";
  }
  ctx.write("spectrum.csv", t);
}

// ---- critical ----

void run_critical(Context& ctx) {
  const json& c = ctx.config;
  const int L = integer(c["L"], "L");
  check_L(L, 2, kMaxL);
  const int n_max = integer(c["n_max"], "n_max");
  auto es = grid(c["e"], "e");
  check_e(es);
  validate(LatticeParams{L, es[0], 0.0, L, n_max});

  std::vector<std::optional<PseudoCriticalPoint>> pts(es.size());
  parallel_for(es.size(), ctx.jobs, [&](std::size_t i) {
    pts[i] = pseudo_critical_scan(L, es[i], n_max);
    if (pts[i])
      ctx.log("e=" + fmt(es[i]) + " m_star=" + fmt(pts[i]->m_star) + " m/e=" + fmt(pts[i]->ratio()) +
              " sigma=" + fmt(pts[i]->sigma));
    else
      ctx.log("warning: e=" + fmt(es[i]) + " NoBracket, point skipped");
  });
  CsvTable tp({"L", "e", "m_star", "ratio", "sigma", "status"});
  std::vector<PseudoCriticalPoint> ok;
  json skipped = json::array();
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (!pts[i]) {
      tp.row(L, es[i], std::nan(""), std::nan(""), std::nan(""), "NoBracket");
      skipped.push_back(es[i]);
      continue;
    }
    const auto& p = *pts[i];
    tp.row(L, p.e, p.m_star, p.ratio(), p.sigma, p.has_sigma() ? "ok" : "no_weight");
    ok.push_back(p);
  }
  ctx.notes["skipped_e"] = skipped;
  ctx.write("critical_points.csv", tp);
  auto est = extrapolate_critical(ok);
  CsvTable tf({"L", "intercept", "intercept_error", "slope", "points_used", "weighted"});
  tf.row(L, est.intercept, est.intercept_error(), est.slope, est.points_used, est.weighted);
  ctx.write("critical_fit.csv", tf);
  std::cout << "critical L=" << L << " intercept=" << fmt(est.intercept, 6) << " +- " << fmt(est.intercept_error(), 3)
            << " slope=" << fmt(est.slope, 6) << " points=" << est.points_used << "\n";
}

// ---- truncation ----

void run_truncation(Context& ctx) {
  const json& c = ctx.config;
  auto Ls = int_list(c["L"], "L");
  const double e = num(c["e"], "e");
  auto ms = grid(c["m"], "m");
  const int n_ref = integer(c["n_ref"], "n_ref");
  for (int L : Ls) {
    check_L(L, 1, kMaxL);
    validate(LatticeParams{L, e, ms[0], L, n_ref});
  }
  std::vector<std::vector<int>> cutoffs;
  for (int L : Ls) {
    std::vector<int> cs = c["cutoffs"].is_null() ? std::vector<int>{2 * L} : int_list(c["cutoffs"], "cutoffs");
    for (int x : cs)
      if (x < 1) throw validation_error("InvalidParams", "cutoffs must be >= 1");
    if (!std::is_sorted(cs.begin(), cs.end())) throw validation_error("InvalidParams", "cutoffs must be ascending");
    cutoffs.push_back(cs);
  }
  const json& ds = c["dim_study"];
  check_keys(ds, defaults_for("truncation")["dim_study"], "dim_study");
  const bool dim_on = flag(ds.value("enabled", true), "dim_study.enabled");

  CsvTable t({"L", "e", "m", "n_max", "gap", "n_ref", "gap_ref", "rel_err"});
  for (std::size_t li = 0; li < Ls.size(); ++li) {
    auto rows = truncation_study(Ls[li], e, ms, cutoffs[li], n_ref);
    double worst = 0.0;
    for (const auto& r : rows) {
      t.row(r.L, r.e, r.m, r.n_max, r.gap, r.n_ref, r.gap_ref, r.rel_err);
      ctx.log("L=" + std::to_string(r.L) + " m=" + fmt(r.m) + " n_max=" + std::to_string(r.n_max) +
              " rel_err=" + fmt(r.rel_err));
      worst = std::max(worst, r.rel_err);
    }
    std::cout << "truncation L=" << Ls[li] << " e=" << fmt(e) << " max_rel_err=" << fmt(worst, 4) << "\n";
  }
  ctx.write("truncation.csv", t);

  if (!dim_on) return;
  const double e2 = num(ds.value("e", 0.75), "dim_study.e");
  auto ms2 = grid(ds.value("m", json(0.17)), "dim_study.m");
  VqeOptions opt;
  opt.cutoff_factor = integer(ds.value("cutoff_factor", 2), "dim_study.cutoff_factor");
  opt.pool = integer(ds.value("pool", 9), "dim_study.pool");
  opt.n_ref = n_ref;
  if (!(e2 > 0)) throw validation_error("InvalidParams", "dim_study.e must be positive");
  if (opt.cutoff_factor < 1) throw validation_error("InvalidParams", "dim_study.cutoff_factor must be >= 1");
  double m_ref = 0.0;
  auto secs = prepare_vqe_sectors(e2, opt, &m_ref);
  CsvTable td({"L", "e", "m", "dim", "m_ref", "gap_truncated", "gap_exact", "rel_err"});
  for (int L : {3, 4}) {
    GapModel exact(L, L, n_ref);
    const auto& ev = secs[L == 3 ? 0 : 2];
    const auto& od = secs[L == 3 ? 1 : 3];
    for (double m : ms2) {
      double g_tr = lowest_eigenvalue(od.trunc.at(e2, m)) - lowest_eigenvalue(ev.trunc.at(e2, m));
      double g_ex = exact.gap(e2, m).gap;
      td.row(L, e2, m, ev.trunc.dim, m_ref, g_tr, g_ex, std::abs(g_tr - g_ex) / std::abs(g_ex));
    }
  }
  ctx.write("truncation_dim.csv", td);
  std::cout << "truncation dim study e=" << fmt(e2) << " m_ref=" << fmt(m_ref, 6) << "\n";
}

// ---- theta ----

void run_theta(Context& ctx) {
  const json& c = ctx.config;
  auto Ls = int_list(c["L"], "L");
  const double e = num(c["e"], "e");
  const int n_max = integer(c["n_max"], "n_max");
  auto ms = grid(c["m"], "m");
  auto thetas = theta_list(c["theta"]);
  struct Job {
    int L, k;
  };
  std::vector<Job> jobs;
  for (int L : Ls) {
    check_L(L, 1, kMaxL);
    for (double th : thetas) {
      int k = theta_index(th, L);
      validate(LatticeParams{L, e, ms[0], k, n_max});
      jobs.push_back({L, k});
    }
  }
  std::vector<std::vector<GapResult>> res(jobs.size());
  parallel_for(jobs.size(), ctx.jobs, [&](std::size_t i) {
    res[i] = theta_scan(jobs[i].L, e, jobs[i].k, ms, n_max);
    ctx.log("L=" + std::to_string(jobs[i].L) + " theta_k=" + std::to_string(jobs[i].k) + " done");
  });
  CsvTable t({"L", "theta_k", "theta", "e", "m", "n_max", "E0", "E1", "gap"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& r : res[i]) {
      t.row(jobs[i].L, jobs[i].k, r.params.theta(), r.params.e, r.params.m, n_max, r.E0, r.E1, r.gap);
      lo = std::min(lo, r.gap);
    }
    std::cout << "theta L=" << jobs[i].L << " theta_k=" << jobs[i].k << " min_gap=" << fmt(lo) << "\n";
  }
  ctx.write("theta_scan.csv", t);
}

// ---- vqe ----

void run_vqe(Context& ctx) {
  const json& c = ctx.config;
  auto es = grid(c["e"], "e");
  check_e(es);
  VqeOptions opt;
  opt.m_grid = grid(c["m"], "m");
  opt.cutoff_factor = integer(c["cutoff_factor"], "cutoff_factor");
  opt.n_ref = integer(c["n_ref"], "n_ref");
  opt.pool = integer(c["pool"], "pool");
  opt.budget = integer(c["budget"], "budget");
  if (opt.cutoff_factor < 1 || opt.n_ref < 1) throw validation_error("InvalidParams", "cutoffs must be >= 1");
  if (opt.budget < 1) throw validation_error("InvalidParams", "budget must be >= 1");

  const json& sc = c["shots"];
  check_keys(sc, defaults_for("vqe")["shots"], "shots");
  const bool shots_on = flag(sc.value("enabled", true), "shots.enabled");
  const long shots = integer(sc.value("shots", 8192), "shots.shots");
  const int n_seeds = integer(sc.value("seeds", 20), "shots.seeds");
  const int shot_budget = integer(sc.value("budget", 200), "shots.budget");
  if (shots_on && (shots < 1 || n_seeds < 1 || shot_budget < 1))
    throw validation_error("InvalidParams", "shots, seeds and budget must be >= 1");

  const json& mc = c["mitigation"];
  check_keys(mc, defaults_for("vqe")["mitigation"], "mitigation");
  const bool mit_on = flag(mc.value("enabled", true), "mitigation.enabled");
  MitigationOptions mo;
  mo.runs = integer(mc.value("runs", 10), "mitigation.runs");
  mo.group_size = integer(mc.value("group_size", 5), "mitigation.group_size");
  mo.folds = int_list(mc.value("folds", json::array({1, 3, 5, 7})), "mitigation.folds");
  mo.shots = integer(mc.value("shots", 8192), "mitigation.shots");
  mo.calibration_shots = integer(mc.value("calibration_shots", 8192), "mitigation.calibration_shots");
  const json nz = mc.value("noise", json::object());
  check_keys(nz, defaults_for("vqe")["mitigation"]["noise"], "mitigation.noise");
  mo.noise = NoiseModel::standard(3, num(nz.value("p2", 0.01), "p2"), num(nz.value("p01", 0.02), "p01"),
                                  num(nz.value("p10", 0.04), "p10"));
  mo.noise.seed = ctx.seed();
  if (mit_on) {
    validate(mo.noise, 3);
    for (int f : mo.folds)
      if (f < 1 || f % 2 == 0) throw validation_error("EvenFold", "folds must be positive odd integers");
    if (mo.runs < 1 || mo.group_size < 1 || mo.runs % mo.group_size != 0)
      throw validation_error("InvalidParams", "runs must be a positive multiple of group_size");
    if (mo.shots < 1 || mo.calibration_shots < 1) throw validation_error("InvalidParams", "shots must be >= 1");
  }

  // exact statevector
  std::vector<VqeSweep> exact(es.size());
  parallel_for(es.size(), ctx.jobs, [&](std::size_t i) {
    exact[i] = exact_vqe_sweep(es[i], opt);
    ctx.log("exact e=" + fmt(es[i]) + " m_ref=" + fmt(exact[i].m_ref) + " m_star=" + fmt(exact[i].point.m_star) +
            " R4=" + fmt(exact[i].grid[exact[i].best].ratio));
  });
  const char* secname[4] = {"L3_even", "L3_odd", "L4_even", "L4_odd"};
  CsvTable tt({"e", "m_ref", "L", "parity", "slot", "parent_index", "n", "config", "sign"});
  for (const auto& sw : exact)
    for (const auto& sec : sw.sectors)
      for (int a = 0; a < sec.trunc.dim; ++a) {
        const auto& lab = sec.trunc.labels[static_cast<std::size_t>(a)];
        tt.row(sw.e, sw.m_ref, sec.L, to_string(sec.parity), a, sec.trunc.selected_states[static_cast<std::size_t>(a)],
               lab.n, lab.config, sec.trunc.signs[static_cast<std::size_t>(a)]);
      }
  ctx.write("vqe_truncation.csv", tt);

  std::vector<std::string> gh{"mode", "seed", "e", "m"};
  for (auto* s : secname) {
    gh.push_back(std::string("E_") + s);
    gh.push_back(std::string("manifold_") + s);
    gh.push_back(std::string("eig_") + s);
  }
  gh.push_back("R4");
  auto grid_rows = [&](CsvTable& t, const std::string& mode, std::uint64_t seed, const VqeSweep& sw) {
    for (const auto& gp : sw.grid) {
      const auto& s = gp.sectors;
      t.row(mode, seed, sw.e, gp.m, s[0].energy, s[0].manifold, s[0].eigenvalue, s[1].energy, s[1].manifold,
            s[1].eigenvalue, s[2].energy, s[2].manifold, s[2].eigenvalue, s[3].energy, s[3].manifold, s[3].eigenvalue,
            gp.ratio);
    }
  };
  CsvTable tg(gh);
  for (const auto& sw : exact) grid_rows(tg, "exact", 0, sw);
  ctx.write("vqe_exact.csv", tg);

  CsvTable tc({"mode", "seed", "e", "m_star", "ratio", "R4"});
  CsvTable tf({"mode", "seed", "intercept", "intercept_error", "slope", "points_used"});
  for (const auto& sw : exact) tc.row("exact", 0, sw.e, sw.point.m_star, sw.point.ratio(), sw.grid[sw.best].ratio);
  auto fit_exact = fit_vqe_points(exact);
  tf.row("exact", 0, fit_exact.intercept, fit_exact.intercept_error(), fit_exact.slope, fit_exact.points_used);
  std::cout << "vqe exact intercept=" << fmt(fit_exact.intercept, 6) << " slope=" << fmt(fit_exact.slope, 6) << "\n";
  ctx.notes["stages"]["exact"] = "complete";

  if (shots_on) {
    std::vector<std::vector<VqeSweep>> runs(static_cast<std::size_t>(n_seeds), std::vector<VqeSweep>(es.size()));
    parallel_for(runs.size() * es.size(), ctx.jobs, [&](std::size_t i) {
      std::size_t s = i / es.size(), p = i % es.size();
      runs[s][p] = sampled_vqe_sweep(exact[p], shots, shot_budget, ctx.seed() + s, static_cast<std::uint32_t>(p));
      ctx.log("shots seed=" + std::to_string(ctx.seed() + s) + " e=" + fmt(es[p]) +
              " m_star=" + fmt(runs[s][p].point.m_star));
    });
    CsvTable ts(gh);
    std::vector<double> icpt;
    for (std::size_t s = 0; s < runs.size(); ++s) {
      const std::uint64_t seed = ctx.seed() + s;
      for (const auto& sw : runs[s]) {
        grid_rows(ts, "shots", seed, sw);
        tc.row("shots", seed, sw.e, sw.point.m_star, sw.point.ratio(), sw.grid[sw.best].ratio);
      }
      auto f = fit_vqe_points(runs[s]);
      tf.row("shots", seed, f.intercept, f.intercept_error(), f.slope, f.points_used);
      icpt.push_back(f.intercept);
    }
    ctx.write("vqe_shots.csv", ts);
    auto [mean, se] = mean_stderr(icpt);
    std::cout << "vqe shots seeds=" << n_seeds << " intercept_mean=" << fmt(mean, 6) << " stderr=" << fmt(se, 3)
              << "\n";
    ctx.notes["stages"]["shots"] = "complete";
  }
  ctx.write("vqe_critical.csv", tc);
  ctx.write("vqe_fit.csv", tf);

  if (mit_on) {
    std::vector<MitigationPoint> mp(es.size());
    parallel_for(es.size(), ctx.jobs, [&](std::size_t i) {
      mp[i] = mitigate_point(exact[i], mo, ctx.seed(), static_cast<std::uint32_t>(i));
      ctx.log("mitigation e=" + fmt(es[i]) + " R4_mixed=" + fmt(mp[i].mixed.value) + " +- " + fmt(mp[i].mixed.error));
    });
    CsvTable tr({"point", "e", "m", "L", "parity", "run", "group", "fold", "raw", "ro_corrected"});
    CsvTable tm({"point", "e", "m", "L", "parity", "noiseless", "raw", "raw_err", "ro_corrected", "ro_corrected_err",
                 "linear", "linear_err", "quadratic", "quadratic_err", "best_group", "best_group_mean",
                 "best_group_err"});
    CsvTable tq({"point", "e", "m", "scheme", "R4", "R4_err", "contains_one", "R4_noiseless"});
    int inside = 0;
    for (std::size_t i = 0; i < mp.size(); ++i) {
      const auto& p = mp[i];
      for (const auto& r : p.runs) {
        const auto& sec = exact[i].sectors[static_cast<std::size_t>(r.sector)];
        tr.row(i, p.e, p.m, sec.L, to_string(sec.parity), r.run, r.group, r.fold, r.raw, r.corrected);
      }
      for (std::size_t s = 0; s < 4; ++s) {
        const auto& rep = p.reports[s];
        const auto& g = p.groups[s];
        tm.row(i, p.e, p.m, exact[i].sectors[s].L, to_string(exact[i].sectors[s].parity), p.noiseless[s], rep.raw.mean,
               rep.raw.std_error, rep.ro_corrected.mean, rep.ro_corrected.std_error, rep.linear.mean,
               rep.linear.std_error, rep.quadratic.mean, rep.quadratic.std_error, g.best_group, g.best_mean,
               g.best_std_error);
      }
      std::pair<const char*, const RatioEstimate*> schemes[] = {{"raw", &p.raw},
                                                                {"ro_corrected", &p.ro_corrected},
                                                                {"linear", &p.linear},
                                                                {"quadratic", &p.quadratic},
                                                                {"mixed", &p.mixed}};
      for (auto [name, r] : schemes) tq.row(i, p.e, p.m, name, r->value, r->error, r->contains_one(), p.exact_ratio);
      inside += p.mixed.contains_one();
    }
    ctx.write("mitigation_runs.csv", tr);
    ctx.write("mitigation_summary.csv", tm);
    ctx.write("mitigation_r4.csv", tq);
    std::cout << "vqe mitigation points=" << mp.size() << " mixed_R4_contains_one=" << inside << "\n";
    ctx.notes["stages"]["mitigation"] = "complete";
  }
}

int error_exit(const std::string& code, const std::string& cls, const std::string& msg, int rc) {
  std::string m = msg;
  if (m.rfind(code + ": ", 0) == 0) m = m.substr(code.size() + 2);
  for (auto& ch : m)
    if (ch == '\n' || ch == '"') ch = '\'';
  std::cerr << "error: code=" << code << " class=" << cls << " message=\"" << m << "\"\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization, finite-size scaling and simulated VQE for the lattice Schwinger model"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Opts {
    std::string config, out = "results";
    std::optional<std::uint64_t> seed;
    int jobs = default_jobs();
    std::vector<std::string> sets;
  };
  std::map<std::string, Opts> opts;
  const std::pair<const char*, const char*> cmds[] = {
      {"spectrum", "gap surface over (e, m) for theta = 0, pi"},
      {"critical", "pseudo-critical points and their e -> 0 extrapolation"},
      {"vqe", "simulated VQE search, shot-noise study and noisy mitigation"},
      {"truncation", "gauge cutoff and low-dimensional truncation studies"},
      {"theta", "gap curves in chosen theta sectors"}};
  for (auto [name, help] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    auto& o = opts[name];
    sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "base random seed (overrides the config)");
    sub->add_option("--jobs", o.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--set", o.sets, "override a config key, e.g. --set n_max=10 or --set shots.enabled=false");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return error_exit("UsageError", "validation", e.what(), 1);
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  const Opts& o = opts[cmd];
  Context ctx;
  ctx.command = cmd;
  try {
    json def = defaults_for(cmd);
    json cfg = def;
    if (!o.config.empty()) {
      std::ifstream in(o.config);
      json user = json::parse(in, nullptr, true, true);
      check_keys(user, def, "");
      cfg.merge_patch(user);
      // merge_patch drops nulls; keep keys that default to null
      for (auto it = def.begin(); it != def.end(); ++it)
        if (!cfg.contains(it.key())) cfg[it.key()] = nullptr;
    }
    for (const auto& s : o.sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) bad("--set expects key=value, got '" + s + "'");
      json v;
      try {
        v = json::parse(s.substr(eq + 1));
      } catch (const json::exception&) {
        v = s.substr(eq + 1);
      }
      set_path(cfg, s.substr(0, eq), v);
    }
    check_keys(cfg, def, "");
    if (o.seed) cfg["seed"] = *o.seed;
    if (!cfg["seed"].is_number_unsigned() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0))
      bad("'seed' must be a non-negative integer");
    ctx.config = cfg;
    ctx.hash = hex64(fnv1a64(cmd + "\n" + cfg.dump()));
    ctx.out = o.out;
    ctx.jobs = o.jobs;
    fs::create_directories(ctx.out);

    if (cmd == "spectrum")
      run_spectrum(ctx);
    else if (cmd == "critical")
      run_critical(ctx);
    else if (cmd == "truncation")
      run_truncation(ctx);
    else if (cmd == "theta")
      run_theta(ctx);
    else
      run_vqe(ctx);
    write_manifest(ctx, "complete");
    std::cout << "config_hash=" << ctx.hash << " out=" << ctx.out.string() << "\n";
    return 0;
  } catch (const Error& e) {
    if (!ctx.files.empty()) write_manifest(ctx, "partial");
    bool num_err = e.error_class() == ErrorClass::numerical;
    return error_exit(e.code(), num_err ? "numerical" : "validation", e.what(), num_err ? 2 : 1);
  } catch (const json::exception& e) {
    return error_exit("InvalidConfig", "validation", e.what(), 1);
  } catch (const fs::filesystem_error& e) {
    return error_exit("OutputError", "validation", e.what(), 1);
  }
}

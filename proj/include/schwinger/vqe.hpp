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

// Small statevector simulator and the three-qubit trial circuits.
// Qubit order is little-endian throughout: basis index = sum_q bit_q << q,
// and character q of a Pauli string acts on qubit q.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/errors.hpp"
#include "schwinger/hamiltonian.hpp"
#include "schwinger/linalg.hpp"

namespace schwinger {

using cplx = std::complex<double>;

// constant + coef * theta[param]; param < 0 means a fixed angle.
struct Angle {
  double constant = 0.0;
  int param = -1;
  double coef = 0.0;

  double eval(const std::vector<double>& theta) const {
    if (param < 0) return constant;
    if (static_cast<std::size_t>(param) >= theta.size())
      throw validation_error("UnboundParameter", "theta" + std::to_string(param) + " is not bound");
    return constant + coef * theta[static_cast<std::size_t>(param)];
  }
  bool operator==(const Angle&) const = default;
};

inline Angle fixed(double a) { return {a, -1, 0.0}; }
inline Angle param(int k, double coef = 1.0) { return {0.0, k, coef}; }

enum class GateKind { RY, X, CX };

struct Gate {
  GateKind kind = GateKind::X;
  int target = 0;
  int control = -1;
  Angle angle;
  bool operator==(const Gate&) const = default;
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  int n_params() const {
    int k = 0;
    for (const auto& g : gates)
      if (g.kind == GateKind::RY && g.angle.param >= 0) k = std::max(k, g.angle.param + 1);
    return k;
  }
  int cnot_count() const {
    return static_cast<int>(std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind == GateKind::CX; }));
  }
  Circuit& ry(int q, Angle a) { return push({GateKind::RY, q, -1, a}); }
  Circuit& x(int q) { return push({GateKind::X, q, -1, {}}); }
  Circuit& cx(int c, int t) { return push({GateKind::CX, t, c, {}}); }
  bool operator==(const Circuit&) const = default;

 private:
  Circuit& push(Gate g) {
    if (g.target < 0 || g.target >= n_qubits || (g.kind == GateKind::CX && (g.control < 0 || g.control >= n_qubits || g.control == g.target)))
      throw validation_error("InvalidCircuit", "qubit index out of range");
    gates.push_back(g);
    return *this;
  }
};

namespace circuit_text {

inline std::string number(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string angle(const Angle& a) {
  constexpr double pi = std::numbers::pi;
  auto const_str = [&](double c) -> std::string {
    if (c == pi / 2) return "pi/2";
    if (c == -pi / 2) return "-pi/2";
    if (c == pi) return "pi";
    if (c == -pi) return "-pi";
    return number(c);
  };
  if (a.param < 0) return const_str(a.constant);
  std::string t = "theta" + std::to_string(a.param);
  std::string s;
  if (a.coef == 1.0)
    s = t;
  else if (a.coef == -1.0)
    s = "-" + t;
  else
    s = number(a.coef) + "*" + t;
  if (a.constant != 0.0) s = const_str(a.constant) + (s[0] == '-' ? "" : "+") + s;
  return s;
}

inline double parse_number(std::string_view s) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw validation_error("InvalidCircuit", "bad number in angle: " + std::string(s));
  return v;
}

// term := ['-'] ( 'pi' ['/' num] | 'theta'k | num ['*' 'theta'k] )
inline Angle parse_angle(std::string_view s) {
  Angle a;
  std::size_t i = 0;
  bool any = false;
  while (i < s.size()) {
    double sign = 1.0;
    if (s[i] == '+' || s[i] == '-') {
      if (s[i] == '-') sign = -1.0;
      ++i;
    } else if (any) {
      throw validation_error("InvalidCircuit", "expected + or - in angle: " + std::string(s));
    }
    std::size_t j = i + 1;
    while (j < s.size() && !((s[j] == '+' || s[j] == '-') && s[j - 1] != 'e' && s[j - 1] != 'E')) ++j;
    std::string_view term = s.substr(i, j - i);
    if (term.empty()) throw validation_error("InvalidCircuit", "empty term in angle: " + std::string(s));
    auto theta_at = term.find("theta");
    if (theta_at != std::string_view::npos) {
      double coef = 1.0;
      if (theta_at > 0) {
        if (term[theta_at - 1] != '*') throw validation_error("InvalidCircuit", "bad parameter term: " + std::string(term));
        coef = parse_number(term.substr(0, theta_at - 1));
      }
      std::string_view idx = term.substr(theta_at + 5);
      int k = -1;
      auto r = std::from_chars(idx.data(), idx.data() + idx.size(), k);
      if (r.ec != std::errc() || r.ptr != idx.data() + idx.size() || k < 0 || a.param >= 0)
        throw validation_error("InvalidCircuit", "bad parameter term: " + std::string(term));
      a.param = k;
      a.coef = sign * coef;
    } else if (term.substr(0, 2) == "pi") {
      double v = std::numbers::pi;
      if (term.size() > 2) {
        if (term[2] != '/') throw validation_error("InvalidCircuit", "bad pi term: " + std::string(term));
        v = std::numbers::pi / parse_number(term.substr(3));
      }
      a.constant += sign * v;
    } else {
      a.constant += sign * parse_number(term);
    }
    any = true;
    i = j;
  }
  if (!any) throw validation_error("InvalidCircuit", "empty angle");
  return a;
}

inline int parse_qubit(std::string_view s) {
  int q = -1;
  if (s.size() < 2 || s[0] != 'q') throw validation_error("InvalidCircuit", "bad qubit token: " + std::string(s));
  auto r = std::from_chars(s.data() + 1, s.data() + s.size(), q);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || q < 0)
    throw validation_error("InvalidCircuit", "bad qubit token: " + std::string(s));
  return q;
}

}  // namespace circuit_text

// One gate per line: "RY q<i> <angle>", "X q<i>", "CX q<c> q<t>".  The first
// line declares the register as "QUBITS <n>".
inline std::string serialize(const Circuit& c) {
  std::string s = "QUBITS " + std::to_string(c.n_qubits) + "\n";
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::RY: s += "RY q" + std::to_string(g.target) + " " + circuit_text::angle(g.angle) + "\n"; break;
      case GateKind::X: s += "X q" + std::to_string(g.target) + "\n"; break;
      case GateKind::CX: s += "CX q" + std::to_string(g.control) + " q" + std::to_string(g.target) + "\n"; break;
    }
  }
  return s;
}

inline Circuit parse_circuit(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Circuit c;
  bool header = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op) || op[0] == '#') continue;
    std::vector<std::string> args;
    for (std::string a; ls >> a;) args.push_back(a);
    if (op == "QUBITS") {
      if (args.size() != 1) throw validation_error("InvalidCircuit", "QUBITS takes one argument");
      c.n_qubits = static_cast<int>(circuit_text::parse_number(args[0]));
      header = true;
      continue;
    }
    if (!header) throw validation_error("InvalidCircuit", "missing QUBITS header");
    if (op == "RY" && args.size() == 2)
      c.ry(circuit_text::parse_qubit(args[0]), circuit_text::parse_angle(args[1]));
    else if (op == "X" && args.size() == 1)
      c.x(circuit_text::parse_qubit(args[0]));
    else if (op == "CX" && args.size() == 2)
      c.cx(circuit_text::parse_qubit(args[0]), circuit_text::parse_qubit(args[1]));
    else
      throw validation_error("InvalidCircuit", "cannot parse gate line: " + line);
  }
  if (!header) throw validation_error("InvalidCircuit", "missing QUBITS header");
  return c;
}

struct Statevector {
  int n_qubits = 0;
  std::vector<cplx> amp;

  explicit Statevector(int n = 0) : n_qubits(n), amp(std::size_t{1} << n, 0.0) { amp[0] = 1.0; }
  std::size_t dim() const { return amp.size(); }
  double norm() const {
    double s = 0;
    for (auto a : amp) s += std::norm(a);
    return std::sqrt(s);
  }
  Eigen::VectorXcd vec() const { return Eigen::Map<const Eigen::VectorXcd>(amp.data(), static_cast<Eigen::Index>(amp.size())); }
};

namespace sim {

inline void ry(std::vector<cplx>& a, int q, double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(i & bit)) {
      cplx a0 = a[i], a1 = a[i | bit];
      a[i] = c * a0 - s * a1;
      a[i | bit] = s * a0 + c * a1;
    }
}

inline void x(std::vector<cplx>& a, int q) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(i & bit)) std::swap(a[i], a[i | bit]);
}

inline void cx(std::vector<cplx>& a, int c, int t) {
  const std::size_t cb = std::size_t{1} << c, tb = std::size_t{1} << t;
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((i & cb) && !(i & tb)) std::swap(a[i], a[i | tb]);
}

inline void apply(std::vector<cplx>& a, const Gate& g, const std::vector<double>& theta) {
  switch (g.kind) {
    case GateKind::RY: ry(a, g.target, g.angle.eval(theta)); break;
    case GateKind::X: x(a, g.target); break;
    case GateKind::CX: cx(a, g.control, g.target); break;
  }
}

}  // namespace sim

inline Statevector apply_circuit(const Circuit& c, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) < c.n_params())
    throw validation_error("UnboundParameter", "circuit needs " + std::to_string(c.n_params()) + " angles, got " +
                                                   std::to_string(theta.size()));
  Statevector psi(c.n_qubits);
  for (const auto& g : c.gates) sim::apply(psi.amp, g, theta);
  return psi;
}

enum class AnsatzKind { L3, L4_ground, L4_excited };

inline std::string to_string(AnsatzKind k) {
  switch (k) {
    case AnsatzKind::L3: return "L3";
    case AnsatzKind::L4_ground: return "L4_ground";
    default: return "L4_excited";
  }
}

inline AnsatzKind ansatz_for(int L, Parity p) {
  if (L == 3) return AnsatzKind::L3;
  if (L == 4) return p == Parity::odd ? AnsatzKind::L4_excited : AnsatzKind::L4_ground;
  throw validation_error("UnsupportedL", "trial circuits exist for L = 3, 4 only");
}

// Trial circuits.  Each pairs basis slots 2k and 2k+1 (the fixed RY(pi/2) on
// qubit 0) wherever the truncated eigenvectors carry nearly equal weights.
inline Circuit make_ansatz(AnsatzKind kind) {
  const Angle half_pi = fixed(std::numbers::pi / 2);
  Circuit c;
  c.n_qubits = 3;
  switch (kind) {
    case AnsatzKind::L4_ground:
      c.ry(0, half_pi).ry(1, param(0)).ry(2, param(1));
      c.ry(1, param(2)).cx(2, 1).ry(1, param(2, -1.0));
      break;
    case AnsatzKind::L4_excited:
      c.ry(0, half_pi).ry(1, param(0)).ry(2, param(1));
      c.ry(0, param(2)).cx(1, 0).ry(0, param(2, -1.0));
      break;
    case AnsatzKind::L3:
      c.ry(0, half_pi).ry(1, param(0)).ry(2, param(1));
      c.ry(0, param(2)).x(1);
      c.cx(1, 2);
      c.x(1).ry(2, param(1, -1.0));
      c.cx(2, 0);
      c.ry(0, param(2, -1.0));
      break;
  }
  return c;
}

// A d < 8 Hamiltonian is embedded in 8 dims; padded slots carry a large
// diagonal penalty and are never populated by the L = 3 circuit.  Sampled
// estimators use zero padding instead: measured term by term, the penalty's
// Z strings cancel only on average and would swamp the shot noise.
enum class Padding { penalty, zero };

inline Eigen::MatrixXd pad_to_register(const Eigen::MatrixXd& h, Padding mode = Padding::penalty, int n_qubits = 3) {
  const auto D = static_cast<Eigen::Index>(1) << n_qubits;
  const auto d = h.rows();
  if (d > D) throw validation_error("BadDimension", "matrix does not fit the register");
  if (d == D) return h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  double range = es.eigenvalues()(d - 1) - es.eigenvalues()(0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(D, D);
  H.topLeftCorner(d, d) = h;
  if (mode == Padding::penalty)
    for (Eigen::Index i = d; i < D; ++i) H(i, i) = 1e3 * (range + 1.0);
  return H;
}

struct PauliTerm {
  double coef = 0.0;
  std::string ops;  // ops[q] in {I, X, Y, Z}
};

struct PauliDecomposition {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  Eigen::MatrixXcd matrix() const;
  double identity_coef() const {
    for (const auto& t : terms)
      if (t.ops.find_first_not_of('I') == std::string::npos) return t.coef;
    return 0.0;
  }
};

namespace pauli {

// P|b> = phase |b ^ flip>
inline std::pair<std::size_t, cplx> act(const std::string& ops, std::size_t b) {
  std::size_t out = b;
  cplx ph = 1.0;
  for (std::size_t q = 0; q < ops.size(); ++q) {
    bool bit = (b >> q) & 1u;
    switch (ops[q]) {
      case 'X': out ^= std::size_t{1} << q; break;
      case 'Y':
        out ^= std::size_t{1} << q;
        ph *= bit ? cplx(0, -1) : cplx(0, 1);
        break;
      case 'Z':
        if (bit) ph = -ph;
        break;
      default: break;
    }
  }
  return {out, ph};
}

inline Eigen::MatrixXcd matrix(const std::string& ops) {
  const auto D = static_cast<Eigen::Index>(1) << ops.size();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(D, D);
  for (Eigen::Index b = 0; b < D; ++b) {
    auto [o, ph] = act(ops, static_cast<std::size_t>(b));
    P(static_cast<Eigen::Index>(o), b) = ph;
  }
  return P;
}

inline std::vector<std::string> all_strings(int n) {
  std::vector<std::string> out{""};
  for (int q = 0; q < n; ++q) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(s + c);
    out = std::move(next);
  }
  return out;
}

}  // namespace pauli

inline Eigen::MatrixXcd PauliDecomposition::matrix() const {
  const auto D = static_cast<Eigen::Index>(1) << n_qubits;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(D, D);
  for (const auto& t : terms) H += t.coef * pauli::matrix(t.ops);
  return H;
}

// c_P = Tr(P H) / 2^n; terms below 1e-14 are dropped.
inline PauliDecomposition pauli_decompose(const Eigen::MatrixXd& h) {
  const auto D = h.rows();
  if (h.cols() != D || D < 2 || (D & (D - 1)) != 0)
    throw validation_error("BadDimension", "Pauli decomposition needs a 2^k x 2^k matrix, got " + std::to_string(D));
  require_symmetric(h);
  int n = 0;
  while ((Eigen::Index{1} << n) < D) ++n;
  PauliDecomposition dec;
  dec.n_qubits = n;
  for (const auto& ops : pauli::all_strings(n)) {
    cplx tr = 0.0;
    for (Eigen::Index b = 0; b < D; ++b) {
      auto [o, ph] = pauli::act(ops, static_cast<std::size_t>(b));
      tr += h(b, static_cast<Eigen::Index>(o)) * ph;
    }
    double c = tr.real() / static_cast<double>(D);
    if (std::abs(c) > 1e-14) dec.terms.push_back({c, ops});
  }
  return dec;
}

inline PauliDecomposition pauli_decompose(const TruncatedHamiltonian& t, Padding mode = Padding::penalty) {
  return pauli_decompose(pad_to_register(t.entries, mode));
}

struct EnergyEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long shots = 0;
  enum class Mode { exact, sampled } mode = Mode::exact;
};

inline double expectation(const Statevector& psi, const std::string& ops) {
  cplx s = 0.0;
  for (std::size_t b = 0; b < psi.dim(); ++b) {
    auto [o, ph] = pauli::act(ops, b);
    s += std::conj(psi.amp[o]) * ph * psi.amp[b];
  }
  return s.real();
}

// shots == 0 selects exact mode.  Sampled mode measures each non-identity
// term separately: the parity of a measurement in the term's eigenbasis is
// +1 with probability (1 + <P>)/2, so a term costs one binomial draw.
inline EnergyEstimate measure_energy(const Statevector& psi, const PauliDecomposition& dec, long shots,
                                     std::mt19937_64* rng = nullptr) {
  EnergyEstimate est;
  if (shots <= 0) {
    for (const auto& t : dec.terms) est.mean += t.coef * expectation(psi, t.ops);
    return est;
  }
  if (!rng) throw validation_error("InvalidParams", "sampled mode needs a random stream");
  est.mode = EnergyEstimate::Mode::sampled;
  est.shots = shots;
  double var = 0.0;
  for (const auto& t : dec.terms) {
    if (t.ops.find_first_not_of('I') == std::string::npos) {
      est.mean += t.coef;
      continue;
    }
    double p = std::clamp(0.5 * (1.0 + expectation(psi, t.ops)), 0.0, 1.0);
    std::binomial_distribution<long> bin(shots, p);
    long k = bin(*rng);
    double ev = (2.0 * static_cast<double>(k) - static_cast<double>(shots)) / static_cast<double>(shots);
    est.mean += t.coef * ev;
    var += t.coef * t.coef * std::max(1.0 - ev * ev, 1.0 / static_cast<double>(shots)) / static_cast<double>(shots);
  }
  est.std_error = std::sqrt(var);
  return est;
}

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
};

// Nelder-Mead with restarts from the best vertex whenever the simplex collapses.
inline MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                  std::vector<double> x0, int budget, double step = 0.6, double ftol = 1e-12) {
  if (budget < 1) throw validation_error("InvalidParams", "budget must be >= 1");
  const std::size_t n = x0.size();
  MinimizeResult best;
  best.x = x0;
  best.value = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto call = [&](const std::vector<double>& x) {
    double v = f(x);
    ++evals;
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
    return v;
  };
  if (n == 0) {
    call(x0);
    best.evaluations = evals;
    return best;
  }
  for (int round = 0; evals < budget; ++round) {
    const double start_best = best.value;
    std::vector<std::vector<double>> s(n + 1, best.x);
    std::vector<double> fv(n + 1);
    fv[0] = (evals == 0) ? call(s[0]) : best.value;
    for (std::size_t i = 0; i < n && evals < budget; ++i) {
      s[i + 1][i] += step;
      fv[i + 1] = call(s[i + 1]);
    }
    if (evals >= budget) break;
    while (evals < budget) {
      std::vector<std::size_t> idx(n + 1);
      for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      std::vector<std::vector<double>> s2;
      std::vector<double> f2;
      for (auto i : idx) {
        s2.push_back(s[i]);
        f2.push_back(fv[i]);
      }
      s = std::move(s2);
      fv = std::move(f2);
      double size = 0.0;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(s[i][j] - s[0][j]));
      if (std::abs(fv[n] - fv[0]) <= ftol * (1.0 + std::abs(fv[0])) && size < 1e-7) break;
      if (size < 1e-10) break;
      std::vector<double> c(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[j] += s[i][j] / static_cast<double>(n);
      auto along = [&](double t) {
        std::vector<double> y(n);
        for (std::size_t j = 0; j < n; ++j) y[j] = c[j] + t * (s[n][j] - c[j]);
        return y;
      };
      auto xr = along(-1.0);
      double fr = call(xr);
      if (fr < fv[0]) {
        if (evals >= budget) break;
        auto xe = along(-2.0);
        double fe = call(xe);
        if (fe < fr) {
          s[n] = xe;
          fv[n] = fe;
        } else {
          s[n] = xr;
          fv[n] = fr;
        }
      } else if (fr < fv[n - 1]) {
        s[n] = xr;
        fv[n] = fr;
      } else {
        if (evals >= budget) break;
        bool outside = fr < fv[n];
        auto xc = along(outside ? -0.5 : 0.5);
        double fc = call(xc);
        if (fc < (outside ? fr : fv[n])) {
          s[n] = xc;
          fv[n] = fc;
        } else {
          for (std::size_t i = 1; i <= n && evals < budget; ++i) {
            for (std::size_t j = 0; j < n; ++j) s[i][j] = s[0][j] + 0.5 * (s[i][j] - s[0][j]);
            fv[i] = call(s[i]);
          }
        }
      }
    }
    // a restart that brings nothing ends the search
    if (round > 0 && best.value >= start_best - ftol * (1.0 + std::abs(start_best))) break;
  }
  best.evaluations = evals;
  best.budget_exhausted = evals >= budget;
  return best;
}

struct VqeResult {
  std::vector<double> angles;
  EnergyEstimate energy;
  int evaluations = 0;
  bool budget_exhausted = false;
};

// Minimizes <H> over the circuit angles.  In sampled mode every evaluation
// draws fresh shots from rng and the best-seen estimate is returned.
inline VqeResult vqe_minimize(const Circuit& c, const PauliDecomposition& dec, std::vector<double> initial,
                              int budget = 200, long shots = 0, std::mt19937_64* rng = nullptr) {
  if (static_cast<int>(initial.size()) < c.n_params()) initial.resize(static_cast<std::size_t>(c.n_params()), 0.0);
  EnergyEstimate best_est;
  best_est.mean = std::numeric_limits<double>::infinity();
  auto f = [&](const std::vector<double>& th) {
    EnergyEstimate e = measure_energy(apply_circuit(c, th), dec, shots, rng);
    if (e.mean < best_est.mean) best_est = e;
    return e.mean;
  };
  MinimizeResult r = nelder_mead(f, initial, budget);
  return {r.x, best_est, r.evaluations, r.budget_exhausted};
}

// Lowest energy reachable on the trial manifold, computed without the
// circuit: the L3 and L4-ground manifolds are unit spheres in fixed linear
// subspaces, the L4-excited manifold is a one-parameter family of 3-dim
// subspaces scanned and refined by golden section.
inline double ansatz_manifold_minimum(AnsatzKind kind, const Eigen::MatrixXd& H8) {
  const double r2 = 1.0 / std::sqrt(2.0);
  if (H8.rows() != 8) throw validation_error("BadDimension", "trial manifolds live in 8 dims");
  if (kind != AnsatzKind::L4_excited) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(8, 4);
    if (kind == AnsatzKind::L3) {
      P(0, 0) = P(1, 0) = r2;
      P(2, 1) = P(3, 1) = r2;
      P(4, 2) = 1;
      P(5, 3) = 1;
    } else {
      for (int k = 0; k < 4; ++k) P(2 * k, k) = P(2 * k + 1, k) = r2;
    }
    return lowest_eigenvalue(P.transpose() * H8 * P);
  }
  auto f = [&](double t) {
    double c = std::cos(t / 2), s = std::sin(t / 2);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(8, 3);
    Q(0, 0) = Q(1, 0) = c * r2;
    Q(4, 0) = Q(5, 0) = s * r2;
    Q(2, 1) = c;
    Q(6, 1) = s;
    Q(3, 2) = c;
    Q(7, 2) = s;
    return lowest_eigenvalue(Q.transpose() * H8 * Q);
  };
  const int N = 144;
  const double span = 2 * std::numbers::pi;
  double best = std::numeric_limits<double>::infinity();
  int bi = 0;
  std::vector<double> v(N);
  for (int i = 0; i < N; ++i) {
    v[static_cast<std::size_t>(i)] = f(span * i / N);
    if (v[static_cast<std::size_t>(i)] < best) {
      best = v[static_cast<std::size_t>(i)];
      bi = i;
    }
  }
  double a = span * (bi - 1) / N, b = span * (bi + 1) / N;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - g * (b - a), x2 = a + g * (b - a), f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return std::min({best, f1, f2});
}

}  // namespace schwinger

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

// Momentum-mode occupation states b_0 .. b_{2L-1} at half filling.
// A state |x> is b_{l1}^+ b_{l2}^+ ... |0> with l1 < l2 < ..., so every
// fermionic sign below is measured against increasing mode order.

#include <bit>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schwinger/errors.hpp"

namespace schwinger {

using Bits = std::uint32_t;
using cplx = std::complex<double>;

inline constexpr int kMaxL = 12;

struct FermionConfig {
  int L = 0;
  Bits bits = 0;

  int modes() const { return 2 * L; }
  bool occupied(int l) const { return (bits >> l) & 1u; }
  int count() const { return std::popcount(bits); }
  bool half_filled() const { return count() == L; }

  // Character i is x_i.
  std::string str() const {
    std::string s(static_cast<std::size_t>(modes()), '0');
    for (int l = 0; l < modes(); ++l)
      if (occupied(l)) s[static_cast<std::size_t>(l)] = '1';
    return s;
  }

  static FermionConfig parse(std::string_view s) {
    if (s.empty() || s.size() % 2 != 0 || s.size() > 2 * kMaxL)
      throw validation_error("InvalidConfig", "occupation string must have even length 2..24: " + std::string(s));
    FermionConfig c;
    c.L = static_cast<int>(s.size() / 2);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        c.bits |= Bits{1} << i;
      else if (s[i] != '0')
        throw validation_error("InvalidConfig", "occupation string must contain only 0/1: " + std::string(s));
    }
    return c;
  }

  auto operator<=>(const FermionConfig&) const = default;
};

struct SignedConfig {
  FermionConfig config;
  int sign = 1;
};

namespace fock {

inline int parity_below(Bits x, int l) { return std::popcount(x & ((Bits{1} << l) - 1u)) & 1; }

// b_to^+ b_from acting on |x>; nullopt when the amplitude vanishes.
inline std::optional<std::pair<Bits, int>> hop(Bits x, int to, int from) {
  if (!((x >> from) & 1u)) return std::nullopt;
  int s = parity_below(x, from) ? -1 : 1;
  x &= ~(Bits{1} << from);
  if ((x >> to) & 1u) return std::nullopt;
  s *= parity_below(x, to) ? -1 : 1;
  return std::make_pair(x | (Bits{1} << to), s);
}

// b_{m[0]}^+ b_{m[1]}^+ ... |0> written as sign * |x>.
inline std::pair<Bits, int> create_ordered(const std::vector<int>& m) {
  Bits x = 0;
  int inversions = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    x |= Bits{1} << m[i];
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (m[j] < m[i]) ++inversions;
  }
  return {x, (inversions & 1) ? -1 : 1};
}

inline std::vector<int> occupied_modes(const FermionConfig& c) {
  std::vector<int> out;
  for (int l = 0; l < c.modes(); ++l)
    if (c.occupied(l)) out.push_back(l);
  return out;
}

inline int sign_pow(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace fock

// U_1^w: b_l -> b_{l+w}, with the (-1)^L vacuum phase per unit winding.
inline SignedConfig apply_lgt(const FermionConfig& config, int winding) {
  const int M = config.modes();
  int w = ((winding % M) + M) % M;
  SignedConfig out{config, 1};
  for (int step = 0; step < w; ++step) {
    std::vector<int> m = fock::occupied_modes(out.config);
    for (int& l : m) l = (l + 1) % M;
    auto [x, s] = fock::create_ordered(m);
    out.config.bits = x;
    out.sign *= s * fock::sign_pow(config.L);
  }
  return out;
}

// Pi b_l Pi = -b_{L-l-1}, vacuum phase (-1)^{L(L+1)/2}.
inline SignedConfig apply_parity(const FermionConfig& config) {
  const int M = config.modes();
  const int L = config.L;
  std::vector<int> m = fock::occupied_modes(config);
  for (int& l : m) l = (((L - 1 - l) % M) + M) % M;
  auto [x, s] = fock::create_ordered(m);
  s *= fock::sign_pow(static_cast<int>(m.size()));
  s *= fock::sign_pow(L * (L + 1) / 2);
  return {FermionConfig{L, x}, s};
}

inline cplx translation_eigenvalue(const FermionConfig& config) {
  const int L = config.L;
  double P = 0.0;
  for (int l = 0; l < config.modes(); ++l)
    if (config.occupied(l)) P += (2 * l + 1) * std::numbers::pi / (2.0 * L);
  return static_cast<double>(fock::sign_pow(L)) * std::exp(cplx(0.0, 2.0 * P));
}

// +1 or -1 when the eigenvalue is real, 0 otherwise.
inline int translation_sign(const FermionConfig& config) {
  cplx t = translation_eigenvalue(config);
  if (std::abs(t - 1.0) < 1e-9) return 1;
  if (std::abs(t + 1.0) < 1e-9) return -1;
  return 0;
}

inline FermionConfig dirac_sea(int L) {
  FermionConfig c{L, 0};
  for (int l = L; l < 2 * L; ++l) c.bits |= Bits{1} << l;
  return c;
}

inline std::vector<FermionConfig> half_filled_configs(int L) {
  std::vector<FermionConfig> out;
  for (Bits x = 0; x < (Bits{1} << (2 * L)); ++x)
    if (std::popcount(x) == L) out.push_back({L, x});
  return out;
}

}  // namespace schwinger

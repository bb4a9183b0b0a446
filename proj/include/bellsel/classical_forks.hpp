// Copyright 2026 The bellsel Authors
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
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "bellsel/common.hpp"
#include "bellsel/rng.hpp"

namespace bellsel {

// 2x2 table of two binary indicators X, Y; index 2*X + Y.
struct BinaryTable {
  std::array<std::uint64_t, 4> n{};

  void add(bool x, bool y) { ++n[2 * x + y]; }
  std::uint64_t total() const { return n[0] + n[1] + n[2] + n[3]; }

  std::array<double, 4> frequencies() const {
    std::array<double, 4> f{};
    const auto t = total();
    if (t == 0) return f;
    for (std::size_t i = 0; i < 4; ++i) f[i] = static_cast<double>(n[i]) / static_cast<double>(t);
    return f;
  }
};

/// Pearson correlation of two binary indicators (phi coefficient);
/// undefined when either indicator is constant.
inline std::optional<double> phi_coefficient(const BinaryTable& t) {
  const double n00 = static_cast<double>(t.n[0]), n01 = static_cast<double>(t.n[1]);
  const double n10 = static_cast<double>(t.n[2]), n11 = static_cast<double>(t.n[3]);
  const double x1 = n10 + n11, x0 = n00 + n01, y1 = n01 + n11, y0 = n00 + n10;
  const double denom = x1 * x0 * y1 * y0;
  if (denom <= 0.0) return std::nullopt;
  return std::clamp((n11 * n00 - n10 * n01) / std::sqrt(denom), -1.0, 1.0);
}

enum class ForkKind { kCorrelating, kDecorrelating };

inline const char* to_string(ForkKind k) {
  return k == ForkKind::kCorrelating ? "Correlating Fork" : "Decorrelating Fork";
}

struct ForkReport {
  std::string demo;
  ForkKind kind = ForkKind::kCorrelating;
  std::string restriction_label;
  std::optional<double> population_corr;
  std::optional<double> restricted_corr;
  std::uint64_t population_size = 0;
  std::uint64_t restricted_size = 0;
  BinaryTable population_table;
  BinaryTable restricted_table;

  // "inducing" when restriction strengthens the correlation, "masking"
  // when it weakens it; empty when either side is undefined.
  std::string direction() const {
    if (!population_corr || !restricted_corr) return "";
    return std::abs(*restricted_corr) > std::abs(*population_corr) ? "inducing" : "masking";
  }
};

namespace detail {

inline ForkReport make_fork_report(std::string demo, ForkKind kind, std::string label, const BinaryTable& pop,
                                   const BinaryTable& restricted) {
  ForkReport r;
  r.demo = std::move(demo);
  r.kind = kind;
  r.restriction_label = std::move(label);
  r.population_table = pop;
  r.restricted_table = restricted;
  r.population_size = pop.total();
  r.restricted_size = restricted.total();
  r.population_corr = phi_coefficient(pop);
  r.restricted_corr = phi_coefficient(restricted);
  return r;
}

}  // namespace detail

/// G, H independent fair bits with the collider F = G xor H. Conditioning
/// on F = f forces G == H (f = 0) or G != H (f = 1).
inline ForkReport collider_demo(std::uint64_t n, std::uint64_t seed, int f_value = 0) {
  require(n >= 2, "collider_demo needs n >= 2");
  require(f_value == 0 || f_value == 1, "collider condition must be 0 or 1");
  BinaryTable pop, restricted;
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, stream_id(StreamDomain::kCollider, i));
    const bool g = rng.coin(), h = rng.coin();
    pop.add(g, h);
    if (static_cast<int>(g != h) == f_value) restricted.add(g, h);
  }
  return detail::make_fork_report("collider", ForkKind::kCorrelating, "F = " + std::to_string(f_value), pop,
                                  restricted);
}

struct DigitSeq {
  std::vector<std::uint8_t> digits;
  std::string source;

  std::size_t size() const { return digits.size(); }
};

/// Parity of paired digits: X = s1[n] odd, Y = s2[n] odd. The restricted
/// population S keeps positions where the two digits are not both odd.
/// Table cells are even-even, even-odd, odd-even, odd-odd.
inline ForkReport parity_correlator(const DigitSeq& s1, const DigitSeq& s2) {
  require(!s1.digits.empty(), "digit sequences must be non-empty");
  require(s1.size() == s2.size(), "digit sequences differ in length (" + std::to_string(s1.size()) + " vs " +
                                      std::to_string(s2.size()) + ")");
  BinaryTable pop, restricted;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    require(s1.digits[i] <= 9 && s2.digits[i] <= 9, "digits must be in 0..9");
    const bool x = s1.digits[i] % 2 == 1, y = s2.digits[i] % 2 == 1;
    pop.add(x, y);
    if (!(x && y)) restricted.add(x, y);
  }
  return detail::make_fork_report("parity", ForkKind::kCorrelating,
                                  "S: " + s1.source + " and " + s2.source + " digits not both odd", pop, restricted);
}

inline DigitSeq synthetic_digits(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  DigitSeq s;
  s.source = "synthetic-" + std::to_string(stream);
  s.digits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, stream_id(StreamDomain::kSyntheticDigits, (stream << 40) ^ i));
    s.digits[i] = static_cast<std::uint8_t>(std::min(9.0, std::floor(rng.uniform() * 10.0)));
  }
  return s;
}

/// Reads decimal digits, ignoring everything else. When the text contains
/// a '.', digits before it are the integer part and are skipped.
inline DigitSeq load_digits(const std::filesystem::path& path, std::size_t count) {
  require(count >= 1, "digit count must be at least 1");
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open digit file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto dot = text.find('.');
  const std::size_t start = dot == std::string::npos ? 0 : dot + 1;
  DigitSeq s;
  s.source = path.stem().string();
  s.digits.reserve(count);
  for (std::size_t i = start; i < text.size() && s.digits.size() < count; ++i)
    if (text[i] >= '0' && text[i] <= '9') s.digits.push_back(static_cast<std::uint8_t>(text[i] - '0'));
  require(s.digits.size() == count, "digit file " + path.string() + " has " + std::to_string(s.digits.size()) +
                                        " digits, " + std::to_string(count) + " required");
  return s;
}

struct MiceParams {
  double p_white = 0.5;
  double p_k = 0.2;
  double p_l = 0.2;

  void validate() const {
    for (double p : {p_white, p_k, p_l})
      require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "mouse probabilities must be in [0,1]");
  }
};

/// Range restriction: white coat J is a common cause of diseases K and L,
/// which are independent given J. Restricting to white mice holds J fixed
/// and masks the K-L correlation (postselection from a mixed colony).
inline ForkReport mice_demo(std::uint64_t n, std::uint64_t seed, const MiceParams& params = {}) {
  require(n >= 2, "mice_demo needs n >= 2");
  params.validate();
  BinaryTable pop, white;
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, stream_id(StreamDomain::kMice, i));
    const bool is_white = rng.uniform() < params.p_white;
    const double uk = rng.uniform(), ul = rng.uniform();
    const bool k = is_white && uk < params.p_k, l = is_white && ul < params.p_l;
    pop.add(k, l);
    if (is_white) white.add(k, l);
  }
  return detail::make_fork_report("mice", ForkKind::kDecorrelating, "white mice only", pop, white);
}

/// Preselection: the colony is bred white-only, so there is no mixed
/// population to compare against.
inline ForkReport mice_preselected(std::uint64_t n, std::uint64_t seed, const MiceParams& params = {}) {
  require(n >= 2, "mice_preselected needs n >= 2");
  params.validate();
  BinaryTable white;
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, stream_id(StreamDomain::kMicePreselected, i));
    const double uk = rng.uniform(), ul = rng.uniform();
    white.add(uk < params.p_k, ul < params.p_l);
  }
  return detail::make_fork_report("mice-preselected", ForkKind::kDecorrelating, "bred white-only", {}, white);
}

}  // namespace bellsel

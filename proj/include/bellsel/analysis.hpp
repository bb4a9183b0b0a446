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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bellsel/classical_forks.hpp"
#include "bellsel/ensemble.hpp"
#include "bellsel/quantum_core.hpp"

namespace bellsel {

inline constexpr double kDefaultZ = 4.0;

enum class GroupBy { kNone, kSelection };

// Name of the group a record belongs to: "all", a sel label, or
// "unlabeled" for records without one.
using GroupKey = std::string;
inline const GroupKey kAllGroup = "all";
inline const GroupKey kUnlabeledGroup = "unlabeled";

/// Outcome counts for one group, indexed [8a + 4b + 2A + B].
struct Counts {
  std::array<std::uint64_t, 16> n{};

  void add(const RunRecord& r) { ++n[8 * r.a + 4 * r.b + 2 * r.A + r.B]; }

  std::uint64_t cell(Bit a, Bit b, Bit A, Bit B) const { return n[8 * a + 4 * b + 2 * A + B]; }
  std::uint64_t pair(Bit a, Bit b) const {
    return cell(a, b, 0, 0) + cell(a, b, 0, 1) + cell(a, b, 1, 0) + cell(a, b, 1, 1);
  }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto x : n) t += x;
    return t;
  }
  // Runs with Alice's setting a and outcome A, pooled over Bob's setting.
  std::uint64_t alice(Bit a, Bit A) const {
    return cell(a, 0, A, 0) + cell(a, 0, A, 1) + cell(a, 1, A, 0) + cell(a, 1, A, 1);
  }
  std::uint64_t bob(Bit b, Bit B) const {
    return cell(0, b, 0, B) + cell(0, b, 1, B) + cell(1, b, 0, B) + cell(1, b, 1, B);
  }

  Counts& operator+=(const Counts& o) {
    for (std::size_t i = 0; i < 16; ++i) n[i] += o.n[i];
    return *this;
  }
};

inline std::string group_of(const RunRecord& r, GroupBy by) {
  if (by == GroupBy::kNone) return kAllGroup;
  return r.sel ? r.sel->str() : kUnlabeledGroup;
}

/// Counts per group; groups are ordered by name (C0..C3, M0..M3, ...).
inline std::map<GroupKey, Counts> count_groups(const Ensemble& e, GroupBy by) {
  std::map<GroupKey, Counts> groups;
  for (const auto& r : e.records) groups[group_of(r, by)].add(r);
  return groups;
}

struct CorrelationEntry {
  std::uint64_t count = 0;
  std::optional<double> e;       // undefined when count == 0
  std::optional<double> stderr_;
};

struct CorrelationReport {
  GroupKey group;
  Counts counts;
  std::array<CorrelationEntry, 4> pairs;  // [2a + b]
};

inline CorrelationReport correlation_report(const GroupKey& group, const Counts& c) {
  CorrelationReport rep{group, c, {}};
  for (Bit a = 0; a < 2; ++a)
    for (Bit b = 0; b < 2; ++b) {
      auto& entry = rep.pairs[2 * a + b];
      entry.count = c.pair(a, b);
      if (entry.count == 0) continue;
      const auto same = static_cast<double>(c.cell(a, b, 0, 0) + c.cell(a, b, 1, 1));
      const auto n = static_cast<double>(entry.count);
      const double e = (2.0 * same - n) / n;
      entry.e = e;
      entry.stderr_ = std::sqrt(std::max(0.0, 1.0 - e * e) / n);
    }
  return rep;
}

inline std::vector<CorrelationReport> estimate_correlations(const Ensemble& e, GroupBy by = GroupBy::kNone) {
  require(!e.empty(), "ensemble is empty");
  std::vector<CorrelationReport> out;
  for (const auto& [key, counts] : count_groups(e, by)) out.push_back(correlation_report(key, counts));
  return out;
}

struct ChshEstimate {
  bool available = false;
  std::string reason;  // why unavailable
  double s = 0.0;
  double stderr_ = 0.0;
  std::size_t minus_pair = 3;
  std::array<double, 4> family{};
  double z = kDefaultZ;
  bool violates_classical = false;
};

/// Empirical CHSH value (largest-|S| member of the family) with its
/// standard error by quadrature of the four correlator errors.
inline ChshEstimate estimate_chsh(const CorrelationReport& rep, double z = kDefaultZ) {
  ChshEstimate est;
  est.z = z;
  std::array<double, 4> e{};
  double var = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (!rep.pairs[k].e) {
      est.reason = "setting pair (" + std::to_string(k >> 1) + "," + std::to_string(k & 1) + ") has no runs";
      return est;
    }
    e[k] = *rep.pairs[k].e;
    var += *rep.pairs[k].stderr_ * *rep.pairs[k].stderr_;
  }
  const auto v = chsh_evaluate(e);
  est.available = true;
  est.s = v.s;
  est.family = v.family;
  est.minus_pair = v.minus_pair;
  est.stderr_ = std::sqrt(var);
  est.violates_classical = std::abs(est.s) - 2.0 > z * est.stderr_;
  return est;
}

enum class BiasDirection { kInducing, kMasking };

inline const char* to_string(BiasDirection d) { return d == BiasDirection::kInducing ? "inducing" : "masking"; }

struct MsbcDiscrepancy {
  SelLabel sel;
  std::size_t pair = 0;  // 2a + b
  double e_sub = 0.0;
  double e_super = 0.0;
  double sigma = 0.0;
  double zscore = 0.0;
  bool flagged = false;
  BiasDirection direction = BiasDirection::kInducing;
};

struct MsbcReport {
  CorrelationReport super_report;
  std::map<SelLabel, CorrelationReport> sub_reports;
  std::vector<MsbcDiscrepancy> discrepancies;
  double z = kDefaultZ;
  bool msbc_holds = false;
  double max_discrepancy = 0.0;  // largest standardized |E_sub - E_super|
};

namespace detail {

inline double zscore(double diff, double sigma) {
  if (diff == 0.0) return 0.0;
  if (sigma <= 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(diff) / sigma;
}

}  // namespace detail

/// Selection bias is present when some subensemble's correlation differs
/// significantly from the super-ensemble's. Uses statistics only.
inline MsbcReport msbc_test(const Ensemble& e, double z = kDefaultZ) {
  require(!e.empty(), "ensemble is empty");
  std::map<SelLabel, Counts> by_sel;
  Counts all;
  for (std::size_t i = 0; i < e.records.size(); ++i) {
    const auto& r = e.records[i];
    require(r.sel.has_value(), "record " + std::to_string(r.run) + " has no selection label");
    by_sel[*r.sel].add(r);
    all.add(r);
  }
  MsbcReport rep;
  rep.z = z;
  rep.super_report = correlation_report(kAllGroup, all);
  for (const auto& [sel, counts] : by_sel) {
    auto sub = correlation_report(sel.str(), counts);
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& s = sub.pairs[k];
      const auto& p = rep.super_report.pairs[k];
      if (!s.e || !p.e) continue;
      MsbcDiscrepancy d;
      d.sel = sel;
      d.pair = k;
      d.e_sub = *s.e;
      d.e_super = *p.e;
      d.sigma = std::hypot(*s.stderr_, *p.stderr_);
      d.zscore = detail::zscore(d.e_sub - d.e_super, d.sigma);
      d.flagged = d.zscore > z;
      d.direction = std::abs(d.e_sub) > std::abs(d.e_super) ? BiasDirection::kInducing : BiasDirection::kMasking;
      rep.msbc_holds = rep.msbc_holds || d.flagged;
      rep.max_discrepancy = std::max(rep.max_discrepancy, d.zscore);
      rep.discrepancies.push_back(d);
    }
    rep.sub_reports.emplace(sel, std::move(sub));
  }
  return rep;
}

struct SignallingEntry {
  GroupKey group;
  char side = 'A';     // whose marginal is tested
  Bit local = 0;       // that side's setting
  std::uint64_t n_remote0 = 0, n_remote1 = 0;
  std::optional<double> p_remote0, p_remote1;  // P(outcome = 0 | local, remote)
  double deviation = 0.0;
  double sigma = 0.0;
  double zscore = 0.0;
  bool pass = true;
};

struct NoSignallingReport {
  std::vector<SignallingEntry> entries;
  double z = kDefaultZ;
  bool pass = true;
  double max_deviation = 0.0;
};

/// For each side, group and local setting compares that side's outcome
/// marginal across the two remote settings.
inline NoSignallingReport no_signalling_check(const Ensemble& e, GroupBy by = GroupBy::kNone, double z = kDefaultZ) {
  require(!e.empty(), "ensemble is empty");
  NoSignallingReport rep;
  rep.z = z;
  for (const auto& [group, c] : count_groups(e, by)) {
    for (char side : {'A', 'B'}) {
      for (Bit local = 0; local < 2; ++local) {
        SignallingEntry s;
        s.group = group;
        s.side = side;
        s.local = local;
        std::array<std::uint64_t, 2> n{}, zeros{};
        for (Bit remote = 0; remote < 2; ++remote) {
          const Bit a = side == 'A' ? local : remote;
          const Bit b = side == 'A' ? remote : local;
          n[remote] = c.pair(a, b);
          zeros[remote] = side == 'A' ? c.cell(a, b, 0, 0) + c.cell(a, b, 0, 1) : c.cell(a, b, 0, 0) + c.cell(a, b, 1, 0);
        }
        s.n_remote0 = n[0];
        s.n_remote1 = n[1];
        if (n[0] > 0) s.p_remote0 = static_cast<double>(zeros[0]) / static_cast<double>(n[0]);
        if (n[1] > 0) s.p_remote1 = static_cast<double>(zeros[1]) / static_cast<double>(n[1]);
        if (s.p_remote0 && s.p_remote1) {
          const double p0 = *s.p_remote0, p1 = *s.p_remote1;
          s.deviation = std::abs(p0 - p1);
          s.sigma = std::sqrt(p0 * (1 - p0) / static_cast<double>(n[0]) + p1 * (1 - p1) / static_cast<double>(n[1]));
          s.zscore = detail::zscore(s.deviation, s.sigma);
          s.pass = s.zscore <= z;
        }
        rep.pass = rep.pass && s.pass;
        rep.max_deviation = std::max(rep.max_deviation, s.deviation);
        rep.entries.push_back(s);
      }
    }
  }
  return rep;
}

struct FactorizabilityEntry {
  GroupKey group;
  std::size_t pair = 0;  // 2a + b
  std::uint64_t count = 0;
  bool insufficient_data = false;
  double delta = 0.0;  // max over cells of |P(A,B|a,b) - P(A|a) P(B|b)|
  std::size_t worst_cell = 0;
  double sigma = 0.0;  // at the worst-z cell
  double zscore = 0.0;
  bool pass = true;
};

struct FactorizabilityReport {
  std::vector<FactorizabilityEntry> entries;
  double z = kDefaultZ;
  bool pass = true;
  bool insufficient_data = false;
  double max_delta = 0.0;
};

/// Compares each joint cell with the product of the two local marginals
/// (each pooled over the remote setting).
inline FactorizabilityReport factorizability_check(const Ensemble& e, GroupBy by = GroupBy::kNone,
                                                   double z = kDefaultZ) {
  require(!e.empty(), "ensemble is empty");
  FactorizabilityReport rep;
  rep.z = z;
  for (const auto& [group, c] : count_groups(e, by)) {
    for (Bit a = 0; a < 2; ++a)
      for (Bit b = 0; b < 2; ++b) {
        FactorizabilityEntry f;
        f.group = group;
        f.pair = 2 * a + b;
        f.count = c.pair(a, b);
        const auto na = c.alice(a, 0) + c.alice(a, 1);
        const auto nb = c.bob(b, 0) + c.bob(b, 1);
        if (f.count < 2) {
          f.insufficient_data = true;
          rep.insufficient_data = true;
          rep.entries.push_back(f);
          continue;
        }
        const double n = static_cast<double>(f.count);
        double worst_z = -1.0;
        for (Bit A = 0; A < 2; ++A)
          for (Bit B = 0; B < 2; ++B) {
            const double pc = static_cast<double>(c.cell(a, b, A, B)) / n;
            const double pa = static_cast<double>(c.alice(a, A)) / static_cast<double>(na);
            const double pb = static_cast<double>(c.bob(b, B)) / static_cast<double>(nb);
            const double d = std::abs(pc - pa * pb);
            // Delta-method variance, treating the cell and the two pooled
            // marginals as independent estimates.
            const double sigma = std::sqrt(pc * (1 - pc) / n + pa * (1 - pa) * pb * pb / static_cast<double>(na) +
                                           pb * (1 - pb) * pa * pa / static_cast<double>(nb));
            const double zs = detail::zscore(d, sigma);
            if (d > f.delta) {
              f.delta = d;
              f.worst_cell = 2 * A + B;
            }
            if (zs > worst_z) {
              worst_z = zs;
              f.zscore = zs;
              f.sigma = sigma;
            }
          }
        f.pass = f.zscore <= z;
        rep.pass = rep.pass && f.pass;
        rep.max_delta = std::max(rep.max_delta, f.delta);
        rep.entries.push_back(f);
      }
  }
  return rep;
}

/// MSBC applied to a fork: the restricted table is the subensemble, the
/// population table the super-ensemble, and E = P(X == Y) - P(X != Y).
/// Empty when either table has no entries.
struct ForkMsbc {
  double e_sub = 0.0;
  double e_super = 0.0;
  double sigma = 0.0;
  double zscore = 0.0;
  double z = kDefaultZ;
  bool flagged = false;
  BiasDirection direction = BiasDirection::kInducing;
};

inline std::optional<ForkMsbc> fork_msbc(const ForkReport& r, double z = kDefaultZ) {
  const auto& sub = r.restricted_table;
  const auto& super = r.population_table;
  if (sub.total() == 0 || super.total() == 0) return std::nullopt;
  auto e_of = [](const BinaryTable& t) {
    const double n = static_cast<double>(t.total());
    return (static_cast<double>(t.n[0] + t.n[3]) - static_cast<double>(t.n[1] + t.n[2])) / n;
  };
  auto se_of = [](double e, const BinaryTable& t) { return std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(t.total())); };
  ForkMsbc m;
  m.z = z;
  m.e_sub = e_of(sub);
  m.e_super = e_of(super);
  m.sigma = std::hypot(se_of(m.e_sub, sub), se_of(m.e_super, super));
  const double diff = std::abs(m.e_sub - m.e_super);
  m.zscore = m.sigma > 0.0 ? diff / m.sigma : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  m.flagged = m.zscore > z;
  m.direction = std::abs(m.e_sub) > std::abs(m.e_super) ? BiasDirection::kInducing : BiasDirection::kMasking;
  return m;
}

}  // namespace bellsel

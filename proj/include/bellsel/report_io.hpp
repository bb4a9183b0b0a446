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

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include "bellsel/analysis.hpp"
#include "bellsel/classical_forks.hpp"
#include "json.hpp"

// JSON and aligned-text renderings of analysis and fork reports. Field
// names match schema/report.schema.json.

namespace bellsel {

using ojson = nlohmann::ordered_json;

namespace detail {

inline ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline ojson finite_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v, const char* f = "%+.6f") {
  return v ? fmt(f, *v) : std::string("undefined");
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

inline ojson to_ojson(const CorrelationReport& r) {
  ojson j;
  j["group"] = r.group;
  j["runs"] = r.counts.total();
  ojson pairs = ojson::array();
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& p = r.pairs[k];
    ojson e;
    e["a"] = k >> 1;
    e["b"] = k & 1;
    e["count"] = p.count;
    e["status"] = p.e ? "ok" : "undefined";
    e["E"] = detail::opt(p.e);
    e["stderr"] = detail::opt(p.stderr_);
    pairs.push_back(e);
  }
  j["pairs"] = pairs;
  return j;
}

inline ojson to_ojson(const ChshEstimate& c, const GroupKey& group) {
  ojson j;
  j["group"] = group;
  j["status"] = c.available ? "ok" : "unavailable";
  if (!c.available) {
    j["reason"] = c.reason;
    return j;
  }
  j["S"] = c.s;
  j["stderr"] = c.stderr_;
  j["minus_pair"] = {c.minus_pair >> 1, c.minus_pair & 1};
  j["family"] = c.family;
  j["z"] = c.z;
  j["violates_classical"] = c.violates_classical;
  return j;
}

inline ojson to_ojson(const MsbcReport& m) {
  ojson j;
  j["status"] = "ok";
  j["z"] = m.z;
  j["msbc_holds"] = m.msbc_holds;
  j["max_discrepancy"] = detail::finite_or_null(m.max_discrepancy);
  j["super"] = to_ojson(m.super_report);
  ojson subs = ojson::array();
  for (const auto& [sel, rep] : m.sub_reports) subs.push_back(to_ojson(rep));
  j["subensembles"] = subs;
  ojson ds = ojson::array();
  for (const auto& d : m.discrepancies) {
    ojson e;
    e["sel"] = d.sel.str();
    e["a"] = d.pair >> 1;
    e["b"] = d.pair & 1;
    e["E_sub"] = d.e_sub;
    e["E_super"] = d.e_super;
    e["sigma"] = d.sigma;
    e["z"] = detail::finite_or_null(d.zscore);
    e["flagged"] = d.flagged;
    e["direction"] = to_string(d.direction);
    ds.push_back(e);
  }
  j["discrepancies"] = ds;
  return j;
}

inline ojson to_ojson(const NoSignallingReport& r) {
  ojson j;
  j["z"] = r.z;
  j["pass"] = r.pass;
  j["max_deviation"] = r.max_deviation;
  ojson es = ojson::array();
  for (const auto& s : r.entries) {
    ojson e;
    e["group"] = s.group;
    e["side"] = std::string(1, s.side);
    e["local_setting"] = s.local;
    e["n_remote0"] = s.n_remote0;
    e["n_remote1"] = s.n_remote1;
    e["p0_remote0"] = detail::opt(s.p_remote0);
    e["p0_remote1"] = detail::opt(s.p_remote1);
    e["deviation"] = s.deviation;
    e["sigma"] = s.sigma;
    e["z"] = detail::finite_or_null(s.zscore);
    e["pass"] = s.pass;
    es.push_back(e);
  }
  j["entries"] = es;
  return j;
}

inline ojson to_ojson(const FactorizabilityReport& r) {
  ojson j;
  j["z"] = r.z;
  j["pass"] = r.pass;
  j["insufficient_data"] = r.insufficient_data;
  j["max_delta"] = r.max_delta;
  ojson es = ojson::array();
  for (const auto& f : r.entries) {
    ojson e;
    e["group"] = f.group;
    e["a"] = f.pair >> 1;
    e["b"] = f.pair & 1;
    e["count"] = f.count;
    e["status"] = f.insufficient_data ? "insufficient data" : "ok";
    e["delta"] = f.delta;
    e["worst_cell"] = {f.worst_cell >> 1, f.worst_cell & 1};
    e["sigma"] = f.sigma;
    e["z"] = detail::finite_or_null(f.zscore);
    e["pass"] = f.pass;
    es.push_back(e);
  }
  j["entries"] = es;
  return j;
}

inline ojson to_ojson(const ForkReport& r) {
  auto side = [](const std::optional<double>& corr, const BinaryTable& t) {
    ojson s;
    s["size"] = t.total();
    s["corr"] = detail::opt(corr);
    s["cells"] = t.frequencies();
    s["counts"] = t.n;
    return s;
  };
  ojson j;
  j["demo"] = r.demo;
  j["fork_kind"] = to_string(r.kind);
  j["restriction"] = r.restriction_label;
  j["direction"] = r.direction().empty() ? ojson(nullptr) : ojson(r.direction());
  j["population"] = side(r.population_corr, r.population_table);
  j["restricted"] = side(r.restricted_corr, r.restricted_table);
  return j;
}

inline ojson to_ojson(const ForkMsbc& m) {
  ojson j;
  j["E_sub"] = m.e_sub;
  j["E_super"] = m.e_super;
  j["sigma"] = m.sigma;
  j["z"] = detail::finite_or_null(m.zscore);
  j["threshold"] = m.z;
  j["flagged"] = m.flagged;
  j["direction"] = to_string(m.direction);
  return j;
}

// ---- aligned text tables ----

inline std::string to_table(const CorrelationReport& r) {
  std::ostringstream os;
  os << "correlations [" << r.group << "] runs=" << r.counts.total() << '\n';
  os << "  a b      count          E     stderr\n";
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& p = r.pairs[k];
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %zu %zu %10llu %10s %10s\n", k >> 1, k & 1,
                  static_cast<unsigned long long>(p.count), detail::fmt_opt(p.e, "%+.5f").c_str(),
                  detail::fmt_opt(p.stderr_, "%.5f").c_str());
    os << buf;
  }
  return os.str();
}

inline std::string to_table(const ChshEstimate& c, const GroupKey& group) {
  if (!c.available) return "chsh [" + group + "] unavailable: " + c.reason + "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "chsh [%s] S=%+.6f stderr=%.6f minus=(%zu,%zu) violates_classical=%s (z=%.2f)\n",
                group.c_str(), c.s, c.stderr_, c.minus_pair >> 1, c.minus_pair & 1,
                c.violates_classical ? "true" : "false", c.z);
  return buf;
}

inline std::string to_table(const MsbcReport& m) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "msbc holds=%s max_discrepancy=%s (z=%.2f)\n", m.msbc_holds ? "true" : "false",
                std::isfinite(m.max_discrepancy) ? detail::fmt("%.3f", m.max_discrepancy).c_str() : "inf", m.z);
  os << buf;
  os << "  sel a b      E_sub    E_super    z-score  flag direction\n";
  for (const auto& d : m.discrepancies) {
    std::snprintf(buf, sizeof buf, "  %-3s %zu %zu %+10.5f %+10.5f %10.2f  %-4s %s\n", d.sel.str().c_str(),
                  d.pair >> 1, d.pair & 1, d.e_sub, d.e_super, d.zscore, d.flagged ? "*" : "",
                  d.flagged ? to_string(d.direction) : "");
    os << buf;
  }
  return os.str();
}

inline std::string to_table(const NoSignallingReport& r) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "no-signalling pass=%s max_deviation=%.5f (z=%.2f)\n", r.pass ? "true" : "false",
                r.max_deviation, r.z);
  os << buf;
  os << "  group      side local  P0|remote=0 P0|remote=1  deviation    z-score pass\n";
  for (const auto& s : r.entries) {
    std::snprintf(buf, sizeof buf, "  %s %c    %d      %11s %11s %10.5f %10.2f %s\n",
                  detail::pad(s.group, 9).c_str(), s.side, s.local, detail::fmt_opt(s.p_remote0, "%.5f").c_str(),
                  detail::fmt_opt(s.p_remote1, "%.5f").c_str(), s.deviation, s.zscore, s.pass ? "yes" : "NO");
    os << buf;
  }
  return os.str();
}

inline std::string to_table(const FactorizabilityReport& r) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "factorizability pass=%s max_delta=%.5f%s (z=%.2f)\n", r.pass ? "true" : "false",
                r.max_delta, r.insufficient_data ? " [insufficient data]" : "", r.z);
  os << buf;
  os << "  group     a b      count      delta    z-score pass\n";
  for (const auto& f : r.entries) {
    if (f.insufficient_data) {
      std::snprintf(buf, sizeof buf, "  %s %zu %zu %10llu insufficient data\n", detail::pad(f.group, 9).c_str(),
                    f.pair >> 1, f.pair & 1, static_cast<unsigned long long>(f.count));
    } else {
      std::snprintf(buf, sizeof buf, "  %s %zu %zu %10llu %10.5f %10.2f %s\n", detail::pad(f.group, 9).c_str(),
                    f.pair >> 1, f.pair & 1, static_cast<unsigned long long>(f.count), f.delta, f.zscore,
                    f.pass ? "yes" : "NO");
    }
    os << buf;
  }
  return os.str();
}

inline std::string to_table(const ForkReport& r) {
  std::ostringstream os;
  os << r.demo << " (" << to_string(r.kind) << "), restriction: " << r.restriction_label << '\n';
  auto line = [&](const char* name, const std::optional<double>& corr, const BinaryTable& t) {
    const auto f = t.frequencies();
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-10s n=%-10llu corr=%-10s cells(00,01,10,11)=%.4f %.4f %.4f %.4f\n", name,
                  static_cast<unsigned long long>(t.total()), detail::fmt_opt(corr, "%+.5f").c_str(), f[0], f[1],
                  f[2], f[3]);
    os << buf;
  };
  if (r.population_size > 0) line("population", r.population_corr, r.population_table);
  line("restricted", r.restricted_corr, r.restricted_table);
  if (!r.direction().empty()) os << "  direction: " << r.direction() << '\n';
  return os.str();
}

inline std::string to_table(const ForkMsbc& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "  msbc E_sub=%+.5f E_super=%+.5f z-score=%.2f flagged=%s direction=%s (z=%.2f)\n",
                m.e_sub, m.e_super, m.zscore, m.flagged ? "true" : "false", to_string(m.direction), m.z);
  return buf;
}

}  // namespace bellsel

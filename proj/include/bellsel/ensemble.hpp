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

#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bellsel/common.hpp"
#include "bellsel/quantum_core.hpp"
#include "json.hpp"

namespace bellsel {

enum class Geometry : std::uint8_t { V, W };

inline std::string_view to_string(Geometry g) { return g == Geometry::V ? "V" : "W"; }

/// Selection label carried by a run: an initial Bell state (C0..C3) or a
/// Bell-state-measurement outcome (M0..M3).
struct SelLabel {
  enum class Family : std::uint8_t { C, M };
  Family family = Family::C;
  std::uint8_t index = 0;

  static SelLabel state(BellLabel l) { return {Family::C, static_cast<std::uint8_t>(index_of(l))}; }
  static SelLabel bsm(BellLabel l) { return {Family::M, static_cast<std::uint8_t>(index_of(l))}; }

  BellLabel bell() const { return static_cast<BellLabel>(index); }

  std::string str() const { return std::string(1, family == Family::C ? 'C' : 'M') + char('0' + index); }

  static std::optional<SelLabel> parse(std::string_view text) {
    if (text.size() != 2 || text[1] < '0' || text[1] > '3') return std::nullopt;
    const auto idx = static_cast<std::uint8_t>(text[1] - '0');
    if (text[0] == 'C') return SelLabel{Family::C, idx};
    if (text[0] == 'M') return SelLabel{Family::M, idx};
    return std::nullopt;
  }

  friend auto operator<=>(const SelLabel&, const SelLabel&) = default;
};

/// One experimental run: the tuple (a, A, b, B) plus its selection label.
struct RunRecord {
  std::uint64_t run = 0;
  Bit a = 0;
  Bit b = 0;
  Bit A = 0;
  Bit B = 0;
  std::optional<SelLabel> sel;
  Geometry geometry = Geometry::V;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Provenance carried in the `#meta ` header line. Holds only fields that
/// are a pure function of the generating configuration, so identical
/// inputs serialize to identical bytes.
struct EnsembleMeta {
  std::string generator;           // e.g. "vrun", "wrun", "toy-retention"
  std::uint64_t seed = 0;
  std::string config_digest;       // hex FNV-1a of the canonical config
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t shots = 0;         // attempted runs
  std::optional<std::uint64_t> retained;  // set when records are a filtered subset
  AngleConfig angles;

  friend bool operator==(const EnsembleMeta& x, const EnsembleMeta& y) {
    return x.generator == y.generator && x.seed == y.seed && x.config_digest == y.config_digest &&
           x.config == y.config && x.shots == y.shots && x.retained == y.retained &&
           x.angles == y.angles;
  }
};

struct Ensemble {
  std::vector<RunRecord> records;
  EnsembleMeta meta;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Invariants: run ids strictly increasing; unfiltered ensembles are
  // contiguous from 0 with one record per attempted shot.
  void validate() const {
    for (std::size_t i = 1; i < records.size(); ++i)
      require(records[i].run > records[i - 1].run, "run ids must be strictly increasing");
    if (meta.retained) {
      require(*meta.retained == records.size(), "retained count does not match record count");
      require(*meta.retained <= meta.shots, "retained count exceeds attempted shots");
    } else {
      require(meta.shots == records.size(), "shot count does not match record count");
      if (!records.empty()) require(records.front().run == 0, "run ids must start at 0");
      if (!records.empty())
        require(records.back().run == records.size() - 1, "run ids must be contiguous");
    }
  }
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// nlohmann::json objects keep keys sorted, so dump() is canonical.
inline std::string config_digest(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

inline nlohmann::json to_json(const AngleConfig& angles) {
  return nlohmann::json::array({angles.a0, angles.a1, angles.b0, angles.b1});
}

inline AngleConfig angles_from_json(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 4, "angles must be an array of four numbers");
  AngleConfig a{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  a.validate();
  return a;
}

// Concatenates shards generated over consecutive run-id ranges.
inline Ensemble concat_shards(std::vector<Ensemble> shards, EnsembleMeta meta) {
  Ensemble out;
  out.meta = std::move(meta);
  std::size_t total = 0;
  for (const auto& s : shards) total += s.records.size();
  out.records.reserve(total);
  for (auto& s : shards)
    out.records.insert(out.records.end(), s.records.begin(), s.records.end());
  return out;
}

}  // namespace bellsel

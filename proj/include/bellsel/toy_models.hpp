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

#include <array>
#include <cstdint>
#include <vector>

#include "bellsel/ensemble.hpp"
#include "bellsel/experiments.hpp"
#include "bellsel/quantum_core.hpp"
#include "bellsel/rng.hpp"

namespace bellsel {

// Classical postselection models. Alice and Bob each produce a setting bit
// and a coin-toss outcome bit; Charlie either filters the 4-tuples
// (retention) or sorts every one of them into four hoppers.

enum class RetentionRule {
  kBornRule,      // keep (a,A,b,B) with probability P(A,B | a,b, target)
  kPerfectMatch,  // keep only A == B
};

struct RetentionResult {
  Ensemble retained;
  std::uint64_t attempted = 0;
  std::uint64_t retained_count = 0;

  double retained_fraction() const {
    return attempted ? static_cast<double>(retained_count) / static_cast<double>(attempted) : 0.0;
  }
};

struct HopperResult {
  std::array<Ensemble, 4> hoppers;  // indexed by C0..C3
  std::uint64_t attempted = 0;

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& h : hoppers) n += h.size();
    return n;
  }

  /// All hoppers merged back in run order: the super-ensemble, with each
  /// record's sel naming its hopper.
  Ensemble pooled() const {
    Ensemble out;
    out.meta = hoppers[0].meta;
    out.meta.retained.reset();
    out.meta.shots = attempted;
    out.meta.config.erase("hopper");
    out.meta.config_digest = config_digest(out.meta.config);
    out.records.resize(total());
    for (const auto& h : hoppers)
      for (const auto& r : h.records) out.records[r.run] = r;
    return out;
  }
};

namespace detail {

struct CoinTuple {
  Bit a, A, b, B;
  double u;
};

inline CoinTuple draw_coin_tuple(std::uint64_t seed, StreamDomain domain, std::uint64_t run) {
  CounterRng rng(seed, stream_id(domain, run));
  CoinTuple t;
  t.a = rng.coin();
  t.A = rng.coin();
  t.b = rng.coin();
  t.B = rng.coin();
  t.u = rng.uniform();
  return t;
}

}  // namespace detail

inline RetentionResult charlie_retention(std::uint64_t shots, std::uint64_t seed, BellLabel target,
                                         const AngleConfig& angles = {},
                                         RetentionRule rule = RetentionRule::kBornRule, unsigned threads = 0) {
  require(shots >= 1, "shots must be at least 1");
  angles.validate();
  const DistTable table = dist_table(bell_state(target), angles);

  struct Draw {
    RunRecord record;
    bool keep = false;
  };
  const auto draws = generate_runs(
      0, shots,
      [&](std::uint64_t run) {
        const auto t = detail::draw_coin_tuple(seed, StreamDomain::kRetention, run);
        Draw d;
        d.record = RunRecord{run, t.a, t.b, t.A, t.B, std::nullopt, Geometry::V};
        d.keep = rule == RetentionRule::kPerfectMatch ? t.A == t.B : t.u < table[2 * t.a + t.b](t.A, t.B);
        return d;
      },
      threads);

  nlohmann::json config;
  config["generator"] = "toy-retention";
  config["angles"] = to_json(angles);
  config["target"] = to_string(target);
  config["rule"] = rule == RetentionRule::kBornRule ? "qm" : "perfect-match";

  RetentionResult res;
  res.attempted = shots;
  res.retained.meta = detail::make_meta(config, seed, shots, angles);
  for (const auto& d : draws)
    if (d.keep) res.retained.records.push_back(d.record);
  res.retained_count = res.retained.records.size();
  res.retained.meta.retained = res.retained_count;
  return res;
}

/// Posterior over the initial Bell state given one run,
/// P(Ci | a,b,A,B) proportional to prior_i * P(A,B | a,b, Ci).
inline std::array<double, 4> inverse_probabilities(Bit a, Bit b, Bit A, Bit B, const AngleConfig& angles = {},
                                                   const BellWeights& prior = kUniformWeights) {
  angles.validate();
  validate_weights(prior);
  std::array<double, 4> post{};
  double total = 0.0;
  for (auto label : kBellLabels) {
    const auto i = index_of(label);
    post[i] = prior[i] * joint_probabilities(bell_state(label), angles.alice(a), angles.bob(b))(A, B);
    total += post[i];
  }
  // The uniform Bell mixture is maximally mixed, so every cell has likelihood 1/4.
  require(total > 0.0, "all-zero likelihood row");
  for (auto& p : post) p /= total;
  return post;
}

/// Sorts every uniform 4-tuple into hopper i with probability
/// P(Ci | a,b,A,B) under the uniform prior. Nothing is discarded.
inline HopperResult charlie_hoppers(std::uint64_t shots, std::uint64_t seed, const AngleConfig& angles = {},
                                    unsigned threads = 0) {
  require(shots >= 1, "shots must be at least 1");
  angles.validate();
  std::array<BellWeights, 16> cdf;
  for (Bit a = 0; a < 2; ++a)
    for (Bit b = 0; b < 2; ++b)
      for (Bit A = 0; A < 2; ++A)
        for (Bit B = 0; B < 2; ++B)
          cdf[8 * a + 4 * b + 2 * A + B] = detail::cumulative(inverse_probabilities(a, b, A, B, angles));

  const auto records = generate_runs(
      0, shots,
      [&](std::uint64_t run) {
        const auto t = detail::draw_coin_tuple(seed, StreamDomain::kHoppers, run);
        const auto hopper = detail::draw_label(cdf[8 * t.a + 4 * t.b + 2 * t.A + t.B], t.u);
        return RunRecord{run, t.a, t.b, t.A, t.B, SelLabel::state(hopper), Geometry::V};
      },
      threads);

  nlohmann::json config;
  config["generator"] = "toy-hoppers";
  config["angles"] = to_json(angles);

  HopperResult res;
  res.attempted = shots;
  for (auto label : kBellLabels) {
    auto& h = res.hoppers[index_of(label)];
    h.meta = detail::make_meta(config, seed, shots, angles);
    h.meta.config["hopper"] = to_string(label);
    h.meta.config_digest = config_digest(h.meta.config);
  }
  for (const auto& r : records) res.hoppers[r.sel->index].records.push_back(r);
  for (auto& h : res.hoppers) h.meta.retained = h.records.size();
  return res;
}

}  // namespace bellsel

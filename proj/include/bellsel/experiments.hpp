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
#include <cstdint>
#include <functional>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "bellsel/ensemble.hpp"
#include "bellsel/quantum_core.hpp"
#include "bellsel/rng.hpp"

namespace bellsel {

// Inverse-CDF draw over the fixed cell order (0,0),(0,1),(1,0),(1,1).
inline std::size_t sample_cell(const std::array<double, 4>& p, double u) {
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    if (p[c] <= 0.0) continue;
    acc += p[c];
    last_nonzero = c;
    if (u < acc) return c;
  }
  return last_nonzero;
}

// Per-setting distribution table, indexed [2*a + b].
using DistTable = std::array<JointDist, 4>;

inline DistTable dist_table(const StateVec& state, const AngleConfig& angles) {
  DistTable t;
  for (Bit a = 0; a < 2; ++a)
    for (Bit b = 0; b < 2; ++b) t[2 * a + b] = joint_probabilities(state, angles.alice(a), angles.bob(b));
  return t;
}

/// Fills `count` records for run ids [first, first + count) using up to
/// `threads` workers. Each record depends only on its run id, so any
/// partition of the range produces the same records.
template <typename MakeRecord, typename T = std::invoke_result_t<MakeRecord, std::uint64_t>>
std::vector<T> generate_runs(std::uint64_t first, std::uint64_t count, MakeRecord make, unsigned threads = 0) {
  std::vector<T> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t min_chunk = 1 << 15;
  const auto workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(count / min_chunk, 1, static_cast<std::uint64_t>(threads)));
  auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) out[i] = make(first + i);
  };
  if (workers == 1) {
    fill(0, count);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::uint64_t step = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = std::min(count, w * step), hi = std::min(count, lo + step);
    pool.emplace_back(fill, lo, hi);
  }
  return out;
}

struct FixedState {
  BellLabel label = BellLabel::C0;
};
struct RandomUniformState {};
struct WeightedState {
  BellWeights weights = kUniformWeights;
};

using StatePolicy = std::variant<FixedState, RandomUniformState, WeightedState>;

/// V-shaped experiment: one Bell pair per run, settings i.i.d. uniform bits.
struct VConfig {
  StatePolicy state_policy = FixedState{};
  AngleConfig angles;

  void validate() const {
    angles.validate();
    if (const auto* w = std::get_if<WeightedState>(&state_policy)) validate_weights(w->weights);
  }

  BellWeights weights() const {
    if (const auto* f = std::get_if<FixedState>(&state_policy)) {
      BellWeights w{};
      w[index_of(f->label)] = 1.0;
      return w;
    }
    if (const auto* w = std::get_if<WeightedState>(&state_policy)) return w->weights;
    return kUniformWeights;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["generator"] = "vrun";
    j["angles"] = bellsel::to_json(angles);
    if (const auto* f = std::get_if<FixedState>(&state_policy)) {
      j["state_policy"] = "fixed";
      j["state"] = to_string(f->label);
    } else if (std::holds_alternative<RandomUniformState>(state_policy)) {
      j["state_policy"] = "random";
    } else {
      j["state_policy"] = "weighted";
      j["weights"] = std::get<WeightedState>(state_policy).weights;
    }
    return j;
  }
};

namespace detail {

inline BellLabel draw_label(const BellWeights& cumulative, double u) {
  for (std::size_t i = 0; i < 4; ++i)
    if (u < cumulative[i]) return bell_label_from_index(i);
  for (std::size_t i = 4; i-- > 0;)
    if (i == 0 || cumulative[i] > cumulative[i - 1]) return bell_label_from_index(i);
  return BellLabel::C0;
}

inline BellWeights cumulative(const BellWeights& w) {
  BellWeights c{};
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) c[i] = (acc += w[i]);
  return c;
}

inline EnsembleMeta make_meta(const nlohmann::json& config, std::uint64_t seed, std::uint64_t shots,
                              const AngleConfig& angles) {
  EnsembleMeta m;
  m.generator = config.at("generator").get<std::string>();
  m.seed = seed;
  m.config = config;
  m.config_digest = config_digest(config);
  m.shots = shots;
  m.angles = angles;
  return m;
}

}  // namespace detail

/// Records for run ids [first, first + count) of a V-shaped experiment.
inline std::vector<RunRecord> run_v_shard(const VConfig& config, std::uint64_t seed, std::uint64_t first,
                                          std::uint64_t count, unsigned threads = 0) {
  config.validate();
  std::array<DistTable, 4> tables;
  for (auto label : kBellLabels) tables[index_of(label)] = dist_table(bell_state(label), config.angles);
  const auto cdf = detail::cumulative(config.weights());
  return generate_runs(
      first, count,
      [&](std::uint64_t run) {
        CounterRng rng(seed, stream_id(StreamDomain::kVRun, run));
        RunRecord r;
        r.run = run;
        const BellLabel label = detail::draw_label(cdf, rng.uniform());
        r.a = rng.coin();
        r.b = rng.coin();
        const auto cell = sample_cell(tables[index_of(label)][2 * r.a + r.b].cells(), rng.uniform());
        r.A = static_cast<Bit>(cell >> 1);
        r.B = static_cast<Bit>(cell & 1);
        r.sel = SelLabel::state(label);
        r.geometry = Geometry::V;
        return r;
      },
      threads);
}

inline Ensemble run_v(const VConfig& config, std::uint64_t shots, std::uint64_t seed, unsigned threads = 0) {
  require(shots >= 1, "shots must be at least 1");
  config.validate();
  Ensemble e;
  e.meta = detail::make_meta(config.to_json(), seed, shots, config.angles);
  e.records = run_v_shard(config, seed, 0, shots, threads);
  return e;
}

/// W-shaped experiment: two independent singlets (qubits 1-2 and 3-4), a
/// Bell-state measurement on qubits 2 and 3, then analyzers on qubits 1
/// (Alice) and 4 (Bob).
struct WModel {
  std::array<double, 4> outcome_probability{};
  std::array<DistTable, 4> tables;

  explicit WModel(const AngleConfig& angles) {
    angles.validate();
    const auto branches = bsm_decompose(tensor(bell_state(BellLabel::C0), bell_state(BellLabel::C0)));
    for (const auto& br : branches) {
      const auto i = index_of(br.outcome);
      outcome_probability[i] = br.probability;
      if (br.conditional) tables[i] = dist_table(*br.conditional, angles);
    }
  }
};

inline nlohmann::json w_config_json(const AngleConfig& angles) {
  nlohmann::json j;
  j["generator"] = "wrun";
  j["angles"] = to_json(angles);
  j["pairs"] = "C0xC0";
  return j;
}

inline std::vector<RunRecord> run_w_shard(const AngleConfig& angles, std::uint64_t seed, std::uint64_t first,
                                          std::uint64_t count, unsigned threads = 0) {
  const WModel model(angles);
  const auto cdf = detail::cumulative(model.outcome_probability);
  return generate_runs(
      first, count,
      [&](std::uint64_t run) {
        CounterRng rng(seed, stream_id(StreamDomain::kWRun, run));
        RunRecord r;
        r.run = run;
        const BellLabel outcome = detail::draw_label(cdf, rng.uniform());
        r.a = rng.coin();
        r.b = rng.coin();
        const auto cell = sample_cell(model.tables[index_of(outcome)][2 * r.a + r.b].cells(), rng.uniform());
        r.A = static_cast<Bit>(cell >> 1);
        r.B = static_cast<Bit>(cell & 1);
        r.sel = SelLabel::bsm(outcome);
        r.geometry = Geometry::W;
        return r;
      },
      threads);
}

inline Ensemble run_w(const AngleConfig& angles, std::uint64_t shots, std::uint64_t seed, unsigned threads = 0) {
  require(shots >= 1, "shots must be at least 1");
  angles.validate();
  Ensemble e;
  e.meta = detail::make_meta(w_config_json(angles), seed, shots, angles);
  e.records = run_w_shard(angles, seed, 0, shots, threads);
  return e;
}

/// Negative control: every run measures the same two-qubit `state`, and
/// sel is an independent uniform draw over C0..C3 that never touches the
/// outcomes.
inline Ensemble run_independent_labels(const StateVec& state, const AngleConfig& angles, std::uint64_t shots,
                                       std::uint64_t seed, unsigned threads = 0) {
  require(shots >= 1, "shots must be at least 1");
  require(state.dim() == 4, "control state must be a two-qubit state");
  angles.validate();
  const DistTable table = dist_table(state, angles);
  nlohmann::json config;
  config["generator"] = "control";
  config["angles"] = to_json(angles);
  std::vector<std::array<double, 2>> amps;
  for (const auto& z : state.amplitudes()) amps.push_back({z.real(), z.imag()});
  config["state"] = amps;
  Ensemble e;
  e.meta = detail::make_meta(config, seed, shots, angles);
  e.records = generate_runs(
      0, shots,
      [&](std::uint64_t run) {
        CounterRng rng(seed, stream_id(StreamDomain::kControl, run));
        RunRecord r;
        r.run = run;
        const auto label = bell_label_from_index(std::min<std::size_t>(3, static_cast<std::size_t>(rng.uniform() * 4)));
        r.a = rng.coin();
        r.b = rng.coin();
        const auto cell = sample_cell(table[2 * r.a + r.b].cells(), rng.uniform());
        r.A = static_cast<Bit>(cell >> 1);
        r.B = static_cast<Bit>(cell & 1);
        r.sel = SelLabel::state(label);
        return r;
      },
      threads);
  return e;
}

inline StateVec product_state_00() { return StateVec({1.0, 0.0, 0.0, 0.0}); }

}  // namespace bellsel

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
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bellsel/common.hpp"

namespace bellsel {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kAnalyticTolerance = 1e-10;

// Four-way label shared by the initial Bell states C0..C3 and the
// Bell-state-measurement outcomes M0..M3.
//   C0 = (|01> - |10>)/sqrt2   singlet
//   C1 = (|01> + |10>)/sqrt2
//   C2 = (|00> + |11>)/sqrt2
//   C3 = (|00> - |11>)/sqrt2
enum class BellLabel : std::uint8_t { C0 = 0, C1 = 1, C2 = 2, C3 = 3 };

inline constexpr std::array<BellLabel, 4> kBellLabels = {BellLabel::C0, BellLabel::C1,
                                                         BellLabel::C2, BellLabel::C3};

constexpr std::size_t index_of(BellLabel label) { return static_cast<std::size_t>(label); }

inline BellLabel bell_label_from_index(std::size_t i) {
  require(i < 4, "Bell label index out of range: " + std::to_string(i));
  return static_cast<BellLabel>(i);
}

/// Normalized amplitude vector over 2 (dim 4) or 4 (dim 16) qubits.
/// Basis index is big-endian in qubit order: for two qubits the index is
/// 2*q1 + q2, for four qubits 8*q1 + 4*q2 + 2*q3 + q4.
class StateVec {
 public:
  explicit StateVec(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
    require(amps_.size() == 4 || amps_.size() == 16,
            "state dimension must be 4 or 16, got " + std::to_string(amps_.size()));
    double norm2 = 0.0;
    for (const auto& z : amps_) {
      require(std::isfinite(z.real()) && std::isfinite(z.imag()), "state has non-finite amplitude");
      norm2 += std::norm(z);
    }
    require(std::abs(std::sqrt(norm2) - 1.0) <= kNormTolerance,
            "state is not normalized (norm " + std::to_string(std::sqrt(norm2)) + ")");
  }

  // Rescales to unit norm; rejects the zero vector.
  static StateVec normalized(std::vector<Complex> amplitudes) {
    double norm2 = 0.0;
    for (const auto& z : amplitudes) norm2 += std::norm(z);
    require(norm2 > 0.0, "cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& z : amplitudes) z *= inv;
    return StateVec(std::move(amplitudes));
  }

  std::span<const Complex> amplitudes() const { return amps_; }
  std::size_t dim() const { return amps_.size(); }
  std::size_t qubits() const { return amps_.size() == 4 ? 2 : 4; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const {
    double n2 = 0.0;
    for (const auto& z : amps_) n2 += std::norm(z);
    return std::sqrt(n2);
  }

 private:
  std::vector<Complex> amps_;
};

inline StateVec tensor(const StateVec& left, const StateVec& right) {
  require(left.dim() == 4 && right.dim() == 4, "tensor: both factors must be two-qubit states");
  std::vector<Complex> out(16);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out[i * 4 + j] = left[i] * right[j];
  return StateVec(std::move(out));
}

// Equality up to a global phase: |<u|v>| == 1 within tol.
inline bool equal_up_to_phase(const StateVec& u, const StateVec& v, double tol = kAnalyticTolerance) {
  if (u.dim() != v.dim()) return false;
  Complex overlap{};
  for (std::size_t i = 0; i < u.dim(); ++i) overlap += std::conj(u[i]) * v[i];
  return std::abs(std::abs(overlap) - 1.0) <= tol;
}

/// Analyzer angles (radians) indexed by setting bit on each side.
struct AngleConfig {
  double a0 = 0.0;
  double a1 = std::numbers::pi / 4;
  double b0 = std::numbers::pi / 8;
  double b1 = 3 * std::numbers::pi / 8;

  double alice(Bit a) const { return a ? a1 : a0; }
  double bob(Bit b) const { return b ? b1 : b0; }

  void validate() const {
    require(std::isfinite(a0) && std::isfinite(a1) && std::isfinite(b0) && std::isfinite(b1),
            "angles must be finite");
  }

  static AngleConfig chsh_optimal() { return {}; }

  friend bool operator==(const AngleConfig&, const AngleConfig&) = default;
};

/// Joint outcome distribution P(A,B) for fixed settings; cell index 2*A + B.
class JointDist {
 public:
  JointDist() = default;

  explicit JointDist(std::array<double, 4> p) : p_(p) {
    double sum = 0.0;
    for (auto& x : p_) {
      require(std::isfinite(x) && x >= -kNormTolerance && x <= 1.0 + kNormTolerance,
              "probability out of [0,1]");
      x = std::clamp(x, 0.0, 1.0);
      sum += x;
    }
    require(std::abs(sum - 1.0) <= kNormTolerance, "joint distribution does not sum to 1");
  }

  double operator()(Bit A, Bit B) const { return p_[2 * A + B]; }
  const std::array<double, 4>& cells() const { return p_; }

  double marginal_alice(Bit A) const { return p_[2 * A] + p_[2 * A + 1]; }
  double marginal_bob(Bit B) const { return p_[B] + p_[2 + B]; }

 private:
  std::array<double, 4> p_{0.25, 0.25, 0.25, 0.25};
};

inline StateVec bell_state(BellLabel label) {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (label) {
    case BellLabel::C0: return StateVec({0.0, r, -r, 0.0});
    case BellLabel::C1: return StateVec({0.0, r, r, 0.0});
    case BellLabel::C2: return StateVec({r, 0.0, 0.0, r});
    case BellLabel::C3: return StateVec({r, 0.0, 0.0, -r});
  }
  throw Error("unknown Bell label");
}

namespace detail {

// Basis vector for outcome `outcome` of a real analyzer at angle theta:
// outcome 0 -> (cos, sin), outcome 1 -> (-sin, cos).
inline std::array<double, 2> analyzer_vector(double theta, Bit outcome) {
  const double c = std::cos(theta), s = std::sin(theta);
  return outcome ? std::array<double, 2>{-s, c} : std::array<double, 2>{c, s};
}

}  // namespace detail

/// Born-rule joint outcome distribution for a two-qubit state measured by
/// real analyzers at alpha (qubit 1) and beta (qubit 2).
inline JointDist joint_probabilities(const StateVec& state, double alpha, double beta) {
  require(state.dim() == 4, "joint_probabilities needs a two-qubit state");
  require(std::isfinite(alpha) && std::isfinite(beta), "angles must be finite");
  std::array<double, 4> p{};
  for (Bit A = 0; A < 2; ++A) {
    const auto u = detail::analyzer_vector(alpha, A);
    for (Bit B = 0; B < 2; ++B) {
      const auto v = detail::analyzer_vector(beta, B);
      Complex amp{};
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) amp += u[i] * v[j] * state[2 * i + j];
      p[2 * A + B] = std::norm(amp);
    }
  }
  return JointDist(p);
}

// E = P(A = B) - P(A != B).
inline double correlator(const JointDist& dist) {
  return dist(0, 0) + dist(1, 1) - dist(0, 1) - dist(1, 0);
}

/// The four members of the CHSH family, indexed by the setting pair
/// (2*a + b) whose correlator enters with a minus sign:
///   S_k = sum_{(a,b)} E(a,b) - 2 E(pair k).
/// Each satisfies |S_k| <= 2 for any factorizable model.
inline std::array<double, 4> chsh_family(const std::array<double, 4>& correlators) {
  const double total = correlators[0] + correlators[1] + correlators[2] + correlators[3];
  std::array<double, 4> s{};
  for (std::size_t k = 0; k < 4; ++k) s[k] = total - 2.0 * correlators[k];
  return s;
}

// Index of the family member with the largest |S|; first wins on ties.
inline std::size_t chsh_best_member(const std::array<double, 4>& family) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < 4; ++k)
    if (std::abs(family[k]) > std::abs(family[best]) + 1e-15) best = k;
  return best;
}

struct ChshValue {
  double s = 0.0;              // member with the largest |S|
  std::size_t minus_pair = 3;  // 2*a + b of the negated term
  std::array<double, 4> family{};
  std::array<double, 4> correlators{};  // E(a,b) at index 2*a + b
};

inline std::array<double, 4> exact_correlators(const StateVec& state, const AngleConfig& angles) {
  angles.validate();
  std::array<double, 4> e{};
  for (Bit a = 0; a < 2; ++a)
    for (Bit b = 0; b < 2; ++b)
      e[2 * a + b] = correlator(joint_probabilities(state, angles.alice(a), angles.bob(b)));
  return e;
}

inline ChshValue chsh_evaluate(const std::array<double, 4>& correlators) {
  ChshValue v;
  v.correlators = correlators;
  v.family = chsh_family(correlators);
  v.minus_pair = chsh_best_member(v.family);
  v.s = v.family[v.minus_pair];
  return v;
}

/// Exact CHSH value: the family member with the largest magnitude.
inline double chsh_value(const StateVec& state, const AngleConfig& angles) {
  return chsh_evaluate(exact_correlators(state, angles)).s;
}

using BellWeights = std::array<double, 4>;

inline void validate_weights(const BellWeights& w) {
  double sum = 0.0;
  for (double x : w) {
    require(std::isfinite(x) && x >= 0.0, "Bell weights must be finite and non-negative");
    sum += x;
  }
  require(std::abs(sum - 1.0) <= kNormTolerance, "Bell weights must sum to 1");
}

inline constexpr BellWeights kUniformWeights = {0.25, 0.25, 0.25, 0.25};

/// Convex mixture of the four Bell-state distributions.
inline JointDist mixed_joint_probabilities(const BellWeights& weights, double alpha, double beta) {
  validate_weights(weights);
  std::array<double, 4> p{};
  for (auto label : kBellLabels) {
    const double w = weights[index_of(label)];
    if (w == 0.0) continue;
    const auto d = joint_probabilities(bell_state(label), alpha, beta);
    for (std::size_t c = 0; c < 4; ++c) p[c] += w * d.cells()[c];
  }
  double sum = p[0] + p[1] + p[2] + p[3];
  for (auto& x : p) x /= sum;
  return JointDist(p);
}

struct BsmBranch {
  BellLabel outcome;
  double probability = 0.0;
  std::optional<StateVec> conditional;  // qubits 1 and 4; absent when probability is 0
};

/// Bell-state measurement on qubits 2 and 3 of a four-qubit state. Returns
/// the four branches in label order with the normalized post-measurement
/// state of qubits 1 and 4.
inline std::vector<BsmBranch> bsm_decompose(const StateVec& state) {
  require(state.dim() == 16, "bsm_decompose needs a four-qubit state");
  std::vector<BsmBranch> branches;
  branches.reserve(4);
  for (auto label : kBellLabels) {
    const StateVec bell = bell_state(label);
    std::vector<Complex> reduced(4);
    for (std::size_t q1 = 0; q1 < 2; ++q1)
      for (std::size_t q4 = 0; q4 < 2; ++q4) {
        Complex acc{};
        for (std::size_t q2 = 0; q2 < 2; ++q2)
          for (std::size_t q3 = 0; q3 < 2; ++q3)
            acc += std::conj(bell[2 * q2 + q3]) * state[8 * q1 + 4 * q2 + 2 * q3 + q4];
        reduced[2 * q1 + q4] = acc;
      }
    double prob = 0.0;
    for (const auto& z : reduced) prob += std::norm(z);
    BsmBranch branch{label, prob, std::nullopt};
    if (prob > kNormTolerance) branch.conditional = StateVec::normalized(std::move(reduced));
    else branch.probability = 0.0;
    branches.push_back(std::move(branch));
  }
  return branches;
}

inline std::string to_string(BellLabel label) { return "C" + std::to_string(index_of(label)); }

inline std::optional<BellLabel> parse_bell_label(std::string_view text) {
  if (text.size() != 2 || (text[0] != 'c' && text[0] != 'C')) return std::nullopt;
  if (text[1] < '0' || text[1] > '3') return std::nullopt;
  return static_cast<BellLabel>(text[1] - '0');
}

}  // namespace bellsel

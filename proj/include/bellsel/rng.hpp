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

#include <cstdint>

namespace bellsel {

// Stateless 64-bit finalizer (SplitMix64 / Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based generator. Every value is a pure function of
/// (seed, stream, counter), so a stream can be opened anywhere without
/// replaying its predecessors. Generators open one stream per run id,
/// which makes sharded generation identical to a single pass.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream ^ 0xD1B54A32D192ED03ULL))) {}

  constexpr std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  constexpr bool coin() { return (next_u64() >> 63) != 0; }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Domain tags keep streams of different generators apart under one seed.
enum class StreamDomain : std::uint64_t {
  kVRun = 1,
  kWRun = 2,
  kRetention = 3,
  kHoppers = 4,
  kControl = 5,
  kCollider = 16,
  kParity = 17,
  kMice = 18,
  kMicePreselected = 19,
  kSyntheticDigits = 20,
};

constexpr std::uint64_t stream_id(StreamDomain domain, std::uint64_t index) {
  return mix64(static_cast<std::uint64_t>(domain) << 56) ^ index;
}

}  // namespace bellsel

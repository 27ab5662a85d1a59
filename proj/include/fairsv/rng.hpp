// Copyright 2026 The fairsv authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace fairsv {

// All randomness in the library flows through this header. std::mt19937_64
// has a fully specified output sequence, and the value mappings below are
// hand-rolled instead of std::*_distribution (whose output is
// implementation-defined), so a fixed seed reproduces bit-identical results
// on any conforming toolchain.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index) {
  return splitmix64(derive_seed(seed, tag) ^ splitmix64(index + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, n).
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = eng_();
    } while (r >= limit);
    return r % n;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream tags for derive_seed; distinct constants keep independent uses of
// one user-facing seed decorrelated.
namespace seed_tag {
inline constexpr std::uint64_t kTrials = 0x7472696c;
inline constexpr std::uint64_t kSynthSpeaker = 0x73796e73;
inline constexpr std::uint64_t kSynthDirection = 0x73796e64;
inline constexpr std::uint64_t kDropout = 0x64726f70;
inline constexpr std::uint64_t kInit = 0x696e6974;
inline constexpr std::uint64_t kPermMask = 0x70657273;
inline constexpr std::uint64_t kPermSubsample = 0x73756273;
inline constexpr std::uint64_t kValSplit = 0x76616c73;
inline constexpr std::uint64_t kEpoch = 0x65706f63;
inline constexpr std::uint64_t kStep = 0x73746570;
inline constexpr std::uint64_t kResample = 0x72657361;
inline constexpr std::uint64_t kDeltaRun = 0x64656c74;
}  // namespace seed_tag

}  // namespace fairsv

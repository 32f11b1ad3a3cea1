// Copyright 2026 The nulllab Authors
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

#ifndef NULLLAB_RANDOM_HPP
#define NULLLAB_RANDOM_HPP

// Counter-based random streams. Every constant below is part of the
// reproducibility contract: another implementation that uses the same
// constants produces the same trial records.
//
//   mix(z)      = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//                 z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//   seed_derive = mix(master ^ (index * 0x9E3779B97F4A7C15))
//   stream k-th output = mix(seed + (k + 1) * 0x9E3779B97F4A7C15)
//   uniform     = (output >> 11) * 2^-53

#include <cstdint>

namespace nulllab {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of trial `index` under `master`. Injective in `index` for a fixed master.
constexpr std::uint64_t seed_derive(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ (index * kGoldenGamma));
}

class Stream {
   public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // UniformRandomBitGenerator interface.
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
    constexpr std::uint64_t operator()() { return next(); }

   private:
    std::uint64_t state_;
};

}  // namespace nulllab

#endif  // NULLLAB_RANDOM_HPP

// SPDX-License-Identifier: Apache-2.0
//
// csiloc -- CSI fingerprint localization toolkit
// Copyright (C) 2026 the csiloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <type_traits>

#include "csiloc/common.hpp"

namespace csiloc {

// Counter-based pseudo-random primitives. Draws are pure functions of
// (key, counter) words, so any (location, slot) cell can be generated in
// isolation and in parallel without shared state. std::random distributions
// are deliberately avoided: their output is implementation-defined and would
// break cross-platform determinism.

namespace rng_detail {

// SplitMix64 finalizer; full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t word) {
    return mix64(key ^ mix64(word));
}

constexpr std::uint64_t hash_words(std::uint64_t key) { return key; }

template <typename... Rest>
constexpr std::uint64_t hash_words(std::uint64_t key, std::uint64_t w, Rest... rest) {
    return hash_words(combine(key, w), rest...);
}

constexpr std::uint64_t hash_string(std::uint64_t key, std::string_view s) {
    for (char c : s) key = combine(key, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return key;
}

// Uniform in [0, 1) with 53 significant bits.
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace rng_detail

// Keyed generator over counters/tags. fork() derives an independent
// substream; at(words...) produces the raw 64-bit draw for a counter tuple.
class CounterRng {
  public:
    CounterRng() = default;
    explicit CounterRng(std::uint64_t seed) : key_(rng_detail::mix64(seed)) {}

    CounterRng fork(std::string_view tag) const {
        CounterRng r;
        r.key_ = rng_detail::hash_string(key_, tag);
        return r;
    }

    template <typename... Words>
        requires(std::is_integral_v<std::remove_cvref_t<Words>> && ...)
    CounterRng fork(Words... words) const {
        CounterRng r;
        r.key_ = rng_detail::hash_words(key_, static_cast<std::uint64_t>(words)...);
        return r;
    }

    std::uint64_t key() const { return key_; }

    template <typename... Words>
    std::uint64_t bits(Words... words) const {
        return rng_detail::mix64(rng_detail::hash_words(key_, static_cast<std::uint64_t>(words)...));
    }

    template <typename... Words>
    double uniform(Words... words) const {
        return rng_detail::to_unit(bits(words...));
    }

    // Standard normal via Box-Muller on two derived uniforms.
    template <typename... Words>
    double gaussian(Words... words) const {
        const std::uint64_t b = bits(words...);
        double u1 = rng_detail::to_unit(rng_detail::mix64(b ^ 0x5851F42D4C957F2DULL));
        const double u2 = rng_detail::to_unit(rng_detail::mix64(b ^ 0x14057B7EF767814FULL));
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::uint64_t key_ = rng_detail::mix64(0);
};

// Sequential stream over a counter generator; used where draw order is part
// of the contract (shuffles, weight init, dropout masks).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : rng_(seed) {}
    explicit RngStream(const CounterRng& rng) : rng_(rng) {}

    std::uint64_t next_bits() { return rng_.bits(counter_++); }
    double next_uniform() { return rng_detail::to_unit(next_bits()); }

    double next_gaussian() { return rng_.gaussian(counter_++); }

    // Unbiased integer in [0, n) via rejection on the top bits.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw parameter_error("next_below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t b = next_bits();
            if (b >= threshold) return b % n;
        }
    }

  private:
    CounterRng rng_;
    std::uint64_t counter_ = 0;
};

// In-place Fisher-Yates shuffle with a platform-stable draw sequence.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, RngStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

// Quantize a coordinate to the 0.1 m grid used to freeze per-location draws.
inline std::int64_t quantize_coord(double meters) {
    return static_cast<std::int64_t>(std::llround(meters * 10.0));
}

}  // namespace csiloc

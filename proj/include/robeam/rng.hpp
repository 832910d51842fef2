// SPDX-License-Identifier: Apache-2.0
//
// robeam: outage-constrained robust MISO downlink beamforming by conic optimization
// Copyright (C) 2026 The robeam authors
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
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace robeam {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic sub-seed derived from (seed, id...) keys; used to key child
/// streams for independent experiment cells.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t k = seed;
    std::uint64_t mix = detail::splitmix64(k);
    for (std::uint64_t id : {a, b, c}) {
        k = mix ^ (id + 0x632be59bd9b4e019ull);
        mix = detail::splitmix64(k);
    }
    return mix;
}

/// Deterministic random stream derived from (seed, id...) keys.  Streams with
/// distinct keys are statistically independent, so parallel workers can each
/// derive their own stream and the aggregate result does not depend on
/// scheduling order.  xoshiro256++ core, splitmix64 key expansion.
class RngStream {
  public:
    RngStream() : RngStream(0, {}) {}

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
        std::uint64_t k = seed;
        std::uint64_t mix = detail::splitmix64(k);
        for (std::uint64_t id : ids) {
            k = mix ^ (id + 0x632be59bd9b4e019ull);
            mix = detail::splitmix64(k);
        }
        std::uint64_t s = mix;
        for (auto& word : state_)
            word = detail::splitmix64(s);
    }

    static RngStream derive(std::uint64_t seed, std::uint64_t a) { return {seed, {a}}; }
    static RngStream derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        return {seed, {a, b}};
    }
    static RngStream derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
        return {seed, {a, b, c}};
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double on [-a, a].
    double uniform_sym(double a) { return a * (2.0 * uniform01() - 1.0); }

    /// Standard normal via Box-Muller (pair cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Standard circular-symmetric complex normal CN(0,1): Re/Im variance 1/2 each.
    std::complex<double> cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re * 0.70710678118654752440, im * 0.70710678118654752440};
    }

    /// Vector of n i.i.d. CN(0,1) entries.
    std::vector<std::complex<double>> cgaussian_vector(int n) {
        std::vector<std::complex<double>> v(n);
        for (auto& z : v)
            z = cgaussian();
        return v;
    }

  private:
    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace robeam

/*
Copyright 2026 The ROARS Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace roars {

/// Seeded random stream. The distribution helpers are written out here (not
/// taken from <random>) so that outputs are identical across standard
/// library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] (inclusive).
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return lo + static_cast<int>(x % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Index drawn from unnormalized non-negative weights.
    std::size_t categorical(const std::vector<double> &weights);

    /// k distinct indices of [0, n), uniformly without replacement, in draw order.
    std::vector<int> sample_without_replacement(int n, int k);

  private:
    std::mt19937_64 engine_;
};

/// Derives an independent seed for sub-stream `stream` of `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace roars

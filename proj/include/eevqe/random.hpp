// Copyright 2026 The eevqe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Seeded random number helpers. All randomness in the library flows through
 * std::mt19937_64 so a seed fixes every stream within one build.
 */
#pragma once
#include <complex>
#include <cstdint>
#include <random>

namespace eevqe {

using Rng = std::mt19937_64;

[[nodiscard]] inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/**
 * @brief Seed of an independent stream derived from `base` (splitmix64 mix of
 * base and stream index), so streams sharing a base do not repeat draws.
 */
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t base,
                                               std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform draw in [lo, hi).
[[nodiscard]] inline double uniform(Rng &rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

[[nodiscard]] inline double gaussian(Rng &rng, double sigma = 1.0) {
    std::normal_distribution<double> dist(0.0, sigma);
    return dist(rng);
}

/// Complex number with independent standard normal real and imaginary parts.
[[nodiscard]] inline std::complex<double> complex_gaussian(Rng &rng) {
    const double re = gaussian(rng);
    const double im = gaussian(rng);
    return {re, im};
}

} // namespace eevqe

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
 * A pair Hamiltonian regrouped by bit-flip pattern for fast statevector
 * expectation values and products.
 *
 * Every Pauli string flips a set of bits m and multiplies by a phase that
 * depends on the source index. Summing the strings that share m gives an
 * operator O_m |k> = f_m(k) |k ^ m>. Pair terms only produce m = 0, single
 * bits and bit pairs:
 *  - m = 0: a real diagonal stored per basis state,
 *  - m = {j}: one coefficient vector per qubit,
 *  - m = {i, j}: a 2x2 table over (bit_i, bit_j).
 */
#pragma once
#include "error.hpp"
#include "hamiltonian.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace eevqe {

/// Largest register for which the per-qubit coefficient vectors are stored.
inline constexpr int pauli_sum_max_sites = 18;

struct PauliSum {
    struct PairFlip {
        std::size_t i = 0;
        std::size_t j = 0;
        /// Indexed 2 * bit_i + bit_j of the source index.
        std::array<Complex, 4> f{};
    };

    int n_sites = 0;
    std::vector<double> diag;
    /// single[j][k] for the flip of bit j.
    std::vector<std::vector<Complex>> single;
    std::vector<PairFlip> pairs;
};

namespace detail {

/// sigma_a |b> = phase * |b ^ flip(a)> for a in {I, X, Y, Z}.
[[nodiscard]] inline Complex pauli_phase(int a, int bit) {
    switch (a) {
    case 1:
        return {1.0, 0.0};
    case 2:
        return bit ? Complex{0.0, -1.0} : Complex{0.0, 1.0};
    case 3:
        return bit ? Complex{-1.0, 0.0} : Complex{1.0, 0.0};
    default:
        return {1.0, 0.0};
    }
}

[[nodiscard]] inline Matrix pauli_by_index(int a) {
    switch (a) {
    case 1:
        return pauli::X();
    case 2:
        return pauli::Y();
    case 3:
        return pauli::Z();
    default:
        return pauli::I();
    }
}

} // namespace detail

[[nodiscard]] inline PauliSum compile(const PairHamiltonian &h) {
    validate(h);
    require(h.n_sites <= pauli_sum_max_sites, ErrorKind::Unsupported,
            "Pauli form for N = " + std::to_string(h.n_sites) +
                " exceeds the supported size");
    const auto n = static_cast<std::size_t>(h.n_sites);
    const std::size_t dim = std::size_t{1} << n;
    PauliSum out;
    out.n_sites = h.n_sites;
    out.diag.assign(dim, 0.0);
    out.single.assign(n, {});
    for (const auto &t : h.terms) {
        const auto i = static_cast<std::size_t>(t.i);
        const auto j = static_cast<std::size_t>(t.j);
        // Tables over (bit_i, bit_j) for each flip class.
        std::array<Complex, 4> d{};
        std::array<Complex, 4> fi{};
        std::array<Complex, 4> fj{};
        std::array<Complex, 4> fij{};
        bool has_i = false;
        bool has_j = false;
        bool has_ij = false;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const Matrix p = kron(detail::pauli_by_index(a),
                                      detail::pauli_by_index(b));
                const double c = (p * t.matrix).trace().real() / 4.0;
                if (c == 0.0) {
                    continue;
                }
                const bool xi = a == 1 || a == 2;
                const bool xj = b == 1 || b == 2;
                auto &table = xi ? (xj ? fij : fi) : (xj ? fj : d);
                has_ij = has_ij || (xi && xj);
                has_i = has_i || (xi && !xj);
                has_j = has_j || (!xi && xj);
                for (int bi = 0; bi < 2; ++bi) {
                    for (int bj = 0; bj < 2; ++bj) {
                        table[static_cast<std::size_t>(2 * bi + bj)] +=
                            c * detail::pauli_phase(a, bi) *
                            detail::pauli_phase(b, bj);
                    }
                }
            }
        }
        for (std::size_t k = 0; k < dim; ++k) {
            const std::size_t idx = 2 * ((k >> i) & 1U) + ((k >> j) & 1U);
            out.diag[k] += d[idx].real();
        }
        if (has_i) {
            auto &v = out.single[i];
            if (v.empty()) {
                v.assign(dim, Complex{0.0, 0.0});
            }
            for (std::size_t k = 0; k < dim; ++k) {
                v[k] += fi[2 * ((k >> i) & 1U) + ((k >> j) & 1U)];
            }
        }
        if (has_j) {
            auto &v = out.single[j];
            if (v.empty()) {
                v.assign(dim, Complex{0.0, 0.0});
            }
            for (std::size_t k = 0; k < dim; ++k) {
                v[k] += fj[2 * ((k >> i) & 1U) + ((k >> j) & 1U)];
            }
        }
        if (has_ij) {
            out.pairs.push_back({i, j, fij});
        }
    }
    return out;
}

/// <psi| H |psi> using Hermiticity to visit each flipped pair once.
[[nodiscard]] inline double expectation(const PauliSum &h, const Complex *psi) {
    const auto n = static_cast<std::size_t>(h.n_sites);
    const std::size_t dim = std::size_t{1} << n;
    double e = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        e += h.diag[k] * std::norm(psi[k]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto &f = h.single[j];
        if (f.empty()) {
            continue;
        }
        const std::size_t bit = std::size_t{1} << j;
        Complex acc{0.0, 0.0};
        for (std::size_t hi = 0; hi < dim; hi += 2 * bit) {
            for (std::size_t k = hi; k < hi + bit; ++k) {
                acc += std::conj(psi[k + bit]) * f[k] * psi[k];
            }
        }
        e += 2.0 * acc.real();
    }
    for (const auto &pf : h.pairs) {
        const std::size_t bi = std::size_t{1} << pf.i;
        const std::size_t bj = std::size_t{1} << pf.j;
        const std::size_t m = bi | bj;
        Complex acc{0.0, 0.0};
        for (std::size_t k = 0; k < dim; ++k) {
            if (k & bi) {
                continue;
            }
            acc += std::conj(psi[k ^ m]) * pf.f[(k & bj) ? 1 : 0] * psi[k];
        }
        e += 2.0 * acc.real();
    }
    return e;
}

/// `out = H psi`.
inline void apply(const PauliSum &h, const Complex *psi, Complex *out) {
    const auto n = static_cast<std::size_t>(h.n_sites);
    const std::size_t dim = std::size_t{1} << n;
    for (std::size_t k = 0; k < dim; ++k) {
        out[k] = h.diag[k] * psi[k];
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto &f = h.single[j];
        if (f.empty()) {
            continue;
        }
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t k = 0; k < dim; ++k) {
            out[k ^ bit] += f[k] * psi[k];
        }
    }
    for (const auto &pf : h.pairs) {
        const std::size_t m = (std::size_t{1} << pf.i) | (std::size_t{1} << pf.j);
        for (std::size_t k = 0; k < dim; ++k) {
            out[k ^ m] += pf.f[2 * ((k >> pf.i) & 1U) + ((k >> pf.j) & 1U)] *
                          psi[k];
        }
    }
}

} // namespace eevqe

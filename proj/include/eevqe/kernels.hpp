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
 * Two-qubit kernels on raw amplitude arrays.
 *
 * Qubit q is bit q of the basis index (qubit 0 least significant). A 4x4
 * operator on the pair (p, q) is indexed by 2 * bit_p + bit_q, so p is the
 * more significant qubit of the local basis regardless of whether p < q.
 */
#pragma once
#include "tensor.hpp"

#include <array>
#include <cstddef>

namespace eevqe::kernels {

/// Row-major 4x4 operator on a qubit pair.
using Op4 = std::array<Complex, 16>;

[[nodiscard]] inline Op4 to_op4(const Matrix &m) {
    Op4 out{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out[static_cast<std::size_t>(4 * r + c)] = m(r, c);
        }
    }
    return out;
}

[[nodiscard]] inline Matrix from_op4(const Op4 &op) {
    Matrix m(4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            m(r, c) = op[static_cast<std::size_t>(4 * r + c)];
        }
    }
    return m;
}

/**
 * @brief Call `f(base)` for every basis index whose bits p and q are zero.
 */
template <class F>
inline void for_each_pair_base(std::size_t n_qubits, std::size_t p,
                               std::size_t q, F &&f) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t lo = p < q ? p : q;
    const std::size_t hi = p < q ? q : p;
    const std::size_t lo_span = std::size_t{1} << lo;
    const std::size_t hi_span = std::size_t{1} << hi;
    for (std::size_t outer = 0; outer < dim; outer += 2 * hi_span) {
        for (std::size_t mid = outer; mid < outer + hi_span;
             mid += 2 * lo_span) {
            for (std::size_t base = mid; base < mid + lo_span; ++base) {
                f(base);
            }
        }
    }
}

/// In-place `psi <- G psi` for a 4x4 gate G on (p, q).
inline void apply_op4(Complex *psi, std::size_t n_qubits, const Op4 &g,
                      std::size_t p, std::size_t q) {
    const std::size_t op = std::size_t{1} << p;
    const std::size_t oq = std::size_t{1} << q;
    for_each_pair_base(n_qubits, p, q, [&](std::size_t base) {
        const std::size_t idx[4] = {base, base + oq, base + op,
                                    base + op + oq};
        const Complex v0 = psi[idx[0]];
        const Complex v1 = psi[idx[1]];
        const Complex v2 = psi[idx[2]];
        const Complex v3 = psi[idx[3]];
        for (std::size_t r = 0; r < 4; ++r) {
            psi[idx[r]] = g[4 * r] * v0 + g[4 * r + 1] * v1 +
                          g[4 * r + 2] * v2 + g[4 * r + 3] * v3;
        }
    });
}

/// `out += h psi` for a 4x4 operator h on (p, q).
inline void accumulate_op4(const Complex *psi, Complex *out,
                           std::size_t n_qubits, const Op4 &h, std::size_t p,
                           std::size_t q) {
    const std::size_t op = std::size_t{1} << p;
    const std::size_t oq = std::size_t{1} << q;
    for_each_pair_base(n_qubits, p, q, [&](std::size_t base) {
        const std::size_t idx[4] = {base, base + oq, base + op,
                                    base + op + oq};
        const Complex v0 = psi[idx[0]];
        const Complex v1 = psi[idx[1]];
        const Complex v2 = psi[idx[2]];
        const Complex v3 = psi[idx[3]];
        for (std::size_t r = 0; r < 4; ++r) {
            out[idx[r]] += h[4 * r] * v0 + h[4 * r + 1] * v1 +
                           h[4 * r + 2] * v2 + h[4 * r + 3] * v3;
        }
    });
}

/**
 * @brief Reduced overlap matrix R[a][b] = sum_rest conj(bra_{a,rest})
 * ket_{b,rest} over the pair (p, q), so that <bra| (G x I) |ket> equals
 * sum_ab G[a][b] R[a][b].
 */
[[nodiscard]] inline Op4 pair_overlap(const Complex *bra, const Complex *ket,
                                      std::size_t n_qubits, std::size_t p,
                                      std::size_t q) {
    const std::size_t op = std::size_t{1} << p;
    const std::size_t oq = std::size_t{1} << q;
    Op4 r{};
    for_each_pair_base(n_qubits, p, q, [&](std::size_t base) {
        const std::size_t idx[4] = {base, base + oq, base + op,
                                    base + op + oq};
        Complex bv[4];
        Complex kv[4];
        for (std::size_t a = 0; a < 4; ++a) {
            bv[a] = std::conj(bra[idx[a]]);
            kv[a] = ket[idx[a]];
        }
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                r[4 * a + b] += bv[a] * kv[b];
            }
        }
    });
    return r;
}

/// <psi| h |psi> for a 4x4 operator h on (p, q).
[[nodiscard]] inline Complex expectation_op4(const Complex *psi,
                                             std::size_t n_qubits,
                                             const Op4 &h, std::size_t p,
                                             std::size_t q) {
    const Op4 rho = pair_overlap(psi, psi, n_qubits, p, q);
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < 16; ++k) {
        acc += h[k] * rho[k];
    }
    return acc;
}

} // namespace eevqe::kernels

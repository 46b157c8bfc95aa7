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
 * Two-qubit gates in Cartan form
 *
 *     u = (R_p x R_q) exp(-i k . Sigma) (R'_p x R'_q),
 *
 * with Sigma = (XX, YY, ZZ) and single-qubit rotations
 * R(psi, theta, phi) = Rz(psi) Ry(theta) Rz(phi), Rz(a) = exp(-i a Z / 2).
 * Qubit p is the more significant factor of the 4x4 basis.
 *
 * Angle layout: [0, 3) R'_p, [3, 6) R'_q, [6, 9) k, [9, 12) R_p, [12, 15) R_q.
 */
#pragma once
#include "error.hpp"
#include "tensor.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>

namespace eevqe {

using Mat2 = Eigen::Matrix<Complex, 2, 2>;
using Mat4 = Eigen::Matrix<Complex, 4, 4>;

inline constexpr std::size_t cartan_parameter_count = 15;

/// The 15 real parameters of one two-qubit gate.
using CartanAngles = std::array<double, cartan_parameter_count>;

namespace cartan {

/// Offsets of the five factors inside CartanAngles.
inline constexpr std::size_t in_p = 0;
inline constexpr std::size_t in_q = 3;
inline constexpr std::size_t interaction = 6;
inline constexpr std::size_t out_p = 9;
inline constexpr std::size_t out_q = 12;

[[nodiscard]] inline bool is_interaction(std::size_t l) {
    return l >= interaction && l < interaction + 3;
}

[[nodiscard]] inline Mat2 pauli2(int axis) {
    Mat2 m = Mat2::Zero();
    const Complex i{0.0, 1.0};
    switch (axis) {
    case 0:
        m << 0.0, 1.0, 1.0, 0.0;
        break;
    case 1:
        m << 0.0, -i, i, 0.0;
        break;
    default:
        m << 1.0, 0.0, 0.0, -1.0;
        break;
    }
    return m;
}

[[nodiscard]] inline Mat4 kron2(const Mat2 &a, const Mat2 &b) {
    Mat4 out;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
        }
    }
    return out;
}

[[nodiscard]] inline Mat2 rz(double a) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::polar(1.0, -a / 2.0);
    m(1, 1) = std::polar(1.0, a / 2.0);
    return m;
}

[[nodiscard]] inline Mat2 ry(double a) {
    const double c = std::cos(a / 2.0);
    const double s = std::sin(a / 2.0);
    Mat2 m;
    m << c, -s, s, c;
    return m;
}

[[nodiscard]] inline Mat2 euler(double psi, double theta, double phi) {
    return rz(psi) * ry(theta) * rz(phi);
}

[[nodiscard]] inline Mat2 euler(const CartanAngles &a, std::size_t offset) {
    return euler(a[offset], a[offset + 1], a[offset + 2]);
}

/// exp(-i (kx XX + ky YY + kz ZZ)); the three generators commute.
[[nodiscard]] inline Mat4 interaction_gate(double kx, double ky, double kz) {
    Mat4 out = Mat4::Identity();
    const double ks[3] = {kx, ky, kz};
    for (int a = 0; a < 3; ++a) {
        const Mat4 g = kron2(pauli2(a), pauli2(a));
        out = out * (std::cos(ks[a]) * Mat4::Identity() -
                     Complex{0.0, std::sin(ks[a])} * g);
    }
    return out;
}

/**
 * @brief Magic basis: columns |Phi+>, i|Phi->, i|Psi+>, |Psi->. Conjugating
 * by it maps SU(2) x SU(2) onto SO(4) and diagonalizes XX, YY, ZZ.
 */
[[nodiscard]] inline Mat4 magic_basis() {
    const double s = 1.0 / std::numbers::sqrt2;
    const Complex i{0.0, s};
    Mat4 b = Mat4::Zero();
    b(0, 0) = s;
    b(3, 0) = s;
    b(0, 1) = i;
    b(3, 1) = -i;
    b(1, 2) = i;
    b(2, 2) = i;
    b(1, 3) = s;
    b(2, 3) = -s;
    return b;
}

/**
 * @brief Euler angles (psi, theta, phi) of a 2x2 special unitary, exact
 * including the sign.
 */
[[nodiscard]] inline std::array<double, 3> euler_angles(const Mat2 &v) {
    const Complex a = v(0, 0);
    const Complex b = v(1, 0);
    const double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    const double sum = std::abs(a) > 1e-300 ? -2.0 * std::arg(a) : 0.0;
    const double diff = std::abs(b) > 1e-300 ? 2.0 * std::arg(b) : 0.0;
    std::array<double, 3> out{(sum + diff) / 2.0, theta, (sum - diff) / 2.0};
    // Rz(psi + 2 pi) = -Rz(psi) fixes the sign left open by the half angles.
    if ((euler(out[0], out[1], out[2]) - v).norm() >
        (euler(out[0], out[1], out[2]) + v).norm()) {
        out[0] += 2.0 * std::numbers::pi;
    }
    return out;
}

/**
 * @brief Split L = A x C with det A = det C = 1. The dominant 2x2 block fixes C
 * up to sign; A follows by projection.
 */
inline void split_local(const Mat4 &l, Mat2 &a, Mat2 &c) {
    int br = 0;
    int bc = 0;
    double best = -1.0;
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 2; ++k) {
            const double n = l.block<2, 2>(2 * r, 2 * k).norm();
            if (n > best) {
                best = n;
                br = r;
                bc = k;
            }
        }
    }
    const Mat2 blk = l.block<2, 2>(2 * br, 2 * bc);
    c = blk / std::sqrt(blk.determinant());
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 2; ++k) {
            a(r, k) = (c.adjoint() * l.block<2, 2>(2 * r, 2 * k)).trace() / 2.0;
        }
    }
}

/// Kept as U = left * interaction_gate(k) * right during canonicalization.
struct Factors {
    Mat2 left_p;
    Mat2 left_q;
    std::array<double, 3> k{};
    Mat2 right_p;
    Mat2 right_q;
};

/**
 * @brief N(k) = G N(k') G^dagger with G = g x g: move g into both sides.
 */
inline void conjugate_by(Factors &f, const Mat2 &g) {
    f.left_p = f.left_p * g;
    f.left_q = f.left_q * g;
    f.right_p = g.adjoint() * f.right_p;
    f.right_q = g.adjoint() * f.right_q;
}

/**
 * @brief Add `turns` * pi/2 to k_axis. N(k) equals N(k + pi/2 e_a)
 * (i sigma_a x i sigma_a) up to global phase, and an even number of turns
 * only changes the phase.
 */
inline void shift_component(Factors &f, int axis, long turns) {
    f.k[static_cast<std::size_t>(axis)] +=
        static_cast<double>(turns) * std::numbers::pi / 2.0;
    if (turns % 2 != 0) {
        const Mat2 s = Complex{0.0, 1.0} * pauli2(axis);
        f.right_p = s * f.right_p;
        f.right_q = s * f.right_q;
    }
}

/// Negate the two components other than `keep` via (i sigma_keep x I).
inline void flip_pair(Factors &f, int keep) {
    const Complex i{0.0, 1.0};
    const Mat2 g = i * pauli2(keep);
    for (int a = 0; a < 3; ++a) {
        if (a != keep) {
            f.k[static_cast<std::size_t>(a)] = -f.k[static_cast<std::size_t>(a)];
        }
    }
    f.left_p = f.left_p * g;
    f.right_p = g.adjoint() * f.right_p;
}

/// Exchange components a and b via the local Clifford exp(-i pi/4 sigma_c).
inline void swap_components(Factors &f, int a, int b) {
    const int c = 3 - a - b;
    const double s = 1.0 / std::numbers::sqrt2;
    const Mat2 g = s * Mat2::Identity() - Complex{0.0, s} * pauli2(c);
    std::swap(f.k[static_cast<std::size_t>(a)], f.k[static_cast<std::size_t>(b)]);
    conjugate_by(f, g);
}

/// Move k into pi/4 >= kx >= ky >= |kz|.
inline void canonicalize(Factors &f) {
    const double quarter = std::numbers::pi / 4.0;
    const double half = std::numbers::pi / 2.0;
    for (int a = 0; a < 3; ++a) {
        const double v = f.k[static_cast<std::size_t>(a)];
        const auto n = static_cast<long>(std::floor((v + quarter) / half));
        if (n != 0) {
            shift_component(f, a, -n);
        }
    }
    auto mag = [&](int a) { return std::abs(f.k[static_cast<std::size_t>(a)]); };
    if (mag(1) > mag(0)) {
        swap_components(f, 0, 1);
    }
    if (mag(2) > mag(1)) {
        swap_components(f, 1, 2);
    }
    if (mag(1) > mag(0)) {
        swap_components(f, 0, 1);
    }
    if (f.k[0] < 0.0) {
        flip_pair(f, 1);
    }
    if (f.k[1] < 0.0) {
        flip_pair(f, 0);
    }
}

} // namespace cartan

/// Rebuild the 4x4 special unitary from its angles.
[[nodiscard]] inline Mat4 su4_from_angles(const CartanAngles &a) {
    using namespace cartan;
    return kron2(euler(a, out_p), euler(a, out_q)) *
           interaction_gate(a[interaction], a[interaction + 1],
                            a[interaction + 2]) *
           kron2(euler(a, in_p), euler(a, in_q));
}

/**
 * @brief The gate and its 15 partial derivatives: entry 0 is u, entry l + 1
 * is du / d angle_l.
 */
[[nodiscard]] inline std::array<Mat4, cartan_parameter_count + 1>
su4_with_derivatives(const CartanAngles &a) {
    using namespace cartan;
    const Complex mi{0.0, -0.5};
    const Mat2 z = pauli2(2);
    const Mat2 y = pauli2(1);
    // Factors of each Euler triple and their derivatives.
    auto triple = [&](std::size_t off, std::array<Mat2, 4> &out) {
        const Mat2 z1 = rz(a[off]);
        const Mat2 y1 = ry(a[off + 1]);
        const Mat2 z2 = rz(a[off + 2]);
        out[0] = z1 * y1 * z2;
        out[1] = mi * z * out[0];
        out[2] = z1 * (mi * y * y1) * z2;
        out[3] = out[0] * (mi * z);
    };
    std::array<Mat2, 4> ip;
    std::array<Mat2, 4> iq;
    std::array<Mat2, 4> op;
    std::array<Mat2, 4> oq;
    triple(in_p, ip);
    triple(in_q, iq);
    triple(out_p, op);
    triple(out_q, oq);
    const Mat4 mid = interaction_gate(a[interaction], a[interaction + 1],
                                      a[interaction + 2]);
    const Mat4 right = kron2(ip[0], iq[0]);
    const Mat4 left = kron2(op[0], oq[0]);
    std::array<Mat4, cartan_parameter_count + 1> out;
    out[0] = left * mid * right;
    const Mat4 lm = left * mid;
    const Mat4 mr = mid * right;
    for (std::size_t e = 0; e < 3; ++e) {
        out[1 + in_p + e] = lm * kron2(ip[e + 1], iq[0]);
        out[1 + in_q + e] = lm * kron2(ip[0], iq[e + 1]);
        const Mat4 g = kron2(pauli2(static_cast<int>(e)),
                             pauli2(static_cast<int>(e)));
        out[1 + interaction + e] = left * (Complex{0.0, -1.0} * g) * mr;
        out[1 + out_p + e] = kron2(op[e + 1], oq[0]) * mr;
        out[1 + out_q + e] = kron2(op[0], oq[e + 1]) * mr;
    }
    return out;
}

/// Unitarity tolerance accepted by cartan_decompose.
inline constexpr double cartan_unitary_tol = 1e-10;

/**
 * @brief KAK decomposition of a two-qubit unitary, with k in the Weyl chamber
 * pi/4 >= kx >= ky >= |kz|. Exact up to a global phase.
 */
[[nodiscard]] inline CartanAngles cartan_decompose(const Mat4 &u_in) {
    using namespace cartan;
    const double defect = (u_in.adjoint() * u_in - Mat4::Identity()).norm();
    require(defect < cartan_unitary_tol, ErrorKind::NotUnitary,
            "cartan_decompose: input deviates from unitary by " +
                std::to_string(defect));
    const Mat4 u = u_in / std::pow(u_in.determinant(), 0.25);
    const Mat4 b = magic_basis();
    const Mat4 up = b.adjoint() * u * b;
    const Mat4 m = up.transpose() * up;

    // M is complex symmetric unitary, so its real and imaginary parts are
    // commuting real symmetric matrices with a common orthogonal eigenbasis.
    const Eigen::Matrix4d re = m.real();
    const Eigen::Matrix4d im = m.imag();
    Eigen::Matrix4d o = Eigen::Matrix4d::Identity();
    double best = 1e300;
    for (double r : {0.6180339887498949, 1.4142135623730951, -0.7320508075688772,
                     2.718281828459045, 0.3141592653589793}) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(re + r * im);
        const Eigen::Matrix4d cand = es.eigenvectors();
        const Mat4 d = cand.transpose().cast<Complex>() * m * cand.cast<Complex>();
        const double off = (d - Mat4(d.diagonal().asDiagonal())).norm();
        if (off < best) {
            best = off;
            o = cand;
        }
        if (off < 1e-13) {
            break;
        }
    }
    if (o.determinant() < 0.0) {
        o.col(0) = -o.col(0);
    }
    const Mat4 oc = o.cast<Complex>();
    const Eigen::Vector4cd d2 = (oc.transpose() * m * oc).diagonal();
    std::array<double, 4> th{};
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
        th[static_cast<std::size_t>(j)] = std::arg(d2(j)) / 2.0;
        sum += th[static_cast<std::size_t>(j)];
    }
    // det M = 1 makes the half-angle sum a multiple of pi; pick it to be 0.
    const int turns = static_cast<int>(std::lround(sum / std::numbers::pi));
    th[0] -= turns * std::numbers::pi;

    Eigen::Vector4cd dinv;
    for (int j = 0; j < 4; ++j) {
        dinv(j) = std::polar(1.0, -th[static_cast<std::size_t>(j)]);
    }
    const Mat4 k1m = up * oc * dinv.asDiagonal();
    const Mat4 left = b * k1m * b.adjoint();
    const Mat4 right = b * oc.transpose() * b.adjoint();

    // Solve -(kx sx + ky sy + kz sz) = theta with s_a the magic-basis signs.
    std::array<Eigen::Vector4d, 3> signs;
    for (int a = 0; a < 3; ++a) {
        const Mat4 g = b.adjoint() * kron2(pauli2(a), pauli2(a)) * b;
        signs[static_cast<std::size_t>(a)] = g.diagonal().real();
    }
    Factors f;
    for (int a = 0; a < 3; ++a) {
        double v = 0.0;
        for (int j = 0; j < 4; ++j) {
            v -= th[static_cast<std::size_t>(j)] *
                 signs[static_cast<std::size_t>(a)](j);
        }
        f.k[static_cast<std::size_t>(a)] = v / 4.0;
    }
    split_local(left, f.left_p, f.left_q);
    split_local(right, f.right_p, f.right_q);
    canonicalize(f);

    CartanAngles out{};
    auto put = [&](std::size_t off, const Mat2 &v) {
        const auto e = euler_angles(v / std::sqrt(v.determinant()));
        out[off] = e[0];
        out[off + 1] = e[1];
        out[off + 2] = e[2];
    };
    put(in_p, f.right_p);
    put(in_q, f.right_q);
    put(out_p, f.left_p);
    put(out_q, f.left_q);
    for (std::size_t a = 0; a < 3; ++a) {
        out[interaction + a] = f.k[a];
    }
    return out;
}

/**
 * @brief Distance between two unitaries after removing the best global
 * phase: min over phi of || a - e^{i phi} b ||_F.
 */
[[nodiscard]] inline double phase_distance(const Mat4 &a, const Mat4 &b) {
    const Complex ip = (b.adjoint() * a).trace();
    const Complex phase = std::abs(ip) > 0.0 ? ip / std::abs(ip) : Complex{1.0};
    return (a - phase * b).norm();
}

} // namespace eevqe

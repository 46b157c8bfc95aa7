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
 * Small dense factorizations: SVD, Hermitian eigendecomposition, modified
 * Gram-Schmidt unitarization, random isometries and a Lanczos ground-state
 * solver for large sparse operators.
 */
#pragma once
#include "error.hpp"
#include "random.hpp"
#include "tensor.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace eevqe {

/**
 * @brief Thin SVD `M = V * diag(S) * W`. V has orthonormal columns, W has
 * orthonormal rows, S is descending.
 */
struct SvdFactors {
    Matrix V;
    RealVector S;
    Matrix W;

    [[nodiscard]] Matrix reconstruct() const {
        return V * S.cast<Complex>().asDiagonal() * W;
    }
};

[[nodiscard]] inline SvdFactors svd(const Matrix &m) {
    require(m.rows() > 0 && m.cols() > 0, ErrorKind::InvalidArgument,
            "svd of an empty matrix");
    Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU |
                                           Eigen::ComputeThinV);
    SvdFactors out{solver.matrixU(), solver.singularValues(),
                   solver.matrixV().adjoint()};
    if (!out.V.allFinite() || !out.S.allFinite() || !out.W.allFinite()) {
        throw Error(ErrorKind::ConvergenceFailure,
                    "svd did not converge on a " + std::to_string(m.rows()) +
                        "x" + std::to_string(m.cols()) + " matrix");
    }
    return out;
}

/**
 * @brief SVD of a tensor reshaped with `row_legs` (in the given order) as
 * rows and the remaining legs (in original order) as columns.
 */
[[nodiscard]] inline SvdFactors svd(const Tensor &t,
                                    std::span<const std::size_t> row_legs) {
    require(!row_legs.empty() && row_legs.size() < t.rank(),
            ErrorKind::InvalidArgument,
            "svd row legs must be a nonempty proper subset of the legs");
    std::vector<bool> is_row(t.rank(), false);
    std::vector<std::size_t> perm(row_legs.begin(), row_legs.end());
    for (std::size_t leg : row_legs) {
        require(leg < t.rank() && !is_row[leg], ErrorKind::InvalidArgument,
                "svd row legs must be distinct and in range");
        is_row[leg] = true;
    }
    for (std::size_t k = 0; k < t.rank(); ++k) {
        if (!is_row[k]) {
            perm.push_back(k);
        }
    }
    return svd(t.permute(perm).matrix(row_legs.size()));
}

/// Eigenvalues in ascending order with the matching orthonormal columns.
struct EighResult {
    RealVector values;
    Matrix vectors;
};

/// Max-entry magnitude of `h - h^dagger`.
[[nodiscard]] inline double hermitian_defect(const Matrix &h) {
    if (h.size() == 0) {
        return 0.0;
    }
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

[[nodiscard]] inline EighResult eigh(const Matrix &h, double tol = 1e-10) {
    require(h.rows() == h.cols() && h.rows() > 0, ErrorKind::InvalidArgument,
            "eigh requires a nonempty square matrix");
    const double defect = hermitian_defect(h);
    if (!(defect < tol)) {
        throw Error(ErrorKind::NotHermitian,
                    "max |h - h^dagger| = " + std::to_string(defect));
    }
    const Matrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvergenceFailure,
                    "eigh did not converge on a " + std::to_string(h.rows()) +
                        "x" + std::to_string(h.cols()) + " matrix");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Hermitian eigendecomposition of a tensor whose leading half legs are rows.
[[nodiscard]] inline EighResult eigh(const Tensor &t, double tol = 1e-10) {
    require(t.rank() % 2 == 0, ErrorKind::InvalidArgument,
            "eigh on a tensor needs an even number of legs");
    return eigh(t.matrix(t.rank() / 2), tol);
}

/// Max-entry magnitude of `m^dagger m - I`.
[[nodiscard]] inline double isometry_defect(const Matrix &m) {
    const Matrix gram = m.adjoint() * m;
    return (gram - Matrix::Identity(gram.rows(), gram.cols()))
        .cwiseAbs()
        .maxCoeff();
}

/// Max-entry magnitude of both `U^dagger U - I` and `U U^dagger - I`.
[[nodiscard]] inline double unitary_defect(const Matrix &u) {
    const double left = isometry_defect(u);
    const Matrix right = u * u.adjoint();
    return std::max(
        left,
        (right - Matrix::Identity(right.rows(), right.cols()))
            .cwiseAbs()
            .maxCoeff());
}

/// Random matrix with i.i.d. complex Gaussian entries.
[[nodiscard]] inline Matrix complex_gaussian_matrix(Eigen::Index rows,
                                                    Eigen::Index cols,
                                                    Rng &rng) {
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            m(r, c) = complex_gaussian(rng);
        }
    }
    return m;
}

/**
 * @brief Random rows x cols isometry: Gaussian entries orthonormalized by a
 * Householder QR, with column phases fixed by the diagonal of R.
 */
[[nodiscard]] inline Matrix random_isometry_matrix(std::size_t rows,
                                                   std::size_t cols,
                                                   Rng &rng) {
    require(rows > 0 && cols > 0 && cols <= rows, ErrorKind::InvalidArgument,
            "random isometry needs 0 < cols <= rows, got " +
                std::to_string(rows) + "x" + std::to_string(cols));
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(cols);
    const Matrix g = complex_gaussian_matrix(r, c, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(r, c);
    const Matrix &packed = qr.matrixQR();
    for (Eigen::Index k = 0; k < c; ++k) {
        const Complex d = packed(k, k);
        const double mag = std::abs(d);
        if (mag > 0.0) {
            q.col(k) *= d / mag;
        }
    }
    return q;
}

/// Seeded random isometry as a (rows, cols) tensor.
[[nodiscard]] inline Tensor random_isometry(std::size_t rows, std::size_t cols,
                                            std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return Tensor::from_matrix(random_isometry_matrix(rows, cols, rng),
                               {rows, cols});
}

/// Squared norms below this count as a column that fell into the span.
inline constexpr double mgs_min_norm = 1e-8;
inline constexpr int mgs_max_redraws = 10;

/**
 * @brief Complete a partially filled square matrix to a unitary with
 * modified Gram-Schmidt.
 *
 * Columns are labelled n = c + chi_out * d. The block d = 0 (the first
 * `chi_out` columns) holds the embedded orthonormal isometry and is never
 * modified. Every later column is orthogonalized in order of n, c fastest,
 * against all earlier columns and then normalized. A column whose norm
 * collapses after projection is redrawn from `rng`.
 *
 * @param partial Square matrix; columns past `chi_out` are the seeds.
 * @param chi_out Number of embedded columns.
 * @param rng Source for redrawn columns.
 */
[[nodiscard]] inline Matrix mgs_unitarize(const Matrix &partial,
                                          std::size_t chi_out, Rng &rng) {
    const Eigen::Index dim = partial.rows();
    const auto fixed = static_cast<Eigen::Index>(chi_out);
    require(partial.cols() == dim && dim > 0, ErrorKind::InvalidArgument,
            "mgs_unitarize needs a square matrix");
    require(fixed > 0 && fixed <= dim && dim % fixed == 0,
            ErrorKind::InvalidArgument,
            "mgs_unitarize: embedded column count " + std::to_string(chi_out) +
                " must divide " + std::to_string(dim));
    const double defect = isometry_defect(partial.leftCols(fixed));
    require(defect < 1e-10, ErrorKind::InvalidArgument,
            "mgs_unitarize: embedded columns are not orthonormal (defect " +
                std::to_string(defect) + ")");

    Matrix u = partial;
    const Eigen::Index blocks = dim / fixed;
    for (Eigen::Index d = 1; d < blocks; ++d) {
        for (Eigen::Index c = 0; c < fixed; ++c) {
            const Eigen::Index n = c + fixed * d;
            for (int attempt = 0;; ++attempt) {
                Vector v = u.col(n);
                for (Eigen::Index m = 0; m < n; ++m) {
                    v -= u.col(m).dot(v) * u.col(m);
                }
                const double norm = v.norm();
                if (norm > mgs_min_norm) {
                    u.col(n) = v / norm;
                    break;
                }
                if (attempt >= mgs_max_redraws) {
                    throw Error(ErrorKind::ConvergenceFailure,
                                "mgs_unitarize: column " + std::to_string(n) +
                                    " stayed in the span after " +
                                    std::to_string(mgs_max_redraws) +
                                    " redraws");
                }
                for (Eigen::Index r = 0; r < dim; ++r) {
                    u(r, n) = complex_gaussian(rng);
                }
            }
        }
    }
    return u;
}

/**
 * @brief Embed an isometry (rows x chi_out, orthonormal columns) as the
 * leading columns of a unitary, seeding the rest with Gaussian columns.
 */
[[nodiscard]] inline Matrix unitarize_isometry(const Matrix &w, Rng &rng) {
    const Eigen::Index dim = w.rows();
    Matrix partial(dim, dim);
    partial.leftCols(w.cols()) = w;
    partial.rightCols(dim - w.cols()) =
        complex_gaussian_matrix(dim, dim - w.cols(), rng);
    return mgs_unitarize(partial, static_cast<std::size_t>(w.cols()), rng);
}

/// Linear operator y = A x acting on vectors of a fixed dimension.
using LinearOperator = std::function<void(const Vector &, Vector &)>;

struct LanczosOptions {
    /// Krylov subspace size before an explicit restart.
    Eigen::Index krylov_dim = 120;
    int max_restarts = 60;
    /// Stop when the Ritz residual norm falls below this.
    double residual_tol = 1e-9;
    std::uint64_t seed = 12345;
};

struct LanczosResult {
    double value = 0.0;
    Vector vector;
    double residual = 0.0;
    int matvecs = 0;
};

/**
 * @brief Lowest eigenpair of a Hermitian operator by restarted Lanczos with
 * full reorthogonalization. Each restart begins from the current Ritz vector.
 */
[[nodiscard]] inline LanczosResult lanczos_ground(const LinearOperator &apply,
                                                  Eigen::Index dim,
                                                  const LanczosOptions &opt = {}) {
    require(dim > 0, ErrorKind::InvalidArgument, "lanczos on empty space");
    Rng rng = make_rng(opt.seed);
    Vector start(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        start(k) = complex_gaussian(rng);
    }
    start.normalize();

    const Eigen::Index m = std::min(opt.krylov_dim, dim);
    LanczosResult result;
    Matrix basis(dim, m);
    Vector w(dim);
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        std::vector<double> alpha;
        std::vector<double> beta;
        basis.col(0) = start;
        Eigen::Index used = 0;
        RealVector ritz_coeffs;
        for (Eigen::Index j = 0; j < m; ++j) {
            apply(basis.col(j), w);
            ++result.matvecs;
            const double a = basis.col(j).dot(w).real();
            alpha.push_back(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for (int pass = 0; pass < 2; ++pass) {
                const Vector overlaps = basis.leftCols(j + 1).adjoint() * w;
                w.noalias() -= basis.leftCols(j + 1) * overlaps;
            }
            const double b = w.norm();
            used = j + 1;

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            RealVector diag = Eigen::Map<RealVector>(alpha.data(), used);
            RealVector off(used > 1 ? used - 1 : 0);
            for (Eigen::Index k = 0; k + 1 < used; ++k) {
                off(k) = beta[static_cast<std::size_t>(k)];
            }
            tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
            result.value = tri.eigenvalues()(0);
            ritz_coeffs = tri.eigenvectors().col(0);
            result.residual = b * std::abs(ritz_coeffs(used - 1));
            if (result.residual < opt.residual_tol || b < 1e-14 ||
                j + 1 == m) {
                break;
            }
            beta.push_back(b);
            basis.col(j + 1) = w / b;
        }
        start = basis.leftCols(used) * ritz_coeffs.cast<Complex>();
        start.normalize();
        if (result.residual < opt.residual_tol || used == dim) {
            result.vector = start;
            return result;
        }
    }
    throw Error(ErrorKind::ConvergenceFailure,
                "lanczos residual " + std::to_string(result.residual) +
                    " above tolerance after " +
                    std::to_string(opt.max_restarts) + " restarts");
}

} // namespace eevqe

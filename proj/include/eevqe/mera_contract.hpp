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
 * Causal-cone contractions on a MeraNetwork: operator ascension, density
 * matrix descent, per-term energies and the building blocks of environments.
 *
 * A node X with bottom wires B and top wires A lies in the cone of a term when
 * B meets the term's current support S. Passing X upward maps an operator O on
 * S to X^dagger (O x I) X on (S \ B) u A; the reduced density matrix descends
 * along the same supports.
 */
#pragma once
#include "error.hpp"
#include "hamiltonian.hpp"
#include "mera_network.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace eevqe {

/**
 * @brief Operator (or density matrix) on a set of wires. Wires are kept
 * sorted; the first wire is the most significant factor of `data`.
 */
struct WireOperator {
    std::vector<int> wires;
    std::vector<std::size_t> dims;
    RowMatrix data;

    [[nodiscard]] std::size_t total_dim() const {
        std::size_t d = 1;
        for (auto x : dims) {
            d *= x;
        }
        return d;
    }
};

namespace detail {

inline bool contains(const std::vector<int> &v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

/**
 * @brief Reorder the wires of `op` to `order` (a permutation of op.wires),
 * permuting row and column legs alike.
 */
inline RowMatrix reorder(const WireOperator &op, const std::vector<int> &order) {
    const std::size_t k = op.wires.size();
    std::vector<std::size_t> perm(2 * k);
    bool identity = true;
    for (std::size_t n = 0; n < k; ++n) {
        const auto pos = static_cast<std::size_t>(
            std::find(op.wires.begin(), op.wires.end(), order[n]) -
            op.wires.begin());
        perm[n] = pos;
        perm[n + k] = pos + k;
        identity = identity && pos == n;
    }
    if (identity) {
        return op.data;
    }
    Shape shape(op.dims.begin(), op.dims.end());
    shape.insert(shape.end(), op.dims.begin(), op.dims.end());
    RowMatrix out(op.data.rows(), op.data.cols());
    permute_into(op.data.data(), shape, perm, out.data());
    return out;
}

/// Sort the wires of an operator held in arbitrary order.
inline WireOperator sorted(std::vector<int> wires,
                           std::vector<std::size_t> dims, RowMatrix data) {
    WireOperator op{std::move(wires), std::move(dims), std::move(data)};
    std::vector<int> order = op.wires;
    std::sort(order.begin(), order.end());
    if (order == op.wires) {
        return op;
    }
    std::vector<std::size_t> new_dims(order.size());
    for (std::size_t n = 0; n < order.size(); ++n) {
        const auto pos = static_cast<std::size_t>(
            std::find(op.wires.begin(), op.wires.end(), order[n]) -
            op.wires.begin());
        new_dims[n] = op.dims[pos];
    }
    RowMatrix data2 = reorder(op, order);
    return {order, new_dims, std::move(data2)};
}

/// Trace out every wire not in `keep`.
inline WireOperator partial_trace(const WireOperator &op,
                                  const std::vector<int> &keep) {
    std::vector<int> order;
    std::vector<std::size_t> kept_dims;
    std::size_t traced = 1;
    for (std::size_t n = 0; n < op.wires.size(); ++n) {
        if (contains(keep, op.wires[n])) {
            order.push_back(op.wires[n]);
            kept_dims.push_back(op.dims[n]);
        }
    }
    std::vector<int> kept_wires = order;
    for (std::size_t n = 0; n < op.wires.size(); ++n) {
        if (!contains(keep, op.wires[n])) {
            order.push_back(op.wires[n]);
            traced *= op.dims[n];
        }
    }
    if (traced == 1) {
        return op;
    }
    const RowMatrix moved = reorder(op, order);
    std::size_t kd = 1;
    for (auto x : kept_dims) {
        kd *= x;
    }
    const auto k = static_cast<Eigen::Index>(kd);
    const auto t = static_cast<Eigen::Index>(traced);
    RowMatrix out = RowMatrix::Zero(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index x = 0; x < t; ++x) {
                acc += moved(r * t + x, c * t + x);
            }
            out(r, c) = acc;
        }
    }
    return sorted(std::move(kept_wires), std::move(kept_dims), std::move(out));
}

struct Split {
    std::vector<int> rest;
    std::vector<std::size_t> rest_dims;
    std::size_t rest_dim = 1;
};

/// Wires of `op` that are not in `exclude`, in order.
inline Split split_off(const WireOperator &op, const std::vector<int> &exclude) {
    Split s;
    for (std::size_t n = 0; n < op.wires.size(); ++n) {
        if (!contains(exclude, op.wires[n])) {
            s.rest.push_back(op.wires[n]);
            s.rest_dims.push_back(op.dims[n]);
            s.rest_dim *= op.dims[n];
        }
    }
    return s;
}

/**
 * @brief Bottom legs of a node split into those present in a support (P, in
 * node order) and the rest (E). `rows[e * dp + p]` is the node-matrix row of
 * the combined index.
 */
struct BottomSplit {
    std::vector<int> present;
    std::size_t dp = 1;
    std::size_t de = 1;
    std::vector<Eigen::Index> rows;
};

inline BottomSplit split_bottom(const MeraNode &x,
                                const std::vector<int> &support) {
    BottomSplit s;
    const std::size_t nb = x.bottom.size();
    std::vector<bool> in(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        in[k] = contains(support, x.bottom[k]);
        if (in[k]) {
            s.present.push_back(x.bottom[k]);
            s.dp *= x.bottom_leg_dim(k);
        } else {
            s.de *= x.bottom_leg_dim(k);
        }
    }
    s.rows.resize(s.dp * s.de);
    const std::size_t total = s.dp * s.de;
    std::vector<std::size_t> idx(nb, 0);
    for (std::size_t row = 0; row < total; ++row) {
        std::size_t p = 0;
        std::size_t e = 0;
        for (std::size_t k = 0; k < nb; ++k) {
            if (in[k]) {
                p = p * x.bottom_leg_dim(k) + idx[k];
            } else {
                e = e * x.bottom_leg_dim(k) + idx[k];
            }
        }
        s.rows[e * s.dp + p] = static_cast<Eigen::Index>(row);
        for (std::size_t k = nb; k-- > 0;) {
            if (++idx[k] < x.bottom_leg_dim(k)) {
                break;
            }
            idx[k] = 0;
        }
    }
    return s;
}

/// Rows of the node matrix with the E index fixed: X_e[p, a].
inline Matrix slice(const Matrix &m, const BottomSplit &s, std::size_t e) {
    Matrix out(static_cast<Eigen::Index>(s.dp), m.cols());
    for (std::size_t p = 0; p < s.dp; ++p) {
        out.row(static_cast<Eigen::Index>(p)) = m.row(s.rows[e * s.dp + p]);
    }
    return out;
}

/**
 * @brief sum_e (I x F_e) M (I x F_e)^dagger, where M has rows and columns
 * (t, u) and every F_e maps u to v.
 */
inline RowMatrix sandwich(const RowMatrix &mat, Eigen::Index dt,
                          const std::vector<Matrix> &f) {
    const Eigen::Index dv = f.front().rows();
    const Eigen::Index du = f.front().cols();
    RowMatrix out = RowMatrix::Zero(dt * dv, dt * dv);
    RowMatrix right(dt * du * dt, dv);
    for (const Matrix &fe : f) {
        // right[(t,u),(t',v')] = sum_u' M[(t,u),(t',u')] conj(F[v',u']).
        right.noalias() =
            Eigen::Map<const RowMatrix>(mat.data(), dt * du * dt, du) *
            fe.adjoint();
        for (Eigen::Index a = 0; a < dt; ++a) {
            Eigen::Map<const RowMatrix> block(right.data() + a * du * dt * dv,
                                              du, dt * dv);
            out.middleRows(a * dv, dv).noalias() += fe * block;
        }
    }
    return out;
}

} // namespace detail

/// Whether node `x` acts on any wire of `support`.
[[nodiscard]] inline bool touches(const MeraNode &x,
                                  const std::vector<int> &support) {
    for (int b : x.bottom) {
        if (detail::contains(support, b)) {
            return true;
        }
    }
    return false;
}

/**
 * @brief Ascend an operator through node x: X^dagger (O x I) X, where x must
 * touch the operator's support.
 *
 * @param m The node matrix (rows bottom, columns top).
 */
[[nodiscard]] inline WireOperator ascend(const WireOperator &op,
                                         const MeraNode &x, const Matrix &m) {
    const detail::Split t = detail::split_off(op, x.bottom);
    const detail::BottomSplit bs = detail::split_bottom(x, op.wires);
    std::vector<int> order = t.rest;
    order.insert(order.end(), bs.present.begin(), bs.present.end());
    const RowMatrix o = detail::reorder(op, order);
    std::vector<Matrix> f;
    for (std::size_t e = 0; e < bs.de; ++e) {
        f.push_back(detail::slice(m, bs, e).adjoint());
    }
    RowMatrix out =
        detail::sandwich(o, static_cast<Eigen::Index>(t.rest_dim), f);
    std::vector<int> wires = t.rest;
    std::vector<std::size_t> dims = t.rest_dims;
    for (std::size_t k = 0; k < x.top.size(); ++k) {
        wires.push_back(x.top[k]);
        dims.push_back(x.top_leg_dim(k));
    }
    return detail::sorted(std::move(wires), std::move(dims), std::move(out));
}

/**
 * @brief Descend a density matrix through node x. `rho` lives on a support
 * containing x's top wires; the result is X rho X^dagger with the bottom
 * wires outside `keep` traced out.
 */
[[nodiscard]] inline WireOperator descend(const WireOperator &rho,
                                          const MeraNode &x, const Matrix &m,
                                          const std::vector<int> &keep) {
    const detail::Split t = detail::split_off(rho, x.top);
    std::vector<int> order = t.rest;
    order.insert(order.end(), x.top.begin(), x.top.end());
    const RowMatrix r = detail::reorder(rho, order);
    const detail::BottomSplit bs = detail::split_bottom(x, keep);
    std::vector<Matrix> f;
    for (std::size_t e = 0; e < bs.de; ++e) {
        f.push_back(detail::slice(m, bs, e));
    }
    WireOperator out;
    out.wires = t.rest;
    out.dims = t.rest_dims;
    for (std::size_t k = 0; k < x.bottom.size(); ++k) {
        if (detail::contains(keep, x.bottom[k])) {
            out.wires.push_back(x.bottom[k]);
            out.dims.push_back(x.bottom_leg_dim(k));
        }
    }
    out.data = detail::sandwich(r, static_cast<Eigen::Index>(t.rest_dim), f);
    std::vector<int> kept;
    for (int w : out.wires) {
        if (detail::contains(keep, w)) {
            kept.push_back(w);
        }
    }
    if (kept.size() != out.wires.size()) {
        out = detail::partial_trace(out, kept);
    }
    return detail::sorted(std::move(out.wires), std::move(out.dims),
                          std::move(out.data));
}

/**
 * @brief Environment of node x for one term: the matrix Y (shape of x) with
 * sum_ba Y[b,a] X[b,a] = Tr(rho_above X^dagger O X), linear in X for fixed
 * conjugate copy.
 *
 * @param op Operator on the support just below x.
 * @param rho_above Density matrix on the support just above x.
 */
[[nodiscard]] inline Matrix environment_term(const WireOperator &op,
                                             const WireOperator &rho_above,
                                             const MeraNode &x,
                                             const Matrix &m) {
    const detail::Split t = detail::split_off(op, x.bottom);
    const detail::BottomSplit bs = detail::split_bottom(x, op.wires);
    std::vector<int> order = t.rest;
    order.insert(order.end(), bs.present.begin(), bs.present.end());
    const RowMatrix o = detail::reorder(op, order);
    order = t.rest;
    order.insert(order.end(), x.top.begin(), x.top.end());
    const RowMatrix r = detail::reorder(rho_above, order);
    const auto dt = static_cast<Eigen::Index>(t.rest_dim);
    const auto dp = static_cast<Eigen::Index>(bs.dp);
    const auto da = m.cols();
    Matrix upsilon(m.rows(), m.cols());
    RowMatrix z(dt * da * dt, dp);
    for (std::size_t e = 0; e < bs.de; ++e) {
        const Matrix xe = detail::slice(m, bs, e);
        // Z[(t,a),(t',p')] = sum_a' rho[(t,a),(t',a')] conj(X_e[p',a']).
        z.noalias() =
            Eigen::Map<const RowMatrix>(r.data(), dt * da * dt, da) *
            xe.adjoint();
        Eigen::Map<const RowMatrix> zm(z.data(), dt * da, dt * dp);
        Matrix acc = Matrix::Zero(da, dp);
        for (Eigen::Index a = 0; a < dt; ++a) {
            acc.noalias() +=
                zm.middleRows(a * da, da) * o.middleCols(a * dp, dp);
        }
        for (Eigen::Index p = 0; p < dp; ++p) {
            upsilon.row(bs.rows[e * bs.dp + static_cast<std::size_t>(p)]) =
                acc.col(p).transpose();
        }
    }
    return upsilon;
}

/**
 * @brief Local effective Hamiltonian of a top node for one term:
 * H'[b', b] = sum_{t,t'} rho[t,t'] O[(t',b'),(t,b)], so that
 * X^dagger H' X is the term energy.
 */
[[nodiscard]] inline Matrix top_operator_term(const WireOperator &op,
                                              const WireOperator &rho_above,
                                              const MeraNode &x) {
    const detail::Split t = detail::split_off(op, x.bottom);
    const detail::BottomSplit bs = detail::split_bottom(x, op.wires);
    std::vector<int> order = t.rest;
    order.insert(order.end(), bs.present.begin(), bs.present.end());
    const RowMatrix o = detail::reorder(op, order);
    const RowMatrix r = detail::reorder(rho_above, t.rest);
    const auto dt = static_cast<Eigen::Index>(t.rest_dim);
    const auto dp = static_cast<Eigen::Index>(bs.dp);
    Matrix hp = Matrix::Zero(dp, dp);
    for (Eigen::Index a = 0; a < dt; ++a) {
        for (Eigen::Index c = 0; c < dt; ++c) {
            const Complex w = r(a, c);
            if (w != Complex{0.0, 0.0}) {
                hp += w * o.block(c * dp, a * dp, dp, dp);
            }
        }
    }
    const auto db = static_cast<Eigen::Index>(x.bottom_dim());
    Matrix h = Matrix::Zero(db, db);
    for (std::size_t e = 0; e < bs.de; ++e) {
        for (Eigen::Index p = 0; p < dp; ++p) {
            for (Eigen::Index q = 0; q < dp; ++q) {
                h(bs.rows[e * bs.dp + static_cast<std::size_t>(p)],
                  bs.rows[e * bs.dp + static_cast<std::size_t>(q)]) = hp(p, q);
            }
        }
    }
    return h;
}

/// Tr(rho O) for operators on the same sorted support.
[[nodiscard]] inline Complex trace_product(const WireOperator &rho,
                                           const WireOperator &op) {
    require(rho.wires == op.wires, ErrorKind::InvalidArgument,
            "trace_product needs matching supports");
    // Tr(rho O) = sum_rc rho[r,c] O[c,r].
    return (rho.data.cwiseProduct(op.data.transpose())).sum();
}

[[nodiscard]] inline WireOperator term_operator(const PairTerm &t) {
    WireOperator op;
    op.wires = {t.i, t.j};
    op.dims = {2, 2};
    op.data = t.matrix;
    return op;
}

/**
 * @brief Cone of one term: the nodes that act on its support in ascending
 * order, and the support just below each of them (plus the empty support at
 * the end).
 */
struct TermCone {
    int i = 0;
    int j = 0;
    std::vector<int> nodes;
    std::vector<std::vector<int>> supports;

    /// Largest number of wires the ascending operator spans.
    [[nodiscard]] std::size_t width() const {
        std::size_t w = 0;
        for (const auto &s : supports) {
            w = std::max(w, s.size());
        }
        return w;
    }
};

/**
 * @brief Widest support the cone engine contracts. Branching layers keep both
 * wires of every unitary, so with branching near the physical level a cone can
 * cover the whole system; those networks go through the statevector instead.
 */
inline constexpr std::size_t cone_max_wires = 10;

inline void require_contractible(const TermCone &cone) {
    require(cone.width() <= cone_max_wires, ErrorKind::Unsupported,
            "cone of (" + std::to_string(cone.i) + ", " +
                std::to_string(cone.j) + ") spans " +
                std::to_string(cone.width()) + " wires (limit " +
                std::to_string(cone_max_wires) +
                "); use the statevector path");
}

[[nodiscard]] inline TermCone compute_cone(const MeraNetwork &net, int i,
                                           int j) {
    require(0 <= i && i < j && j < net.n_sites, ErrorKind::InvalidArgument,
            "cone sites (" + std::to_string(i) + ", " + std::to_string(j) +
                ") out of range");
    TermCone cone;
    cone.i = i;
    cone.j = j;
    std::vector<int> support{i, j};
    for (std::size_t n = 0; n < net.nodes.size(); ++n) {
        const MeraNode &x = net.nodes[n];
        if (!touches(x, support)) {
            continue;
        }
        cone.nodes.push_back(static_cast<int>(n));
        cone.supports.push_back(support);
        std::vector<int> next;
        for (int w : support) {
            if (!detail::contains(x.bottom, w)) {
                next.push_back(w);
            }
        }
        next.insert(next.end(), x.top.begin(), x.top.end());
        std::sort(next.begin(), next.end());
        support = std::move(next);
    }
    require(support.empty(), ErrorKind::InvalidArgument,
            "network does not close the cone of (" + std::to_string(i) + ", " +
                std::to_string(j) + ")");
    cone.supports.push_back(support);
    return cone;
}

/// Node indices of the cone of (i, j), bottom-up and left to right.
[[nodiscard]] inline std::vector<int> causal_cone(const MeraNetwork &net, int i,
                                                  int j) {
    return compute_cone(net, i, j).nodes;
}

/// Imaginary residue above which an energy signals a contraction bug.
inline constexpr double energy_imag_tol = 1e-8;

/// <Psi| h |Psi> contracting only the cone of the term.
[[nodiscard]] inline double term_energy(const MeraNetwork &net,
                                        const PairTerm &term) {
    const TermCone cone = compute_cone(net, term.i, term.j);
    require_contractible(cone);
    WireOperator op = term_operator(term);
    for (int n : cone.nodes) {
        const MeraNode &x = net.nodes[static_cast<std::size_t>(n)];
        op = ascend(op, x, x.matrix());
    }
    const Complex e = op.data(0, 0);
    if (std::abs(e.imag()) > energy_imag_tol) {
        throw Error(ErrorKind::NotHermitian,
                    "term energy has imaginary part " +
                        std::to_string(e.imag()));
    }
    return e.real();
}

/**
 * @brief Sum of term energies for the terms as stored. For a shifted
 * Hamiltonian add `h.total_shift` (or call unshifted_energy) to compare with
 * exact energies. Networks with a cone wider than cone_max_wires are
 * evaluated on the full statevector.
 */
[[nodiscard]] inline double total_energy(const MeraNetwork &net,
                                         const PairHamiltonian &h) {
    bool narrow = true;
    for (const auto &t : h.terms) {
        narrow = narrow && compute_cone(net, t.i, t.j).width() <= cone_max_wires;
    }
    if (!narrow) {
        const Vector psi = to_statevector(net);
        Vector hpsi(psi.size());
        apply_hamiltonian(h, psi.data(), hpsi.data());
        return psi.dot(hpsi).real();
    }
    double e = 0.0;
    for (const auto &t : h.terms) {
        e += term_energy(net, t);
    }
    return e;
}

[[nodiscard]] inline double unshifted_energy(const MeraNetwork &net,
                                             const PairHamiltonian &h) {
    return h.unshifted(total_energy(net, h));
}

/**
 * @brief Reduced density matrices of a term on every cone support, top down.
 * Entry k lives on cone.supports[k]; the last entry is the scalar 1.
 */
[[nodiscard]] inline std::vector<WireOperator>
descend_cone(const MeraNetwork &net, const TermCone &cone) {
    require_contractible(cone);
    const std::size_t k = cone.nodes.size();
    std::vector<WireOperator> rho(k + 1);
    rho[k].data = RowMatrix::Ones(1, 1);
    for (std::size_t n = k; n-- > 0;) {
        const MeraNode &x =
            net.nodes[static_cast<std::size_t>(cone.nodes[n])];
        rho[n] = descend(rho[n + 1], x, x.matrix(), cone.supports[n]);
    }
    return rho;
}

} // namespace eevqe

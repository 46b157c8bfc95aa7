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
 * Evenbly-Vidal sweeps over a MERA and the modified variant that diagonalizes
 * the effective Hamiltonian of each top tensor.
 *
 * Both need a Hamiltonian whose terms are negative semidefinite
 * (shift_negative). For such terms the energy is a negative semidefinite
 * quadratic form in any single node X, and replacing X by the isometry that
 * minimizes the linearized energy sum_ba Y[b,a] X[b,a] cannot raise it.
 */
#pragma once
#include "error.hpp"
#include "hamiltonian.hpp"
#include "linalg.hpp"
#include "mera_contract.hpp"
#include "mera_network.hpp"
#include "run_history.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace eevqe {

/// Term cones of a Hamiltonian on a fixed network topology.
struct ConeIndex {
    std::vector<TermCone> cones;
    /// Per node: (term index, position of the node in that term's cone).
    std::vector<std::vector<std::pair<int, int>>> members;

    [[nodiscard]] static ConeIndex build(const MeraNetwork &net,
                                         const PairHamiltonian &h) {
        ConeIndex idx;
        idx.members.resize(net.nodes.size());
        for (std::size_t t = 0; t < h.terms.size(); ++t) {
            idx.cones.push_back(
                compute_cone(net, h.terms[t].i, h.terms[t].j));
            const auto &nodes = idx.cones.back().nodes;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                idx.members[static_cast<std::size_t>(nodes[k])].emplace_back(
                    static_cast<int>(t), static_cast<int>(k));
            }
        }
        return idx;
    }
};

inline void require_shifted(const PairHamiltonian &h) {
    require(h.shifted, ErrorKind::NotShifted,
            "the update guarantee needs negative semidefinite terms; apply "
            "shift_negative first");
}

/**
 * @brief Isometry minimizing Re sum_ba Y[b,a] X[b,a]: with Y = V S W,
 * X = -conj(V W).
 */
[[nodiscard]] inline Matrix ev_solution(const Matrix &upsilon) {
    const SvdFactors f = svd(upsilon);
    return -(f.V * f.W).conjugate();
}

/// Environment of one node, same shape as the node matrix.
struct EnvironmentTensor {
    int node = 0;
    Matrix upsilon;

    /// Linearized energy sum_ba Y[b,a] X[b,a].
    [[nodiscard]] Complex linear_energy(const Matrix &x) const {
        return upsilon.cwiseProduct(x).sum();
    }
};

struct EffectiveHamiltonian {
    int node = 0;
    Matrix matrix;
};

/// Terms seen from one node: operators just below it and density matrices
/// just above it for cone terms, plus the energy of all other terms.
struct LocalTerms {
    std::vector<WireOperator> op_below;
    std::vector<WireOperator> rho_above;
    double outside_energy = 0.0;
};

[[nodiscard]] inline LocalTerms local_terms(const MeraNetwork &net,
                                            const PairHamiltonian &h,
                                            int node) {
    require(node >= 0 && node < static_cast<int>(net.nodes.size()),
            ErrorKind::InvalidArgument,
            "node " + std::to_string(node) + " not in network");
    LocalTerms out;
    for (const auto &term : h.terms) {
        const TermCone cone = compute_cone(net, term.i, term.j);
        std::size_t k = 0;
        while (k < cone.nodes.size() && cone.nodes[k] != node) {
            ++k;
        }
        if (k == cone.nodes.size()) {
            out.outside_energy += term_energy(net, term);
            continue;
        }
        WireOperator op = term_operator(term);
        for (std::size_t n = 0; n < k; ++n) {
            const MeraNode &x =
                net.nodes[static_cast<std::size_t>(cone.nodes[n])];
            op = ascend(op, x, x.matrix());
        }
        std::vector<WireOperator> rho = descend_cone(net, cone);
        out.op_below.push_back(std::move(op));
        out.rho_above.push_back(std::move(rho[k + 1]));
    }
    return out;
}

[[nodiscard]] inline EnvironmentTensor
environment(const MeraNetwork &net, const PairHamiltonian &h, int node) {
    require_shifted(h);
    const LocalTerms local = local_terms(net, h, node);
    const MeraNode &x = net.nodes[static_cast<std::size_t>(node)];
    const Matrix m = x.matrix();
    EnvironmentTensor env{node, Matrix::Zero(m.rows(), m.cols())};
    for (std::size_t t = 0; t < local.op_below.size(); ++t) {
        env.upsilon += environment_term(local.op_below[t],
                                        local.rho_above[t], x, m);
    }
    return env;
}

/// Replace the node by the Evenbly-Vidal solution of its environment.
inline void ev_update(MeraNetwork &net, const PairHamiltonian &h, int node) {
    const EnvironmentTensor env = environment(net, h, node);
    if (env.upsilon.norm() == 0.0) {
        return;
    }
    net.nodes[static_cast<std::size_t>(node)].set_matrix(
        ev_solution(env.upsilon));
}

[[nodiscard]] inline EffectiveHamiltonian
effective_hamiltonian(const MeraNetwork &net, const PairHamiltonian &h,
                      int node) {
    require(node >= 0 && node < static_cast<int>(net.nodes.size()) &&
                net.nodes[static_cast<std::size_t>(node)].kind ==
                    NodeKind::Top,
            ErrorKind::InvalidArgument,
            "effective Hamiltonian is only defined for top nodes");
    const LocalTerms local = local_terms(net, h, node);
    const MeraNode &x = net.nodes[static_cast<std::size_t>(node)];
    const auto d = static_cast<Eigen::Index>(x.bottom_dim());
    EffectiveHamiltonian eff{node, local.outside_energy * Matrix::Identity(d, d)};
    for (std::size_t t = 0; t < local.op_below.size(); ++t) {
        eff.matrix += top_operator_term(local.op_below[t], local.rho_above[t], x);
    }
    return eff;
}

/// Ground vector of a Hermitian matrix (symmetrized against round-off).
[[nodiscard]] inline std::pair<double, Vector>
lowest_eigenpair(const Matrix &h) {
    const Matrix sym = 0.5 * (h + h.adjoint());
    const EighResult e = eigh(sym);
    return {e.values(0), e.vectors.col(0)};
}

/// Replace a top tensor by the ground vector of its effective Hamiltonian.
inline double top_diag_update(MeraNetwork &net, const PairHamiltonian &h,
                              int node) {
    require_shifted(h);
    const EffectiveHamiltonian eff = effective_hamiltonian(net, h, node);
    const auto [value, vec] = lowest_eigenpair(eff.matrix);
    net.nodes[static_cast<std::size_t>(node)].set_matrix(vec);
    return value;
}

/// Node order of one sweep; must be increasing (bottom-up, left to right).
struct SweepSchedule {
    std::vector<int> nodes;
    int iterations = 0;

    [[nodiscard]] static SweepSchedule full(const MeraNetwork &net,
                                            int iterations) {
        SweepSchedule s;
        s.iterations = iterations;
        for (std::size_t n = 0; n < net.nodes.size(); ++n) {
            s.nodes.push_back(static_cast<int>(n));
        }
        return s;
    }
};

/// Reported after every single-node update inside a sweep.
struct UpdateEvent {
    int sweep = 0;
    int node = 0;
    bool diagonalized = false;
    double energy_before = 0.0;
    double energy_after = 0.0;
    /// |<X|H'|X> - E| before a top diagonalization (0 otherwise).
    double consistency_error = 0.0;
};

using UpdateObserver =
    std::function<void(const UpdateEvent &, const MeraNetwork &)>;

/**
 * @brief Sweep engine. Holds the cone index of a network and Hamiltonian and
 * keeps per-term energies current while nodes are replaced, so the energy
 * after every update is available without recontracting.
 *
 * At the start of each sweep the reduced density matrices of every term are
 * descended on all cone supports. Nodes are then updated bottom-up; the
 * density matrices above the current node are still valid because nothing
 * above it has changed yet, and each term's operator is ascended through the
 * freshly updated nodes.
 */
class MeraSweeper {
  public:
    MeraSweeper(MeraNetwork &net, const PairHamiltonian &h)
        : net_{net}, h_{h}, index_{ConeIndex::build(net, h)} {
        require_shifted(h);
    }

    /**
     * @brief Run one sweep over `schedule` and return the shifted energy.
     * @param modified Diagonalize top nodes instead of the SVD update.
     */
    double sweep(bool modified, const std::vector<int> &schedule,
                 const UpdateObserver &observer = {}) {
        for (std::size_t k = 1; k < schedule.size(); ++k) {
            require(schedule[k - 1] < schedule[k], ErrorKind::InvalidArgument,
                    "sweep schedule must be increasing");
        }
        prepare();
        std::size_t cursor = 0;
        for (std::size_t n = 0; n < net_.nodes.size(); ++n) {
            const bool scheduled =
                cursor < schedule.size() &&
                schedule[cursor] == static_cast<int>(n);
            if (scheduled) {
                ++cursor;
                update_node(static_cast<int>(n), modified, observer);
            } else {
                advance(static_cast<int>(n));
            }
        }
        ++sweeps_;
        return energy();
    }

    /// Current shifted energy.
    [[nodiscard]] double energy() const {
        double e = 0.0;
        for (double v : term_energy_) {
            e += v;
        }
        return e;
    }

    /// Shifted energy recomputed from scratch.
    [[nodiscard]] double recompute_energy() {
        prepare();
        return energy();
    }

    [[nodiscard]] const ConeIndex &index() const { return index_; }

  private:
    void prepare() {
        const std::size_t nt = h_.terms.size();
        rho_.assign(nt, {});
        op_.assign(nt, {});
        term_energy_.assign(nt, 0.0);
        for (std::size_t t = 0; t < nt; ++t) {
            rho_[t] = descend_cone(net_, index_.cones[t]);
            op_[t] = term_operator(h_.terms[t]);
            term_energy_[t] = trace_product(rho_[t][0], op_[t]).real();
        }
    }

    /// Ascend every member term through node n without changing it.
    void advance(int n) {
        const MeraNode &x = net_.nodes[static_cast<std::size_t>(n)];
        const Matrix m = x.matrix();
        for (const auto &[t, k] : index_.members[static_cast<std::size_t>(n)]) {
            const auto ti = static_cast<std::size_t>(t);
            op_[ti] = ascend(op_[ti], x, m);
        }
    }

    void update_node(int n, bool modified, const UpdateObserver &observer) {
        MeraNode &x = net_.nodes[static_cast<std::size_t>(n)];
        const auto &members = index_.members[static_cast<std::size_t>(n)];
        UpdateEvent event;
        event.sweep = sweeps_;
        event.node = n;
        event.energy_before = energy();
        if (!members.empty()) {
            const Matrix m = x.matrix();
            Matrix updated;
            if (modified && x.kind == NodeKind::Top) {
                updated = diagonalize_top(x, m, members, event);
            } else {
                Matrix upsilon = Matrix::Zero(m.rows(), m.cols());
                for (const auto &[t, k] : members) {
                    const auto ti = static_cast<std::size_t>(t);
                    upsilon += environment_term(
                        op_[ti], rho_[ti][static_cast<std::size_t>(k) + 1], x,
                        m);
                }
                updated = upsilon.norm() > 0.0 ? ev_solution(upsilon) : m;
            }
            x.set_matrix(updated);
            for (const auto &[t, k] : members) {
                const auto ti = static_cast<std::size_t>(t);
                op_[ti] = ascend(op_[ti], x, updated);
                term_energy_[ti] =
                    trace_product(rho_[ti][static_cast<std::size_t>(k) + 1],
                                  op_[ti])
                        .real();
            }
        }
        event.energy_after = energy();
        if (observer) {
            observer(event, net_);
        }
    }

    Matrix diagonalize_top(const MeraNode &x, const Matrix &m,
                           const std::vector<std::pair<int, int>> &members,
                           UpdateEvent &event) {
        const auto d = static_cast<Eigen::Index>(x.bottom_dim());
        std::vector<bool> in_cone(h_.terms.size(), false);
        Matrix eff = Matrix::Zero(d, d);
        for (const auto &[t, k] : members) {
            const auto ti = static_cast<std::size_t>(t);
            in_cone[ti] = true;
            eff += top_operator_term(
                op_[ti], rho_[ti][static_cast<std::size_t>(k) + 1], x);
        }
        double outside = 0.0;
        for (std::size_t t = 0; t < in_cone.size(); ++t) {
            if (!in_cone[t]) {
                outside += term_energy_[t];
            }
        }
        eff += outside * Matrix::Identity(d, d);
        const double current = (m.adjoint() * eff * m)(0, 0).real();
        event.diagonalized = true;
        event.consistency_error = std::abs(current - event.energy_before);
        return lowest_eigenpair(eff).second;
    }

    MeraNetwork &net_;
    const PairHamiltonian &h_;
    ConeIndex index_;
    std::vector<std::vector<WireOperator>> rho_;
    std::vector<WireOperator> op_;
    std::vector<double> term_energy_;
    int sweeps_ = 0;
};

enum class SweepRule { EvenblyVidal, Modified };

[[nodiscard]] inline std::string to_string(SweepRule r) {
    return r == SweepRule::EvenblyVidal ? "ev" : "modified-ev";
}

/**
 * @brief Run `schedule.iterations` sweeps. Row 0 is the initial energy, row t
 * the energy after sweep t.
 *
 * @param exact Exact ground energy (unshifted) used for the relative error.
 */
[[nodiscard]] inline RunHistory
run_sweeps(MeraNetwork &net, const PairHamiltonian &h,
           const SweepSchedule &schedule, SweepRule rule, double exact,
           const UpdateObserver &observer = {}) {
    const auto start = std::chrono::steady_clock::now();
    MeraSweeper sweeper(net, h);
    RunHistory hist;
    hist.set("optimizer", to_string(rule));
    hist.record(0, Stage::Mera, sweeper.recompute_energy(), h.total_shift,
                exact);
    for (int it = 1; it <= schedule.iterations; ++it) {
        const double e = sweeper.sweep(rule == SweepRule::Modified,
                                       schedule.nodes, observer);
        hist.record(it, Stage::Mera, e, h.total_shift, exact);
    }
    hist.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return hist;
}

[[nodiscard]] inline RunHistory ev_sweep(MeraNetwork &net,
                                         const PairHamiltonian &h,
                                         const SweepSchedule &schedule,
                                         double exact,
                                         const UpdateObserver &observer = {}) {
    return run_sweeps(net, h, schedule, SweepRule::EvenblyVidal, exact,
                      observer);
}

[[nodiscard]] inline RunHistory
modified_ev_sweep(MeraNetwork &net, const PairHamiltonian &h,
                  const SweepSchedule &schedule, double exact,
                  const UpdateObserver &observer = {}) {
    return run_sweeps(net, h, schedule, SweepRule::Modified, exact, observer);
}

} // namespace eevqe

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
 * VQE driver and the entangled-embedding pipeline: optimize a binary MERA,
 * encode it as a circuit, embed the circuit into a branching layout and
 * continue with VQE from that state.
 */
#pragma once
#include "circuit.hpp"
#include "error.hpp"
#include "hamiltonian.hpp"
#include "mera_network.hpp"
#include "mera_optimizer.hpp"
#include "optim.hpp"
#include "run_history.hpp"
#include "statevector.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace eevqe {

struct VqeResult {
    RunHistory history;
    std::vector<double> theta;
    Termination reason = Termination::MaxIterations;
    int evaluations = 0;
};

/**
 * @brief Minimize <Psi(theta)|H|Psi(theta)> with BFGS and adjoint gradients.
 *
 * Row t of the history holds the energy after t iterations, numbered from
 * `first_iteration`. An early stop repeats the final energy up to the budget.
 *
 * @param h Shifted Hamiltonian.
 * @param exact Exact ground energy (unshifted).
 */
[[nodiscard]] inline VqeResult run_vqe(const Circuit &c,
                                       const std::vector<double> &theta0,
                                       const PairHamiltonian &h, double exact,
                                       int max_iter, int first_iteration = 0,
                                       BfgsOptions opt = {}) {
    require(h.shifted, ErrorKind::NotShifted,
            "run_vqe reports shifted and unshifted energies; call "
            "shift_negative first");
    require(max_iter >= 0, ErrorKind::InvalidArgument,
            "VQE budget must be non-negative");
    const auto start = std::chrono::steady_clock::now();
    const CircuitObjective objective(c, h);
    opt.max_iter = max_iter;
    const OptimizeResult r = bfgs(std::cref(objective), theta0, opt);
    VqeResult out;
    out.history.set("optimizer", "bfgs");
    for (std::size_t t = 0; t < r.trace.size(); ++t) {
        out.history.record(first_iteration + static_cast<int>(t), Stage::Vqe,
                           r.trace[t], h.total_shift, exact);
    }
    for (int t = static_cast<int>(r.trace.size()); t <= max_iter; ++t) {
        out.history.record(first_iteration + t, Stage::Vqe, r.value,
                           h.total_shift, exact);
    }
    out.history.set("termination", to_string(r.reason));
    out.theta = r.x;
    out.reason = r.reason;
    out.evaluations = r.evaluations;
    out.history.wall_time = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
    return out;
}

struct PipelineConfig {
    /// Layout of the VQE ansatz.
    BranchPattern pattern;
    int mera_iters = 1000;
    int vqe_iters = 10000;
    double noise_sigma = 0.0;
    /// Seed of the initial MERA tensors.
    std::uint64_t network_seed = 0;
    std::uint64_t noise_seed = 0;
    SweepRule rule = SweepRule::Modified;
};

struct PipelineResult {
    RunHistory mera;
    VqeResult vqe;
    /// MERA rows at iterations 0..M followed by VQE rows at M..M+V.
    RunHistory combined;
    MeraNetwork network;
    Circuit circuit;
    /// |E_vqe(0) - E_mera(M)|.
    double embedding_gap = 0.0;
    /// |<MERA state | augmented circuit state>| before VQE.
    double embedding_overlap = 0.0;
};

/**
 * @brief Binary chi = 2 MERA sweeps, exact encoding, branching augmentation
 * and VQE.
 */
[[nodiscard]] inline PipelineResult eevqe_pipeline(const PairHamiltonian &h,
                                                   double exact,
                                                   const PipelineConfig &cfg) {
    require(h.shifted, ErrorKind::NotShifted,
            "the pipeline needs a shifted Hamiltonian");
    const int levels = log2_exact(h.n_sites);
    PipelineResult out;
    out.network = build_uniform(h.n_sites, 2, BranchPattern::binary(levels),
                                cfg.network_seed);
    const SweepSchedule schedule =
        SweepSchedule::full(out.network, cfg.mera_iters);
    out.mera = run_sweeps(out.network, h, schedule, cfg.rule, exact);

    const Circuit blue = encode_mera(out.network);
    out.circuit =
        augment_to_branching(blue, cfg.pattern, cfg.noise_sigma, cfg.noise_seed);
    const StateVector embedded = prepare(out.circuit);
    if (h.n_sites <= 16) {
        out.embedding_overlap =
            overlap_abs(to_statevector(out.network), embedded.amplitudes);
    }
    out.vqe = run_vqe(out.circuit, out.circuit.parameters(), h, exact,
                      cfg.vqe_iters, cfg.mera_iters);
    const double e_mera = out.mera.back().shifted_energy;
    const double e_vqe0 = out.vqe.history.rows.front().shifted_energy;
    out.embedding_gap = std::abs(e_vqe0 - e_mera);
    out.circuit.set_parameters(out.vqe.theta);

    out.combined.metadata = out.mera.metadata;
    out.combined.set("optimizer", to_string(cfg.rule) + "+bfgs");
    out.combined.set("stage_boundary", std::to_string(cfg.mera_iters));
    out.combined.append(out.mera);
    out.combined.append(out.vqe.history);
    out.combined.wall_time = out.mera.wall_time + out.vqe.history.wall_time;
    return out;
}

/// VQE on the branching layout from uniformly random angles.
[[nodiscard]] inline VqeResult random_baseline(const PairHamiltonian &h,
                                               double exact,
                                               const BranchPattern &pattern,
                                               int budget, std::uint64_t seed) {
    const Circuit c = random_branching_circuit(h.n_sites, pattern, seed);
    return run_vqe(c, c.parameters(), h, exact, budget);
}

} // namespace eevqe

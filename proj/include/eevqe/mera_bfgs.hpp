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
 * BFGS over a chi = 2 MERA through its exact circuit parameterization: every
 * node becomes one 15-angle gate and the energy is minimized over all angles.
 */
#pragma once
#include "circuit.hpp"
#include "error.hpp"
#include "hamiltonian.hpp"
#include "mera_network.hpp"
#include "optim.hpp"
#include "run_history.hpp"
#include "statevector.hpp"

#include <chrono>
#include <functional>

namespace eevqe {

/**
 * @brief Minimize the network energy with BFGS over its circuit angles and
 * write the result back into the tensors. Row 0 holds the initial energy,
 * row t the energy after iteration t. If BFGS stops early the last energy is
 * repeated up to `max_iter` so histories share one length.
 *
 * @param exact Exact ground energy (unshifted) used for the relative error.
 */
[[nodiscard]] inline RunHistory bfgs_optimize(MeraNetwork &net,
                                              const PairHamiltonian &h,
                                              int max_iter, double exact,
                                              BfgsOptions opt = {}) {
    require(h.shifted, ErrorKind::NotShifted,
            "bfgs_optimize needs a Hamiltonian with negative semidefinite "
            "terms; call shift_negative first");
    require(net.uniform_chi(2), ErrorKind::Unsupported,
            "BFGS over MERA uses the chi = 2 circuit form; larger bond "
            "dimensions need multi-qubit gate decompositions");
    const auto start = std::chrono::steady_clock::now();
    const Circuit c = encode_mera(net);
    const CircuitObjective objective(c, h);
    opt.max_iter = max_iter;
    RunHistory hist;
    hist.set("optimizer", "bfgs");
    const OptimizeResult r = bfgs(std::cref(objective), c.parameters(), opt);
    for (std::size_t t = 0; t < r.trace.size(); ++t) {
        hist.record(static_cast<int>(t), Stage::Mera, r.trace[t], h.total_shift,
                    exact);
    }
    for (int t = static_cast<int>(r.trace.size()); t <= max_iter; ++t) {
        hist.record(t, Stage::Mera, r.value, h.total_shift, exact);
    }
    hist.set("termination", to_string(r.reason));
    if (r.iterations > 0) {
        decode_into(c.with_parameters(r.x), net);
    }
    hist.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return hist;
}

} // namespace eevqe

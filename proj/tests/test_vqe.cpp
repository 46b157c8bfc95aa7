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
#include <catch_amalgamated.hpp>

#include <eevqe/circuit.hpp>
#include <eevqe/hamiltonian.hpp>
#include <eevqe/mera_bfgs.hpp>
#include <eevqe/mera_contract.hpp>
#include <eevqe/vqe.hpp>

#include <algorithm>

using namespace eevqe;
using Catch::Approx;

namespace {

bool non_increasing_delta(const RunHistory &h) {
    for (std::size_t k = 1; k < h.rows.size(); ++k) {
        if (h.rows[k].delta > h.rows[k - 1].delta + 1e-14) {
            return false;
        }
    }
    return true;
}

void check_variational(const RunHistory &h, double exact) {
    for (const auto &r : h.rows) {
        CHECK(r.energy >= exact - 1e-8 * std::abs(exact));
        CHECK(r.delta >= -1e-9);
    }
}

} // namespace

TEST_CASE("identity circuit on a |0> ground state", "[vqe]") {
    PairHamiltonian h;
    h.n_sites = 4;
    for (int i = 0; i + 1 < 4; ++i) {
        h.terms.push_back(
            {i, i + 1, -kron(pauli::Z(), pauli::I()) - kron(pauli::I(), pauli::Z()),
             0.0});
    }
    h = shift_negative(h);
    const double exact = exact_ground_energy(h);
    CHECK(exact == Approx(-6.0));
    const Circuit c = random_branching_circuit(4, BranchPattern::full(2), 1);
    const std::vector<double> zeros(c.parameter_count(), 0.0);
    const VqeResult r = run_vqe(c, zeros, h, exact, 5);
    CHECK(std::abs(r.history.rows.front().delta) < 1e-14);
    CHECK(r.reason == Termination::GradientTolerance);
    CHECK(r.history.rows.size() == 6);
}

TEST_CASE("two-site Heisenberg with one gate reaches the singlet", "[vqe]") {
    PairHamiltonian h;
    h.n_sites = 2;
    h.terms.push_back({0, 1,
                       kron(pauli::X(), pauli::X()) + kron(pauli::Y(), pauli::Y()) +
                           kron(pauli::Z(), pauli::Z()),
                       0.0});
    h = shift_negative(h);
    Circuit c;
    c.n_qubits = 2;
    c.gates.emplace_back();
    Rng rng = make_rng(2);
    std::vector<double> theta0(15);
    for (auto &a : theta0) {
        a = uniform(rng, -3.0, 3.0);
    }
    const VqeResult r = run_vqe(c, theta0, h, -3.0, 200);
    CHECK(r.history.rows.back().energy == Approx(-3.0).margin(1e-8));
    CHECK(non_increasing_delta(r.history));
    CHECK(energy(c.with_parameters(r.theta), h) + h.total_shift ==
          Approx(-3.0).margin(1e-8));
}

TEST_CASE("VQE histories", "[vqe]") {
    const PairHamiltonian h = shift_negative(gen_xyz(8, 3));
    const double exact = exact_ground_energy(h);
    const Circuit c = random_branching_circuit(8, BranchPattern::full(3), 4);
    const VqeResult r = run_vqe(c, c.parameters(), h, exact, 15, 100);
    CHECK(r.history.rows.size() == 16);
    CHECK(r.history.rows.front().iteration == 100);
    CHECK(r.history.rows.back().iteration == 115);
    CHECK(r.history.rows.front().shifted_energy ==
          Approx(energy(c, h)).epsilon(1e-12));
    for (const auto &row : r.history.rows) {
        CHECK(row.stage == Stage::Vqe);
        CHECK(row.energy == Approx(row.shifted_energy + h.total_shift));
        CHECK(row.delta == Approx((row.energy - exact) / std::abs(exact)));
    }
    CHECK(non_increasing_delta(r.history));
    check_variational(r.history, exact);
    CHECK(r.history.get("termination") == to_string(r.reason));
    CHECK(r.theta.size() == c.parameter_count());
    CHECK_THROWS_AS(run_vqe(c, c.parameters(), h, exact, -1), Error);
}

TEST_CASE("VQE needs a shifted Hamiltonian", "[vqe]") {
    const PairHamiltonian h = gen_ising(8, 1);
    const Circuit c = random_branching_circuit(8, BranchPattern::full(3), 1);
    try {
        (void)run_vqe(c, c.parameters(), h, -1.0, 3);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NotShifted);
    }
    PipelineConfig cfg;
    cfg.pattern = BranchPattern::full(3);
    CHECK_THROWS_AS(eevqe_pipeline(h, -1.0, cfg), Error);
    MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 1);
    CHECK_THROWS_AS(bfgs_optimize(net, h, 3, -1.0), Error);
}

TEST_CASE("pipeline embeds the MERA state exactly", "[vqe][pipeline]") {
    for (const auto &model : {gen_ising(8, 5), gen_xyz(8, 5), gen_heisenberg(8, 5)}) {
        const PairHamiltonian h = shift_negative(model);
        const double exact = exact_ground_energy(h);
        PipelineConfig cfg;
        cfg.pattern = BranchPattern::full(3);
        cfg.mera_iters = 20;
        cfg.vqe_iters = 20;
        cfg.network_seed = 7;
        const PipelineResult r = eevqe_pipeline(h, exact, cfg);
        CHECK(r.embedding_gap < 1e-9);
        CHECK(r.embedding_overlap == Approx(1.0).margin(1e-12));
        CHECK(r.circuit.gates.size() == 20);
        CHECK(r.combined.rows.size() == 42);
        CHECK(r.combined.get("stage_boundary") == "20");
        CHECK(r.combined.rows[20].iteration == 20);
        CHECK(r.combined.rows[20].stage == Stage::Mera);
        CHECK(r.combined.rows[21].iteration == 20);
        CHECK(r.combined.rows[21].stage == Stage::Vqe);
        CHECK(r.combined.rows.back().iteration == 40);
        CHECK(r.vqe.history.rows.back().delta <= r.mera.back().delta);
        CHECK(std::abs(r.mera.back().shifted_energy -
                       total_energy(r.network, h)) < 1e-10);
        CHECK(energy(r.circuit, h) ==
              Approx(r.vqe.history.rows.back().shifted_energy).epsilon(1e-12));
        check_variational(r.combined, exact);
    }
}

TEST_CASE("pipeline is deterministic", "[vqe][pipeline]") {
    const PairHamiltonian h = shift_negative(gen_heisenberg(8, 6));
    const double exact = exact_ground_energy(h);
    PipelineConfig cfg;
    cfg.pattern = BranchPattern::top_down(1, 3);
    cfg.mera_iters = 5;
    cfg.vqe_iters = 5;
    cfg.noise_sigma = 1e-3;
    cfg.noise_seed = 3;
    const PipelineResult a = eevqe_pipeline(h, exact, cfg);
    const PipelineResult b = eevqe_pipeline(h, exact, cfg);
    REQUIRE(a.combined.rows.size() == b.combined.rows.size());
    for (std::size_t k = 0; k < a.combined.rows.size(); ++k) {
        CHECK(a.combined.rows[k].shifted_energy == b.combined.rows[k].shifted_energy);
    }
    CHECK(a.embedding_overlap < 1.0);
}

TEST_CASE("random baseline", "[vqe]") {
    const PairHamiltonian h = shift_negative(gen_ising(8, 8));
    const double exact = exact_ground_energy(h);
    const VqeResult a = random_baseline(h, exact, BranchPattern::full(3), 10, 9);
    const VqeResult b = random_baseline(h, exact, BranchPattern::full(3), 10, 9);
    const VqeResult c = random_baseline(h, exact, BranchPattern::full(3), 10, 10);
    CHECK(a.theta == b.theta);
    CHECK(a.theta != c.theta);
    CHECK(a.history.rows.size() == 11);
    CHECK(non_increasing_delta(a.history));
    check_variational(a.history, exact);
}

TEST_CASE("BFGS over MERA angles", "[vqe][mera-bfgs]") {
    const PairHamiltonian h = shift_negative(gen_xyz(8, 11));
    const double exact = exact_ground_energy(h);
    MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 12);
    const double e0 = total_energy(net, h);
    const RunHistory hist = bfgs_optimize(net, h, 10, exact);
    CHECK(hist.rows.size() == 11);
    CHECK(hist.rows.front().shifted_energy == Approx(e0).epsilon(1e-10));
    CHECK(hist.rows.back().shifted_energy <= e0);
    CHECK(total_energy(net, h) ==
          Approx(hist.rows.back().shifted_energy).epsilon(1e-10));
    CHECK(isometric_defect(net) < 1e-12);
    CHECK(hist.get("optimizer") == "bfgs");

    MeraNetwork untouched = build_uniform(8, 2, BranchPattern::binary(3), 12);
    const MeraNetwork before = untouched;
    const RunHistory none = bfgs_optimize(untouched, h, 0, exact);
    CHECK(none.rows.size() == 1);
    for (std::size_t k = 0; k < before.nodes.size(); ++k) {
        const auto a = before.nodes[k].tensor.data();
        const auto b = untouched.nodes[k].tensor.data();
        CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }

    MeraNetwork wide = build(8, {2, 4, 4}, BranchPattern::binary(3), 1);
    try {
        (void)bfgs_optimize(wide, h, 3, exact);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::Unsupported);
    }
}

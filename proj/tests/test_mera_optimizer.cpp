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

#include <eevqe/hamiltonian.hpp>
#include <eevqe/mera_contract.hpp>
#include <eevqe/mera_optimizer.hpp>

using namespace eevqe;
using Catch::Approx;

namespace {

PairHamiltonian model(int kind, int n, std::uint64_t seed) {
    switch (kind % 3) {
    case 0:
        return shift_negative(gen_ising(n, seed));
    case 1:
        return shift_negative(gen_xyz(n, seed));
    default:
        return shift_negative(gen_heisenberg(n, seed));
    }
}

/// Sum of term energies over the terms whose cone contains `node`.
double cone_energy(const MeraNetwork &net, const PairHamiltonian &h,
                   int node) {
    double e = 0.0;
    for (const auto &t : h.terms) {
        const auto cone = causal_cone(net, t.i, t.j);
        if (std::find(cone.begin(), cone.end(), node) != cone.end()) {
            e += term_energy(net, t);
        }
    }
    return e;
}

} // namespace

TEST_CASE("optimizers refuse unshifted Hamiltonians", "[optimizer]") {
    MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 1);
    const PairHamiltonian h = gen_ising(8, 1);
    try {
        (void)environment(net, h, 0);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NotShifted);
    }
    CHECK_THROWS_AS(ev_update(net, h, 0), Error);
    CHECK_THROWS_AS(MeraSweeper(net, h), Error);
}

TEST_CASE("environment of a node outside every cone is zero",
          "[optimizer][environment]") {
    const MeraNetwork net = build(8, {2, 2, 2}, BranchPattern::binary(3), 3,
                                  NetworkInit::Random, Boundary::Open);
    PairHamiltonian h;
    h.n_sites = 8;
    h.terms.push_back({0, 1, -Matrix::Identity(4, 4), 0.0});
    h.shifted = true;
    const auto cone = causal_cone(net, 0, 1);
    for (int n = 0; n < static_cast<int>(net.nodes.size()); ++n) {
        if (std::find(cone.begin(), cone.end(), n) == cone.end()) {
            CHECK(environment(net, h, n).upsilon.norm() == 0.0);
        }
    }
}

TEST_CASE("environment is linear in the node", "[optimizer][environment]") {
    Rng pick = make_rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const bool full = trial % 2 == 1;
        const MeraNetwork net = build_uniform(
            8, 2, full ? BranchPattern::full(3) : BranchPattern::binary(3),
            static_cast<std::uint64_t>(trial));
        const PairHamiltonian h =
            model(trial, 8, static_cast<std::uint64_t>(100 + trial));
        const int node = static_cast<int>(
            std::uniform_int_distribution<std::size_t>(0, net.nodes.size() -
                                                              1)(pick));
        const EnvironmentTensor env = environment(net, h, node);
        const Matrix x = net.nodes[static_cast<std::size_t>(node)].matrix();
        CHECK(env.upsilon.rows() == x.rows());
        CHECK(env.upsilon.cols() == x.cols());
        const Complex lin = env.linear_energy(x);
        CHECK(std::abs(lin.imag()) < 1e-10);
        CHECK(lin.real() == Approx(cone_energy(net, h, node)).margin(1e-10));
    }
}

TEST_CASE("perturbing a node outside the cone leaves the environment",
          "[optimizer][environment]") {
    MeraNetwork net = build(8, {2, 2, 2}, BranchPattern::binary(3), 4,
                            NetworkInit::Random, Boundary::Open);
    PairHamiltonian h;
    h.n_sites = 8;
    h.terms.push_back({0, 1, -kron(pauli::Z(), pauli::Z()) -
                                 Matrix::Identity(4, 4),
                       0.0});
    h.shifted = true;
    const auto cone = causal_cone(net, 0, 1);
    const int node = cone.front();
    const Matrix before = environment(net, h, node).upsilon;
    Rng rng = make_rng(5);
    for (std::size_t n = 0; n < net.nodes.size(); ++n) {
        if (std::find(cone.begin(), cone.end(), static_cast<int>(n)) ==
            cone.end()) {
            auto &x = net.nodes[n];
            x.set_matrix(random_isometry_matrix(x.bottom_dim(), x.top_dim(), rng));
        }
    }
    CHECK((environment(net, h, node).upsilon - before).norm() < 1e-14);
}

TEST_CASE("ev_solution fixed point", "[optimizer][update]") {
    Rng rng = make_rng(6);
    const Matrix x = random_isometry_matrix(4, 2, rng);
    Matrix s = Matrix::Zero(2, 2);
    s(0, 0) = 2.5;
    s(1, 1) = 0.3;
    const Matrix upsilon = -x.conjugate() * s;
    CHECK((ev_solution(upsilon) - x).norm() < 1e-12);
    // The solution minimizes the linear form over isometries.
    const double best = (upsilon.cwiseProduct(ev_solution(upsilon)).sum()).real();
    for (int k = 0; k < 20; ++k) {
        const Matrix y = random_isometry_matrix(4, 2, rng);
        CHECK(best <= upsilon.cwiseProduct(y).sum().real() + 1e-12);
    }
}

TEST_CASE("single-node updates never raise the energy", "[optimizer][update]") {
    for (int kind = 0; kind < 3; ++kind) {
        MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3),
                                        static_cast<std::uint64_t>(kind));
        const PairHamiltonian h = model(kind, 8, 11);
        for (int n = 0; n < static_cast<int>(net.nodes.size()); ++n) {
            const double before = total_energy(net, h);
            ev_update(net, h, n);
            const double after = total_energy(net, h);
            CHECK(after <= before + 1e-10);
            CHECK(isometric_defect(net.nodes[static_cast<std::size_t>(n)]) <
                  1e-12);
        }
    }
}

TEST_CASE("repeated updates of one node converge", "[optimizer][update]") {
    // The linearized update is a fixed-point iteration with a linear rate;
    // on this instance it needs on the order of a thousand repeats.
    MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 9);
    const PairHamiltonian h = model(2, 8, 9);
    MeraSweeper sweeper(net, h);
    const std::vector<int> only{7};
    double prev = sweeper.recompute_energy();
    double change = 1.0;
    int repeats = 0;
    for (; repeats < 5000 && change > 1e-12; ++repeats) {
        const double e = sweeper.sweep(false, only);
        CHECK(e <= prev + 1e-12);
        change = prev - e;
        prev = e;
    }
    CHECK(change <= 1e-12);
    CHECK(repeats > 10);
}

TEST_CASE("effective Hamiltonian of the trivial network",
          "[optimizer][effective]") {
    const MeraNetwork net =
        build_uniform(4, 2, BranchPattern::binary(2), 0, NetworkInit::Trivial);
    const PairHamiltonian h = shift_negative(gen_heisenberg(4, 12));
    const int top = net.top_nodes().front();
    const Matrix eff = effective_hamiltonian(net, h, top).matrix;
    // Top wires are sites 0 and 2; sites 1 and 3 stay in |0>.
    const Matrix dense = dense_matrix(h);
    Matrix expect(4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const int ir = ((r >> 1) & 1) | ((r & 1) << 2);
            const int ic = ((c >> 1) & 1) | ((c & 1) << 2);
            expect(r, c) = dense(ir, ic);
        }
    }
    CHECK((eff - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("effective Hamiltonian consistency", "[optimizer][effective]") {
    for (const char *p : {"binary", "full", "branch1"}) {
        MeraNetwork net = build_uniform(8, 2, parse_pattern(p, 3), 13);
        const PairHamiltonian h = model(1, 8, 13);
        const double e = total_energy(net, h);
        for (int top : net.top_nodes()) {
            const Matrix eff = effective_hamiltonian(net, h, top).matrix;
            CHECK(hermitian_defect(eff) < 1e-10);
            const Matrix x = net.nodes[static_cast<std::size_t>(top)].matrix();
            CHECK((x.adjoint() * eff * x)(0, 0).real() ==
                  Approx(e).margin(1e-10));
            CHECK(eigh(0.5 * (eff + eff.adjoint())).values(0) <= e + 1e-10);
        }
        CHECK_THROWS_AS(effective_hamiltonian(net, h, 0), Error);
    }
}

TEST_CASE("top diagonalization lands on the eigenvalue",
          "[optimizer][effective]") {
    MeraNetwork net = build_uniform(8, 2, BranchPattern::full(3), 14);
    const PairHamiltonian h = model(2, 8, 14);
    for (int top : net.top_nodes()) {
        const double before = total_energy(net, h);
        const double value = top_diag_update(net, h, top);
        const double after = total_energy(net, h);
        CHECK(after == Approx(value).margin(1e-10));
        CHECK(after <= before + 1e-10);
        CHECK(isometric_defect(net.nodes[static_cast<std::size_t>(top)]) <
              1e-12);
        // Already optimal: a second diagonalization keeps the energy.
        CHECK(top_diag_update(net, h, top) == Approx(after).margin(1e-10));
    }
}

TEST_CASE("sweeps are monotone and track energies incrementally",
          "[optimizer][sweep]") {
    for (const char *p : {"binary", "full"}) {
        for (bool modified : {false, true}) {
            MeraNetwork net = build_uniform(8, 2, parse_pattern(p, 3), 15);
            const PairHamiltonian h = model(0, 8, 15);
            MeraSweeper sweeper(net, h);
            const auto schedule = SweepSchedule::full(net, 0).nodes;
            double worst_rise = 0.0;
            double worst_consistency = 0.0;
            double worst_defect = 0.0;
            int updates = 0;
            const UpdateObserver observer = [&](const UpdateEvent &ev,
                                                const MeraNetwork &n) {
                worst_rise =
                    std::max(worst_rise, ev.energy_after - ev.energy_before);
                worst_consistency =
                    std::max(worst_consistency, ev.consistency_error);
                worst_defect = std::max(
                    worst_defect,
                    isometric_defect(n.nodes[static_cast<std::size_t>(ev.node)]));
                ++updates;
            };
            double prev = sweeper.recompute_energy();
            for (int s = 0; s < 5; ++s) {
                const double e = sweeper.sweep(modified, schedule, observer);
                CHECK(e <= prev + 1e-10);
                prev = e;
                CHECK(e == Approx(total_energy(net, h)).margin(1e-10));
            }
            INFO(p << (modified ? " modified" : " plain"));
            CHECK(updates == 5 * static_cast<int>(net.nodes.size()));
            CHECK(worst_rise <= 1e-10);
            CHECK(worst_consistency <= 1e-10);
            CHECK(worst_defect <= 1e-12);
        }
    }
}

TEST_CASE("sweep histories", "[optimizer][sweep]") {
    const PairHamiltonian h = model(1, 8, 16);
    const double exact = exact_ground_energy(h);
    SECTION("ten monotone sweeps") {
        MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 16);
        const RunHistory hist =
            ev_sweep(net, h, SweepSchedule::full(net, 10), exact);
        REQUIRE(hist.rows.size() == 11);
        for (std::size_t k = 1; k < hist.rows.size(); ++k) {
            CHECK(hist.rows[k].energy <= hist.rows[k - 1].energy + 1e-10);
            CHECK(hist.rows[k].delta >= -1e-12);
        }
        CHECK(hist.rows.back().energy ==
              Approx(unshifted_energy(net, h)).margin(1e-10));
        CHECK(hist.get("optimizer") == "ev");
    }
    SECTION("empty schedule leaves the network") {
        MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 16);
        const std::string before = serialize(net);
        SweepSchedule empty;
        empty.iterations = 3;
        const RunHistory hist = ev_sweep(net, h, empty, exact);
        CHECK(serialize(net) == before);
        CHECK(hist.rows.front().energy == hist.rows.back().energy);
    }
    SECTION("schedules must be increasing") {
        MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 16);
        MeraSweeper sweeper(net, h);
        CHECK_THROWS_AS(sweeper.sweep(false, {3, 1}), Error);
    }
}

TEST_CASE("a lossless network is solved by one modified sweep",
          "[optimizer][sweep]") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        MeraNetwork net = build(8, {2, 4, 16}, BranchPattern::binary(3), seed);
        const PairHamiltonian h = shift_negative(gen_heisenberg(8, seed));
        const double exact = exact_ground_energy(h);
        const RunHistory hist =
            modified_ev_sweep(net, h, SweepSchedule::full(net, 1), exact);
        CHECK(std::abs(hist.rows.back().delta) < 1e-9);
    }
}

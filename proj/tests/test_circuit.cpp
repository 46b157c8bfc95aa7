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

#include <eevqe/cartan.hpp>
#include <eevqe/circuit.hpp>
#include <eevqe/hamiltonian.hpp>
#include <eevqe/mera_network.hpp>
#include <eevqe/statevector.hpp>

#include "oracles.hpp"

#include <numbers>

using namespace eevqe;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

Mat4 to_mat4(const Matrix &m) { return m; }

/// Euler rotation from matrix exponentials of the Pauli generators.
Matrix euler_oracle(double psi, double theta, double phi) {
    return oracle::expm_series(pauli::Z(), psi / 2.0) *
           oracle::expm_series(pauli::Y(), theta / 2.0) *
           oracle::expm_series(pauli::Z(), phi / 2.0);
}

CartanAngles random_angles(Rng &rng, double range) {
    CartanAngles a;
    for (auto &v : a) {
        v = uniform(rng, -range, range);
    }
    return a;
}

bool in_weyl_chamber(const CartanAngles &a) {
    const double kx = a[cartan::interaction];
    const double ky = a[cartan::interaction + 1];
    const double kz = a[cartan::interaction + 2];
    const double tol = 1e-12;
    return kx <= pi / 4.0 + tol && kx + tol >= ky && ky + tol >= std::abs(kz);
}

Mat4 cnot() {
    Mat4 u = Mat4::Identity();
    u(2, 2) = 0.0;
    u(3, 3) = 0.0;
    u(2, 3) = 1.0;
    u(3, 2) = 1.0;
    return u;
}

Mat4 swap_gate() {
    Mat4 u = Mat4::Zero();
    u(0, 0) = 1.0;
    u(1, 2) = 1.0;
    u(2, 1) = 1.0;
    u(3, 3) = 1.0;
    return u;
}

} // namespace

TEST_CASE("zero angles give the identity", "[cartan]") {
    CHECK((su4_from_angles(CartanAngles{}) - Mat4::Identity()).norm() < 1e-15);
}

TEST_CASE("interaction core matches the matrix exponential", "[cartan]") {
    CartanAngles a{};
    a[cartan::interaction] = pi / 4.0;
    const Matrix xx = kron(pauli::X(), pauli::X());
    CHECK((Matrix(su4_from_angles(a)) - oracle::expm_series(xx, pi / 4.0))
              .norm() < 1e-13);

    Rng rng = make_rng(3);
    for (int t = 0; t < 10; ++t) {
        const double kx = uniform(rng, -2.0, 2.0);
        const double ky = uniform(rng, -2.0, 2.0);
        const double kz = uniform(rng, -2.0, 2.0);
        const Matrix g = kx * xx + ky * kron(pauli::Y(), pauli::Y()) +
                         kz * kron(pauli::Z(), pauli::Z());
        a[cartan::interaction] = kx;
        a[cartan::interaction + 1] = ky;
        a[cartan::interaction + 2] = kz;
        CHECK((Matrix(su4_from_angles(a)) - oracle::expm_series(g, 1.0)).norm() <
              1e-12);
    }
}

TEST_CASE("local factors follow the layout and qubit order", "[cartan]") {
    Rng rng = make_rng(4);
    const CartanAngles a = random_angles(rng, pi);
    const Matrix expect =
        oracle::kron_all({euler_oracle(a[9], a[10], a[11]),
                          euler_oracle(a[12], a[13], a[14])}) *
        oracle::expm_series(
            a[6] * kron(pauli::X(), pauli::X()) +
                a[7] * kron(pauli::Y(), pauli::Y()) +
                a[8] * kron(pauli::Z(), pauli::Z()),
            1.0) *
        oracle::kron_all({euler_oracle(a[0], a[1], a[2]),
                          euler_oracle(a[3], a[4], a[5])});
    CHECK((Matrix(su4_from_angles(a)) - expect).norm() < 1e-12);

    // An input rotation on p alone acts on the more significant factor.
    CartanAngles only_p{};
    only_p[cartan::in_p + 1] = pi;
    const Mat4 u = su4_from_angles(only_p);
    CHECK(std::abs(std::abs(u(2, 0)) - 1.0) < 1e-14);
}

TEST_CASE("random angles give special unitaries", "[cartan]") {
    Rng rng = make_rng(5);
    for (int t = 0; t < 100; ++t) {
        const Mat4 u = su4_from_angles(random_angles(rng, 4.0));
        CHECK((u.adjoint() * u - Mat4::Identity()).norm() < 1e-12);
        CHECK(std::abs(u.determinant() - Complex{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("derivatives of the gate match finite differences", "[cartan]") {
    Rng rng = make_rng(6);
    const CartanAngles a = random_angles(rng, pi);
    const auto mats = su4_with_derivatives(a);
    CHECK((mats[0] - su4_from_angles(a)).norm() < 1e-14);
    const double h = 1e-6;
    for (std::size_t l = 0; l < cartan_parameter_count; ++l) {
        CartanAngles up = a;
        CartanAngles down = a;
        up[l] += h;
        down[l] -= h;
        const Mat4 fd = (su4_from_angles(up) - su4_from_angles(down)) / (2 * h);
        CHECK((fd - mats[l + 1]).norm() < 1e-8);
    }
}

TEST_CASE("magic basis turns local gates real", "[cartan]") {
    Rng rng = make_rng(7);
    const Mat4 b = cartan::magic_basis();
    CHECK((b.adjoint() * b - Mat4::Identity()).norm() < 1e-15);
    for (int t = 0; t < 20; ++t) {
        const Mat4 l = cartan::kron2(
            cartan::euler(uniform(rng, -pi, pi), uniform(rng, -pi, pi),
                          uniform(rng, -pi, pi)),
            cartan::euler(uniform(rng, -pi, pi), uniform(rng, -pi, pi),
                          uniform(rng, -pi, pi)));
        CHECK((b.adjoint() * l * b).imag().norm() < 1e-14);
    }
}

TEST_CASE("decomposition of known gates", "[cartan]") {
    SECTION("identity") {
        const CartanAngles a = cartan_decompose(Mat4::Identity());
        for (double v : a) {
            CHECK(std::abs(v) < 1e-12);
        }
    }
    SECTION("CNOT") {
        const CartanAngles a = cartan_decompose(cnot());
        CHECK(a[cartan::interaction] == Approx(pi / 4.0).margin(1e-12));
        CHECK(std::abs(a[cartan::interaction + 1]) < 1e-12);
        CHECK(std::abs(a[cartan::interaction + 2]) < 1e-12);
        CHECK(phase_distance(su4_from_angles(a), cnot()) < 1e-12);
    }
    SECTION("SWAP") {
        const CartanAngles a = cartan_decompose(swap_gate());
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::abs(a[cartan::interaction + c]) ==
                  Approx(pi / 4.0).margin(1e-12));
        }
        CHECK(phase_distance(su4_from_angles(a), swap_gate()) < 1e-12);
    }
    SECTION("local gate") {
        const Mat4 l = cartan::kron2(cartan::euler(0.3, 1.2, -0.4),
                                     cartan::euler(2.0, -0.7, 0.1));
        const CartanAngles a = cartan_decompose(l);
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::abs(a[cartan::interaction + c]) < 1e-12);
        }
        CHECK(phase_distance(su4_from_angles(a), l) < 1e-12);
    }
    SECTION("global phase is ignored") {
        const Mat4 u = std::polar(1.0, 0.7) * cnot();
        CHECK(phase_distance(su4_from_angles(cartan_decompose(u)), u) < 1e-12);
    }
}

TEST_CASE("decomposition round trips", "[cartan]") {
    Rng rng = make_rng(8);
    SECTION("1000 random angle sets") {
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const Mat4 u = su4_from_angles(random_angles(rng, 2.0 * pi));
            const CartanAngles a = cartan_decompose(u);
            worst = std::max(worst, phase_distance(su4_from_angles(a), u));
            CHECK(in_weyl_chamber(a));
        }
        CHECK(worst < 1e-8);
    }
    SECTION("100 Haar random unitaries") {
        for (int t = 0; t < 100; ++t) {
            const Mat4 u = to_mat4(random_isometry_matrix(4, 4, rng));
            const CartanAngles a = cartan_decompose(u);
            CHECK(phase_distance(su4_from_angles(a), u) < 1e-8);
            CHECK(in_weyl_chamber(a));
        }
    }
    SECTION("degenerate interaction vectors") {
        for (const auto &k : std::vector<std::array<double, 3>>{
                 {0.0, 0.0, 0.0},
                 {pi / 4.0, pi / 4.0, 0.0},
                 {pi / 4.0, pi / 4.0, -pi / 4.0},
                 {0.3, 0.3, 0.3},
                 {0.3, 0.3, -0.3},
                 {pi / 2.0, 0.0, 0.0},
                 {-pi / 4.0, 0.1, 0.0}}) {
            CartanAngles a = random_angles(rng, pi);
            a[cartan::interaction] = k[0];
            a[cartan::interaction + 1] = k[1];
            a[cartan::interaction + 2] = k[2];
            const Mat4 u = su4_from_angles(a);
            const CartanAngles d = cartan_decompose(u);
            CHECK(phase_distance(su4_from_angles(d), u) < 1e-8);
            CHECK(in_weyl_chamber(d));
        }
    }
}

TEST_CASE("decomposition rejects non-unitary input", "[cartan]") {
    Mat4 m = Mat4::Identity();
    m(0, 1) = 0.5;
    try {
        (void)cartan_decompose(m);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NotUnitary);
    }
}

TEST_CASE("encoding reproduces the network state", "[circuit][encode]") {
    for (int n : {8, 16}) {
        const int levels = log2_exact(n);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const MeraNetwork net =
                build_uniform(n, 2, BranchPattern::binary(levels), seed);
            const Circuit c = encode_mera(net);
            CHECK(c.gates.size() == net.nodes.size());
            const double ov =
                overlap_abs(prepare(c).amplitudes, to_statevector(net));
            CHECK(1.0 - ov < 1e-10);
        }
    }
}

TEST_CASE("encoding covers branching networks and open boundaries",
          "[circuit][encode]") {
    for (const char *pattern : {"full", "branch1", "01"}) {
        const MeraNetwork net =
            build_uniform(8, 2, parse_pattern(pattern, 3), 11);
        const Circuit c = encode_mera(net);
        CHECK(1.0 - overlap_abs(prepare(c).amplitudes, to_statevector(net)) <
              1e-10);
    }
    const MeraNetwork open = build(8, {2, 2, 2}, BranchPattern::binary(3), 12,
                                   NetworkInit::Random, Boundary::Open);
    CHECK(1.0 - overlap_abs(prepare(encode_mera(open)).amplitudes,
                            to_statevector(open)) <
          1e-10);
}

TEST_CASE("encoding layout and bookkeeping", "[circuit][encode]") {
    const MeraNetwork net = build_uniform(16, 2, BranchPattern::binary(4), 1);
    const Circuit c = encode_mera(net);
    CHECK(c.gates.size() == 29);
    CHECK(c.parameter_count() == 29 * 15);
    CHECK(c.gates.front().kind == NodeKind::Top);
    CHECK(c.gates.front().zero_inputs.size() == 2);
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        const Gate &g = c.gates[k];
        const MeraNode &x = net.nodes[net.nodes.size() - 1 - k];
        CHECK(g.p < g.q);
        CHECK(g.role == GateRole::MeraBlue);
        CHECK(g.kind == x.kind);
        if (x.kind == NodeKind::Isometry) {
            CHECK(g.zero_inputs == std::vector<int>{x.bottom[1]});
        }
        if (x.kind == NodeKind::Disentangler) {
            CHECK(g.zero_inputs.empty());
        }
    }
    // Every qubit is fresh (|0>) the first time a gate touches it, except
    // through a top tensor or an isometry's discarded wire.
    std::vector<bool> touched(16, false);
    for (const auto &g : c.gates) {
        for (int w : {g.p, g.q}) {
            const bool zero = std::find(g.zero_inputs.begin(),
                                        g.zero_inputs.end(),
                                        w) != g.zero_inputs.end();
            CHECK(zero == !touched[static_cast<std::size_t>(w)]);
            touched[static_cast<std::size_t>(w)] = true;
        }
    }
}

TEST_CASE("trivial network encodes to identity gates", "[circuit][encode]") {
    const MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 0,
                                          NetworkInit::Trivial);
    const Circuit c = encode_mera(net);
    const StateVector s = prepare(c);
    CHECK(std::abs(s.amplitudes(0)) == Approx(1.0).margin(1e-12));
    for (const auto &g : c.gates) {
        if (g.kind == NodeKind::Disentangler) {
            CHECK(phase_distance(g.matrix(), Mat4::Identity()) < 1e-12);
        }
    }
}

TEST_CASE("encoding needs chi = 2", "[circuit][encode]") {
    const MeraNetwork net = build(8, {2, 4, 4}, BranchPattern::binary(3), 1);
    try {
        (void)encode_mera(net);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::Unsupported);
    }
}

TEST_CASE("decoding writes gates back into the network", "[circuit][encode]") {
    MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 21);
    const Circuit c = encode_mera(net);
    Rng rng = make_rng(22);
    Circuit moved = c;
    for (auto &g : moved.gates) {
        g.angles = random_angles(rng, pi);
    }
    MeraNetwork target = net;
    decode_into(moved, target);
    CHECK(isometric_defect(target) < 1e-12);
    CHECK(1.0 - overlap_abs(prepare(moved).amplitudes, to_statevector(target)) <
          1e-10);
    MeraNetwork wrong = build_uniform(8, 2, BranchPattern::full(3), 1);
    CHECK_THROWS_AS(decode_into(c, wrong), Error);
}

TEST_CASE("augmentation with zero noise keeps the state", "[circuit][augment]") {
    for (int n : {8, 16}) {
        const int levels = log2_exact(n);
        const MeraNetwork net =
            build_uniform(n, 2, BranchPattern::binary(levels), 31);
        const Circuit blue = encode_mera(net);
        const Vector before = prepare(blue).amplitudes;
        for (int k = 0; k < levels; ++k) {
            const BranchPattern pattern = BranchPattern::top_down(k, levels);
            const Circuit aug = augment_to_branching(blue, pattern, 0.0, 1);
            CHECK(aug.gates.size() ==
                  build_uniform(n, 2, pattern, 0).nodes.size());
            CHECK(1.0 - overlap_abs(before, prepare(aug).amplitudes) < 1e-12);
            std::size_t n_blue = 0;
            for (const auto &g : aug.gates) {
                n_blue += g.role == GateRole::MeraBlue ? 1 : 0;
                if (g.role == GateRole::AugmentOrange) {
                    for (double a : g.angles) {
                        CHECK(a == 0.0);
                    }
                }
            }
            CHECK(n_blue == blue.gates.size());
        }
    }
}

TEST_CASE("full branching at N = 8 has 20 gates", "[circuit][augment]") {
    const MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 2);
    const Circuit aug =
        augment_to_branching(encode_mera(net), BranchPattern::full(3), 0.0, 0);
    CHECK(aug.gates.size() == 20);
    CHECK(aug.parameter_count() == 300);
}

TEST_CASE("weak noise keeps the state close", "[circuit][augment]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        // Infidelity grows with the angle count (see the next case), so
        // the 0.99 bound is checked where it holds with margin.
        const MeraNetwork net =
            build_uniform(4, 2, BranchPattern::binary(2), 40 + seed);
        const Circuit blue = encode_mera(net);
        const Circuit noisy =
            augment_to_branching(blue, BranchPattern::full(2), 1e-2, seed);
        const double ov =
            overlap_abs(prepare(blue).amplitudes, prepare(noisy).amplitudes);
        CHECK(ov * ov > 0.99);
        CHECK(ov < 1.0 - 1e-12);
    }
    CHECK_THROWS_AS(augment_to_branching(encode_mera(build_uniform(
                                             8, 2, BranchPattern::binary(3), 1)),
                                         BranchPattern::full(3), -1.0, 0),
                    Error);
}

TEST_CASE("noise infidelity follows the second-order estimate",
          "[circuit][augment]") {
    // For independent Gaussian kicks of width sigma the mean infidelity is
    // sigma^2 * sum_l (<d_l psi|d_l psi> - |<psi|d_l psi>|^2) to leading order.
    const MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 50);
    const Circuit base =
        augment_to_branching(encode_mera(net), BranchPattern::full(3), 0.0, 0);
    const std::vector<double> theta = base.parameters();
    const Vector psi = prepare(base).amplitudes;
    const double h = 1e-5;
    double metric = 0.0;
    for (std::size_t l = 0; l < theta.size(); ++l) {
        std::vector<double> up = theta;
        std::vector<double> down = theta;
        up[l] += h;
        down[l] -= h;
        const Vector d =
            (prepare(base, up).amplitudes - prepare(base, down).amplitudes) /
            (2 * h);
        metric += d.squaredNorm() - std::norm(psi.dot(d));
    }
    const double sigma = 1e-2;
    double mean = 0.0;
    const int draws = 40;
    for (int t = 0; t < draws; ++t) {
        const Circuit noisy = augment_to_branching(
            encode_mera(net), BranchPattern::full(3), sigma,
            static_cast<std::uint64_t>(t));
        const double ov = overlap_abs(psi, prepare(noisy).amplitudes);
        mean += (1.0 - ov * ov) / draws;
    }
    CHECK(mean == Approx(sigma * sigma * metric).epsilon(0.25));
}

TEST_CASE("augmentation needs a compatible layout", "[circuit][augment]") {
    const MeraNetwork net = build_uniform(8, 2, BranchPattern::full(3), 3);
    CHECK_THROWS_AS(augment_to_branching(encode_mera(net),
                                         BranchPattern::binary(3), 0.0, 0),
                    Error);
}

TEST_CASE("random branching circuits", "[circuit][random]") {
    const Circuit a = random_branching_circuit(16, BranchPattern::full(4), 9);
    const Circuit b = random_branching_circuit(16, BranchPattern::full(4), 9);
    const Circuit other = random_branching_circuit(16, BranchPattern::full(4), 10);
    CHECK(a.parameters() == b.parameters());
    CHECK(a.parameters() != other.parameters());
    for (double v : a.parameters()) {
        CHECK(v >= -pi);
        CHECK(v < pi);
    }
    CHECK(prepare(a).norm() == Approx(1.0).margin(1e-12));
    const MeraNetwork net = build_uniform(16, 2, BranchPattern::binary(4), 3);
    const Circuit aug =
        augment_to_branching(encode_mera(net), BranchPattern::full(4), 0.0, 0);
    CHECK(a.same_topology(aug));
    CHECK(a.gates.size() == 56);
}

TEST_CASE("circuit serialization", "[circuit][io]") {
    const MeraNetwork net = build_uniform(8, 2, BranchPattern::binary(3), 5);
    const Circuit c =
        augment_to_branching(encode_mera(net), BranchPattern::full(3), 0.0, 0);
    const std::string text = serialize(c);
    const Circuit back = deserialize_circuit(text);
    CHECK(serialize(back) == text);
    CHECK(back.parameters() == c.parameters());
    CHECK(back.same_topology(c));
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        CHECK(back.gates[k].role == c.gates[k].role);
        CHECK(back.gates[k].zero_inputs == c.gates[k].zero_inputs);
    }
    CHECK(text.rfind("eevqe-circuit 1\nqubits 8\ngates 20\ngate 0 ", 0) == 0);
    CHECK_THROWS_AS(deserialize_circuit("eevqe-circuit 2\n"), Error);
    CHECK_THROWS_AS(deserialize_circuit("something else"), Error);
    CHECK_THROWS_AS(deserialize_circuit(text.substr(0, text.size() / 2)), Error);
}

TEST_CASE("parameter vector round trip", "[circuit]") {
    Circuit c = random_branching_circuit(8, BranchPattern::binary(3), 1);
    std::vector<double> theta = c.parameters();
    theta[Circuit::index(4, 7)] = 0.125;
    c.set_parameters(theta);
    CHECK(c.gates[4].angles[7] == 0.125);
    CHECK_THROWS_AS(c.set_parameters(std::vector<double>(3)), Error);
}

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
 * Circuits of parameterized two-qubit gates, the exact encoding of a chi = 2
 * MERA as such a circuit, and its augmentation to a branching layout.
 *
 * A circuit acts on |0...0> with gates applied in list order. Gate g on the
 * pair (p, q), p < q, is the 4x4 matrix su4_from_angles(g.angles) indexed by
 * 2 * bit_p + bit_q.
 */
#pragma once
#include "cartan.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "mera_network.hpp"
#include "random.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace eevqe {

/// Blue gates carry the MERA degrees of freedom; orange gates are added by
/// the augmentation.
enum class GateRole { MeraBlue, AugmentOrange };

[[nodiscard]] inline std::string to_string(GateRole r) {
    return r == GateRole::MeraBlue ? "blue" : "orange";
}

[[nodiscard]] inline GateRole parse_gate_role(const std::string &s) {
    if (s == "blue") {
        return GateRole::MeraBlue;
    }
    if (s == "orange") {
        return GateRole::AugmentOrange;
    }
    throw Error(ErrorKind::Parse, "unknown gate role '" + s + "'");
}

struct Gate {
    int p = 0;
    int q = 1;
    CartanAngles angles{};
    GateRole role = GateRole::MeraBlue;
    /// Qubits of {p, q} that are still |0> when this gate acts.
    std::vector<int> zero_inputs;
    /// Node this gate realizes: its kind and bottom layer.
    NodeKind kind = NodeKind::Disentangler;
    int layer = 0;

    [[nodiscard]] Mat4 matrix() const { return su4_from_angles(angles); }
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    [[nodiscard]] std::size_t parameter_count() const {
        return cartan_parameter_count * gates.size();
    }

    /// Flat index of angle l of gate k.
    [[nodiscard]] static std::size_t index(std::size_t k, std::size_t l) {
        return cartan_parameter_count * k + l;
    }

    [[nodiscard]] std::vector<double> parameters() const {
        std::vector<double> theta;
        theta.reserve(parameter_count());
        for (const auto &g : gates) {
            theta.insert(theta.end(), g.angles.begin(), g.angles.end());
        }
        return theta;
    }

    void set_parameters(const std::vector<double> &theta) {
        require(theta.size() == parameter_count(), ErrorKind::DimensionMismatch,
                "circuit has " + std::to_string(parameter_count()) +
                    " parameters, got " + std::to_string(theta.size()));
        for (std::size_t k = 0; k < gates.size(); ++k) {
            std::copy_n(theta.begin() + static_cast<std::ptrdiff_t>(index(k, 0)),
                        cartan_parameter_count, gates[k].angles.begin());
        }
    }

    [[nodiscard]] Circuit with_parameters(const std::vector<double> &theta) const {
        Circuit c = *this;
        c.set_parameters(theta);
        return c;
    }

    /// Same (pair, kind, layer) list, ignoring angles and roles.
    [[nodiscard]] bool same_topology(const Circuit &other) const {
        if (n_qubits != other.n_qubits || gates.size() != other.gates.size()) {
            return false;
        }
        for (std::size_t k = 0; k < gates.size(); ++k) {
            const Gate &a = gates[k];
            const Gate &b = other.gates[k];
            if (a.p != b.p || a.q != b.q || a.kind != b.kind ||
                a.layer != b.layer) {
                return false;
            }
        }
        return true;
    }
};

namespace detail {

[[nodiscard]] inline Mat4 swap_qubits(const Mat4 &u) {
    static const int perm[4] = {0, 2, 1, 3};
    Mat4 out;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out(perm[r], perm[c]) = u(r, c);
        }
    }
    return out;
}

/// Gate skeleton for a node: sorted pair and the |0> inputs.
[[nodiscard]] inline Gate gate_for_node(const MeraNode &x) {
    require(x.bottom.size() == 2, ErrorKind::InvalidArgument,
            "every MERA node has two bottom wires");
    Gate g;
    g.p = std::min(x.bottom[0], x.bottom[1]);
    g.q = std::max(x.bottom[0], x.bottom[1]);
    g.kind = x.kind;
    g.layer = x.layer;
    if (x.kind == NodeKind::Isometry) {
        g.zero_inputs = {x.bottom[1]};
    } else if (x.kind == NodeKind::Top) {
        g.zero_inputs = {g.p, g.q};
    }
    return g;
}

/**
 * @brief Extend a node map to a 4x4 unitary on (bottom[0], bottom[1]).
 *
 * Columns are indexed 2 * in_0 + in_1. An isometry reads its top wire on
 * in_0 with in_1 = |0>, so its columns land at 0 and 2; a top tensor fills
 * column 0. The remaining columns come from mgs_unitarize.
 */
[[nodiscard]] inline Mat4 node_unitary(const MeraNode &x, Rng &rng) {
    const Matrix m = x.matrix();
    require(m.rows() == 4, ErrorKind::Unsupported,
            "circuit encoding needs chi = 2 (node with " +
                std::to_string(m.rows()) + " rows)");
    Mat4 u;
    if (m.cols() == 4) {
        u = m;
    } else {
        const Matrix full = unitarize_isometry(m, rng);
        // mgs column n = c + cols * d  ->  gate column 2 * c + d.
        for (Eigen::Index n = 0; n < 4; ++n) {
            const Eigen::Index target =
                m.cols() == 2 ? 2 * (n % 2) + n / 2 : n;
            u.col(target) = full.col(n);
        }
    }
    if (x.bottom[0] > x.bottom[1]) {
        u = swap_qubits(u);
    }
    return u;
}

/// Gate skeletons in generative order (reverse of the node list).
[[nodiscard]] inline std::vector<Gate> layout(const MeraNetwork &net) {
    std::vector<Gate> gates;
    for (auto it = net.nodes.rbegin(); it != net.nodes.rend(); ++it) {
        gates.push_back(gate_for_node(*it));
        gates.back().role =
            it->main_lineage ? GateRole::MeraBlue : GateRole::AugmentOrange;
    }
    return gates;
}

/// Isometries and branch unitaries occupy the same slot of the layout.
[[nodiscard]] inline std::tuple<int, int, int, int> slot(const Gate &g) {
    const int kind = g.kind == NodeKind::BranchUnitary
                         ? static_cast<int>(NodeKind::Isometry)
                         : static_cast<int>(g.kind);
    return {g.layer, kind, g.p, g.q};
}

} // namespace detail

/// Seed of the stream that completes isometries to unitaries.
inline constexpr std::uint64_t encode_completion_seed = 0;

/**
 * @brief Exact circuit for a chi = 2 network: one gate per node, top layer
 * first, all gates blue. Isometries and top tensors are completed to
 * unitaries by modified Gram-Schmidt before decomposition.
 */
[[nodiscard]] inline Circuit
encode_mera(const MeraNetwork &net,
            std::uint64_t completion_seed = encode_completion_seed) {
    require(net.uniform_chi(2), ErrorKind::Unsupported,
            "circuit encoding is limited to chi = 2; larger bond dimensions "
            "need multi-qubit gate decompositions");
    Rng rng = make_rng(completion_seed);
    Circuit c;
    c.n_qubits = net.n_sites;
    for (auto it = net.nodes.rbegin(); it != net.nodes.rend(); ++it) {
        Gate g = detail::gate_for_node(*it);
        g.angles = cartan_decompose(detail::node_unitary(*it, rng));
        g.role = GateRole::MeraBlue;
        c.gates.push_back(std::move(g));
    }
    return c;
}

/**
 * @brief Write gate unitaries back into a network with the same layout.
 * Isometries keep the columns with a |0> input, top tensors column 0.
 */
inline void decode_into(const Circuit &c, MeraNetwork &net) {
    require(c.gates.size() == net.nodes.size(), ErrorKind::DimensionMismatch,
            "circuit has " + std::to_string(c.gates.size()) +
                " gates for " + std::to_string(net.nodes.size()) + " nodes");
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        MeraNode &x = net.nodes[net.nodes.size() - 1 - k];
        const Gate &g = c.gates[k];
        require(g.kind == x.kind && g.p == std::min(x.bottom[0], x.bottom[1]),
                ErrorKind::InvalidArgument,
                "gate " + std::to_string(k) + " does not match its node");
        Mat4 u = g.matrix();
        if (x.bottom[0] > x.bottom[1]) {
            u = detail::swap_qubits(u);
        }
        Matrix m;
        switch (x.kind) {
        case NodeKind::Isometry:
            m.resize(4, 2);
            m.col(0) = u.col(0);
            m.col(1) = u.col(2);
            break;
        case NodeKind::Top:
            m = u.col(0);
            break;
        default:
            m = u;
            break;
        }
        x.set_matrix(m);
    }
}

/**
 * @brief Gate layout of the chi = 2 branching network for `pattern`, angles
 * zero. Main-lineage gates are blue, the rest orange.
 */
[[nodiscard]] inline Circuit branching_layout(int n_sites,
                                              const BranchPattern &pattern) {
    const MeraNetwork net = build_uniform(n_sites, 2, pattern, 0,
                                          NetworkInit::Trivial);
    Circuit c;
    c.n_qubits = n_sites;
    c.gates = detail::layout(net);
    return c;
}

/**
 * @brief Embed a MERA circuit into the branching layout of `pattern`.
 *
 * Gates already present keep their angles and role; new gates start at zero
 * angles (the identity), so with noise_sigma = 0 the state is unchanged.
 * With noise_sigma > 0 every angle receives N(0, sigma) noise.
 */
[[nodiscard]] inline Circuit augment_to_branching(const Circuit &c,
                                                  const BranchPattern &pattern,
                                                  double noise_sigma,
                                                  std::uint64_t seed) {
    require(noise_sigma >= 0.0, ErrorKind::InvalidArgument,
            "noise sigma must be non-negative");
    Circuit out = branching_layout(c.n_qubits, pattern);
    std::map<std::tuple<int, int, int, int>, std::size_t> where;
    for (std::size_t k = 0; k < out.gates.size(); ++k) {
        out.gates[k].role = GateRole::AugmentOrange;
        where[detail::slot(out.gates[k])] = k;
    }
    for (const auto &g : c.gates) {
        const auto it = where.find(detail::slot(g));
        require(it != where.end(), ErrorKind::InvalidArgument,
                "gate on (" + std::to_string(g.p) + ", " +
                    std::to_string(g.q) + ") at layer " +
                    std::to_string(g.layer) +
                    " has no place in the branching layout");
        Gate &target = out.gates[it->second];
        target.angles = g.angles;
        target.role = g.role;
    }
    if (noise_sigma > 0.0) {
        Rng rng = make_rng(seed);
        for (auto &g : out.gates) {
            for (auto &a : g.angles) {
                a += gaussian(rng, noise_sigma);
            }
        }
    }
    return out;
}

/// Branching layout with every angle drawn from U[-pi, pi).
[[nodiscard]] inline Circuit random_branching_circuit(int n_sites,
                                                      const BranchPattern &pattern,
                                                      std::uint64_t seed) {
    Circuit c = branching_layout(n_sites, pattern);
    Rng rng = make_rng(seed);
    for (auto &g : c.gates) {
        for (auto &a : g.angles) {
            a = uniform(rng, -std::numbers::pi, std::numbers::pi);
        }
    }
    return c;
}

inline constexpr const char *circuit_magic = "eevqe-circuit";
inline constexpr int circuit_format_version = 1;

/**
 * @brief One line per gate: index, pair, role, kind, layer, zero inputs and
 * the 15 angles at 17 significant digits.
 */
inline void write_circuit(std::ostream &os, const Circuit &c) {
    os << circuit_magic << ' ' << circuit_format_version << '\n';
    os << "qubits " << c.n_qubits << '\n';
    os << "gates " << c.gates.size() << '\n';
    char buf[40];
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        const Gate &g = c.gates[k];
        os << "gate " << k << ' ' << g.p << ' ' << g.q << ' '
           << to_string(g.role) << ' ' << to_string(g.kind) << ' ' << g.layer
           << ' ' << g.zero_inputs.size();
        for (int z : g.zero_inputs) {
            os << ' ' << z;
        }
        for (double a : g.angles) {
            std::snprintf(buf, sizeof(buf), "%.17g", a);
            os << ' ' << buf;
        }
        os << '\n';
    }
}

[[nodiscard]] inline std::string serialize(const Circuit &c) {
    std::ostringstream os;
    write_circuit(os, c);
    return os.str();
}

[[nodiscard]] inline Circuit read_circuit(std::istream &is) {
    auto expect = [&](const std::string &key) {
        std::string word;
        require(static_cast<bool>(is >> word) && word == key, ErrorKind::Parse,
                "expected '" + key + "', found '" + word + "'");
    };
    std::string magic;
    int version = 0;
    require(static_cast<bool>(is >> magic >> version) && magic == circuit_magic,
            ErrorKind::Parse, "not a serialized circuit");
    require(version == circuit_format_version, ErrorKind::Parse,
            "unsupported circuit format version " + std::to_string(version));
    Circuit c;
    std::size_t count = 0;
    expect("qubits");
    is >> c.n_qubits;
    expect("gates");
    is >> count;
    for (std::size_t k = 0; k < count; ++k) {
        expect("gate");
        std::size_t index = 0;
        std::string role;
        std::string kind;
        std::size_t nz = 0;
        Gate g;
        is >> index >> g.p >> g.q >> role >> kind >> g.layer >> nz;
        require(static_cast<bool>(is) && index == k && nz <= 2,
                ErrorKind::Parse, "bad gate record " + std::to_string(k));
        g.role = parse_gate_role(role);
        g.kind = parse_node_kind(kind);
        g.zero_inputs.resize(nz);
        for (auto &z : g.zero_inputs) {
            is >> z;
        }
        for (auto &a : g.angles) {
            is >> a;
        }
        require(static_cast<bool>(is), ErrorKind::Parse,
                "truncated gate " + std::to_string(k));
        require(0 <= g.p && g.p < g.q && g.q < c.n_qubits, ErrorKind::Parse,
                "gate " + std::to_string(k) + " has a bad qubit pair");
        c.gates.push_back(std::move(g));
    }
    return c;
}

[[nodiscard]] inline Circuit deserialize_circuit(const std::string &text) {
    std::istringstream is(text);
    return read_circuit(is);
}

} // namespace eevqe

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
 * Binary and branching MERA on N = 2^n sites: topology, construction,
 * isometric checks, full-state contraction and text serialization.
 *
 * Every node is stored as a linear map from its top legs to its bottom legs
 * (the generative direction). Its tensor has legs (bottom..., top...), so
 * `matrix()` has rows over the bottom legs and columns over the top legs and
 * satisfies M^dagger M = I. Wires are identified by the physical site they
 * start from; an isometry keeps the smaller id of its two bottom wires.
 */
#pragma once
#include "error.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace eevqe {

enum class NodeKind { Disentangler, Isometry, BranchUnitary, Top };

[[nodiscard]] inline std::string to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::Disentangler:
        return "disentangler";
    case NodeKind::Isometry:
        return "isometry";
    case NodeKind::BranchUnitary:
        return "branch";
    case NodeKind::Top:
        return "top";
    }
    return "unknown";
}

[[nodiscard]] inline NodeKind parse_node_kind(const std::string &name) {
    for (NodeKind k : {NodeKind::Disentangler, NodeKind::Isometry,
                       NodeKind::BranchUnitary, NodeKind::Top}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw Error(ErrorKind::Parse, "unknown node kind '" + name + "'");
}

/// Disentanglers that wrap from the last wire of a block to the first
/// (Periodic) or only those strictly between neighbours (Open).
enum class Boundary { Periodic, Open };

[[nodiscard]] inline std::string to_string(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "open";
}

[[nodiscard]] inline Boundary parse_boundary(const std::string &name) {
    if (name == "periodic") {
        return Boundary::Periodic;
    }
    if (name == "open") {
        return Boundary::Open;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown boundary '" + name + "'");
}

/**
 * @brief Which isometry layers branch. Entry l refers to the isometry layer
 * acting on level l (l = 0 is next to the physical sites).
 */
struct BranchPattern {
    std::vector<bool> branch_flags;

    /// Plain MERA with `levels` = log2(N) levels.
    [[nodiscard]] static BranchPattern binary(int levels) {
        return {std::vector<bool>(static_cast<std::size_t>(levels - 1), false)};
    }

    [[nodiscard]] static BranchPattern full(int levels) {
        return {std::vector<bool>(static_cast<std::size_t>(levels - 1), true)};
    }

    /// The top `k` isometry layers branch ("branch k").
    [[nodiscard]] static BranchPattern top_down(int k, int levels) {
        const int flags = levels - 1;
        require(0 <= k && k <= flags, ErrorKind::InvalidArgument,
                "branch count " + std::to_string(k) + " outside [0, " +
                    std::to_string(flags) + "]");
        BranchPattern p{std::vector<bool>(static_cast<std::size_t>(flags))};
        for (int l = 0; l < flags; ++l) {
            p.branch_flags[static_cast<std::size_t>(l)] = l >= flags - k;
        }
        return p;
    }

    [[nodiscard]] int branching_layers() const {
        return static_cast<int>(
            std::count(branch_flags.begin(), branch_flags.end(), true));
    }

    [[nodiscard]] int top_count() const { return 1 << branching_layers(); }

    /// Flags as a bit string, bottom layer first.
    [[nodiscard]] std::string bits() const {
        std::string s;
        for (bool f : branch_flags) {
            s += f ? '1' : '0';
        }
        return s;
    }

    bool operator==(const BranchPattern &) const = default;
};

/**
 * @brief Parse "binary", "full", "branchK" (top K layers branch) or a bit
 * string of flags, bottom layer first.
 */
[[nodiscard]] inline BranchPattern parse_pattern(const std::string &text,
                                                 int levels) {
    if (text == "binary") {
        return BranchPattern::binary(levels);
    }
    if (text == "full") {
        return BranchPattern::full(levels);
    }
    if (text.rfind("branch", 0) == 0 && text.size() > 6) {
        return BranchPattern::top_down(std::stoi(text.substr(6)), levels);
    }
    require(text.size() == static_cast<std::size_t>(levels - 1) &&
                text.find_first_not_of("01") == std::string::npos,
            ErrorKind::InvalidArgument,
            "pattern '" + text + "' is not binary, full, branchK or a " +
                std::to_string(levels - 1) + "-bit flag string");
    BranchPattern p;
    for (char c : text) {
        p.branch_flags.push_back(c == '1');
    }
    return p;
}

/// One tensor of the network.
struct MeraNode {
    NodeKind kind = NodeKind::Disentangler;
    /// Level of the bottom legs (0 = physical).
    int layer = 0;
    /// Left-to-right index within its row (kind and layer), across branches.
    int position = 0;
    /// Branch index at this layer, in left-to-right branch order.
    int branch = 0;
    /// True when the node sits on the branch that always keeps the first
    /// output; these are exactly the nodes of the plain MERA.
    bool main_lineage = true;
    std::vector<int> bottom;
    std::vector<int> top;
    Tensor tensor;

    [[nodiscard]] std::size_t bottom_dim() const {
        std::size_t d = 1;
        for (std::size_t k = 0; k < bottom.size(); ++k) {
            d *= tensor.dim(k);
        }
        return d;
    }

    [[nodiscard]] std::size_t top_dim() const {
        return tensor.size() / bottom_dim();
    }

    [[nodiscard]] std::size_t bottom_leg_dim(std::size_t k) const {
        return tensor.dim(k);
    }

    [[nodiscard]] std::size_t top_leg_dim(std::size_t k) const {
        return tensor.dim(bottom.size() + k);
    }

    /// Rows over bottom legs, columns over top legs.
    [[nodiscard]] Matrix matrix() const { return tensor.matrix(bottom.size()); }

    void set_matrix(const Matrix &m) {
        tensor = Tensor::from_matrix(m, tensor.shape());
    }
};

/// How initial tensors are filled by build().
enum class NetworkInit {
    /// Gaussian entries orthonormalized by QR.
    Random,
    /// Each map sends |c> on its top wire to |c, 0> (|0,0> for a top
    /// tensor), so the network state is |0...0>.
    Trivial,
};

struct MeraNetwork {
    int n_sites = 0;
    /// Number of levels n = log2(N); level n-1 is capped by top tensors.
    int levels = 0;
    /// Bond dimension per level, chi[0] = 2 physical.
    std::vector<std::size_t> chi;
    BranchPattern pattern;
    Boundary boundary = Boundary::Periodic;
    /// Nodes in ascending (renormalization) order: per layer the
    /// disentangler row then the isometry row, left to right.
    std::vector<MeraNode> nodes;

    [[nodiscard]] std::vector<int> top_nodes() const {
        std::vector<int> out;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            if (nodes[k].kind == NodeKind::Top) {
                out.push_back(static_cast<int>(k));
            }
        }
        return out;
    }

    [[nodiscard]] bool uniform_chi(std::size_t value) const {
        return std::all_of(chi.begin(), chi.end(),
                           [value](std::size_t c) { return c == value; });
    }
};

[[nodiscard]] inline int log2_exact(int n) {
    int levels = 0;
    while ((1 << levels) < n) {
        ++levels;
    }
    return (1 << levels) == n ? levels : -1;
}

namespace detail {

inline Matrix trivial_map(NodeKind kind, std::size_t chi_in,
                          std::size_t chi_out) {
    switch (kind) {
    case NodeKind::Disentangler:
    case NodeKind::BranchUnitary:
        return Matrix::Identity(static_cast<Eigen::Index>(chi_in * chi_in),
                                static_cast<Eigen::Index>(chi_out * chi_out));
    case NodeKind::Isometry: {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(chi_in * chi_in),
                                static_cast<Eigen::Index>(chi_out));
        for (std::size_t c = 0; c < chi_out; ++c) {
            m(static_cast<Eigen::Index>(c * chi_in),
              static_cast<Eigen::Index>(c)) = 1.0;
        }
        return m;
    }
    case NodeKind::Top: {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(chi_in * chi_in), 1);
        m(0, 0) = 1.0;
        return m;
    }
    }
    return {};
}

} // namespace detail

/**
 * @brief Build the network topology and fill the tensors.
 *
 * @param n_sites N, a power of two with N >= 4.
 * @param chi Bond dimension per level (length log2 N), chi[0] = 2.
 * @param pattern One flag per isometry layer; a branching layer needs
 * chi[l+1] == chi[l].
 * @param seed Seed of the single stream that fills nodes in ascending order.
 */
[[nodiscard]] inline MeraNetwork
build(int n_sites, std::vector<std::size_t> chi, const BranchPattern &pattern,
      std::uint64_t seed, NetworkInit init = NetworkInit::Random,
      Boundary boundary = Boundary::Periodic) {
    const int levels = log2_exact(n_sites);
    require(levels >= 2, ErrorKind::InvalidArgument,
            "MERA needs N = 2^n with n >= 2, got N = " +
                std::to_string(n_sites));
    require(chi.size() == static_cast<std::size_t>(levels),
            ErrorKind::InvalidArgument,
            "need " + std::to_string(levels) + " bond dimensions, got " +
                std::to_string(chi.size()));
    require(chi[0] == 2, ErrorKind::InvalidArgument,
            "physical bond dimension must be 2");
    require(pattern.branch_flags.size() == static_cast<std::size_t>(levels - 1),
            ErrorKind::InvalidArgument,
            "branch pattern needs " + std::to_string(levels - 1) + " flags");
    for (int l = 0; l + 1 < levels; ++l) {
        const auto lo = chi[static_cast<std::size_t>(l)];
        const auto hi = chi[static_cast<std::size_t>(l + 1)];
        require(hi >= 1 && hi <= lo * lo, ErrorKind::InvalidArgument,
                "bond dimension " + std::to_string(hi) + " at level " +
                    std::to_string(l + 1) + " exceeds " +
                    std::to_string(lo * lo));
        require(!pattern.branch_flags[static_cast<std::size_t>(l)] || hi == lo,
                ErrorKind::InvalidArgument,
                "a branching layer keeps the bond dimension; level " +
                    std::to_string(l + 1) + " has " + std::to_string(hi) +
                    " vs " + std::to_string(lo));
    }

    MeraNetwork net;
    net.n_sites = n_sites;
    net.levels = levels;
    net.chi = chi;
    net.pattern = pattern;
    net.boundary = boundary;

    Rng rng = make_rng(seed);
    auto add = [&](NodeKind kind, int layer, int position, int branch,
                   bool main, std::vector<int> bottom, std::vector<int> top) {
        const std::size_t c_in = chi[static_cast<std::size_t>(layer)];
        std::size_t c_out = c_in;
        Shape shape{c_in, c_in};
        if (kind == NodeKind::Isometry) {
            c_out = chi[static_cast<std::size_t>(layer + 1)];
            shape.push_back(c_out);
        } else if (kind == NodeKind::BranchUnitary) {
            c_out = chi[static_cast<std::size_t>(layer + 1)];
            shape.push_back(c_out);
            shape.push_back(c_out);
        } else if (kind == NodeKind::Disentangler) {
            shape.push_back(c_in);
            shape.push_back(c_in);
        }
        MeraNode node;
        node.kind = kind;
        node.layer = layer;
        node.position = position;
        node.branch = branch;
        node.main_lineage = main;
        node.bottom = std::move(bottom);
        node.top = std::move(top);
        node.tensor = Tensor(shape);
        const std::size_t rows = c_in * c_in;
        const std::size_t cols = node.tensor.size() / rows;
        const Matrix m = init == NetworkInit::Random
                             ? random_isometry_matrix(rows, cols, rng)
                             : detail::trivial_map(kind, c_in, c_out);
        node.set_matrix(m);
        net.nodes.push_back(std::move(node));
    };

    struct Branch {
        std::vector<int> wires;
        bool main;
    };
    std::vector<Branch> branches{{{}, true}};
    for (int s = 0; s < n_sites; ++s) {
        branches[0].wires.push_back(s);
    }

    for (int layer = 0; layer + 1 < levels; ++layer) {
        int position = 0;
        for (std::size_t b = 0; b < branches.size(); ++b) {
            const auto &w = branches[b].wires;
            const int m = static_cast<int>(w.size());
            const int count = boundary == Boundary::Periodic ? m / 2 : m / 2 - 1;
            for (int k = 0; k < count; ++k) {
                const int a = w[static_cast<std::size_t>(2 * k + 1)];
                const int c = w[static_cast<std::size_t>((2 * k + 2) % m)];
                add(NodeKind::Disentangler, layer, position++,
                    static_cast<int>(b), branches[b].main, {a, c}, {a, c});
            }
        }
        const bool branching =
            pattern.branch_flags[static_cast<std::size_t>(layer)];
        std::vector<Branch> next;
        position = 0;
        for (std::size_t b = 0; b < branches.size(); ++b) {
            const auto &w = branches[b].wires;
            Branch first{{}, branches[b].main};
            Branch second{{}, false};
            for (std::size_t k = 0; 2 * k + 1 < w.size(); ++k) {
                const int a = w[2 * k];
                const int c = w[2 * k + 1];
                if (branching) {
                    add(NodeKind::BranchUnitary, layer, position++,
                        static_cast<int>(b), branches[b].main, {a, c}, {a, c});
                    second.wires.push_back(c);
                } else {
                    add(NodeKind::Isometry, layer, position++,
                        static_cast<int>(b), branches[b].main, {a, c}, {a});
                }
                first.wires.push_back(a);
            }
            next.push_back(std::move(first));
            if (branching) {
                next.push_back(std::move(second));
            }
        }
        branches = std::move(next);
    }
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto &w = branches[b].wires;
        add(NodeKind::Top, levels - 1, static_cast<int>(b),
            static_cast<int>(b), branches[b].main, {w[0], w[1]}, {});
    }
    return net;
}

/// Convenience overload: uniform bond dimension chi at every level.
[[nodiscard]] inline MeraNetwork
build_uniform(int n_sites, std::size_t chi, const BranchPattern &pattern,
              std::uint64_t seed, NetworkInit init = NetworkInit::Random) {
    const int levels = log2_exact(n_sites);
    require(levels >= 2, ErrorKind::InvalidArgument,
            "MERA needs N = 2^n with n >= 2");
    std::vector<std::size_t> c(static_cast<std::size_t>(levels), chi);
    c[0] = 2;
    return build(n_sites, c, pattern, seed, init);
}

/// Largest deviation of a node from its isometric condition.
[[nodiscard]] inline double isometric_defect(const MeraNode &node) {
    const Matrix m = node.matrix();
    double d = isometry_defect(m);
    if (node.kind == NodeKind::Disentangler ||
        node.kind == NodeKind::BranchUnitary) {
        d = std::max(d, unitary_defect(m));
    }
    return d;
}

[[nodiscard]] inline double isometric_defect(const MeraNetwork &net) {
    double d = 0.0;
    for (const auto &node : net.nodes) {
        d = std::max(d, isometric_defect(node));
    }
    return d;
}

/// Full state of the network, qubit 0 least significant.
[[nodiscard]] inline Vector to_statevector(const MeraNetwork &net) {
    require(net.n_sites <= 16, ErrorKind::Unsupported,
            "statevector contraction is limited to N <= 16");
    // Amplitudes as a row-major tensor over `wires` (first most significant).
    std::vector<int> wires;
    std::vector<std::size_t> dims;
    std::vector<Complex> psi{Complex{1.0, 0.0}};
    for (auto it = net.nodes.rbegin(); it != net.nodes.rend(); ++it) {
        const MeraNode &x = *it;
        // Move the node's top wires to the end: [T..., A...].
        std::vector<std::size_t> perm;
        std::vector<int> rest_wires;
        std::vector<std::size_t> rest_dims;
        for (std::size_t k = 0; k < wires.size(); ++k) {
            if (std::find(x.top.begin(), x.top.end(), wires[k]) ==
                x.top.end()) {
                perm.push_back(k);
                rest_wires.push_back(wires[k]);
                rest_dims.push_back(dims[k]);
            }
        }
        for (int a : x.top) {
            const auto pos = std::find(wires.begin(), wires.end(), a);
            require(pos != wires.end(), ErrorKind::InvalidArgument,
                    "network wiring is inconsistent");
            perm.push_back(static_cast<std::size_t>(pos - wires.begin()));
        }
        std::vector<Complex> moved(psi.size());
        if (!wires.empty()) {
            detail::permute_into(psi.data(), dims, perm, moved.data());
        } else {
            moved = psi;
        }
        std::size_t rest = 1;
        for (auto d : rest_dims) {
            rest *= d;
        }
        const Matrix m = x.matrix();
        const auto top_dim = static_cast<Eigen::Index>(m.cols());
        const auto bottom_dim = static_cast<Eigen::Index>(m.rows());
        std::vector<Complex> next(rest * static_cast<std::size_t>(bottom_dim));
        Eigen::Map<RowMatrix>(next.data(), static_cast<Eigen::Index>(rest),
                              bottom_dim)
            .noalias() =
            Eigen::Map<const RowMatrix>(moved.data(),
                                        static_cast<Eigen::Index>(rest),
                                        top_dim) *
            m.transpose();
        psi = std::move(next);
        wires = rest_wires;
        dims = rest_dims;
        for (std::size_t k = 0; k < x.bottom.size(); ++k) {
            wires.push_back(x.bottom[k]);
            dims.push_back(x.bottom_leg_dim(k));
        }
    }
    // Order wires N-1 ... 0 so that wire 0 is the least significant.
    std::vector<std::size_t> perm(wires.size());
    for (std::size_t k = 0; k < wires.size(); ++k) {
        const int want = net.n_sites - 1 - static_cast<int>(k);
        perm[k] = static_cast<std::size_t>(
            std::find(wires.begin(), wires.end(), want) - wires.begin());
    }
    Vector out(static_cast<Eigen::Index>(psi.size()));
    detail::permute_into(psi.data(), dims, perm, out.data());
    return out;
}

inline constexpr const char *network_magic = "eevqe-mera";
inline constexpr int network_format_version = 1;

/// Versioned text format; tensor entries at 17 significant digits.
inline void write_network(std::ostream &os, const MeraNetwork &net) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << network_magic << ' ' << network_format_version << '\n';
    os << "sites " << net.n_sites << '\n';
    os << "chi";
    for (auto c : net.chi) {
        os << ' ' << c;
    }
    os << '\n';
    os << "pattern " << (net.pattern.branch_flags.empty()
                             ? std::string("-")
                             : net.pattern.bits())
       << '\n';
    os << "boundary " << to_string(net.boundary) << '\n';
    os << "nodes " << net.nodes.size() << '\n';
    for (const auto &node : net.nodes) {
        os << "node " << to_string(node.kind) << ' ' << node.layer << ' '
           << node.position << ' ' << node.branch << ' '
           << (node.main_lineage ? 1 : 0) << ' ' << node.bottom.size();
        for (int w : node.bottom) {
            os << ' ' << w;
        }
        os << ' ' << node.top.size();
        for (int w : node.top) {
            os << ' ' << w;
        }
        os << ' ' << node.tensor.rank();
        for (auto d : node.tensor.shape()) {
            os << ' ' << d;
        }
        os << '\n';
        const auto data = node.tensor.data();
        for (std::size_t k = 0; k < data.size(); ++k) {
            os << (k ? " " : "") << num(data[k].real()) << ' '
               << num(data[k].imag());
        }
        os << '\n';
    }
}

[[nodiscard]] inline std::string serialize(const MeraNetwork &net) {
    std::ostringstream os;
    write_network(os, net);
    return os.str();
}

[[nodiscard]] inline MeraNetwork read_network(std::istream &is) {
    auto expect = [&](const std::string &key) {
        std::string word;
        require(static_cast<bool>(is >> word) && word == key, ErrorKind::Parse,
                "expected '" + key + "', found '" + word + "'");
    };
    std::string magic;
    int version = 0;
    require(static_cast<bool>(is >> magic >> version) &&
                magic == network_magic,
            ErrorKind::Parse, "not a serialized network");
    require(version == network_format_version, ErrorKind::Parse,
            "unsupported network format version " + std::to_string(version));
    MeraNetwork net;
    expect("sites");
    is >> net.n_sites;
    net.levels = log2_exact(net.n_sites);
    require(net.levels >= 2, ErrorKind::Parse, "bad site count");
    expect("chi");
    for (int l = 0; l < net.levels; ++l) {
        std::size_t c = 0;
        is >> c;
        net.chi.push_back(c);
    }
    std::string bits;
    expect("pattern");
    is >> bits;
    net.pattern = parse_pattern(bits == "-" ? std::string() : bits,
                                net.levels);
    std::string boundary;
    expect("boundary");
    is >> boundary;
    net.boundary = parse_boundary(boundary);
    std::size_t count = 0;
    expect("nodes");
    is >> count;
    for (std::size_t n = 0; n < count; ++n) {
        MeraNode node;
        std::string kind;
        int main = 0;
        std::size_t nb = 0;
        std::size_t nt = 0;
        std::size_t rank = 0;
        expect("node");
        is >> kind >> node.layer >> node.position >> node.branch >> main >>
            nb;
        node.kind = parse_node_kind(kind);
        node.main_lineage = main != 0;
        node.bottom.resize(nb);
        for (auto &w : node.bottom) {
            is >> w;
        }
        is >> nt;
        node.top.resize(nt);
        for (auto &w : node.top) {
            is >> w;
        }
        is >> rank;
        require(static_cast<bool>(is) && rank <= 8, ErrorKind::Parse,
                "bad node header " + std::to_string(n));
        Shape shape(rank);
        for (auto &d : shape) {
            is >> d;
        }
        Tensor t(shape);
        for (auto &v : t.data()) {
            double re = 0.0;
            double im = 0.0;
            is >> re >> im;
            v = Complex{re, im};
        }
        require(static_cast<bool>(is), ErrorKind::Parse,
                "truncated node " + std::to_string(n));
        node.tensor = std::move(t);
        net.nodes.push_back(std::move(node));
    }
    return net;
}

[[nodiscard]] inline MeraNetwork deserialize_network(const std::string &text) {
    std::istringstream is(text);
    return read_network(is);
}

} // namespace eevqe

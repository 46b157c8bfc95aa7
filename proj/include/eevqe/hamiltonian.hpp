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
 * Two-body spin Hamiltonians: random all-to-all model generators, the rainbow
 * chain, the negative semidefinite shift and exact ground-state solvers.
 */
#pragma once
#include "error.hpp"
#include "kernels.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace eevqe {

namespace pauli {

[[nodiscard]] inline Matrix I() { return Matrix::Identity(2, 2); }

[[nodiscard]] inline Matrix X() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

[[nodiscard]] inline Matrix Y() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = Complex{0.0, -1.0};
    m(1, 0) = Complex{0.0, 1.0};
    return m;
}

[[nodiscard]] inline Matrix Z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

} // namespace pauli

/// Kronecker product, `a` on the more significant index.
[[nodiscard]] inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) =
                a(r, c) * b;
        }
    }
    return out;
}

enum class ModelTag { Ising, XYZ, Heisenberg, Rainbow, Custom };

[[nodiscard]] inline std::string to_string(ModelTag tag) {
    switch (tag) {
    case ModelTag::Ising:
        return "ising";
    case ModelTag::XYZ:
        return "xyz";
    case ModelTag::Heisenberg:
        return "heisenberg";
    case ModelTag::Rainbow:
        return "rainbow";
    case ModelTag::Custom:
        return "custom";
    }
    return "custom";
}

[[nodiscard]] inline ModelTag parse_model(const std::string &name) {
    static const std::map<std::string, ModelTag> table{
        {"ising", ModelTag::Ising},
        {"xyz", ModelTag::XYZ},
        {"heisenberg", ModelTag::Heisenberg},
        {"rainbow", ModelTag::Rainbow},
        {"custom", ModelTag::Custom}};
    const auto it = table.find(name);
    require(it != table.end(), ErrorKind::InvalidArgument,
            "unknown model '" + name + "'");
    return it->second;
}

/**
 * @brief Hermitian 4x4 interaction on sites (i, j), i < j. Site i is the more
 * significant factor of the local basis. `gamma` is the shift already
 * subtracted from the matrix.
 */
struct PairTerm {
    int i = 0;
    int j = 1;
    Matrix matrix = Matrix::Zero(4, 4);
    double gamma = 0.0;
};

struct PairHamiltonian {
    int n_sites = 0;
    std::vector<PairTerm> terms;
    /// Sum of the per-term shifts; add to a shifted energy to undo it.
    double total_shift = 0.0;
    ModelTag model = ModelTag::Custom;
    std::uint64_t seed = 0;
    /// Model parameter that is not a random draw (the rainbow decay h).
    double parameter = 0.0;
    /// Set by shift_negative; optimizers that rely on the shift check it.
    bool shifted = false;

    [[nodiscard]] double unshifted(double shifted_energy) const {
        return shifted_energy + total_shift;
    }
};

/// Pair terms of a Hamiltonian keyed by (i, j); fails on duplicates.
inline void validate(const PairHamiltonian &h) {
    require(h.n_sites >= 2, ErrorKind::InvalidArgument,
            "hamiltonian needs at least 2 sites");
    std::vector<bool> seen(static_cast<std::size_t>(h.n_sites * h.n_sites),
                           false);
    for (const auto &t : h.terms) {
        require(0 <= t.i && t.i < t.j && t.j < h.n_sites,
                ErrorKind::InvalidArgument,
                "pair term (" + std::to_string(t.i) + ", " +
                    std::to_string(t.j) + ") out of range or unordered");
        require(t.matrix.rows() == 4 && t.matrix.cols() == 4,
                ErrorKind::DimensionMismatch, "pair term matrix must be 4x4");
        const auto key = static_cast<std::size_t>(t.i * h.n_sites + t.j);
        require(!seen[key], ErrorKind::InvalidArgument,
                "pair (" + std::to_string(t.i) + ", " + std::to_string(t.j) +
                    ") appears twice");
        seen[key] = true;
        const double defect = hermitian_defect(t.matrix);
        require(defect < 1e-12, ErrorKind::NotHermitian,
                "pair term (" + std::to_string(t.i) + ", " +
                    std::to_string(t.j) + ") has asymmetry " +
                    std::to_string(defect));
    }
}

namespace detail {

/**
 * @brief Fold one-body fields into pair terms: the field on site i goes into
 * the pair (i, i+1) as F x I, the last site's into (N-2, N-1) as I x F.
 * `terms` must already contain those nearest-neighbour pairs.
 */
inline void fold_fields(int n, std::vector<PairTerm> &terms,
                        const std::vector<Matrix> &fields) {
    auto find = [&](int i, int j) -> PairTerm & {
        for (auto &t : terms) {
            if (t.i == i && t.j == j) {
                return t;
            }
        }
        terms.push_back(PairTerm{i, j, Matrix::Zero(4, 4), 0.0});
        return terms.back();
    };
    for (int s = 0; s < n; ++s) {
        if (s + 1 < n) {
            find(s, s + 1).matrix += kron(fields[static_cast<std::size_t>(s)],
                                          pauli::I());
        } else {
            find(n - 2, n - 1).matrix +=
                kron(pauli::I(), fields[static_cast<std::size_t>(s)]);
        }
    }
}

inline Matrix sigma_dot(double jx, double jy, double jz) {
    return jx * kron(pauli::X(), pauli::X()) +
           jy * kron(pauli::Y(), pauli::Y()) +
           jz * kron(pauli::Z(), pauli::Z());
}

inline Matrix field(double hx, double hy, double hz) {
    return hx * pauli::X() + hy * pauli::Y() + hz * pauli::Z();
}

} // namespace detail

/**
 * @brief Ising model from explicit couplings.
 * @param couplings J_ij for pairs i < j in lexicographic order.
 * @param fields Transverse field h_i per site.
 */
[[nodiscard]] inline PairHamiltonian
ising_from_couplings(int n, const std::vector<double> &couplings,
                     const std::vector<double> &fields) {
    require(n >= 2, ErrorKind::InvalidArgument, "ising needs N >= 2");
    require(couplings.size() == static_cast<std::size_t>(n * (n - 1) / 2) &&
                fields.size() == static_cast<std::size_t>(n),
            ErrorKind::InvalidArgument, "ising coupling count mismatch");
    PairHamiltonian h;
    h.n_sites = n;
    h.model = ModelTag::Ising;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            h.terms.push_back(PairTerm{
                i, j, couplings[k++] * kron(pauli::Z(), pauli::Z()), 0.0});
        }
    }
    std::vector<Matrix> f;
    for (double v : fields) {
        f.push_back(v * pauli::X());
    }
    detail::fold_fields(n, h.terms, f);
    return h;
}

/// XYZ model; one (Jx, Jy, Jz) triple per pair in lexicographic order.
[[nodiscard]] inline PairHamiltonian
xyz_from_couplings(int n, const std::vector<std::array<double, 3>> &couplings) {
    require(n >= 2, ErrorKind::InvalidArgument, "xyz needs N >= 2");
    require(couplings.size() == static_cast<std::size_t>(n * (n - 1) / 2),
            ErrorKind::InvalidArgument, "xyz coupling count mismatch");
    PairHamiltonian h;
    h.n_sites = n;
    h.model = ModelTag::XYZ;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto &c = couplings[k++];
            h.terms.push_back(
                PairTerm{i, j, detail::sigma_dot(c[0], c[1], c[2]), 0.0});
        }
    }
    return h;
}

/// Heisenberg model with isotropic couplings and a vector field per site.
[[nodiscard]] inline PairHamiltonian
heisenberg_from_couplings(int n, const std::vector<double> &couplings,
                          const std::vector<std::array<double, 3>> &fields) {
    require(n >= 2, ErrorKind::InvalidArgument, "heisenberg needs N >= 2");
    require(couplings.size() == static_cast<std::size_t>(n * (n - 1) / 2) &&
                fields.size() == static_cast<std::size_t>(n),
            ErrorKind::InvalidArgument, "heisenberg coupling count mismatch");
    PairHamiltonian h;
    h.n_sites = n;
    h.model = ModelTag::Heisenberg;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double jij = couplings[k++];
            h.terms.push_back(
                PairTerm{i, j, detail::sigma_dot(jij, jij, jij), 0.0});
        }
    }
    std::vector<Matrix> f;
    for (const auto &v : fields) {
        f.push_back(detail::field(v[0], v[1], v[2]));
    }
    detail::fold_fields(n, h.terms, f);
    return h;
}

/**
 * @brief Random transverse-field Ising model, couplings and fields uniform in
 * [-1, 1). Draw order: J_ij over pairs in lexicographic order, then h_i.
 */
[[nodiscard]] inline PairHamiltonian gen_ising(int n, std::uint64_t seed) {
    require(n >= 2, ErrorKind::InvalidArgument, "ising needs N >= 2");
    Rng rng = make_rng(seed);
    std::vector<double> couplings(static_cast<std::size_t>(n * (n - 1) / 2));
    for (auto &c : couplings) {
        c = uniform(rng, -1.0, 1.0);
    }
    std::vector<double> fields(static_cast<std::size_t>(n));
    for (auto &f : fields) {
        f = uniform(rng, -1.0, 1.0);
    }
    PairHamiltonian h = ising_from_couplings(n, couplings, fields);
    h.seed = seed;
    return h;
}

/// Random XYZ model: (Jx, Jy, Jz) per pair, pairs in lexicographic order.
[[nodiscard]] inline PairHamiltonian gen_xyz(int n, std::uint64_t seed) {
    require(n >= 2, ErrorKind::InvalidArgument, "xyz needs N >= 2");
    Rng rng = make_rng(seed);
    std::vector<std::array<double, 3>> couplings(
        static_cast<std::size_t>(n * (n - 1) / 2));
    for (auto &c : couplings) {
        for (auto &v : c) {
            v = uniform(rng, -1.0, 1.0);
        }
    }
    PairHamiltonian h = xyz_from_couplings(n, couplings);
    h.seed = seed;
    return h;
}

/// Random-field Heisenberg model: J_ij per pair, then (hx, hy, hz) per site.
[[nodiscard]] inline PairHamiltonian gen_heisenberg(int n,
                                                    std::uint64_t seed) {
    require(n >= 2, ErrorKind::InvalidArgument, "heisenberg needs N >= 2");
    Rng rng = make_rng(seed);
    std::vector<double> couplings(static_cast<std::size_t>(n * (n - 1) / 2));
    for (auto &c : couplings) {
        c = uniform(rng, -1.0, 1.0);
    }
    std::vector<std::array<double, 3>> fields(static_cast<std::size_t>(n));
    for (auto &f : fields) {
        for (auto &v : f) {
            v = uniform(rng, -1.0, 1.0);
        }
    }
    PairHamiltonian h = heisenberg_from_couplings(n, couplings, fields);
    h.seed = seed;
    return h;
}

/// Coefficient of the rainbow-chain bond (s, s+1).
[[nodiscard]] inline double rainbow_bond(int n, int s, double decay) {
    const int center = n / 2 - 1;
    if (s == center) {
        return 1.0;
    }
    // Half-integer label of the bond end closer to the middle.
    const int inner = s > center ? s : s + 1;
    const double l = std::abs(inner - 0.5 * (n - 1));
    return std::exp(-2.0 * decay * l);
}

/**
 * @brief Open Heisenberg chain whose couplings decay as exp(-2 h l) away from
 * the central bond.
 */
[[nodiscard]] inline PairHamiltonian gen_rainbow(int n, double decay) {
    require(n >= 4 && n % 2 == 0, ErrorKind::InvalidArgument,
            "rainbow chain needs an even N >= 4, got " + std::to_string(n));
    require(decay >= 0.0, ErrorKind::InvalidArgument,
            "rainbow decay must be non-negative");
    PairHamiltonian h;
    h.n_sites = n;
    h.model = ModelTag::Rainbow;
    h.parameter = decay;
    for (int s = 0; s + 1 < n; ++s) {
        const double c = rainbow_bond(n, s, decay);
        h.terms.push_back(PairTerm{s, s + 1, detail::sigma_dot(c, c, c), 0.0});
    }
    return h;
}

/// Largest eigenvalue below which a term counts as already non-positive.
inline constexpr double shift_slack = 1e-12;

/**
 * @brief Subtract gamma = max(lambda_max, 0) from every term so each term is
 * negative semidefinite. Idempotent.
 */
[[nodiscard]] inline PairHamiltonian shift_negative(PairHamiltonian h) {
    for (auto &t : h.terms) {
        const double top = eigh(t.matrix).values.maxCoeff();
        const double gamma = top > shift_slack ? top : 0.0;
        if (gamma > 0.0) {
            t.matrix -= gamma * Matrix::Identity(4, 4);
            t.gamma += gamma;
            h.total_shift += gamma;
        }
    }
    h.shifted = true;
    return h;
}

/// Number of sites above which a dense 2^N x 2^N matrix is refused.
inline constexpr int dense_max_sites = 12;

/// Sum of all terms embedded in the full 2^N-dimensional space.
[[nodiscard]] inline Matrix dense_matrix(const PairHamiltonian &h) {
    require(h.n_sites <= dense_max_sites, ErrorKind::Unsupported,
            "dense matrix for N = " + std::to_string(h.n_sites) +
                " is too large; use the Lanczos path");
    const auto n = static_cast<std::size_t>(h.n_sites);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Matrix d = Matrix::Zero(dim, dim);
    for (const auto &t : h.terms) {
        const auto p = static_cast<std::size_t>(t.i);
        const auto q = static_cast<std::size_t>(t.j);
        const std::size_t offs[4] = {0, std::size_t{1} << q,
                                     std::size_t{1} << p,
                                     (std::size_t{1} << p) |
                                         (std::size_t{1} << q)};
        kernels::for_each_pair_base(n, p, q, [&](std::size_t base) {
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    d(static_cast<Eigen::Index>(base + offs[a]),
                      static_cast<Eigen::Index>(base + offs[b])) +=
                        t.matrix(a, b);
                }
            }
        });
    }
    return d;
}

/// `out = H psi`, applying terms one at a time.
inline void apply_hamiltonian(const PairHamiltonian &h, const Complex *psi,
                              Complex *out) {
    const auto n = static_cast<std::size_t>(h.n_sites);
    const std::size_t dim = std::size_t{1} << n;
    std::fill(out, out + dim, Complex{0.0, 0.0});
    for (const auto &t : h.terms) {
        kernels::accumulate_op4(psi, out, n, kernels::to_op4(t.matrix),
                                static_cast<std::size_t>(t.i),
                                static_cast<std::size_t>(t.j));
    }
}

enum class ExactMethod { Auto, Dense, Lanczos };

struct ExactResult {
    /// Ground energy with the total shift added back.
    double energy = 0.0;
    Vector state;
};

/// Largest N for which Auto picks dense diagonalization.
inline constexpr int auto_dense_max_sites = 10;
inline constexpr int lanczos_max_sites = 20;

[[nodiscard]] inline ExactResult
exact_ground_state(const PairHamiltonian &h,
                   ExactMethod method = ExactMethod::Auto) {
    validate(h);
    if (method == ExactMethod::Auto) {
        method = h.n_sites <= auto_dense_max_sites ? ExactMethod::Dense
                                                   : ExactMethod::Lanczos;
    }
    ExactResult out;
    if (method == ExactMethod::Dense) {
        const EighResult e = eigh(dense_matrix(h), 1e-9);
        out.energy = e.values(0) + h.total_shift;
        out.state = e.vectors.col(0);
        return out;
    }
    require(h.n_sites <= lanczos_max_sites, ErrorKind::Unsupported,
            "exact diagonalization for N = " + std::to_string(h.n_sites) +
                " exceeds the supported size");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << h.n_sites);
    const LanczosResult r = lanczos_ground(
        [&h](const Vector &x, Vector &y) {
            apply_hamiltonian(h, x.data(), y.data());
        },
        dim);
    out.energy = r.value + h.total_shift;
    out.state = r.vector;
    return out;
}

/// Smallest eigenvalue of the unshifted Hamiltonian.
[[nodiscard]] inline double
exact_ground_energy(const PairHamiltonian &h,
                    ExactMethod method = ExactMethod::Auto) {
    return exact_ground_state(h, method).energy;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline constexpr const char *hamiltonian_magic = "eevqe-hamiltonian";
inline constexpr int hamiltonian_format_version = 1;

/**
 * @brief Text serialization. Every term is written as its full 4x4 matrix in
 * (re, im) pairs at 17 significant digits, so a reload is bit exact.
 */
inline void write_hamiltonian(std::ostream &os, const PairHamiltonian &h) {
    os << hamiltonian_magic << ' ' << hamiltonian_format_version << '\n';
    os << "model " << to_string(h.model) << '\n';
    os << "sites " << h.n_sites << '\n';
    os << "seed " << h.seed << '\n';
    os << "parameter " << detail::format_double(h.parameter) << '\n';
    os << "shifted " << (h.shifted ? 1 : 0) << '\n';
    os << "total_shift " << detail::format_double(h.total_shift) << '\n';
    os << "terms " << h.terms.size() << '\n';
    for (const auto &t : h.terms) {
        os << "term " << t.i << ' ' << t.j << ' '
           << detail::format_double(t.gamma) << '\n';
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                os << (c ? " " : "")
                   << detail::format_double(t.matrix(r, c).real()) << ' '
                   << detail::format_double(t.matrix(r, c).imag());
            }
            os << '\n';
        }
    }
}

[[nodiscard]] inline std::string serialize(const PairHamiltonian &h) {
    std::ostringstream os;
    write_hamiltonian(os, h);
    return os.str();
}

namespace detail {

inline void expect_key(std::istream &is, const std::string &key) {
    std::string word;
    require(static_cast<bool>(is >> word) && word == key, ErrorKind::Parse,
            "expected '" + key + "', found '" + word + "'");
}

} // namespace detail

[[nodiscard]] inline PairHamiltonian read_hamiltonian(std::istream &is) {
    std::string magic;
    int version = 0;
    require(static_cast<bool>(is >> magic >> version) &&
                magic == hamiltonian_magic,
            ErrorKind::Parse, "not a serialized hamiltonian");
    require(version == hamiltonian_format_version, ErrorKind::Parse,
            "unsupported hamiltonian format version " +
                std::to_string(version));
    PairHamiltonian h;
    std::string model;
    int shifted = 0;
    std::size_t n_terms = 0;
    detail::expect_key(is, "model");
    is >> model;
    h.model = parse_model(model);
    detail::expect_key(is, "sites");
    is >> h.n_sites;
    detail::expect_key(is, "seed");
    is >> h.seed;
    detail::expect_key(is, "parameter");
    is >> h.parameter;
    detail::expect_key(is, "shifted");
    is >> shifted;
    h.shifted = shifted != 0;
    detail::expect_key(is, "total_shift");
    is >> h.total_shift;
    detail::expect_key(is, "terms");
    is >> n_terms;
    require(static_cast<bool>(is), ErrorKind::Parse,
            "truncated hamiltonian header");
    for (std::size_t k = 0; k < n_terms; ++k) {
        PairTerm t;
        detail::expect_key(is, "term");
        is >> t.i >> t.j >> t.gamma;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                double re = 0.0;
                double im = 0.0;
                is >> re >> im;
                t.matrix(r, c) = Complex{re, im};
            }
        }
        require(static_cast<bool>(is), ErrorKind::Parse,
                "truncated term " + std::to_string(k));
        h.terms.push_back(std::move(t));
    }
    validate(h);
    return h;
}

[[nodiscard]] inline PairHamiltonian deserialize_hamiltonian(
    const std::string &text) {
    std::istringstream is(text);
    return read_hamiltonian(is);
}

/// 64-bit FNV-1a digest, used to audit that paired runs share an instance.
[[nodiscard]] inline std::string fnv1a_hex(const std::string &text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buf;
}

[[nodiscard]] inline std::string instance_hash(const PairHamiltonian &h) {
    return fnv1a_hex(serialize(h));
}

} // namespace eevqe

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
 * Statevector simulation of two-qubit gate circuits: gate application,
 * pair-Hamiltonian expectation values and two exact gradient paths.
 *
 * Amplitude k is the coefficient of |q_{N-1} ... q_0> with q_j = bit j of k.
 */
#pragma once
#include "circuit.hpp"
#include "error.hpp"
#include "hamiltonian.hpp"
#include "kernels.hpp"
#include "pauli_sum.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace eevqe {

/// Largest register the simulator accepts.
inline constexpr int statevector_max_qubits = 24;

struct StateVector {
    int n_qubits = 0;
    Vector amplitudes;

    /// |0...0> on n qubits.
    [[nodiscard]] static StateVector zero(int n) {
        require(n >= 1 && n <= statevector_max_qubits, ErrorKind::Unsupported,
                "statevector size " + std::to_string(n) + " outside [1, " +
                    std::to_string(statevector_max_qubits) + "]");
        StateVector s;
        s.n_qubits = n;
        s.amplitudes = Vector::Zero(Eigen::Index{1} << n);
        s.amplitudes(0) = 1.0;
        return s;
    }

    [[nodiscard]] double norm() const { return amplitudes.norm(); }
    [[nodiscard]] Complex *data() { return amplitudes.data(); }
    [[nodiscard]] const Complex *data() const { return amplitudes.data(); }
};

namespace detail {

[[nodiscard]] inline kernels::Op4 op4(const Mat4 &m) {
    kernels::Op4 out{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out[static_cast<std::size_t>(4 * r + c)] = m(r, c);
        }
    }
    return out;
}

inline void check_pair(const StateVector &s, int p, int q) {
    require(0 <= p && p < s.n_qubits && 0 <= q && q < s.n_qubits && p != q,
            ErrorKind::InvalidArgument,
            "qubit pair (" + std::to_string(p) + ", " + std::to_string(q) +
                ") invalid for " + std::to_string(s.n_qubits) + " qubits");
}

} // namespace detail

/// Apply a 4x4 operator indexed 2 * bit_p + bit_q.
inline void apply_gate(StateVector &s, const Mat4 &u, int p, int q) {
    detail::check_pair(s, p, q);
    kernels::apply_op4(s.data(), static_cast<std::size_t>(s.n_qubits),
                       detail::op4(u), static_cast<std::size_t>(p),
                       static_cast<std::size_t>(q));
}

inline void apply_gate(StateVector &s, const Gate &g) {
    apply_gate(s, g.matrix(), g.p, g.q);
}

/// <s| H |s> summed term by term on the reduced two-qubit blocks.
[[nodiscard]] inline double expectation(const StateVector &s,
                                        const PairHamiltonian &h) {
    require(h.n_sites == s.n_qubits, ErrorKind::DimensionMismatch,
            "hamiltonian on " + std::to_string(h.n_sites) +
                " sites for a state on " + std::to_string(s.n_qubits));
    double e = 0.0;
    for (const auto &t : h.terms) {
        e += kernels::expectation_op4(s.data(),
                                      static_cast<std::size_t>(s.n_qubits),
                                      kernels::to_op4(t.matrix),
                                      static_cast<std::size_t>(t.i),
                                      static_cast<std::size_t>(t.j))
                 .real();
    }
    return e;
}

[[nodiscard]] inline double expectation(const StateVector &s,
                                        const PauliSum &h) {
    require(h.n_sites == s.n_qubits, ErrorKind::DimensionMismatch,
            "hamiltonian on " + std::to_string(h.n_sites) +
                " sites for a state on " + std::to_string(s.n_qubits));
    return expectation(h, s.data());
}

/// H |s> as a new vector.
[[nodiscard]] inline StateVector apply_hamiltonian(const PairHamiltonian &h,
                                                   const StateVector &s) {
    StateVector out;
    out.n_qubits = s.n_qubits;
    out.amplitudes.resize(s.amplitudes.size());
    apply_hamiltonian(h, s.data(), out.data());
    return out;
}

/// The circuit applied to |0...0>.
[[nodiscard]] inline StateVector prepare(const Circuit &c) {
    StateVector s = StateVector::zero(c.n_qubits);
    for (const auto &g : c.gates) {
        apply_gate(s, g);
    }
    return s;
}

[[nodiscard]] inline StateVector prepare(const Circuit &c,
                                         const std::vector<double> &theta) {
    return prepare(c.with_parameters(theta));
}

[[nodiscard]] inline double energy(const Circuit &c,
                                   const std::vector<double> &theta,
                                   const PairHamiltonian &h) {
    return expectation(prepare(c, theta), h);
}

[[nodiscard]] inline double energy(const Circuit &c,
                                   const std::vector<double> &theta,
                                   const PauliSum &h) {
    return expectation(prepare(c, theta), h);
}

[[nodiscard]] inline double energy(const Circuit &c, const PairHamiltonian &h) {
    return expectation(prepare(c), h);
}

namespace detail {

template <class Hamiltonian>
[[nodiscard]] std::vector<double>
parameter_shift(const Circuit &c, const std::vector<double> &theta,
                const Hamiltonian &h) {
    const std::size_t n_params = c.parameter_count();
    require(theta.size() == n_params, ErrorKind::DimensionMismatch,
            "parameter vector has " + std::to_string(theta.size()) +
                " entries, circuit needs " + std::to_string(n_params));
    Circuit work = c.with_parameters(theta);
    const StateVector zero = StateVector::zero(c.n_qubits);
    std::vector<double> grad(n_params, 0.0);
    // States before each gate, so a shifted evaluation replays only the tail.
    std::vector<StateVector> prefix;
    prefix.reserve(work.gates.size());
    StateVector s = zero;
    for (const auto &g : work.gates) {
        prefix.push_back(s);
        apply_gate(s, g);
    }
    auto tail_energy = [&](std::size_t k) {
        StateVector t = prefix[k];
        for (std::size_t j = k; j < work.gates.size(); ++j) {
            apply_gate(t, work.gates[j]);
        }
        return expectation(t, h);
    };
    for (std::size_t k = 0; k < work.gates.size(); ++k) {
        for (std::size_t l = 0; l < cartan_parameter_count; ++l) {
            const bool inter = cartan::is_interaction(l);
            const double shift =
                inter ? std::numbers::pi / 4.0 : std::numbers::pi / 2.0;
            double &a = work.gates[k].angles[l];
            const double a0 = a;
            a = a0 + shift;
            const double plus = tail_energy(k);
            a = a0 - shift;
            const double minus = tail_energy(k);
            a = a0;
            grad[Circuit::index(k, l)] =
                inter ? plus - minus : (plus - minus) / 2.0;
        }
    }
    return grad;
}

} // namespace detail

/**
 * @brief Gradient by the parameter-shift rule.
 *
 * An Euler angle a enters as exp(-i a P / 2) with P a Pauli matrix, so
 * dE/da = [E(a + pi/2) - E(a - pi/2)] / 2. An interaction component enters
 * as exp(-i k G) with G = sigma x sigma, i.e. a = 2k with the same form, so
 * dE/dk = 2 dE/da = E(k + pi/4) - E(k - pi/4).
 */
[[nodiscard]] inline std::vector<double>
grad_parameter_shift(const Circuit &c, const std::vector<double> &theta,
                     const PairHamiltonian &h) {
    return detail::parameter_shift(c, theta, h);
}

/// Parameter-shift gradient with the Hamiltonian in Pauli form.
[[nodiscard]] inline std::vector<double>
grad_parameter_shift(const Circuit &c, const std::vector<double> &theta,
                     const PauliSum &h) {
    require(h.n_sites == c.n_qubits, ErrorKind::DimensionMismatch,
            "hamiltonian and circuit sizes differ");
    return detail::parameter_shift(c, theta, h);
}

namespace detail {

template <class ApplyH>
[[nodiscard]] double adjoint_pass(const Circuit &c,
                                  const std::vector<double> &theta,
                                  const ApplyH &apply_h,
                                  std::vector<double> &grad) {
    const std::size_t n_params = c.parameter_count();
    require(theta.size() == n_params, ErrorKind::DimensionMismatch,
            "parameter vector has " + std::to_string(theta.size()) +
                " entries, circuit needs " + std::to_string(n_params));
    const auto nq = static_cast<std::size_t>(c.n_qubits);
    std::vector<std::array<Mat4, cartan_parameter_count + 1>> mats;
    mats.reserve(c.gates.size());
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        CartanAngles a;
        std::copy_n(theta.begin() +
                        static_cast<std::ptrdiff_t>(Circuit::index(k, 0)),
                    cartan_parameter_count, a.begin());
        mats.push_back(su4_with_derivatives(a));
    }
    StateVector psi = StateVector::zero(c.n_qubits);
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        apply_gate(psi, mats[k][0], c.gates[k].p, c.gates[k].q);
    }
    StateVector lambda;
    lambda.n_qubits = psi.n_qubits;
    lambda.amplitudes.resize(psi.amplitudes.size());
    apply_h(psi.data(), lambda.data());
    const double e = psi.amplitudes.dot(lambda.amplitudes).real();
    grad.assign(n_params, 0.0);
    for (std::size_t k = c.gates.size(); k-- > 0;) {
        const Gate &g = c.gates[k];
        const auto p = static_cast<std::size_t>(g.p);
        const auto q = static_cast<std::size_t>(g.q);
        const auto inv = op4(mats[k][0].adjoint());
        kernels::apply_op4(psi.data(), nq, inv, p, q);
        // <lambda| dU |psi_{k-1}> = sum_ab dU[a][b] R[a][b].
        const kernels::Op4 r =
            kernels::pair_overlap(lambda.data(), psi.data(), nq, p, q);
        for (std::size_t l = 0; l < cartan_parameter_count; ++l) {
            const Mat4 &d = mats[k][l + 1];
            Complex acc{0.0, 0.0};
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    acc += d(a, b) * r[static_cast<std::size_t>(4 * a + b)];
                }
            }
            grad[Circuit::index(k, l)] = 2.0 * acc.real();
        }
        kernels::apply_op4(lambda.data(), nq, inv, p, q);
    }
    return e;
}

} // namespace detail

/**
 * @brief Energy and gradient by reverse-mode differentiation: one forward
 * pass, then a backward pass carrying H|psi> through the inverse gates.
 */
[[nodiscard]] inline double grad_adjoint(const Circuit &c,
                                         const std::vector<double> &theta,
                                         const PairHamiltonian &h,
                                         std::vector<double> &grad) {
    return detail::adjoint_pass(
        c, theta,
        [&h](const Complex *in, Complex *out) { apply_hamiltonian(h, in, out); },
        grad);
}

[[nodiscard]] inline double grad_adjoint(const Circuit &c,
                                         const std::vector<double> &theta,
                                         const PauliSum &h,
                                         std::vector<double> &grad) {
    require(h.n_sites == c.n_qubits, ErrorKind::DimensionMismatch,
            "hamiltonian and circuit sizes differ");
    return detail::adjoint_pass(
        c, theta, [&h](const Complex *in, Complex *out) { apply(h, in, out); },
        grad);
}

[[nodiscard]] inline std::vector<double>
grad_adjoint(const Circuit &c, const std::vector<double> &theta,
             const PairHamiltonian &h) {
    std::vector<double> grad;
    (void)grad_adjoint(c, theta, h, grad);
    return grad;
}

/// Energy and adjoint gradient of a circuit, on the fast path when possible.
class CircuitObjective {
  public:
    CircuitObjective(const Circuit &c, const PairHamiltonian &h)
        : circuit_{c}, h_{h} {
        require(h.n_sites == c.n_qubits, ErrorKind::DimensionMismatch,
                "hamiltonian on " + std::to_string(h.n_sites) +
                    " sites for a circuit on " + std::to_string(c.n_qubits) +
                    " qubits");
        if (h.n_sites <= pauli_sum_max_sites) {
            fast_ = compile(h);
        }
    }

    double operator()(const std::vector<double> &theta,
                      std::vector<double> &grad) const {
        return fast_ ? grad_adjoint(circuit_, theta, *fast_, grad)
                     : grad_adjoint(circuit_, theta, h_, grad);
    }

    [[nodiscard]] double value(const std::vector<double> &theta) const {
        return fast_ ? energy(circuit_, theta, *fast_)
                     : energy(circuit_, theta, h_);
    }

  private:
    const Circuit &circuit_;
    const PairHamiltonian &h_;
    std::optional<PauliSum> fast_;
};

/// |<a|b>|.
[[nodiscard]] inline double overlap_abs(const Vector &a, const Vector &b) {
    return std::abs(a.dot(b));
}

} // namespace eevqe

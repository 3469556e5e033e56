// Copyright 2026 The qhead Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file grad.hpp
 * Circuit execution and differentiation.
 *
 * Circuits are lowered gate lists (see lower_encodings). Every rotation gate
 * takes its angle either from a trainable parameter slot (Ry) or from
 * `scale * latent[slot]` (EncodeRy). Three gradient routes are provided:
 *
 *  - parameter shift: exact for RY, works on noisy trajectories;
 *  - adjoint: one forward and one backward sweep, noiseless only;
 *  - central finite differences: a test oracle.
 *
 * Latent gradients sum the contributions of every encoding gate that reads
 * the same latent slot.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qhead/ansatz.hpp"
#include "qhead/errors.hpp"
#include "qhead/noise.hpp"
#include "qhead/simcore.hpp"

namespace qhead {

/// One gradient entry per trainable parameter slot.
using GradientVector = std::vector<double>;

struct CircuitGradient {
    GradientVector params;
    std::vector<double> latent;
    double scale = 0.0; ///< d/d(scale) of the encoding angles
};

/// Weighted sum of single-qubit Z observables, sum_q w_q Z_q.
struct ZObservable {
    std::vector<double> weights;

    static ZObservable single(int num_qubits, int q) {
        ZObservable o;
        o.weights.assign(static_cast<std::size_t>(num_qubits), 0.0);
        o.weights.at(static_cast<std::size_t>(q)) = 1.0;
        return o;
    }

    [[nodiscard]] double expectation(const StateVector &state) const {
        const auto z = z_expectations(state);
        double e = 0.0;
        for (std::size_t q = 0; q < z.size(); ++q) {
            e += weights[q] * z[q];
        }
        return e;
    }

    /// O|psi>, diagonal in the computational basis.
    [[nodiscard]] StateVector apply(const StateVector &state) const {
        const int nq = state.num_qubits();
        std::vector<Complex> out(state.size());
        const auto amp = state.amplitudes();
        for (std::size_t i = 0; i < amp.size(); ++i) {
            double d = 0.0;
            for (int q = 0; q < nq; ++q) {
                const bool one = ((i >> (nq - 1 - q)) & 1U) != 0;
                d += one ? -weights[static_cast<std::size_t>(q)] : weights[static_cast<std::size_t>(q)];
            }
            out[i] = d * amp[i];
        }
        return StateVector(std::move(out));
    }
};

/// Per-gate rotation angles (0 for non-rotations).
inline std::vector<double> gate_angles(const GateList &gates, std::span<const double> params,
                                       std::span<const double> latent, double scale = 1.0) {
    std::vector<double> angles(gates.size(), 0.0);
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto &g = gates[i];
        if (g.kind == GateKind::Ry) {
            if (g.slot < 0 || static_cast<std::size_t>(g.slot) >= params.size()) {
                throw ConfigError("parameter slot " + std::to_string(g.slot) +
                                  " out of range for " + std::to_string(params.size()) +
                                  " parameters");
            }
            angles[i] = params[static_cast<std::size_t>(g.slot)];
        } else if (g.kind == GateKind::EncodeRy) {
            if (g.slot < 0 || static_cast<std::size_t>(g.slot) >= latent.size()) {
                throw ConfigError("latent slot " + std::to_string(g.slot) + " out of range for " +
                                  std::to_string(latent.size()) + " latent values");
            }
            angles[i] = scale * latent[static_cast<std::size_t>(g.slot)];
        } else if (g.kind == GateKind::Encode) {
            throw ConfigError("circuit contains an unlowered ENCODE step");
        }
    }
    return angles;
}

inline void apply_gate(StateVector &state, const Gate &g, double angle) {
    switch (g.kind) {
    case GateKind::Cnot:
        apply_cnot(state, g.q0, g.q1);
        break;
    case GateKind::Ry:
    case GateKind::EncodeRy:
        apply_ry(state, g.q0, angle);
        break;
    case GateKind::Pauli:
        apply_pauli(state, g.q0, g.pauli);
        break;
    case GateKind::Encode:
        throw ConfigError("circuit contains an unlowered ENCODE step");
    }
}

/// Applies U^dagger of a gate.
inline void apply_gate_inverse(StateVector &state, const Gate &g, double angle) {
    apply_gate(state, g, g.is_rotation() ? -angle : angle);
}

inline void run_gates(StateVector &state, const GateList &gates, std::span<const double> angles) {
    for (std::size_t i = 0; i < gates.size(); ++i) {
        apply_gate(state, gates[i], angles[i]);
    }
}

/// d<O>/d(angle_g) for every gate g by the two-term shift rule.
inline std::vector<double> shift_gradient_per_gate(const GateList &gates,
                                                   std::span<const double> angles,
                                                   const StateVector &initial,
                                                   const ZObservable &obs) {
    std::vector<double> grad(gates.size(), 0.0);
    std::vector<double> shifted(angles.begin(), angles.end());
    constexpr double shift = std::numbers::pi / 2.0;
    for (std::size_t g = 0; g < gates.size(); ++g) {
        if (!gates[g].is_rotation()) {
            continue;
        }
        shifted[g] = angles[g] + shift;
        StateVector plus = initial;
        run_gates(plus, gates, shifted);
        shifted[g] = angles[g] - shift;
        StateVector minus = initial;
        run_gates(minus, gates, shifted);
        shifted[g] = angles[g];
        grad[g] = 0.5 * (obs.expectation(plus) - obs.expectation(minus));
    }
    return grad;
}

/// Reverse-mode sweep: d<O>/d(angle_g) = Re <lambda_g| RY(pi) |psi_g>, where
/// psi_g is the state after gate g and lambda_g the observable-weighted state
/// pulled back to the same point.
inline std::vector<double> adjoint_gradient_per_gate(const GateList &gates,
                                                     std::span<const double> angles,
                                                     const StateVector &initial,
                                                     const ZObservable &obs,
                                                     double *value = nullptr) {
    std::vector<double> grad(gates.size(), 0.0);
    StateVector psi = initial;
    run_gates(psi, gates, angles);
    StateVector lambda = obs.apply(psi);
    if (value != nullptr) {
        double e = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            e += (std::conj(psi[i]) * lambda[i]).real();
        }
        *value = e;
    }
    for (std::size_t g = gates.size(); g-- > 0;) {
        const Gate &gate = gates[g];
        if (gate.is_rotation()) {
            const std::size_t stride = psi.mask(gate.q0);
            const auto pa = psi.amplitudes();
            const auto la = lambda.amplitudes();
            double acc = 0.0;
            detail::for_each_pair(pa.size(), stride, [&](std::size_t i0, std::size_t i1) {
                // RY(pi): (a0, a1) -> (-a1, a0)
                acc += (std::conj(la[i0]) * (-pa[i1]) + std::conj(la[i1]) * pa[i0]).real();
            });
            grad[g] = acc;
        }
        apply_gate_inverse(psi, gate, angles[g]);
        apply_gate_inverse(lambda, gate, angles[g]);
    }
    return grad;
}

/// Folds per-gate angle derivatives into parameter, latent and scale
/// gradients.
inline CircuitGradient accumulate_gradient(const GateList &gates, std::span<const double> per_gate,
                                           std::size_t num_params, std::span<const double> latent,
                                           double scale) {
    CircuitGradient out;
    out.params.assign(num_params, 0.0);
    out.latent.assign(latent.size(), 0.0);
    for (std::size_t g = 0; g < gates.size(); ++g) {
        const auto &gate = gates[g];
        const auto slot = static_cast<std::size_t>(gate.slot);
        if (gate.kind == GateKind::Ry) {
            out.params[slot] += per_gate[g];
        } else if (gate.kind == GateKind::EncodeRy) {
            out.latent[slot] += scale * per_gate[g];
            out.scale += latent[slot] * per_gate[g];
        }
    }
    return out;
}

namespace detail {

inline int circuit_width(const GateList &gates, std::size_t latent_size) {
    int width = 0;
    for (const auto &g : gates) {
        width = std::max({width, g.q0 + 1, g.q1 + 1});
    }
    return width > 0 ? width : static_cast<int>(latent_size);
}

inline GateList lowered_for(const GateList &circuit, std::span<const double> params,
                            std::span<const double> latent, int width) {
    const std::size_t slots = count_parameter_slots(circuit);
    if (params.size() != slots) {
        throw ConfigError("circuit has " + std::to_string(slots) + " parameter slots, got " +
                          std::to_string(params.size()) + " parameters");
    }
    if (circuit_width(circuit, 0) > width) {
        throw ConfigError("circuit touches qubits beyond the " + std::to_string(width) +
                          "-qubit register");
    }
    return lower_encodings(circuit, width, latent.size());
}

} // namespace detail

/// Noiseless, infinite-shot <Z_measured> of `circuit` run from |0...0>.
/// The register width is `num_qubits` (the circuit may leave qubits idle).
inline double evaluate_expectation(const GateList &circuit, std::span<const double> params,
                                   std::span<const double> latent, int measured, int num_qubits,
                                   double scale = 1.0) {
    const GateList gates = detail::lowered_for(circuit, params, latent, num_qubits);
    const auto angles = gate_angles(gates, params, latent, scale);
    StateVector state(num_qubits);
    run_gates(state, gates, angles);
    return z_expectation(state, measured);
}

/// Register width inferred from the gates.
inline double evaluate_expectation(const GateList &circuit, std::span<const double> params,
                                   std::span<const double> latent, int measured) {
    return evaluate_expectation(circuit, params, latent, measured,
                                detail::circuit_width(circuit, latent.size()));
}

inline CircuitGradient parameter_shift_gradient(const GateList &circuit,
                                                std::span<const double> params,
                                                std::span<const double> latent, int measured,
                                                int num_qubits, double scale = 1.0) {
    const GateList gates = detail::lowered_for(circuit, params, latent, num_qubits);
    const auto angles = gate_angles(gates, params, latent, scale);
    const StateVector init(num_qubits);
    const auto per_gate =
        shift_gradient_per_gate(gates, angles, init, ZObservable::single(num_qubits, measured));
    return accumulate_gradient(gates, per_gate, params.size(), latent, scale);
}

inline CircuitGradient parameter_shift_gradient(const GateList &circuit,
                                                std::span<const double> params,
                                                std::span<const double> latent, int measured) {
    return parameter_shift_gradient(circuit, params, latent, measured,
                                    detail::circuit_width(circuit, latent.size()));
}

/// Fast noiseless gradient. Passing a noise model that is not noiseless
/// raises UnsupportedModeError.
inline CircuitGradient adjoint_gradient(const GateList &circuit, std::span<const double> params,
                                        std::span<const double> latent, int measured,
                                        int num_qubits, const NoiseModel &noise = {},
                                        double scale = 1.0) {
    if (!noise.noiseless()) {
        throw UnsupportedModeError("adjoint gradient is only defined for noiseless evaluation");
    }
    const GateList gates = detail::lowered_for(circuit, params, latent, num_qubits);
    const auto angles = gate_angles(gates, params, latent, scale);
    const StateVector init(num_qubits);
    const auto per_gate =
        adjoint_gradient_per_gate(gates, angles, init, ZObservable::single(num_qubits, measured));
    return accumulate_gradient(gates, per_gate, params.size(), latent, scale);
}

inline CircuitGradient adjoint_gradient(const GateList &circuit, std::span<const double> params,
                                        std::span<const double> latent, int measured,
                                        const NoiseModel &noise = {}) {
    return adjoint_gradient(circuit, params, latent, measured,
                            detail::circuit_width(circuit, latent.size()), noise);
}

/// Central differences on parameters and latent values. Test oracle only.
inline CircuitGradient finite_difference_oracle(const GateList &circuit,
                                                std::span<const double> params,
                                                std::span<const double> latent, int measured,
                                                int num_qubits, double h) {
    if (!(h > 0.0)) {
        throw ConfigError("finite-difference step must be > 0");
    }
    auto eval = [&](std::span<const double> p, std::span<const double> l) {
        return evaluate_expectation(circuit, p, l, measured, num_qubits);
    };
    CircuitGradient out;
    std::vector<double> p(params.begin(), params.end());
    std::vector<double> l(latent.begin(), latent.end());
    out.params.resize(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double saved = p[j];
        p[j] = saved + h;
        const double ep = eval(p, l);
        p[j] = saved - h;
        const double em = eval(p, l);
        p[j] = saved;
        out.params[j] = (ep - em) / (2.0 * h);
    }
    out.latent.resize(l.size());
    for (std::size_t j = 0; j < l.size(); ++j) {
        const double saved = l[j];
        l[j] = saved + h;
        const double ep = eval(p, l);
        l[j] = saved - h;
        const double em = eval(p, l);
        l[j] = saved;
        out.latent[j] = (ep - em) / (2.0 * h);
    }
    return out;
}

inline CircuitGradient finite_difference_oracle(const GateList &circuit,
                                                std::span<const double> params,
                                                std::span<const double> latent, int measured,
                                                double h) {
    return finite_difference_oracle(circuit, params, latent, measured,
                                    detail::circuit_width(circuit, latent.size()), h);
}

} // namespace qhead

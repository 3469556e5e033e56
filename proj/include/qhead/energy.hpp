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
 * @file energy.hpp
 * Inference energy estimates for running the head circuit on a QPU versus
 * simulating it on a GPU, and the qubit count where the two cross.
 *
 *     E_qpu = Nq * (SQ * t_1q + TQ * t_2q) * shots * P_qpu / 1000     [kJ]
 *     E_gpu = 2^Nq * (4 SQ + 8 TQ) / f_gpu * P_gpu / 1000             [kJ]
 *
 * SQ and TQ are the single- and two-qubit gate counts of the circuit
 * (gate_counts in ansatz.hpp).
 */
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qhead/ansatz.hpp"
#include "qhead/errors.hpp"

namespace qhead {

struct EnergyConstants {
    double p_qpu = 300.0; ///< W per qubit
    double t_1q = 1e-4;   ///< s
    double t_2q = 1e-5;   ///< s
    double shots = 8000.0;
    double p_gpu = 700.0; ///< W
    double f_gpu = 3.4e13; ///< FLOP/s
    /// Use P_qpu in the GPU formula instead of P_gpu (the symbol printed in
    /// the source formula).
    bool gpu_uses_qpu_power = false;

    void validate() const {
        for (double v : {p_qpu, t_1q, t_2q, shots, p_gpu, f_gpu}) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ConfigError("energy constants must be positive and finite");
            }
        }
    }

    friend bool operator==(const EnergyConstants &, const EnergyConstants &) = default;
};

/// Kilojoules to run `constants.shots` executions of a circuit with the
/// given gate counts on an Nq-qubit QPU.
inline double qpu_energy(int qubits, const GateCounts &g, const EnergyConstants &c) {
    c.validate();
    return qubits *
           (static_cast<double>(g.single_qubit) * c.t_1q + static_cast<double>(g.two_qubit) * c.t_2q) *
           c.shots * (c.p_qpu / 1000.0);
}

/// Kilojoules to simulate the circuit once as a statevector on GPUs.
inline double gpu_energy(int qubits, const GateCounts &g, const EnergyConstants &c) {
    c.validate();
    const double flops =
        std::ldexp(4.0 * static_cast<double>(g.single_qubit) + 8.0 * static_cast<double>(g.two_qubit),
                   qubits);
    const double power = c.gpu_uses_qpu_power ? c.p_qpu : c.p_gpu;
    return flops / c.f_gpu * (power / 1000.0);
}

/// The simulator's qubit limit does not apply to estimates.
inline double qpu_energy(const CircuitSpec &spec, const EnergyConstants &c) {
    spec.validate_shape();
    return qpu_energy(spec.qubits, gate_counts(spec), c);
}

inline double gpu_energy(const CircuitSpec &spec, const EnergyConstants &c) {
    spec.validate_shape();
    return gpu_energy(spec.qubits, gate_counts(spec), c);
}

struct EnergyPoint {
    int qubits = 0;
    double e_qpu_kj = 0.0;
    double e_gpu_kj = 0.0;
};

/// Circuit family member at width `qubits` (connectivity pinned to 1).
inline CircuitSpec energy_family(int qubits, const CircuitSpec &shape) {
    CircuitSpec s = shape;
    s.qubits = qubits;
    s.connectivity = 1;
    return s;
}

inline std::vector<EnergyPoint> energy_curve(const EnergyConstants &c, const CircuitSpec &shape,
                                             int min_qubits = 2, int max_qubits = 60) {
    if (min_qubits < 1 || max_qubits < min_qubits) {
        throw ConfigError("energy scan needs 1 <= min_qubits <= max_qubits");
    }
    std::vector<EnergyPoint> out;
    for (int q = min_qubits; q <= max_qubits; ++q) {
        const auto s = energy_family(q, shape);
        out.push_back({q, qpu_energy(s, c), gpu_energy(s, c)});
    }
    return out;
}

/// Smallest width in the scan where E_gpu >= E_qpu, if any.
inline std::optional<int> find_crossover(const EnergyConstants &c, const CircuitSpec &shape,
                                         int min_qubits = 2, int max_qubits = 60) {
    for (const auto &p : energy_curve(c, shape, min_qubits, max_qubits)) {
        if (p.e_gpu_kj >= p.e_qpu_kj) {
            return p.qubits;
        }
    }
    return std::nullopt;
}

/// Number of sign changes of E_gpu - E_qpu along a curve.
inline int sign_changes(const std::vector<EnergyPoint> &curve) {
    int changes = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const bool a = curve[i - 1].e_gpu_kj >= curve[i - 1].e_qpu_kj;
        const bool b = curve[i].e_gpu_kj >= curve[i].e_qpu_kj;
        changes += a != b ? 1 : 0;
    }
    return changes;
}

} // namespace qhead

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
 * @file ansatz.hpp
 * Layout of the trainable circuit: entangling layers, blocks, and the
 * re-uploading head circuit, plus parameter and gate counting.
 *
 * An entangling layer of connectivity c on Q qubits is Q blocks; block i is
 * CNOT(control i, target (i + c) mod Q) followed by RY(theta) on the target.
 * A block of L layers cycles its connectivity through 1, 2, ..., C.
 * The head circuit is
 *
 *     ENCODE, main block (M layers), R x [ENCODE, re-upload block (N layers)]
 *
 * so it holds (M + R*N)*Q trainable angles and 1 + R encoding steps.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qhead/errors.hpp"
#include "qhead/simcore.hpp"

namespace qhead {

enum class GateKind : std::uint8_t {
    Cnot,     ///< q0 control, q1 target
    Ry,       ///< q0 qubit, slot = trainable parameter index
    Encode,   ///< slot = encoding step index; expands to angle-encoding RYs
    EncodeRy, ///< q0 qubit, slot = latent index (an expanded ENCODE)
    Pauli,    ///< q0 qubit, pauli = inserted error
};

struct Gate {
    GateKind kind = GateKind::Ry;
    int q0 = 0;
    int q1 = -1;
    int slot = -1;
    qhead::Pauli pauli = qhead::Pauli::I;

    static Gate cnot(int control, int target) { return {GateKind::Cnot, control, target, -1}; }
    static Gate ry(int qubit, int param) { return {GateKind::Ry, qubit, -1, param}; }
    static Gate encode(int step) { return {GateKind::Encode, -1, -1, step}; }
    static Gate encode_ry(int qubit, int latent) { return {GateKind::EncodeRy, qubit, -1, latent}; }
    static Gate error(int qubit, qhead::Pauli p) {
        return {GateKind::Pauli, qubit, -1, -1, p};
    }

    [[nodiscard]] bool is_rotation() const {
        return kind == GateKind::Ry || kind == GateKind::EncodeRy;
    }

    friend bool operator==(const Gate &, const Gate &) = default;
};

using GateList = std::vector<Gate>;

struct CircuitSpec {
    int qubits = 10;        ///< Q
    int connectivity = 1;   ///< C
    int main_layers = 2;    ///< M
    int reupload_layers = 1; ///< N
    int reupload_count = 4; ///< R
    int measured_qubits = 1;

    /// Structural checks only; widths beyond the simulator limit pass, so
    /// counts and energy estimates work for any size.
    void validate_shape() const {
        if (qubits < 2) {
            throw ConfigError("qubits must be >= 2, got " + std::to_string(qubits));
        }
        if (connectivity < 1 || connectivity >= qubits) {
            throw ConfigError("connectivity must satisfy 1 <= C < Q (Q=" + std::to_string(qubits) +
                              "), got " + std::to_string(connectivity));
        }
        if (main_layers < 0 || reupload_layers < 0 || reupload_count < 0) {
            throw ConfigError("main_layers, reupload_layers and reupload_count must be >= 0");
        }
        if (measured_qubits != 1) {
            throw ConfigError("exactly one measured qubit is supported, got " +
                              std::to_string(measured_qubits));
        }
    }

    /// Shape checks plus the simulator width limit.
    void validate() const {
        validate_shape();
        if (qubits > kMaxQubits) {
            throw ConfigError("qubits must be in [2, " + std::to_string(kMaxQubits) + "], got " +
                              std::to_string(qubits));
        }
    }

    friend bool operator==(const CircuitSpec &, const CircuitSpec &) = default;
};

inline GateList build_entangling_layer(int qubits, int c, int param_offset) {
    if (qubits < 2 || c < 1 || c >= qubits) {
        throw ConfigError("entangling layer needs 1 <= c < Q, got c=" + std::to_string(c) +
                          ", Q=" + std::to_string(qubits));
    }
    GateList gates;
    gates.reserve(2 * static_cast<std::size_t>(qubits));
    for (int i = 0; i < qubits; ++i) {
        const int target = (i + c) % qubits;
        gates.push_back(Gate::cnot(i, target));
        gates.push_back(Gate::ry(target, param_offset + i));
    }
    return gates;
}

/// Layer l (0-based) uses connectivity (l mod C) + 1.
inline GateList build_block(int qubits, int connectivity, int num_layers, int param_offset) {
    if (num_layers < 0) {
        throw ConfigError("number of layers must be >= 0, got " + std::to_string(num_layers));
    }
    GateList gates;
    for (int l = 0; l < num_layers; ++l) {
        const auto layer =
            build_entangling_layer(qubits, (l % connectivity) + 1, param_offset + l * qubits);
        gates.insert(gates.end(), layer.begin(), layer.end());
    }
    return gates;
}

inline GateList assemble_head_circuit(const CircuitSpec &spec) {
    spec.validate();
    const int q = spec.qubits;
    GateList gates;
    gates.push_back(Gate::encode(0));
    auto main = build_block(q, spec.connectivity, spec.main_layers, 0);
    gates.insert(gates.end(), main.begin(), main.end());
    int offset = spec.main_layers * q;
    for (int r = 0; r < spec.reupload_count; ++r) {
        gates.push_back(Gate::encode(r + 1));
        auto block = build_block(q, spec.connectivity, spec.reupload_layers, offset);
        gates.insert(gates.end(), block.begin(), block.end());
        offset += spec.reupload_layers * q;
    }
    return gates;
}

inline std::size_t count_parameters(const CircuitSpec &spec) {
    spec.validate_shape();
    return static_cast<std::size_t>(spec.main_layers + spec.reupload_count * spec.reupload_layers) *
           static_cast<std::size_t>(spec.qubits);
}

struct GateCounts {
    std::size_t single_qubit = 0; ///< SQ: trainable plus encoding RYs
    std::size_t two_qubit = 0;    ///< TQ: CNOTs

    friend bool operator==(const GateCounts &, const GateCounts &) = default;
};

/// `encode_rounds` is the number of stacked angle-encoding rounds per
/// ENCODE step (one per encoder when several encoders feed the circuit).
inline GateCounts gate_counts(const CircuitSpec &spec, int encode_rounds = 1) {
    const std::size_t trainable = count_parameters(spec);
    const auto q = static_cast<std::size_t>(spec.qubits);
    const auto steps = static_cast<std::size_t>(1 + spec.reupload_count);
    return {trainable + steps * q * static_cast<std::size_t>(encode_rounds), trainable};
}

/// Number of distinct trainable-parameter slots referenced by a gate list.
inline std::size_t count_parameter_slots(const GateList &gates) {
    int max_slot = -1;
    for (const auto &g : gates) {
        if (g.kind == GateKind::Ry && g.slot > max_slot) {
            max_slot = g.slot;
        }
    }
    return static_cast<std::size_t>(max_slot + 1);
}

/// Expands every ENCODE step into `latent_size / qubits` rounds of RYs.
/// Round e puts latent[e*Q + j] on qubit j.
inline GateList lower_encodings(const GateList &gates, int qubits, std::size_t latent_size) {
    const auto q = static_cast<std::size_t>(qubits);
    if (latent_size == 0 || latent_size % q != 0) {
        bool has_encode = false;
        for (const auto &g : gates) {
            has_encode = has_encode || g.kind == GateKind::Encode;
        }
        if (has_encode) {
            throw ConfigError("latent length " + std::to_string(latent_size) +
                              " is not a positive multiple of the circuit width " +
                              std::to_string(qubits));
        }
    }
    const std::size_t rounds = latent_size / q;
    GateList out;
    out.reserve(gates.size() + rounds * q * 5);
    for (const auto &g : gates) {
        if (g.kind != GateKind::Encode) {
            out.push_back(g);
            continue;
        }
        for (std::size_t e = 0; e < rounds; ++e) {
            for (std::size_t j = 0; j < q; ++j) {
                out.push_back(Gate::encode_ry(static_cast<int>(j), static_cast<int>(e * q + j)));
            }
        }
    }
    return out;
}

} // namespace qhead

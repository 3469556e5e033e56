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
 * @file noise.hpp
 * Depolarizing gate-noise trajectories and the differentiable shot sampler.
 *
 * Depolarizing convention: after each gate, with probability p, one
 * uniformly random non-identity Pauli is applied (3 choices after a 1-qubit
 * gate, 15 after a 2-qubit gate). Under this convention a single-qubit
 * channel contracts <Z> by (1 - 4p/3).
 *
 * Shot noise uses the Gaussian limit of the two-outcome multinomial
 * Z estimator on the measured qubit:
 *
 *     estimate = clamp(z + eps * sqrt((1 - z^2) / S), -1, 1),  eps ~ N(0, 1)
 *
 * The estimate carries gradient through its mean path only
 * (d estimate / dz = 1).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qhead/ansatz.hpp"
#include "qhead/errors.hpp"
#include "qhead/random.hpp"

namespace qhead {

struct NoiseModel {
    double p1q = 0.0;
    double p2q = 0.0;
    /// Measurement shots; empty means infinitely many (exact expectation).
    std::optional<std::uint64_t> shots;

    [[nodiscard]] bool has_gate_noise() const { return p1q > 0.0 || p2q > 0.0; }
    [[nodiscard]] bool has_shot_noise() const { return shots.has_value(); }
    [[nodiscard]] bool noiseless() const { return !has_gate_noise() && !has_shot_noise(); }

    void validate() const {
        auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!in_unit(p1q) || !in_unit(p2q)) {
            throw ConfigError("error rates must lie in [0, 1], got p1q=" + std::to_string(p1q) +
                              ", p2q=" + std::to_string(p2q));
        }
        if (shots && *shots == 0) {
            throw ConfigError("shots must be >= 1 (omit for infinite shots)");
        }
    }

    static NoiseModel none() { return {}; }

    friend bool operator==(const NoiseModel &, const NoiseModel &) = default;
};

struct Trajectory {
    GateList gates;
    std::size_t insertions = 0; ///< number of error events (a 2-qubit event counts once)
};

/// Samples one noisy trajectory of a lowered gate list (no ENCODE macros).
inline Trajectory sample_pauli_insertions(const GateList &gates, const NoiseModel &model, Rng &rng) {
    model.validate();
    Trajectory out;
    out.gates.reserve(gates.size() + gates.size() / 8);
    if (!model.has_gate_noise()) {
        for (const auto &g : gates) {
            if (g.kind == GateKind::Encode) {
                throw ConfigError("noise sampling needs a lowered circuit (ENCODE present)");
            }
        }
        out.gates = gates;
        return out;
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> one_qubit(1, 3);
    std::uniform_int_distribution<int> two_qubit(1, 15);
    for (const auto &g : gates) {
        out.gates.push_back(g);
        switch (g.kind) {
        case GateKind::Encode:
            throw ConfigError("noise sampling needs a lowered circuit (ENCODE present)");
        case GateKind::Ry:
        case GateKind::EncodeRy:
            if (coin(rng) < model.p1q) {
                out.gates.push_back(Gate::error(g.q0, static_cast<Pauli>(one_qubit(rng))));
                ++out.insertions;
            }
            break;
        case GateKind::Cnot:
            if (coin(rng) < model.p2q) {
                const int pair = two_qubit(rng);
                const auto pc = static_cast<Pauli>(pair / 4);
                const auto pt = static_cast<Pauli>(pair % 4);
                if (pc != Pauli::I) {
                    out.gates.push_back(Gate::error(g.q0, pc));
                }
                if (pt != Pauli::I) {
                    out.gates.push_back(Gate::error(g.q1, pt));
                }
                ++out.insertions;
            }
            break;
        case GateKind::Pauli:
            break;
        }
    }
    return out;
}

struct ShotSample {
    double estimate = 0.0;
    double mean_path = 0.0;
};

inline ShotSample shot_sample_expectation(double z, std::optional<std::uint64_t> shots, Rng &rng) {
    if (!(std::abs(z) <= 1.0 + 1e-12)) {
        throw ConfigError("expectation value out of [-1, 1]: " + std::to_string(z));
    }
    if (!shots) {
        return {z, z};
    }
    if (*shots == 0) {
        throw ConfigError("shots must be >= 1");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    const double eps = normal(rng);
    const double var = std::max(0.0, 1.0 - z * z) / static_cast<double>(*shots);
    return {std::clamp(z + eps * std::sqrt(var), -1.0, 1.0), z};
}

/// Exact multinomial counts, drawn as a chain of conditional binomials.
inline std::vector<std::uint64_t> multinomial_oracle(std::span<const double> p, std::uint64_t n,
                                                     Rng &rng) {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("probabilities must be finite and non-negative");
        }
        total += v;
    }
    if (p.empty() || std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("probabilities must sum to 1 within 1e-9, got " + std::to_string(total));
    }
    std::vector<std::uint64_t> counts(p.size(), 0);
    std::uint64_t remaining = n;
    double mass = 1.0;
    for (std::size_t i = 0; i + 1 < p.size() && remaining > 0; ++i) {
        const double q = mass > 0.0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        counts[i] = draw(rng);
        remaining -= counts[i];
        mass -= p[i];
    }
    counts.back() += remaining;
    return counts;
}

} // namespace qhead

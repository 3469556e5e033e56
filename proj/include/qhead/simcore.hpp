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
 * @file simcore.hpp
 * Statevector simulation over the gate set {RY, CNOT, X, Y, Z}.
 *
 * Qubit 0 is the most significant bit of the basis index: on a Q-qubit
 * register, qubit q owns the bit with value 2^(Q-1-q). Gates act in place
 * on the amplitude array with stride arithmetic; no 2^Q x 2^Q matrices are
 * formed.
 */
#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qhead/errors.hpp"

namespace qhead {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 24;
/// Amplitude-encoding inputs with a smaller L2 norm are rejected.
inline constexpr double kDegenerateNorm = 1e-12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_symbol(Pauli p) {
    constexpr char symbols[] = {'I', 'X', 'Y', 'Z'};
    return symbols[static_cast<int>(p)];
}

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(int num_qubits) : num_qubits_(checked_qubits(num_qubits)) {
        amplitudes_.assign(std::size_t{1} << num_qubits_, Complex{0.0, 0.0});
        amplitudes_[0] = Complex{1.0, 0.0};
    }

    /// Adopts raw amplitudes. The length must be a power of two; the caller
    /// is responsible for normalization.
    explicit StateVector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
        const std::size_t n = amplitudes_.size();
        if (n < 2 || (n & (n - 1)) != 0) {
            throw ConfigError("state vector length must be a power of two >= 2, got " +
                              std::to_string(n));
        }
        num_qubits_ = checked_qubits(static_cast<int>(std::countr_zero(n)));
    }

    [[nodiscard]] int num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amplitudes_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const { return amplitudes_[i]; }
    [[nodiscard]] Complex &operator[](std::size_t i) { return amplitudes_[i]; }

    [[nodiscard]] double norm() const {
        double s = 0.0;
        for (const auto &a : amplitudes_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    /// Bit mask of qubit q in a basis index.
    [[nodiscard]] std::size_t mask(int q) const {
        check_qubit(q);
        return std::size_t{1} << (num_qubits_ - 1 - q);
    }

    void check_qubit(int q) const {
        if (q < 0 || q >= num_qubits_) {
            throw ConfigError("qubit index " + std::to_string(q) + " out of range for " +
                              std::to_string(num_qubits_) + "-qubit state");
        }
    }

  private:
    static int checked_qubits(int q) {
        if (q < 1 || q > kMaxQubits) {
            throw ConfigError("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                              "], got " + std::to_string(q));
        }
        return q;
    }

    int num_qubits_ = 0;
    std::vector<Complex> amplitudes_;
};

inline StateVector zero_state(int num_qubits) { return StateVector(num_qubits); }

namespace detail {

/// Calls fn(i0, i1) for every index pair differing only in bit `stride`,
/// with i0 having the bit clear.
template <typename Fn> inline void for_each_pair(std::size_t dim, std::size_t stride, Fn &&fn) {
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t j = base; j < base + stride; ++j) {
            fn(j, j + stride);
        }
    }
}

} // namespace detail

inline void apply_ry(StateVector &state, int q, double theta) {
    const std::size_t stride = state.mask(q);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    auto amp = state.amplitudes();
    detail::for_each_pair(amp.size(), stride, [&](std::size_t i0, std::size_t i1) {
        const Complex a0 = amp[i0];
        const Complex a1 = amp[i1];
        amp[i0] = c * a0 - s * a1;
        amp[i1] = s * a0 + c * a1;
    });
}

inline void apply_cnot(StateVector &state, int control, int target) {
    if (control == target) {
        throw ConfigError("CNOT control and target must differ (both " +
                          std::to_string(control) + ")");
    }
    const std::size_t cmask = state.mask(control);
    const std::size_t stride = state.mask(target);
    auto amp = state.amplitudes();
    detail::for_each_pair(amp.size(), stride, [&](std::size_t i0, std::size_t i1) {
        if ((i0 & cmask) != 0) {
            std::swap(amp[i0], amp[i1]);
        }
    });
}

inline void apply_pauli(StateVector &state, int q, Pauli which) {
    const std::size_t stride = state.mask(q);
    auto amp = state.amplitudes();
    switch (which) {
    case Pauli::I:
        break;
    case Pauli::X:
        detail::for_each_pair(amp.size(), stride,
                              [&](std::size_t i0, std::size_t i1) { std::swap(amp[i0], amp[i1]); });
        break;
    case Pauli::Y: {
        const Complex im{0.0, 1.0};
        detail::for_each_pair(amp.size(), stride, [&](std::size_t i0, std::size_t i1) {
            const Complex a0 = amp[i0];
            amp[i0] = -im * amp[i1];
            amp[i1] = im * a0;
        });
        break;
    }
    case Pauli::Z:
        detail::for_each_pair(amp.size(), stride,
                              [&](std::size_t, std::size_t i1) { amp[i1] = -amp[i1]; });
        break;
    }
}

/// Loads x (zero-padded to 2^num_qubits) as normalized amplitudes.
inline StateVector amplitude_encode(std::span<const double> x, int num_qubits) {
    StateVector state(num_qubits);
    if (x.empty() || x.size() > state.size()) {
        throw ConfigError("amplitude encoding needs 1.." + std::to_string(state.size()) +
                          " values for " + std::to_string(num_qubits) + " qubits, got " +
                          std::to_string(x.size()));
    }
    double sq = 0.0;
    for (double v : x) {
        sq += v * v;
    }
    const double nrm = std::sqrt(sq);
    if (!(nrm >= kDegenerateNorm) || !std::isfinite(nrm)) {
        throw DataError("amplitude encoding input has degenerate norm " + std::to_string(nrm));
    }
    auto amp = state.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        amp[i] = i < x.size() ? Complex{x[i] / nrm, 0.0} : Complex{0.0, 0.0};
    }
    return state;
}

/// RY(x_i) on qubit i for every i.
inline void angle_encode(StateVector &state, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(state.num_qubits())) {
        throw ConfigError("angle encoding needs one value per qubit: expected " +
                          std::to_string(state.num_qubits()) + ", got " +
                          std::to_string(x.size()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        apply_ry(state, static_cast<int>(i), x[i]);
    }
}

inline double z_expectation(const StateVector &state, int q) {
    const std::size_t m = state.mask(q);
    double e = 0.0;
    const auto amp = state.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        const double p = std::norm(amp[i]);
        e += (i & m) == 0 ? p : -p;
    }
    return e;
}

/// <Z_q> for every qubit in one pass over the amplitudes.
inline std::vector<double> z_expectations(const StateVector &state) {
    const int nq = state.num_qubits();
    std::vector<double> e(static_cast<std::size_t>(nq), 0.0);
    const auto amp = state.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        const double p = std::norm(amp[i]);
        for (int q = 0; q < nq; ++q) {
            const bool one = ((i >> (nq - 1 - q)) & 1U) != 0;
            e[static_cast<std::size_t>(q)] += one ? -p : p;
        }
    }
    return e;
}

inline std::vector<double> probabilities(const StateVector &state) {
    std::vector<double> p(state.size());
    const auto amp = state.amplitudes();
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::norm(amp[i]);
    }
    return p;
}

} // namespace qhead

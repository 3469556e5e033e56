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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/dense.hpp"
#include "qhead/grad.hpp"

namespace qhead {
namespace {

constexpr double kPi = std::numbers::pi;

struct RandomCase {
    CircuitSpec spec;
    GateList circuit;
    std::vector<double> params;
    std::vector<double> latent;
};

RandomCase random_case(std::mt19937_64 &rng, int max_qubits) {
    RandomCase c;
    c.spec.qubits = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_qubits - 1));
    c.spec.connectivity = 1 + static_cast<int>(rng() % static_cast<unsigned>(c.spec.qubits - 1));
    c.spec.main_layers = static_cast<int>(rng() % 3);
    c.spec.reupload_layers = static_cast<int>(rng() % 2);
    c.spec.reupload_count = static_cast<int>(rng() % 3);
    c.circuit = assemble_head_circuit(c.spec);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    c.params.resize(count_parameters(c.spec));
    for (auto &p : c.params) {
        p = angle(rng);
    }
    c.latent.resize(static_cast<std::size_t>(c.spec.qubits));
    for (auto &l : c.latent) {
        l = unit(rng);
    }
    return c;
}

TEST(EvaluateExpectation, Cases) {
    const auto circuit = assemble_head_circuit(CircuitSpec{4, 1, 2, 1, 2});
    const std::vector<double> zeros(count_parameters(CircuitSpec{4, 1, 2, 1, 2}), 0.0);
    const std::vector<double> latent(4, 0.0);
    EXPECT_NEAR(evaluate_expectation(circuit, zeros, latent, 0), 1.0, 1e-12);

    const GateList single{Gate::ry(0, 0)};
    for (double theta : {0.0, 0.3, 1.7, -2.5}) {
        const std::vector<double> p{theta};
        EXPECT_NEAR(evaluate_expectation(single, p, {}, 0), std::cos(theta), 1e-12);
    }
}

TEST(EvaluateExpectation, MatchesDenseOracle) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_case(rng, 4);
        const int nq = c.spec.qubits;
        const auto gates = lower_encodings(c.circuit, nq, c.latent.size());
        std::vector<oracle::C> psi(std::size_t{1} << nq, 0.0);
        psi[0] = 1.0;
        for (const auto &g : gates) {
            if (g.kind == GateKind::Cnot) {
                psi = oracle::cnot(g.q0, g.q1, nq).apply(psi);
            } else {
                const double t = g.kind == GateKind::Ry ? c.params[static_cast<std::size_t>(g.slot)]
                                                        : c.latent[static_cast<std::size_t>(g.slot)];
                psi = oracle::embed(oracle::ry(t), g.q0, nq).apply(psi);
            }
        }
        const double e = evaluate_expectation(c.circuit, c.params, c.latent, 0);
        EXPECT_NEAR(e, oracle::z_expectation(psi, 0, nq), 1e-12);
        EXPECT_LE(std::abs(e), 1.0 + 1e-12);
    }
}

TEST(EvaluateExpectation, DimensionMismatch) {
    const auto circuit = assemble_head_circuit(CircuitSpec{3, 1, 1, 1, 1});
    const std::vector<double> params(5, 0.0);
    const std::vector<double> latent(3, 0.0);
    EXPECT_THROW(evaluate_expectation(circuit, params, latent, 0), ConfigError);
    const std::vector<double> ok(6, 0.0);
    const std::vector<double> bad_latent(2, 0.0);
    EXPECT_THROW(evaluate_expectation(circuit, ok, bad_latent, 0), ConfigError);
}

TEST(ParameterShift, SingleRotation) {
    const GateList single{Gate::ry(0, 0)};
    for (double theta : {0.0, 0.4, -1.1, 2.9}) {
        const std::vector<double> p{theta};
        const auto g = parameter_shift_gradient(single, p, {}, 0);
        ASSERT_EQ(g.params.size(), 1U);
        EXPECT_NEAR(g.params[0], -std::sin(theta), 1e-12);
    }
}

TEST(ParameterShift, MatchesFiniteDifferences) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = random_case(rng, 4);
        const int nq = c.spec.qubits;
        const auto ps = parameter_shift_gradient(c.circuit, c.params, c.latent, 0, nq);
        const auto fd = finite_difference_oracle(c.circuit, c.params, c.latent, 0, nq, 1e-4);
        for (std::size_t j = 0; j < ps.params.size(); ++j) {
            EXPECT_NEAR(ps.params[j], fd.params[j], 1e-6);
        }
        for (std::size_t j = 0; j < ps.latent.size(); ++j) {
            EXPECT_NEAR(ps.latent[j], fd.latent[j], 1e-6);
        }
    }
}

// Property: up to 6 qubits, shift rule vs finite differences within 1e-5.
TEST(ParameterShift, PropertyUpToSixQubits) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = random_case(rng, 6);
        const int nq = c.spec.qubits;
        const auto ps = parameter_shift_gradient(c.circuit, c.params, c.latent, 0, nq);
        const auto fd = finite_difference_oracle(c.circuit, c.params, c.latent, 0, nq, 1e-4);
        double worst = 0.0;
        for (std::size_t j = 0; j < ps.params.size(); ++j) {
            worst = std::max(worst, std::abs(ps.params[j] - fd.params[j]));
        }
        EXPECT_LT(worst, 1e-5);
    }
}

TEST(Adjoint, AgreesWithParameterShiftOn50RandomCases) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = random_case(rng, 6);
        const int nq = c.spec.qubits;
        const auto ps = parameter_shift_gradient(c.circuit, c.params, c.latent, 0, nq);
        const auto adj = adjoint_gradient(c.circuit, c.params, c.latent, 0, nq);
        ASSERT_EQ(adj.params.size(), count_parameters(c.spec));
        for (std::size_t j = 0; j < ps.params.size(); ++j) {
            EXPECT_NEAR(adj.params[j], ps.params[j], 1e-8);
        }
        for (std::size_t j = 0; j < ps.latent.size(); ++j) {
            EXPECT_NEAR(adj.latent[j], ps.latent[j], 1e-8);
        }
    }
}

TEST(Adjoint, EmptyAndNoisy) {
    const auto circuit = assemble_head_circuit(CircuitSpec{3, 1, 0, 0, 1});
    const std::vector<double> latent{0.1, 0.2, 0.3};
    const auto g = adjoint_gradient(circuit, {}, latent, 0, 3);
    EXPECT_TRUE(g.params.empty());
    EXPECT_EQ(g.latent.size(), 3U);

    NoiseModel noisy;
    noisy.p1q = 1e-3;
    EXPECT_THROW(adjoint_gradient(circuit, {}, latent, 0, 3, noisy), UnsupportedModeError);
    NoiseModel shots;
    shots.shots = 100;
    EXPECT_THROW(adjoint_gradient(circuit, {}, latent, 0, 3, shots), UnsupportedModeError);
}

TEST(FiniteDifference, TaylorBoundAndSecondOrderConvergence) {
    const GateList single{Gate::ry(0, 0)};
    const double theta = 0.9;
    const std::vector<double> p{theta};
    const auto fd = finite_difference_oracle(single, p, {}, 0, 1e-4);
    EXPECT_NEAR(fd.params[0], -std::sin(theta), 1e-6);

    // Error of central differences on cos: sin(theta) * h^2 / 6.
    double prev = 0.0;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const double err =
            std::abs(finite_difference_oracle(single, p, {}, 0, h).params[0] + std::sin(theta));
        if (prev > 0.0) {
            EXPECT_NEAR(prev / err, 4.0, 0.05);
        }
        prev = err;
    }
    EXPECT_THROW(finite_difference_oracle(single, p, {}, 0, 0.0), ConfigError);
}

TEST(ParameterShift, IndependentOfStepUnlikeOracle) {
    std::mt19937_64 rng(77);
    auto c = random_case(rng, 4);
    const int nq = c.spec.qubits;
    const auto ps = parameter_shift_gradient(c.circuit, c.params, c.latent, 0, nq);
    const auto coarse = finite_difference_oracle(c.circuit, c.params, c.latent, 0, nq, 0.3);
    const auto fine = finite_difference_oracle(c.circuit, c.params, c.latent, 0, nq, 1e-5);
    double coarse_err = 0.0;
    double fine_err = 0.0;
    for (std::size_t j = 0; j < ps.params.size(); ++j) {
        coarse_err = std::max(coarse_err, std::abs(coarse.params[j] - ps.params[j]));
        fine_err = std::max(fine_err, std::abs(fine.params[j] - ps.params[j]));
    }
    if (!ps.params.empty()) {
        EXPECT_LT(fine_err, 1e-8);
        EXPECT_GT(coarse_err, fine_err);
    }
}

TEST(ParameterShift, ScaleDerivative) {
    // d/ds of <Z> with angles s * latent equals sum_k latent_k * dE/dangle_k.
    const auto circuit = assemble_head_circuit(CircuitSpec{3, 1, 1, 1, 1});
    std::vector<double> params{0.3, -0.2, 0.5, 1.1, -0.7, 0.05};
    std::vector<double> latent{0.4, -0.6, 0.9};
    const double s = 1.3;
    const auto g = adjoint_gradient(circuit, params, latent, 0, 3, {}, s);
    auto eval = [&](double scale) {
        std::vector<double> scaled(latent);
        for (auto &v : scaled) {
            v *= scale;
        }
        return evaluate_expectation(circuit, params, scaled, 0, 3);
    };
    const double h = 1e-5;
    EXPECT_NEAR(g.scale, (eval(s + h) - eval(s - h)) / (2 * h), 1e-8);
}

} // namespace
} // namespace qhead

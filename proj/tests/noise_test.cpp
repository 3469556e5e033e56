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

#include "oracles/density_matrix.hpp"
#include "qhead/grad.hpp"
#include "qhead/noise.hpp"

namespace qhead {
namespace {

double trajectory_z(const GateList &gates, std::span<const double> params,
                    std::span<const double> latent, int nq) {
    StateVector s(nq);
    run_gates(s, gates, gate_angles(gates, params, latent));
    return z_expectation(s, 0);
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

template <typename Fn> Moments moments(int n, Fn &&draw) {
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = draw();
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    return {mean, (sq - n * mean * mean) / (n - 1)};
}

TEST(PauliInsertions, ZeroRatesLeaveCircuitUnchanged) {
    const auto gates = lower_encodings(assemble_head_circuit(CircuitSpec{4, 1, 2, 1, 2}), 4, 4);
    Rng rng(1);
    const auto t = sample_pauli_insertions(gates, NoiseModel{}, rng);
    EXPECT_EQ(t.gates, gates);
    EXPECT_EQ(t.insertions, 0U);
}

TEST(PauliInsertions, RejectsUnloweredCircuit) {
    const auto gates = assemble_head_circuit(CircuitSpec{4, 1, 2, 1, 2});
    Rng rng(1);
    NoiseModel m{0.1, 0.1, {}};
    EXPECT_THROW(sample_pauli_insertions(gates, m, rng), ConfigError);
    EXPECT_THROW(sample_pauli_insertions(gates, NoiseModel{}, rng), ConfigError);
}

TEST(PauliInsertions, ExpectedCountMatchesClosedForm) {
    const CircuitSpec spec{5, 2, 2, 1, 3};
    const auto gates = lower_encodings(assemble_head_circuit(spec), 5, 5);
    const auto counts = gate_counts(spec);
    const NoiseModel m{0.05, 0.2, {}};
    const double expected = m.p1q * static_cast<double>(counts.single_qubit) +
                            m.p2q * static_cast<double>(counts.two_qubit);
    const double var = m.p1q * (1 - m.p1q) * static_cast<double>(counts.single_qubit) +
                       m.p2q * (1 - m.p2q) * static_cast<double>(counts.two_qubit);
    Rng rng(123);
    const int trials = 20000;
    const auto mo = moments(trials, [&] {
        return static_cast<double>(sample_pauli_insertions(gates, m, rng).insertions);
    });
    EXPECT_NEAR(mo.mean, expected, 4.0 * std::sqrt(var / trials));
}

TEST(PauliInsertions, InsertedPaulisSitOnTheGateQubits) {
    const auto gates = lower_encodings(assemble_head_circuit(CircuitSpec{3, 1, 1, 1, 1}), 3, 3);
    Rng rng(5);
    const auto t = sample_pauli_insertions(gates, NoiseModel{1.0, 1.0, {}}, rng);
    EXPECT_EQ(t.insertions, gates.size());
    for (std::size_t i = 1; i < t.gates.size(); ++i) {
        if (t.gates[i].kind != GateKind::Pauli) {
            continue;
        }
        EXPECT_NE(t.gates[i].pauli, Pauli::I);
    }
}

TEST(PauliInsertions, SingleQubitContraction) {
    const GateList gates{Gate::ry(0, 0)};
    const double theta = 0.7;
    const std::vector<double> params{theta};
    const double p = 0.3;
    const NoiseModel m{p, 0.0, {}};

    oracle::DensityMatrix dm(1);
    dm.run(gates, {theta}, p, 0.0);
    const double closed = (1.0 - 4.0 * p / 3.0) * std::cos(theta);
    EXPECT_NEAR(dm.z(0), closed, 1e-12);

    Rng rng(9);
    const int trials = 40000;
    const auto mo = moments(trials, [&] {
        return trajectory_z(sample_pauli_insertions(gates, m, rng).gates, params, {}, 1);
    });
    EXPECT_NEAR(mo.mean, closed, 4.0 * std::sqrt(mo.var / trials));
}

TEST(PauliInsertions, TwoQubitCircuitMatchesDensityMatrix) {
    const auto gates = lower_encodings(assemble_head_circuit(CircuitSpec{2, 1, 2, 1, 1}), 2, 2);
    const std::vector<double> params{0.3, -1.2, 0.8, 2.0, -0.4, 1.5};
    const std::vector<double> latent{0.6, -0.9};
    const NoiseModel m{0.05, 0.15, {}};
    oracle::DensityMatrix dm(2);
    dm.run(gates, gate_angles(gates, params, latent), m.p1q, m.p2q);

    Rng rng(31);
    const int trials = 40000;
    const auto mo = moments(trials, [&] {
        return trajectory_z(sample_pauli_insertions(gates, m, rng).gates, params, latent, 2);
    });
    EXPECT_NEAR(mo.mean, dm.z(0), 4.0 * std::sqrt(mo.var / trials));
}

TEST(PauliInsertions, DeterministicForSeed) {
    const auto gates = lower_encodings(assemble_head_circuit(CircuitSpec{4, 1, 2, 1, 2}), 4, 4);
    const NoiseModel m{0.1, 0.2, {}};
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(sample_pauli_insertions(gates, m, a).gates,
                  sample_pauli_insertions(gates, m, b).gates);
    }
}

TEST(ShotSampler, DeterministicOutcomes) {
    Rng rng(0);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(shot_sample_expectation(1.0, 10, rng).estimate, 1.0);
        EXPECT_EQ(shot_sample_expectation(-1.0, 10, rng).estimate, -1.0);
    }
}

TEST(ShotSampler, StandardDeviationAtZero) {
    Rng rng(2718);
    const auto mo = moments(100000, [&] { return shot_sample_expectation(0.0, 8192, rng).estimate; });
    EXPECT_NEAR(std::sqrt(mo.var), 1.0 / std::sqrt(8192.0), 0.02 / std::sqrt(8192.0));
}

TEST(ShotSampler, InfiniteShotsIsExact) {
    Rng rng(1);
    Rng untouched(1);
    const auto s = shot_sample_expectation(0.37, std::nullopt, rng);
    EXPECT_EQ(s.estimate, 0.37);
    EXPECT_EQ(s.mean_path, 0.37);
    EXPECT_EQ(rng(), untouched());
    const auto mo = moments(2000, [&] { return shot_sample_expectation(0.37, 1ULL << 40, rng).estimate; });
    EXPECT_NEAR(mo.mean, 0.37, 1e-6);
}

TEST(ShotSampler, RectifiedIntoPhysicalRange) {
    Rng rng(3);
    for (double z : {-1.0, -0.999, -0.5, 0.0, 0.98, 0.9999, 1.0}) {
        for (std::uint64_t shots : {1ULL, 2ULL, 5ULL, 100ULL}) {
            for (int i = 0; i < 500; ++i) {
                const auto s = shot_sample_expectation(z, shots, rng);
                EXPECT_GE(s.estimate, -1.0);
                EXPECT_LE(s.estimate, 1.0);
                EXPECT_EQ(s.mean_path, z);
            }
        }
    }
    EXPECT_THROW(shot_sample_expectation(1.5, 10, rng), ConfigError);
}

TEST(Multinomial, Degenerate) {
    Rng rng(0);
    const std::vector<double> p{1.0, 0.0};
    const auto c = multinomial_oracle(p, 777, rng);
    EXPECT_EQ(c[0], 777U);
    EXPECT_EQ(c[1], 0U);
}

TEST(Multinomial, BinomialMoments) {
    Rng rng(8);
    const std::vector<double> p{0.5, 0.5};
    const auto mo = moments(20000, [&] {
        return static_cast<double>(multinomial_oracle(p, 8192, rng)[0]);
    });
    EXPECT_NEAR(mo.mean, 4096.0, 4.0 * std::sqrt(2048.0 / 20000));
    EXPECT_NEAR(mo.var, 2048.0, 0.05 * 2048.0);
}

TEST(Multinomial, RejectsInvalidProbabilities) {
    Rng rng(0);
    EXPECT_THROW(multinomial_oracle(std::vector<double>{0.5, 0.4}, 10, rng), ConfigError);
    EXPECT_THROW(multinomial_oracle(std::vector<double>{1.2, -0.2}, 10, rng), ConfigError);
    EXPECT_THROW(multinomial_oracle(std::vector<double>{}, 10, rng), ConfigError);
}

TEST(Multinomial, CountsSumToShots) {
    Rng rng(4);
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    for (int i = 0; i < 100; ++i) {
        const auto c = multinomial_oracle(p, 1000, rng);
        EXPECT_EQ(c[0] + c[1] + c[2] + c[3], 1000U);
    }
}

// Gaussian sampler vs the exact two-outcome estimator (n0 - n1) / n.
TEST(ShotSampler, AgreesWithMultinomialEstimator) {
    const double z = 0.3;
    const std::uint64_t n = 8192;
    const std::vector<double> p{(1 + z) / 2, (1 - z) / 2};
    Rng a(10);
    Rng b(11);
    const int draws = 100000;
    const auto gauss = moments(draws, [&] { return shot_sample_expectation(z, n, a).estimate; });
    const auto exact = moments(draws, [&] {
        const auto c = multinomial_oracle(p, n, b);
        return (static_cast<double>(c[0]) - static_cast<double>(c[1])) / static_cast<double>(n);
    });
    EXPECT_NEAR(gauss.mean, exact.mean, 0.03 * std::abs(exact.mean));
    EXPECT_NEAR(gauss.var, exact.var, 0.03 * exact.var);
}

TEST(NoiseModel, Validation) {
    EXPECT_THROW((NoiseModel{-0.1, 0.0, {}}.validate()), ConfigError);
    EXPECT_THROW((NoiseModel{0.0, 1.5, {}}.validate()), ConfigError);
    EXPECT_THROW((NoiseModel{0.0, 0.0, 0}.validate()), ConfigError);
    EXPECT_TRUE(NoiseModel{}.noiseless());
    EXPECT_FALSE((NoiseModel{0.0, 0.0, 8192}.noiseless()));
}

} // namespace
} // namespace qhead

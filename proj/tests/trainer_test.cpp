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
#include <numeric>
#include <random>

#include "qhead/baselines.hpp"
#include "qhead/head.hpp"
#include "qhead/trainer.hpp"

namespace qhead {
namespace {

// Predicts the class stored in feature 0 (or its complement).
class FeatureOracle final : public Classifier {
  public:
    explicit FeatureOracle(std::size_t dim, bool invert = false) : dim_(dim), invert_(invert) {}
    [[nodiscard]] std::string kind() const override { return "oracle"; }
    [[nodiscard]] int num_classes() const override { return 2; }
    [[nodiscard]] std::size_t input_dim() const override { return dim_; }
    std::span<double> parameters() override { return p_; }
    [[nodiscard]] std::span<const double> parameters() const override { return p_; }
    [[nodiscard]] std::vector<ParamBlock> layout() const override { return {{"p", 1}}; }
    void initialize(std::uint64_t) override {}
    [[nodiscard]] std::vector<Logits> logits(const std::vector<Row> &rows,
                                             std::span<const std::uint64_t>,
                                             const NoiseModel &) const override {
        std::vector<Logits> out;
        for (const auto &r : rows) {
            const bool one = (r[0] > 0.5) != invert_;
            out.push_back(one ? Logits{0.0, 1.0} : Logits{1.0, 0.0});
        }
        return out;
    }
    double loss_and_gradient(const Batch &, const NoiseModel &, std::span<double> g) override {
        std::fill(g.begin(), g.end(), 0.0);
        return 0.0;
    }

  private:
    std::size_t dim_;
    bool invert_;
    std::vector<double> p_{0.0};
};

EmbeddingDataset labeled_by_feature(std::size_t n) {
    EmbeddingDataset ds;
    ds.dim = 2;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>((i * 7) % 3 == 0);
        ds.labels.push_back(label);
        ds.values.push_back(label);
        ds.values.push_back(0.25);
    }
    return ds;
}

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

TEST(CrossEntropy, EqualLogitsGiveLogTwo) {
    const auto r = cross_entropy_loss(std::vector<double>{0.0, 0.0}, 0);
    EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
    EXPECT_NEAR(r.grad[0], -0.5, 1e-15);
    EXPECT_NEAR(r.grad[1], 0.5, 1e-15);
}

TEST(CrossEntropy, ConfidentCorrectLogitsNearZero) {
    const auto r = cross_entropy_loss(std::vector<double>{10.0, -10.0}, 0);
    // log(1 + e^-20)
    EXPECT_NEAR(r.loss, 2.061153620314381e-9, 1e-22);
    const auto wrong = cross_entropy_loss(std::vector<double>{10.0, -10.0}, 1);
    EXPECT_NEAR(wrong.loss, 20.0, 1e-8);
}

TEST(CrossEntropy, StableForHugeLogits) {
    const auto r = cross_entropy_loss(std::vector<double>{1000.0, -1000.0, 0.0}, 1);
    EXPECT_NEAR(r.loss, 2000.0, 1e-9);
    EXPECT_TRUE(std::isfinite(r.grad[0]));
}

TEST(CrossEntropy, GradientMatchesFiniteDifferences) {
    const std::vector<double> l{0.3, -1.2, 2.1, 0.05};
    for (int label = 0; label < 4; ++label) {
        const auto r = cross_entropy_loss(l, label);
        for (std::size_t i = 0; i < l.size(); ++i) {
            auto p = l;
            auto m = l;
            p[i] += 1e-6;
            m[i] -= 1e-6;
            const double fd =
                (cross_entropy_loss(p, label).loss - cross_entropy_loss(m, label).loss) / 2e-6;
            EXPECT_NEAR(r.grad[i], fd, 1e-8);
        }
    }
}

TEST(CrossEntropy, RejectsLabelOutOfRange) {
    EXPECT_THROW(cross_entropy_loss(std::vector<double>{0.0, 0.0}, 2), ConfigError);
    EXPECT_THROW(cross_entropy_loss(std::vector<double>{0.0, 0.0}, -1), ConfigError);
}

TEST(Adam, ZeroGradientWithoutDecayLeavesParameters) {
    std::vector<double> p{1.0, -2.0, 3.5};
    const std::vector<double> g(3, 0.0);
    AdamState s;
    TrainConfig cfg;
    for (int e = 0; e < 5; ++e) {
        adam_step(p, g, s, cfg, e);
    }
    EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.5}));
}

TEST(Adam, ZeroGradientWithDecayShrinksGeometrically) {
    std::vector<double> p{2.0};
    AdamState s;
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.weight_decay = 0.5;
    adam_step(p, std::vector<double>{0.0}, s, cfg, 0);
    adam_step(p, std::vector<double>{0.0}, s, cfg, 0);
    EXPECT_NEAR(p[0], 2.0 * 0.95 * 0.95, 1e-15);
}

TEST(Adam, MatchesHandComputedSteps) {
    std::vector<double> p{0.5};
    AdamState s;
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.lr_decay = 0.5;
    adam_step(p, std::vector<double>{2.0}, s, cfg, 0);
    // First step: mhat = g, vhat = g^2, so the move is rate * g / (|g| + eps).
    EXPECT_NEAR(p[0], 0.5 - 0.01 * 2.0 / (2.0 + 1e-8), 1e-15);
    const double p1 = p[0];
    adam_step(p, std::vector<double>{-1.0}, s, cfg, 1);
    const double m = 0.9 * 0.1 * 2.0 + 0.1 * -1.0;
    const double v = 0.999 * 0.001 * 4.0 + 0.001 * 1.0;
    const double mhat = m / (1 - 0.81);
    const double vhat = v / (1 - 0.999 * 0.999);
    EXPECT_NEAR(p[0], p1 - 0.005 * mhat / (std::sqrt(vhat) + 1e-8), 1e-15);
}

TEST(Adam, LearningRateDecaysPerEpoch) {
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.lr_decay = 0.5;
    for (int epoch : {0, 1, 3}) {
        std::vector<double> p{0.0};
        AdamState s;
        adam_step(p, std::vector<double>{1.0}, s, cfg, epoch);
        EXPECT_NEAR(-p[0], 0.1 * std::pow(0.5, epoch), 1e-9);
    }
}

TEST(Adam, ConvergesOnQuadratic) {
    std::vector<double> p{1.0, -3.0};
    AdamState s;
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    for (int t = 0; t < 2000; ++t) {
        const std::vector<double> g{2.0 * p[0], 2.0 * (p[1] - 1.0)};
        adam_step(p, g, s, cfg, 0);
    }
    EXPECT_NEAR(p[0], 0.0, 1e-3);
    EXPECT_NEAR(p[1], 1.0, 1e-3);
}

TEST(Adam, RejectsSizeMismatch) {
    std::vector<double> p{1.0, 2.0};
    AdamState s;
    EXPECT_THROW(adam_step(p, std::vector<double>{1.0}, s, TrainConfig{}, 0), ConfigError);
}

TEST(TrainConfig, Validation) {
    TrainConfig c;
    c.learning_rate = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.lr_decay = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.epochs = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Evaluate, PerfectAndInvertedPredictors) {
    const auto ds = labeled_by_feature(30);
    const auto idx = iota(30);
    EXPECT_DOUBLE_EQ(evaluate(FeatureOracle(2), ds, idx, {}, 0), 1.0);
    EXPECT_DOUBLE_EQ(evaluate(FeatureOracle(2, true), ds, idx, {}, 0), 0.0);
}

TEST(Evaluate, ConstantPredictorOnBalancedSplitIsHalf) {
    EmbeddingDataset ds;
    ds.dim = 1;
    for (int i = 0; i < 40; ++i) {
        ds.values.push_back(0.1 * i);
        ds.labels.push_back(i % 2);
    }
    LogisticRegression zero(1);
    EXPECT_DOUBLE_EQ(evaluate(zero, ds, iota(40), {}, 0), 0.5);
}

TEST(Evaluate, RejectsEmptySplit) {
    const auto ds = labeled_by_feature(4);
    EXPECT_THROW(evaluate(FeatureOracle(2), ds, std::vector<std::size_t>{}, {}, 0), ConfigError);
}

TEST(Evaluate, NoisyAccuracyIndependentOfRowOrder) {
    auto ds = synthetic_clusters(ClusterSpec{8, 12, 4.0, 3, 2.0});
    HeadConfig hc;
    hc.input_dim = 8;
    hc.encoder.qubits = 3;
    hc.encoder.layers = 2;
    hc.pqc.qubits = 3;
    QuantumHead head(hc);
    head.initialize(5);
    NoiseModel noise;
    noise.shots = 64;
    noise.p1q = 0.01;
    noise.p2q = 0.02;
    auto idx = iota(ds.size());
    const double a = evaluate(head, ds, idx, noise, 11);
    std::reverse(idx.begin(), idx.end());
    EXPECT_DOUBLE_EQ(evaluate(head, ds, idx, noise, 11), a);
}

EmbeddingDataset split_clusters(std::size_t dim, double separation, std::uint64_t seed,
                                double shift = 0.0, std::size_t test_per_class = 100) {
    auto ds = synthetic_clusters(ClusterSpec{dim, 256 + test_per_class, separation, seed, shift});
    return make_standard_splits(ds, seed + 1);
}

TEST(Train, LogisticReachesNearPerfectAccuracyOnSeparableClusters) {
    const auto ds = split_clusters(768, 10.0, 1);
    LogisticRegression model(768);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.seed = 4;
    const auto r = train(model, ds, cfg, {});
    EXPECT_GE(r.best_val_acc, 0.99);
    EXPECT_GE(r.test_acc, 0.99);
    EXPECT_EQ(r.parameter_count, 769U);
}

TEST(Train, EpochLossDoesNotIncreaseEarly) {
    const auto ds = split_clusters(64, 3.0, 2);
    LogisticRegression model(64);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 9;
    const auto r = train(model, ds, cfg, {});
    ASSERT_EQ(r.history.size(), 10U);
    EXPECT_NEAR(r.history[0].loss, std::log(2.0), 0.2);
    for (std::size_t e = 1; e < r.history.size(); ++e) {
        EXPECT_LE(r.history[e].loss, r.history[e - 1].loss + 1e-12) << "epoch " << e;
    }
}

TEST(Train, SameSeedSameReportAndParameters) {
    const auto ds = split_clusters(16, 2.0, 3);
    MlpClassifier a(16, 2, MlpConfig{1, 8, true});
    MlpClassifier b(16, 2, MlpConfig{1, 8, true});
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 77;
    const auto ra = train(a, ds, cfg, {});
    const auto rb = train(b, ds, cfg, {});
    EXPECT_EQ(ra, rb);
    EXPECT_TRUE(std::ranges::equal(a.parameters(), b.parameters()));
    EXPECT_TRUE(std::ranges::equal(a.buffers(), b.buffers()));
    cfg.seed = 78;
    MlpClassifier c(16, 2, MlpConfig{1, 8, true});
    const auto rc = train(c, ds, cfg, {});
    EXPECT_NE(ra.history, rc.history);
}

TEST(Train, BestEpochIsFirstMaximumAndItsParametersAreRestored) {
    const auto ds = split_clusters(32, 1.5, 4);
    MlpClassifier model(32, 2, MlpConfig{1, 16, false});
    TrainConfig cfg;
    cfg.epochs = 12;
    cfg.seed = 13;
    const auto r = train(model, ds, cfg, {});
    double best = -1.0;
    int first = -1;
    for (const auto &m : r.history) {
        if (m.val_acc > best) {
            best = m.val_acc;
            first = m.epoch;
        }
    }
    EXPECT_EQ(r.best_epoch, first);
    EXPECT_DOUBLE_EQ(r.best_val_acc, best);
    const double again = evaluate(model, ds, ds.splits.validation, {},
                                  derive_seed(cfg.seed, {stream::Validation,
                                                         static_cast<std::uint64_t>(r.best_epoch)}));
    EXPECT_DOUBLE_EQ(again, r.best_val_acc);
}

TEST(Train, TestSplitIsTouchedOnlyOnceAfterTraining) {
    const auto ds = split_clusters(8, 4.0, 5);
    LogisticRegression model(8);
    TrainConfig cfg;
    cfg.epochs = 6;
    std::vector<std::pair<SplitKind, int>> calls;
    int epochs_seen = 0;
    TrainHooks hooks;
    hooks.on_evaluate = [&](SplitKind s, int e) { calls.emplace_back(s, e); };
    hooks.on_epoch = [&](const EpochMetrics &) { ++epochs_seen; };
    train(model, ds, cfg, {}, hooks);
    EXPECT_EQ(epochs_seen, 6);
    ASSERT_EQ(calls.size(), 7U);
    for (int e = 0; e < 6; ++e) {
        EXPECT_EQ(calls[static_cast<std::size_t>(e)], std::make_pair(SplitKind::Validation, e));
    }
    EXPECT_EQ(calls.back(), std::make_pair(SplitKind::Test, -1));
}

TEST(Train, RejectsMissingSplitsAndShapeMismatch) {
    auto ds = split_clusters(8, 4.0, 6);
    LogisticRegression wrong(9);
    EXPECT_THROW(train(wrong, ds, TrainConfig{}, {}), ConfigError);
    ds.splits.validation.clear();
    LogisticRegression model(8);
    EXPECT_THROW(train(model, ds, TrainConfig{}, {}), ConfigError);
}

// Amplitude encoding cannot see the sign of x, so this uses clusters moved
// off the origin; see the acceptance notes for the symmetric case.
TEST(Train, QuantumHeadLearnsOffsetClusters) {
    const auto ds = split_clusters(64, 10.0, 7, 20.0);
    HeadConfig hc;
    hc.input_dim = 64;
    hc.encoder.qubits = 6;
    hc.encoder.layers = 4;
    hc.pqc.qubits = 6;
    QuantumHead head(hc);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.learning_rate = 0.01;
    cfg.seed = 21;
    const auto r = train(head, ds, cfg, {});
    EXPECT_GE(r.best_val_acc, 0.95);
    EXPECT_GE(r.test_acc, 0.95);
}

} // namespace
} // namespace qhead

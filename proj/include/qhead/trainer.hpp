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
 * @file trainer.hpp
 * Mini-batch training with AdamW, per-epoch validation, and best-checkpoint
 * selection.
 *
 * Every random draw in a run is a function of TrainConfig::seed:
 *
 *   - initialization:   model.initialize(seed)
 *   - epoch shuffle:    derive_seed(seed, {Shuffle, epoch})
 *   - training sample:  derive_seed(seed, {Train, epoch, batch, position})
 *   - validation:       derive_seed(seed, {Validation, epoch}) then per row
 *   - test:             derive_seed(seed, {Test}) then per row
 *
 * Evaluation seeds are keyed by dataset row index, so accuracy does not
 * depend on the order of the index list.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qhead/datasets.hpp"
#include "qhead/errors.hpp"
#include "qhead/model.hpp"
#include "qhead/noise.hpp"
#include "qhead/random.hpp"

namespace qhead {

struct TrainConfig {
    double learning_rate = 1e-3; ///< L
    double lr_decay = 1.0;       ///< gamma, applied once per epoch
    double weight_decay = 0.0;   ///< rho, decoupled
    std::size_t batch_size = 16; ///< B
    int epochs = 800;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw ConfigError("learning_rate must be positive");
        }
        if (!(lr_decay > 0.0 && lr_decay <= 1.0)) {
            throw ConfigError("lr_decay must be in (0, 1]");
        }
        if (!(weight_decay >= 0.0)) {
            throw ConfigError("weight_decay must be >= 0");
        }
        if (batch_size < 1) {
            throw ConfigError("batch_size must be >= 1");
        }
        if (epochs < 1) {
            throw ConfigError("epochs must be >= 1");
        }
    }

    friend bool operator==(const TrainConfig &, const TrainConfig &) = default;
};

struct AdamState {
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
};

/// One AdamW update at rate L * gamma^epoch. Weight decay multiplies every
/// parameter by (1 - rate * rho) before the moment step.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState &state,
                      const TrainConfig &cfg, int epoch) {
    if (grads.size() != params.size()) {
        throw ConfigError("gradient has " + std::to_string(grads.size()) + " entries for " +
                          std::to_string(params.size()) + " parameters");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) {
        throw ConfigError("optimizer state does not match the parameter vector");
    }
    ++state.step;
    const double rate = cfg.learning_rate * std::pow(cfg.lr_decay, epoch);
    const double c1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(state.step));
    const double shrink = 1.0 - rate * cfg.weight_decay;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = AdamState::kBeta1 * state.m[i] + (1.0 - AdamState::kBeta1) * g;
        state.v[i] = AdamState::kBeta2 * state.v[i] + (1.0 - AdamState::kBeta2) * g * g;
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] = params[i] * shrink - rate * mhat / (std::sqrt(vhat) + AdamState::kEps);
    }
}

enum class SplitKind { Train, Validation, Test };

inline const char *split_name(SplitKind s) {
    switch (s) {
    case SplitKind::Train:
        return "train";
    case SplitKind::Validation:
        return "validation";
    case SplitKind::Test:
        return "test";
    }
    return "?";
}

/// Fraction of rows whose argmax logit equals the label. Row i of the
/// dataset is evaluated with seed derive_seed(seed, {i}).
inline double evaluate(const Classifier &model, const EmbeddingDataset &ds,
                       std::span<const std::size_t> indices, const NoiseModel &noise,
                       std::uint64_t seed) {
    if (indices.empty()) {
        throw ConfigError("cannot evaluate on an empty split");
    }
    std::vector<std::uint64_t> seeds;
    seeds.reserve(indices.size());
    for (auto i : indices) {
        seeds.push_back(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    }
    const auto logits = model.logits(ds.rows(indices), seeds, noise);
    std::size_t correct = 0;
    for (std::size_t j = 0; j < indices.size(); ++j) {
        correct += argmax(logits[j]) == ds.labels[indices[j]] ? 1U : 0U;
    }
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

struct EpochMetrics {
    int epoch = 0;
    double loss = 0.0; ///< sample-weighted mean training loss
    double val_acc = 0.0;

    friend bool operator==(const EpochMetrics &, const EpochMetrics &) = default;
};

struct TrainReport {
    std::vector<EpochMetrics> history;
    int best_epoch = -1; ///< first epoch reaching the maximum validation accuracy
    double best_val_acc = 0.0;
    double test_acc = 0.0;
    std::size_t parameter_count = 0;

    friend bool operator==(const TrainReport &, const TrainReport &) = default;
};

struct TrainHooks {
    /// Called after each epoch's validation pass.
    std::function<void(const EpochMetrics &)> on_epoch;
    /// Called whenever a split is evaluated; epoch is -1 for the final pass.
    std::function<void(SplitKind, int epoch)> on_evaluate;
};

/// Trains from a fresh initialization, keeps the parameters of the best
/// validation epoch, restores them into `model`, and reports test accuracy
/// of that checkpoint under the same noise model.
inline TrainReport train(Classifier &model, const EmbeddingDataset &ds, const TrainConfig &cfg,
                         const NoiseModel &noise, const TrainHooks &hooks = {}) {
    cfg.validate();
    noise.validate();
    ds.validate();
    if (ds.splits.train.empty() || ds.splits.validation.empty() || ds.splits.test.empty()) {
        throw ConfigError("training needs non-empty train, validation and test splits");
    }
    if (ds.dim != model.input_dim()) {
        throw ConfigError("dataset dimension " + std::to_string(ds.dim) +
                          " does not match model input " + std::to_string(model.input_dim()));
    }
    if (ds.num_classes > model.num_classes()) {
        throw ConfigError("dataset has more classes than the model outputs");
    }

    model.initialize(cfg.seed);
    TrainReport report;
    report.parameter_count = model.parameter_count();
    AdamState adam;
    std::vector<double> grad(model.parameter_count());
    std::vector<double> best_params(model.parameters().begin(), model.parameters().end());
    std::vector<double> best_buffers(model.buffers().begin(), model.buffers().end());
    std::vector<std::size_t> order(ds.splits.train);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto ep = static_cast<std::uint64_t>(epoch);
        Rng shuffler(derive_seed(cfg.seed, {stream::Shuffle, ep}));
        order = ds.splits.train;
        shuffle_in_place(std::span(order), shuffler);

        double loss_sum = 0.0;
        for (std::size_t start = 0, b = 0; start < order.size(); start += cfg.batch_size, ++b) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            Batch batch;
            for (std::size_t p = start; p < end; ++p) {
                batch.rows.push_back(ds.row(order[p]));
                batch.labels.push_back(ds.labels[order[p]]);
                batch.seeds.push_back(
                    derive_seed(cfg.seed, {stream::Train, ep, b, static_cast<std::uint64_t>(p - start)}));
            }
            const double loss = model.loss_and_gradient(batch, noise, grad);
            loss_sum += loss * static_cast<double>(end - start);
            adam_step(model.parameters(), grad, adam, cfg, epoch);
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.loss = loss_sum / static_cast<double>(order.size());
        if (hooks.on_evaluate) {
            hooks.on_evaluate(SplitKind::Validation, epoch);
        }
        m.val_acc = evaluate(model, ds, ds.splits.validation, noise,
                             derive_seed(cfg.seed, {stream::Validation, ep}));
        report.history.push_back(m);
        if (report.best_epoch < 0 || m.val_acc > report.best_val_acc) {
            report.best_epoch = epoch;
            report.best_val_acc = m.val_acc;
            best_params.assign(model.parameters().begin(), model.parameters().end());
            best_buffers.assign(model.buffers().begin(), model.buffers().end());
        }
        if (hooks.on_epoch) {
            hooks.on_epoch(m);
        }
    }

    std::copy(best_params.begin(), best_params.end(), model.parameters().begin());
    std::copy(best_buffers.begin(), best_buffers.end(), model.buffers().begin());
    if (hooks.on_evaluate) {
        hooks.on_evaluate(SplitKind::Test, -1);
    }
    report.test_acc =
        evaluate(model, ds, ds.splits.test, noise, derive_seed(cfg.seed, {stream::Test}));
    return report;
}

} // namespace qhead

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
 * @file baselines.hpp
 * Classical classification heads: binary logistic regression and a
 * one-hidden-layer network with optional batch normalization.
 *
 * Both ignore the noise model and per-sample seeds; they take them only to
 * share the Classifier surface with the hybrid head.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qhead/errors.hpp"
#include "qhead/model.hpp"
#include "qhead/nn.hpp"
#include "qhead/parallel.hpp"
#include "qhead/random.hpp"

namespace qhead {

/// Two-class logistic regression: logits (0, w.x + b), so the positive-class
/// probability is sigmoid(w.x + b). dim + 1 parameters.
class LogisticRegression final : public Classifier {
  public:
    explicit LogisticRegression(std::size_t input_dim) : params_(input_dim + 1, 0.0) {
        if (input_dim == 0) {
            throw ConfigError("input_dim must be >= 1");
        }
    }

    static std::size_t parameter_count(std::size_t input_dim) { return input_dim + 1; }
    using Classifier::parameter_count;

    [[nodiscard]] std::string kind() const override { return "logistic"; }
    [[nodiscard]] int num_classes() const override { return 2; }
    [[nodiscard]] std::size_t input_dim() const override { return params_.size() - 1; }
    std::span<double> parameters() override { return params_; }
    [[nodiscard]] std::span<const double> parameters() const override { return params_; }
    [[nodiscard]] std::vector<ParamBlock> layout() const override {
        return {{"weight", input_dim()}, {"bias", 1}};
    }

    /// Zero weights: every sample starts at probability 1/2.
    void initialize(std::uint64_t /*seed*/) override { std::fill(params_.begin(), params_.end(), 0.0); }

    [[nodiscard]] double score(Row x) const {
        if (x.size() != input_dim()) {
            throw ConfigError("logistic model expects inputs of dimension " +
                              std::to_string(input_dim()) + ", got " + std::to_string(x.size()));
        }
        double s = params_.back();
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += params_[i] * x[i];
        }
        return s;
    }

    [[nodiscard]] std::vector<Logits> logits(const std::vector<Row> &rows,
                                             std::span<const std::uint64_t> /*seeds*/,
                                             const NoiseModel & /*noise*/) const override {
        std::vector<Logits> out(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out[i] = {0.0, score(rows[i])};
        }
        return out;
    }

    double loss_and_gradient(const Batch &batch, const NoiseModel & /*noise*/,
                             std::span<double> grad) override {
        const std::size_t n = batch.rows.size();
        if (n == 0 || batch.labels.size() != n || grad.size() != params_.size()) {
            throw ConfigError("malformed batch or gradient buffer");
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Logits l{0.0, score(batch.rows[i])};
            const auto ce = cross_entropy_loss(l, batch.labels[i]);
            loss += ce.loss;
            const double d = ce.grad[1];
            for (std::size_t j = 0; j < batch.rows[i].size(); ++j) {
                grad[j] += d * batch.rows[i][j];
            }
            grad.back() += d;
        }
        const double inv = 1.0 / static_cast<double>(n);
        for (auto &g : grad) {
            g *= inv;
        }
        return loss * inv;
    }

  private:
    std::vector<double> params_;
};

/// input -> [hidden (ReLU, optional batch norm)] -> k logits.
class MlpClassifier final : public Classifier {
  public:
    MlpClassifier(std::size_t input_dim, int num_classes, MlpConfig config)
        : net_(input_dim, static_cast<std::size_t>(num_classes), config), k_(num_classes) {
        if (num_classes < 2) {
            throw ConfigError("num_classes must be >= 2");
        }
        params_.assign(net_.size(), 0.0);
        buffers_.assign(net_.buffer_size(), 0.0);
        initialize(0);
    }

    static std::size_t parameter_count(std::size_t input_dim, int num_classes,
                                       const MlpConfig &cfg) {
        return Mlp::parameter_count(input_dim, static_cast<std::size_t>(num_classes), cfg);
    }
    using Classifier::parameter_count;

    [[nodiscard]] std::string kind() const override { return "mlp"; }
    [[nodiscard]] int num_classes() const override { return k_; }
    [[nodiscard]] std::size_t input_dim() const override { return net_.input_dim(); }
    std::span<double> parameters() override { return params_; }
    [[nodiscard]] std::span<const double> parameters() const override { return params_; }
    std::span<double> buffers() override { return buffers_; }
    [[nodiscard]] std::span<const double> buffers() const override { return buffers_; }
    [[nodiscard]] std::vector<ParamBlock> layout() const override { return {{"mlp", params_.size()}}; }
    [[nodiscard]] const Mlp &network() const { return net_; }

    void initialize(std::uint64_t seed) override {
        Rng rng(derive_seed(seed, {stream::Init}));
        net_.initialize(params_, buffers_, rng);
    }

    [[nodiscard]] std::vector<Logits> logits(const std::vector<Row> &rows,
                                             std::span<const std::uint64_t> /*seeds*/,
                                             const NoiseModel & /*noise*/) const override {
        if (rows.empty()) {
            return {};
        }
        auto frozen = buffers_;
        const Matrix out = net_.forward(params_, frozen, to_matrix(rows), false);
        std::vector<Logits> res(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            res[i].assign(out.row(i).begin(), out.row(i).end());
        }
        return res;
    }

    double loss_and_gradient(const Batch &batch, const NoiseModel & /*noise*/,
                             std::span<double> grad) override {
        const std::size_t n = batch.rows.size();
        if (n == 0 || batch.labels.size() != n || grad.size() != params_.size()) {
            throw ConfigError("malformed batch or gradient buffer");
        }
        Mlp::Cache cache;
        const Matrix out = net_.forward(params_, buffers_, to_matrix(batch.rows), true, &cache);
        Matrix dout(n, static_cast<std::size_t>(k_));
        double loss = 0.0;
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto ce = cross_entropy_loss(out.row(i), batch.labels[i]);
            loss += ce.loss;
            for (std::size_t r = 0; r < ce.grad.size(); ++r) {
                dout(i, r) = ce.grad[r] * inv;
            }
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        net_.backward(params_, cache, dout, grad);
        return loss * inv;
    }

  private:
    [[nodiscard]] Matrix to_matrix(const std::vector<Row> &rows) const {
        Matrix m(rows.size(), net_.input_dim());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != net_.input_dim()) {
                throw ConfigError("network expects inputs of dimension " +
                                  std::to_string(net_.input_dim()) + ", got " +
                                  std::to_string(rows[i].size()));
            }
            std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
        }
        return m;
    }

    Mlp net_;
    int k_;
    std::vector<double> params_;
    std::vector<double> buffers_;
};

} // namespace qhead

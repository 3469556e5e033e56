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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qhead/errors.hpp"
#include "qhead/noise.hpp"

namespace qhead {

using Logits = std::vector<double>;
using Row = std::span<const double>;

/// Named contiguous slice of a model's flat parameter vector.
struct ParamBlock {
    std::string name;
    std::size_t size = 0;

    friend bool operator==(const ParamBlock &, const ParamBlock &) = default;
};

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> grad; ///< d loss / d logits
};

/// -log softmax(logits)[label], stabilized by max subtraction, with its
/// gradient softmax - onehot.
inline LossAndGradient cross_entropy_loss(std::span<const double> logits, int label) {
    if (logits.size() < 2) {
        throw ConfigError("cross entropy needs at least 2 classes");
    }
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
        throw ConfigError("label " + std::to_string(label) + " out of range for " +
                          std::to_string(logits.size()) + " classes");
    }
    const auto top = std::max_element(logits.begin(), logits.end());
    const double mx = *top;
    // log1p keeps precision when the top logit dominates.
    double rest = 0.0;
    for (auto it = logits.begin(); it != logits.end(); ++it) {
        rest += it == top ? 0.0 : std::exp(*it - mx);
    }
    const double log_z = mx + std::log1p(rest);
    LossAndGradient out;
    out.loss = (mx - logits[static_cast<std::size_t>(label)]) + std::log1p(rest);
    out.grad.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out.grad[i] = std::exp(logits[i] - log_z);
    }
    out.grad[static_cast<std::size_t>(label)] -= 1.0;
    return out;
}

inline int argmax(std::span<const double> logits) {
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

/// A mini-batch: input rows, labels, and one RNG seed per sample (noise
/// trajectories and shot draws are functions of the seed alone).
struct Batch {
    std::vector<Row> rows;
    std::vector<int> labels;
    std::vector<std::uint64_t> seeds;
};

/// Common surface of every trainable classification head.
class Classifier {
  public:
    virtual ~Classifier() = default;

    [[nodiscard]] virtual std::string kind() const = 0;
    [[nodiscard]] virtual int num_classes() const = 0;
    [[nodiscard]] virtual std::size_t input_dim() const = 0;

    /// All trainable values as one flat vector, laid out per layout().
    virtual std::span<double> parameters() = 0;
    [[nodiscard]] virtual std::span<const double> parameters() const = 0;
    /// Non-trainable state that still belongs in a checkpoint.
    virtual std::span<double> buffers() { return {}; }
    [[nodiscard]] virtual std::span<const double> buffers() const { return {}; }
    [[nodiscard]] virtual std::vector<ParamBlock> layout() const = 0;

    virtual void initialize(std::uint64_t seed) = 0;

    /// Evaluation-mode logits, one row per input.
    [[nodiscard]] virtual std::vector<Logits> logits(const std::vector<Row> &rows,
                                                     std::span<const std::uint64_t> seeds,
                                                     const NoiseModel &noise) const = 0;

    /// Training-mode mean cross-entropy over the batch; writes the mean
    /// gradient into `grad` (sized like parameters()).
    virtual double loss_and_gradient(const Batch &batch, const NoiseModel &noise,
                                     std::span<double> grad) = 0;

    virtual void set_jobs(unsigned jobs) { jobs_ = std::max(1U, jobs); }
    [[nodiscard]] unsigned jobs() const { return jobs_; }

    [[nodiscard]] std::size_t parameter_count() const { return parameters().size(); }

  protected:
    unsigned jobs_ = 1;
};

} // namespace qhead

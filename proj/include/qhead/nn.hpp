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
 * @file nn.hpp
 * Small dense networks used by the classical baselines and the
 * neural-network encoder ablation:
 *
 *     input -> [Linear -> BatchNorm? -> ReLU] -> Linear -> (identity | tanh)
 *
 * Parameters are stored in a caller-owned flat span so that every model can
 * expose all of its trainable values to the optimizer as one vector.
 * Layout: W1 (h x d), b1 (h), [gamma (h), beta (h)], W2 (o x h), b2 (o);
 * without a hidden layer just W (o x d), b (o). Batch-norm running
 * statistics live in a separate buffer span (mean (h), var (h)).
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qhead/errors.hpp"
#include "qhead/random.hpp"

namespace qhead {

/// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }
    [[nodiscard]] std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
};

struct MlpConfig {
    int hidden_layers = 0;
    int hidden_dim = 0;
    bool batch_norm = false;

    void validate() const {
        if (hidden_layers != 0 && hidden_layers != 1) {
            throw ConfigError("hidden_layers must be 0 or 1, got " + std::to_string(hidden_layers));
        }
        if ((hidden_layers == 0) != (hidden_dim == 0)) {
            throw ConfigError("hidden_dim must be 0 exactly when hidden_layers is 0");
        }
        if (hidden_dim < 0) {
            throw ConfigError("hidden_dim must be >= 0");
        }
        if (batch_norm && hidden_layers == 0) {
            throw ConfigError("batch_norm needs a hidden layer");
        }
    }

    friend bool operator==(const MlpConfig &, const MlpConfig &) = default;
};

enum class OutputActivation { Identity, Tanh };

class Mlp {
  public:
    static constexpr double kBnEps = 1e-5;
    static constexpr double kBnMomentum = 0.1;

    Mlp() = default;
    Mlp(std::size_t input_dim, std::size_t output_dim, MlpConfig config,
        OutputActivation activation = OutputActivation::Identity)
        : in_(input_dim), out_(output_dim), cfg_(config), act_(activation) {
        cfg_.validate();
        if (in_ == 0 || out_ == 0) {
            throw ConfigError("network input and output sizes must be positive");
        }
        hidden_ = static_cast<std::size_t>(cfg_.hidden_dim);
    }

    static std::size_t parameter_count(std::size_t input_dim, std::size_t output_dim,
                                       const MlpConfig &cfg) {
        cfg.validate();
        if (cfg.hidden_layers == 0) {
            return output_dim * input_dim + output_dim;
        }
        const auto h = static_cast<std::size_t>(cfg.hidden_dim);
        return h * input_dim + h + (cfg.batch_norm ? 2 * h : 0) + output_dim * h + output_dim;
    }

    [[nodiscard]] std::size_t size() const { return parameter_count(in_, out_, cfg_); }
    [[nodiscard]] std::size_t buffer_size() const { return cfg_.batch_norm ? 2 * hidden_ : 0; }
    [[nodiscard]] std::size_t input_dim() const { return in_; }
    [[nodiscard]] std::size_t output_dim() const { return out_; }
    [[nodiscard]] const MlpConfig &config() const { return cfg_; }

    /// PyTorch-style uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and
    /// biases; batch-norm scale 1, shift 0, running stats (0, 1).
    void initialize(std::span<double> params, std::span<double> buffers, Rng &rng) const {
        check_sizes(params, buffers);
        auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            std::uniform_real_distribution<double> u(-bound, bound);
            for (std::size_t i = 0; i < count; ++i) {
                params[offset + i] = u(rng);
            }
        };
        if (hidden_ == 0) {
            fill(0, out_ * in_ + out_, in_);
            return;
        }
        const Offsets o = offsets();
        fill(o.w1, hidden_ * in_ + hidden_, in_);
        if (cfg_.batch_norm) {
            for (std::size_t j = 0; j < hidden_; ++j) {
                params[o.gamma + j] = 1.0;
                params[o.beta + j] = 0.0;
                buffers[j] = 0.0;
                buffers[hidden_ + j] = 1.0;
            }
        }
        fill(o.w2, out_ * hidden_ + out_, hidden_);
    }

    struct Cache {
        bool training = false;
        Matrix input;
        Matrix pre;    ///< hidden pre-activation (after batch norm if any)
        Matrix xhat;   ///< normalized hidden values
        std::vector<double> inv_std;
        Matrix output; ///< after output activation
    };

    /// Forward pass over a batch (rows of `input`). In training mode batch
    /// norm uses batch statistics and updates the running buffers; in
    /// evaluation mode it uses the frozen running statistics.
    Matrix forward(std::span<const double> params, std::span<double> buffers, const Matrix &input,
                   bool training, Cache *cache = nullptr) const {
        check_sizes(params, buffers);
        if (input.cols != in_) {
            throw ConfigError("network expects " + std::to_string(in_) + " inputs, got " +
                              std::to_string(input.cols));
        }
        const std::size_t batch = input.rows;
        Matrix out(batch, out_);
        if (hidden_ == 0) {
            affine(params, 0, out_, in_, input, out);
        } else {
            const Offsets o = offsets();
            Matrix pre(batch, hidden_);
            affine(params, o.w1, hidden_, in_, input, pre);
            Matrix xhat;
            std::vector<double> inv_std;
            if (cfg_.batch_norm) {
                if (training && batch < 2) {
                    throw ConfigError("batch norm in training mode needs a batch of at least 2");
                }
                xhat = Matrix(batch, hidden_);
                inv_std.assign(hidden_, 0.0);
                for (std::size_t j = 0; j < hidden_; ++j) {
                    double mean = 0.0;
                    double var = 0.0;
                    if (training) {
                        for (std::size_t b = 0; b < batch; ++b) {
                            mean += pre(b, j);
                        }
                        mean /= static_cast<double>(batch);
                        for (std::size_t b = 0; b < batch; ++b) {
                            var += (pre(b, j) - mean) * (pre(b, j) - mean);
                        }
                        var /= static_cast<double>(batch);
                        const double unbiased = var * static_cast<double>(batch) /
                                                static_cast<double>(batch - 1);
                        buffers[j] = (1 - kBnMomentum) * buffers[j] + kBnMomentum * mean;
                        buffers[hidden_ + j] =
                            (1 - kBnMomentum) * buffers[hidden_ + j] + kBnMomentum * unbiased;
                    } else {
                        mean = buffers[j];
                        var = buffers[hidden_ + j];
                    }
                    inv_std[j] = 1.0 / std::sqrt(var + kBnEps);
                    for (std::size_t b = 0; b < batch; ++b) {
                        xhat(b, j) = (pre(b, j) - mean) * inv_std[j];
                        pre(b, j) = params[o.gamma + j] * xhat(b, j) + params[o.beta + j];
                    }
                }
            }
            Matrix act(batch, hidden_);
            for (std::size_t i = 0; i < act.data.size(); ++i) {
                act.data[i] = pre.data[i] > 0.0 ? pre.data[i] : 0.0;
            }
            affine(params, o.w2, out_, hidden_, act, out);
            if (cache != nullptr) {
                cache->pre = std::move(pre);
                cache->xhat = std::move(xhat);
                cache->inv_std = std::move(inv_std);
            }
        }
        if (act_ == OutputActivation::Tanh) {
            for (auto &v : out.data) {
                v = std::tanh(v);
            }
        }
        if (cache != nullptr) {
            cache->training = training;
            cache->input = input;
            cache->output = out;
        }
        return out;
    }

    /// Accumulates dLoss/dparams into `grad` and returns dLoss/dinput.
    /// The cache must come from a training-mode forward pass.
    Matrix backward(std::span<const double> params, const Cache &cache, const Matrix &grad_out,
                    std::span<double> grad) const {
        if (!cache.training) {
            throw UnsupportedModeError(
                "backward pass needs a training-mode forward cache (network is in eval mode)");
        }
        const std::size_t batch = cache.input.rows;
        Matrix dout = grad_out;
        if (act_ == OutputActivation::Tanh) {
            for (std::size_t i = 0; i < dout.data.size(); ++i) {
                const double y = cache.output.data[i];
                dout.data[i] *= 1.0 - y * y;
            }
        }
        Matrix dinput(batch, in_);
        if (hidden_ == 0) {
            affine_backward(params, 0, out_, in_, cache.input, dout, grad, dinput);
            return dinput;
        }
        const Offsets o = offsets();
        Matrix act(batch, hidden_);
        for (std::size_t i = 0; i < act.data.size(); ++i) {
            act.data[i] = cache.pre.data[i] > 0.0 ? cache.pre.data[i] : 0.0;
        }
        Matrix dact(batch, hidden_);
        affine_backward(params, o.w2, out_, hidden_, act, dout, grad, dact);
        Matrix dpre(batch, hidden_);
        for (std::size_t i = 0; i < dpre.data.size(); ++i) {
            dpre.data[i] = cache.pre.data[i] > 0.0 ? dact.data[i] : 0.0;
        }
        if (cfg_.batch_norm) {
            const auto n = static_cast<double>(batch);
            for (std::size_t j = 0; j < hidden_; ++j) {
                double sum_dy = 0.0;
                double sum_dy_xhat = 0.0;
                for (std::size_t b = 0; b < batch; ++b) {
                    sum_dy += dpre(b, j);
                    sum_dy_xhat += dpre(b, j) * cache.xhat(b, j);
                }
                grad[o.gamma + j] += sum_dy_xhat;
                grad[o.beta + j] += sum_dy;
                const double g = params[o.gamma + j];
                for (std::size_t b = 0; b < batch; ++b) {
                    dpre(b, j) = g * cache.inv_std[j] / n *
                                 (n * dpre(b, j) - sum_dy - cache.xhat(b, j) * sum_dy_xhat);
                }
            }
        }
        affine_backward(params, o.w1, hidden_, in_, cache.input, dpre, grad, dinput);
        return dinput;
    }

  private:
    struct Offsets {
        std::size_t w1 = 0;
        std::size_t gamma = 0;
        std::size_t beta = 0;
        std::size_t w2 = 0;
    };

    [[nodiscard]] Offsets offsets() const {
        Offsets o;
        o.w1 = 0;
        const std::size_t after_hidden = hidden_ * in_ + hidden_;
        o.gamma = after_hidden;
        o.beta = after_hidden + hidden_;
        o.w2 = after_hidden + (cfg_.batch_norm ? 2 * hidden_ : 0);
        return o;
    }

    void check_sizes(std::span<const double> params, std::span<const double> buffers) const {
        if (params.size() != size() || buffers.size() != buffer_size()) {
            throw ConfigError("network parameter/buffer size mismatch: expected " +
                              std::to_string(size()) + "/" + std::to_string(buffer_size()) +
                              ", got " + std::to_string(params.size()) + "/" +
                              std::to_string(buffers.size()));
        }
    }

    /// out = in * W^T + b with W (rows x cols) at `offset`, b following it.
    static void affine(std::span<const double> params, std::size_t offset, std::size_t rows,
                       std::size_t cols, const Matrix &in, Matrix &out) {
        const double *w = params.data() + offset;
        const double *bias = w + rows * cols;
        for (std::size_t b = 0; b < in.rows; ++b) {
            const auto x = in.row(b);
            for (std::size_t r = 0; r < rows; ++r) {
                double acc = bias[r];
                const double *wr = w + r * cols;
                for (std::size_t c = 0; c < cols; ++c) {
                    acc += wr[c] * x[c];
                }
                out(b, r) = acc;
            }
        }
    }

    static void affine_backward(std::span<const double> params, std::size_t offset,
                                std::size_t rows, std::size_t cols, const Matrix &in,
                                const Matrix &dout, std::span<double> grad, Matrix &din) {
        const double *w = params.data() + offset;
        double *gw = grad.data() + offset;
        double *gb = gw + rows * cols;
        for (std::size_t b = 0; b < in.rows; ++b) {
            const auto x = in.row(b);
            auto dx = din.row(b);
            for (std::size_t r = 0; r < rows; ++r) {
                const double d = dout(b, r);
                if (d == 0.0) {
                    continue;
                }
                gb[r] += d;
                const double *wr = w + r * cols;
                double *gwr = gw + r * cols;
                for (std::size_t c = 0; c < cols; ++c) {
                    gwr[c] += d * x[c];
                    dx[c] += d * wr[c];
                }
            }
        }
    }

    std::size_t in_ = 0;
    std::size_t out_ = 0;
    std::size_t hidden_ = 0;
    MlpConfig cfg_;
    OutputActivation act_ = OutputActivation::Identity;
};

} // namespace qhead

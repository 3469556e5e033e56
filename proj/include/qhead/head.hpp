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
 * @file head.hpp
 * The hybrid classification head.
 *
 * Stage 1 (encoders, exact): each of E encoders amplitude-encodes the input
 * embedding on Q_c qubits, runs a D_enc-layer entangling block with its own
 * angles, and reports <Z> of every qubit. The E*Q_c values form the latent
 * vector.
 *
 * Stage 2 (re-uploading circuit, noisy): the latent vector is angle-encoded
 * at every ENCODE step of the head circuit (E stacked rounds when E*Q_c
 * exceeds the width Q), qubit 0 is measured, and gate noise and shot noise
 * are applied when a noise model asks for them. Encoding angles are
 * `scale * latent`, where `scale` is one trainable scalar initialized to 1.
 *
 * Stage 3: logits = W * [latent, z] with W of shape k x (E*Q_c + 1) and no
 * bias. Without the final linear layer the logits are (z, -z) for k = 2.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qhead/ansatz.hpp"
#include "qhead/errors.hpp"
#include "qhead/grad.hpp"
#include "qhead/model.hpp"
#include "qhead/nn.hpp"
#include "qhead/noise.hpp"
#include "qhead/parallel.hpp"
#include "qhead/random.hpp"
#include "qhead/simcore.hpp"

namespace qhead {

enum class EncoderKind { Quantum, NeuralNet };

/// How inputs longer than 2^Q_c reach a quantum encoder. `Fold` sums the
/// input in chunks of 2^Q_c (y[i mod 2^Q_c] += x[i]).
enum class InputReduction { None, Fold };

struct EncoderConfig {
    int num_encoders = 1; ///< E
    int qubits = 10;      ///< Q_c
    int layers = 27;      ///< D_enc
    int connectivity = 1;

    void validate() const {
        if (num_encoders < 1) {
            throw ConfigError("num_encoders must be >= 1, got " + std::to_string(num_encoders));
        }
        if (qubits < 1 || qubits > kMaxQubits) {
            throw ConfigError("encoder_qubits must be in [1, " + std::to_string(kMaxQubits) +
                              "], got " + std::to_string(qubits));
        }
        if (layers < 0) {
            throw ConfigError("encoder_layers must be >= 0, got " + std::to_string(layers));
        }
        if (layers > 0 && (connectivity < 1 || connectivity >= qubits)) {
            throw ConfigError("encoder_connectivity must satisfy 1 <= C < Q_c, got " +
                              std::to_string(connectivity));
        }
    }

    [[nodiscard]] std::size_t params_per_encoder() const {
        return static_cast<std::size_t>(layers) * static_cast<std::size_t>(qubits);
    }

    friend bool operator==(const EncoderConfig &, const EncoderConfig &) = default;
};

struct HeadConfig {
    int input_dim = 768;
    EncoderKind encoder_kind = EncoderKind::Quantum;
    EncoderConfig encoder;
    MlpConfig nn_encoder; ///< hidden layers of the neural-network encoder
    CircuitSpec pqc;
    int num_classes = 2;
    bool final_linear = true;
    bool trainable_encoding_scale = true;
    InputReduction input_reduction = InputReduction::None;

    [[nodiscard]] std::size_t latent_dim() const {
        const auto per = static_cast<std::size_t>(encoder.qubits);
        return encoder_kind == EncoderKind::Quantum
                   ? per * static_cast<std::size_t>(encoder.num_encoders)
                   : per;
    }

    void validate() const {
        pqc.validate();
        encoder.validate();
        if (input_dim < 1) {
            throw ConfigError("input_dim must be >= 1");
        }
        if (num_classes < 2) {
            throw ConfigError("num_classes must be >= 2, got " + std::to_string(num_classes));
        }
        if (!final_linear && num_classes != 2) {
            throw ConfigError("prediction without the final linear layer needs num_classes = 2");
        }
        if (encoder_kind == EncoderKind::Quantum) {
            const std::size_t amps = std::size_t{1} << encoder.qubits;
            if (static_cast<std::size_t>(input_dim) > amps &&
                input_reduction == InputReduction::None) {
                throw ConfigError("input_dim " + std::to_string(input_dim) +
                                  " exceeds 2^encoder_qubits = " + std::to_string(amps) +
                                  " (set input_reduction = fold or raise encoder_qubits)");
            }
        } else {
            nn_encoder.validate();
            if (encoder.num_encoders != 1) {
                throw ConfigError("the neural-network encoder supports num_encoders = 1 only");
            }
        }
        if (latent_dim() % static_cast<std::size_t>(pqc.qubits) != 0) {
            throw ConfigError("latent size " + std::to_string(latent_dim()) +
                              " must be a multiple of the circuit width Q = " +
                              std::to_string(pqc.qubits));
        }
    }

    friend bool operator==(const HeadConfig &, const HeadConfig &) = default;
};

inline std::vector<double> fold_input(std::span<const double> x, std::size_t width) {
    std::vector<double> y(std::min(width, x.size()), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i % width] += x[i];
    }
    return y;
}

struct EncoderMemoryStats {
    std::size_t amplitudes = 0; ///< total statevector amplitudes allocated
};

/// Latent <Z> values of one exact encoder.
inline std::vector<double> encoder_forward(std::span<const double> x, std::span<const double> theta,
                                           const EncoderConfig &cfg,
                                           EncoderMemoryStats *stats = nullptr) {
    cfg.validate();
    if (theta.size() != cfg.params_per_encoder()) {
        throw ConfigError("encoder expects " + std::to_string(cfg.params_per_encoder()) +
                          " angles, got " + std::to_string(theta.size()));
    }
    StateVector state = amplitude_encode(x, cfg.qubits);
    if (stats != nullptr) {
        stats->amplitudes += state.size();
    }
    if (cfg.layers > 0) {
        const auto block = build_block(cfg.qubits, cfg.connectivity, cfg.layers, 0);
        run_gates(state, block, gate_angles(block, theta, {}));
    }
    return z_expectations(state);
}

/// Concatenated latents of E encoders sharing the input.
inline std::vector<double> multi_encoder_forward(std::span<const double> x,
                                                 const std::vector<std::span<const double>> &thetas,
                                                 const EncoderConfig &cfg,
                                                 EncoderMemoryStats *stats = nullptr) {
    if (thetas.size() != static_cast<std::size_t>(cfg.num_encoders)) {
        throw ConfigError("expected " + std::to_string(cfg.num_encoders) +
                          " encoder parameter sets, got " + std::to_string(thetas.size()));
    }
    std::vector<double> latent;
    latent.reserve(static_cast<std::size_t>(cfg.num_encoders * cfg.qubits));
    for (const auto &theta : thetas) {
        const auto part = encoder_forward(x, theta, cfg, stats);
        latent.insert(latent.end(), part.begin(), part.end());
    }
    return latent;
}

/// One evaluation of the re-uploading circuit on a sampled trajectory.
struct PqcEvaluation {
    GateList gates;             ///< lowered circuit including inserted errors
    std::vector<double> angles; ///< per-gate rotation angles
    double z = 0.0;             ///< exact <Z_0> on this trajectory
    double estimate = 0.0;      ///< after shot sampling
};

/// `lowered` is the head circuit with ENCODE steps already expanded for this
/// latent length. Trajectory and shot draws come from `seed` alone.
inline PqcEvaluation run_pqc(const GateList &lowered, int qubits, std::span<const double> latent,
                             std::span<const double> theta_q, const NoiseModel &noise,
                             std::uint64_t seed, double scale = 1.0) {
    PqcEvaluation ev;
    if (noise.has_gate_noise()) {
        Rng traj(derive_seed(seed, {stream::Trajectory}));
        ev.gates = sample_pauli_insertions(lowered, noise, traj).gates;
    } else {
        ev.gates = lowered;
    }
    ev.angles = gate_angles(ev.gates, theta_q, latent, scale);
    StateVector state(qubits);
    run_gates(state, ev.gates, ev.angles);
    ev.z = z_expectation(state, 0);
    Rng shots(derive_seed(seed, {stream::Shots}));
    ev.estimate = shot_sample_expectation(ev.z, noise.shots, shots).estimate;
    return ev;
}

/// Noisy measured value of the re-uploading circuit for one latent vector.
inline double pqc_forward(std::span<const double> latent, std::span<const double> theta_q,
                          const CircuitSpec &spec, const NoiseModel &noise, std::uint64_t seed,
                          double scale = 1.0) {
    noise.validate();
    if (theta_q.size() != count_parameters(spec)) {
        throw ConfigError("circuit expects " + std::to_string(count_parameters(spec)) +
                          " parameters, got " + std::to_string(theta_q.size()));
    }
    const auto lowered = lower_encodings(assemble_head_circuit(spec), spec.qubits, latent.size());
    return run_pqc(lowered, spec.qubits, latent, theta_q, noise, seed, scale).estimate;
}

/// W (k x (len(latent) + 1), row-major) times [latent, z].
inline Logits linear_logits(std::span<const double> latent, double z, std::span<const double> w,
                            int num_classes) {
    const std::size_t in = latent.size() + 1;
    if (num_classes < 1 || w.size() != static_cast<std::size_t>(num_classes) * in) {
        throw ConfigError("linear layer expects " + std::to_string(num_classes) + " x " +
                          std::to_string(in) + " weights, got " + std::to_string(w.size()));
    }
    Logits out(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t r = 0; r < out.size(); ++r) {
        double acc = w[r * in + latent.size()] * z;
        for (std::size_t c = 0; c < latent.size(); ++c) {
            acc += w[r * in + c] * latent[c];
        }
        out[r] = acc;
    }
    return out;
}

class QuantumHead final : public Classifier {
  public:
    explicit QuantumHead(HeadConfig config) : cfg_(std::move(config)) {
        cfg_.validate();
        const std::size_t latent = cfg_.latent_dim();
        std::size_t offset = 0;
        if (cfg_.encoder_kind == EncoderKind::Quantum) {
            encoder_block_ = cfg_.encoder.layers > 0
                                 ? build_block(cfg_.encoder.qubits, cfg_.encoder.connectivity,
                                               cfg_.encoder.layers, 0)
                                 : GateList{};
            for (int e = 0; e < cfg_.encoder.num_encoders; ++e) {
                blocks_.push_back({"theta_c." + std::to_string(e), cfg_.encoder.params_per_encoder()});
            }
        } else {
            nn_ = Mlp(static_cast<std::size_t>(cfg_.input_dim), latent, cfg_.nn_encoder,
                      OutputActivation::Tanh);
            blocks_.push_back({"nn_encoder", nn_.size()});
        }
        for (const auto &b : blocks_) {
            offset += b.size;
        }
        encoder_size_ = offset;
        if (cfg_.trainable_encoding_scale) {
            scale_offset_ = offset;
            blocks_.push_back({"encoding_scale", 1});
            offset += 1;
        }
        theta_q_offset_ = offset;
        theta_q_size_ = count_parameters(cfg_.pqc);
        blocks_.push_back({"theta_q", theta_q_size_});
        offset += theta_q_size_;
        if (cfg_.final_linear) {
            w_offset_ = offset;
            w_size_ = static_cast<std::size_t>(cfg_.num_classes) * (latent + 1);
            blocks_.push_back({"linear", w_size_});
            offset += w_size_;
        }
        params_.assign(offset, 0.0);
        buffers_.assign(nn_.buffer_size(), 0.0);
        pqc_gates_ = lower_encodings(assemble_head_circuit(cfg_.pqc), cfg_.pqc.qubits, latent);
        initialize(0);
    }

    using Classifier::parameter_count;

    /// E*D_enc*Q_c (or the NN encoder size) + scale + (M+R*N)*Q + (latent+1)*k.
    static std::size_t parameter_count(const HeadConfig &cfg) {
        cfg.validate();
        const std::size_t latent = cfg.latent_dim();
        std::size_t n = cfg.encoder_kind == EncoderKind::Quantum
                            ? static_cast<std::size_t>(cfg.encoder.num_encoders) *
                                  cfg.encoder.params_per_encoder()
                            : Mlp::parameter_count(static_cast<std::size_t>(cfg.input_dim), latent,
                                                   cfg.nn_encoder);
        n += cfg.trainable_encoding_scale ? 1 : 0;
        n += count_parameters(cfg.pqc);
        n += cfg.final_linear ? static_cast<std::size_t>(cfg.num_classes) * (latent + 1) : 0;
        return n;
    }

    [[nodiscard]] std::string kind() const override {
        return cfg_.encoder_kind == EncoderKind::Quantum ? "quantum_head" : "nn_encoder_head";
    }
    [[nodiscard]] int num_classes() const override { return cfg_.num_classes; }
    [[nodiscard]] std::size_t input_dim() const override {
        return static_cast<std::size_t>(cfg_.input_dim);
    }
    std::span<double> parameters() override { return params_; }
    [[nodiscard]] std::span<const double> parameters() const override { return params_; }
    std::span<double> buffers() override { return buffers_; }
    [[nodiscard]] std::span<const double> buffers() const override { return buffers_; }
    [[nodiscard]] std::vector<ParamBlock> layout() const override { return blocks_; }
    [[nodiscard]] const HeadConfig &config() const { return cfg_; }

    /// Circuit angles ~ U(-pi, pi); linear weights ~ U(-1/sqrt(n), 1/sqrt(n));
    /// encoding scale 1.
    void initialize(std::uint64_t seed) override {
        Rng rng(derive_seed(seed, {stream::Init}));
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        if (cfg_.encoder_kind == EncoderKind::Quantum) {
            for (std::size_t i = 0; i < encoder_size_; ++i) {
                params_[i] = angle(rng);
            }
        } else {
            nn_.initialize(std::span<double>(params_).subspan(0, encoder_size_), buffers_, rng);
        }
        if (cfg_.trainable_encoding_scale) {
            params_[scale_offset_] = 1.0;
        }
        for (std::size_t i = 0; i < theta_q_size_; ++i) {
            params_[theta_q_offset_ + i] = angle(rng);
        }
        if (cfg_.final_linear) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(cfg_.latent_dim() + 1));
            std::uniform_real_distribution<double> u(-bound, bound);
            for (std::size_t i = 0; i < w_size_; ++i) {
                params_[w_offset_ + i] = u(rng);
            }
        }
    }

    [[nodiscard]] std::span<const double> encoder_params(int e) const {
        return std::span<const double>(params_).subspan(
            static_cast<std::size_t>(e) * cfg_.encoder.params_per_encoder(),
            cfg_.encoder.params_per_encoder());
    }
    [[nodiscard]] std::span<const double> theta_q() const {
        return std::span<const double>(params_).subspan(theta_q_offset_, theta_q_size_);
    }
    [[nodiscard]] std::span<const double> linear_weights() const {
        return std::span<const double>(params_).subspan(w_offset_, w_size_);
    }
    [[nodiscard]] double encoding_scale() const {
        return cfg_.trainable_encoding_scale ? params_[scale_offset_] : 1.0;
    }

    /// Encoder-stage input for a raw row (folded when configured).
    [[nodiscard]] std::vector<double> encoder_input(Row x) const {
        check_row(x);
        const std::size_t amps = std::size_t{1} << cfg_.encoder.qubits;
        if (cfg_.input_reduction == InputReduction::Fold && x.size() > amps) {
            return fold_input(x, amps);
        }
        return {x.begin(), x.end()};
    }

    /// Exact latent vector of one quantum-encoded row.
    [[nodiscard]] std::vector<double> latent(Row x, EncoderMemoryStats *stats = nullptr) const {
        if (cfg_.encoder_kind != EncoderKind::Quantum) {
            Matrix in(1, x.size());
            std::copy(x.begin(), x.end(), in.data.begin());
            auto buffers = buffers_;
            return nn_.forward(nn_params(), buffers, in, false).data;
        }
        const auto input = encoder_input(x);
        std::vector<std::span<const double>> thetas;
        for (int e = 0; e < cfg_.encoder.num_encoders; ++e) {
            thetas.push_back(encoder_params(e));
        }
        return multi_encoder_forward(input, thetas, cfg_.encoder, stats);
    }

    [[nodiscard]] std::vector<Logits> logits(const std::vector<Row> &rows,
                                             std::span<const std::uint64_t> seeds,
                                             const NoiseModel &noise) const override {
        noise.validate();
        check_seeds(rows.size(), seeds.size());
        const auto latents = eval_latents(rows);
        std::vector<Logits> out(rows.size());
        parallel_for(rows.size(), jobs_, [&](std::size_t i) {
            const auto ev = run_pqc(pqc_gates_, cfg_.pqc.qubits, latents[i], theta_q(), noise,
                                    seeds[i], encoding_scale());
            out[i] = output_logits(latents[i], ev.estimate);
        });
        return out;
    }

    double loss_and_gradient(const Batch &batch, const NoiseModel &noise,
                             std::span<double> grad) override {
        noise.validate();
        const std::size_t n = batch.rows.size();
        if (n == 0) {
            throw ConfigError("empty batch");
        }
        check_seeds(n, batch.seeds.size());
        if (batch.labels.size() != n || grad.size() != params_.size()) {
            throw ConfigError("batch labels or gradient buffer have the wrong size");
        }
        const std::size_t latent_dim = cfg_.latent_dim();

        // Stage 1: encoders.
        std::vector<std::vector<double>> latents(n);
        std::vector<std::vector<double>> inputs(n);
        Mlp::Cache nn_cache;
        if (cfg_.encoder_kind == EncoderKind::Quantum) {
            parallel_for(n, jobs_, [&](std::size_t i) {
                inputs[i] = encoder_input(batch.rows[i]);
                latents[i] = latent(batch.rows[i]);
            });
        } else {
            const Matrix in = to_matrix(batch.rows);
            const Matrix out = nn_.forward(nn_params(), buffers_, in, true, &nn_cache);
            for (std::size_t i = 0; i < n; ++i) {
                latents[i].assign(out.row(i).begin(), out.row(i).end());
            }
        }

        // Stage 2: circuit, linear layer and loss per sample.
        std::vector<double> losses(n, 0.0);
        std::vector<std::vector<double>> sample_grads(n);
        std::vector<std::vector<double>> dlatents(n);
        parallel_for(n, jobs_, [&](std::size_t i) {
            auto &g = sample_grads[i];
            g.assign(params_.size(), 0.0);
            const auto &lat = latents[i];
            const double scale = encoding_scale();
            const auto ev =
                run_pqc(pqc_gates_, cfg_.pqc.qubits, lat, theta_q(), noise, batch.seeds[i], scale);
            const Logits logit = output_logits(lat, ev.estimate);
            const auto ce = cross_entropy_loss(logit, batch.labels[i]);
            losses[i] = ce.loss;

            std::vector<double> dlat(latent_dim, 0.0);
            double dz = 0.0;
            if (cfg_.final_linear) {
                const std::size_t in = latent_dim + 1;
                const auto w = linear_weights();
                for (std::size_t r = 0; r < ce.grad.size(); ++r) {
                    const double gr = ce.grad[r];
                    for (std::size_t c = 0; c < latent_dim; ++c) {
                        g[w_offset_ + r * in + c] = gr * lat[c];
                        dlat[c] += w[r * in + c] * gr;
                    }
                    g[w_offset_ + r * in + latent_dim] = gr * ev.estimate;
                    dz += w[r * in + latent_dim] * gr;
                }
            } else {
                dz = ce.grad[0] - ce.grad[1];
            }

            const StateVector init(cfg_.pqc.qubits);
            const auto obs = ZObservable::single(cfg_.pqc.qubits, 0);
            const auto per_gate = noise.noiseless()
                                      ? adjoint_gradient_per_gate(ev.gates, ev.angles, init, obs)
                                      : shift_gradient_per_gate(ev.gates, ev.angles, init, obs);
            const auto cg = accumulate_gradient(ev.gates, per_gate, theta_q_size_, lat, scale);
            for (std::size_t j = 0; j < theta_q_size_; ++j) {
                g[theta_q_offset_ + j] = dz * cg.params[j];
            }
            if (cfg_.trainable_encoding_scale) {
                g[scale_offset_] = dz * cg.scale;
            }
            for (std::size_t c = 0; c < latent_dim; ++c) {
                dlat[c] += dz * cg.latent[c];
            }

            // Stage 3a: exact encoders, adjoint sweep with weights dL/dlatent.
            if (cfg_.encoder_kind == EncoderKind::Quantum && !encoder_block_.empty()) {
                const std::size_t qc = static_cast<std::size_t>(cfg_.encoder.qubits);
                const StateVector start = amplitude_encode(inputs[i], cfg_.encoder.qubits);
                for (int e = 0; e < cfg_.encoder.num_encoders; ++e) {
                    ZObservable weighted;
                    weighted.weights.assign(dlat.begin() + static_cast<std::ptrdiff_t>(e * qc),
                                            dlat.begin() + static_cast<std::ptrdiff_t>((e + 1) * qc));
                    const auto angles = gate_angles(encoder_block_, encoder_params(e), {});
                    const auto enc =
                        adjoint_gradient_per_gate(encoder_block_, angles, start, weighted);
                    const std::size_t base = static_cast<std::size_t>(e) * cfg_.encoder.params_per_encoder();
                    for (std::size_t k = 0; k < encoder_block_.size(); ++k) {
                        if (encoder_block_[k].kind == GateKind::Ry) {
                            g[base + static_cast<std::size_t>(encoder_block_[k].slot)] += enc[k];
                        }
                    }
                }
            }
            dlatents[i] = std::move(dlat);
        });

        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            loss += losses[i];
            for (std::size_t j = 0; j < grad.size(); ++j) {
                grad[j] += sample_grads[i][j];
            }
        }
        // Stage 3b: neural-network encoder, batch backward.
        if (cfg_.encoder_kind == EncoderKind::NeuralNet) {
            Matrix dout(n, latent_dim);
            for (std::size_t i = 0; i < n; ++i) {
                std::copy(dlatents[i].begin(), dlatents[i].end(), dout.row(i).begin());
            }
            nn_.backward(nn_params(), nn_cache, dout, grad.subspan(0, encoder_size_));
        }
        const double inv = 1.0 / static_cast<double>(n);
        for (auto &v : grad) {
            v *= inv;
        }
        return loss * inv;
    }

  private:
    [[nodiscard]] std::span<const double> nn_params() const {
        return std::span<const double>(params_).subspan(0, encoder_size_);
    }

    void check_row(Row x) const {
        if (x.size() != static_cast<std::size_t>(cfg_.input_dim)) {
            throw ConfigError("head expects inputs of dimension " + std::to_string(cfg_.input_dim) +
                              ", got " + std::to_string(x.size()));
        }
    }

    static void check_seeds(std::size_t rows, std::size_t seeds) {
        if (rows != seeds) {
            throw ConfigError("need one seed per row: " + std::to_string(rows) + " rows, " +
                              std::to_string(seeds) + " seeds");
        }
    }

    [[nodiscard]] Matrix to_matrix(const std::vector<Row> &rows) const {
        Matrix m(rows.size(), static_cast<std::size_t>(cfg_.input_dim));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            check_row(rows[i]);
            std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
        }
        return m;
    }

    [[nodiscard]] std::vector<std::vector<double>> eval_latents(const std::vector<Row> &rows) const {
        std::vector<std::vector<double>> latents(rows.size());
        if (cfg_.encoder_kind == EncoderKind::Quantum) {
            parallel_for(rows.size(), jobs_, [&](std::size_t i) { latents[i] = latent(rows[i]); });
        } else if (!rows.empty()) {
            auto frozen = buffers_;
            const Matrix out = nn_.forward(nn_params(), frozen, to_matrix(rows), false);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                latents[i].assign(out.row(i).begin(), out.row(i).end());
            }
        }
        return latents;
    }

    [[nodiscard]] Logits output_logits(std::span<const double> lat, double z) const {
        if (cfg_.final_linear) {
            return linear_logits(lat, z, linear_weights(), cfg_.num_classes);
        }
        return {z, -z};
    }

    HeadConfig cfg_;
    std::vector<ParamBlock> blocks_;
    std::vector<double> params_;
    std::vector<double> buffers_;
    Mlp nn_;
    GateList encoder_block_;
    GateList pqc_gates_;
    std::size_t encoder_size_ = 0;
    std::size_t scale_offset_ = 0;
    std::size_t theta_q_offset_ = 0;
    std::size_t theta_q_size_ = 0;
    std::size_t w_offset_ = 0;
    std::size_t w_size_ = 0;
};

/// Logits of one input row.
inline Logits head_forward(Row x, const QuantumHead &head, const NoiseModel &noise,
                           std::uint64_t seed) {
    const std::uint64_t seeds[] = {seed};
    return head.logits({x}, seeds, noise).front();
}

/// Mean loss gradient over a batch, laid out like head.parameters().
inline std::vector<double> head_gradient(const Batch &batch, QuantumHead &head,
                                         const NoiseModel &noise, double *loss = nullptr) {
    std::vector<double> grad(head.parameter_count(), 0.0);
    const double l = head.loss_and_gradient(batch, noise, grad);
    if (loss != nullptr) {
        *loss = l;
    }
    return grad;
}

} // namespace qhead

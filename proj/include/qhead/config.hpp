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
 * @file config.hpp
 * Flat experiment configuration files.
 *
 * One `key = value` per line; `#` starts a comment. A value written as a
 * bracketed list, `learning_rate = [1e-3, 1.5e-3, 2.5e-3]`, marks a sweep
 * axis; expand_grid() turns a file with lists into the Cartesian product of
 * scalar configurations (first listed key varies slowest).
 */
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qhead/ansatz.hpp"
#include "qhead/energy.hpp"
#include "qhead/errors.hpp"
#include "qhead/head.hpp"
#include "qhead/nn.hpp"
#include "qhead/noise.hpp"
#include "qhead/trainer.hpp"

namespace qhead {

struct ConfigValue {
    std::vector<std::string> items;
    bool is_list = false;

    [[nodiscard]] const std::string &scalar() const { return items.front(); }

    friend bool operator==(const ConfigValue &, const ConfigValue &) = default;
};

/// Keys in first-appearance order with their raw values.
struct RawConfig {
    std::vector<std::pair<std::string, ConfigValue>> entries;

    [[nodiscard]] const ConfigValue *find(std::string_view key) const {
        for (const auto &[k, v] : entries) {
            if (k == key) {
                return &v;
            }
        }
        return nullptr;
    }

    /// Replaces an existing key in place or appends a new one.
    void set(const std::string &key, ConfigValue value) {
        for (auto &[k, v] : entries) {
            if (k == key) {
                v = std::move(value);
                return;
            }
        }
        entries.emplace_back(key, std::move(value));
    }

    void set(const std::string &key, const std::string &scalar) { set(key, ConfigValue{{scalar}, false}); }

    friend bool operator==(const RawConfig &, const RawConfig &) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace detail

inline RawConfig parse_config_text(std::string_view text) {
    RawConfig cfg;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected 'key = value'");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const auto raw = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(where + "missing key");
        }
        if (cfg.find(key) != nullptr) {
            throw ConfigError(where + "duplicate key '" + key + "'");
        }
        ConfigValue value;
        if (!raw.empty() && raw.front() == '[') {
            if (raw.back() != ']') {
                throw ConfigError(where + "unterminated list for '" + key + "'");
            }
            value.is_list = true;
            auto body = raw.substr(1, raw.size() - 2);
            while (!detail::trim(body).empty()) {
                const auto comma = body.find(',');
                const auto item = detail::trim(body.substr(0, comma));
                if (item.empty()) {
                    throw ConfigError(where + "empty list item for '" + key + "'");
                }
                value.items.emplace_back(item);
                if (comma == std::string_view::npos) {
                    break;
                }
                body = body.substr(comma + 1);
            }
            if (value.items.empty()) {
                throw ConfigError(where + "empty list for '" + key + "'");
            }
        } else {
            value.items.emplace_back(raw); // may be empty, e.g. "dataset ="
        }
        cfg.entries.emplace_back(key, std::move(value));
    }
    return cfg;
}

inline RawConfig load_config_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_config_text(text);
}

inline std::string serialize_config(const RawConfig &cfg) {
    std::string out;
    for (const auto &[k, v] : cfg.entries) {
        out += k + " = ";
        if (v.is_list) {
            out += '[';
            for (std::size_t i = 0; i < v.items.size(); ++i) {
                out += (i > 0 ? ", " : "") + v.items[i];
            }
            out += ']';
        } else {
            out += v.scalar();
        }
        out += '\n';
    }
    return out;
}

/// Cartesian product over list-valued keys. Scalar keys are copied into
/// every point; the result has no lists.
inline std::vector<RawConfig> expand_grid(const RawConfig &cfg) {
    std::vector<RawConfig> points{RawConfig{}};
    for (const auto &[k, v] : cfg.entries) {
        std::vector<RawConfig> next;
        for (const auto &p : points) {
            for (const auto &item : v.items) {
                RawConfig q = p;
                q.entries.emplace_back(k, ConfigValue{{item}, false});
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

/// Every knob of one experiment. Defaults reproduce the reference
/// single-encoder 10-qubit head.
struct ExperimentConfig {
    // model
    std::string model = "quantum"; ///< quantum | logistic | mlp
    int qubits = 10;               ///< Q, circuit width
    int encoders = 1;              ///< E
    int encoder_qubits = 0;        ///< Q_c; 0 means equal to Q
    int encoder_layers = 27;       ///< D_enc
    int encoder_connectivity = 1;
    std::string encoder = "quantum"; ///< quantum | nn
    std::string input_reduction = "none"; ///< none | fold
    int reupload_count = 4;        ///< R
    int main_layers = 2;           ///< M
    int reupload_layers = 1;       ///< N
    int connectivity = 1;          ///< C
    bool final_linear = true;      ///< F
    bool encoding_scale = true;
    int num_classes = 2;
    int hidden_layers = 0;
    int hidden_dim = 0;
    bool batch_norm = false;
    // noise
    std::optional<std::uint64_t> shots; ///< S; empty means exact
    double p1q = 0.0;
    double p2q = 0.0;
    // training
    double learning_rate = 1e-3; ///< L
    double lr_decay = 1.0;       ///< gamma
    double weight_decay = 0.0;   ///< rho
    int batch_size = 16;         ///< B
    int epochs = 800;
    std::uint64_t seed = 0;
    // data
    std::string dataset;         ///< embedding file; empty means synthetic clusters
    std::string dataset_format = "auto"; ///< auto | binary | csv
    int split_per_class = 256;
    double validation_fraction = 0.15;
    int synthetic_dim = 768;
    int synthetic_test_per_class = 100;
    double synthetic_separation = 10.0;
    double synthetic_shift = 0.0;
    std::uint64_t data_seed = 0;
    // energy
    EnergyConstants energy;
    // gradient check
    int gradcheck_samples = 4;
    double gradcheck_step = 1e-5;
    double gradcheck_tolerance = 1e-4;

    friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;

    [[nodiscard]] int resolved_encoder_qubits() const {
        return encoder_qubits > 0 ? encoder_qubits : qubits;
    }

    [[nodiscard]] HeadConfig head_config(int input_dim) const {
        HeadConfig h;
        h.input_dim = input_dim;
        h.encoder_kind = encoder == "nn" ? EncoderKind::NeuralNet : EncoderKind::Quantum;
        h.encoder = {encoders, resolved_encoder_qubits(), encoder_layers, encoder_connectivity};
        h.nn_encoder = mlp_config();
        h.pqc.qubits = qubits;
        h.pqc.connectivity = connectivity;
        h.pqc.main_layers = main_layers;
        h.pqc.reupload_layers = reupload_layers;
        h.pqc.reupload_count = reupload_count;
        h.num_classes = num_classes;
        h.final_linear = final_linear;
        h.trainable_encoding_scale = encoding_scale;
        h.input_reduction = input_reduction == "fold" ? InputReduction::Fold : InputReduction::None;
        return h;
    }

    [[nodiscard]] MlpConfig mlp_config() const { return {hidden_layers, hidden_dim, batch_norm}; }

    [[nodiscard]] NoiseModel noise() const { return {p1q, p2q, shots}; }

    [[nodiscard]] TrainConfig train_config() const {
        return {learning_rate, lr_decay, weight_decay, static_cast<std::size_t>(std::max(batch_size, 0)),
                epochs, seed};
    }

    /// Checks every downstream constraint; the message names the key.
    /// `input_dim` is the dataset dimension when already known.
    void validate(std::optional<int> input_dim = std::nullopt) const {
        auto field = [](const std::string &key, auto &&check) {
            try {
                check();
            } catch (const ConfigError &e) {
                throw ConfigError(key + ": " + e.what());
            }
        };
        auto require = [](bool ok, const std::string &msg) {
            if (!ok) {
                throw ConfigError(msg);
            }
        };
        field("model", [&] {
            require(model == "quantum" || model == "logistic" || model == "mlp",
                    "must be quantum, logistic or mlp, got '" + model + "'");
        });
        field("encoder", [&] {
            require(encoder == "quantum" || encoder == "nn", "must be quantum or nn, got '" + encoder + "'");
        });
        field("input_reduction", [&] {
            require(input_reduction == "none" || input_reduction == "fold",
                    "must be none or fold, got '" + input_reduction + "'");
        });
        field("dataset_format", [&] {
            require(dataset_format == "auto" || dataset_format == "binary" || dataset_format == "csv",
                    "must be auto, binary or csv, got '" + dataset_format + "'");
        });
        field("noise", [&] { noise().validate(); });
        field("training", [&] { train_config().validate(); });
        field("split_per_class", [&] { require(split_per_class >= 1, "must be >= 1"); });
        field("validation_fraction", [&] {
            require(validation_fraction >= 0.0 && validation_fraction < 1.0, "must be in [0, 1)");
        });
        field("synthetic_dim", [&] { require(synthetic_dim >= 1, "must be >= 1"); });
        field("synthetic_test_per_class", [&] { require(synthetic_test_per_class >= 1, "must be >= 1"); });
        field("synthetic_separation", [&] { require(synthetic_separation >= 0.0, "must be >= 0"); });
        field("energy", [&] { energy.validate(); });
        field("gradcheck", [&] {
            require(gradcheck_samples >= 1 && gradcheck_step > 0.0 && gradcheck_tolerance > 0.0,
                    "gradcheck_samples >= 1, gradcheck_step > 0 and gradcheck_tolerance > 0 required");
        });
        const int dim = input_dim.value_or(synthetic_dim);
        field("head", [&] {
            if (model == "quantum") {
                head_config(dim).validate();
            } else if (model == "mlp") {
                mlp_config().validate();
            } else {
                require(num_classes == 2, "logistic regression needs num_classes = 2");
            }
        });
    }
};

namespace detail {

template <typename T> T parse_number(const std::string &key, const std::string &s) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw ConfigError(key + ": cannot parse '" + s + "' as a number");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) {
            throw ConfigError(key + ": value must be finite");
        }
    }
    return v;
}

inline bool parse_bool(const std::string &key, const std::string &s) {
    if (s == "true" || s == "yes" || s == "1") {
        return true;
    }
    if (s == "false" || s == "no" || s == "0") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

struct ConfigField {
    std::string key;
    std::function<void(ExperimentConfig &, const std::string &)> set;
    std::function<std::string(const ExperimentConfig &)> get;
};

template <typename T> ConfigField bind_field(std::string key, T ExperimentConfig::*member) {
    ConfigField f;
    f.key = key;
    f.set = [key, member](ExperimentConfig &c, const std::string &s) {
        if constexpr (std::is_same_v<T, bool>) {
            c.*member = parse_bool(key, s);
        } else if constexpr (std::is_same_v<T, std::string>) {
            c.*member = s;
        } else {
            c.*member = parse_number<T>(key, s);
        }
    };
    f.get = [member](const ExperimentConfig &c) -> std::string {
        if constexpr (std::is_same_v<T, bool>) {
            return c.*member ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
            return c.*member;
        } else if constexpr (std::is_floating_point_v<T>) {
            return format_double(c.*member);
        } else {
            return std::to_string(c.*member);
        }
    };
    return f;
}

template <typename T> ConfigField bind_energy(std::string key, T EnergyConstants::*member) {
    ConfigField f;
    f.key = key;
    f.set = [key, member](ExperimentConfig &c, const std::string &s) {
        if constexpr (std::is_same_v<T, bool>) {
            c.energy.*member = parse_bool(key, s);
        } else {
            c.energy.*member = parse_number<T>(key, s);
        }
    };
    f.get = [member](const ExperimentConfig &c) -> std::string {
        if constexpr (std::is_same_v<T, bool>) {
            return c.energy.*member ? "true" : "false";
        } else {
            return format_double(c.energy.*member);
        }
    };
    return f;
}

inline const std::vector<ConfigField> &config_fields() {
    using E = ExperimentConfig;
    static const std::vector<ConfigField> fields = [] {
        std::vector<ConfigField> f{
            bind_field("model", &E::model),
            bind_field("qubits", &E::qubits),
            bind_field("encoders", &E::encoders),
            bind_field("encoder_qubits", &E::encoder_qubits),
            bind_field("encoder_layers", &E::encoder_layers),
            bind_field("encoder_connectivity", &E::encoder_connectivity),
            bind_field("encoder", &E::encoder),
            bind_field("input_reduction", &E::input_reduction),
            bind_field("reupload_count", &E::reupload_count),
            bind_field("main_layers", &E::main_layers),
            bind_field("reupload_layers", &E::reupload_layers),
            bind_field("connectivity", &E::connectivity),
            bind_field("final_linear", &E::final_linear),
            bind_field("encoding_scale", &E::encoding_scale),
            bind_field("num_classes", &E::num_classes),
            bind_field("hidden_layers", &E::hidden_layers),
            bind_field("hidden_dim", &E::hidden_dim),
            bind_field("batch_norm", &E::batch_norm),
        };
        ConfigField shots;
        shots.key = "shots";
        shots.set = [](E &c, const std::string &s) {
            if (s == "inf" || s == "exact") {
                c.shots.reset();
            } else {
                c.shots = parse_number<std::uint64_t>("shots", s);
            }
        };
        shots.get = [](const E &c) { return c.shots ? std::to_string(*c.shots) : std::string("inf"); };
        f.push_back(shots);
        const std::vector<ConfigField> rest{
            bind_field("p1q", &E::p1q),
            bind_field("p2q", &E::p2q),
            bind_field("learning_rate", &E::learning_rate),
            bind_field("lr_decay", &E::lr_decay),
            bind_field("weight_decay", &E::weight_decay),
            bind_field("batch_size", &E::batch_size),
            bind_field("epochs", &E::epochs),
            bind_field("seed", &E::seed),
            bind_field("dataset", &E::dataset),
            bind_field("dataset_format", &E::dataset_format),
            bind_field("split_per_class", &E::split_per_class),
            bind_field("validation_fraction", &E::validation_fraction),
            bind_field("synthetic_dim", &E::synthetic_dim),
            bind_field("synthetic_test_per_class", &E::synthetic_test_per_class),
            bind_field("synthetic_separation", &E::synthetic_separation),
            bind_field("synthetic_shift", &E::synthetic_shift),
            bind_field("data_seed", &E::data_seed),
            bind_energy("energy_p_qpu", &EnergyConstants::p_qpu),
            bind_energy("energy_t_1q", &EnergyConstants::t_1q),
            bind_energy("energy_t_2q", &EnergyConstants::t_2q),
            bind_energy("energy_shots", &EnergyConstants::shots),
            bind_energy("energy_p_gpu", &EnergyConstants::p_gpu),
            bind_energy("energy_f_gpu", &EnergyConstants::f_gpu),
            bind_energy("energy_gpu_uses_qpu_power", &EnergyConstants::gpu_uses_qpu_power),
            bind_field("gradcheck_samples", &E::gradcheck_samples),
            bind_field("gradcheck_step", &E::gradcheck_step),
            bind_field("gradcheck_tolerance", &E::gradcheck_tolerance),
        };
        f.insert(f.end(), rest.begin(), rest.end());
        return f;
    }();
    return fields;
}

} // namespace detail

/// Typed view of a scalar raw config. Unknown keys and list values are
/// rejected; missing keys keep their defaults.
inline ExperimentConfig from_raw(const RawConfig &raw) {
    ExperimentConfig cfg;
    for (const auto &[k, v] : raw.entries) {
        const auto &fields = detail::config_fields();
        const auto it = std::find_if(fields.begin(), fields.end(),
                                     [&](const detail::ConfigField &f) { return f.key == k; });
        if (it == fields.end()) {
            throw ConfigError(k + ": unknown key");
        }
        if (v.is_list) {
            throw ConfigError(k + ": list values are only allowed for sweeps");
        }
        it->set(cfg, v.scalar());
    }
    return cfg;
}

/// Every key with its resolved value, in canonical order.
inline RawConfig to_raw(const ExperimentConfig &cfg) {
    RawConfig raw;
    for (const auto &f : detail::config_fields()) {
        raw.entries.emplace_back(f.key, ConfigValue{{f.get(cfg)}, false});
    }
    return raw;
}

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto &f : detail::config_fields()) {
        keys.push_back(f.key);
    }
    return keys;
}

} // namespace qhead

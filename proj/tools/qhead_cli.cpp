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

// Command-line front end: qhead <train|eval|sweep|ablate|gradcheck|energy>.
//
// Exit codes: 0 success, 1 a check or run failed, 2 bad configuration or
// unreadable input.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qhead/qhead.hpp"

namespace {

struct CommonOptions {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App *cmd, CommonOptions &o, bool needs_config = true) {
    auto *c = cmd->add_option("--config", o.config, "experiment config file (key = value lines)");
    if (needs_config) {
        c->required();
    }
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "override the config seed");
    cmd->add_option("--jobs", o.jobs, "worker threads (results do not depend on it)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--set", o.overrides, "override a config key, e.g. --set qubits=6");
}

qhead::RawConfig load_raw(const CommonOptions &o) {
    qhead::RawConfig raw = o.config.empty() ? qhead::RawConfig{} : qhead::load_config_file(o.config);
    for (const auto &kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw qhead::ConfigError("--set expects key=value, got '" + kv + "'");
        }
        const std::string text = kv.substr(0, eq) + " = " + kv.substr(eq + 1);
        for (auto &entry : qhead::parse_config_text(text).entries) {
            raw.set(entry.first, entry.second);
        }
    }
    if (o.seed) {
        raw.set("seed", std::to_string(*o.seed));
    }
    return raw;
}

qhead::ExperimentConfig load_config(const CommonOptions &o) {
    qhead::ExperimentConfig cfg = qhead::from_raw(load_raw(o));
    cfg.validate();
    return cfg;
}

void print_summary(const qhead::Json &j, std::initializer_list<const char *> keys) {
    for (const char *k : keys) {
        if (j.contains(k)) {
            std::cout << k << ": " << j[k].dump() << "\n";
        }
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum classification head: training, evaluation and estimates"};
    app.require_subcommand(1);

    CommonOptions train_opts;
    auto *train = app.add_subcommand("train", "train a model; writes report.json, metrics.csv, checkpoint.qhd");
    add_common(train, train_opts);

    CommonOptions eval_opts;
    std::string checkpoint;
    auto *eval = app.add_subcommand("eval", "evaluate a checkpoint on the validation and test splits");
    add_common(eval, eval_opts);
    eval->add_option("--checkpoint", checkpoint, "QHD1 checkpoint file")->required();

    CommonOptions sweep_opts;
    auto *sweep = app.add_subcommand("sweep", "train every point of a grid given by list values");
    add_common(sweep, sweep_opts);

    CommonOptions ablate_opts;
    std::string mode;
    auto *ablate = app.add_subcommand("ablate", "train with one component replaced");
    add_common(ablate, ablate_opts);
    ablate->add_option("--mode", mode, "nn-encoder | nn-head | no-final-linear")->required();

    CommonOptions grad_opts;
    auto *gradcheck = app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
    add_common(gradcheck, grad_opts);

    CommonOptions energy_opts;
    auto *energy = app.add_subcommand("energy", "QPU vs GPU inference energy and crossover");
    add_common(energy, energy_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            const auto cfg = load_config(train_opts);
            const auto res = qhead::run_train(cfg, train_opts.out, train_opts.jobs);
            print_summary(res.json, {"model", "parameter_count", "best_epoch", "best_val_acc", "test_acc"});
            std::cout << "wall_seconds: " << res.wall_seconds << "\n";
        } else if (eval->parsed()) {
            const auto cfg = load_config(eval_opts);
            print_summary(qhead::run_eval(cfg, checkpoint, eval_opts.out, eval_opts.jobs),
                          {"model", "parameter_count", "val_acc", "test_acc"});
        } else if (sweep->parsed()) {
            const auto raw = load_raw(sweep_opts);
            const auto j = qhead::run_sweep(raw, sweep_opts.out, sweep_opts.jobs);
            print_summary(j, {"points", "failed"});
            for (const auto &r : j["results"]) {
                if (r["status"] != "ok") {
                    std::cerr << r["directory"].get<std::string>() << " failed: "
                              << r["error"].get<std::string>() << "\n";
                }
            }
            if (j["failed"].get<std::size_t>() == j["points"].get<std::size_t>()) {
                return 1;
            }
        } else if (ablate->parsed()) {
            const auto m = qhead::parse_ablation(mode);
            const auto cfg = load_config(ablate_opts);
            const auto res = qhead::run_ablate(cfg, m, ablate_opts.out, ablate_opts.jobs);
            print_summary(res.json, {"ablation", "model", "parameter_count", "reference_parameter_count",
                                     "parameter_delta", "best_val_acc", "test_acc"});
        } else if (gradcheck->parsed()) {
            const auto cfg = load_config(grad_opts);
            const auto j = qhead::run_gradcheck(cfg, grad_opts.out, grad_opts.jobs);
            print_summary(j, {"model", "parameters", "max_deviation", "tolerance", "pass"});
            return j["pass"].get<bool>() ? 0 : 1;
        } else if (energy->parsed()) {
            const auto cfg = load_config(energy_opts);
            print_summary(qhead::run_energy(cfg, energy_opts.out),
                          {"crossover_qubits", "crossover_qubits_with_qpu_power_in_gpu_formula",
                           "crossover_qubits_with_gpu_power", "sign_changes"});
        }
    } catch (const qhead::ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const qhead::DataError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const qhead::FormatError &e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

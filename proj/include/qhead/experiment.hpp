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
 * @file experiment.hpp
 * End-to-end commands behind the command-line tool: train, eval, sweep,
 * ablate, gradcheck and energy. Each writes its artifacts into an output
 * directory and returns the main JSON document it wrote.
 *
 * Artifacts are deterministic functions of the configuration: they embed
 * the resolved configuration and seed but no timestamps, paths or thread
 * counts. Wall-clock time goes to a separate timing.json.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qhead/baselines.hpp"
#include "qhead/checkpoint.hpp"
#include "qhead/config.hpp"
#include "qhead/datasets.hpp"
#include "qhead/energy.hpp"
#include "qhead/head.hpp"
#include "qhead/parallel.hpp"
#include "qhead/trainer.hpp"

namespace qhead {

using Json = nlohmann::ordered_json;

/// Loads the configured embedding file (or generates synthetic clusters)
/// and applies the split recipe seeded by `data_seed`.
inline EmbeddingDataset load_experiment_data(const ExperimentConfig &cfg) {
    EmbeddingDataset ds;
    if (!cfg.dataset.empty()) {
        const std::filesystem::path path(cfg.dataset);
        if (!std::filesystem::exists(path)) {
            throw DataError("dataset file '" + cfg.dataset + "' does not exist");
        }
        const DatasetFormat fmt = cfg.dataset_format == "auto"   ? format_for_path(path)
                                  : cfg.dataset_format == "csv" ? DatasetFormat::Csv
                                                                : DatasetFormat::Binary;
        ds = load_embeddings(path, fmt, cfg.num_classes);
    } else {
        ClusterSpec spec;
        spec.dim = static_cast<std::size_t>(cfg.synthetic_dim);
        spec.per_class = static_cast<std::size_t>(cfg.split_per_class + cfg.synthetic_test_per_class);
        spec.separation = cfg.synthetic_separation;
        spec.shift = cfg.synthetic_shift;
        spec.seed = cfg.data_seed;
        if (cfg.num_classes != 2) {
            throw ConfigError("num_classes: synthetic clusters have 2 classes");
        }
        ds = synthetic_clusters(spec);
    }
    SplitRecipe recipe;
    recipe.per_class = static_cast<std::size_t>(cfg.split_per_class);
    recipe.validation_fraction = cfg.validation_fraction;
    return make_standard_splits(std::move(ds), cfg.data_seed, recipe);
}

inline std::unique_ptr<Classifier> build_model(const ExperimentConfig &cfg, int input_dim) {
    if (cfg.model == "logistic") {
        return std::make_unique<LogisticRegression>(static_cast<std::size_t>(input_dim));
    }
    if (cfg.model == "mlp") {
        return std::make_unique<MlpClassifier>(static_cast<std::size_t>(input_dim), cfg.num_classes,
                                               cfg.mlp_config());
    }
    return std::make_unique<QuantumHead>(cfg.head_config(input_dim));
}

/// Parameter count of the configured model without building it.
inline std::size_t model_parameter_count(const ExperimentConfig &cfg, int input_dim) {
    if (cfg.model == "logistic") {
        return LogisticRegression::parameter_count(static_cast<std::size_t>(input_dim));
    }
    if (cfg.model == "mlp") {
        return MlpClassifier::parameter_count(static_cast<std::size_t>(input_dim), cfg.num_classes,
                                              cfg.mlp_config());
    }
    return QuantumHead::parameter_count(cfg.head_config(input_dim));
}

namespace detail {

inline Json config_json(const ExperimentConfig &cfg) {
    Json j = Json::object();
    for (const auto &[k, v] : to_raw(cfg).entries) {
        j[k] = v.scalar();
    }
    return j;
}

inline std::string csv_preamble(const RawConfig &raw) {
    std::string out;
    std::istringstream lines(serialize_config(raw));
    for (std::string line; std::getline(lines, line);) {
        out += "# " + line + "\n";
    }
    return out;
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    out << text;
}

inline void write_json(const std::filesystem::path &path, const Json &j) {
    write_text(path, j.dump(2) + "\n");
}

inline void prepare_dir(const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

inline Json dataset_json(const EmbeddingDataset &ds, const ExperimentConfig &cfg) {
    return Json{{"source", cfg.dataset.empty() ? std::string("synthetic_clusters") : cfg.dataset},
                {"dim", ds.dim},
                {"rows", ds.size()},
                {"train", ds.splits.train.size()},
                {"validation", ds.splits.validation.size()},
                {"test", ds.splits.test.size()}};
}

inline std::string metrics_csv(const TrainReport &r, const ExperimentConfig &cfg) {
    std::string out = csv_preamble(to_raw(cfg));
    out += "epoch,loss,val_acc\n";
    for (const auto &m : r.history) {
        out += std::to_string(m.epoch) + "," + format_double(m.loss) + "," +
               format_double(m.val_acc) + "\n";
    }
    return out;
}

} // namespace detail

struct TrainOutcome {
    TrainReport report;
    Json json;
    double wall_seconds = 0.0;
};

/// Trains the configured model and writes report.json, metrics.csv,
/// checkpoint.qhd and timing.json into `out`.
inline TrainOutcome run_train(const ExperimentConfig &cfg, const std::filesystem::path &out,
                              unsigned jobs = 1, const Json &extra = Json::object()) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const EmbeddingDataset ds = load_experiment_data(cfg);
    cfg.validate(static_cast<int>(ds.dim));
    auto model = build_model(cfg, static_cast<int>(ds.dim));
    model->set_jobs(jobs);
    detail::prepare_dir(out);

    TrainOutcome res;
    res.report = train(*model, ds, cfg.train_config(), cfg.noise());
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json layout = Json::array();
    for (const auto &b : model->layout()) {
        layout.push_back({{"name", b.name}, {"size", b.size}});
    }
    Json j;
    j["command"] = "train";
    j["model"] = model->kind();
    j["seed"] = cfg.seed;
    j["parameter_count"] = res.report.parameter_count;
    j["layout"] = layout;
    j["best_epoch"] = res.report.best_epoch;
    j["best_val_acc"] = res.report.best_val_acc;
    j["test_acc"] = res.report.test_acc;
    j["final_loss"] = res.report.history.back().loss;
    j["epochs"] = res.report.history.size();
    j["dataset"] = detail::dataset_json(ds, cfg);
    for (const auto &[k, v] : extra.items()) {
        j[k] = v;
    }
    j["config"] = detail::config_json(cfg);
    res.json = j;

    detail::write_json(out / "report.json", j);
    detail::write_text(out / "metrics.csv", detail::metrics_csv(res.report, cfg));
    save_checkpoint(snapshot(*model), out / "checkpoint.qhd");
    detail::write_json(out / "timing.json", Json{{"wall_seconds", res.wall_seconds}});
    return res;
}

/// Restores a checkpoint and reports validation and test accuracy. The
/// test pass uses the same seeds as the final pass of `train`.
inline Json run_eval(const ExperimentConfig &cfg, const std::filesystem::path &checkpoint,
                     const std::filesystem::path &out, unsigned jobs = 1) {
    cfg.validate();
    const EmbeddingDataset ds = load_experiment_data(cfg);
    auto model = build_model(cfg, static_cast<int>(ds.dim));
    model->set_jobs(jobs);
    if (!std::filesystem::exists(checkpoint)) {
        throw DataError("checkpoint file '" + checkpoint.string() + "' does not exist");
    }
    restore(*model, load_checkpoint(checkpoint));
    const auto noise = cfg.noise();
    Json j;
    j["command"] = "eval";
    j["model"] = model->kind();
    j["seed"] = cfg.seed;
    j["parameter_count"] = model->parameter_count();
    j["val_acc"] = evaluate(*model, ds, ds.splits.validation, noise,
                            derive_seed(cfg.seed, {stream::Validation}));
    j["test_acc"] =
        evaluate(*model, ds, ds.splits.test, noise, derive_seed(cfg.seed, {stream::Test}));
    j["dataset"] = detail::dataset_json(ds, cfg);
    j["config"] = detail::config_json(cfg);
    detail::prepare_dir(out);
    detail::write_json(out / "eval.json", j);
    return j;
}

struct SweepRow {
    int qubits = 0;
    std::size_t point = 0;
    double best_val_acc = 0.0;
    double test_acc = 0.0;
};

/// Trains every grid point into out/point_NNN. A failing point is recorded
/// and the sweep continues. summary.csv keeps, per qubit count, the point
/// with the highest validation accuracy (earliest point on ties).
inline Json run_sweep(const RawConfig &raw, const std::filesystem::path &out, unsigned jobs = 1) {
    const auto points = expand_grid(raw);
    if (points.empty()) {
        throw ConfigError("sweep grid is empty");
    }
    detail::prepare_dir(out);
    std::vector<Json> results(points.size());
    parallel_for_dynamic(points.size(), jobs, [&](std::size_t i) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", i);
        Json r;
        r["point"] = i;
        r["directory"] = name;
        try {
            const ExperimentConfig cfg = from_raw(points[i]);
            r["qubits"] = cfg.qubits;
            const auto t = run_train(cfg, out / name, 1);
            r["status"] = "ok";
            r["best_val_acc"] = t.report.best_val_acc;
            r["test_acc"] = t.report.test_acc;
            r["parameter_count"] = t.report.parameter_count;
        } catch (const std::exception &e) {
            r["status"] = "failed";
            r["error"] = e.what();
        }
        results[i] = std::move(r);
    });

    std::map<int, SweepRow> best;
    for (const auto &r : results) {
        if (r["status"] != "ok") {
            continue;
        }
        const SweepRow row{r["qubits"].get<int>(), r["point"].get<std::size_t>(),
                           r["best_val_acc"].get<double>(), r["test_acc"].get<double>()};
        auto it = best.find(row.qubits);
        if (it == best.end() || row.best_val_acc > it->second.best_val_acc) {
            best[row.qubits] = row;
        }
    }
    std::string csv = detail::csv_preamble(raw);
    csv += "qubits,point,best_val_acc,test_acc\n";
    for (const auto &[q, row] : best) {
        csv += std::to_string(q) + "," + std::to_string(row.point) + "," +
               format_double(row.best_val_acc) + "," + format_double(row.test_acc) + "\n";
    }
    detail::write_text(out / "summary.csv", csv);

    Json grid = Json::object();
    for (const auto &[k, v] : raw.entries) {
        grid[k] = v.is_list ? Json(v.items) : Json(v.scalar());
    }
    Json j;
    j["command"] = "sweep";
    j["points"] = points.size();
    j["failed"] = std::count_if(results.begin(), results.end(),
                                [](const Json &r) { return r["status"] != "ok"; });
    j["results"] = results;
    j["config"] = grid;
    detail::write_json(out / "sweep.json", j);
    return j;
}

enum class AblationMode { NnEncoder, NnHead, NoFinalLinear };

inline AblationMode parse_ablation(const std::string &s) {
    if (s == "nn-encoder") {
        return AblationMode::NnEncoder;
    }
    if (s == "nn-head") {
        return AblationMode::NnHead;
    }
    if (s == "no-final-linear") {
        return AblationMode::NoFinalLinear;
    }
    throw ConfigError("mode: must be nn-encoder, nn-head or no-final-linear, got '" + s + "'");
}

inline const char *ablation_name(AblationMode m) {
    switch (m) {
    case AblationMode::NnEncoder:
        return "nn-encoder";
    case AblationMode::NnHead:
        return "nn-head";
    case AblationMode::NoFinalLinear:
        return "no-final-linear";
    }
    return "?";
}

/// The configuration with one component swapped out.
inline ExperimentConfig ablated_config(ExperimentConfig cfg, AblationMode mode) {
    switch (mode) {
    case AblationMode::NnEncoder:
        cfg.model = "quantum";
        cfg.encoder = "nn";
        break;
    case AblationMode::NnHead:
        cfg.model = "mlp";
        break;
    case AblationMode::NoFinalLinear:
        cfg.model = "quantum";
        cfg.final_linear = false;
        break;
    }
    return cfg;
}

/// Trains the ablated model; the report also states the parameter count of
/// the unablated hybrid head for comparison.
inline TrainOutcome run_ablate(const ExperimentConfig &cfg, AblationMode mode,
                               const std::filesystem::path &out, unsigned jobs = 1) {
    ExperimentConfig reference = cfg;
    reference.model = "quantum";
    reference.encoder = "quantum";
    reference.final_linear = true;
    const ExperimentConfig ablated = ablated_config(cfg, mode);
    ablated.validate();
    const int dim = cfg.dataset.empty() ? cfg.synthetic_dim
                                        : static_cast<int>(load_experiment_data(cfg).dim);
    const auto ref_count = model_parameter_count(reference, dim);
    const auto count = model_parameter_count(ablated, dim);
    Json extra;
    extra["ablation"] = ablation_name(mode);
    extra["reference_parameter_count"] = ref_count;
    extra["parameter_delta"] = static_cast<long long>(ref_count) - static_cast<long long>(count);
    return run_train(ablated, out, jobs, extra);
}

struct GradcheckResult {
    double max_deviation = 0.0;
    std::size_t parameters = 0;
    bool pass = false;
};

/// Analytic batch gradient against central differences of the batch loss,
/// noiseless, on the first `samples` training rows.
inline GradcheckResult gradient_check(Classifier &model, const Batch &batch, double step,
                                      double tolerance) {
    const NoiseModel exact;
    std::vector<double> analytic(model.parameter_count());
    std::vector<double> scratch(model.parameter_count());
    model.loss_and_gradient(batch, exact, analytic);
    auto params = model.parameters();
    GradcheckResult r;
    r.parameters = params.size();
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double keep = params[j];
        params[j] = keep + step;
        const double up = model.loss_and_gradient(batch, exact, scratch);
        params[j] = keep - step;
        const double down = model.loss_and_gradient(batch, exact, scratch);
        params[j] = keep;
        r.max_deviation = std::max(r.max_deviation, std::abs((up - down) / (2 * step) - analytic[j]));
    }
    r.pass = r.max_deviation < tolerance;
    return r;
}

inline Json run_gradcheck(const ExperimentConfig &cfg, const std::filesystem::path &out,
                          unsigned jobs = 1) {
    cfg.validate();
    const EmbeddingDataset ds = load_experiment_data(cfg);
    auto model = build_model(cfg, static_cast<int>(ds.dim));
    model->set_jobs(jobs);
    model->initialize(cfg.seed);
    Batch batch;
    const std::size_t n =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.gradcheck_samples), ds.splits.train.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = ds.splits.train[i];
        batch.rows.push_back(ds.row(idx));
        batch.labels.push_back(ds.labels[idx]);
        batch.seeds.push_back(derive_seed(cfg.seed, {stream::Check, i}));
    }
    const auto r = gradient_check(*model, batch, cfg.gradcheck_step, cfg.gradcheck_tolerance);
    Json j;
    j["command"] = "gradcheck";
    j["model"] = model->kind();
    j["seed"] = cfg.seed;
    j["parameters"] = r.parameters;
    j["samples"] = n;
    j["max_deviation"] = r.max_deviation;
    j["tolerance"] = cfg.gradcheck_tolerance;
    j["pass"] = r.pass;
    j["note"] = "noise settings are ignored; the check runs noiseless with exact expectations";
    j["config"] = detail::config_json(cfg);
    detail::prepare_dir(out);
    detail::write_json(out / "gradcheck.json", j);
    return j;
}

/// Energy curve over 2..60 qubits for the configured block layout, written
/// as energy.csv, plus energy.json with the crossover under both readings of
/// the GPU power symbol.
inline Json run_energy(const ExperimentConfig &cfg, const std::filesystem::path &out) {
    cfg.energy.validate();
    CircuitSpec shape;
    shape.main_layers = cfg.main_layers;
    shape.reupload_layers = cfg.reupload_layers;
    shape.reupload_count = cfg.reupload_count;
    const auto curve = energy_curve(cfg.energy, shape);
    EnergyConstants other = cfg.energy;
    other.gpu_uses_qpu_power = !other.gpu_uses_qpu_power;
    const auto cross = find_crossover(cfg.energy, shape);
    const auto cross_other = find_crossover(other, shape);

    std::string csv = detail::csv_preamble(to_raw(cfg));
    csv += "qubits,e_qpu_kj,e_gpu_kj\n";
    for (const auto &p : curve) {
        csv += std::to_string(p.qubits) + "," + format_double(p.e_qpu_kj) + "," +
               format_double(p.e_gpu_kj) + "\n";
    }
    Json j;
    j["command"] = "energy";
    j["seed"] = cfg.seed;
    j["crossover_qubits"] = cross ? Json(*cross) : Json(nullptr);
    j[cfg.energy.gpu_uses_qpu_power ? "crossover_qubits_with_gpu_power"
                                    : "crossover_qubits_with_qpu_power_in_gpu_formula"] =
        cross_other ? Json(*cross_other) : Json(nullptr);
    j["sign_changes"] = sign_changes(curve);
    j["config"] = detail::config_json(cfg);
    detail::prepare_dir(out);
    detail::write_text(out / "energy.csv", csv);
    detail::write_json(out / "energy.json", j);
    return j;
}

} // namespace qhead

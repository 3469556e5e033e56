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
 * @file datasets.hpp
 * Labeled embedding datasets: file formats, the fixed-size split recipe,
 * and synthetic Gaussian clusters.
 *
 * Binary layout (all little-endian):
 *
 *     offset 0        "EMB1"
 *     offset 4        u32 dim
 *     offset 8        u32 count
 *     offset 12       count * dim f32 values, row-major
 *     then            count u8 labels
 *
 * CSV layout: header `label,f0,...,f{dim-1}`, then one row per sample.
 * Values are stored as 32-bit floats in both formats, so a dataset read
 * from either file is identical in memory.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qhead/errors.hpp"
#include "qhead/model.hpp"
#include "qhead/random.hpp"

namespace qhead {

struct Splits {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;

    friend bool operator==(const Splits &, const Splits &) = default;
};

struct EmbeddingDataset {
    std::size_t dim = 0;
    std::vector<double> values; ///< row-major, size() * dim entries
    std::vector<int> labels;
    int num_classes = 2;
    Splits splits;

    [[nodiscard]] std::size_t size() const { return labels.size(); }

    [[nodiscard]] Row row(std::size_t i) const {
        return {values.data() + i * dim, dim};
    }

    [[nodiscard]] std::vector<Row> rows(std::span<const std::size_t> indices) const {
        std::vector<Row> out;
        out.reserve(indices.size());
        for (auto i : indices) {
            out.push_back(row(i));
        }
        return out;
    }

    [[nodiscard]] std::vector<int> labels_of(std::span<const std::size_t> indices) const {
        std::vector<int> out;
        out.reserve(indices.size());
        for (auto i : indices) {
            out.push_back(labels[i]);
        }
        return out;
    }

    /// Shape, label range, and split disjointness.
    void validate() const {
        if (dim == 0) {
            throw DataError("dataset dimension must be positive");
        }
        if (values.size() != labels.size() * dim) {
            throw DataError("dataset holds " + std::to_string(values.size()) + " values for " +
                            std::to_string(labels.size()) + " rows of dimension " +
                            std::to_string(dim));
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] < 0 || labels[i] >= num_classes) {
                throw DataError("row " + std::to_string(i) + " has label " +
                                std::to_string(labels[i]) + ", expected < " +
                                std::to_string(num_classes));
            }
        }
        std::vector<char> seen(labels.size(), 0);
        for (const auto *part : {&splits.train, &splits.validation, &splits.test}) {
            for (auto i : *part) {
                if (i >= labels.size()) {
                    throw DataError("split index " + std::to_string(i) + " out of range");
                }
                if (seen[i] != 0) {
                    throw DataError("split index " + std::to_string(i) + " appears twice");
                }
                seen[i] = 1;
            }
        }
    }

    friend bool operator==(const EmbeddingDataset &, const EmbeddingDataset &) = default;
};

enum class DatasetFormat { Binary, Csv };

/// `.csv` means CSV; anything else is the binary format.
inline DatasetFormat format_for_path(const std::filesystem::path &path) {
    return path.extension() == ".csv" ? DatasetFormat::Csv : DatasetFormat::Binary;
}

namespace detail {

inline std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open dataset file '" + path.string() + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_u32(std::string_view bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) {
        v = (v << 8U) | static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(b)]);
    }
    return v;
}

inline void write_u32(std::string &out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
        out.push_back(static_cast<char>((v >> (8U * static_cast<unsigned>(b))) & 0xFFU));
    }
}

inline void check_labels(const EmbeddingDataset &ds) {
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        if (ds.labels[i] < 0 || ds.labels[i] >= ds.num_classes) {
            throw DataError("row " + std::to_string(i) + " has label " +
                            std::to_string(ds.labels[i]) + ", expected < " +
                            std::to_string(ds.num_classes));
        }
    }
}

inline EmbeddingDataset parse_binary(std::string_view bytes, int num_classes) {
    constexpr std::size_t kHeader = 12;
    if (bytes.size() < 4 || bytes.substr(0, 4) != "EMB1") {
        throw FormatError("bad magic, expected \"EMB1\"", 0);
    }
    if (bytes.size() < kHeader) {
        throw FormatError("truncated header: expected " + std::to_string(kHeader) +
                              " bytes, got " + std::to_string(bytes.size()),
                          bytes.size());
    }
    const std::uint32_t dim = read_u32(bytes, 4);
    const std::uint32_t count = read_u32(bytes, 8);
    if (dim == 0) {
        throw FormatError("dimension must be positive", 4);
    }
    const std::size_t expected = kHeader + std::size_t{count} * dim * 4 + count;
    if (bytes.size() != expected) {
        throw FormatError((bytes.size() < expected ? "truncated file: expected "
                                                   : "trailing bytes: expected ") +
                              std::to_string(expected) + " bytes for " + std::to_string(count) +
                              " rows of dimension " + std::to_string(dim) + ", got " +
                              std::to_string(bytes.size()),
                          std::min(bytes.size(), expected));
    }
    EmbeddingDataset ds;
    ds.dim = dim;
    ds.num_classes = num_classes;
    ds.values.resize(std::size_t{count} * dim);
    for (std::size_t i = 0; i < ds.values.size(); ++i) {
        const std::uint32_t raw = read_u32(bytes, kHeader + 4 * i);
        ds.values[i] = static_cast<double>(std::bit_cast<float>(raw));
    }
    const std::size_t label_at = kHeader + ds.values.size() * 4;
    ds.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        ds.labels[i] = static_cast<unsigned char>(bytes[label_at + i]);
    }
    check_labels(ds);
    return ds;
}

inline EmbeddingDataset parse_csv(std::string_view text, int num_classes) {
    EmbeddingDataset ds;
    ds.num_classes = num_classes;
    std::size_t pos = 0;
    auto next_line = [&](std::size_t &start) {
        start = pos;
        const std::size_t end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        return line;
    };

    std::size_t line_start = 0;
    const std::string_view header = next_line(line_start);
    if (header.substr(0, 5) != "label") {
        throw FormatError("CSV header must start with \"label\"", 0);
    }
    {
        std::size_t col = 0;
        std::size_t at = 5;
        while (at < header.size()) {
            const std::string expect = ",f" + std::to_string(col);
            if (header.substr(at, expect.size()) != expect) {
                throw FormatError("CSV header: expected column \"f" + std::to_string(col) + "\"", at);
            }
            at += expect.size();
            ++col;
        }
        if (col == 0) {
            throw FormatError("CSV header has no feature columns", header.size());
        }
        ds.dim = col;
    }

    while (pos < text.size()) {
        const std::string_view line = next_line(line_start);
        if (line.empty()) {
            continue;
        }
        std::size_t at = 0;
        std::size_t field = 0;
        while (true) {
            const std::size_t comma = line.find(',', at);
            const std::string_view cell =
                line.substr(at, comma == std::string_view::npos ? line.npos : comma - at);
            const std::size_t offset = line_start + at;
            if (field == 0) {
                int label = 0;
                const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), label);
                if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size()) {
                    throw FormatError("bad label '" + std::string(cell) + "'", offset);
                }
                ds.labels.push_back(label);
            } else {
                if (field > ds.dim) {
                    throw FormatError("row has more than " + std::to_string(ds.dim) + " features",
                                      offset);
                }
                float v = 0.0F;
                const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size()) {
                    throw FormatError("bad number '" + std::string(cell) + "'", offset);
                }
                ds.values.push_back(static_cast<double>(v));
            }
            ++field;
            if (comma == std::string_view::npos) {
                break;
            }
            at = comma + 1;
        }
        if (field != ds.dim + 1) {
            throw FormatError("row has " + std::to_string(field - 1) + " features, expected " +
                                  std::to_string(ds.dim),
                              line_start);
        }
    }
    check_labels(ds);
    return ds;
}

} // namespace detail

inline EmbeddingDataset load_embeddings(const std::filesystem::path &path, DatasetFormat format,
                                        int num_classes = 2) {
    const std::string bytes = detail::read_file(path);
    return format == DatasetFormat::Binary ? detail::parse_binary(bytes, num_classes)
                                           : detail::parse_csv(bytes, num_classes);
}

inline EmbeddingDataset load_embeddings(const std::filesystem::path &path, int num_classes = 2) {
    return load_embeddings(path, format_for_path(path), num_classes);
}

/// Serialized bytes. Values are narrowed to 32-bit floats.
inline std::string encode_embeddings(const EmbeddingDataset &ds, DatasetFormat format) {
    ds.validate();
    std::string out;
    if (format == DatasetFormat::Binary) {
        for (int l : ds.labels) {
            if (l > 255) {
                throw DataError("the binary format stores labels as u8; got " + std::to_string(l));
            }
        }
        out = "EMB1";
        detail::write_u32(out, static_cast<std::uint32_t>(ds.dim));
        detail::write_u32(out, static_cast<std::uint32_t>(ds.size()));
        for (double v : ds.values) {
            detail::write_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
        for (int l : ds.labels) {
            out.push_back(static_cast<char>(l));
        }
        return out;
    }
    out = "label";
    for (std::size_t j = 0; j < ds.dim; ++j) {
        out += ",f" + std::to_string(j);
    }
    out += '\n';
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += std::to_string(ds.labels[i]);
        for (double v : ds.row(i)) {
            const auto r = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
            out += ',';
            out.append(buf, r.ptr);
        }
        out += '\n';
    }
    return out;
}

inline void save_embeddings(const EmbeddingDataset &ds, const std::filesystem::path &path,
                            DatasetFormat format) {
    const std::string bytes = encode_embeddings(ds, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write dataset file '" + path.string() + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline void save_embeddings(const EmbeddingDataset &ds, const std::filesystem::path &path) {
    save_embeddings(ds, path, format_for_path(path));
}

struct SplitRecipe {
    std::size_t per_class = 256;     ///< samples drawn per class for train + validation
    double validation_fraction = 0.15;
};

/// Draws `per_class` samples of every class by seeded shuffle; within each
/// class floor(fraction * per_class) go to validation and the rest to
/// training. Every other sample is test data. Index lists are sorted.
inline EmbeddingDataset make_standard_splits(EmbeddingDataset ds, std::uint64_t seed,
                                          const SplitRecipe &recipe = {}) {
    if (recipe.per_class == 0 || recipe.validation_fraction < 0.0 ||
        recipe.validation_fraction >= 1.0) {
        throw ConfigError("split recipe needs per_class >= 1 and a validation fraction in [0, 1)");
    }
    ds.splits = {};
    ds.validate();
    const auto n_val = static_cast<std::size_t>(
        std::floor(recipe.validation_fraction * static_cast<double>(recipe.per_class)));
    std::vector<char> used(ds.size(), 0);
    for (int c = 0; c < ds.num_classes; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] == c) {
                members.push_back(i);
            }
        }
        if (members.size() < recipe.per_class) {
            throw DataError("class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                            " samples, the split needs " + std::to_string(recipe.per_class));
        }
        Rng rng(derive_seed(seed, {stream::Split, static_cast<std::uint64_t>(c)}));
        shuffle_in_place(std::span(members), rng);
        for (std::size_t k = 0; k < recipe.per_class; ++k) {
            (k < n_val ? ds.splits.validation : ds.splits.train).push_back(members[k]);
            used[members[k]] = 1;
        }
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (used[i] == 0) {
            ds.splits.test.push_back(i);
        }
    }
    std::sort(ds.splits.train.begin(), ds.splits.train.end());
    std::sort(ds.splits.validation.begin(), ds.splits.validation.end());
    ds.validate();
    return ds;
}

struct ClusterSpec {
    std::size_t dim = 768;
    std::size_t per_class = 256;
    double separation = 10.0;
    std::uint64_t seed = 0;
    /// Optional common displacement of both clusters along a second random
    /// unit vector orthogonal to the class axis.
    double shift = 0.0;
};

/// Two unit-covariance Gaussian clusters centered at +-(separation/2) u,
/// class 0 at -u. Rows alternate by class. Values are rounded to 32-bit
/// floats so the dataset survives a file round trip unchanged.
inline EmbeddingDataset synthetic_clusters(const ClusterSpec &spec) {
    if (spec.dim == 0 || spec.separation < 0.0) {
        throw ConfigError("synthetic clusters need dim >= 1 and separation >= 0");
    }
    if (spec.shift != 0.0 && spec.dim < 2) {
        throw ConfigError("a shifted cluster pair needs dim >= 2");
    }
    Rng rng(derive_seed(spec.seed, {stream::Data}));
    std::normal_distribution<double> normal(0.0, 1.0);
    auto unit = [&](const std::vector<double> *orth) {
        std::vector<double> v(spec.dim);
        double n = 0.0;
        do {
            for (auto &x : v) {
                x = normal(rng);
            }
            if (orth != nullptr) {
                double dot = 0.0;
                for (std::size_t j = 0; j < spec.dim; ++j) {
                    dot += v[j] * (*orth)[j];
                }
                for (std::size_t j = 0; j < spec.dim; ++j) {
                    v[j] -= dot * (*orth)[j];
                }
            }
            n = 0.0;
            for (double x : v) {
                n += x * x;
            }
        } while (n < 1e-12);
        for (auto &x : v) {
            x /= std::sqrt(n);
        }
        return v;
    };
    const auto u = unit(nullptr);
    std::vector<double> w(spec.dim, 0.0);
    if (spec.shift != 0.0) {
        w = unit(&u);
    }

    EmbeddingDataset ds;
    ds.dim = spec.dim;
    ds.num_classes = 2;
    ds.values.reserve(2 * spec.per_class * spec.dim);
    for (std::size_t i = 0; i < 2 * spec.per_class; ++i) {
        const int label = static_cast<int>(i % 2);
        const double side = (label == 1 ? 0.5 : -0.5) * spec.separation;
        for (std::size_t j = 0; j < spec.dim; ++j) {
            const double v = side * u[j] + spec.shift * w[j] + normal(rng);
            ds.values.push_back(static_cast<double>(static_cast<float>(v)));
        }
        ds.labels.push_back(label);
    }
    return ds;
}

inline EmbeddingDataset synthetic_clusters(std::size_t dim, std::size_t per_class,
                                           double separation, std::uint64_t seed) {
    return synthetic_clusters(ClusterSpec{dim, per_class, separation, seed});
}

} // namespace qhead

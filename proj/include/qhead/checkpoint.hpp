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
 * @file checkpoint.hpp
 * Flat binary parameter checkpoints.
 *
 * Layout (little-endian):
 *
 *     "QHD1"   u32 version (1)   u32 block count
 *     per block: u32 name length, name bytes, u64 value count
 *     u64 buffer count
 *     f64 parameters (sum of block counts), then f64 buffers
 */
#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "qhead/errors.hpp"
#include "qhead/model.hpp"

namespace qhead {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    std::vector<ParamBlock> layout;
    std::vector<double> parameters;
    std::vector<double> buffers;

    friend bool operator==(const Checkpoint &, const Checkpoint &) = default;
};

inline Checkpoint snapshot(const Classifier &model) {
    return {model.layout(),
            {model.parameters().begin(), model.parameters().end()},
            {model.buffers().begin(), model.buffers().end()}};
}

/// Copies a checkpoint into a model with the identical layout.
inline void restore(Classifier &model, const Checkpoint &ckpt) {
    if (ckpt.layout != model.layout() || ckpt.buffers.size() != model.buffers().size()) {
        throw ConfigError("checkpoint layout does not match the model");
    }
    std::copy(ckpt.parameters.begin(), ckpt.parameters.end(), model.parameters().begin());
    std::copy(ckpt.buffers.begin(), ckpt.buffers.end(), model.buffers().begin());
}

namespace detail {

template <typename T> void put_le(std::string &out, T v) {
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        out.push_back(static_cast<char>((v >> (8U * b)) & 0xFFU));
    }
}

class ByteReader {
  public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T> T get(const char *what) {
        need(sizeof(T), what);
        T v = 0;
        for (std::size_t b = sizeof(T); b-- > 0;) {
            v = static_cast<T>((v << 8U) | static_cast<unsigned char>(bytes_[pos_ + b]));
        }
        pos_ += sizeof(T);
        return v;
    }

    std::string_view take(std::size_t n, const char *what) {
        need(n, what);
        const auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    [[nodiscard]] std::size_t pos() const { return pos_; }
    [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

  private:
    void need(std::size_t n, const char *what) const {
        if (bytes_.size() - pos_ < n) {
            throw FormatError(std::string("truncated checkpoint while reading ") + what +
                                  ": need " + std::to_string(n) + " bytes, have " +
                                  std::to_string(bytes_.size() - pos_),
                              pos_);
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::string encode_checkpoint(const Checkpoint &ckpt) {
    std::size_t total = 0;
    for (const auto &b : ckpt.layout) {
        total += b.size;
    }
    if (total != ckpt.parameters.size()) {
        throw ConfigError("checkpoint layout covers " + std::to_string(total) + " values, have " +
                          std::to_string(ckpt.parameters.size()));
    }
    std::string out = "QHD1";
    detail::put_le<std::uint32_t>(out, kCheckpointVersion);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.layout.size()));
    for (const auto &b : ckpt.layout) {
        detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b.name.size()));
        out += b.name;
        detail::put_le<std::uint64_t>(out, b.size);
    }
    detail::put_le<std::uint64_t>(out, ckpt.buffers.size());
    for (double v : ckpt.parameters) {
        detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    }
    for (double v : ckpt.buffers) {
        detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    }
    return out;
}

inline Checkpoint decode_checkpoint(std::string_view bytes) {
    detail::ByteReader r(bytes);
    if (r.take(std::min<std::size_t>(4, bytes.size()), "magic") != "QHD1") {
        throw FormatError("bad magic, expected \"QHD1\"", 0);
    }
    const auto version = r.get<std::uint32_t>("version");
    if (version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version), 4);
    }
    Checkpoint ckpt;
    const auto blocks = r.get<std::uint32_t>("block count");
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < blocks; ++i) {
        const auto len = r.get<std::uint32_t>("block name length");
        ParamBlock b;
        b.name = std::string(r.take(len, "block name"));
        b.size = r.get<std::uint64_t>("block size");
        total += b.size;
        ckpt.layout.push_back(std::move(b));
    }
    const auto nbuf = r.get<std::uint64_t>("buffer count");
    const std::uint64_t values = total + nbuf;
    if (values > r.remaining() / 8 || r.remaining() != values * 8) {
        throw FormatError("checkpoint payload: expected " + std::to_string(values * 8) +
                              " bytes, have " + std::to_string(r.remaining()),
                          r.pos());
    }
    ckpt.parameters.resize(total);
    for (auto &v : ckpt.parameters) {
        v = std::bit_cast<double>(r.get<std::uint64_t>("parameter"));
    }
    ckpt.buffers.resize(nbuf);
    for (auto &v : ckpt.buffers) {
        v = std::bit_cast<double>(r.get<std::uint64_t>("buffer"));
    }
    return ckpt;
}

inline void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path) {
    const std::string bytes = encode_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write checkpoint '" + path.string() + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline Checkpoint load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open checkpoint '" + path.string() + "'");
    }
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return decode_checkpoint(bytes);
}

} // namespace qhead

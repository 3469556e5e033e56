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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace qhead {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

/// Derives a child seed from a root seed and a path of integers.
///
/// Every random stream in the library comes from the experiment's root seed
/// through this function: the seed for (epoch 3, batch 7, sample 2) of the
/// training pass is `derive_seed(root, {Stream::Train, 3, 7, 2})`. The result
/// depends only on the root and the path, never on evaluation order, so
/// parallel evaluation reproduces sequential results exactly.
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(root);
    for (std::uint64_t p : path) {
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Stream tags used as the first element of a derive_seed path.
namespace stream {
inline constexpr std::uint64_t Init = 1;
inline constexpr std::uint64_t Shuffle = 2;
inline constexpr std::uint64_t Train = 3;
inline constexpr std::uint64_t Validation = 4;
inline constexpr std::uint64_t Test = 5;
inline constexpr std::uint64_t Split = 6;
inline constexpr std::uint64_t Data = 7;
inline constexpr std::uint64_t Trajectory = 8;
inline constexpr std::uint64_t Shots = 9;
inline constexpr std::uint64_t Check = 10;
} // namespace stream

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Fisher-Yates driven by raw engine output. std::shuffle is avoided because
/// its draw sequence differs between standard libraries.
template <typename T> void shuffle_in_place(std::span<T> v, Rng &rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace qhead

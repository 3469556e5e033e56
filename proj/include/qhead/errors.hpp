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

#include <stdexcept>
#include <string>

namespace qhead {

/// Invalid sizes, indices, or settings supplied by the caller.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Input data that is well-formed but unusable (zero vectors, bad labels,
/// too few samples).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed file contents. Carries the byte offset where parsing stopped.
class FormatError : public std::runtime_error {
  public:
    FormatError(const std::string &what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " +
                             std::to_string(offset) + ")"),
          offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

/// A requested operation is not available in the current mode, e.g. the
/// adjoint gradient with a noise model attached.
class UnsupportedModeError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

} // namespace qhead

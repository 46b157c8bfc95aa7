// Copyright 2026 The eevqe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Error type shared by every module.
 */
#pragma once
#include <stdexcept>
#include <string>
#include <string_view>

namespace eevqe {

/// Broad classification of a failure, so callers and tests can branch on it.
enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    NotHermitian,
    NotUnitary,
    NotShifted,
    ConvergenceFailure,
    Unsupported,
    Io,
    Parse,
};

[[nodiscard]] inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument:
        return "invalid argument";
    case ErrorKind::DimensionMismatch:
        return "dimension mismatch";
    case ErrorKind::NotHermitian:
        return "not hermitian";
    case ErrorKind::NotUnitary:
        return "not unitary";
    case ErrorKind::NotShifted:
        return "hamiltonian not shifted";
    case ErrorKind::ConvergenceFailure:
        return "convergence failure";
    case ErrorKind::Unsupported:
        return "unsupported";
    case ErrorKind::Io:
        return "io error";
    case ErrorKind::Parse:
        return "parse error";
    }
    return "unknown";
}

/**
 * @brief Exception raised by the library. Carries an ErrorKind plus a message
 * with the offending values.
 */
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_{kind} {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Throw an Error of the given kind when `condition` is false.
inline void require(bool condition, ErrorKind kind, const std::string &message) {
    if (!condition) {
        throw Error(kind, message);
    }
}

} // namespace eevqe

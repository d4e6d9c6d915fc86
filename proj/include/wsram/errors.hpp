// Copyright 2026 The WS-RAM Authors.
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

#ifndef WSRAM_ERRORS_HPP
#define WSRAM_ERRORS_HPP

#include <stdexcept>
#include <string>

/**
 * \file
 * \brief Exception types shared by every module.
 *
 * The CLI maps these onto process exit codes (see tools/wsram_cli.cpp).
 */

namespace wsram {

/// Invalid configuration, dimension mismatch or malformed table.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Non-finite value where a finite one is required.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad magic, truncated payload, unknown version).
struct InputFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Enumeration budget exceeded.
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

/// Every importance weight underflowed to zero. Recoverable: callers resample.
struct DegenerateWeightsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training stopped because too many examples had degenerate weights.
struct TrainingAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Broken internal contract, e.g. a tape replayed against the wrong parameters.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace wsram

#endif  // WSRAM_ERRORS_HPP

// Copyright 2026 The zeno-dyn Authors
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

namespace zeno {

/// Invalid inputs or violated preconditions. Mapped to exit code 1 by the CLI.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdowns: non-convergence, structural assembly failures,
/// internal consistency violations. Mapped to exit code 2 by the CLI.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iterative limit did not reach the requested residual within the cap.
struct ConvergenceError : NumericalError {
    ConvergenceError(const std::string& msg, double residual, long n)
        : NumericalError(msg), best_residual(residual), best_n(n) {}
    double best_residual;
    long best_n;
};

/// Decomposition assembly failed its verification checks.
struct DecompositionError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace zeno

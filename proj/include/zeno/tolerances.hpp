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

#include <Eigen/Core>

namespace zeno {

/// Numerical thresholds shared across the library. Absolute values, sized
/// for dense double-precision work at dimensions up to ~1024.
struct Tolerances {
    double herm = 1e-10;      ///< Hermiticity defect, max-abs of A - A†.
    double eig = 1e-10;       ///< Eigendecomposition residuals and unitarity.
    double psd = 1e-9;        ///< Allowed negative slack on minimum eigenvalues.
    double trace = 1e-9;      ///< Trace normalization of states.
    double complete = 1e-9;   ///< Kraus completeness, max-abs of ΣM†M - I.
    double fix = 1e-9;        ///< |λ-1| window counted as a fixed direction.
    double kernel = 1e-8;     ///< Eigenvalue threshold splitting ker Λ from its support.
    double structure = 1e-8;  ///< Decomposition residuals, intertwiner test, cluster gap.
    double prob = 1e-12;      ///< Outcome-probability floor for sampling.

    long iter_n_max = 1'000'000;  ///< Cesàro doubling cap for the iterative limit.
    long compose_cap = 4096;      ///< Maximum Kraus count materialized by compose().
    int decompose_retries = 8;    ///< Fresh commutant draws before giving up.
    Eigen::Index spectral_dim_cap = 64;  ///< Largest dim whose superoperator is materialized.
};

}  // namespace zeno

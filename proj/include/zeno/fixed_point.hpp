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

#include <string>
#include <utility>

#include "zeno/channel.hpp"
#include "zeno/operator_core.hpp"

namespace zeno {

enum class FixedPointMethod { spectral, iterative };

struct CesaroResult {
    ComplexOperator value;
    long iterations = 0;  ///< Cesàro length used; 0 for the spectral route.
    double residual = 0.0;  ///< ‖P(value) - value‖₁
};

namespace detail {

inline Eigen::VectorXcd vec(const ComplexOperator& a) {
    return Eigen::Map<const Eigen::VectorXcd>(a.data(), a.size());
}

inline ComplexOperator unvec(const Eigen::VectorXcd& v, Index d) {
    return Eigen::Map<const ComplexOperator>(v.data(), d, d);
}

}  // namespace detail

/// The d²×d² matrix of P acting on column-stacked operators:
/// vec(Σ M A M†) = [Σ conj(M) ⊗ M] vec(A).
inline ComplexOperator channel_superoperator(const KrausChannel& channel) {
    const Index d = channel.dim();
    ComplexOperator s = ComplexOperator::Zero(d * d, d * d);
    for (const auto& m : channel.kraus())
        s.noalias() += tensor(m.conjugate(), m);
    return s;
}

/// Exact finite average S_N(A) = (1/N) Σ_{m=1..N} P^m(A).
inline ComplexOperator cesaro_average(const KrausChannel& channel, const ComplexOperator& a,
                                      long n) {
    if (n <= 0) throw ValidationError("cesaro_average: N must be positive");
    ComplexOperator power = a;
    ComplexOperator sum = ComplexOperator::Zero(a.rows(), a.cols());
    for (long m = 0; m < n; ++m) {
        power = channel.apply(power);
        sum += power;
    }
    return sum / static_cast<double>(n);
}

/// The Cesàro limit S_∞ as a spectral projector: the oblique projection onto
/// the eigenvalue-1 eigenspace of the superoperator along the span of the
/// remaining (peripheral and decaying) spectrum. Directions with
/// |λ - 1| ≤ tol_fix count as fixed; all other unit-modulus eigenvalues
/// average away, which is exactly what the Cesàro sum does.
class CesaroProjector {
  public:
    explicit CesaroProjector(const KrausChannel& channel, const Tolerances& tols = {})
        : dim_(channel.dim()) {
        if (dim_ > tols.spectral_dim_cap)
            throw ValidationError("CesaroProjector: dim " + std::to_string(dim_) +
                                  " exceeds the superoperator cap " +
                                  std::to_string(tols.spectral_dim_cap));
        const ComplexOperator s = channel_superoperator(channel);
        const Index n = s.rows();
        const ComplexOperator shifted = s - ComplexOperator::Identity(n, n);
        // Kernels of (S - 1) and its adjoint via the Hermitian normal
        // matrices: the self-adjoint eigensolver stays reliable where a
        // bidiagonalizing SVD can stumble over clusters of zero singular
        // values. Squaring costs accuracy only near the threshold, and
        // genuine fixed directions sit at machine-level zeros.
        const ComplexOperator normal_right = shifted.adjoint() * shifted;
        const ComplexOperator normal_left = shifted * shifted.adjoint();
        const double scale = std::max(1.0, max_abs(normal_right));
        const double threshold = std::max(tols.fix * tols.fix, 1e-12 * scale);
        Eigen::SelfAdjointEigenSolver<ComplexOperator> right_solver(normal_right);
        Eigen::SelfAdjointEigenSolver<ComplexOperator> left_solver(normal_left);
        if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success)
            throw NumericalError("CesaroProjector: eigensolver failed");
        Index k = 0;
        while (k < n && right_solver.eigenvalues()(k) <= threshold) ++k;
        Index k_left = 0;
        while (k_left < n && left_solver.eigenvalues()(k_left) <= threshold) ++k_left;
        if (k == 0)
            throw NumericalError(
                "CesaroProjector: no fixed point found; the map is not trace preserving");
        if (k != k_left)
            throw NumericalError("CesaroProjector: left/right fixed spaces disagree (" +
                                 std::to_string(k) + " vs " + std::to_string(k_left) + ")");
        right_ = right_solver.eigenvectors().leftCols(k);
        left_ = left_solver.eigenvectors().leftCols(k);
        pairing_.compute(left_.adjoint() * right_);
        const double rcond = pairing_.rcond();
        if (!(rcond > 1e-12))
            throw NumericalError("CesaroProjector: degenerate left/right pairing (rcond " +
                                 std::to_string(rcond) + ")");
        k_ = k;
    }

    Index fixed_space_dim() const { return k_; }

    /// S_∞(A).
    ComplexOperator project(const ComplexOperator& a) const {
        if (a.rows() != dim_ || a.cols() != dim_)
            throw ValidationError("CesaroProjector::project: dim mismatch");
        const Eigen::VectorXcd coeffs = pairing_.solve(left_.adjoint() * detail::vec(a));
        return detail::unvec(right_ * coeffs, dim_);
    }

  private:
    Index dim_ = 0;
    Index k_ = 0;
    ComplexOperator right_, left_;
    Eigen::FullPivLU<ComplexOperator> pairing_;
};

/// S_∞(A), either by the spectral projector (default, forced to the
/// iterative path above the superoperator cap) or by doubling Cesàro
/// averages until ‖P(S_N A) - S_N A‖₁ ≤ tol.
inline CesaroResult fixed_point_limit(const KrausChannel& channel, const ComplexOperator& a,
                                      FixedPointMethod method, double tol,
                                      const Tolerances& tols = {}) {
    require_square_finite(a, "fixed_point_limit");
    if (a.rows() != channel.dim())
        throw ValidationError("fixed_point_limit: dim mismatch");

    if (method == FixedPointMethod::spectral && channel.dim() <= tols.spectral_dim_cap) {
        const CesaroProjector projector(channel, tols);
        ComplexOperator value = projector.project(a);
        const double residual = trace_norm(channel.apply(value) - value);
        if (residual > tol)
            throw NumericalError("fixed_point_limit: spectral residual " +
                                 std::to_string(residual) + " exceeds tol " + std::to_string(tol));
        return CesaroResult{std::move(value), 0, residual};
    }

    // Iterative route: extend the running power sum so each doubling costs
    // only the new applications.
    ComplexOperator power = a;
    ComplexOperator sum = ComplexOperator::Zero(a.rows(), a.cols());
    long processed = 0;
    double best_residual = std::numeric_limits<double>::infinity();
    long best_n = 0;
    ComplexOperator best_value;
    for (long target = 16;; target *= 2) {
        if (target > tols.iter_n_max) target = tols.iter_n_max;
        while (processed < target) {
            power = channel.apply(power);
            sum += power;
            ++processed;
        }
        ComplexOperator value = sum / static_cast<double>(processed);
        const double residual = trace_norm(channel.apply(value) - value);
        if (residual < best_residual) {
            best_residual = residual;
            best_n = processed;
            best_value = value;
        }
        if (residual <= tol)
            return CesaroResult{std::move(value), processed, residual};
        if (processed >= tols.iter_n_max)
            throw ConvergenceError("fixed_point_limit: no convergence to tol " +
                                       std::to_string(tol) + " within N_max " +
                                       std::to_string(tols.iter_n_max) + "; best residual " +
                                       std::to_string(best_residual) + " at N = " +
                                       std::to_string(best_n),
                                   best_residual, best_n);
    }
}

/// Λ = S_∞(1): Hermitian, positive semidefinite, trace = dim. Its kernel
/// spans the complement subspace.
inline ComplexOperator lambda_operator(const KrausChannel& channel, const Tolerances& tols = {}) {
    const Index d = channel.dim();
    const FixedPointMethod method = d <= tols.spectral_dim_cap ? FixedPointMethod::spectral
                                                               : FixedPointMethod::iterative;
    CesaroResult result =
        fixed_point_limit(channel, ComplexOperator::Identity(d, d), method, tols.fix * 10, tols);
    // The limit of Hermitian iterates is Hermitian; strip roundoff asymmetry.
    return 0.5 * (result.value + result.value.adjoint().eval());
}

struct MioCheck {
    bool is_mio = false;
    double residual = 0.0;  ///< ‖P(A) - A‖₁
};

/// Fixed-point test: true iff ‖P(A) - A‖₁ ≤ tol.
inline MioCheck is_mio(const KrausChannel& channel, const ComplexOperator& a, double tol) {
    require_square_finite(a, "is_mio");
    if (a.rows() != channel.dim()) throw ValidationError("is_mio: dim mismatch");
    const double residual = trace_norm(channel.apply(a) - a);
    return MioCheck{residual <= tol, residual};
}

}  // namespace zeno

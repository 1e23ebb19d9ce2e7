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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include "zeno/errors.hpp"
#include "zeno/tolerances.hpp"

namespace zeno {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Dense square complex matrix: the universal carrier for states,
/// Hamiltonians and Kraus operators. Serialized row-major; composite
/// tensor indices follow the (i_A i_B) convention of tensor().
using ComplexOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Dimensions of the two tensor factors of one invariant block. The S factor
/// is indexed first: composite index (s, r) maps to s * d_r + r.
struct SubsystemShape {
    Index d_s = 1;
    Index d_r = 1;
    Index dim() const { return d_s * d_r; }
};

inline bool all_finite(const ComplexOperator& a) {
    return a.allFinite();
}

inline void require_square_finite(const ComplexOperator& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw ValidationError(std::string(what) + ": expected a non-empty square matrix, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    if (!all_finite(a))
        throw ValidationError(std::string(what) + ": non-finite entries");
}

inline double max_abs(const ComplexOperator& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Max-abs of A - A†.
inline double hermiticity_defect(const ComplexOperator& a) {
    return max_abs(a - a.adjoint().eval());
}

inline void require_hermitian(const ComplexOperator& a, double tol, const char* what) {
    require_square_finite(a, what);
    const double defect = hermiticity_defect(a);
    if (defect > tol)
        throw ValidationError(std::string(what) + ": not Hermitian (defect " +
                              std::to_string(defect) + " > " + std::to_string(tol) + ")");
}

/// Tr(A B) without forming the product.
inline Complex trace_of_product(const ComplexOperator& a, const ComplexOperator& b) {
    return (a.transpose().cwiseProduct(b)).sum();
}

/// Sum of singular values. For Hermitian inputs this equals the sum of
/// absolute eigenvalues.
inline double trace_norm(const ComplexOperator& a) {
    require_square_finite(a, "trace_norm");
    Eigen::JacobiSVD<ComplexOperator> svd(a);
    return svd.singularValues().sum();
}

/// Kronecker product with the fixed composite-index convention
/// (i_A i_B, j_A j_B) -> (i_A * dim(B) + i_B, j_A * dim(B) + j_B).
inline ComplexOperator tensor(const ComplexOperator& a, const ComplexOperator& b) {
    constexpr Index kMaxDim = Index(1) << 20;
    if (a.rows() == 0 || b.rows() == 0)
        throw ValidationError("tensor: empty factor");
    if (a.rows() > kMaxDim / b.rows() || a.cols() > kMaxDim / b.cols())
        throw ValidationError("tensor: composite dimension overflow");
    return Eigen::kroneckerProduct(a, b);
}

/// Trace over the R (second) factor: returns the d_S x d_S operator
/// out(s,s') = Σ_r A(s*d_R + r, s'*d_R + r).
inline ComplexOperator partial_trace_r(const ComplexOperator& a, const SubsystemShape& shape) {
    require_square_finite(a, "partial_trace_r");
    if (a.rows() != shape.dim())
        throw ValidationError("partial_trace_r: dim " + std::to_string(a.rows()) +
                              " != d_S*d_R = " + std::to_string(shape.dim()));
    ComplexOperator out = ComplexOperator::Zero(shape.d_s, shape.d_s);
    for (Index s = 0; s < shape.d_s; ++s)
        for (Index t = 0; t < shape.d_s; ++t)
            for (Index r = 0; r < shape.d_r; ++r)
                out(s, t) += a(s * shape.d_r + r, t * shape.d_r + r);
    return out;
}

/// Trace over the S (first) factor.
inline ComplexOperator partial_trace_s(const ComplexOperator& a, const SubsystemShape& shape) {
    require_square_finite(a, "partial_trace_s");
    if (a.rows() != shape.dim())
        throw ValidationError("partial_trace_s: dim " + std::to_string(a.rows()) +
                              " != d_S*d_R = " + std::to_string(shape.dim()));
    ComplexOperator out = ComplexOperator::Zero(shape.d_r, shape.d_r);
    for (Index r = 0; r < shape.d_r; ++r)
        for (Index t = 0; t < shape.d_r; ++t)
            for (Index s = 0; s < shape.d_s; ++s)
                out(r, t) += a(s * shape.d_r + r, s * shape.d_r + t);
    return out;
}

/// Rotate each column so its first non-negligible component is real
/// positive. Keeps eigenbases reproducible across runs.
inline void fix_column_phases(ComplexOperator& v) {
    constexpr double kEps = 1e-8;
    for (Index c = 0; c < v.cols(); ++c) {
        for (Index r = 0; r < v.rows(); ++r) {
            const double m = std::abs(v(r, c));
            if (m > kEps) {
                v.col(c) *= std::conj(v(r, c)) / m;
                break;
            }
        }
    }
}

struct HermitianEig {
    Eigen::VectorXd values;    ///< ascending
    ComplexOperator vectors;   ///< orthonormal columns, phase-fixed
};

/// Eigendecomposition of a Hermitian operator. Eigenvalues ascending; the
/// eigenvector phase convention makes repeated runs bit-identical.
inline HermitianEig hermitian_eig(const ComplexOperator& a, double tol_herm = Tolerances{}.herm) {
    require_hermitian(a, tol_herm, "hermitian_eig");
    const ComplexOperator sym = 0.5 * (a + a.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<ComplexOperator> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eig: eigensolver failed");
    HermitianEig out{solver.eigenvalues(), solver.eigenvectors()};
    fix_column_phases(out.vectors);
    return out;
}

/// e^{-i H t} for Hermitian H, via eigendecomposition. Unitary up to
/// eigensolver error.
inline ComplexOperator unitary_step(const ComplexOperator& h, double t,
                                    double tol_herm = Tolerances{}.herm) {
    const HermitianEig eig = hermitian_eig(h, tol_herm);
    const Index d = h.rows();
    Eigen::VectorXcd phases(d);
    for (Index i = 0; i < d; ++i)
        phases(i) = std::exp(Complex(0.0, -eig.values(i) * t));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// The generator action L A = -i [H, A]. Traceless for all inputs; maps
/// Hermitian A to Hermitian output.
inline ComplexOperator liouvillian_apply(const ComplexOperator& h, const ComplexOperator& a) {
    require_square_finite(h, "liouvillian_apply(H)");
    require_square_finite(a, "liouvillian_apply(A)");
    if (h.rows() != a.rows())
        throw ValidationError("liouvillian_apply: dim mismatch " + std::to_string(h.rows()) +
                              " vs " + std::to_string(a.rows()));
    return Complex(0.0, -1.0) * (h * a - a * h);
}

/// A state: Hermitian, positive semidefinite, unit trace (all within
/// tolerance). The unnormalized variant is reserved for selective-trajectory
/// intermediates, where the trace carries the running outcome probability.
class DensityOperator {
  public:
    /// Trivial one-dimensional state; placeholder for default-initialized
    /// result slots.
    DensityOperator() : op_(ComplexOperator::Identity(1, 1)) {}

    explicit DensityOperator(ComplexOperator op, const Tolerances& tols = {})
        : op_(std::move(op)) {
        require_hermitian(op_, tols.herm, "DensityOperator");
        Eigen::SelfAdjointEigenSolver<ComplexOperator> solver(
            ComplexOperator(0.5 * (op_ + op_.adjoint().eval())), Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        if (min_eig < -tols.psd)
            throw ValidationError("DensityOperator: not positive semidefinite (min eigenvalue " +
                                  std::to_string(min_eig) + ")");
        const double tr = op_.trace().real();
        if (std::abs(tr - 1.0) > tols.trace)
            throw ValidationError("DensityOperator: trace " + std::to_string(tr) + " != 1");
    }

    static DensityOperator unnormalized(ComplexOperator op,
                                        double tol_herm = Tolerances{}.herm) {
        require_hermitian(op, tol_herm, "DensityOperator::unnormalized");
        return DensityOperator(Unchecked{}, std::move(op));
    }

    const ComplexOperator& matrix() const { return op_; }
    Index dim() const { return op_.rows(); }
    double trace() const { return op_.trace().real(); }

  private:
    struct Unchecked {};
    DensityOperator(Unchecked, ComplexOperator op) : op_(std::move(op)) {}
    ComplexOperator op_;
};

}  // namespace zeno

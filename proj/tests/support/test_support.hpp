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

// Shared generators and independent oracles for the test and acceptance
// suites. Oracles deliberately avoid the code paths they check.

#pragma once

#include <zeno/zeno.hpp>

#include <cmath>
#include <numeric>
#include <vector>

namespace zeno::testing {

inline double gaussian(RngState& rng) {
    const double u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
}

inline ComplexOperator random_complex_matrix(RngState& rng, Index rows, Index cols) {
    ComplexOperator out(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            out(r, c) = Complex(gaussian(rng), gaussian(rng));
    return out;
}

inline ComplexOperator random_hermitian(RngState& rng, Index d) {
    const ComplexOperator a = random_complex_matrix(rng, d, d);
    return 0.5 * (a + a.adjoint().eval());
}

inline ComplexOperator random_unitary(RngState& rng, Index d) {
    const ComplexOperator a = random_complex_matrix(rng, d, d);
    Eigen::HouseholderQR<ComplexOperator> qr(a);
    ComplexOperator q = qr.householderQ() * ComplexOperator::Identity(d, d);
    const ComplexOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < d; ++i) {
        const Complex diag = r(i, i);
        if (std::abs(diag) > 0) q.col(i) *= diag / std::abs(diag);
    }
    return q;
}

inline DensityOperator random_density(RngState& rng, Index d) {
    const ComplexOperator a = random_complex_matrix(rng, d, d);
    ComplexOperator rho = a * a.adjoint();
    rho /= rho.trace().real();
    return DensityOperator(0.5 * (rho + rho.adjoint().eval()));
}

inline StateVector random_state(RngState& rng, Index d) {
    StateVector psi(d);
    for (Index i = 0; i < d; ++i) psi(i) = Complex(gaussian(rng), gaussian(rng));
    return psi.normalized();
}

/// Generic channel via a Stinespring draw: QR of a (k·d)×d Gaussian block
/// column gives Kraus operators complete to machine precision.
inline KrausChannel random_kraus_channel(RngState& rng, Index d, Index kraus_count) {
    const ComplexOperator g = random_complex_matrix(rng, kraus_count * d, d);
    Eigen::HouseholderQR<ComplexOperator> qr(g);
    const ComplexOperator q = qr.householderQ() * ComplexOperator::Identity(kraus_count * d, d);
    std::vector<ComplexOperator> kraus;
    kraus.reserve(kraus_count);
    for (Index k = 0; k < kraus_count; ++k)
        kraus.push_back(q.middleRows(k * d, d));
    return KrausChannel(std::move(kraus));
}

// ---------------------------------------------------------------------------
// Worked channels from the paper.

/// Example 1 decay channel on (|g1>, |g2>, |e>): M1 = π_g,
/// M2 = |g1><e|/√2, M3 = |g2><e|/√2.
inline KrausChannel decay_channel() {
    ComplexOperator m1 = ComplexOperator::Zero(3, 3);
    ComplexOperator m2 = ComplexOperator::Zero(3, 3);
    ComplexOperator m3 = ComplexOperator::Zero(3, 3);
    m1(0, 0) = 1.0;
    m1(1, 1) = 1.0;
    m2(0, 2) = 1.0 / std::sqrt(2.0);
    m3(1, 2) = 1.0 / std::sqrt(2.0);
    return KrausChannel({m1, m2, m3}, {"M1", "M2", "M3"});
}

inline ComplexOperator pauli_x() {
    ComplexOperator x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

inline ComplexOperator pauli_y() {
    ComplexOperator y(2, 2);
    y << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return y;
}

inline ComplexOperator pauli_z() {
    ComplexOperator z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

/// Example 3 symmetrizing operation for the one-qubit Pauli group:
/// P A = (A + XAX + YAY + ZAZ)/4, the full depolarizing twirl.
inline KrausChannel pauli_twirl() {
    std::vector<ComplexOperator> kraus = {0.5 * ComplexOperator::Identity(2, 2), 0.5 * pauli_x(),
                                          0.5 * pauli_y(), 0.5 * pauli_z()};
    return KrausChannel(std::move(kraus), {"I", "X", "Y", "Z"});
}

/// Example 2: a projective measurement with the given ranks, conjugated by a
/// random unitary. Returns the channel and the projectors.
inline std::pair<KrausChannel, std::vector<ComplexOperator>> random_projective_channel(
    RngState& rng, const std::vector<Index>& ranks) {
    const Index d = std::accumulate(ranks.begin(), ranks.end(), Index{0});
    const ComplexOperator u = random_unitary(rng, d);
    std::vector<ComplexOperator> projectors;
    Index offset = 0;
    for (Index rank : ranks) {
        const ComplexOperator basis = u.middleCols(offset, rank);
        projectors.push_back(basis * basis.adjoint());
        offset += rank;
    }
    KrausChannel channel(projectors);
    return {std::move(channel), std::move(projectors)};
}

// ---------------------------------------------------------------------------
// Structured channels with known invariant-subspace shape.

struct BlockSpec {
    Index d_s = 1;
    Index d_r = 1;
};

struct StructuredChannel {
    KrausChannel channel;
    Index complement_dim = 0;
    std::vector<BlockSpec> blocks;  ///< ground truth, sorted by (d_s, d_r)
};

/// Build a channel with prescribed structure: for each block j, `kraus_count`
/// generic Kraus operators acting as 1_S ⊗ M_q^(j); the complement leaks into
/// the whole space through its own Stinespring column. Everything is hidden
/// behind a random unitary change of basis.
inline StructuredChannel structured_channel(RngState& rng, const std::vector<BlockSpec>& blocks,
                                            Index complement_dim, Index kraus_count = 2) {
    Index d = complement_dim;
    for (const auto& b : blocks) d += b.d_s * b.d_r;
    const Index block_offset_c = d - complement_dim;  // complement occupies the tail

    std::vector<ComplexOperator> kraus;
    // Block operators: ⊕_j (1_S ⊗ M_q^(j)), zero on the complement.
    std::vector<std::vector<ComplexOperator>> block_ops;
    for (const auto& b : blocks) {
        const KrausChannel inner = random_kraus_channel(rng, b.d_r, kraus_count);
        block_ops.push_back(inner.kraus());
    }
    for (Index q = 0; q < kraus_count; ++q) {
        ComplexOperator m = ComplexOperator::Zero(d, d);
        Index offset = 0;
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            const Index bd = blocks[j].d_s * blocks[j].d_r;
            m.block(offset, offset, bd, bd) =
                tensor(ComplexOperator::Identity(blocks[j].d_s, blocks[j].d_s),
                       block_ops[j][static_cast<std::size_t>(q)]);
            offset += bd;
        }
        kraus.push_back(std::move(m));
    }
    // Complement leak: a Stinespring column from H_C into the full space,
    // split over two extra Kraus operators.
    if (complement_dim > 0) {
        const Index leak_count = 2;
        const ComplexOperator g = random_complex_matrix(rng, leak_count * d, complement_dim);
        Eigen::HouseholderQR<ComplexOperator> qr(g);
        const ComplexOperator q =
            qr.householderQ() * ComplexOperator::Identity(leak_count * d, complement_dim);
        for (Index l = 0; l < leak_count; ++l) {
            ComplexOperator m = ComplexOperator::Zero(d, d);
            m.middleCols(block_offset_c, complement_dim) = q.middleRows(l * d, d);
            kraus.push_back(std::move(m));
        }
    }
    const ComplexOperator u = random_unitary(rng, d);
    for (auto& m : kraus) m = u * m * u.adjoint();

    StructuredChannel out{KrausChannel(std::move(kraus)), complement_dim, blocks};
    std::sort(out.blocks.begin(), out.blocks.end(), [](const BlockSpec& a, const BlockSpec& b) {
        return a.d_s != b.d_s ? a.d_s < b.d_s : a.d_r < b.d_r;
    });
    return out;
}

inline std::vector<BlockSpec> sorted_shapes(const Decomposition& dec) {
    std::vector<BlockSpec> shapes;
    for (const auto& b : dec.blocks) shapes.push_back({b.shape.d_s, b.shape.d_r});
    std::sort(shapes.begin(), shapes.end(), [](const BlockSpec& a, const BlockSpec& b) {
        return a.d_s != b.d_s ? a.d_s < b.d_s : a.d_r < b.d_r;
    });
    return shapes;
}

// ---------------------------------------------------------------------------
// Independent oracles.

/// Elementwise Kronecker definition.
inline ComplexOperator kron_oracle(const ComplexOperator& a, const ComplexOperator& b) {
    ComplexOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            for (Index k = 0; k < b.rows(); ++k)
                for (Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

/// Direct index contraction for the R-trace.
inline ComplexOperator ptrace_r_oracle(const ComplexOperator& a, Index d_s, Index d_r) {
    ComplexOperator out = ComplexOperator::Zero(d_s, d_s);
    for (Index s = 0; s < d_s; ++s)
        for (Index t = 0; t < d_s; ++t)
            for (Index r = 0; r < d_r; ++r)
                out(s, t) += a(s * d_r + r, t * d_r + r);
    return out;
}

/// Sum of |eigenvalues| for Hermitian input: an eigensolver route,
/// independent of the SVD used by trace_norm.
inline double hermitian_trace_norm_oracle(const ComplexOperator& a) {
    Eigen::SelfAdjointEigenSolver<ComplexOperator> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

/// Brute-force Cesàro sum by direct repeated application.
inline ComplexOperator cesaro_oracle(const KrausChannel& channel, const ComplexOperator& a,
                                     long n) {
    ComplexOperator power = a;
    ComplexOperator sum = ComplexOperator::Zero(a.rows(), a.cols());
    for (long m = 0; m < n; ++m) {
        ComplexOperator next = ComplexOperator::Zero(a.rows(), a.cols());
        for (const auto& k : channel.kraus()) next += k * power * k.adjoint();
        power = next;
        sum += power;
    }
    return sum / static_cast<double>(n);
}

/// Exhaustive selective path sum: Σ over all outcome strings of the
/// unnormalized conditioned states. Equals the non-selective evolution.
inline ComplexOperator path_sum_oracle(const ComplexOperator& u, const KrausChannel& channel,
                                       const ComplexOperator& rho0, long steps) {
    std::vector<ComplexOperator> states = {rho0};
    for (long step = 0; step < steps; ++step) {
        std::vector<ComplexOperator> next;
        next.reserve(states.size() * channel.size());
        for (const auto& rho : states) {
            const ComplexOperator kicked = u * rho * u.adjoint();
            for (const auto& m : channel.kraus())
                next.push_back(m * kicked * m.adjoint());
        }
        states = std::move(next);
    }
    ComplexOperator total = ComplexOperator::Zero(rho0.rows(), rho0.cols());
    for (const auto& rho : states) total += rho;
    return total;
}

/// A MIO state confined to one block: V_j (ρ_S ⊗ Λ_R) V_j†.
inline DensityOperator block_product_state(const Decomposition& dec, std::size_t block,
                                           const ComplexOperator& rho_s) {
    std::vector<ComplexOperator> components;
    for (std::size_t j = 0; j < dec.blocks.size(); ++j) {
        const Index ds = dec.blocks[j].shape.d_s;
        components.push_back(j == block ? rho_s : ComplexOperator::Zero(ds, ds));
    }
    return DensityOperator(mio_assemble(dec, components));
}

inline DensityOperator random_mio_state(RngState& rng, const Decomposition& dec) {
    std::vector<ComplexOperator> components;
    double total = 0.0;
    for (const auto& b : dec.blocks) {
        const ComplexOperator g = random_complex_matrix(rng, b.shape.d_s, b.shape.d_s);
        ComplexOperator comp = g * g.adjoint();
        total += comp.trace().real();
        components.push_back(std::move(comp));
    }
    for (auto& c : components) c /= total;
    return DensityOperator(mio_assemble(dec, components));
}

}  // namespace zeno::testing

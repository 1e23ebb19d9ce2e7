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

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zeno/fixed_point.hpp"

namespace zeno {

/// One isomorphism class of measurement-invariant subspaces, embedded as
/// H_S ⊗ H_R. The isometry carries the block basis; the channel acts inside
/// as 1_S ⊗ M_q with the block Kraus operators kraus_r, whose unique fixed
/// point is lambda_r.
struct Block {
    SubsystemShape shape;
    ComplexOperator isometry;               ///< dim × (d_S·d_R), V†V = I
    std::vector<ComplexOperator> kraus_r;   ///< d_R × d_R, one per Kraus operator
    ComplexOperator lambda_r;               ///< d_R × d_R, PSD, trace 1, invertible
};

/// The orthogonal split H = [⊕_j (H_S ⊗ H_R)] ⊕ H_C. Blocks group maximal
/// sets of isomorphic invariant subspaces; the complement is invariant under
/// the adjoint Kraus operators only.
struct Decomposition {
    Index dim = 0;
    ComplexOperator complement_basis;  ///< dim × c, orthonormal columns (c may be 0)
    std::vector<Block> blocks;

    Index complement_dim() const { return complement_basis.cols(); }
    Index block_dim_sum() const {
        Index total = 0;
        for (const auto& b : blocks) total += b.shape.dim();
        return total;
    }
};

/// Orthonormal basis of ker Λ: the states that leak away under repeated
/// measurement and support no fixed point.
inline ComplexOperator complement_subspace(const KrausChannel& channel,
                                           const Tolerances& tols = {}) {
    const ComplexOperator lambda = lambda_operator(channel, tols);
    const HermitianEig eig = hermitian_eig(lambda, tols.herm * 100);
    Index k = 0;
    while (k < eig.values.size() && eig.values(k) <= tols.kernel) ++k;
    return eig.vectors.leftCols(k);
}

namespace detail {

/// Right singular vectors of m with singular value ≤ tol.
inline ComplexOperator kernel_basis(const ComplexOperator& m, double tol) {
    Eigen::JacobiSVD<ComplexOperator> svd(m, Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const Index n = sigma.size();
    Index k = 0;
    for (Index i = n - 1; i >= 0 && sigma(i) <= tol; --i) ++k;
    return svd.matrixV().rightCols(k);
}

/// Basis of {X : [X, G] = 0 for every generator}, solved as one stacked
/// linear system over vec(X).
inline std::vector<ComplexOperator> commutant_basis(const std::vector<ComplexOperator>& gens,
                                                    double tol) {
    const Index m = gens.front().rows();
    const ComplexOperator id = ComplexOperator::Identity(m, m);
    ComplexOperator stacked(static_cast<Index>(gens.size()) * m * m, m * m);
    for (std::size_t i = 0; i < gens.size(); ++i)
        stacked.middleRows(static_cast<Index>(i) * m * m, m * m) =
            tensor(gens[i].transpose(), id) - tensor(id, gens[i]);
    const ComplexOperator kernel = kernel_basis(stacked, tol);
    std::vector<ComplexOperator> basis;
    basis.reserve(kernel.cols());
    for (Index c = 0; c < kernel.cols(); ++c)
        basis.push_back(unvec(kernel.col(c), m));
    return basis;
}

inline double gaussian(RngState& rng) {
    // Box-Muller on the library's deterministic uniforms.
    const double u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
}

/// Candidate invariant subspace produced by one eigenvalue cluster.
struct Candidate {
    ComplexOperator basis;              ///< m × d (support coordinates)
    std::vector<ComplexOperator> ops;   ///< d × d restrictions of the projected Kraus
};

/// Solve T with B_q T = T A_q for all q. For isomorphic irreducible
/// subspaces the solution space is one-dimensional and T is proportional to
/// a unitary; anything else means "not isomorphic".
inline std::optional<ComplexOperator> solve_intertwiner(const std::vector<ComplexOperator>& a_ops,
                                                        const std::vector<ComplexOperator>& b_ops,
                                                        double tol) {
    const Index d = a_ops.front().rows();
    const ComplexOperator id = ComplexOperator::Identity(d, d);
    ComplexOperator stacked(static_cast<Index>(a_ops.size()) * d * d, d * d);
    for (std::size_t q = 0; q < a_ops.size(); ++q)
        stacked.middleRows(static_cast<Index>(q) * d * d, d * d) =
            tensor(id, b_ops[q]) - tensor(a_ops[q].transpose(), id);
    const ComplexOperator kernel = kernel_basis(stacked, tol);
    if (kernel.cols() != 1) return std::nullopt;
    ComplexOperator t = unvec(kernel.col(0), d);
    const double mu = (t.adjoint() * t).trace().real() / static_cast<double>(d);
    if (mu <= 0.0) return std::nullopt;
    if (max_abs(t.adjoint() * t / mu - id) > tol) return std::nullopt;
    ComplexOperator w = t / std::sqrt(mu);
    // Only a global phase is free; a per-column convention would break the
    // intertwining. Pin it via the first non-negligible entry.
    for (Index i = 0; i < w.size(); ++i) {
        const Complex entry = *(w.data() + i);
        if (std::abs(entry) > 1e-8) {
            w *= std::conj(entry) / std::abs(entry);
            break;
        }
    }
    return w;
}

}  // namespace detail

struct CheckResult {
    std::string name;
    double residual = 0.0;
    bool pass = false;
};

struct DecompositionReport {
    std::vector<CheckResult> checks;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const CheckResult& c) { return c.pass; });
    }
    double max_residual() const {
        double r = 0.0;
        for (const auto& c : checks) r = std::max(r, c.residual);
        return r;
    }
    std::string summary() const {
        std::ostringstream out;
        for (const auto& c : checks)
            out << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  residual " << c.residual
                << "\n";
        return out.str();
    }
};

/// Re-derive every structural invariant of a decomposition against its
/// channel and report per-check residuals. Diagnostic: never throws on a
/// failed check.
inline DecompositionReport verify_decomposition(const KrausChannel& channel,
                                                const Decomposition& dec, double tol,
                                                const Tolerances& tols = {}) {
    DecompositionReport report;
    auto add = [&report](std::string name, double residual, bool pass) {
        report.checks.push_back({std::move(name), residual, pass});
    };
    const Index d = channel.dim();

    add("dimension_sum",
        static_cast<double>(std::abs(dec.complement_dim() + dec.block_dim_sum() - d)),
        dec.complement_dim() + dec.block_dim_sum() == d);

    // Joint orthonormality and completeness of complement plus block ranges.
    {
        ComplexOperator q(d, dec.complement_dim() + dec.block_dim_sum());
        Index col = 0;
        if (dec.complement_dim() > 0) {
            q.middleCols(col, dec.complement_dim()) = dec.complement_basis;
            col += dec.complement_dim();
        }
        for (const auto& b : dec.blocks) {
            q.middleCols(col, b.shape.dim()) = b.isometry;
            col += b.shape.dim();
        }
        const double r = max_abs(q.adjoint() * q - ComplexOperator::Identity(col, col));
        add("subspaces_orthonormal_complete", r, col == d && r <= tol);
    }

    for (std::size_t j = 0; j < dec.blocks.size(); ++j) {
        const Block& b = dec.blocks[j];
        const std::string tag = "[" + std::to_string(j) + "]";
        const Index ds = b.shape.d_s, dr = b.shape.d_r;

        add("isometry_orthonormal" + tag,
            max_abs(b.isometry.adjoint() * b.isometry -
                    ComplexOperator::Identity(ds * dr, ds * dr)),
            max_abs(b.isometry.adjoint() * b.isometry -
                    ComplexOperator::Identity(ds * dr, ds * dr)) <= tol);

        double intertwine = 0.0;
        for (std::size_t q = 0; q < channel.size(); ++q) {
            const ComplexOperator inside = b.isometry.adjoint() * channel.kraus()[q] * b.isometry;
            intertwine = std::max(
                intertwine,
                max_abs(inside - tensor(ComplexOperator::Identity(ds, ds), b.kraus_r[q])));
        }
        add("block_intertwining" + tag, intertwine, intertwine <= tol);

        ComplexOperator completeness = ComplexOperator::Zero(dr, dr);
        for (const auto& m : b.kraus_r) completeness.noalias() += m.adjoint() * m;
        const double comp = max_abs(completeness - ComplexOperator::Identity(dr, dr));
        add("block_completeness" + tag, comp, comp <= tol);

        ComplexOperator fixed = ComplexOperator::Zero(dr, dr);
        for (const auto& m : b.kraus_r) fixed.noalias() += m * b.lambda_r * m.adjoint();
        const double fix_res = trace_norm(fixed - b.lambda_r);
        add("lambda_r_fixed" + tag, fix_res, fix_res <= tol);

        const double tr_res = std::abs(b.lambda_r.trace().real() - 1.0);
        add("lambda_r_trace" + tag, tr_res, tr_res <= tol);

        Eigen::SelfAdjointEigenSolver<ComplexOperator> solver(
            ComplexOperator(0.5 * (b.lambda_r + b.lambda_r.adjoint().eval())),
            Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        add("lambda_r_invertible" + tag, min_eig, min_eig > tols.kernel);

        try {
            const KrausChannel block_channel(b.kraus_r, {}, tols);
            const CesaroProjector projector(block_channel, tols);
            const Index k = projector.fixed_space_dim();
            add("lambda_r_unique" + tag, static_cast<double>(std::abs(k - 1)), k == 1);
        } catch (const std::exception&) {
            add("lambda_r_unique" + tag, std::numeric_limits<double>::infinity(), false);
        }
    }

    if (dec.complement_dim() > 0) {
        const ComplexOperator& c = dec.complement_basis;
        const ComplexOperator projector_out =
            ComplexOperator::Identity(d, d) - c * c.adjoint();
        double dual_inv = 0.0;
        for (const auto& m : channel.kraus())
            dual_inv = std::max(dual_inv, max_abs(projector_out * (m.adjoint() * c)));
        add("complement_invariant_under_dual", dual_inv, dual_inv <= tol);

        // Λ-kernel criterion: the channel restricted to the complement must
        // be strictly trace decreasing, i.e. its superoperator has spectral
        // radius < 1. An invariant subspace of {M_q} inside H_C would pin
        // the radius at 1.
        const Index cd = dec.complement_dim();
        ComplexOperator restricted_super = ComplexOperator::Zero(cd * cd, cd * cd);
        for (const auto& m : channel.kraus()) {
            const ComplexOperator r = c.adjoint() * m * c;
            restricted_super.noalias() += tensor(r.conjugate(), r);
        }
        double radius = 0.0;
        if (cd > 0) {
            Eigen::ComplexEigenSolver<ComplexOperator> solver(restricted_super, false);
            radius = solver.eigenvalues().cwiseAbs().maxCoeff();
        }
        add("complement_spectral_radius", radius, radius < 1.0 - tols.structure);
    }

    // Global fixed-point space must have dimension Σ d_S² (the canonical MIO
    // form has exactly that many free parameters).
    if (d <= tols.spectral_dim_cap) {
        Index expected = 0;
        for (const auto& b : dec.blocks) expected += b.shape.d_s * b.shape.d_s;
        try {
            const CesaroProjector projector(channel, tols);
            const Index k = projector.fixed_space_dim();
            add("mio_space_dimension", static_cast<double>(std::abs(k - expected)), k == expected);
        } catch (const std::exception&) {
            add("mio_space_dimension", std::numeric_limits<double>::infinity(), false);
        }
    }

    // Λ restricted to a block must factor as I_S-like ⊗ Λ_R; the R factor is
    // recovered by tracing out S and renormalizing.
    {
        const ComplexOperator lambda = lambda_operator(channel, tols);
        for (std::size_t j = 0; j < dec.blocks.size(); ++j) {
            const Block& b = dec.blocks[j];
            const ComplexOperator inside = b.isometry.adjoint() * lambda * b.isometry;
            ComplexOperator r_part = partial_trace_s(inside, b.shape);
            const double tr = r_part.trace().real();
            double res = std::numeric_limits<double>::infinity();
            if (tr > tols.kernel) res = max_abs(r_part / tr - b.lambda_r);
            add("lambda_r_global_consistency[" + std::to_string(j) + "]", res, res <= tol * 10);
        }
    }

    return report;
}

/// Σ_j V_j (A_S^(j) ⊗ Λ_R^(j)) V_j†: the canonical embedding of block
/// components as a fixed point of the channel.
inline ComplexOperator mio_assemble(const Decomposition& dec,
                                    const std::vector<ComplexOperator>& components) {
    if (components.size() != dec.blocks.size())
        throw ValidationError("mio_assemble: expected " + std::to_string(dec.blocks.size()) +
                              " components, got " + std::to_string(components.size()));
    ComplexOperator out = ComplexOperator::Zero(dec.dim, dec.dim);
    for (std::size_t j = 0; j < dec.blocks.size(); ++j) {
        const Block& b = dec.blocks[j];
        if (components[j].rows() != b.shape.d_s || components[j].cols() != b.shape.d_s)
            throw ValidationError("mio_assemble: component " + std::to_string(j) +
                                  " has wrong dimension");
        out.noalias() += b.isometry * tensor(components[j], b.lambda_r) * b.isometry.adjoint();
    }
    return out;
}

/// Invert the canonical form: extract A_S^(j) = Tr_R(V_j† A V_j) and verify
/// the discarded R factor really was Λ_R. Throws if A is not a fixed point
/// with respect to this decomposition.
inline std::vector<ComplexOperator> mio_components(const Decomposition& dec,
                                                   const ComplexOperator& a, double tol) {
    require_square_finite(a, "mio_components");
    if (a.rows() != dec.dim) throw ValidationError("mio_components: dim mismatch");
    std::vector<ComplexOperator> components;
    components.reserve(dec.blocks.size());
    for (const auto& b : dec.blocks) {
        const ComplexOperator inside = b.isometry.adjoint() * a * b.isometry;
        ComplexOperator comp = partial_trace_r(inside, b.shape);
        const double r_mismatch = max_abs(inside - tensor(comp, b.lambda_r));
        if (r_mismatch > tol)
            throw ValidationError("mio_components: block R factor differs from Λ_R by " +
                                  std::to_string(r_mismatch) + "; operator is not a MIO");
        components.push_back(std::move(comp));
    }
    const double recon = trace_norm(a - mio_assemble(dec, components));
    if (recon > tol)
        throw ValidationError("mio_components: reconstruction residual " + std::to_string(recon) +
                              "; operator has weight outside the block structure");
    return components;
}

/// Σ_j V_j (B_S^(j) ⊗ 1_R) V_j†: the canonical dual-MIO form. It is a fixed
/// point of the dual map compressed to the block sector,
/// π_SR P†(B) π_SR = B; when the complement is empty (any unital channel)
/// that is full dual-map fixedness. A leaking complement adds a P†-image
/// component on H_C that the canonical form deliberately omits.
inline ComplexOperator dual_mio_assemble(const Decomposition& dec,
                                         const std::vector<ComplexOperator>& components) {
    if (components.size() != dec.blocks.size())
        throw ValidationError("dual_mio_assemble: expected " + std::to_string(dec.blocks.size()) +
                              " components, got " + std::to_string(components.size()));
    ComplexOperator out = ComplexOperator::Zero(dec.dim, dec.dim);
    for (std::size_t j = 0; j < dec.blocks.size(); ++j) {
        const Block& b = dec.blocks[j];
        if (components[j].rows() != b.shape.d_s || components[j].cols() != b.shape.d_s)
            throw ValidationError("dual_mio_assemble: component " + std::to_string(j) +
                                  " has wrong dimension");
        out.noalias() +=
            b.isometry *
            tensor(components[j], ComplexOperator::Identity(b.shape.d_r, b.shape.d_r)) *
            b.isometry.adjoint();
    }
    return out;
}

/// Compute the full invariant-subspace structure of a channel:
///   1. split ker Λ (complement) from its support;
///   2. on the support, take the †-algebra generated by the projected Kraus
///      operators and solve for its commutant;
///   3. eigen-split a seeded random Hermitian commutant element into
///      irreducible invariant subspaces;
///   4. group the subspaces into isomorphism classes through intertwiners,
///      which for irreducible subspaces are forced proportional to unitaries;
///   5. assemble per-class isometries (S index major, R index minor) and the
///      block fixed points Λ_R.
/// A degenerate random draw is detected by the candidate checks and retried
/// with fresh randomness, up to a bounded number of attempts. Deterministic
/// for a fixed seed.
inline Decomposition decompose(const KrausChannel& channel, double tol = Tolerances{}.structure,
                               std::uint64_t seed = 0, const Tolerances& tols = {}) {
    const Index d = channel.dim();
    Decomposition dec;
    dec.dim = d;

    const ComplexOperator lambda = lambda_operator(channel, tols);
    const HermitianEig lambda_eig = hermitian_eig(lambda, tols.herm * 100);
    Index kernel_count = 0;
    while (kernel_count < lambda_eig.values.size() &&
           lambda_eig.values(kernel_count) <= tols.kernel)
        ++kernel_count;
    dec.complement_basis = lambda_eig.vectors.leftCols(kernel_count);
    const ComplexOperator support = lambda_eig.vectors.rightCols(d - kernel_count);
    const Index m = support.cols();
    if (m == 0)
        throw DecompositionError("decompose: Λ has empty support; channel cannot be trace "
                                 "preserving");

    // Projected Kraus operators and the †-closed generating set.
    std::vector<ComplexOperator> projected;
    projected.reserve(channel.size());
    for (const auto& kraus : channel.kraus())
        projected.push_back(support.adjoint() * kraus * support);
    std::vector<ComplexOperator> generators = projected;
    for (const auto& k : projected) generators.push_back(k.adjoint().eval());

    const std::vector<ComplexOperator> commutant = detail::commutant_basis(generators, tol);
    if (commutant.empty())
        throw DecompositionError("decompose: empty commutant; identity must always commute");

    RngState rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    std::string failure = "decompose: no admissible commutant split found";
    for (int attempt = 0; attempt < tols.decompose_retries; ++attempt) {
        // Random Hermitian commutant element. The commutant is †-closed, so
        // hermitization stays inside it.
        ComplexOperator x = ComplexOperator::Zero(m, m);
        for (const auto& basis_el : commutant)
            x += Complex(detail::gaussian(rng), detail::gaussian(rng)) * basis_el;
        x = 0.5 * (x + x.adjoint().eval());
        const double scale = std::max(1.0, max_abs(x));
        const HermitianEig xeig = hermitian_eig(ComplexOperator(x / scale), 1e-6);

        // Cluster eigenvalues by gap; each cluster is one candidate subspace.
        std::vector<detail::Candidate> candidates;
        bool admissible = true;
        Index start = 0;
        for (Index i = 1; i <= m; ++i) {
            if (i < m && xeig.values(i) - xeig.values(i - 1) <= tols.structure) continue;
            detail::Candidate cand;
            cand.basis = xeig.vectors.middleCols(start, i - start);
            start = i;
            // Invariance of the cluster under every projected Kraus operator.
            const ComplexOperator outside =
                ComplexOperator::Identity(m, m) - cand.basis * cand.basis.adjoint();
            for (const auto& k : projected) {
                if (max_abs(outside * (k * cand.basis)) > tol) {
                    admissible = false;
                    break;
                }
            }
            if (!admissible) break;
            cand.ops.reserve(projected.size());
            for (const auto& k : projected)
                cand.ops.push_back(cand.basis.adjoint() * k * cand.basis);
            // Irreducibility: the restricted †-algebra commutant must be
            // scalars only. A larger commutant means merged clusters.
            std::vector<ComplexOperator> restricted = cand.ops;
            for (const auto& op : cand.ops) restricted.push_back(op.adjoint().eval());
            if (detail::commutant_basis(restricted, tol).size() != 1) {
                admissible = false;
                break;
            }
            candidates.push_back(std::move(cand));
        }
        if (!admissible) {
            failure = "decompose: degenerate commutant draw (merged or non-invariant clusters)";
            continue;
        }

        // Isomorphism classes via intertwiners against each representative.
        struct ClassInfo {
            std::size_t representative;
            std::vector<std::pair<std::size_t, ComplexOperator>> members;  // (candidate, W)
        };
        std::vector<ClassInfo> classes;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            bool placed = false;
            for (auto& cls : classes) {
                const auto& rep = candidates[cls.representative];
                if (rep.basis.cols() != candidates[c].basis.cols()) continue;
                const auto w = detail::solve_intertwiner(rep.ops, candidates[c].ops, tol);
                if (w) {
                    cls.members.emplace_back(c, *w);
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                ClassInfo cls;
                cls.representative = c;
                cls.members.emplace_back(
                    c, ComplexOperator::Identity(candidates[c].basis.cols(),
                                                 candidates[c].basis.cols()));
                classes.push_back(std::move(cls));
            }
        }

        std::vector<Block> blocks;
        bool assembled = true;
        for (const auto& cls : classes) {
            Block block;
            const auto& rep = candidates[cls.representative];
            const Index dr = rep.basis.cols();
            const Index ds = static_cast<Index>(cls.members.size());
            block.shape = SubsystemShape{ds, dr};
            block.kraus_r = rep.ops;
            block.isometry.resize(d, ds * dr);
            for (Index s = 0; s < ds; ++s) {
                const auto& [cand_index, w] = cls.members[static_cast<std::size_t>(s)];
                const ComplexOperator aligned = candidates[cand_index].basis * w;
                block.isometry.middleCols(s * dr, dr) = support * aligned;
            }
            try {
                const KrausChannel block_channel(block.kraus_r, {}, tols);
                const CesaroProjector projector(block_channel, tols);
                if (projector.fixed_space_dim() != 1) {
                    assembled = false;
                    failure = "decompose: block fixed-point space is not one-dimensional";
                    break;
                }
                ComplexOperator lam =
                    projector.project(ComplexOperator::Identity(dr, dr)) / static_cast<double>(dr);
                block.lambda_r = 0.5 * (lam + lam.adjoint().eval());
            } catch (const std::exception& e) {
                assembled = false;
                failure = std::string("decompose: block channel rejected: ") + e.what();
                break;
            }
            blocks.push_back(std::move(block));
        }
        if (!assembled) continue;

        dec.blocks = std::move(blocks);
        const DecompositionReport report = verify_decomposition(channel, dec, tol, tols);
        if (report.pass()) return dec;
        failure = "decompose: verification failed\n" + report.summary();
    }
    throw DecompositionError(failure + " (after " + std::to_string(tols.decompose_retries) +
                             " attempts)");
}

}  // namespace zeno

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
#include <vector>

#include "zeno/structure.hpp"

namespace zeno {

/// The Zeno-limit generator H̃ = ⊕_j (H̃_S^(j) ⊗ 1_R^(j)). Stored per block
/// (drives the fast effective evolution) and embedded in the full space
/// (drives the trace-norm strength J̃ and the error bound); the two forms are
/// consistent by construction.
struct EffectiveHamiltonian {
    std::vector<ComplexOperator> per_block;  ///< Hermitian d_S × d_S blocks
    ComplexOperator embedded;                ///< full-dim dual MIO
    double trace_norm_j_tilde = 0.0;         ///< J̃ = ‖H̃‖₁
};

/// H̃_S^(j) = Tr_R[ π^(j) H π^(j) (1_S ⊗ Λ_R^(j)) ], assembled into the dual
/// MIO embedding.
inline EffectiveHamiltonian effective_hamiltonian(const Decomposition& dec,
                                                  const ComplexOperator& h,
                                                  const Tolerances& tols = {}) {
    require_hermitian(h, tols.herm, "effective_hamiltonian");
    if (h.rows() != dec.dim)
        throw ValidationError("effective_hamiltonian: dim mismatch " + std::to_string(h.rows()) +
                              " vs " + std::to_string(dec.dim));
    EffectiveHamiltonian out;
    out.per_block.reserve(dec.blocks.size());
    for (const auto& b : dec.blocks) {
        const ComplexOperator inside = b.isometry.adjoint() * h * b.isometry;
        const ComplexOperator weighted =
            inside * tensor(ComplexOperator::Identity(b.shape.d_s, b.shape.d_s), b.lambda_r);
        ComplexOperator h_s = partial_trace_r(weighted, b.shape);
        h_s = 0.5 * (h_s + h_s.adjoint().eval());
        out.per_block.push_back(std::move(h_s));
    }
    out.embedded = dual_mio_assemble(dec, out.per_block);
    const double defect = hermiticity_defect(out.embedded);
    if (defect > tols.herm * 100)
        throw NumericalError("effective_hamiltonian: embedded operator lost Hermiticity (" +
                             std::to_string(defect) + ")");
    out.trace_norm_j_tilde = trace_norm(out.embedded);
    return out;
}

struct EffectiveActionResiduals {
    double left = 0.0;   ///< ‖S_∞(Hρ) - H̃ρ‖₁
    double right = 0.0;  ///< ‖S_∞(ρH) - ρH̃‖₁
};

/// Check the defining property of H̃ on a MIO state: the Cesàro limit turns
/// one-sided products with H into products with H̃.
inline EffectiveActionResiduals verify_effective_action(const KrausChannel& channel,
                                                        const Decomposition& dec,
                                                        const ComplexOperator& h,
                                                        const DensityOperator& rho_mio,
                                                        double tol,
                                                        const Tolerances& tols = {}) {
    const MioCheck check = is_mio(channel, rho_mio.matrix(), tol);
    if (!check.is_mio)
        throw ValidationError("verify_effective_action: state is not a MIO (residual " +
                              std::to_string(check.residual) + ")");
    const EffectiveHamiltonian heff = effective_hamiltonian(dec, h, tols);
    const CesaroProjector projector(channel, tols);
    const ComplexOperator& rho = rho_mio.matrix();
    EffectiveActionResiduals out;
    out.left = trace_norm(projector.project(h * rho) - heff.embedded * rho);
    out.right = trace_norm(projector.project(rho * h) - rho * heff.embedded);
    return out;
}

/// Destructure a MIO state, conjugate each block by e^{-i H̃_S t}, and
/// reassemble. The result stays a MIO for every t.
inline DensityOperator effective_evolve_state(const Decomposition& dec,
                                              const EffectiveHamiltonian& heff,
                                              const DensityOperator& rho0, double t,
                                              const Tolerances& tols = {}) {
    std::vector<ComplexOperator> components =
        mio_components(dec, rho0.matrix(), tols.structure * 10);
    for (std::size_t j = 0; j < components.size(); ++j) {
        const ComplexOperator u = unitary_step(heff.per_block[j], t, tols.herm);
        components[j] = u * components[j] * u.adjoint();
    }
    return DensityOperator(mio_assemble(dec, components), tols);
}

/// Heisenberg evolution of a dual MIO, per block: B_S(τ) = e^{iH̃τ} B_S
/// e^{-iH̃τ}, so that Tr[ρ(τ) B] = Tr[ρ(0) B(τ)]. Returns the embedded
/// operator.
inline ComplexOperator effective_evolve_observable(const Decomposition& dec,
                                                   const EffectiveHamiltonian& heff,
                                                   const std::vector<ComplexOperator>& b_components,
                                                   double tau, const Tolerances& tols = {}) {
    if (b_components.size() != dec.blocks.size())
        throw ValidationError("effective_evolve_observable: expected " +
                              std::to_string(dec.blocks.size()) + " components");
    std::vector<ComplexOperator> evolved;
    evolved.reserve(b_components.size());
    for (std::size_t j = 0; j < b_components.size(); ++j) {
        if (b_components[j].rows() != dec.blocks[j].shape.d_s ||
            b_components[j].cols() != dec.blocks[j].shape.d_s)
            throw ValidationError("effective_evolve_observable: component " + std::to_string(j) +
                                  " has wrong dimension");
        const ComplexOperator u = unitary_step(heff.per_block[j], tau, tols.herm);
        evolved.push_back(u.adjoint() * b_components[j] * u);
    }
    return dual_mio_assemble(dec, evolved);
}

}  // namespace zeno

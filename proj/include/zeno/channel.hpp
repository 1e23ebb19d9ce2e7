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

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "zeno/operator_core.hpp"

namespace zeno {

using RngState = std::mt19937_64;

/// Uniform draw in [0, 1) with the full 53-bit mantissa, stable across
/// standard-library implementations.
inline double uniform_unit(RngState& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct ValidationReport {
    Index dim = 0;
    std::size_t kraus_count = 0;
    double max_abs_deviation = 0.0;  ///< max-abs of ΣM†M - I
    bool ok = false;
};

/// Diagnostic completeness check on a raw Kraus list.
inline ValidationReport validate_kraus(const std::vector<ComplexOperator>& kraus,
                                       double tol_complete = Tolerances{}.complete) {
    if (kraus.empty()) throw ValidationError("validate_kraus: empty Kraus list");
    const Index d = kraus.front().rows();
    for (const auto& m : kraus) {
        require_square_finite(m, "validate_kraus");
        if (m.rows() != d)
            throw ValidationError("validate_kraus: mixed dimensions " + std::to_string(d) +
                                  " vs " + std::to_string(m.rows()));
    }
    ComplexOperator sum = ComplexOperator::Zero(d, d);
    for (const auto& m : kraus) sum.noalias() += m.adjoint() * m;
    ValidationReport report;
    report.dim = d;
    report.kraus_count = kraus.size();
    report.max_abs_deviation = max_abs(sum - ComplexOperator::Identity(d, d));
    report.ok = report.max_abs_deviation <= tol_complete;
    return report;
}

/// A general measurement / trace-preserving CP map, held as Kraus operators
/// satisfying the completeness equation. Channels failing completeness are
/// rejected at construction, never silently normalized. Immutable and safe
/// to share across threads.
class KrausChannel {
  public:
    explicit KrausChannel(std::vector<ComplexOperator> kraus,
                          std::vector<std::string> labels = {},
                          const Tolerances& tols = {})
        : kraus_(std::move(kraus)), labels_(std::move(labels)) {
        const ValidationReport report = validate_kraus(kraus_, tols.complete);
        if (!report.ok)
            throw ValidationError("KrausChannel: completeness violated, max-abs deviation " +
                                  std::to_string(report.max_abs_deviation));
        if (!labels_.empty() && labels_.size() != kraus_.size())
            throw ValidationError("KrausChannel: label count does not match Kraus count");
        dim_ = report.dim;
        effects_.reserve(kraus_.size());
        for (const auto& m : kraus_) effects_.push_back(m.adjoint() * m);
    }

    Index dim() const { return dim_; }
    std::size_t size() const { return kraus_.size(); }
    const std::vector<ComplexOperator>& kraus() const { return kraus_; }
    const std::vector<std::string>& labels() const { return labels_; }
    /// Effect operators M†M, precomputed for outcome probabilities.
    const std::vector<ComplexOperator>& effects() const { return effects_; }

    /// P(A) = Σ_q M_q A M_q†. Trace- and Hermiticity-preserving.
    ComplexOperator apply(const ComplexOperator& a) const {
        check_dim(a, "apply");
        ComplexOperator out = ComplexOperator::Zero(dim_, dim_);
        for (const auto& m : kraus_) out.noalias() += m * a * m.adjoint();
        return out;
    }

    /// Dual (Heisenberg) map P†(A) = Σ_q M_q† A M_q. Unital.
    ComplexOperator apply_dual(const ComplexOperator& a) const {
        check_dim(a, "apply_dual");
        ComplexOperator out = ComplexOperator::Zero(dim_, dim_);
        for (const auto& m : kraus_) out.noalias() += m.adjoint() * a * m;
        return out;
    }

  private:
    void check_dim(const ComplexOperator& a, const char* what) const {
        require_square_finite(a, what);
        if (a.rows() != dim_)
            throw ValidationError(std::string(what) + ": dim mismatch, channel " +
                                  std::to_string(dim_) + " vs operator " +
                                  std::to_string(a.rows()));
    }

    std::vector<ComplexOperator> kraus_;
    std::vector<std::string> labels_;
    std::vector<ComplexOperator> effects_;
    Index dim_ = 0;
};

inline ValidationReport validate(const KrausChannel& channel,
                                 double tol_complete = Tolerances{}.complete) {
    return validate_kraus(channel.kraus(), tol_complete);
}

inline KrausChannel identity_channel(Index dim) {
    return KrausChannel({ComplexOperator::Identity(dim, dim)}, {"id"});
}

/// Kraus set of the composition outer ∘ inner: all products {M_a N_b}.
/// Beyond the materialization cap callers should apply sequentially instead.
inline KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner,
                            const Tolerances& tols = {}) {
    if (outer.dim() != inner.dim())
        throw ValidationError("compose: dim mismatch " + std::to_string(outer.dim()) + " vs " +
                              std::to_string(inner.dim()));
    const std::size_t count = outer.size() * inner.size();
    if (count > static_cast<std::size_t>(tols.compose_cap))
        throw ValidationError("compose: product Kraus count " + std::to_string(count) +
                              " exceeds cap " + std::to_string(tols.compose_cap) +
                              "; apply the channels sequentially instead");
    const bool labeled = !outer.labels().empty() && !inner.labels().empty();
    std::vector<ComplexOperator> kraus;
    std::vector<std::string> labels;
    kraus.reserve(count);
    if (labeled) labels.reserve(count);
    for (std::size_t a = 0; a < outer.size(); ++a)
        for (std::size_t b = 0; b < inner.size(); ++b) {
            kraus.push_back(outer.kraus()[a] * inner.kraus()[b]);
            if (labeled) labels.push_back(inner.labels()[b] + "," + outer.labels()[a]);
        }
    return KrausChannel(std::move(kraus), std::move(labels), tols);
}

/// The weak measurement P_c(ζ)A = [(1+ζ)/2] A + [(1-ζ)/2] c A c of a
/// Hermitian involution c. ζ = 0 is the projective limit.
inline KrausChannel weak_pauli_measurement(const ComplexOperator& c, double zeta,
                                           const Tolerances& tols = {}) {
    require_hermitian(c, tols.herm, "weak_pauli_measurement");
    const Index d = c.rows();
    if (max_abs(c * c - ComplexOperator::Identity(d, d)) > tols.herm * 10)
        throw ValidationError("weak_pauli_measurement: c is not an involution");
    if (zeta < 0.0 || zeta >= 1.0)
        throw ValidationError("weak_pauli_measurement: zeta must lie in [0, 1)");
    std::vector<ComplexOperator> kraus;
    kraus.push_back(std::sqrt((1.0 + zeta) / 2.0) * ComplexOperator::Identity(d, d));
    kraus.push_back(std::sqrt((1.0 - zeta) / 2.0) * c);
    return KrausChannel(std::move(kraus), {"+", "-"}, tols);
}

/// p_q = Tr(M_q ρ M_q†) for every outcome, clamped at zero.
inline std::vector<double> outcome_probabilities(const KrausChannel& channel,
                                                 const ComplexOperator& rho) {
    std::vector<double> probs(channel.size());
    for (std::size_t q = 0; q < channel.size(); ++q) {
        const double p = trace_of_product(channel.effects()[q], rho).real();
        probs[q] = p > 0.0 ? p : 0.0;
    }
    return probs;
}

struct OutcomeSample {
    int index = 0;
    double probability = 0.0;
    DensityOperator post_state;
};

/// Draw one outcome by inverse CDF over the exactly computed probabilities
/// and return the normalized post-measurement state. Deterministic per rng
/// stream; callers own the stream, so parallel trajectories stay independent.
inline OutcomeSample sample_outcome(const KrausChannel& channel, const DensityOperator& rho,
                                    RngState& rng, const Tolerances& tols = {}) {
    const std::vector<double> probs = outcome_probabilities(channel, rho.matrix());
    double total = 0.0;
    for (double p : probs) total += p;
    if (total < tols.prob)
        throw NumericalError("sample_outcome: all outcome probabilities below floor (" +
                             std::to_string(total) + "); channel completeness is broken");
    const double threshold = uniform_unit(rng) * total;
    double cum = 0.0;
    std::size_t pick = probs.size() - 1;
    for (std::size_t q = 0; q < probs.size(); ++q) {
        cum += probs[q];
        if (cum > threshold) {
            pick = q;
            break;
        }
    }
    const ComplexOperator& m = channel.kraus()[pick];
    ComplexOperator post = m * rho.matrix() * m.adjoint();
    const double p = probs[pick];
    if (p < tols.prob)
        throw NumericalError("sample_outcome: selected outcome has vanishing probability");
    post /= p;
    post = 0.5 * (post + post.adjoint().eval());
    return OutcomeSample{static_cast<int>(pick), p, DensityOperator(std::move(post), tols)};
}

}  // namespace zeno

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

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zeno/effective.hpp"

namespace zeno {

/// One repeated-measurement experiment: N applications of (free step of
/// τ/N, then the channel) over total time τ. The optional split N = N1·N2
/// feeds the rigorous deviation bound.
struct ZenoConfig {
    ComplexOperator hamiltonian;
    KrausChannel channel;
    double tau = 1.0;
    long n = 1;
    std::optional<std::pair<long, long>> split;
    double j = 0.0;  ///< ‖H‖₁, cached at construction
};

inline ZenoConfig make_zeno_config(ComplexOperator hamiltonian, KrausChannel channel, double tau,
                                   long n, std::optional<std::pair<long, long>> split = {},
                                   const Tolerances& tols = {}) {
    require_hermitian(hamiltonian, tols.herm, "make_zeno_config");
    if (hamiltonian.rows() != channel.dim())
        throw ValidationError("make_zeno_config: Hamiltonian dim " +
                              std::to_string(hamiltonian.rows()) + " vs channel dim " +
                              std::to_string(channel.dim()));
    if (n < 1) throw ValidationError("make_zeno_config: N must be at least 1");
    if (split && split->first * split->second != n)
        throw ValidationError("make_zeno_config: split " + std::to_string(split->first) + "x" +
                              std::to_string(split->second) + " does not factor N = " +
                              std::to_string(n));
    const double j = trace_norm(hamiltonian);
    return ZenoConfig{std::move(hamiltonian), std::move(channel), tau, n, split, j};
}

/// Default split N1 = N2 = √N (rounded), adjusted to the nearest exact
/// factorization.
inline std::pair<long, long> square_split(long n) {
    long n1 = static_cast<long>(std::llround(std::sqrt(static_cast<double>(n))));
    while (n1 > 1 && n % n1 != 0) --n1;
    return {n1, n / n1};
}

/// ρ(τ) = [P U(τ/N)]^N ρ(0). The step unitary is precomputed once; the
/// per-step cost is the dense conjugation plus the channel application.
inline DensityOperator evolve_nonselective(const ZenoConfig& cfg, const DensityOperator& rho0,
                                           const Tolerances& tols = {}) {
    if (rho0.dim() != cfg.channel.dim())
        throw ValidationError("evolve_nonselective: dim mismatch");
    const ComplexOperator u = unitary_step(cfg.hamiltonian, cfg.tau / static_cast<double>(cfg.n),
                                           tols.herm);
    ComplexOperator rho = rho0.matrix();
    for (long step = 0; step < cfg.n; ++step) {
        rho = u * rho * u.adjoint();
        rho = cfg.channel.apply(rho);
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    return DensityOperator(std::move(rho), tols);
}

/// ρ(τ) = [P U(τ/N)]^N ρ(0) with Re Tr[ρ B] recorded at checkpoint steps.
struct NonselectiveRun {
    DensityOperator final_state;
    std::vector<std::pair<long, double>> records;  ///< (step, Re Tr[ρ B])
};

inline NonselectiveRun evolve_nonselective_recorded(const ZenoConfig& cfg,
                                                    const DensityOperator& rho0,
                                                    const std::vector<long>& checkpoints,
                                                    const ComplexOperator& observable,
                                                    const Tolerances& tols = {}) {
    if (rho0.dim() != cfg.channel.dim())
        throw ValidationError("evolve_nonselective_recorded: dim mismatch");
    const ComplexOperator u = unitary_step(cfg.hamiltonian, cfg.tau / static_cast<double>(cfg.n),
                                           tols.herm);
    ComplexOperator rho = rho0.matrix();
    NonselectiveRun run;
    std::size_t next_checkpoint = 0;
    for (long step = 1; step <= cfg.n; ++step) {
        rho = u * rho * u.adjoint();
        rho = cfg.channel.apply(rho);
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == step) {
            run.records.emplace_back(step, trace_of_product(rho, observable).real());
            ++next_checkpoint;
        }
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    run.final_state = DensityOperator(std::move(rho), tols);
    return run;
}

/// ‖ρ(τ) - e^{L̃τ} ρ(0)‖₁ for a MIO initial state: the measured distance
/// between the finite-N evolution and the Zeno limit.
inline double zeno_deviation(const ZenoConfig& cfg, const Decomposition& dec,
                             const EffectiveHamiltonian& heff, const DensityOperator& rho0,
                             const Tolerances& tols = {}) {
    const MioCheck check = is_mio(cfg.channel, rho0.matrix(), tols.structure * 10);
    if (!check.is_mio)
        throw ValidationError("zeno_deviation: initial state is not a MIO (residual " +
                              std::to_string(check.residual) + ")");
    const DensityOperator finite = evolve_nonselective(cfg, rho0, tols);
    const DensityOperator limit = effective_evolve_state(dec, heff, rho0, cfg.tau, tols);
    return trace_norm(finite.matrix() - limit.matrix());
}

struct ErrorBound {
    double total = 0.0;
    double delta_h = 0.0;        ///< N2 [e^{2Jτ/N2} - (1 + 2Jτ/N2)]
    double delta_h_tilde = 0.0;  ///< same form with J̃
    double delta = 0.0;          ///< (τ/N2) Σ_n ‖(S_{N1} L - L̃) ρ_n‖₁
};

/// The rigorous certificate on the deviation: closed forms for the two
/// exponential remainders plus the exactly computed Cesàro defect along the
/// effective path ρ_n = e^{L̃ (n-1)τ/N2} ρ(0). No stochastic shortcut.
inline ErrorBound error_bound(const ZenoConfig& cfg, const Decomposition& dec,
                              const EffectiveHamiltonian& heff, const DensityOperator& rho0,
                              const Tolerances& tols = {}) {
    if (!cfg.split)
        throw ValidationError("error_bound: config carries no (N1, N2) split");
    const MioCheck check = is_mio(cfg.channel, rho0.matrix(), tols.structure * 10);
    if (!check.is_mio)
        throw ValidationError("error_bound: initial state is not a MIO (residual " +
                              std::to_string(check.residual) + ")");
    const auto [n1, n2] = *cfg.split;
    const double tau_2 = cfg.tau / static_cast<double>(n2);

    auto remainder = [](double x) { return std::expm1(x) - x; };  // e^x - 1 - x, stable
    ErrorBound bound;
    bound.delta_h = static_cast<double>(n2) * remainder(2.0 * cfg.j * tau_2);
    bound.delta_h_tilde = static_cast<double>(n2) * remainder(2.0 * heff.trace_norm_j_tilde * tau_2);

    std::vector<ComplexOperator> components =
        mio_components(dec, rho0.matrix(), tols.structure * 10);
    std::vector<ComplexOperator> block_steps;
    block_steps.reserve(dec.blocks.size());
    for (const auto& h_s : heff.per_block)
        block_steps.push_back(unitary_step(h_s, tau_2, tols.herm));

    double delta = 0.0;
    for (long n = 1; n <= n2; ++n) {
        const ComplexOperator rho_n = mio_assemble(dec, components);
        const ComplexOperator generated = liouvillian_apply(cfg.hamiltonian, rho_n);
        const ComplexOperator averaged = cesaro_average(cfg.channel, generated, n1);
        const ComplexOperator effective = liouvillian_apply(heff.embedded, rho_n);
        delta += trace_norm(averaged - effective);
        for (std::size_t jdx = 0; jdx < components.size(); ++jdx)
            components[jdx] = block_steps[jdx] * components[jdx] * block_steps[jdx].adjoint();
    }
    bound.delta = tau_2 * delta;
    bound.total = bound.delta_h + bound.delta_h_tilde + bound.delta;
    return bound;
}

/// Deviation and certificate for one configuration.
struct ZenoResult {
    DensityOperator final_state;
    double deviation = 0.0;
    ErrorBound bound;
};

inline ZenoResult zeno_certificate(const ZenoConfig& cfg, const Decomposition& dec,
                                   const EffectiveHamiltonian& heff, const DensityOperator& rho0,
                                   const Tolerances& tols = {}) {
    DensityOperator finite = evolve_nonselective(cfg, rho0, tols);
    const DensityOperator limit = effective_evolve_state(dec, heff, rho0, cfg.tau, tols);
    const double deviation = trace_norm(finite.matrix() - limit.matrix());
    ErrorBound bound = error_bound(cfg, dec, heff, rho0, tols);
    return ZenoResult{std::move(finite), deviation, bound};
}

/// Evenly spaced checkpoint steps in [1, N], always ending at N.
inline std::vector<long> make_checkpoints(long n, long count = 100) {
    if (count < 1) count = 1;
    if (count > n) count = n;
    std::vector<long> steps;
    steps.reserve(count);
    for (long i = 1; i <= count; ++i)
        steps.push_back((n * i) / count);
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}

struct ObservableRecord {
    long step = 0;
    double value = 0.0;  ///< Re Tr[ρ B] at the checkpoint
};

/// One selective-measurement history.
struct Trajectory {
    std::vector<int> outcomes;        ///< one outcome index per step
    double log_weight = 0.0;          ///< accumulated log probability
    DensityOperator final_state;
    std::vector<ObservableRecord> observable_records;
};

/// Sample one selective trajectory: per step a free unitary kick, then one
/// outcome drawn and the state conditioned on it. Reproducible per seed.
inline Trajectory evolve_selective(const ZenoConfig& cfg, const DensityOperator& rho0,
                                   std::uint64_t rng_seed, const std::vector<long>& checkpoints,
                                   const ComplexOperator& observable,
                                   const Tolerances& tols = {}) {
    if (rho0.dim() != cfg.channel.dim())
        throw ValidationError("evolve_selective: dim mismatch");
    const ComplexOperator u = unitary_step(cfg.hamiltonian, cfg.tau / static_cast<double>(cfg.n),
                                           tols.herm);
    RngState rng(rng_seed);
    DensityOperator rho = rho0;
    Trajectory traj;
    traj.outcomes.reserve(cfg.n);
    std::size_t next_checkpoint = 0;
    for (long step = 1; step <= cfg.n; ++step) {
        ComplexOperator kicked = u * rho.matrix() * u.adjoint();
        kicked = 0.5 * (kicked + kicked.adjoint().eval());
        OutcomeSample sample = sample_outcome(cfg.channel, DensityOperator::unnormalized(kicked),
                                              rng, tols);
        traj.outcomes.push_back(sample.index);
        traj.log_weight += std::log(sample.probability);
        rho = std::move(sample.post_state);
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == step) {
            traj.observable_records.push_back(
                {step, trace_of_product(rho.matrix(), observable).real()});
            ++next_checkpoint;
        }
    }
    traj.final_state = std::move(rho);
    return traj;
}

/// Vector-state unravelling for channels whose Kraus operators act cleanly
/// on pure states. Uses the same one-uniform-per-step draw policy as
/// evolve_selective, so the two engines sample the same outcome process.
inline Trajectory pure_state_trajectory(const ZenoConfig& cfg, const StateVector& psi0,
                                        std::uint64_t rng_seed,
                                        const std::vector<long>& checkpoints,
                                        const ComplexOperator& observable,
                                        const Tolerances& tols = {}) {
    if (psi0.size() != cfg.channel.dim())
        throw ValidationError("pure_state_trajectory: dim mismatch");
    const ComplexOperator u = unitary_step(cfg.hamiltonian, cfg.tau / static_cast<double>(cfg.n),
                                           tols.herm);
    RngState rng(rng_seed);
    StateVector psi = psi0.normalized();
    Trajectory traj;
    traj.outcomes.reserve(cfg.n);
    std::size_t next_checkpoint = 0;
    std::vector<double> probs(cfg.channel.size());
    for (long step = 1; step <= cfg.n; ++step) {
        psi = u * psi;
        double total = 0.0;
        for (std::size_t q = 0; q < cfg.channel.size(); ++q) {
            const double p = (cfg.channel.kraus()[q] * psi).squaredNorm();
            probs[q] = p;
            total += p;
        }
        if (total < tols.prob)
            throw NumericalError("pure_state_trajectory: probability underflow at step " +
                                 std::to_string(step));
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
        if (probs[pick] < tols.prob)
            throw NumericalError("pure_state_trajectory: selected outcome has vanishing "
                                 "probability at step " + std::to_string(step));
        psi = (cfg.channel.kraus()[pick] * psi) / std::sqrt(probs[pick]);
        traj.outcomes.push_back(static_cast<int>(pick));
        traj.log_weight += std::log(probs[pick]);
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == step) {
            traj.observable_records.push_back(
                {step, (psi.adjoint() * observable * psi).value().real()});
            ++next_checkpoint;
        }
    }
    traj.final_state = DensityOperator::unnormalized(psi * psi.adjoint());
    return traj;
}

/// Trajectory parallelism width: an explicit request wins, then the
/// ZENO_DYN_THREADS environment cap, then the hardware count.
inline int resolve_thread_count(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ZENO_DYN_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<int>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Per-trajectory seed derivation: a splitmix64 scramble of (master, index),
/// so parallel trajectories use independent, order-free streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace zeno

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

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <utility>
#include <vector>

#include "zeno/pauli.hpp"
#include "zeno/zeno_sim.hpp"

namespace zeno::bacon_shor {

/// The 3x3 Bacon-Shor memory. Qubits are numbered 1..9 row-major, qubit i at
/// (row, col) = ((i-1)/3, (i-1)%3). Z-type gauge bonds join the two
/// horizontal neighbor pairs of each row and X-type bonds the vertical pairs
/// of each column; with Z_L on the middle column and X_L on the middle row
/// this is the unique orientation in which every gauge operator commutes
/// with both logicals.
struct BaconShorSetup {
    static constexpr int kQubits = 9;
    static constexpr Index kDim = 512;
    static constexpr Index kGaugeDim = 256;

    std::vector<PauliString> gauge_ops;  ///< 12: the six Z-type bonds first
    PauliString z_l{kQubits};
    PauliString x_l{kQubits};
    double omega = 1.0;
    double zeta = 0.0;
    ComplexOperator h0;       ///< (ω/√2)(Z_L + X_L)
    ComplexOperator h_noise;  ///< all one-local and neighbor two-local Paulis, weight ω
    std::vector<Index> lg_basis;  ///< (z*256+g) -> computational index of |z⟩_L ⊗ |g⟩_G
};

namespace detail {

inline std::vector<std::pair<int, int>> lattice_edges(bool horizontal) {
    std::vector<std::pair<int, int>> edges;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) {
            const int q = row * 3 + col + 1;
            if (horizontal && col < 2) edges.emplace_back(q, q + 1);
            if (!horizontal && row < 2) edges.emplace_back(q, q + 3);
        }
    return edges;
}

inline void accumulate_dense(ComplexOperator& h, const PauliString& p, double coeff) {
    const std::uint64_t flip = p.x_mask();
    const Index d = p.dim();
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(d); ++i)
        h(static_cast<Index>(i ^ flip), static_cast<Index>(i)) += coeff * p.amplitude(i);
}

}  // namespace detail

/// Assemble gauge operators, logicals, Hamiltonians and the logical⊗gauge
/// basis map. The measurement round is the ordered product of the twelve
/// weak gauge measurements, Z-type first, applied sequentially (the
/// materialized composition would need 2^12 Kraus operators).
inline BaconShorSetup build_setup(double omega, double zeta) {
    if (zeta < 0.0 || zeta >= 1.0)
        throw ValidationError("build_setup: zeta must lie in [0, 1)");
    BaconShorSetup setup;
    setup.omega = omega;
    setup.zeta = zeta;

    for (const auto& [a, b] : detail::lattice_edges(true))
        setup.gauge_ops.push_back(two_site(BaconShorSetup::kQubits, a, Pauli::Z, b, Pauli::Z));
    for (const auto& [a, b] : detail::lattice_edges(false))
        setup.gauge_ops.push_back(two_site(BaconShorSetup::kQubits, a, Pauli::X, b, Pauli::X));

    setup.z_l = PauliString(BaconShorSetup::kQubits);
    setup.z_l.set(2, Pauli::Z).set(5, Pauli::Z).set(8, Pauli::Z);
    setup.x_l = PauliString(BaconShorSetup::kQubits);
    setup.x_l.set(4, Pauli::X).set(5, Pauli::X).set(6, Pauli::X);

    for (const auto& g : setup.gauge_ops) {
        if (!g.commutes_with(setup.z_l) || !g.commutes_with(setup.x_l))
            throw NumericalError("build_setup: gauge operator " + g.to_string() +
                                 " fails to commute with a logical");
    }

    const Index d = BaconShorSetup::kDim;
    setup.h0 = ComplexOperator::Zero(d, d);
    detail::accumulate_dense(setup.h0, setup.z_l, omega / std::sqrt(2.0));
    detail::accumulate_dense(setup.h0, setup.x_l, omega / std::sqrt(2.0));

    setup.h_noise = ComplexOperator::Zero(d, d);
    const Pauli letters[3] = {Pauli::X, Pauli::Y, Pauli::Z};
    for (int q = 1; q <= BaconShorSetup::kQubits; ++q)
        for (Pauli alpha : letters)
            detail::accumulate_dense(setup.h_noise,
                                     single_site(BaconShorSetup::kQubits, q, alpha), omega);
    for (bool horizontal : {true, false})
        for (const auto& [a, b] : detail::lattice_edges(horizontal))
            for (Pauli alpha : letters)
                for (Pauli beta : letters)
                    detail::accumulate_dense(
                        setup.h_noise,
                        two_site(BaconShorSetup::kQubits, a, alpha, b, beta), omega);

    // Logical ⊗ gauge basis: |0,g⟩ enumerates the computational states with
    // even Z_L parity, |1,g⟩ = X_L |0,g⟩. All amplitudes are +1, so the
    // basis map is a plain index permutation.
    const std::uint64_t zl_mask = setup.z_l.zy_mask();
    const std::uint64_t xl_mask = setup.x_l.x_mask();
    setup.lg_basis.assign(2 * BaconShorSetup::kGaugeDim, 0);
    Index g = 0;
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(d); ++b) {
        if (__builtin_popcountll(b & zl_mask) % 2 == 0) {
            setup.lg_basis[static_cast<std::size_t>(g)] = static_cast<Index>(b);
            setup.lg_basis[static_cast<std::size_t>(BaconShorSetup::kGaugeDim + g)] =
                static_cast<Index>(b ^ xl_mask);
            ++g;
        }
    }
    if (g != BaconShorSetup::kGaugeDim)
        throw NumericalError("build_setup: logical sector has wrong dimension");
    return setup;
}

/// (1/256) Tr_G in the logical⊗gauge basis: the effective one-qubit
/// Hamiltonian seen by the protected logical qubit.
inline Eigen::Matrix2cd trace_out_gauge(const BaconShorSetup& setup, const ComplexOperator& h) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int z = 0; z < 2; ++z)
        for (int w = 0; w < 2; ++w) {
            Complex sum = 0.0;
            for (Index g = 0; g < BaconShorSetup::kGaugeDim; ++g)
                sum += h(setup.lg_basis[static_cast<std::size_t>(z * 256 + g)],
                         setup.lg_basis[static_cast<std::size_t>(w * 256 + g)]);
            out(z, w) = sum / static_cast<double>(BaconShorSetup::kGaugeDim);
        }
    return out;
}

struct LogicalHamiltonians {
    Eigen::Matrix2cd control;  ///< (ω/√2)(Z + X)
    Eigen::Matrix2cd noise;    ///< vanishes: one- and two-local terms are traceless over G
};

inline LogicalHamiltonians effective_logical_hamiltonian(const BaconShorSetup& setup) {
    return LogicalHamiltonians{trace_out_gauge(setup, setup.h0),
                               trace_out_gauge(setup, setup.h_noise)};
}

/// |0_L⟩ tensored with a gauge product state: a computational state with all
/// Z-type bond parities +1 and even Z_L parity. Two distinct variants allow
/// checking that the logical curve does not depend on the gauge
/// initialization.
inline StateVector initial_state(const BaconShorSetup& setup, int gauge_variant = 0) {
    Index index = 0;
    switch (gauge_variant) {
        case 0: index = 0; break;     // |000000000>
        case 1: index = 63; break;    // |000111111>: rows 000,111,111
        default: throw ValidationError("initial_state: unknown gauge variant");
    }
    StateVector psi = StateVector::Zero(BaconShorSetup::kDim);
    psi(index) = 1.0;
    (void)setup;
    return psi;
}

/// Tr_G |ψ⟩⟨ψ| as a 2x2 logical state.
inline Eigen::Matrix2cd logical_reduced_state(const BaconShorSetup& setup,
                                              const StateVector& psi) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int z = 0; z < 2; ++z)
        for (int w = 0; w < 2; ++w) {
            Complex sum = 0.0;
            for (Index g = 0; g < BaconShorSetup::kGaugeDim; ++g)
                sum += psi(setup.lg_basis[static_cast<std::size_t>(z * 256 + g)]) *
                       std::conj(psi(setup.lg_basis[static_cast<std::size_t>(w * 256 + g)]));
            out(z, w) = sum;
        }
    return out;
}

inline Eigen::Matrix2cd logical_reduced_state(const BaconShorSetup& setup,
                                              const ComplexOperator& rho) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int z = 0; z < 2; ++z)
        for (int w = 0; w < 2; ++w) {
            Complex sum = 0.0;
            for (Index g = 0; g < BaconShorSetup::kGaugeDim; ++g)
                sum += rho(setup.lg_basis[static_cast<std::size_t>(z * 256 + g)],
                           setup.lg_basis[static_cast<std::size_t>(w * 256 + g)]);
            out(z, w) = sum;
        }
    return out;
}

/// Ideal effective 2x2 dynamics from |0_L⟩ under H̃ = control + noise parts.
struct EffectivePrediction {
    std::vector<double> z_l;                ///< ⟨Z⟩ at the requested times
    std::vector<Eigen::Matrix2cd> states;   ///< the 2x2 states themselves
};

inline EffectivePrediction effective_prediction(const BaconShorSetup& setup,
                                                const std::vector<double>& times) {
    const LogicalHamiltonians lh = effective_logical_hamiltonian(setup);
    const ComplexOperator h_tilde = (lh.control + lh.noise).eval();
    EffectivePrediction out;
    out.z_l.reserve(times.size());
    out.states.reserve(times.size());
    Eigen::Vector2cd psi0;
    psi0 << 1.0, 0.0;
    for (double t : times) {
        const ComplexOperator u = unitary_step(h_tilde, t);
        const Eigen::Vector2cd psi = u * psi0;
        Eigen::Matrix2cd rho = psi * psi.adjoint();
        out.states.push_back(rho);
        out.z_l.push_back((rho(0, 0) - rho(1, 1)).real());
    }
    return out;
}

struct CheckpointStat {
    long step = 0;
    double time = 0.0;
    double mean = 0.0;       ///< ⟨Z_L⟩ averaged over trajectories
    double std_error = 0.0;  ///< across-trajectory standard error of the mean
    Eigen::Matrix2cd mean_logical;  ///< mean reduced logical state
};

struct FigureSeries {
    long n = 0;
    std::vector<CheckpointStat> points;
};

struct FigureResult {
    std::vector<FigureSeries> series;
};

/// Batched vector-state trajectory engine for one value of N. Trajectories
/// are processed in fixed column blocks so the free step runs as a dense
/// matrix product; per-trajectory rng streams are derived from (seed,
/// trajectory index) and the block partition is independent of the thread
/// count, so results are bit-identical for a fixed seed however the work is
/// scheduled. One uniform is consumed per gauge stage per step — the same
/// policy as pure_state_trajectory on a single weak measurement.
inline FigureSeries run_trajectories(const BaconShorSetup& setup, long n, double tau,
                                     long n_trajectories, std::uint64_t seed,
                                     long n_checkpoints = 100, int n_threads = 0,
                                     int gauge_variant = 0) {
    if (n < 1) throw ValidationError("run_trajectories: N must be >= 1");
    if (n_trajectories < 1) throw ValidationError("run_trajectories: need trajectories");
    const Index d = BaconShorSetup::kDim;
    const ComplexOperator h = setup.h0 + setup.h_noise;
    const ComplexOperator u = unitary_step(h, tau / static_cast<double>(n));
    const std::vector<long> checkpoints = make_checkpoints(n, n_checkpoints);
    const StateVector psi0 = initial_state(setup, gauge_variant);
    const double p_keep = (1.0 + setup.zeta) / 2.0;

    constexpr long kBlock = 64;
    const long n_blocks = (n_trajectories + kBlock - 1) / kBlock;

    struct BlockStats {
        std::vector<double> sum, sum_sq;
        std::vector<Eigen::Matrix2cd> sum_logical;
    };
    std::vector<BlockStats> per_block(static_cast<std::size_t>(n_blocks));

    std::atomic<long> next_block{0};
    auto worker = [&]() {
        StateVector scratch(d);
        for (;;) {
            const long block = next_block.fetch_add(1);
            if (block >= n_blocks) return;
            const long first = block * kBlock;
            const long count = std::min(kBlock, n_trajectories - first);
            ComplexOperator psi(d, count);
            for (long t = 0; t < count; ++t) psi.col(t) = psi0;
            std::vector<RngState> rngs;
            rngs.reserve(static_cast<std::size_t>(count));
            for (long t = 0; t < count; ++t)
                rngs.emplace_back(derive_seed(seed, static_cast<std::uint64_t>(first + t)));

            BlockStats stats;
            stats.sum.assign(checkpoints.size(), 0.0);
            stats.sum_sq.assign(checkpoints.size(), 0.0);
            stats.sum_logical.assign(checkpoints.size(), Eigen::Matrix2cd::Zero());

            ComplexOperator kicked(d, count);
            std::size_t next_cp = 0;
            for (long step = 1; step <= n; ++step) {
                kicked.noalias() = u * psi;
                psi.swap(kicked);
                for (long t = 0; t < count; ++t) {
                    auto column = psi.col(t);
                    for (const auto& gauge : setup.gauge_ops) {
                        if (uniform_unit(rngs[static_cast<std::size_t>(t)]) >= p_keep) {
                            const std::uint64_t flip = gauge.x_mask();
                            scratch = column;
                            for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(d); ++i)
                                column(static_cast<Index>(i ^ flip)) =
                                    gauge.amplitude(i) * scratch(static_cast<Index>(i));
                        }
                    }
                }
                if (next_cp < checkpoints.size() && checkpoints[next_cp] == step) {
                    for (long t = 0; t < count; ++t) {
                        const StateVector column = psi.col(t);
                        const double z = setup.z_l.expectation(column);
                        stats.sum[next_cp] += z;
                        stats.sum_sq[next_cp] += z * z;
                        stats.sum_logical[next_cp] += logical_reduced_state(setup, column);
                    }
                    ++next_cp;
                }
            }
            per_block[static_cast<std::size_t>(block)] = std::move(stats);
        }
    };

    const int threads = static_cast<int>(std::min<long>(resolve_thread_count(n_threads), n_blocks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    FigureSeries series;
    series.n = n;
    series.points.resize(checkpoints.size());
    for (std::size_t cp = 0; cp < checkpoints.size(); ++cp) {
        double sum = 0.0, sum_sq = 0.0;
        Eigen::Matrix2cd sum_logical = Eigen::Matrix2cd::Zero();
        for (const auto& stats : per_block) {  // fixed block order
            sum += stats.sum[cp];
            sum_sq += stats.sum_sq[cp];
            sum_logical += stats.sum_logical[cp];
        }
        const double count = static_cast<double>(n_trajectories);
        const double mean = sum / count;
        const double var = std::max(0.0, sum_sq / count - mean * mean);
        CheckpointStat& point = series.points[cp];
        point.step = checkpoints[cp];
        point.time = tau * static_cast<double>(checkpoints[cp]) / static_cast<double>(n);
        point.mean = mean;
        point.std_error = count > 1 ? std::sqrt(var / (count - 1.0)) : 0.0;
        point.mean_logical = sum_logical / count;
    }
    return series;
}

/// Dense non-selective validation engine: the exact channel action of the
/// gauge round on a full density matrix. Costs two dense products per step;
/// intended for moderate N.
inline FigureSeries run_dense(const BaconShorSetup& setup, long n, double tau,
                              long n_checkpoints = 100, int gauge_variant = 0) {
    if (n < 1) throw ValidationError("run_dense: N must be >= 1");
    const Index d = BaconShorSetup::kDim;
    const ComplexOperator h = setup.h0 + setup.h_noise;
    const ComplexOperator u = unitary_step(h, tau / static_cast<double>(n));
    const std::vector<long> checkpoints = make_checkpoints(n, n_checkpoints);
    const StateVector psi0 = initial_state(setup, gauge_variant);
    ComplexOperator rho = psi0 * psi0.adjoint();
    const double p_keep = (1.0 + setup.zeta) / 2.0;

    FigureSeries series;
    series.n = n;
    std::size_t next_cp = 0;
    const ComplexOperator z_l_dense = setup.z_l.dense();
    for (long step = 1; step <= n; ++step) {
        rho = u * rho * u.adjoint();
        for (const auto& gauge : setup.gauge_ops)
            rho = p_keep * rho + (1.0 - p_keep) * gauge.conjugate_density(rho);
        if (next_cp < checkpoints.size() && checkpoints[next_cp] == step) {
            CheckpointStat point;
            point.step = step;
            point.time = tau * static_cast<double>(step) / static_cast<double>(n);
            point.mean = trace_of_product(z_l_dense, rho).real();
            point.std_error = 0.0;
            point.mean_logical = logical_reduced_state(setup, rho);
            series.points.push_back(point);
            ++next_cp;
        }
    }
    return series;
}

/// Free decay reference: no measurements at all (the paper's N = 0 curve).
inline FigureSeries run_free(const BaconShorSetup& setup, double tau, long n_checkpoints = 100) {
    const ComplexOperator h = setup.h0 + setup.h_noise;
    const HermitianEig eig = hermitian_eig(h);
    const StateVector psi0 = initial_state(setup, 0);
    const Eigen::VectorXcd coeffs = eig.vectors.adjoint() * psi0;
    FigureSeries series;
    series.n = 0;
    for (long k = 1; k <= n_checkpoints; ++k) {
        const double t = tau * static_cast<double>(k) / static_cast<double>(n_checkpoints);
        Eigen::VectorXcd phases(eig.values.size());
        for (Index i = 0; i < eig.values.size(); ++i)
            phases(i) = std::exp(Complex(0.0, -eig.values(i) * t));
        const StateVector psi = eig.vectors * phases.cwiseProduct(coeffs).eval();
        CheckpointStat point;
        point.step = k;
        point.time = t;
        point.mean = setup.z_l.expectation(psi);
        point.std_error = 0.0;
        point.mean_logical = logical_reduced_state(setup, psi);
        series.points.push_back(point);
    }
    return series;
}

enum class FigureEngine { trajectories, dense };

/// The full Fig.-1-style experiment: one ⟨Z_L⟩ time series per requested N
/// (N = 0 meaning free decay), default 2000 trajectories and ωτ = 4π so the
/// control Hamiltonian performs eight Hadamard rotations.
inline FigureResult run_figure(const BaconShorSetup& setup, const std::vector<long>& n_values,
                               double tau, long n_trajectories, std::uint64_t seed,
                               long n_checkpoints = 100,
                               FigureEngine engine = FigureEngine::trajectories,
                               int n_threads = 0) {
    FigureResult result;
    for (long n : n_values) {
        if (n == 0)
            result.series.push_back(run_free(setup, tau, n_checkpoints));
        else if (engine == FigureEngine::dense)
            result.series.push_back(run_dense(setup, n, tau, n_checkpoints));
        else
            result.series.push_back(
                run_trajectories(setup, n, tau, n_trajectories, seed, n_checkpoints, n_threads));
    }
    return result;
}

}  // namespace zeno::bacon_shor

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

// zeno-dyn: simulate the Zeno dynamics of general quantum operations.
//
// Subcommands: validate, decompose, fixed-point, effective-ham, evolve,
// trajectories, bacon-shor. Every run writes a reproducibility manifest
// (input hashes, seed, tolerances, version) beside its primary output, even
// when the computation fails. Exit codes: 0 success, 1 validation failure,
// 2 numerical failure.

#include <CLI11.hpp>

#include <zeno/zeno.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace {

using zeno::io::json;

struct RunContext {
    std::string command;
    std::vector<std::string> arguments;
    std::map<std::string, std::string> inputs;  // path -> content hash
    std::uint64_t seed = 0;
    zeno::Tolerances tols;
    std::vector<std::string> outputs;
    std::string manifest_path = "zeno_run.manifest.json";
};

std::string manifest_path_for(const std::string& primary_output) {
    std::string stem = primary_output;
    const std::size_t dot = stem.find_last_of('.');
    const std::size_t slash = stem.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        stem.resize(dot);
    return stem + ".manifest.json";
}

void register_input(RunContext& ctx, const std::string& path) {
    ctx.inputs[path] = zeno::io::file_hash_hex(path);
}

void write_manifest(const RunContext& ctx, const std::string& status,
                    const std::string& error_message) {
    try {
        json manifest;
        manifest["tool"] = "zeno-dyn";
        manifest["version"] = zeno::io::kVersion;
        manifest["command"] = ctx.command;
        manifest["arguments"] = ctx.arguments;
        manifest["inputs"] = ctx.inputs;
        manifest["seed"] = ctx.seed;
        manifest["tolerances"] = zeno::io::tolerances_to_json(ctx.tols);
        manifest["outputs"] = ctx.outputs;
        manifest["status"] = status;
        if (!error_message.empty()) manifest["error"] = error_message;
        zeno::io::write_json(ctx.manifest_path, manifest);
    } catch (const std::exception& e) {
        std::cerr << "warning: could not write manifest: " << e.what() << "\n";
    }
}

zeno::Tolerances load_tolerances(const std::string& path, RunContext& ctx) {
    if (path.empty()) return {};
    register_input(ctx, path);
    return zeno::io::tolerances_from_json(zeno::io::parse_file(path));
}

json block_report(const zeno::Decomposition& dec) {
    json blocks = json::array();
    for (const auto& b : dec.blocks) {
        const zeno::HermitianEig eig = zeno::hermitian_eig(b.lambda_r);
        std::vector<double> values(eig.values.data(), eig.values.data() + eig.values.size());
        blocks.push_back(json{{"d_s", b.shape.d_s},
                              {"d_r", b.shape.d_r},
                              {"lambda_r_eigenvalues", values}});
    }
    return blocks;
}

json verification_report(const zeno::DecompositionReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back(json{{"name", c.name}, {"residual", c.residual}, {"pass", c.pass}});
    return checks;
}

// ---------------------------------------------------------------------------
// Shared config for evolve / trajectories.

struct SimulationSetup {
    zeno::KrausChannel channel;
    zeno::ComplexOperator hamiltonian;
    zeno::DensityOperator rho0;
    double tau = 1.0;
    long n = 1;
    std::optional<std::pair<long, long>> split;
    std::optional<zeno::ComplexOperator> observable;
    long checkpoints = 100;
    std::uint64_t seed = 0;
    long count = 1000;
    std::string engine = "density";
};

SimulationSetup load_simulation_setup(const std::string& config_path, RunContext& ctx) {
    register_input(ctx, config_path);
    const json cfg = zeno::io::parse_file(config_path);
    if (cfg.contains("tolerances"))
        ctx.tols = zeno::io::tolerances_from_json(cfg.at("tolerances"), ctx.tols);

    auto path_of = [&](const char* key) {
        if (!cfg.contains(key))
            throw zeno::ValidationError(std::string("config: missing '") + key + "'");
        const std::string p = cfg.at(key).get<std::string>();
        register_input(ctx, p);
        return p;
    };

    zeno::KrausChannel channel = zeno::io::load_channel(path_of("channel"), ctx.tols);
    zeno::ComplexOperator h = zeno::io::load_operator(path_of("hamiltonian"));
    zeno::DensityOperator rho0(zeno::io::load_operator(path_of("rho0")), ctx.tols);

    SimulationSetup setup{std::move(channel), std::move(h), std::move(rho0)};
    setup.tau = cfg.value("tau", 1.0);
    setup.n = cfg.value("n", 1L);
    if (cfg.contains("split")) {
        const auto& s = cfg.at("split");
        if (s.is_string() && s.get<std::string>() == "auto")
            setup.split = zeno::square_split(setup.n);
        else if (s.is_array() && s.size() == 2)
            setup.split = std::make_pair(s.at(0).get<long>(), s.at(1).get<long>());
        else
            throw zeno::ValidationError("config: 'split' must be [n1, n2] or \"auto\"");
    }
    if (cfg.contains("observable")) {
        const std::string p = cfg.at("observable").get<std::string>();
        register_input(ctx, p);
        setup.observable = zeno::io::load_operator(p);
    }
    setup.checkpoints = cfg.value("checkpoints", 100L);
    setup.seed = cfg.value("seed", std::uint64_t{0});
    setup.count = cfg.value("count", 1000L);
    setup.engine = cfg.value("engine", std::string("density"));
    ctx.seed = setup.seed;
    return setup;
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the exit code for "completed" runs;
// exceptions map to 1 (validation) or 2 (numerical).

int run_validate(RunContext& ctx, const std::string& channel_path, const std::string& out) {
    register_input(ctx, channel_path);
    zeno::io::RawChannel raw = zeno::io::raw_channel_from_json(zeno::io::parse_file(channel_path));
    const zeno::ValidationReport report = zeno::validate_kraus(raw.kraus, ctx.tols.complete);
    json result{{"dim", report.dim},
                {"kraus_count", report.kraus_count},
                {"max_abs_deviation", report.max_abs_deviation},
                {"tol_complete", ctx.tols.complete},
                {"ok", report.ok}};
    ctx.outputs.push_back(out);
    zeno::io::write_json(out, result);
    std::cout << "completeness deviation " << report.max_abs_deviation
              << (report.ok ? " (ok)" : " (VIOLATION)") << "\n";
    if (!report.ok) {
        write_manifest(ctx, "validation-error", "completeness violated");
        return 1;
    }
    write_manifest(ctx, "ok", "");
    return 0;
}

int run_decompose(RunContext& ctx, const std::string& channel_path, double tol,
                  const std::string& out) {
    register_input(ctx, channel_path);
    const zeno::KrausChannel channel = zeno::io::load_channel(channel_path, ctx.tols);
    const zeno::Decomposition dec = zeno::decompose(channel, tol, ctx.seed, ctx.tols);
    const zeno::DecompositionReport report = zeno::verify_decomposition(channel, dec, tol, ctx.tols);
    json result{{"dim", dec.dim},
                {"complement_dimension", dec.complement_dim()},
                {"blocks", block_report(dec)},
                {"verification", verification_report(report)},
                {"all_checks_pass", report.pass()},
                {"seed", ctx.seed}};
    ctx.outputs.push_back(out);
    zeno::io::write_json(out, result);
    std::cout << "complement dimension " << dec.complement_dim() << ", " << dec.blocks.size()
              << " block(s):\n";
    for (const auto& b : dec.blocks)
        std::cout << "  d_S = " << b.shape.d_s << ", d_R = " << b.shape.d_r << "\n";
    std::cout << (report.pass() ? "verification: all checks pass\n"
                                : "verification: FAILURES\n" + report.summary());
    write_manifest(ctx, "ok", "");
    return 0;
}

int run_fixed_point(RunContext& ctx, const std::string& channel_path,
                    const std::string& operator_path, const std::string& method, double tol,
                    const std::string& out) {
    register_input(ctx, channel_path);
    const zeno::KrausChannel channel = zeno::io::load_channel(channel_path, ctx.tols);
    zeno::ComplexOperator a;
    if (operator_path.empty()) {
        a = zeno::ComplexOperator::Identity(channel.dim(), channel.dim());
    } else {
        register_input(ctx, operator_path);
        a = zeno::io::load_operator(operator_path);
    }
    const zeno::FixedPointMethod m = method == "iterative" ? zeno::FixedPointMethod::iterative
                                                           : zeno::FixedPointMethod::spectral;
    const zeno::CesaroResult result = zeno::fixed_point_limit(channel, a, m, tol, ctx.tols);
    json output{{"method", method},
                {"iterations", result.iterations},
                {"residual", result.residual},
                {"operator", zeno::io::operator_to_json(result.value)}};
    ctx.outputs.push_back(out);
    zeno::io::write_json(out, output);
    std::cout << "fixed point residual " << result.residual << " (iterations "
              << result.iterations << ")\n";
    write_manifest(ctx, "ok", "");
    return 0;
}

int run_effective_ham(RunContext& ctx, const std::string& channel_path,
                      const std::string& hamiltonian_path, const std::string& out) {
    register_input(ctx, channel_path);
    register_input(ctx, hamiltonian_path);
    const zeno::KrausChannel channel = zeno::io::load_channel(channel_path, ctx.tols);
    const zeno::ComplexOperator h = zeno::io::load_operator(hamiltonian_path);
    const zeno::Decomposition dec = zeno::decompose(channel, ctx.tols.structure, ctx.seed, ctx.tols);
    const zeno::EffectiveHamiltonian heff = zeno::effective_hamiltonian(dec, h, ctx.tols);
    json per_block = json::array();
    for (std::size_t j = 0; j < heff.per_block.size(); ++j)
        per_block.push_back(json{{"d_s", dec.blocks[j].shape.d_s},
                                 {"d_r", dec.blocks[j].shape.d_r},
                                 {"h_s", zeno::io::operator_to_json(heff.per_block[j])}});
    json output{{"per_block", per_block},
                {"embedded", zeno::io::operator_to_json(heff.embedded)},
                {"trace_norm_j_tilde", heff.trace_norm_j_tilde},
                {"complement_dimension", dec.complement_dim()},
                {"seed", ctx.seed}};
    ctx.outputs.push_back(out);
    zeno::io::write_json(out, output);
    std::cout << "J~ = " << heff.trace_norm_j_tilde << " over " << heff.per_block.size()
              << " block(s)\n";
    write_manifest(ctx, "ok", "");
    return 0;
}

int run_evolve(RunContext& ctx, const std::string& config_path, const std::string& out_base) {
    const SimulationSetup setup = load_simulation_setup(config_path, ctx);
    const zeno::ZenoConfig cfg = zeno::make_zeno_config(setup.hamiltonian, setup.channel,
                                                        setup.tau, setup.n, setup.split, ctx.tols);
    const std::vector<long> checkpoints = zeno::make_checkpoints(setup.n, setup.checkpoints);
    // Without an explicit observable the time series records the overlap
    // with the initial state.
    const zeno::ComplexOperator observable =
        setup.observable ? *setup.observable : setup.rho0.matrix();

    const zeno::NonselectiveRun run =
        zeno::evolve_nonselective_recorded(cfg, setup.rho0, checkpoints, observable, ctx.tols);

    const zeno::Decomposition dec =
        zeno::decompose(cfg.channel, ctx.tols.structure, setup.seed, ctx.tols);
    const zeno::EffectiveHamiltonian heff = zeno::effective_hamiltonian(dec, cfg.hamiltonian,
                                                                        ctx.tols);
    const zeno::DensityOperator limit =
        zeno::effective_evolve_state(dec, heff, setup.rho0, cfg.tau, ctx.tols);
    const double deviation = zeno::trace_norm(run.final_state.matrix() - limit.matrix());

    zeno::io::CsvWriter csv({"step", "time", "observable", "std_error"});
    for (const auto& [step, value] : run.records)
        csv.row({std::to_string(step),
                 zeno::io::format_double(cfg.tau * double(step) / double(cfg.n)),
                 zeno::io::format_double(value), "0"});
    const std::string csv_path = out_base + ".csv";
    ctx.outputs.push_back(csv_path);
    zeno::io::write_text(csv_path, csv.str());

    json summary{{"n", cfg.n},
                 {"tau", cfg.tau},
                 {"j", cfg.j},
                 {"j_tilde", heff.trace_norm_j_tilde},
                 {"deviation", deviation},
                 {"final_state", zeno::io::operator_to_json(run.final_state.matrix())}};
    if (cfg.split) {
        const zeno::ErrorBound bound = zeno::error_bound(cfg, dec, heff, setup.rho0, ctx.tols);
        summary["bound"] = json{{"total", bound.total},
                                {"delta_h", bound.delta_h},
                                {"delta_h_tilde", bound.delta_h_tilde},
                                {"delta", bound.delta},
                                {"n1", cfg.split->first},
                                {"n2", cfg.split->second}};
        std::cout << "deviation " << deviation << " <= bound " << bound.total << "\n";
    } else {
        std::cout << "deviation " << deviation << " (no split given, bound skipped)\n";
    }
    const std::string summary_path = out_base + ".summary.json";
    ctx.outputs.push_back(summary_path);
    zeno::io::write_json(summary_path, summary);
    write_manifest(ctx, "ok", "");
    return 0;
}

int run_trajectories(RunContext& ctx, const std::string& config_path, long count_override,
                     std::int64_t seed_override, const std::string& out_base) {
    SimulationSetup setup = load_simulation_setup(config_path, ctx);
    if (count_override > 0) setup.count = count_override;
    if (seed_override >= 0) setup.seed = static_cast<std::uint64_t>(seed_override);
    ctx.seed = setup.seed;
    if (!setup.observable)
        throw zeno::ValidationError("trajectories: config requires an 'observable'");
    const zeno::ZenoConfig cfg = zeno::make_zeno_config(setup.hamiltonian, setup.channel,
                                                        setup.tau, setup.n, setup.split, ctx.tols);
    const std::vector<long> checkpoints = zeno::make_checkpoints(setup.n, setup.checkpoints);
    const zeno::ComplexOperator& observable = *setup.observable;

    zeno::StateVector psi0;
    if (setup.engine == "pure") {
        const zeno::HermitianEig eig = zeno::hermitian_eig(setup.rho0.matrix());
        const Eigen::Index top = eig.values.size() - 1;
        if (eig.values(top) < 1.0 - 1e-8)
            throw zeno::ValidationError("trajectories: pure engine requires a rank-1 rho0");
        psi0 = eig.vectors.col(top);
    } else if (setup.engine != "density") {
        throw zeno::ValidationError("trajectories: engine must be 'density' or 'pure'");
    }

    const long count = setup.count;
    std::vector<std::vector<zeno::ObservableRecord>> records(
        static_cast<std::size_t>(count));
    std::vector<double> log_weights(static_cast<std::size_t>(count), 0.0);
    std::atomic<long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long t = next.fetch_add(1);
            if (t >= count) return;
            const std::uint64_t seed = zeno::derive_seed(setup.seed,
                                                         static_cast<std::uint64_t>(t));
            zeno::Trajectory traj =
                setup.engine == "pure"
                    ? zeno::pure_state_trajectory(cfg, psi0, seed, checkpoints, observable,
                                                  ctx.tols)
                    : zeno::evolve_selective(cfg, setup.rho0, seed, checkpoints, observable,
                                             ctx.tols);
            records[static_cast<std::size_t>(t)] = std::move(traj.observable_records);
            log_weights[static_cast<std::size_t>(t)] = traj.log_weight;
        }
    };
    const int threads = std::min<long>(zeno::resolve_thread_count(), count);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    zeno::io::CsvWriter csv({"step", "time", "observable_mean", "std_error"});
    double final_mean = 0.0, final_se = 0.0;
    for (std::size_t cp = 0; cp < checkpoints.size(); ++cp) {
        double sum = 0.0, sum_sq = 0.0;
        for (long t = 0; t < count; ++t) {
            const double v = records[static_cast<std::size_t>(t)][cp].value;
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / double(count);
        const double var = std::max(0.0, sum_sq / double(count) - mean * mean);
        const double se = count > 1 ? std::sqrt(var / double(count - 1)) : 0.0;
        csv.row({std::to_string(checkpoints[cp]),
                 zeno::io::format_double(cfg.tau * double(checkpoints[cp]) / double(cfg.n)),
                 zeno::io::format_double(mean), zeno::io::format_double(se)});
        final_mean = mean;
        final_se = se;
    }
    const std::string csv_path = out_base + ".csv";
    ctx.outputs.push_back(csv_path);
    zeno::io::write_text(csv_path, csv.str());

    double mean_log_weight = 0.0;
    for (double w : log_weights) mean_log_weight += w;
    mean_log_weight /= double(count);
    json summary{{"count", count},
                 {"seed", setup.seed},
                 {"engine", setup.engine},
                 {"n", cfg.n},
                 {"tau", cfg.tau},
                 {"final_observable_mean", final_mean},
                 {"final_observable_std_error", final_se},
                 {"mean_log_weight", mean_log_weight}};
    const std::string summary_path = out_base + ".summary.json";
    ctx.outputs.push_back(summary_path);
    zeno::io::write_json(summary_path, summary);
    std::cout << "final observable mean " << final_mean << " +- " << final_se << " over " << count
              << " trajectories\n";
    write_manifest(ctx, "ok", "");
    return 0;
}

int run_bacon_shor(RunContext& ctx, const std::vector<long>& n_values, long trajectories,
                   double zeta, double omega, double tau, long checkpoints, int threads,
                   const std::string& engine, const std::string& out) {
    const zeno::bacon_shor::BaconShorSetup setup = zeno::bacon_shor::build_setup(omega, zeta);
    const zeno::bacon_shor::FigureEngine fig_engine =
        engine == "dense" ? zeno::bacon_shor::FigureEngine::dense
                          : zeno::bacon_shor::FigureEngine::trajectories;
    const zeno::bacon_shor::FigureResult result = zeno::bacon_shor::run_figure(
        setup, n_values, tau, trajectories, ctx.seed, checkpoints, fig_engine, threads);

    zeno::io::CsvWriter csv({"N", "step", "time", "zl_mean", "std_error"});
    json deviations = json::object();
    for (const auto& series : result.series) {
        std::vector<double> times;
        times.reserve(series.points.size());
        for (const auto& p : series.points) times.push_back(p.time);
        const zeno::bacon_shor::EffectivePrediction prediction =
            zeno::bacon_shor::effective_prediction(setup, times);
        double max_dev = 0.0;
        for (std::size_t i = 0; i < series.points.size(); ++i) {
            const auto& p = series.points[i];
            csv.row({std::to_string(series.n), std::to_string(p.step),
                     zeno::io::format_double(p.time), zeno::io::format_double(p.mean),
                     zeno::io::format_double(p.std_error)});
            max_dev = std::max(max_dev, std::abs(p.mean - prediction.z_l[i]));
        }
        deviations[std::to_string(series.n)] = max_dev;
    }
    ctx.outputs.push_back(out);
    zeno::io::write_text(out, csv.str());
    json summary{{"n_values", n_values},
                 {"trajectories", trajectories},
                 {"zeta", zeta},
                 {"omega", omega},
                 {"tau", tau},
                 {"seed", ctx.seed},
                 {"engine", engine},
                 {"max_abs_deviation_from_effective", deviations}};
    const std::string summary_path = manifest_path_for(out);
    const std::string summary_json =
        summary_path.substr(0, summary_path.size() - std::string(".manifest.json").size()) +
        ".summary.json";
    ctx.outputs.push_back(summary_json);
    zeno::io::write_json(summary_json, summary);
    for (auto& [key, value] : deviations.items())
        std::cout << "N=" << key << ": max |<Z_L>| deviation from effective prediction "
                  << value.get<double>() << "\n";
    write_manifest(ctx, "ok", "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zeno-dyn: Zeno dynamics of general quantum operations"};
    app.require_subcommand(1);

    RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.arguments.emplace_back(argv[i]);

    std::string tolerances_path;
    app.add_option("--tolerances", tolerances_path,
                   "JSON file overriding the default tolerance table")
        ->check(CLI::ExistingFile);

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check Kraus completeness of a channel");
    std::string validate_channel, validate_out = "zeno_validate.json";
    validate_cmd->add_option("channel", validate_channel, "channel JSON file")->required();
    validate_cmd->add_option("--out", validate_out, "report path");

    // decompose
    auto* decompose_cmd =
        app.add_subcommand("decompose", "Invariant-subspace decomposition of a channel");
    std::string decompose_channel, decompose_out = "zeno_decompose.json";
    std::uint64_t decompose_seed = 0;
    double decompose_tol = zeno::Tolerances{}.structure;
    decompose_cmd->add_option("channel", decompose_channel, "channel JSON file")->required();
    decompose_cmd->add_option("--seed", decompose_seed, "seed for the random commutant split");
    decompose_cmd->add_option("--tol", decompose_tol, "verification tolerance");
    decompose_cmd->add_option("--out", decompose_out, "report path");

    // fixed-point
    auto* fixed_cmd = app.add_subcommand("fixed-point", "Cesàro limit S_inf of an operator");
    std::string fixed_channel, fixed_operator, fixed_method = "spectral",
                fixed_out = "zeno_fixed_point.json";
    double fixed_tol = zeno::Tolerances{}.fix * 10;
    fixed_cmd->add_option("channel", fixed_channel, "channel JSON file")->required();
    fixed_cmd->add_option("--operator", fixed_operator,
                          "operator JSON file (defaults to the identity, giving Λ)");
    fixed_cmd->add_option("--method", fixed_method, "spectral|iterative")
        ->check(CLI::IsMember({"spectral", "iterative"}));
    fixed_cmd->add_option("--tol", fixed_tol, "residual target");
    fixed_cmd->add_option("--out", fixed_out, "result path");

    // effective-ham
    auto* eff_cmd = app.add_subcommand("effective-ham", "Effective Zeno Hamiltonian");
    std::string eff_channel, eff_h, eff_out = "zeno_effective_ham.json";
    std::uint64_t eff_seed = 0;
    eff_cmd->add_option("channel", eff_channel, "channel JSON file")->required();
    eff_cmd->add_option("hamiltonian", eff_h, "Hamiltonian JSON file")->required();
    eff_cmd->add_option("--seed", eff_seed, "decomposition seed");
    eff_cmd->add_option("--out", eff_out, "result path");

    // evolve
    auto* evolve_cmd =
        app.add_subcommand("evolve", "Non-selective repeated-measurement evolution + certificate");
    std::string evolve_config, evolve_out = "zeno_evolve";
    evolve_cmd->add_option("config", evolve_config, "run configuration JSON")->required();
    evolve_cmd->add_option("--out", evolve_out, "output base path (CSV + summary)");

    // trajectories
    auto* traj_cmd = app.add_subcommand("trajectories", "Selective Monte-Carlo trajectories");
    std::string traj_config, traj_out = "zeno_trajectories";
    long traj_count = 0;
    std::int64_t traj_seed = -1;
    traj_cmd->add_option("config", traj_config, "run configuration JSON")->required();
    traj_cmd->add_option("--count", traj_count, "number of trajectories");
    traj_cmd->add_option("--seed", traj_seed, "master seed");
    traj_cmd->add_option("--out", traj_out, "output base path (CSV + summary)");

    // bacon-shor
    auto* bs_cmd = app.add_subcommand(
        "bacon-shor", "3x3 Bacon-Shor memory under weak gauge measurements "
                      "(initial logical state is |0_L>)");
    std::string bs_n = "0,500,1000,5000", bs_engine = "trajectories", bs_out = "fig1.csv";
    long bs_traj = 2000, bs_checkpoints = 100;
    double bs_zeta = 0.0, bs_omega = 1.0, bs_tau = 4.0 * M_PI;
    int bs_threads = 0;
    std::uint64_t bs_seed = 0;
    bs_cmd->add_option("--n", bs_n, "comma-separated measurement counts (0 = free decay)");
    bs_cmd->add_option("--trajectories", bs_traj, "trajectories per N");
    bs_cmd->add_option("--zeta", bs_zeta, "weak-measurement strength in [0,1)");
    bs_cmd->add_option("--omega", bs_omega, "energy scale");
    bs_cmd->add_option("--tau", bs_tau, "total time (default 4π: eight Hadamards at ω=1)");
    bs_cmd->add_option("--checkpoints", bs_checkpoints, "points per curve");
    bs_cmd->add_option("--threads", bs_threads, "trajectory threads (0: ZENO_DYN_THREADS/auto)");
    bs_cmd->add_option("--engine", bs_engine, "trajectories|dense")
        ->check(CLI::IsMember({"trajectories", "dense"}));
    bs_cmd->add_option("--seed", bs_seed, "master seed");
    bs_cmd->add_option("--out", bs_out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        ctx.tols = load_tolerances(tolerances_path, ctx);
        if (validate_cmd->parsed()) {
            ctx.command = "validate";
            ctx.manifest_path = manifest_path_for(validate_out);
            return run_validate(ctx, validate_channel, validate_out);
        }
        if (decompose_cmd->parsed()) {
            ctx.command = "decompose";
            ctx.seed = decompose_seed;
            ctx.manifest_path = manifest_path_for(decompose_out);
            return run_decompose(ctx, decompose_channel, decompose_tol, decompose_out);
        }
        if (fixed_cmd->parsed()) {
            ctx.command = "fixed-point";
            ctx.manifest_path = manifest_path_for(fixed_out);
            return run_fixed_point(ctx, fixed_channel, fixed_operator, fixed_method, fixed_tol,
                                   fixed_out);
        }
        if (eff_cmd->parsed()) {
            ctx.command = "effective-ham";
            ctx.seed = eff_seed;
            ctx.manifest_path = manifest_path_for(eff_out);
            return run_effective_ham(ctx, eff_channel, eff_h, eff_out);
        }
        if (evolve_cmd->parsed()) {
            ctx.command = "evolve";
            ctx.manifest_path = manifest_path_for(evolve_out + ".summary.json");
            return run_evolve(ctx, evolve_config, evolve_out);
        }
        if (traj_cmd->parsed()) {
            ctx.command = "trajectories";
            ctx.manifest_path = manifest_path_for(traj_out + ".summary.json");
            return run_trajectories(ctx, traj_config, traj_count, traj_seed, traj_out);
        }
        if (bs_cmd->parsed()) {
            ctx.command = "bacon-shor";
            ctx.seed = bs_seed;
            ctx.manifest_path = manifest_path_for(bs_out);
            std::vector<long> n_values;
            std::stringstream stream(bs_n);
            std::string token;
            while (std::getline(stream, token, ','))
                if (!token.empty()) n_values.push_back(std::stol(token));
            if (n_values.empty())
                throw zeno::ValidationError("bacon-shor: --n needs at least one value");
            return run_bacon_shor(ctx, n_values, bs_traj, bs_zeta, bs_omega, bs_tau,
                                  bs_checkpoints, bs_threads, bs_engine, bs_out);
        }
        return 1;
    } catch (const zeno::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        write_manifest(ctx, "validation-error", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        write_manifest(ctx, "numerical-error", e.what());
        return 2;
    }
}

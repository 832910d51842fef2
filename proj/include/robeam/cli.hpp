// SPDX-License-Identifier: Apache-2.0
//
// robeam: outage-constrained robust MISO downlink beamforming by conic optimization
// Copyright (C) 2026 The robeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command-line front end: subcommands solve | validate | experiment | bisect
// | bench.  gamma is accepted in dB everywhere and converted internally;
// rho is always a linear probability.  Exit status: 0 success, 2 infeasible
// outcome, 1 error.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robeam/experiment.hpp"
#include "robeam/io.hpp"
#include "robeam/model.hpp"
#include "robeam/recovery.hpp"
#include "robeam/restriction.hpp"

namespace robeam {

struct CliConfig {
    std::string subcommand;

    // instance source: a file, or the generator parameters below
    std::string instance_path;
    std::optional<int> nt, k;
    std::optional<double> sigma2;
    std::optional<std::string> error_type;  // gaussian | uniform
    std::optional<double> sigma_e2, correlation, epsilon;
    std::optional<double> gamma_db, rho;
    std::optional<std::vector<double>> gamma_grid_db;
    std::optional<double> pickup_gamma_db;

    std::optional<std::vector<std::string>> methods;
    std::string method;  // solve/bisect: exactly one
    std::string preset;

    std::uint64_t seed = 1;
    std::string outdir = ".";
    std::optional<int> mc_n;
    std::optional<int> trials;
    int rand_rounds = 100;
    double tol = 1e-6;
    int max_iters = 50000;
    int threads = 0;
    int bisect_iters = 6;
    std::string beams_path;              // validate
    std::string sizes = "3x3,5x5,8x8";   // bench
    int reps = 5;                        // bench
    bool plot = false;
};

namespace detail_cli {

/// Resolved generator/solver flags shared by the solve and bisect manifests.
inline std::vector<std::string> instance_argv(const CliConfig& cfg, double gamma_db) {
    std::vector<std::string> a;
    if (!cfg.instance_path.empty()) {
        a.insert(a.end(), {"--instance", cfg.instance_path});
    } else {
        a.insert(a.end(), {"--nt", std::to_string(cfg.nt.value_or(3))});
        a.insert(a.end(), {"--k", std::to_string(cfg.k.value_or(3))});
        a.insert(a.end(), {"--sigma2", fmt_double(cfg.sigma2.value_or(0.1))});
        a.insert(a.end(), {"--error-type", cfg.error_type.value_or("gaussian")});
        a.insert(a.end(), {"--sigma-e2", fmt_double(cfg.sigma_e2.value_or(0.002))});
        a.insert(a.end(), {"--correlation", fmt_double(cfg.correlation.value_or(0.0))});
        a.insert(a.end(), {"--epsilon", fmt_double(cfg.epsilon.value_or(0.02))});
        a.insert(a.end(), {"--rho", fmt_double(cfg.rho.value_or(0.1))});
        a.insert(a.end(), {"--gamma-db", fmt_double(gamma_db)});
    }
    a.insert(a.end(), {"--seed", std::to_string(cfg.seed)});
    a.insert(a.end(), {"--tol", fmt_double(cfg.tol)});
    a.insert(a.end(), {"--max-iters", std::to_string(cfg.max_iters)});
    a.insert(a.end(), {"--rand-rounds", std::to_string(cfg.rand_rounds)});
    a.insert(a.end(), {"--out", cfg.outdir});
    return a;
}

inline void add_instance_options(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--instance", cfg.instance_path, "Instance file (JSON) to load");
    sub->add_option("--nt", cfg.nt, "Transmit antenna count (generator)");
    sub->add_option("--k", cfg.k, "User count (generator)");
    sub->add_option("--sigma2", cfg.sigma2, "Noise power per user, linear (default 0.1)");
    sub->add_option("--error-type", cfg.error_type, "Error model: gaussian | uniform");
    sub->add_option("--sigma-e2", cfg.sigma_e2,
                    "Gaussian CSI error variance, linear (default 0.002)");
    sub->add_option("--correlation", cfg.correlation,
                    "Spatial error correlation coefficient in (-1,1), 0 = i.i.d.");
    sub->add_option("--epsilon", cfg.epsilon,
                    "Uniform error half-width (uniform model, default 0.02)");
    sub->add_option("--rho", cfg.rho, "Outage cap per user, linear probability in (0,1]");
    sub->add_option("--seed", cfg.seed, "RNG seed (all randomness derives from it)");
}

inline void add_solver_options(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--tol", cfg.tol, "Conic solver relative tolerance (default 1e-6)");
    sub->add_option("--max-iters", cfg.max_iters, "Conic solver iteration cap");
    sub->add_option("--rand-rounds", cfg.rand_rounds,
                    "Gaussian randomization rounds when the solution is not rank-one");
}

}  // namespace detail_cli

namespace detail_cli {

inline std::unique_ptr<CLI::App> build_app(CliConfig& cfg) {
    auto app = std::make_unique<CLI::App>(
        "robeam: outage-constrained robust MISO downlink beamforming");
    app->require_subcommand(1);
    app->fallthrough();  // lets --config after a subcommand reach the main app
    app->set_config("--config", "", "Config file (TOML; [subcommand] sections)");
    app->allow_config_extras(false);

    auto* solve_cmd = app->add_subcommand("solve", "Solve one design instance with one method");
    add_instance_options(solve_cmd, cfg);
    add_solver_options(solve_cmd, cfg);
    solve_cmd->add_option("--gamma-db", cfg.gamma_db, "SINR target (dB)");
    solve_cmd->add_option("--method", cfg.method,
                          "Method: sphere | bernstein | decomp | decomp-bounded | nonrobust");
    solve_cmd->add_option("--mc-n", cfg.mc_n, "Monte Carlo validation sample count");
    solve_cmd->add_option("--out", cfg.outdir, "Output directory");

    auto* val_cmd =
        app->add_subcommand("validate", "Monte Carlo validation of saved beamformers");
    val_cmd->add_option("--instance", cfg.instance_path, "Instance file (JSON)")->required();
    val_cmd->add_option("--beams", cfg.beams_path, "Beamformer file (JSON)")->required();
    val_cmd->add_option("--mc-n", cfg.mc_n, "Monte Carlo sample count (default 10000)");
    val_cmd->add_option("--seed", cfg.seed, "RNG seed");
    val_cmd->add_option("--out", cfg.outdir, "Output directory");

    auto* exp_cmd = app->add_subcommand("experiment", "Sweep experiments over channel trials");
    add_instance_options(exp_cmd, cfg);
    add_solver_options(exp_cmd, cfg);
    exp_cmd->add_option("--preset", cfg.preset,
                        "Preset: fig1 | fig2 | fig4a | fig4c | fig5 | fig6 (desk scale)");
    exp_cmd->add_option("--gamma-grid-db", cfg.gamma_grid_db, "SINR grid (dB), comma separated")
        ->delimiter(',');
    exp_cmd->add_option("--pickup-gamma-db", cfg.pickup_gamma_db,
                        "Common-feasible pick-up SINR (dB)");
    exp_cmd->add_option("--methods", cfg.methods, "Comma-separated method list")->delimiter(',');
    exp_cmd->add_option("--trials", cfg.trials, "Channel realizations per cell");
    exp_cmd->add_option("--mc-n", cfg.mc_n, "Monte Carlo samples for final validation");
    exp_cmd->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
    exp_cmd->add_option("--bisect-iters", cfg.bisect_iters, "Bisection steps (fig5 preset)");
    exp_cmd->add_option("--out", cfg.outdir, "Output directory");
    exp_cmd->add_flag("--plot", cfg.plot, "Also emit SVG charts");

    auto* bis_cmd = app->add_subcommand("bisect", "Bisection refinement of one design");
    add_instance_options(bis_cmd, cfg);
    add_solver_options(bis_cmd, cfg);
    bis_cmd->add_option("--gamma-db", cfg.gamma_db, "SINR target (dB)");
    bis_cmd->add_option("--method", cfg.method, "Method to refine (not nonrobust)");
    bis_cmd->add_option("--iters", cfg.bisect_iters, "Bisection iterations");
    bis_cmd->add_option("--mc-n", cfg.mc_n, "Validation sample count per step");
    bis_cmd->add_option("--out", cfg.outdir, "Output directory");

    auto* bench_cmd = app->add_subcommand("bench", "Solver runtime benchmark");
    add_instance_options(bench_cmd, cfg);
    add_solver_options(bench_cmd, cfg);
    bench_cmd->add_option("--gamma-db", cfg.gamma_db, "SINR target (dB)");
    bench_cmd->add_option("--methods", cfg.methods, "Comma-separated method list")
        ->delimiter(',');
    bench_cmd->add_option("--sizes", cfg.sizes, "Problem sizes, e.g. 3x3,5x5,8x8 (NtxK)");
    bench_cmd->add_option("--reps", cfg.reps, "Timed repetitions per cell (plus one warm-up)");
    bench_cmd->add_option("--out", cfg.outdir, "Output directory");
    return app;
}

inline void finalize_config(const CLI::App& app, CliConfig& cfg) {
    for (const auto* sub : app.get_subcommands())
        cfg.subcommand = sub->get_name();
    if ((cfg.subcommand == "solve" || cfg.subcommand == "bisect") && cfg.method.empty())
        throw CLI::ValidationError("--method", "exactly one method is required");
}

}  // namespace detail_cli

/// Parses argv (program name excluded).  Flags override config-file values;
/// unknown keys are rejected with the offending key named.
inline CliConfig parse_config(std::vector<std::string> args) {
    CliConfig cfg;
    auto app = detail_cli::build_app(cfg);
    std::reverse(args.begin(), args.end());
    app->parse(args);
    detail_cli::finalize_config(*app, cfg);
    return cfg;
}

namespace detail_cli {

inline BeamformingInstance make_or_load_instance(const CliConfig& cfg, double gamma_db) {
    if (!cfg.instance_path.empty())
        return load_instance(cfg.instance_path);
    BeamformingInstance inst;
    inst.nt = cfg.nt.value_or(3);
    inst.k = cfg.k.value_or(3);
    inst.channels = generate_channels(inst.nt, inst.k, derive_seed(cfg.seed, 0x6368ull, 0));
    inst.noise_powers.assign(inst.k, cfg.sigma2.value_or(0.1));
    inst.gamma_db.assign(inst.k, gamma_db);
    inst.rho.assign(inst.k, cfg.rho.value_or(0.1));
    const std::string et = cfg.error_type.value_or("gaussian");
    if (et == "uniform")
        inst.error_model = ErrorModel::uniform_iid(cfg.epsilon.value_or(0.02), inst.k);
    else if (cfg.correlation.value_or(0.0) != 0.0)
        inst.error_model = ErrorModel::gaussian_correlated(
            cfg.sigma_e2.value_or(0.002), *cfg.correlation, inst.nt, inst.k);
    else
        inst.error_model = ErrorModel::gaussian_iid(cfg.sigma_e2.value_or(0.002), inst.nt,
                                                    inst.k);
    inst.validate();
    return inst;
}

inline SolverOptions solver_options(const CliConfig& cfg) {
    SolverOptions s;
    s.tol = cfg.tol;
    s.max_iters = cfg.max_iters;
    return s;
}

inline ExperimentConfig experiment_config(const CliConfig& cfg) {
    ExperimentConfig ec;
    if (!cfg.preset.empty()) {
        if (cfg.preset == "fig1") {
            ec.gamma_grid_db = {11.0};
            ec.pickup_gamma_db = 11.0;
        } else if (cfg.preset == "fig2") {
            ec.gamma_grid_db = {3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0};
            ec.pickup_gamma_db = 11.0;
        } else if (cfg.preset == "fig4a") {
            ec.nt = 8;
            ec.k = 8;
            ec.rho = 0.01;
            ec.correlation = 0.9;
            ec.gamma_grid_db = {3.0, 7.0, 11.0};
            ec.pickup_gamma_db = 7.0;
            ec.trials = 20;
        } else if (cfg.preset == "fig4c") {
            ec.nt = 8;
            ec.k = 6;
            ec.rho = 0.01;
            ec.correlation = 0.9;
            ec.sigma_e2 = 0.01;
            ec.gamma_grid_db = {7.0, 11.0, 13.0};
            ec.pickup_gamma_db = 13.0;
            ec.trials = 20;
        } else if (cfg.preset == "fig5") {
            ec.nt = 5;
            ec.k = 5;
            ec.gamma_grid_db = {9.0};
            ec.pickup_gamma_db = 9.0;
            ec.trials = 20;
            ec.methods = {MethodSelector::sphere(), MethodSelector::bernstein(),
                          MethodSelector::decomp_gaussian()};
        } else if (cfg.preset == "fig6") {
            ec.error_type = "uniform";
            ec.gamma_grid_db = {1.0, 3.0, 5.0, 7.0, 9.0, 11.0};
            ec.pickup_gamma_db = 7.0;
            ec.methods = {MethodSelector::decomp_bounded(), MethodSelector::nonrobust()};
        } else {
            throw std::invalid_argument("unknown preset '" + cfg.preset + "'");
        }
    }
    if (cfg.nt)
        ec.nt = *cfg.nt;
    if (cfg.k)
        ec.k = *cfg.k;
    if (cfg.sigma2)
        ec.sigma2 = *cfg.sigma2;
    if (cfg.error_type)
        ec.error_type = *cfg.error_type;
    if (cfg.sigma_e2)
        ec.sigma_e2 = *cfg.sigma_e2;
    if (cfg.correlation)
        ec.correlation = *cfg.correlation;
    if (cfg.epsilon)
        ec.epsilon = *cfg.epsilon;
    if (cfg.rho)
        ec.rho = *cfg.rho;
    if (cfg.gamma_grid_db)
        ec.gamma_grid_db = *cfg.gamma_grid_db;
    if (cfg.pickup_gamma_db)
        ec.pickup_gamma_db = *cfg.pickup_gamma_db;
    else if (cfg.gamma_grid_db)
        ec.pickup_gamma_db = cfg.gamma_grid_db->back();
    if (cfg.methods) {
        ec.methods.clear();
        for (const auto& name : *cfg.methods)
            ec.methods.push_back(method_from_name(name));
    }
    if (cfg.trials)
        ec.trials = *cfg.trials;
    if (cfg.mc_n)
        ec.final_mc_samples = *cfg.mc_n;
    ec.seed = cfg.seed;
    ec.randomization_rounds = cfg.rand_rounds;
    ec.solver = solver_options(cfg);
    ec.threads = cfg.threads;
    ec.bisect_iters = cfg.bisect_iters;
    ec.validate();
    return ec;
}

/// Effective flag list for the manifest; rerunning these flags reproduces
/// every artifact byte for byte.
inline std::vector<std::string> experiment_argv(const ExperimentConfig& ec,
                                                const CliConfig& cfg, bool bisect_preset) {
    std::vector<std::string> a{"experiment"};
    auto num = [](double v) { return fmt_double(v); };
    a.push_back("--nt");
    a.push_back(std::to_string(ec.nt));
    a.push_back("--k");
    a.push_back(std::to_string(ec.k));
    a.push_back("--sigma2");
    a.push_back(num(ec.sigma2));
    a.push_back("--error-type");
    a.push_back(ec.error_type);
    a.push_back("--sigma-e2");
    a.push_back(num(ec.sigma_e2));
    a.push_back("--correlation");
    a.push_back(num(ec.correlation));
    a.push_back("--epsilon");
    a.push_back(num(ec.epsilon));
    a.push_back("--rho");
    a.push_back(num(ec.rho));
    std::string grid;
    for (double g : ec.gamma_grid_db)
        grid += (grid.empty() ? "" : ",") + num(g);
    a.push_back("--gamma-grid-db");
    a.push_back(grid);
    a.push_back("--pickup-gamma-db");
    a.push_back(num(ec.pickup_gamma_db));
    std::string methods;
    for (const auto& m : ec.methods)
        methods += std::string(methods.empty() ? "" : ",") + to_string(m.method);
    a.push_back("--methods");
    a.push_back(methods);
    a.push_back("--trials");
    a.push_back(std::to_string(ec.trials));
    a.push_back("--mc-n");
    a.push_back(std::to_string(ec.final_mc_samples));
    a.push_back("--seed");
    a.push_back(std::to_string(ec.seed));
    a.push_back("--tol");
    a.push_back(num(ec.solver.tol));
    a.push_back("--max-iters");
    a.push_back(std::to_string(ec.solver.max_iters));
    a.push_back("--rand-rounds");
    a.push_back(std::to_string(ec.randomization_rounds));
    a.push_back("--bisect-iters");
    a.push_back(std::to_string(ec.bisect_iters));
    if (bisect_preset) {
        a.push_back("--preset");
        a.push_back("fig5");
    }
    if (cfg.plot)
        a.push_back("--plot");
    a.push_back("--out");
    a.push_back(cfg.outdir);
    return a;
}

inline nlohmann::json report_json(const ValidationReport& rep) {
    nlohmann::json j;
    j["samples"] = rep.samples;
    j["p_hat"] = rep.p_hat;
    j["radius"] = rep.radius;
    j["pass"] = rep.pass;
    j["min_p_hat"] = rep.min_p_hat;
    j["all_pass"] = rep.all_pass;
    return j;
}

}  // namespace detail_cli

/// Executes a parsed configuration.  Returns the process exit status:
/// 0 success, 2 infeasible outcome, 1 error (thrown exceptions map to 1 in
/// cli_main).
inline int run_cli(const CliConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.outdir);
    auto outpath = [&](const std::string& name) { return (fs::path(cfg.outdir) / name).string(); };
    auto wall = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    if (cfg.subcommand == "solve") {
        const BeamformingInstance inst =
            detail_cli::make_or_load_instance(cfg, cfg.gamma_db.value_or(11.0));
        if (cfg.instance_path.empty())
            save_instance(inst, outpath("instance.json"));
        PipelineOptions opt;
        opt.solver = detail_cli::solver_options(cfg);
        opt.mc_samples = cfg.mc_n.value_or(10000);
        opt.seed = cfg.seed;
        opt.randomization_rounds = cfg.rand_rounds;
        const MethodSelector sel = method_from_name(cfg.method);
        const PipelineResult res = run_pipeline(inst, sel, opt);

        nlohmann::json j;
        j["method"] = to_string(sel.method);
        j["solver_status"] = to_string(res.solver_status);
        j["feasible"] = res.feasible;
        j["failure_stage"] = res.failure_stage;
        if (res.feasible) {
            j["objective"] = res.objective;
            j["rank_one"] = res.rank_one;
            j["used_randomization"] = res.used_randomization;
            j["rank_ratios"] = res.rar.rank_ratios;
            j["beams"] = beamformers_to_json(res.beams);
            j["validation"] = detail_cli::report_json(res.report);
        }
        j["timings"] = {{"solve", res.t_solve},
                        {"recover", res.t_recover},
                        {"validate", res.t_validate}};
        write_file(outpath("solution.json"), j.dump(2) + "\n");

        std::vector<std::string> argv{"solve", "--method", cfg.method, "--mc-n",
                                      std::to_string(opt.mc_samples)};
        const auto rest = detail_cli::instance_argv(cfg, cfg.gamma_db.value_or(11.0));
        argv.insert(argv.end(), rest.begin(), rest.end());
        write_file(outpath("manifest.json"),
                   make_manifest("solve", argv, cfg.seed, wall()).dump(2) + "\n");
        std::cout << "status: " << to_string(res.solver_status)
                  << (res.feasible ? " (feasible)" : " (infeasible)") << "\n";
        if (res.feasible)
            std::cout << "total power: " << fmt_double(res.objective)
                      << "  min p-hat: " << fmt_double(res.report.min_p_hat) << "\n";
        return res.feasible ? 0 : 2;
    }

    if (cfg.subcommand == "validate") {
        const BeamformingInstance inst = load_instance(cfg.instance_path);
        std::ifstream in(cfg.beams_path);
        if (!in)
            throw std::runtime_error("cannot open " + cfg.beams_path);
        nlohmann::json bj;
        in >> bj;
        // accept either a beamformer file or a solution.json wrapping one
        if (bj.contains("beams") && bj["beams"].is_object())
            bj = bj["beams"];
        const BeamformerSet beams = beamformers_from_json(bj);
        const ValidationReport rep =
            validate_mc(beams, inst, cfg.mc_n.value_or(10000), cfg.seed);
        write_file(outpath("validation.json"), detail_cli::report_json(rep).dump(2) + "\n");
        std::cout << "min p-hat: " << fmt_double(rep.min_p_hat)
                  << (rep.all_pass ? " (all users pass)" : " (some user fails)") << "\n";
        return 0;
    }

    if (cfg.subcommand == "experiment") {
        const bool bisect_preset = cfg.preset == "fig5";
        const ExperimentConfig ec = detail_cli::experiment_config(cfg);
        const auto argv = detail_cli::experiment_argv(ec, cfg, bisect_preset);

        if (bisect_preset) {
            // nominal versus bisection-refined power per method and trial
            std::string csv =
                "method,trial,nominal_power,refined_power,knob,refined_pass\n";
            for (size_t mi = 0; mi < ec.methods.size(); ++mi) {
                std::vector<std::string> rows(ec.trials);
                parallel_for(ec.trials, ec.threads, [&](int trial) {
                    const BeamformingInstance inst =
                        ec.make_instance(trial, ec.pickup_gamma_db);
                    PipelineOptions opt;
                    opt.solver = ec.solver;
                    opt.seed = derive_seed(ec.seed, 0x666967ull, mi, trial);
                    opt.randomization_rounds = ec.randomization_rounds;
                    const BisectionResult br = bisection_refine(
                        inst, ec.methods[mi], ec.final_mc_samples, ec.bisect_iters, opt);
                    if (!br.nominal.feasible) {
                        rows[trial] = "";
                        return;
                    }
                    rows[trial] = std::string(to_string(ec.methods[mi].method)) + "," +
                                  std::to_string(trial) + "," +
                                  fmt_double(br.nominal.objective) + "," +
                                  fmt_double(br.refined.objective) + "," +
                                  fmt_double(br.knob) + "," +
                                  (br.warning_nominal_fails ? "0" : "1") + "\n";
                });
                for (const auto& r : rows)
                    csv += r;
            }
            write_file(outpath("bisect.csv"), csv);
            write_file(outpath("manifest.json"),
                       make_manifest("experiment", argv, ec.seed, wall()).dump(2) + "\n");
            return 0;
        }

        const GridResults grid = run_grid(ec);
        const SweepTable feas = feasibility_table(ec, grid);
        const SweepTable power = power_table(ec, grid);
        const HistogramTable hist = histogram_table(ec, grid);
        write_file(outpath("feasibility.csv"), csv_sweep(feas));
        write_file(outpath("power.csv"), csv_sweep(power));
        write_file(outpath("histogram.csv"), csv_histogram(hist));
        for (size_t mi = 0; mi < ec.methods.size(); ++mi)
            write_file(outpath("validation_" + std::string(to_string(ec.methods[mi].method)) +
                               ".csv"),
                       csv_validation(ec, grid, static_cast<int>(mi)));
        if (cfg.plot) {
            write_file(outpath("feasibility.svg"),
                       svg_sweep(feas, "Feasibility rate", "rate"));
            write_file(outpath("power.svg"),
                       svg_sweep(power, "Average total power (common-feasible)", "power"));
            write_file(outpath("histogram.svg"),
                       svg_histogram(hist, "Min-user SINR satisfaction probability"));
        }
        write_file(outpath("manifest.json"),
                   make_manifest("experiment", argv, ec.seed, wall()).dump(2) + "\n");
        std::cout << "experiment complete: " << ec.methods.size() << " methods x "
                  << ec.gamma_grid_db.size() << " gammas x " << ec.trials << " trials\n";
        return 0;
    }

    if (cfg.subcommand == "bisect") {
        const BeamformingInstance inst =
            detail_cli::make_or_load_instance(cfg, cfg.gamma_db.value_or(11.0));
        if (cfg.instance_path.empty())
            save_instance(inst, outpath("instance.json"));
        PipelineOptions opt;
        opt.solver = detail_cli::solver_options(cfg);
        opt.seed = cfg.seed;
        opt.randomization_rounds = cfg.rand_rounds;
        const MethodSelector sel = method_from_name(cfg.method);
        const BisectionResult br =
            bisection_refine(inst, sel, cfg.mc_n.value_or(10000), cfg.bisect_iters, opt);

        nlohmann::json j;
        j["method"] = to_string(sel.method);
        j["nominal_feasible"] = br.nominal.feasible;
        j["warning_nominal_fails"] = br.warning_nominal_fails;
        j["hit_lower_bound"] = br.hit_lower_bound;
        j["knob"] = br.knob;
        j["evaluations"] = br.evaluations;
        if (br.nominal.feasible) {
            j["nominal_power"] = br.nominal.objective;
            j["refined_power"] = br.refined.objective;
            j["refined_validation"] = detail_cli::report_json(br.refined.report);
            write_file(outpath("beams.json"),
                       beamformers_to_json(br.refined.beams).dump(2) + "\n");
        }
        write_file(outpath("bisect.json"), j.dump(2) + "\n");
        std::vector<std::string> argv{"bisect", "--method", cfg.method,
                                      "--iters", std::to_string(cfg.bisect_iters),
                                      "--mc-n",  std::to_string(cfg.mc_n.value_or(10000))};
        const auto rest = detail_cli::instance_argv(cfg, cfg.gamma_db.value_or(11.0));
        argv.insert(argv.end(), rest.begin(), rest.end());
        write_file(outpath("manifest.json"),
                   make_manifest("bisect", argv, cfg.seed, wall()).dump(2) + "\n");
        std::cout << (br.nominal.feasible
                          ? "refined power: " + fmt_double(br.refined.objective)
                          : std::string("nominal design infeasible"))
                  << "\n";
        return br.nominal.feasible ? 0 : 2;
    }

    if (cfg.subcommand == "bench") {
        ExperimentConfig ec;
        ec.nt = cfg.nt.value_or(3);
        ec.k = cfg.k.value_or(3);
        ec.rho = cfg.rho.value_or(0.1);
        ec.sigma_e2 = cfg.sigma_e2.value_or(0.002);
        ec.correlation = cfg.correlation.value_or(0.0);
        ec.sigma2 = cfg.sigma2.value_or(0.1);
        ec.gamma_grid_db = {cfg.gamma_db.value_or(5.0)};
        ec.pickup_gamma_db = ec.gamma_grid_db.front();
        ec.seed = cfg.seed;
        ec.solver = detail_cli::solver_options(cfg);
        if (cfg.methods) {
            ec.methods.clear();
            for (const auto& name : *cfg.methods)
                ec.methods.push_back(method_from_name(name));
        } else {
            ec.methods = {MethodSelector::sphere(), MethodSelector::bernstein(),
                          MethodSelector::decomp_gaussian()};
        }
        std::vector<std::pair<int, int>> sizes;
        std::string token;
        for (char c : cfg.sizes + ",") {
            if (c == ',') {
                if (!token.empty()) {
                    const auto x = token.find('x');
                    if (x == std::string::npos)
                        throw std::invalid_argument("bad --sizes entry '" + token + "'");
                    sizes.push_back({std::stoi(token.substr(0, x)),
                                     std::stoi(token.substr(x + 1))});
                    token.clear();
                }
            } else {
                token += c;
            }
        }
        const auto rows = bench_runtime(ec, sizes, cfg.reps);
        write_file(outpath("bench.csv"), csv_bench(rows));
        for (const auto& r : rows)
            std::cout << r.method << " " << r.nt << "x" << r.k
                      << " median " << fmt_double(r.median_seconds) << "s\n";
        std::vector<std::string> argv{"bench", "--sizes", cfg.sizes};
        write_file(outpath("manifest.json"),
                   make_manifest("bench", argv, cfg.seed, wall()).dump(2) + "\n");
        return 0;
    }

    throw std::invalid_argument("unknown subcommand '" + cfg.subcommand + "'");
}

inline int cli_main(int argc, char** argv) {
    CliConfig cfg;
    auto app = detail_cli::build_app(cfg);
    try {
        app->parse(argc, argv);
        detail_cli::finalize_config(*app, cfg);
        return run_cli(cfg);
    } catch (const CLI::ParseError& e) {
        return app->exit(e);  // standard usage/help rendering; nonzero on errors
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace robeam

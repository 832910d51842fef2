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
// Monte Carlo outage validation, the full solve/recover/validate pipeline,
// bisection refinement of a method's conservatism knob, and the experiment
// protocols (feasibility sweeps, power sweeps, satisfaction histograms,
// runtime benchmarks).  Trials are embarrassingly parallel with per-cell
// seeded streams, so results do not depend on scheduling.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "robeam/model.hpp"
#include "robeam/recovery.hpp"
#include "robeam/restriction.hpp"
#include "robeam/rng.hpp"
#include "robeam/solver.hpp"

namespace robeam {

// ---------------------------------------------------------------------------
// Monte Carlo validation
// ---------------------------------------------------------------------------

struct ValidationReport {
    std::vector<double> p_hat;   // empirical SINR satisfaction per user
    std::vector<double> radius;  // 3 sqrt(p(1-p)/N)
    std::vector<bool> pass;      // p_hat >= 1 - rho - radius
    int samples = 0;
    double min_p_hat = 0.0;
    bool all_pass = false;

    /// strict point-estimate rule used by the bisection scheme
    bool strict_pass(const std::vector<double>& rho) const {
        for (size_t i = 0; i < p_hat.size(); ++i)
            if (p_hat[i] < 1.0 - rho[i])
                return false;
        return true;
    }
};

/// Empirical Prob{SINR_i >= gamma_i} under the instance error model, N error
/// draws per user; deterministic given the seed.
inline ValidationReport validate_mc(const BeamformerSet& w, const BeamformingInstance& inst,
                                    int samples, std::uint64_t seed) {
    if (samples < 1)
        throw std::invalid_argument("validate_mc: need at least one sample");
    inst.validate();
    ErrorSampler sampler(inst.error_model, inst.nt);
    ValidationReport rep;
    rep.samples = samples;
    rep.p_hat.resize(inst.k);
    rep.radius.resize(inst.k);
    rep.pass.resize(inst.k);
    rep.all_pass = true;
    rep.min_p_hat = 1.0;
    for (int i = 0; i < inst.k; ++i) {
        RngStream rs(seed, {0x76616cull /*val*/, static_cast<std::uint64_t>(i)});
        const double gamma = inst.gamma(i);
        int ok = 0;
        CVec h(inst.nt);
        for (int it = 0; it < samples; ++it) {
            const CVec e = sampler.draw(i, rs);
            for (int j = 0; j < inst.nt; ++j)
                h[j] = inst.channels[i][j] + e[j];
            if (sinr(w, h, inst.noise_powers[i], i) >= gamma)
                ++ok;
        }
        const double p = static_cast<double>(ok) / samples;
        rep.p_hat[i] = p;
        rep.radius[i] = 3.0 * std::sqrt(p * (1.0 - p) / samples);
        rep.pass[i] = p >= 1.0 - inst.rho[i] - rep.radius[i];
        rep.all_pass = rep.all_pass && rep.pass[i];
        rep.min_p_hat = std::min(rep.min_p_hat, p);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Solve -> recover -> validate pipeline
// ---------------------------------------------------------------------------

struct PipelineOptions {
    SolverOptions solver;
    int mc_samples = 10000;
    std::uint64_t seed = 1;
    int randomization_rounds = 100;  // Algorithm-1 rounds when not rank-one
    double rank_threshold = 0.99;
    bool validate = true;

    PipelineOptions() {
        solver.tol = 1e-6;  // experiment-scale default
        solver.max_iters = 50000;
    }
};

struct PipelineResult {
    bool feasible = false;  // RAR feasible and beam generation succeeded
    SolverStatus solver_status = SolverStatus::NumericalFailure;
    std::string failure_stage;  // "solve" | "recovery" | "" on success
    RarSolution rar;
    bool rank_one = false;
    bool used_randomization = false;
    BeamformerSet beams;
    double objective = std::numeric_limits<double>::infinity();  // realized total power
    ValidationReport report;  // filled when feasible and validation requested
    double t_solve = 0.0, t_recover = 0.0, t_validate = 0.0;
};

inline PipelineResult run_pipeline(const BeamformingInstance& inst, const MethodSelector& sel,
                                   const PipelineOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    PipelineResult out;

    auto t0 = clock::now();
    SdrProgram sp = build_sdr(inst);
    add_method(sp, sel);
    out.rar = solve_rar(sp, opt.solver);
    out.solver_status = out.rar.status;
    out.t_solve = std::chrono::duration<double>(clock::now() - t0).count();
    if (out.rar.status != SolverStatus::Optimal) {
        out.failure_stage = "solve";
        return out;
    }

    t0 = clock::now();
    out.rank_one = rank_one_check(out.rar, opt.rank_threshold);
    if (out.rank_one) {
        out.beams = extract_beamformers(out.rar, opt.rank_threshold);
        out.objective = out.beams.total_power();
        out.feasible = true;
    } else {
        const RandomizationResult rr = gaussian_randomization(
            out.rar, inst, sel, opt.randomization_rounds, opt.seed, opt.solver);
        out.used_randomization = true;
        if (rr.feasible) {
            out.beams = rr.beams;
            out.objective = rr.objective;
            out.feasible = true;
        } else {
            out.failure_stage = "recovery";
        }
    }
    out.t_recover = std::chrono::duration<double>(clock::now() - t0).count();
    if (!out.feasible)
        return out;

    if (opt.validate) {
        t0 = clock::now();
        out.report = validate_mc(out.beams, inst, opt.mc_samples, opt.seed);
        out.t_validate = std::chrono::duration<double>(clock::now() - t0).count();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bisection refinement of the conservatism knob
// ---------------------------------------------------------------------------

struct BisectionResult {
    PipelineResult refined;   // never fails validation unless warning is set
    PipelineResult nominal;
    double knob = 1.0;        // fraction of nominal conservatism kept (1 = nominal)
    bool improved = false;
    bool warning_nominal_fails = false;  // nominal design itself failed validation
    bool hit_lower_bound = false;
    int evaluations = 0;
};

/// Shrinks the method's knob (sphere radius d, or effective rho for the
/// probability-inequality methods) by bisection over [knob_min, 1] while the
/// Monte Carlo point estimate still meets the nominal outage spec for every
/// user.  Never returns a design that fails validation; never worsens the
/// objective beyond 1e-9.
inline BisectionResult bisection_refine(const BeamformingInstance& inst,
                                        const MethodSelector& sel, int validation_samples,
                                        int iters, const PipelineOptions& base_opts = {},
                                        double knob_min = 1e-3) {
    if (sel.method == Method::NonRobust)
        throw std::invalid_argument("bisection_refine: non-robust design has no knob");
    if (iters < 0)
        throw std::invalid_argument("bisection_refine: iteration count must be >= 0");

    // knob in (0,1]: 1 reproduces the nominal method, smaller is looser.
    // Sphere: d(theta) = theta * d_nominal.  Others: effective rho moves from
    // nominal toward 1 geometrically, rho(theta) = rho_nom^theta * rho_hi^(1-theta).
    const double rho_hi = 0.999;
    auto make_selector = [&](double theta) {
        MethodSelector s = sel;
        if (sel.method == Method::SphereBounding) {
            const double d_nom =
                sel.d_override ? *sel.d_override : sphere_radius(inst.nt, inst.rho[0]);
            s.d_override = std::max(theta * d_nom, 1e-12);
        } else {
            const double rho_nom = sel.rho_override ? *sel.rho_override : inst.rho[0];
            s.rho_override = std::exp(theta * std::log(rho_nom) + (1.0 - theta) * std::log(rho_hi));
        }
        return s;
    };

    PipelineOptions opts = base_opts;
    opts.mc_samples = validation_samples;

    BisectionResult out;
    out.nominal = run_pipeline(inst, sel, opts);
    ++out.evaluations;
    out.refined = out.nominal;
    if (!out.nominal.feasible || !out.nominal.report.strict_pass(inst.rho)) {
        out.warning_nominal_fails = true;
        return out;
    }

    double lo = knob_min, hi = 1.0;
    bool any_failed = false;
    for (int it = 0; it < iters; ++it) {
        const double mid = 0.5 * (lo + hi);
        PipelineOptions step = opts;
        step.seed = derive_seed(opts.seed, 0x626973ull /*bis*/, static_cast<std::uint64_t>(it));
        PipelineResult cand = run_pipeline(inst, make_selector(mid), step);
        ++out.evaluations;
        if (cand.feasible && cand.report.strict_pass(inst.rho)) {
            if (cand.objective <= out.refined.objective * (1.0 + 1e-9) + 1e-12) {
                out.refined = cand;
                out.knob = mid;
            }
            hi = mid;
        } else {
            lo = mid;
            any_failed = true;
        }
    }
    // every probe passed: the search ran into its lower bound, not a
    // validation boundary
    out.hit_lower_bound = iters > 0 && !any_failed;
    // the refined design is never allowed to be worse than nominal
    if (out.refined.objective > out.nominal.objective + 1e-9) {
        out.refined = out.nominal;
        out.knob = 1.0;
    }
    out.improved = out.refined.objective < out.nominal.objective - 1e-12;
    return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration and grid runner
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    int nt = 3;
    int k = 3;
    std::vector<double> gamma_grid_db = {3.0, 7.0, 11.0, 15.0};
    double pickup_gamma_db = 11.0;  // common-feasible pick-up point
    double rho = 0.1;
    double sigma2 = 0.1;
    std::string error_type = "gaussian";  // gaussian | uniform
    double sigma_e2 = 0.002;
    double correlation = 0.0;
    double epsilon = 0.02;
    std::vector<MethodSelector> methods = {MethodSelector::sphere(), MethodSelector::bernstein(),
                                           MethodSelector::decomp_gaussian(),
                                           MethodSelector::nonrobust()};
    int trials = 100;
    int mc_samples = 5000;         // sweep-time validation
    int final_mc_samples = 10000;  // final/pick-up validation
    std::uint64_t seed = 1;
    int randomization_rounds = 100;
    SolverOptions solver = [] {
        SolverOptions s;
        s.tol = 1e-6;
        return s;
    }();
    int threads = 0;  // 0 = hardware concurrency
    double hist_bin_width = 0.05;
    int bisect_iters = 6;

    void validate() const {
        if (nt < 1 || k < 1)
            throw std::invalid_argument("ExperimentConfig: need nt >= 1 and k >= 1");
        if (gamma_grid_db.empty())
            throw std::invalid_argument("ExperimentConfig: gamma grid must be nonempty");
        if (methods.empty())
            throw std::invalid_argument("ExperimentConfig: method list must be nonempty");
        if (trials < 1 || mc_samples < 1 || final_mc_samples < 1)
            throw std::invalid_argument("ExperimentConfig: counts must be >= 1");
        if (!(hist_bin_width > 0.0 && hist_bin_width < 1.0))
            throw std::invalid_argument("ExperimentConfig: bin width must lie in (0,1)");
        if (error_type != "gaussian" && error_type != "uniform")
            throw std::invalid_argument("ExperimentConfig: unknown error type");
    }

    BeamformingInstance make_instance(int trial, double gamma_db) const {
        BeamformingInstance inst;
        inst.nt = nt;
        inst.k = k;
        inst.channels = generate_channels(nt, k, derive_seed(seed, 0x6368ull /*ch*/, trial));
        inst.noise_powers.assign(k, sigma2);
        inst.gamma_db.assign(k, gamma_db);
        inst.rho.assign(k, rho);
        inst.error_model = error_type == "uniform"
                               ? ErrorModel::uniform_iid(epsilon, k)
                               : (correlation == 0.0
                                      ? ErrorModel::gaussian_iid(sigma_e2, nt, k)
                                      : ErrorModel::gaussian_correlated(sigma_e2, correlation,
                                                                        nt, k));
        return inst;
    }
};

/// Runs fn(0..n-1) on up to `threads` workers; each index owns its output
/// slot, so results are identical to the sequential order.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0)
        threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += threads)
                    fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

/// One grid cell: a (method, gamma, trial) pipeline outcome.
struct TrialCell {
    bool feasible = false;
    SolverStatus status = SolverStatus::NumericalFailure;
    double objective = std::numeric_limits<double>::infinity();
    double min_p_hat = 0.0;
    bool validated = false;
    bool all_users_pass = false;  // p_hat_i >= 1 - rho_i (point estimate)
    bool rank_one = false;
    double solve_seconds = 0.0;
    std::vector<double> p_hat;
};

/// cells[method][gamma][trial]
struct GridResults {
    std::vector<std::vector<std::vector<TrialCell>>> cells;
};

/// Full (method x gamma x trial) sweep; validation at final_mc_samples is run
/// only for pick-up-gamma cells unless validate_all is set.
inline GridResults run_grid(const ExperimentConfig& cfg, bool validate_all = false) {
    cfg.validate();
    const int nm = static_cast<int>(cfg.methods.size());
    const int ng = static_cast<int>(cfg.gamma_grid_db.size());
    GridResults grid;
    grid.cells.assign(nm, std::vector<std::vector<TrialCell>>(
                              ng, std::vector<TrialCell>(cfg.trials)));

    const int jobs = nm * ng * cfg.trials;
    parallel_for(jobs, cfg.threads, [&](int job) {
        const int trial = job % cfg.trials;
        const int gi = (job / cfg.trials) % ng;
        const int mi = job / (cfg.trials * ng);
        const double gamma_db = cfg.gamma_grid_db[gi];
        const bool at_pickup = gamma_db == cfg.pickup_gamma_db;

        const BeamformingInstance inst = cfg.make_instance(trial, gamma_db);
        PipelineOptions opt;
        opt.solver = cfg.solver;
        opt.randomization_rounds = cfg.randomization_rounds;
        opt.seed = derive_seed(cfg.seed, 0x63656cull /*cel*/, mi, gi * 1000003ull + trial);
        opt.validate = validate_all || at_pickup;
        opt.mc_samples = at_pickup ? cfg.final_mc_samples : cfg.mc_samples;

        const PipelineResult res = run_pipeline(inst, cfg.methods[mi], opt);
        TrialCell& cell = grid.cells[mi][gi][trial];
        cell.feasible = res.feasible;
        cell.status = res.solver_status;
        cell.objective = res.objective;
        cell.rank_one = res.rank_one;
        cell.solve_seconds = res.t_solve;
        if (res.feasible && opt.validate) {
            cell.validated = true;
            cell.min_p_hat = res.report.min_p_hat;
            cell.all_users_pass = res.report.strict_pass(inst.rho);
            cell.p_hat = res.report.p_hat;
        }
    });
    return grid;
}

// ---------------------------------------------------------------------------
// Tables derived from a grid
// ---------------------------------------------------------------------------

struct SweepCell {
    std::string method;
    double gamma_db = 0.0;
    double value = 0.0;
    int n_trials = 0;
};

struct SweepTable {
    std::vector<SweepCell> rows;
};

inline SweepTable feasibility_table(const ExperimentConfig& cfg, const GridResults& grid) {
    SweepTable t;
    for (size_t mi = 0; mi < cfg.methods.size(); ++mi)
        for (size_t gi = 0; gi < cfg.gamma_grid_db.size(); ++gi) {
            int feas = 0;
            for (const auto& cell : grid.cells[mi][gi])
                feas += cell.feasible ? 1 : 0;
            t.rows.push_back({to_string(cfg.methods[mi].method), cfg.gamma_grid_db[gi],
                              static_cast<double>(feas) / cfg.trials, cfg.trials});
        }
    return t;
}

/// Trials where every method produced a feasible design at the pick-up gamma.
inline std::vector<int> common_feasible_trials(const ExperimentConfig& cfg,
                                               const GridResults& grid) {
    int pickup = -1;
    for (size_t gi = 0; gi < cfg.gamma_grid_db.size(); ++gi)
        if (cfg.gamma_grid_db[gi] == cfg.pickup_gamma_db)
            pickup = static_cast<int>(gi);
    if (pickup < 0)
        throw std::invalid_argument("common_feasible_trials: pick-up gamma not on the grid");
    std::vector<int> trials;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        bool all = true;
        for (size_t mi = 0; mi < cfg.methods.size() && all; ++mi)
            all = grid.cells[mi][pickup][trial].feasible;
        if (all)
            trials.push_back(trial);
    }
    return trials;
}

/// Average total power per (method, gamma) over the common-feasible trial
/// set; cells where a common trial is infeasible at another gamma are skipped
/// and the per-cell count reported.
inline SweepTable power_table(const ExperimentConfig& cfg, const GridResults& grid) {
    const std::vector<int> common = common_feasible_trials(cfg, grid);
    SweepTable t;
    for (size_t mi = 0; mi < cfg.methods.size(); ++mi)
        for (size_t gi = 0; gi < cfg.gamma_grid_db.size(); ++gi) {
            double sum = 0.0;
            int count = 0;
            for (int trial : common)
                if (grid.cells[mi][gi][trial].feasible) {
                    sum += grid.cells[mi][gi][trial].objective;
                    ++count;
                }
            t.rows.push_back({to_string(cfg.methods[mi].method), cfg.gamma_grid_db[gi],
                              count > 0 ? sum / count
                                        : std::numeric_limits<double>::quiet_NaN(),
                              count});
        }
    return t;
}

struct HistogramRow {
    std::string method;
    double bin_lo = 0.0, bin_hi = 0.0;
    int count = 0;
};

struct HistogramTable {
    std::vector<HistogramRow> rows;
};

/// Histogram of min-across-users satisfaction probability per feasible trial
/// at the pick-up gamma.
inline HistogramTable histogram_table(const ExperimentConfig& cfg, const GridResults& grid) {
    int pickup = -1;
    for (size_t gi = 0; gi < cfg.gamma_grid_db.size(); ++gi)
        if (cfg.gamma_grid_db[gi] == cfg.pickup_gamma_db)
            pickup = static_cast<int>(gi);
    if (pickup < 0)
        throw std::invalid_argument("histogram_table: pick-up gamma not on the grid");
    const int nbins = static_cast<int>(std::ceil(1.0 / cfg.hist_bin_width));
    HistogramTable t;
    for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        std::vector<int> counts(nbins, 0);
        for (const auto& cell : grid.cells[mi][pickup])
            if (cell.feasible && cell.validated) {
                int bin = static_cast<int>(cell.min_p_hat / cfg.hist_bin_width);
                bin = std::min(bin, nbins - 1);
                ++counts[bin];
            }
        for (int b = 0; b < nbins; ++b)
            t.rows.push_back({to_string(cfg.methods[mi].method), b * cfg.hist_bin_width,
                              std::min((b + 1) * cfg.hist_bin_width, 1.0), counts[b]});
    }
    return t;
}

// spec-named convenience wrappers (each runs its own grid)

inline SweepTable feasibility_sweep(const ExperimentConfig& cfg) {
    return feasibility_table(cfg, run_grid(cfg));
}

inline SweepTable power_sweep(const ExperimentConfig& cfg) {
    return power_table(cfg, run_grid(cfg));
}

inline HistogramTable histogram_satisfaction(const ExperimentConfig& cfg) {
    return histogram_table(cfg, run_grid(cfg, true));
}

// ---------------------------------------------------------------------------
// Runtime benchmark
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string method;
    int nt = 0, k = 0;
    double median_seconds = 0.0;
    double iqr_lo = 0.0, iqr_hi = 0.0;
    int reps = 0;
    long cone_rows = 0;  // structural size of the built program
};

/// Median and IQR of solve wall time per (method, size); at least one warm-up
/// solve per method/size is excluded from the statistics.
inline std::vector<BenchRow> bench_runtime(const ExperimentConfig& cfg,
                                           const std::vector<std::pair<int, int>>& sizes,
                                           int reps) {
    cfg.validate();
    if (reps < 1)
        throw std::invalid_argument("bench_runtime: need reps >= 1");
    std::vector<BenchRow> out;
    for (const auto& [nt, k] : sizes) {
        ExperimentConfig c = cfg;
        c.nt = nt;
        c.k = k;
        for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            std::vector<double> times;
            long rows = 0;
            for (int rep = -1; rep < reps; ++rep) {
                const BeamformingInstance inst =
                    c.make_instance(std::max(rep, 0), c.gamma_grid_db.front());
                SdrProgram sp = build_sdr(inst);
                add_method(sp, cfg.methods[mi]);
                rows = sp.prog.rows();
                const auto t0 = std::chrono::steady_clock::now();
                (void)solve(sp.prog, cfg.solver);
                const double dt =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
                if (rep >= 0)
                    times.push_back(dt);  // rep -1 is the excluded warm-up
            }
            std::sort(times.begin(), times.end());
            const auto quys = [&](double q) {
                const double pos = q * (times.size() - 1);
                const size_t lo = static_cast<size_t>(pos);
                const size_t hi = std::min(lo + 1, times.size() - 1);
                return times[lo] + (pos - lo) * (times[hi] - times[lo]);
            };
            out.push_back({to_string(cfg.methods[mi].method), nt, k, quys(0.5), quys(0.25),
                           quys(0.75), reps, rows});
        }
    }
    return out;
}

}  // namespace robeam

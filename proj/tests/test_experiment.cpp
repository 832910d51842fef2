#include <gtest/gtest.h>

#include <cmath>

#include "robeam/experiment.hpp"
#include "robeam/io.hpp"

using namespace robeam;

namespace {

BeamformingInstance basic_instance(int nt, int k, double gamma_db, double rho, double sigma_e2,
                                   std::uint64_t seed) {
    BeamformingInstance inst;
    inst.nt = nt;
    inst.k = k;
    inst.channels = generate_channels(nt, k, seed);
    inst.noise_powers.assign(k, 0.1);
    inst.gamma_db.assign(k, gamma_db);
    inst.rho.assign(k, rho);
    inst.error_model = ErrorModel::gaussian_iid(sigma_e2, nt, k);
    return inst;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.nt = 3;
    cfg.k = 3;
    cfg.trials = 16;
    cfg.gamma_grid_db = {3.0, 15.0};
    cfg.pickup_gamma_db = 3.0;
    cfg.methods = {MethodSelector::bernstein(), MethodSelector::nonrobust()};
    cfg.mc_samples = 1000;
    cfg.final_mc_samples = 2000;
    cfg.seed = 11;
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST(ValidateMc, DeterministicErrorFreeCases) {
    // zero covariance: outcome decided by the nominal SINR alone
    auto inst = basic_instance(2, 1, 0.0, 0.1, 0.0, 3);
    inst.channels = {{cplx{1.0, 0.0}, cplx{}}};
    BeamformerSet good;
    good.w = {{cplx{1.0, 0.0}, cplx{}}};  // SINR = 10 > gamma = 1
    const auto rep1 = validate_mc(good, inst, 500, 1);
    EXPECT_EQ(rep1.p_hat[0], 1.0);
    EXPECT_TRUE(rep1.all_pass);

    BeamformerSet weak;
    weak.w = {{cplx{0.1, 0.0}, cplx{}}};  // SINR = 0.1 < 1
    const auto rep2 = validate_mc(weak, inst, 500, 1);
    EXPECT_EQ(rep2.p_hat[0], 0.0);
    EXPECT_FALSE(rep2.all_pass);
}

TEST(ValidateMc, BoundaryGivesHalf) {
    // gamma pinned at the nominal SINR: the dominant linear error term is
    // symmetric, so p-hat sits near 1/2
    BeamformingInstance inst;
    inst.nt = 1;
    inst.k = 1;
    inst.channels = {{cplx{1.0, 0.0}}};
    inst.noise_powers = {0.1};
    inst.gamma_db = {10.0};  // nominal SINR = 1/0.1 = 10 = 10 dB exactly
    inst.rho = {0.5};
    inst.error_model = ErrorModel::gaussian_iid(1e-6, 1, 1);
    BeamformerSet w;
    w.w = {{cplx{1.0, 0.0}}};
    const auto rep = validate_mc(w, inst, 10000, 7);
    EXPECT_NEAR(rep.p_hat[0], 0.5, 0.05);
}

TEST(ValidateMc, Reproducible) {
    auto inst = basic_instance(3, 2, 5.0, 0.1, 0.01, 5);
    BeamformerSet w;
    RngStream rs(2, {0});
    w.w = {rs.cgaussian_vector(3), rs.cgaussian_vector(3)};
    const auto a = validate_mc(w, inst, 3000, 42);
    const auto b = validate_mc(w, inst, 3000, 42);
    EXPECT_EQ(a.p_hat, b.p_hat);
}

TEST(RunPipeline, ZeroCovarianceCollapsesToNonRobust) {
    auto inst = basic_instance(3, 3, 9.0, 0.1, 0.0, 17);
    PipelineOptions opt;
    opt.validate = false;
    const auto robust = run_pipeline(inst, MethodSelector::sphere(), opt);
    const auto plain = run_pipeline(inst, MethodSelector::nonrobust(), opt);
    ASSERT_TRUE(robust.feasible);
    ASSERT_TRUE(plain.feasible);
    EXPECT_NEAR(robust.objective, plain.objective, 1e-5 * plain.objective);
}

TEST(RunPipeline, ExtremeTargetInfeasible) {
    auto inst = basic_instance(2, 2, 60.0, 0.1, 0.1, 19);
    PipelineOptions opt;
    opt.validate = false;
    const auto res = run_pipeline(inst, MethodSelector::bernstein(), opt);
    EXPECT_FALSE(res.feasible);
    EXPECT_EQ(res.failure_stage, "solve");
    EXPECT_EQ(res.solver_status, SolverStatus::PrimalInfeasible);
}

TEST(RunPipeline, DeterministicTuple) {
    auto inst = basic_instance(3, 3, 7.0, 0.1, 0.002, 23);
    PipelineOptions opt;
    opt.mc_samples = 2000;
    const auto a = run_pipeline(inst, MethodSelector::bernstein(), opt);
    const auto b = run_pipeline(inst, MethodSelector::bernstein(), opt);
    ASSERT_EQ(a.feasible, b.feasible);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.report.p_hat, b.report.p_hat);
}

TEST(BisectionRefine, ZeroItersReturnsNominal) {
    auto inst = basic_instance(3, 3, 7.0, 0.1, 0.002, 29);
    PipelineOptions opt;
    const auto br = bisection_refine(inst, MethodSelector::sphere(), 2000, 0, opt);
    ASSERT_TRUE(br.nominal.feasible);
    EXPECT_EQ(br.refined.objective, br.nominal.objective);
    EXPECT_EQ(br.knob, 1.0);
    EXPECT_FALSE(br.improved);
}

TEST(BisectionRefine, ImprovesConservativeDesign) {
    auto inst = basic_instance(3, 3, 7.0, 0.1, 0.002, 31);
    PipelineOptions opt;
    const auto br = bisection_refine(inst, MethodSelector::sphere(), 5000, 6, opt);
    ASSERT_TRUE(br.nominal.feasible);
    ASSERT_FALSE(br.warning_nominal_fails);
    EXPECT_LE(br.refined.objective, br.nominal.objective + 1e-9);
    EXPECT_TRUE(br.improved);
    EXPECT_TRUE(br.refined.report.strict_pass(inst.rho));
}

TEST(BisectionRefine, LaxSpecHitsLowerBound) {
    // a very lax outage cap validates at every knob, so the search runs to
    // its floor and reports exhaustion
    auto inst = basic_instance(3, 3, 5.0, 0.95, 0.002, 37);
    PipelineOptions opt;
    opt.mc_samples = 500;
    const auto br = bisection_refine(inst, MethodSelector::sphere(), 500, 5, opt);
    ASSERT_TRUE(br.nominal.feasible);
    EXPECT_TRUE(br.hit_lower_bound);
}

TEST(BisectionRefine, WarnsWhenNominalFailsValidation) {
    // a deliberately loosened design (effective rho far above nominal) fails
    // the strict nominal-rho validation
    auto inst = basic_instance(3, 3, 11.0, 0.01, 0.01, 41);
    const MethodSelector loose = MethodSelector::bernstein(0.9);
    PipelineOptions opt;
    opt.mc_samples = 4000;
    const auto br = bisection_refine(inst, loose, 4000, 3, opt);
    if (br.nominal.feasible)
        EXPECT_TRUE(br.warning_nominal_fails);
}

TEST(BisectionRefine, RejectsNonRobust) {
    auto inst = basic_instance(3, 3, 7.0, 0.1, 0.002, 43);
    EXPECT_THROW(bisection_refine(inst, MethodSelector::nonrobust(), 100, 1),
                 std::invalid_argument);
}

TEST(Grid, FeasibilityMonotoneAndTablesConsistent) {
    const auto cfg = small_config();
    const auto grid = run_grid(cfg);
    const auto feas = feasibility_table(cfg, grid);
    ASSERT_EQ(feas.rows.size(), 4u);  // 2 methods x 2 gammas
    // non-increasing in gamma with statistical slack
    double bern3 = -1, bern15 = -1;
    for (const auto& r : feas.rows)
        if (r.method == "bernstein")
            (r.gamma_db == 3.0 ? bern3 : bern15) = r.value;
    EXPECT_GE(bern3 + 0.2, bern15);
    for (const auto& r : feas.rows) {
        EXPECT_GE(r.value, 0.0);
        EXPECT_LE(r.value, 1.0);
        EXPECT_EQ(r.n_trials, cfg.trials);
    }
}

TEST(Grid, PowerTableDominanceAndMonotonicity) {
    const auto cfg = small_config();
    const auto grid = run_grid(cfg);
    const auto common = common_feasible_trials(cfg, grid);
    ASSERT_FALSE(common.empty());
    // per common trial: nonrobust power <= robust power at the pick-up gamma
    for (int trial : common) {
        const double bern = grid.cells[0][0][trial].objective;
        const double plain = grid.cells[1][0][trial].objective;
        EXPECT_LE(plain, bern + 1e-6 * std::max(1.0, bern));
    }
    // per-trial power non-decreasing in gamma where both feasible
    for (int trial = 0; trial < cfg.trials; ++trial)
        for (int mi = 0; mi < 2; ++mi) {
            const auto& lo = grid.cells[mi][0][trial];
            const auto& hi = grid.cells[mi][1][trial];
            if (lo.feasible && hi.feasible)
                EXPECT_GE(hi.objective, lo.objective - 1e-6 * hi.objective);
        }
}

TEST(Grid, IdenticalMethodsIdenticalColumns) {
    auto cfg = small_config();
    cfg.methods = {MethodSelector::bernstein(), MethodSelector::bernstein()};
    cfg.trials = 8;
    const auto grid = run_grid(cfg);
    for (size_t gi = 0; gi < cfg.gamma_grid_db.size(); ++gi)
        for (int trial = 0; trial < cfg.trials; ++trial) {
            EXPECT_EQ(grid.cells[0][gi][trial].feasible, grid.cells[1][gi][trial].feasible);
            EXPECT_EQ(grid.cells[0][gi][trial].objective, grid.cells[1][gi][trial].objective);
        }
}

TEST(Grid, EmptyCommonSetMarked) {
    auto cfg = small_config();
    cfg.gamma_grid_db = {25.0};  // hard target: robust rarely feasible
    cfg.pickup_gamma_db = 25.0;
    cfg.trials = 4;
    const auto grid = run_grid(cfg);
    const auto power = power_table(cfg, grid);
    for (const auto& r : power.rows)
        if (r.n_trials == 0)
            EXPECT_TRUE(std::isnan(r.value));  // explicit empty marker
}

TEST(Grid, ZeroTrialsRejected) {
    auto cfg = small_config();
    cfg.trials = 0;
    EXPECT_THROW(run_grid(cfg), std::invalid_argument);
}

TEST(Histogram, DeterministicModelMassesAtOne) {
    // strictly feasible designs (built for a higher target) under zero error:
    // every validated trial sits exactly at p-hat = 1
    auto cfg = small_config();
    cfg.sigma_e2 = 0.0;
    cfg.gamma_grid_db = {7.0};
    cfg.pickup_gamma_db = 7.0;
    cfg.trials = 8;
    cfg.methods = {MethodSelector::nonrobust()};
    GridResults grid;
    grid.cells.assign(1, std::vector<std::vector<TrialCell>>(1, std::vector<TrialCell>(8)));
    for (int trial = 0; trial < 8; ++trial) {
        auto solve_inst = basic_instance(3, 3, 8.0, 0.1, 0.0, 1000 + trial);
        PipelineOptions opt;
        opt.validate = false;
        const auto res = run_pipeline(solve_inst, MethodSelector::nonrobust(), opt);
        TrialCell& cell = grid.cells[0][0][trial];
        cell.feasible = res.feasible;
        if (!res.feasible)
            continue;
        auto val_inst = solve_inst;
        val_inst.gamma_db.assign(3, 7.0);  // strict margin at validation time
        const auto rep = validate_mc(res.beams, val_inst, 400, 5);
        cell.validated = true;
        cell.min_p_hat = rep.min_p_hat;
    }
    const auto hist = histogram_table(cfg, grid);
    int top = 0, rest = 0;
    for (const auto& r : hist.rows)
        (r.bin_hi >= 1.0 ? top : rest) += r.count;
    EXPECT_GT(top, 0);
    EXPECT_EQ(rest, 0);
}

TEST(Bench, StructuralOrderingAndSizes) {
    ExperimentConfig cfg;
    cfg.methods = {MethodSelector::sphere(), MethodSelector::bernstein(),
                   MethodSelector::decomp_gaussian()};
    cfg.gamma_grid_db = {5.0};
    cfg.pickup_gamma_db = 5.0;
    const auto rows = bench_runtime(cfg, {{3, 3}}, 2);
    ASSERT_EQ(rows.size(), 3u);
    long rows_sphere = 0, rows_bern = 0, rows_dec = 0;
    for (const auto& r : rows) {
        EXPECT_GT(r.median_seconds, 0.0);
        EXPECT_LE(r.iqr_lo, r.median_seconds);
        EXPECT_GE(r.iqr_hi, r.median_seconds);
        if (r.method == "sphere")
            rows_sphere = r.cone_rows;
        if (r.method == "bernstein")
            rows_bern = r.cone_rows;
        if (r.method == "decomp")
            rows_dec = r.cone_rows;
    }
    // decomposition carries no LMI beyond the W blocks: fewest cone rows
    EXPECT_LT(rows_dec, rows_bern);
    // strictly more variables at larger sizes
    ExperimentConfig big = cfg;
    const auto rows8 = bench_runtime(big, {{8, 8}}, 1);
    EXPECT_GT(rows8.front().cone_rows, rows.front().cone_rows);
}

TEST(CsvWriters, SchemasAndReproducibility) {
    const auto cfg = small_config();
    const auto g1 = run_grid(cfg);
    const auto g2 = run_grid(cfg);
    const std::string f1 = csv_sweep(feasibility_table(cfg, g1));
    const std::string f2 = csv_sweep(feasibility_table(cfg, g2));
    EXPECT_EQ(f1, f2);  // bit-reproducible given (config, seed)
    EXPECT_EQ(f1.substr(0, f1.find('\n')), "method,gamma_db,value,n_trials");
    const std::string h = csv_histogram(histogram_table(cfg, g1));
    EXPECT_EQ(h.substr(0, h.find('\n')), "method,bin_lo,bin_hi,count");
    const std::string v = csv_validation(cfg, g1, 0);
    EXPECT_EQ(v.substr(0, v.find('\n')), "trial,user,p_hat,radius,pass");
}

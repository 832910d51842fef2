#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "robeam/conic.hpp"
#include "robeam/solver.hpp"
#include "test_support.hpp"

using namespace robeam;

namespace {

// min x  s.t.  x >= 1
ConicProgram lp_corner() {
    ConicProgram p;
    const int x = p.add_var("x", 1.0);
    const int row = p.add_block(ConeBlock::nonneg(1));
    // s = x - 1 >= 0
    LinComb e;
    e.constant = -1.0;
    e.add_term(x, 1.0);
    p.set_row_expr(row, e);
    return p;
}

// min t  s.t.  ||(3,4)|| <= t
ConicProgram soc_golden() {
    ConicProgram p;
    const int t = p.add_var("t", 1.0);
    const int row = p.add_block(ConeBlock::soc(3));
    LinComb head;
    head.add_term(t, 1.0);
    p.set_row_expr(row, head);
    LinComb z1, z2;
    z1.constant = 3.0;
    z2.constant = 4.0;
    p.set_row_expr(row + 1, z1);
    p.set_row_expr(row + 2, z2);
    return p;
}

// min tr X  s.t.  X >= I_2 (and X PSD)
ConicProgram psd_golden() {
    ConicProgram p;
    const int x11 = p.add_var("x11", 1.0);
    const int x21 = p.add_var("x21", 0.0);
    const int x22 = p.add_var("x22", 1.0);
    // X - I in PSD cone
    int row = p.add_block(ConeBlock::psd(2));
    LinComb e11, e21, e22;
    e11.add_term(x11, 1.0);
    e11.constant = -1.0;
    e21.add_term(x21, kSqrt2);
    e22.add_term(x22, 1.0);
    e22.constant = -1.0;
    p.set_row_expr(row, e11);
    p.set_row_expr(row + 1, e21);
    p.set_row_expr(row + 2, e22);
    // X itself PSD
    row = p.add_block(ConeBlock::psd(2));
    LinComb f11, f21, f22;
    f11.add_term(x11, 1.0);
    f21.add_term(x21, kSqrt2);
    f22.add_term(x22, 1.0);
    p.set_row_expr(row, f11);
    p.set_row_expr(row + 1, f21);
    p.set_row_expr(row + 2, f22);
    return p;
}

}  // namespace

TEST(ConicSolve, LpCorner) {
    const auto p = lp_corner();
    SolverOptions opts;
    opts.tol = 1e-8;
    const auto sol = solve(p, opts);
    ASSERT_EQ(sol.status, SolverStatus::Optimal);
    EXPECT_NEAR(sol.x[0], 1.0, 1e-6);
    EXPECT_NEAR(sol.objective, 1.0, 1e-6);
    const auto r = residuals(p, sol);
    EXPECT_LE(r.primal, 1e-7);
    EXPECT_LE(r.dual, 1e-7);
    EXPECT_LE(r.gap, 1e-7);
}

TEST(ConicSolve, SocGolden) {
    const auto p = soc_golden();
    SolverOptions opts;
    opts.tol = 1e-8;
    const auto sol = solve(p, opts);
    ASSERT_EQ(sol.status, SolverStatus::Optimal);
    EXPECT_NEAR(sol.x[0], 5.0, 1e-6);
    EXPECT_NEAR(sol.objective, 5.0, 1e-6);
}

TEST(ConicSolve, PsdGolden) {
    const auto p = psd_golden();
    SolverOptions opts;
    opts.tol = 1e-8;
    const auto sol = solve(p, opts);
    ASSERT_EQ(sol.status, SolverStatus::Optimal);
    EXPECT_NEAR(sol.objective, 2.0, 1e-6);
    EXPECT_NEAR(sol.x[0], 1.0, 1e-5);
    EXPECT_NEAR(sol.x[1], 0.0, 1e-5);
    EXPECT_NEAR(sol.x[2], 1.0, 1e-5);
}

TEST(ConicSolve, WeakDualityOnGoldens) {
    for (const auto& p : {lp_corner(), soc_golden(), psd_golden()}) {
        const auto sol = solve(p);
        ASSERT_EQ(sol.status, SolverStatus::Optimal);
        double bty = 0.0;
        for (int i = 0; i < p.rows(); ++i)
            bty += p.b[i] * sol.y[i];
        EXPECT_GE(sol.objective + bty, -1e-6);
    }
}

TEST(ConicSolve, Deterministic) {
    const auto p = psd_golden();
    const auto s1 = solve(p);
    const auto s2 = solve(p);
    ASSERT_EQ(s1.status, s2.status);
    ASSERT_EQ(s1.iterations, s2.iterations);
    for (size_t i = 0; i < s1.x.size(); ++i)
        EXPECT_EQ(s1.x[i], s2.x[i]);
}

TEST(ConicSolve, PrimalInfeasibleCertificate) {
    // x >= 1 and -x >= 0 cannot both hold
    ConicProgram p;
    const int x = p.add_var("x", 1.0);
    const int r1 = p.add_block(ConeBlock::nonneg(1));
    LinComb e1;
    e1.constant = -1.0;
    e1.add_term(x, 1.0);
    p.set_row_expr(r1, e1);
    const int r2 = p.add_block(ConeBlock::nonneg(1));
    LinComb e2;
    e2.add_term(x, -1.0);
    p.set_row_expr(r2, e2);
    const auto sol = solve(p);
    ASSERT_EQ(sol.status, SolverStatus::PrimalInfeasible);
    EXPECT_LE(sol.certificate_residual, 1e-6);
    // certificate: A^T y ~ 0, b^T y = -1
    double bty = 0.0;
    for (int i = 0; i < p.rows(); ++i)
        bty += p.b[i] * sol.y[i];
    EXPECT_NEAR(bty, -1.0, 1e-9);
}

TEST(ConicSolve, DualInfeasibleUnbounded) {
    // min x with x <= 5 only: unbounded below
    ConicProgram p;
    const int x = p.add_var("x", 1.0);
    const int row = p.add_block(ConeBlock::nonneg(1));
    LinComb e;  // s = 5 - x >= 0
    e.constant = 5.0;
    e.add_term(x, -1.0);
    p.set_row_expr(row, e);
    const auto sol = solve(p);
    ASSERT_EQ(sol.status, SolverStatus::DualInfeasible);
    EXPECT_LE(sol.certificate_residual, 1e-6);
    EXPECT_LT(sol.x[0], 0.0);  // improving ray pushes x down
}

TEST(ConicSolve, StructuralErrorsRejected) {
    ConicProgram p;
    p.add_var("x", 1.0);
    p.add_block(ConeBlock::nonneg(1));
    p.add_entry(0, 3, 1.0);  // variable index out of range
    EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(ConicSolve, ZeroProgram) {
    ConicProgram p;
    p.add_var("x", 0.0);
    const auto sol = solve(p);
    EXPECT_EQ(sol.status, SolverStatus::Optimal);
    EXPECT_EQ(sol.objective, 0.0);
}

TEST(ConicSolve, RandomConstructedOptimaProperty) {
    // Build a complementary (s*, y*) pair per cone via the Moreau
    // decomposition, pick x* and A at random, then b = A x* + s*,
    // c = -A^T y*; (x*, y*, s*) is then a KKT point and the optimal value
    // is c^T x*.
    RngStream rs(2024, {11});
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        ConicProgram p;
        const int n = 2 + static_cast<int>(rs.next_u64() % 5);
        for (int j = 0; j < n; ++j)
            p.add_var("x" + std::to_string(j), 0.0);

        // random cone layout, total dim <= 60
        std::vector<ConeBlock> blocks;
        const int nb = 1 + static_cast<int>(rs.next_u64() % 3);
        for (int bidx = 0; bidx < nb; ++bidx) {
            switch (rs.next_u64() % 3) {
                case 0: blocks.push_back(ConeBlock::nonneg(1 + rs.next_u64() % 6)); break;
                case 1: blocks.push_back(ConeBlock::soc(2 + rs.next_u64() % 6)); break;
                default: blocks.push_back(ConeBlock::psd(2 + rs.next_u64() % 3)); break;
            }
        }

        std::vector<double> sstar, ystar;
        for (const auto& blk : blocks) {
            std::vector<double> z(blk.dim);
            for (auto& v : z)
                v = rs.gaussian();
            std::vector<double> sp = z, yp = z;
            // s* = Pi_K(z); y* = Pi_K*(-z); then s*^T y* = 0
            ConeSpec one{{blk}};
            detail::ConeProjector cp(one);
            cp.project_primal(sp.data());
            for (auto& v : yp)
                v = -v;
            cp.project_dual(yp.data());
            sstar.insert(sstar.end(), sp.begin(), sp.end());
            ystar.insert(ystar.end(), yp.begin(), yp.end());
        }

        std::vector<double> xstar(n);
        for (auto& v : xstar)
            v = rs.gaussian();

        for (const auto& blk : blocks)
            p.add_block(blk);
        const int m = p.rows();

        std::vector<std::vector<double>> arows(m, std::vector<double>(n, 0.0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                if (rs.uniform01() < 0.6) {
                    arows[i][j] = rs.gaussian();
                    p.add_entry(i, j, arows[i][j]);
                }
            }
        for (int i = 0; i < m; ++i) {
            double bi = sstar[i];
            for (int j = 0; j < n; ++j)
                bi += arows[i][j] * xstar[j];
            p.set_b(i, bi);
        }
        std::vector<double> c(n, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                c[j] -= arows[i][j] * ystar[i];
        for (int j = 0; j < n; ++j)
            p.set_obj(j, c[j]);

        double expected = 0.0;
        for (int j = 0; j < n; ++j)
            expected += c[j] * xstar[j];

        SolverOptions opts;
        opts.tol = 1e-8;
        opts.max_iters = 200000;
        const auto sol = solve(p, opts);
        ASSERT_EQ(sol.status, SolverStatus::Optimal) << "trial " << trial;
        EXPECT_NEAR(sol.objective, expected, 1e-5 * std::max(1.0, std::abs(expected)))
            << "trial " << trial;
        ++solved;
    }
    EXPECT_EQ(solved, 200);
}

TEST(Residuals, PerturbationGrowsLinearly) {
    const auto p = lp_corner();
    auto sol = solve(p);
    ASSERT_EQ(sol.status, SolverStatus::Optimal);
    const auto r0 = residuals(p, sol);
    auto x = sol.x;
    x[0] += 1e-3;
    const auto r1 = residuals(p, x, sol.y, sol.s);
    EXPECT_NEAR(r1.primal - r0.primal, 1e-3, 1e-4);
}

TEST(Residuals, ZeroProgramAllZero) {
    ConicProgram p;
    p.add_var("x", 0.0);
    const std::vector<double> x{0.0};
    const auto r = residuals(p, x, {}, {});
    EXPECT_EQ(r.primal, 0.0);
    EXPECT_EQ(r.dual, 0.0);
    EXPECT_EQ(r.gap, 0.0);
}

TEST(EmbedHermitianPsd, RealScalar) {
    HermitianExpr m(1);
    m.at(0, 0).re.constant = 1.0;
    const auto emb = embed_hermitian_psd(m);
    ASSERT_EQ(emb.side, 2);
    ASSERT_EQ(emb.rows.size(), 3u);
    EXPECT_NEAR(emb.rows[0].constant, 1.0, 1e-15);  // (0,0)
    EXPECT_NEAR(emb.rows[1].constant, 0.0, 1e-15);  // (1,0)
    EXPECT_NEAR(emb.rows[2].constant, 1.0, 1e-15);  // (1,1)
}

TEST(EmbedHermitianPsd, PurelyImaginaryPair) {
    // M = [[0, i], [-i, 0]] has eigenvalues (-1, 1); embedding doubles them
    HermitianExpr m(2);
    m.at(0, 1).im.constant = 1.0;
    const auto emb = embed_hermitian_psd(m);
    ASSERT_EQ(emb.side, 4);
    std::vector<double> sv(emb.rows.size());
    for (size_t i = 0; i < emb.rows.size(); ++i)
        sv[i] = emb.rows[i].constant;
    const auto full = svec_unpack(sv.data(), 4);
    const auto eig = eig_sym_real(full, 4);
    EXPECT_NEAR(eig.values[0], -1.0, 1e-12);
    EXPECT_NEAR(eig.values[1], -1.0, 1e-12);
    EXPECT_NEAR(eig.values[2], 1.0, 1e-12);
    EXPECT_NEAR(eig.values[3], 1.0, 1e-12);
}

TEST(EmbedHermitianPsd, MatchesNumericEmbedding) {
    // symbolic embedding evaluated at a point == numeric embedding of the value
    RngStream rs(5, {0});
    const HermitianMatrix v = test::random_hermitian(3, rs);
    HermitianExpr m(3);
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
            m.at(j, k).re.constant = v(j, k).real();
            if (j != k)
                m.at(j, k).im.constant = v(j, k).imag();
        }
    const auto emb = embed_hermitian_psd(m);
    const auto direct = svec_pack(embed_real_symmetric(v), 6);
    ASSERT_EQ(emb.rows.size(), direct.size());
    for (size_t i = 0; i < direct.size(); ++i)
        EXPECT_NEAR(emb.rows[i].constant, direct[i], 1e-14);
}

TEST(ProgramDump, TripletFormat) {
    const auto p = psd_golden();
    const std::string text = dump_program(p);
    EXPECT_NE(text.find("robeam-conic v1"), std::string::npos);
    EXPECT_NE(text.find("vars 3"), std::string::npos);
    EXPECT_NE(text.find("cone psd 2"), std::string::npos);
    EXPECT_NE(text.find("matrix"), std::string::npos);
    EXPECT_NE(text.find("end"), std::string::npos);
    // one name line per variable
    EXPECT_NE(text.find("0 x11"), std::string::npos);
}

TEST(SolverInternals, DenseCholeskySolve) {
    RngStream rs(9, {3});
    const int n = 12;
    std::vector<double> g(n * n, 0.0);
    // SPD via B^T B + I
    std::vector<double> bmat(n * n);
    for (auto& v : bmat)
        v = rs.gaussian();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int l = 0; l < n; ++l)
                s += bmat[l * n + j] * bmat[l * n + k];
            g[j * n + k] = s + (j == k ? 1.0 : 0.0);
        }
    std::vector<double> xref(n), rhs(n, 0.0);
    for (auto& v : xref)
        v = rs.gaussian();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            rhs[j] += g[k * n + j] * xref[k];
    detail::DenseChol chol;
    ASSERT_TRUE(chol.factor(g, n));
    chol.solve(rhs.data());
    for (int j = 0; j < n; ++j)
        EXPECT_NEAR(rhs[j], xref[j], 1e-9);
}

TEST(SolverInternals, SocProjection) {
    // projection of (1, 3, 4) onto the SOC: (3, 1.8, 2.4)
    ConeSpec spec{{ConeBlock::soc(3)}};
    detail::ConeProjector proj(spec);
    std::vector<double> v{1.0, 3.0, 4.0};
    proj.project_primal(v.data());
    EXPECT_NEAR(v[0], 3.0, 1e-12);
    EXPECT_NEAR(v[1], 1.8, 1e-12);
    EXPECT_NEAR(v[2], 2.4, 1e-12);
}

TEST(SolverInternals, PsdProjectionClipsNegatives) {
    // diag(2, -3) projects to diag(2, 0)
    ConeSpec spec{{ConeBlock::psd(2)}};
    detail::ConeProjector proj(spec);
    std::vector<double> full{2.0, 0.0, 0.0, -3.0};
    auto sv = svec_pack(full, 2);
    proj.project_primal(sv.data());
    const auto back = svec_unpack(sv.data(), 2);
    EXPECT_NEAR(back[0], 2.0, 1e-12);
    EXPECT_NEAR(back[3], 0.0, 1e-12);
}

#include <gtest/gtest.h>

#include <cmath>

#include "robeam/numerics.hpp"
#include "robeam/rng.hpp"
#include "test_support.hpp"

using namespace robeam;

namespace {

HermitianMatrix diag2(double a, double b) {
    HermitianMatrix m(2);
    m.set(0, 0, a);
    m.set(1, 1, b);
    return m;
}

}  // namespace

TEST(HermitianEig, Identity3) {
    const auto e = hermitian_eig(HermitianMatrix::identity(3));
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(e.eigenvalues[k], 1.0, 1e-12);
}

TEST(HermitianEig, Diagonal) {
    const auto e = hermitian_eig(diag2(2.0, -1.0));
    EXPECT_NEAR(e.eigenvalues[0], -1.0, 1e-12);
    EXPECT_NEAR(e.eigenvalues[1], 2.0, 1e-12);
    // eigenvectors are the standard basis up to permutation and phase
    EXPECT_NEAR(std::abs(e.eigenvectors(1, 0)), 1.0, 1e-10);
    EXPECT_NEAR(std::abs(e.eigenvectors(0, 1)), 1.0, 1e-10);
}

TEST(HermitianEig, OffDiagonalPair) {
    // [[0,1],[1,0]]: characteristic polynomial l^2 - 1 = 0
    HermitianMatrix m(2);
    m.set(0, 1, 1.0);
    const auto e = hermitian_eig(m);
    EXPECT_NEAR(e.eigenvalues[0], -1.0, 1e-12);
    EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-12);
}

TEST(HermitianEig, RejectsNonHermitian) {
    CMat m(2, 2);
    m(0, 1) = cplx{1.0, 0.0};
    m(1, 0) = cplx{0.5, 0.0};
    EXPECT_THROW(HermitianMatrix::from_dense(m), std::domain_error);
}

TEST(HermitianEig, ReconstructionAndOrthonormalityProperty) {
    RngStream rs(42, {1});
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rs.next_u64() % 20);
        const HermitianMatrix m = test::random_hermitian(n, rs);
        const auto e = hermitian_eig(m);
        const double scale = std::max(1.0, m.norm_fro());

        // residual ||M - V L V^H||_F
        double resid = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx rec{};
                for (int l = 0; l < n; ++l)
                    rec += e.eigenvectors(j, l) * e.eigenvalues[l] *
                           std::conj(e.eigenvectors(k, l));
                resid += std::norm(m(j, k) - rec);
            }
        EXPECT_LE(std::sqrt(resid), 1e-10 * scale) << "dim " << n << " trial " << trial;

        // orthonormality
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                const cplx ip = vdot(e.eigenvectors.col(p), e.eigenvectors.col(q));
                EXPECT_NEAR(std::abs(ip), p == q ? 1.0 : 0.0, 1e-10);
            }

        // ascending order
        for (int l = 1; l < n; ++l)
            EXPECT_LE(e.eigenvalues[l - 1], e.eigenvalues[l] + 1e-14);
    }
}

TEST(CholeskyPsd, Identity) {
    const auto f = cholesky_psd(HermitianMatrix::identity(4));
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            EXPECT_NEAR(std::abs(f(j, k) - (j == k ? 1.0 : 0.0)), 0.0, 1e-12);
}

TEST(CholeskyPsd, DiagonalRoots) {
    const auto f = cholesky_psd(diag2(4.0, 9.0));
    EXPECT_NEAR(f(0, 0).real(), 2.0, 1e-12);
    EXPECT_NEAR(f(1, 1).real(), 3.0, 1e-12);
    EXPECT_NEAR(std::abs(f(0, 1)), 0.0, 1e-12);
}

TEST(CholeskyPsd, RankOneFactor) {
    // a = (1,1)/sqrt(2): M = a a^H is singular; factor must satisfy F F^H = M
    HermitianMatrix m(2);
    m.set(0, 0, 0.5);
    m.set(1, 1, 0.5);
    m.set(0, 1, 0.5);
    const auto f = cholesky_psd(m);
    const CMat p = matmul(f.dense(), f.dense().adjoint());
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            EXPECT_NEAR(std::abs(p(j, k) - m(j, k)), 0.0, 1e-9);
}

TEST(CholeskyPsd, IndefiniteRejected) {
    EXPECT_THROW(cholesky_psd(diag2(1.0, -0.5)), std::domain_error);
}

TEST(CholeskyPsd, FactorProperty) {
    RngStream rs(7, {2});
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rs.next_u64() % 8);
        const HermitianMatrix m = test::random_psd(n, rs);
        const auto f = cholesky_psd(m);
        const CMat p = matmul(f.dense(), f.dense().adjoint());
        double resid = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                resid += std::norm(p(j, k) - m(j, k));
        EXPECT_LE(std::sqrt(resid), 1e-9 * std::max(1.0, m.norm_fro()));
    }
}

TEST(Chi2InvCdf, ClosedFormsDof2) {
    // chi^2_2 CDF is 1 - exp(-x/2), so the quantile is -2 ln(1-p)
    EXPECT_NEAR(chi2_inv_cdf(2, 0.9), -2.0 * std::log(0.1), 1e-8);
    EXPECT_NEAR(chi2_inv_cdf(2, 0.9), 4.605170186, 1e-8);
    EXPECT_NEAR(chi2_inv_cdf(2, 0.5), -2.0 * std::log(0.5), 1e-10);
    EXPECT_NEAR(chi2_inv_cdf(2, 0.5), 1.386294361, 1e-8);
}

TEST(Chi2InvCdf, QuadratureOracleDof6) {
    const double x = chi2_inv_cdf(6, 0.9);
    EXPECT_NEAR(test::chi2_cdf_quadrature(6, x), 0.9, 1e-8);
}

TEST(Chi2InvCdf, QuadratureIdentityGrid) {
    for (int m : {2, 4, 6, 12, 16})
        for (double p = 0.01; p < 0.995; p += 0.07) {
            const double x = chi2_inv_cdf(m, p);
            EXPECT_NEAR(test::chi2_cdf_quadrature(m, x), p, 1e-8)
                << "m=" << m << " p=" << p;
        }
}

TEST(Chi2InvCdf, MonotoneInP) {
    double prev = 0.0;
    for (double p = 0.05; p < 1.0; p += 0.05) {
        const double x = chi2_inv_cdf(5, p);
        EXPECT_GT(x, prev);
        prev = x;
    }
}

TEST(Chi2InvCdf, DomainErrors) {
    EXPECT_THROW(chi2_inv_cdf(2, 0.0), std::domain_error);
    EXPECT_THROW(chi2_inv_cdf(2, 1.0), std::domain_error);
    EXPECT_THROW(chi2_inv_cdf(2, -0.1), std::domain_error);
    EXPECT_THROW(chi2_inv_cdf(0, 0.5), std::domain_error);
}

TEST(SolveThetaBar, ResidualAndValue) {
    const double th = solve_theta_bar(0.1);
    EXPECT_NEAR(th, 0.9618, 5e-4);
    EXPECT_LE(std::abs(th + std::log(1.0 - th) - std::log(0.1)), 1e-10);
    EXPECT_NEAR(th, test::theta_bar_oracle(0.1), 1e-12);
}

TEST(SolveThetaBar, PaperApproximation) {
    // 1 - exp(ln(rho) - 1) approximates the root for small rho
    const double th = solve_theta_bar(0.1);
    EXPECT_NEAR(th, 1.0 - std::exp(std::log(0.1) - 1.0), 2e-3);
    EXPECT_NEAR(1.0 - std::exp(std::log(0.1) - 1.0), 0.96321, 1e-5);
}

TEST(SolveThetaBar, MonotoneDecreasingInRho) {
    const double t1 = solve_theta_bar(0.999);
    const double t2 = solve_theta_bar(0.5);
    const double t3 = solve_theta_bar(0.01);
    EXPECT_LT(t1, 0.1);  // rho -> 1 forces a small root
    EXPECT_LT(t1, t2);
    EXPECT_LT(t2, t3);
}

TEST(SolveThetaBar, RegimeBoundaryIdentity) {
    // with v from the general formula, theta*v = sqrt(-ln rho) exactly at the root
    for (double rho : {0.3, 0.1, 0.05, 0.01, 0.001}) {
        const double th = solve_theta_bar(rho);
        const double v = std::sqrt(-(th + std::log(1.0 - th)) / (th * th));
        EXPECT_NEAR(th * v, std::sqrt(-std::log(rho)), 1e-8) << "rho=" << rho;
    }
}

TEST(SolveThetaBar, DomainErrors) {
    EXPECT_THROW(solve_theta_bar(0.0), std::domain_error);
    EXPECT_THROW(solve_theta_bar(1.0), std::domain_error);
}

// Shared helpers for the robeam test suites: random matrix generators and
// small independent oracles kept apart from the library implementation.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "robeam/numerics.hpp"
#include "robeam/rng.hpp"

namespace robeam::test {

inline HermitianMatrix random_hermitian(int n, RngStream& rs, double scale = 1.0) {
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j) {
        m.set(j, j, scale * rs.gaussian());
        for (int k = j + 1; k < n; ++k)
            m.set(j, k, cplx{scale * rs.gaussian(), scale * rs.gaussian()});
    }
    return m;
}

inline HermitianMatrix random_psd(int n, RngStream& rs, double scale = 1.0) {
    CMat f(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            f(i, j) = cplx{scale * rs.gaussian(), scale * rs.gaussian()};
    // F F^H
    CMat p = matmul(f, f.adjoint());
    return HermitianMatrix::from_dense(p, 1e-9);
}

/// Adaptive Simpson quadrature; independent oracle for CDF checks.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth = 0) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double coarse = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    const double d = 0.5 * (a + c), e = 0.5 * (c + b);
    const double fd = f(d), fe = f(e);
    const double left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    const double right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    const double fine = left + right;
    if (depth > 28 || std::abs(fine - coarse) < 15.0 * tol)
        return fine + (fine - coarse) / 15.0;
    return simpson(f, a, c, 0.5 * tol, depth + 1) + simpson(f, c, b, 0.5 * tol, depth + 1);
}

/// chi-square density with m degrees of freedom.
inline double chi2_pdf(int m, double x) {
    if (x <= 0.0)
        return 0.0;
    const double a = 0.5 * m;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

/// CDF of chi-square by quadrature of the density (oracle path).
inline double chi2_cdf_quadrature(int m, double x) {
    if (x <= 0.0)
        return 0.0;
    return simpson([m](double t) { return chi2_pdf(m, t); }, 0.0, x, 1e-12);
}

/// Independent bisection for theta + ln(1-theta) = ln(rho), run directly on
/// theta in (0,1).
inline double theta_bar_oracle(double rho) {
    const double target = std::log(rho);
    double lo = 0.0, hi = 1.0 - 1e-15;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = mid + std::log(1.0 - mid) - target;
        if (f >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace robeam::test

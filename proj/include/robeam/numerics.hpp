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

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace robeam {

using cplx = std::complex<double>;

/// Dense complex matrix, column-major storage.
class CMat {
  public:
    CMat() = default;
    CMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    static CMat identity(int n) {
        CMat m(n, n);
        for (int j = 0; j < n; ++j)
            m(j, j) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int r, int c) { return a_[static_cast<size_t>(c) * rows_ + r]; }
    const cplx& operator()(int r, int c) const { return a_[static_cast<size_t>(c) * rows_ + r]; }

    std::vector<cplx>& data() { return a_; }
    const std::vector<cplx>& data() const { return a_; }

    CMat adjoint() const {
        CMat m(cols_, rows_);
        for (int c = 0; c < cols_; ++c)
            for (int r = 0; r < rows_; ++r)
                m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    std::vector<cplx> col(int c) const {
        std::vector<cplx> v(rows_);
        for (int r = 0; r < rows_; ++r)
            v[r] = (*this)(r, c);
        return v;
    }

    double norm_fro() const {
        double s = 0.0;
        for (const auto& z : a_)
            s += std::norm(z);
        return std::sqrt(s);
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

inline CMat matmul(const CMat& x, const CMat& y) {
    if (x.cols() != y.rows())
        throw std::invalid_argument("matmul: dimension mismatch");
    CMat z(x.rows(), y.cols());
    for (int c = 0; c < y.cols(); ++c)
        for (int k = 0; k < x.cols(); ++k) {
            const cplx f = y(k, c);
            if (f == cplx{})
                continue;
            for (int r = 0; r < x.rows(); ++r)
                z(r, c) += x(r, k) * f;
        }
    return z;
}

inline std::vector<cplx> matvec(const CMat& x, const std::vector<cplx>& v) {
    if (x.cols() != static_cast<int>(v.size()))
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<cplx> y(x.rows());
    for (int c = 0; c < x.cols(); ++c) {
        const cplx f = v[c];
        if (f == cplx{})
            continue;
        for (int r = 0; r < x.rows(); ++r)
            y[r] += x(r, c) * f;
    }
    return y;
}

inline cplx vdot(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("vdot: dimension mismatch");
    cplx s{};
    for (size_t i = 0; i < x.size(); ++i)
        s += std::conj(x[i]) * y[i];
    return s;
}

inline double vnorm(const std::vector<cplx>& x) {
    double s = 0.0;
    for (const auto& z : x)
        s += std::norm(z);
    return std::sqrt(s);
}

/// Complex matrix with conjugate symmetry M(j,k) == conj(M(k,j)); diagonal real.
class HermitianMatrix {
  public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

    static HermitianMatrix identity(int n) {
        HermitianMatrix m(n);
        for (int j = 0; j < n; ++j)
            m.a_[static_cast<size_t>(j) * n + j] = 1.0;
        return m;
    }

    /// Builds from full column-major storage; rejects input that is not
    /// conjugate-symmetric within `tol * max(1, max-entry)`.
    static HermitianMatrix from_dense(const CMat& m, double tol = 1e-12) {
        if (m.rows() != m.cols())
            throw std::invalid_argument("HermitianMatrix: matrix not square");
        const int n = m.rows();
        double scale = 1.0;
        for (const auto& z : m.data())
            scale = std::max(scale, std::abs(z));
        HermitianMatrix h(n);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j <= k; ++j) {
                const cplx u = m(j, k), l = std::conj(m(k, j));
                if (std::abs(u - l) > tol * scale)
                    throw std::domain_error("HermitianMatrix: input is not conjugate-symmetric");
                const cplx v = 0.5 * (u + l);
                h.set(j, k, j == k ? cplx{v.real(), 0.0} : v);
            }
        return h;
    }

    int dim() const { return n_; }

    const cplx& operator()(int j, int k) const { return a_[static_cast<size_t>(k) * n_ + j]; }

    /// Writes entry (j,k) and mirrors the conjugate at (k,j).
    void set(int j, int k, cplx v) {
        if (j == k && std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
            throw std::domain_error("HermitianMatrix: diagonal entry must be real");
        if (j == k)
            v = cplx{v.real(), 0.0};
        a_[static_cast<size_t>(k) * n_ + j] = v;
        a_[static_cast<size_t>(j) * n_ + k] = std::conj(v);
    }

    CMat dense() const {
        CMat m(n_, n_);
        m.data() = a_;
        return m;
    }

    double trace() const {
        double t = 0.0;
        for (int j = 0; j < n_; ++j)
            t += (*this)(j, j).real();
        return t;
    }

    double norm_fro() const {
        double s = 0.0;
        for (const auto& z : a_)
            s += std::norm(z);
        return std::sqrt(s);
    }

    HermitianMatrix& operator+=(const HermitianMatrix& o) {
        if (o.n_ != n_)
            throw std::invalid_argument("HermitianMatrix: dimension mismatch");
        for (size_t i = 0; i < a_.size(); ++i)
            a_[i] += o.a_[i];
        return *this;
    }

    HermitianMatrix& operator*=(double c) {
        for (auto& z : a_)
            z *= c;
        return *this;
    }

    friend HermitianMatrix operator+(HermitianMatrix x, const HermitianMatrix& y) { return x += y; }
    friend HermitianMatrix operator*(double c, HermitianMatrix x) { return x *= c; }

    const std::vector<cplx>& data() const { return a_; }

  private:
    int n_ = 0;
    std::vector<cplx> a_;
};

/// y = M x for Hermitian M.
inline std::vector<cplx> matvec(const HermitianMatrix& m, const std::vector<cplx>& v) {
    if (m.dim() != static_cast<int>(v.size()))
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<cplx> y(v.size());
    for (int k = 0; k < m.dim(); ++k) {
        const cplx f = v[k];
        if (f == cplx{})
            continue;
        for (int j = 0; j < m.dim(); ++j)
            y[j] += m(j, k) * f;
    }
    return y;
}

/// Hermitian congruence F^H Z F for a constant matrix F; output symmetrized.
inline HermitianMatrix congruence(const HermitianMatrix& z, const CMat& f) {
    CMat p = matmul(matmul(f.adjoint(), z.dense()), f);
    const int n = p.cols();
    HermitianMatrix out(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j <= k; ++j) {
            cplx v = 0.5 * (p(j, k) + std::conj(p(k, j)));
            out.set(j, k, j == k ? cplx{v.real(), 0.0} : v);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Real-symmetric Jacobi eigensolver.
//
// Cyclic sweeps over the strict upper triangle; robust at the matrix sizes
// this library handles (sides up to a few tens).
// ---------------------------------------------------------------------------

struct RealSymEig {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // column-major, orthonormal
};

namespace detail {

/// In-place cyclic Jacobi on column-major symmetric `a` (side n); accumulates
/// rotations into `v` (must enter as identity or an orthogonal matrix).
inline void jacobi_cyclic(std::vector<double>& a, std::vector<double>& v, int n) {
    auto at = [&](int r, int c) -> double& { return a[static_cast<size_t>(c) * n + r]; };
    auto vt = [&](int r, int c) -> double& { return v[static_cast<size_t>(c) * n + r]; };

    double scale = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i)
            scale = std::max(scale, std::abs(at(i, j)));
    if (scale == 0.0)
        return;

    const double tol = 1e-15 * scale;
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int q = 1; q < n; ++q)
            for (int p = 0; p < q; ++p)
                off = std::max(off, std::abs(at(p, q)));
        if (off <= tol)
            break;
        for (int q = 1; q < n; ++q) {
            for (int p = 0; p < q; ++p) {
                const double apq = at(p, q);
                if (std::abs(apq) <= tol * 1e-2)
                    continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // rows/columns p and q of A
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vt(k, p), vkq = vt(k, q);
                    vt(k, p) = c * vkp - s * vkq;
                    vt(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
}

}  // namespace detail

/// Eigendecomposition of a real symmetric matrix (column-major, side n),
/// eigenvalues ascending.
inline RealSymEig eig_sym_real(std::vector<double> a, int n) {
    if (static_cast<int>(a.size()) != n * n)
        throw std::invalid_argument("eig_sym_real: bad storage size");
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j)
        v[static_cast<size_t>(j) * n + j] = 1.0;
    detail::jacobi_cyclic(a, v, n);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return a[static_cast<size_t>(x) * n + x] < a[static_cast<size_t>(y) * n + y];
    });

    RealSymEig out;
    out.values.resize(n);
    out.vectors.resize(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        out.values[j] = a[static_cast<size_t>(src) * n + src];
        std::copy_n(v.begin() + static_cast<size_t>(src) * n, n,
                    out.vectors.begin() + static_cast<size_t>(j) * n);
    }
    return out;
}

struct EigDecomposition {
    std::vector<double> eigenvalues;  // ascending
    CMat eigenvectors;                // unitary columns, M v_k = lambda_k v_k
};

/// Embeds Hermitian M into the real-symmetric [[Re M, -Im M],[Im M, Re M]]
/// of side 2n.  Every eigenvalue of M appears twice in the embedding.
inline std::vector<double> embed_real_symmetric(const HermitianMatrix& m) {
    const int n = m.dim();
    const int nn = 2 * n;
    std::vector<double> s(static_cast<size_t>(nn) * nn);
    auto at = [&](int r, int c) -> double& { return s[static_cast<size_t>(c) * nn + r]; };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const cplx z = m(j, k);
            at(j, k) = z.real();
            at(j + n, k + n) = z.real();
            at(j + n, k) = z.imag();
            at(j, k + n) = -z.imag();
        }
    return s;
}

/// Full eigendecomposition of a Hermitian matrix via cyclic Jacobi on the
/// 2n x 2n real-symmetric embedding.  The doubled real spectrum is reduced
/// back to n complex eigenpairs by Gram-Schmidt screening.
inline EigDecomposition hermitian_eig(const HermitianMatrix& m) {
    const int n = m.dim();
    EigDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMat(n, n);
    if (n == 0)
        return out;

    RealSymEig re = eig_sym_real(embed_real_symmetric(m), 2 * n);

    // Each real eigenvector [a; b] maps to the complex eigenvector a + i b;
    // the two real copies of one complex eigenpair collapse under projection.
    std::vector<std::vector<cplx>> kept;
    std::vector<double> vals;
    kept.reserve(n);
    for (int k = 0; k < 2 * n && static_cast<int>(kept.size()) < n; ++k) {
        std::vector<cplx> cand(n);
        for (int j = 0; j < n; ++j)
            cand[j] = cplx{re.vectors[static_cast<size_t>(k) * 2 * n + j],
                           re.vectors[static_cast<size_t>(k) * 2 * n + j + n]};
        for (const auto& u : kept) {
            const cplx proj = vdot(u, cand);
            for (int j = 0; j < n; ++j)
                cand[j] -= proj * u[j];
        }
        const double nr = vnorm(cand);
        if (nr < 1e-3)
            continue;  // duplicate copy of an already-kept eigenvector
        for (auto& z : cand)
            z /= nr;
        // second orthogonalization pass tightens orthonormality
        for (const auto& u : kept) {
            const cplx proj = vdot(u, cand);
            for (int j = 0; j < n; ++j)
                cand[j] -= proj * u[j];
        }
        const double nr2 = vnorm(cand);
        for (auto& z : cand)
            z /= nr2;
        kept.push_back(std::move(cand));
        vals.push_back(re.values[k]);
    }
    if (static_cast<int>(kept.size()) != n)
        throw std::runtime_error("hermitian_eig: failed to extract a full eigenbasis");

    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = vals[k];
        for (int j = 0; j < n; ++j)
            out.eigenvectors(j, k) = kept[k][j];
    }
    return out;
}

/// max eigenvalue helper used by the Bernstein bound: lambda^+(Q) = max(lambda_max(-Q), 0).
inline double lambda_plus_of_negated(const HermitianMatrix& q) {
    const EigDecomposition e = hermitian_eig(q);
    return std::max(-e.eigenvalues.front(), 0.0);
}

/// PSD factor F with F F^H = M (Hermitian square root; eigenvalues below the
/// PSD tolerance -1e-10 * ||M||_F are a domain error, tiny negatives clip to 0).
inline HermitianMatrix cholesky_psd(const HermitianMatrix& m) {
    const int n = m.dim();
    const double scale = m.norm_fro();
    EigDecomposition e = hermitian_eig(m);
    if (!e.eigenvalues.empty() && e.eigenvalues.front() < -1e-10 * std::max(scale, 1e-300))
        throw std::domain_error("cholesky_psd: matrix is not positive semidefinite");
    HermitianMatrix f(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j <= k; ++j) {
            cplx s{};
            for (int l = 0; l < n; ++l) {
                const double w = std::sqrt(std::max(e.eigenvalues[l], 0.0));
                s += e.eigenvectors(j, l) * w * std::conj(e.eigenvectors(k, l));
            }
            f.set(j, k, j == k ? cplx{s.real(), 0.0} : s);
        }
    return f;
}

/// Projection onto the PSD cone (negative eigenvalues clipped).
inline HermitianMatrix psd_project(const HermitianMatrix& m) {
    const int n = m.dim();
    EigDecomposition e = hermitian_eig(m);
    HermitianMatrix p(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j <= k; ++j) {
            cplx s{};
            for (int l = 0; l < n; ++l) {
                const double w = std::max(e.eigenvalues[l], 0.0);
                s += e.eigenvectors(j, l) * w * std::conj(e.eigenvectors(k, l));
            }
            p.set(j, k, j == k ? cplx{s.real(), 0.0} : s);
        }
    return p;
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma, chi-square quantile, theta-bar root.
// ---------------------------------------------------------------------------

namespace detail {

/// P(a,x) by power series; valid for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Q(a,x) by modified Lentz continued fraction; valid for x >= a + 1.
inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17)
            break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (a <= 0.0)
        throw std::domain_error("regularized_gamma_p: a must be positive");
    if (x < 0.0)
        throw std::domain_error("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0)
        return 0.0;
    return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_contfrac(a, x);
}

/// CDF of the central chi-square with m degrees of freedom.
inline double chi2_cdf(int m, double x) {
    if (m < 1)
        throw std::domain_error("chi2_cdf: degrees of freedom must be >= 1");
    if (x <= 0.0)
        return 0.0;
    return regularized_gamma_p(0.5 * m, 0.5 * x);
}

/// Quantile of the central chi-square with m degrees of freedom: the x with
/// chi2_cdf(m, x) = p.  Safeguarded Newton inside a bisection bracket.
inline double chi2_inv_cdf(int m, double p) {
    if (m < 1)
        throw std::domain_error("chi2_inv_cdf: degrees of freedom must be >= 1");
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("chi2_inv_cdf: probability must lie in (0,1)");

    double lo = 0.0;
    double hi = m + 10.0 * std::sqrt(2.0 * m) + 10.0;
    while (chi2_cdf(m, hi) < p)
        hi *= 2.0;

    double x = 0.5 * (lo + hi);
    const double a = 0.5 * m;
    const double log_norm = a * std::log(2.0) + std::lgamma(a);
    for (int it = 0; it < 200; ++it) {
        const double f = chi2_cdf(m, x) - p;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        if (std::abs(f) < 1e-14 && it > 3)
            break;
        // chi-square density at x
        const double pdf = std::exp((a - 1.0) * std::log(x) - 0.5 * x - log_norm);
        double step = pdf > 0.0 ? f / pdf : 0.0;
        double next = x - step;
        if (!(next > lo && next < hi) || it % 8 == 7)
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15 * std::max(1.0, x) && it > 3)
            break;
        x = next;
    }
    return x;
}

/// Root of theta + ln(1 - theta) = ln(rho) on (0,1).  Bisects on w = 1 - theta
/// to keep full precision when the root sits next to 1.
inline double solve_theta_bar(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("solve_theta_bar: rho must lie in (0,1)");
    const double target = std::log(rho);
    auto g = [&](double w) { return (1.0 - w) + std::log(w) - target; };
    // g is increasing in w; g(w->0+) = -inf, g(1) = -target > 0
    double lo = std::numeric_limits<double>::min();
    double hi = 1.0 - 1e-16;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= std::numeric_limits<double>::denorm_min() || (hi - lo) <= 1e-18 * hi)
            break;
    }
    return 1.0 - 0.5 * (lo + hi);
}

}  // namespace robeam

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
// Bundled conic solver: operator splitting (ADMM) on the homogeneous
// self-dual embedding, in the style of O'Donoghue et al.  Cone projections
// reduce to clipping, second-order cone projection, and PSD eigenvalue
// clipping via the Jacobi eigensolver.  Any backend consuming
// (c, A, b, ConeSpec) and returning a ConicSolution is interchangeable with
// this one; this implementation is the reference.

#pragma once

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "robeam/conic.hpp"
#include "robeam/numerics.hpp"

namespace robeam {

struct SolverOptions {
    double tol = 1e-7;        // relative primal/dual/gap tolerance
    double cert_tol = 1e-6;   // normalized infeasibility-certificate residual
    int max_iters = 50000;
    double alpha = 1.5;       // over-relaxation
    int check_every = 25;
    bool equilibrate = true;
    int ruiz_iters = 8;
    int anderson_memory = 10;  // 0 disables acceleration
};

namespace detail {

struct Csc {
    int m = 0, n = 0;
    std::vector<int> colptr, rowind;
    std::vector<double> val;

    static Csc from_triplets(int m, int n, const std::vector<ConicProgram::Triplet>& ts) {
        Csc a;
        a.m = m;
        a.n = n;
        a.colptr.assign(n + 1, 0);
        for (const auto& t : ts)
            ++a.colptr[t.col + 1];
        for (int j = 0; j < n; ++j)
            a.colptr[j + 1] += a.colptr[j];
        a.rowind.resize(ts.size());
        a.val.resize(ts.size());
        std::vector<int> fill(a.colptr.begin(), a.colptr.end() - 1);
        for (const auto& t : ts) {
            const int p = fill[t.col]++;
            a.rowind[p] = t.row;
            a.val[p] = t.value;
        }
        // merge duplicates within columns
        Csc out;
        out.m = m;
        out.n = n;
        out.colptr.assign(n + 1, 0);
        std::vector<double> dense(m, 0.0);
        std::vector<int> touched;
        for (int j = 0; j < n; ++j) {
            touched.clear();
            for (int p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
                if (dense[a.rowind[p]] == 0.0)
                    touched.push_back(a.rowind[p]);
                dense[a.rowind[p]] += a.val[p];
            }
            std::sort(touched.begin(), touched.end());
            for (int r : touched) {
                if (dense[r] != 0.0) {
                    out.rowind.push_back(r);
                    out.val.push_back(dense[r]);
                }
                dense[r] = 0.0;
            }
            out.colptr[j + 1] = static_cast<int>(out.rowind.size());
        }
        return out;
    }

    // y += A x
    void gaxpy(const double* x, double* y) const {
        for (int j = 0; j < n; ++j) {
            const double xj = x[j];
            if (xj == 0.0)
                continue;
            for (int p = colptr[j]; p < colptr[j + 1]; ++p)
                y[rowind[p]] += val[p] * xj;
        }
    }

    // y += A^T x
    void gaxpy_t(const double* x, double* y) const {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int p = colptr[j]; p < colptr[j + 1]; ++p)
                acc += val[p] * x[rowind[p]];
            y[j] += acc;
        }
    }
};

/// Dense Cholesky of an SPD matrix (column-major lower storage).
struct DenseChol {
    int n = 0;
    std::vector<double> l;  // lower triangle, column-major full storage

    bool factor(std::vector<double> a, int dim) {
        n = dim;
        l = std::move(a);
        for (int j = 0; j < n; ++j) {
            double d = l[static_cast<size_t>(j) * n + j];
            for (int k = 0; k < j; ++k) {
                const double ljk = l[static_cast<size_t>(k) * n + j];
                d -= ljk * ljk;
            }
            if (d <= 0.0)
                return false;
            d = std::sqrt(d);
            l[static_cast<size_t>(j) * n + j] = d;
            for (int i = j + 1; i < n; ++i) {
                double s = l[static_cast<size_t>(j) * n + i];
                for (int k = 0; k < j; ++k)
                    s -= l[static_cast<size_t>(k) * n + i] * l[static_cast<size_t>(k) * n + j];
                l[static_cast<size_t>(j) * n + i] = s / d;
            }
        }
        return true;
    }

    void solve(double* x) const {
        for (int j = 0; j < n; ++j) {
            x[j] /= l[static_cast<size_t>(j) * n + j];
            const double xj = x[j];
            for (int i = j + 1; i < n; ++i)
                x[i] -= l[static_cast<size_t>(j) * n + i] * xj;
        }
        for (int j = n - 1; j >= 0; --j) {
            double s = x[j];
            for (int i = j + 1; i < n; ++i)
                s -= l[static_cast<size_t>(j) * n + i] * x[i];
            x[j] = s / l[static_cast<size_t>(j) * n + j];
        }
    }
};

/// Cone projection engine with reusable eigen workspaces.
class ConeProjector {
  public:
    explicit ConeProjector(const ConeSpec& spec) {
        int start = 0;
        for (const auto& b : spec.blocks) {
            blocks_.push_back({b.kind, start, b.dim, b.side});
            start += b.dim;
        }
    }

    /// In-place projection onto the dual cone K* (free for Zero blocks).
    void project_dual(double* v) const {
        for (const auto& b : blocks_)
            switch (b.kind) {
                case ConeKind::Zero: break;  // dual is all of R^dim
                case ConeKind::Nonneg: clip(v + b.start, b.dim); break;
                case ConeKind::SecondOrder: soc(v + b.start, b.dim); break;
                case ConeKind::PsdReal: psd(v + b.start, b.side); break;
            }
    }

    /// In-place projection onto the primal cone K (Zero blocks vanish).
    void project_primal(double* v) const {
        for (const auto& b : blocks_)
            switch (b.kind) {
                case ConeKind::Zero: std::fill(v + b.start, v + b.start + b.dim, 0.0); break;
                case ConeKind::Nonneg: clip(v + b.start, b.dim); break;
                case ConeKind::SecondOrder: soc(v + b.start, b.dim); break;
                case ConeKind::PsdReal: psd(v + b.start, b.side); break;
            }
    }

  private:
    struct Blk {
        ConeKind kind;
        int start, dim, side;
    };

    static void clip(double* v, int d) {
        for (int i = 0; i < d; ++i)
            v[i] = std::max(v[i], 0.0);
    }

    static void soc(double* v, int d) {
        const double t = v[0];
        double nz = 0.0;
        for (int i = 1; i < d; ++i)
            nz += v[i] * v[i];
        nz = std::sqrt(nz);
        if (nz <= t)
            return;
        if (nz <= -t) {
            std::fill(v, v + d, 0.0);
            return;
        }
        const double a = 0.5 * (t + nz);
        v[0] = a;
        const double f = a / nz;
        for (int i = 1; i < d; ++i)
            v[i] *= f;
    }

    void psd(double* v, int side) const {
        std::vector<double> s = svec_unpack(v, side);
        std::vector<double> vec(static_cast<size_t>(side) * side, 0.0);
        for (int j = 0; j < side; ++j)
            vec[static_cast<size_t>(j) * side + j] = 1.0;
        robeam::detail::jacobi_cyclic(s, vec, side);
        // reconstruct with clipped eigenvalues, using the smaller eigenvalue set
        int npos = 0;
        for (int j = 0; j < side; ++j)
            if (s[static_cast<size_t>(j) * side + j] > 0.0)
                ++npos;
        std::vector<double> p(static_cast<size_t>(side) * side, 0.0);
        auto rank1 = [&](std::vector<double>& target, int col, double w) {
            const double* u = vec.data() + static_cast<size_t>(col) * side;
            for (int cc = 0; cc < side; ++cc) {
                const double f = w * u[cc];
                for (int rr = 0; rr < side; ++rr)
                    target[static_cast<size_t>(cc) * side + rr] += f * u[rr];
            }
        };
        if (npos <= side - npos) {
            for (int j = 0; j < side; ++j) {
                const double lam = s[static_cast<size_t>(j) * side + j];
                if (lam > 0.0)
                    rank1(p, j, lam);
            }
        } else {
            // P = S - sum_{lam<0} lam u u^T  (S has been rotated; rebuild from v)
            p = svec_unpack(v, side);
            for (int j = 0; j < side; ++j) {
                const double lam = s[static_cast<size_t>(j) * side + j];
                if (lam < 0.0)
                    rank1(p, j, -lam);
            }
        }
        const std::vector<double> packed = svec_pack(p, side);
        std::copy(packed.begin(), packed.end(), v);
    }

    std::vector<Blk> blocks_;
};

}  // namespace detail

/// Solves a conic program with the bundled operator-splitting backend.
/// Deterministic given (program, options).  Infeasibility statuses carry an
/// improving ray in x or y with its normalized certificate residual.
inline ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts = {}) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    prog.validate();
    const int n = prog.num_vars();
    const int m = prog.rows();

    ConicSolution sol;
    sol.x.assign(n, 0.0);
    sol.y.assign(m, 0.0);
    sol.s.assign(m, 0.0);

    // trivial programs: no constraints
    if (m == 0) {
        bool zero_obj = true;
        for (double cj : prog.c)
            zero_obj = zero_obj && cj == 0.0;
        sol.status = zero_obj ? SolverStatus::Optimal : SolverStatus::DualInfeasible;
        if (!zero_obj) {
            for (int j = 0; j < n; ++j)
                sol.x[j] = -prog.c[j];  // improving ray
            sol.message = "objective unbounded: no constraints";
        }
        return sol;
    }

    detail::Csc a0 = detail::Csc::from_triplets(m, n, prog.triplets());

    // --- equilibration (Ruiz, rows pooled per cone block) ---
    std::vector<double> dcol(n, 1.0), erow(m, 1.0);
    detail::Csc a = a0;
    if (opts.equilibrate) {
        std::vector<int> row_block(m);
        {
            int start = 0, bi = 0;
            for (const auto& blk : prog.cone.blocks) {
                for (int i = 0; i < blk.dim; ++i)
                    row_block[start + i] = bi;
                start += blk.dim;
                ++bi;
            }
        }
        const int nblocks = static_cast<int>(prog.cone.blocks.size());
        for (int it = 0; it < opts.ruiz_iters; ++it) {
            std::vector<double> rmax(nblocks, 0.0), cmax(n, 0.0);
            for (int j = 0; j < n; ++j)
                for (int p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
                    const double v = std::abs(a.val[p]);
                    cmax[j] = std::max(cmax[j], v);
                    rmax[row_block[a.rowind[p]]] = std::max(rmax[row_block[a.rowind[p]]], v);
                }
            std::vector<double> rs(nblocks), cs(n);
            for (int bi = 0; bi < nblocks; ++bi)
                rs[bi] = rmax[bi] > 0.0 ? 1.0 / std::sqrt(rmax[bi]) : 1.0;
            for (int j = 0; j < n; ++j)
                cs[j] = cmax[j] > 0.0 ? 1.0 / std::sqrt(cmax[j]) : 1.0;
            for (int j = 0; j < n; ++j)
                for (int p = a.colptr[j]; p < a.colptr[j + 1]; ++p)
                    a.val[p] *= rs[row_block[a.rowind[p]]] * cs[j];
            for (int j = 0; j < n; ++j)
                dcol[j] *= cs[j];
            for (int i = 0; i < m; ++i)
                erow[i] *= rs[row_block[i]];
        }
    }

    std::vector<double> bt(m), ct(n);
    for (int i = 0; i < m; ++i)
        bt[i] = erow[i] * prog.b[i];
    for (int j = 0; j < n; ++j)
        ct[j] = dcol[j] * prog.c[j];
    auto nrm2 = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double z : v)
            s += z * z;
        return std::sqrt(s);
    };
    const double bt_norm = nrm2(bt), ct_norm = nrm2(ct);
    const double sc_b = bt_norm > 1e-12 ? 1.0 / bt_norm : 1.0;
    const double sc_c = ct_norm > 1e-12 ? 1.0 / ct_norm : 1.0;
    for (auto& v : bt)
        v *= sc_b;
    for (auto& v : ct)
        v *= sc_c;

    // --- factor I + A^T A of the scaled matrix (row outer products) ---
    detail::DenseChol chol;
    {
        std::vector<int> rowptr(m + 1, 0);
        for (size_t p = 0; p < a.rowind.size(); ++p)
            ++rowptr[a.rowind[p] + 1];
        for (int i = 0; i < m; ++i)
            rowptr[i + 1] += rowptr[i];
        std::vector<int> rcol(a.rowind.size());
        std::vector<double> rval(a.rowind.size());
        {
            std::vector<int> fill(rowptr.begin(), rowptr.end() - 1);
            for (int j = 0; j < n; ++j)
                for (int p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
                    const int q = fill[a.rowind[p]]++;
                    rcol[q] = j;
                    rval[q] = a.val[p];
                }
        }
        std::vector<double> g(static_cast<size_t>(n) * n, 0.0);
        for (int i = 0; i < m; ++i)
            for (int p = rowptr[i]; p < rowptr[i + 1]; ++p) {
                const double vp = rval[p];
                const int jp = rcol[p];
                double* gcol = g.data() + static_cast<size_t>(jp) * n;
                for (int q = rowptr[i]; q < rowptr[i + 1]; ++q)
                    gcol[rcol[q]] += vp * rval[q];
            }
        for (int j = 0; j < n; ++j)
            g[static_cast<size_t>(j) * n + j] += 1.0;
        if (!chol.factor(std::move(g), n)) {
            sol.status = SolverStatus::NumericalFailure;
            sol.message = "factorization of I + A^T A failed";
            return sol;
        }
    }

    // M^{-1} apply, M = [[I, A^T],[-A, I]]
    std::vector<double> msolve_tmp(n);
    auto msolve = [&](const double* r1, const double* r2, double* zx, double* zy) {
        // (I + A^T A) zx = r1 - A^T r2 ; zy = r2 + A zx
        std::fill(msolve_tmp.begin(), msolve_tmp.end(), 0.0);
        a.gaxpy_t(r2, msolve_tmp.data());
        for (int j = 0; j < n; ++j)
            zx[j] = r1[j] - msolve_tmp[j];
        chol.solve(zx);
        for (int i = 0; i < m; ++i)
            zy[i] = r2[i];
        a.gaxpy(zx, zy);
    };

    // g = M^{-1} h with h = (ct, bt)
    std::vector<double> gx(n), gy(m);
    msolve(ct.data(), bt.data(), gx.data(), gy.data());
    double hg = 0.0;
    for (int j = 0; j < n; ++j)
        hg += ct[j] * gx[j];
    for (int i = 0; i < m; ++i)
        hg += bt[i] * gy[i];
    const double denom = 1.0 + hg;

    detail::ConeProjector proj(prog.cone);

    const int nm1 = n + m + 1;

    std::vector<double> px(n), py(m), zx(n), zy(m);
    std::vector<double> cand_x(n), cand_y(m), cand_s(m);
    Residuals best{std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};

    const double b_norm = nrm2(prog.b);
    const double c_norm = nrm2(prog.c);

    auto finish = [&](SolverStatus st, const std::string& msg, int iter) {
        sol.status = st;
        sol.message = msg;
        sol.iterations = iter;
        sol.solve_seconds = std::chrono::duration<double>(clock::now() - t0).count();
        return sol;
    };

    // Douglas-Rachford in the single variable z: u = Pi_C(z), v = u - z.
    // One step: p = Pi_C(z); r = (I+Q)^{-1}(2p - z); z' = z + alpha*(r - p).
    std::vector<double> rhs(nm1), rr(nm1);
    auto project_C = [&](const std::vector<double>& zin, std::vector<double>& p) {
        p = zin;
        proj.project_dual(p.data() + n);
        p[nm1 - 1] = std::max(zin[nm1 - 1], 0.0);
    };
    auto apply_T = [&](const std::vector<double>& zin, std::vector<double>& p,
                       std::vector<double>& zout) {
        project_C(zin, p);
        for (int i = 0; i < nm1; ++i)
            rhs[i] = 2.0 * p[i] - zin[i];
        const double wt = rhs[nm1 - 1];
        msolve(rhs.data(), rhs.data() + n, zx.data(), zy.data());
        double hp = 0.0;
        for (int j = 0; j < n; ++j)
            hp += ct[j] * zx[j];
        for (int i = 0; i < m; ++i)
            hp += bt[i] * zy[i];
        const double zt = (wt + hp) / denom;
        for (int j = 0; j < n; ++j)
            rr[j] = zx[j] - zt * gx[j];
        for (int i = 0; i < m; ++i)
            rr[n + i] = zy[i] - zt * gy[i];
        rr[nm1 - 1] = zt;
        zout.resize(nm1);
        for (int i = 0; i < nm1; ++i)
            zout[i] = zin[i] + opts.alpha * (rr[i] - p[i]);
    };

    std::vector<double> z(nm1, 0.0);
    z[nm1 - 1] = 1.0;
    std::vector<double> u(nm1), v(nm1), tz(nm1), g(nm1);

    // Anderson acceleration history (type II, safeguarded)
    const int mem = std::max(opts.anderson_memory, 0);
    std::vector<std::vector<double>> hist_z, hist_g;
    std::vector<double> z_aa(nm1), g_aa(nm1), t_aa(nm1), p_aa(nm1);

    auto fp_norm = [&](const std::vector<double>& gv) {
        double s = 0.0;
        for (double q : gv)
            s += q * q;
        return std::sqrt(s);
    };

    apply_T(z, u, tz);
    for (int i = 0; i < nm1; ++i)
        g[i] = tz[i] - z[i];

    int iter = 0;
    for (iter = 1; iter <= opts.max_iters; ++iter) {
        bool stepped = false;
        if (mem >= 2) {
            hist_z.push_back(z);
            hist_g.push_back(g);
            if (static_cast<int>(hist_z.size()) > mem) {
                hist_z.erase(hist_z.begin());
                hist_g.erase(hist_g.begin());
            }
            const int k = static_cast<int>(hist_z.size());
            if (k >= 2) {
                // least squares min || g_k - dG gamma ||, dG columns are
                // consecutive residual differences
                const int kk = k - 1;
                std::vector<double> gram(static_cast<size_t>(kk) * kk, 0.0), rhs_ls(kk, 0.0);
                for (int a = 0; a < kk; ++a) {
                    for (int c2 = a; c2 < kk; ++c2) {
                        double s = 0.0;
                        for (int i = 0; i < nm1; ++i)
                            s += (hist_g[a + 1][i] - hist_g[a][i]) *
                                 (hist_g[c2 + 1][i] - hist_g[c2][i]);
                        gram[static_cast<size_t>(a) * kk + c2] = s;
                        gram[static_cast<size_t>(c2) * kk + a] = s;
                    }
                    double s = 0.0;
                    for (int i = 0; i < nm1; ++i)
                        s += (hist_g[a + 1][i] - hist_g[a][i]) * g[i];
                    rhs_ls[a] = s;
                }
                double tr = 0.0;
                for (int a = 0; a < kk; ++a)
                    tr += gram[static_cast<size_t>(a) * kk + a];
                for (int a = 0; a < kk; ++a)
                    gram[static_cast<size_t>(a) * kk + a] += 1e-12 * std::max(tr, 1e-30);
                detail::DenseChol ls;
                if (ls.factor(gram, kk)) {
                    ls.solve(rhs_ls.data());
                    for (int i = 0; i < nm1; ++i) {
                        double acc = z[i] + g[i];
                        for (int a = 0; a < kk; ++a)
                            acc -= rhs_ls[a] * ((hist_z[a + 1][i] - hist_z[a][i]) +
                                                (hist_g[a + 1][i] - hist_g[a][i]));
                        z_aa[i] = acc;
                    }
                    // T is positively homogeneous and T(0)=0, so the safeguard
                    // compares scale-invariant residuals ||g||/||z||; otherwise
                    // acceleration can drift toward the degenerate zero point.
                    const double zn = fp_norm(z), zan = fp_norm(z_aa);
                    if (zan > 1e-8 * zn) {
                        apply_T(z_aa, p_aa, t_aa);
                        for (int i = 0; i < nm1; ++i)
                            g_aa[i] = t_aa[i] - z_aa[i];
                        if (fp_norm(g_aa) / zan < 0.9 * fp_norm(g) / zn) {
                            z.swap(z_aa);
                            g.swap(g_aa);
                            u.swap(p_aa);
                            stepped = true;
                        }
                    }
                }
            }
        }
        if (!stepped) {
            // plain step: z <- T(z) (tz/g already hold it)
            for (int i = 0; i < nm1; ++i)
                z[i] += g[i];
            apply_T(z, u, tz);
            for (int i = 0; i < nm1; ++i)
                g[i] = tz[i] - z[i];
        }
        // u = Pi_C(z) available in `u`; v = u - z
        for (int i = 0; i < nm1; ++i)
            v[i] = u[i] - z[i];

        bool bad = false;
        for (int i = 0; i < nm1 && !bad; ++i)
            bad = !std::isfinite(z[i]);
        if (bad)
            return finish(SolverStatus::NumericalFailure, "iterate diverged to non-finite values",
                          iter);

        if (iter % opts.check_every != 0 && iter != opts.max_iters)
            continue;

        // keep the iterate scale pinned (exact for the homogeneous map);
        // history is rescaled with it so the acceleration model stays valid
        {
            const double zn = fp_norm(z);
            if (zn > 0.0) {
                const double f = std::sqrt(static_cast<double>(nm1)) / zn;
                if (f < 0.5 || f > 2.0) {
                    for (int i = 0; i < nm1; ++i) {
                        z[i] *= f;
                        g[i] *= f;
                        u[i] *= f;
                        v[i] *= f;
                    }
                    for (auto& hz : hist_z)
                        for (auto& q : hz)
                            q *= f;
                    for (auto& hg : hist_g)
                        for (auto& q : hg)
                            q *= f;
                }
            }
        }

        // --- candidate solution (unscale back to original data) ---
        const double tau = u[nm1 - 1];
        if (tau > 1e-10) {
            for (int j = 0; j < n; ++j)
                cand_x[j] = dcol[j] * u[j] / (tau * sc_b);
            for (int i = 0; i < m; ++i) {
                cand_y[i] = erow[i] * u[n + i] / (tau * sc_c);
                cand_s[i] = v[n + i] / (erow[i] * tau * sc_b);
            }
            const Residuals r = residuals(prog, cand_x, cand_y, cand_s);
            double ctx = 0.0, bty = 0.0;
            for (int j = 0; j < n; ++j)
                ctx += prog.c[j] * cand_x[j];
            for (int i = 0; i < m; ++i)
                bty += prog.b[i] * cand_y[i];
            const double pres = r.primal / (1.0 + b_norm);
            const double dres = r.dual / (1.0 + c_norm);
            const double gres = r.gap / (1.0 + std::abs(ctx) + std::abs(bty));
            if (pres <= opts.tol && dres <= opts.tol && gres <= opts.tol) {
                sol.x = cand_x;
                sol.y = cand_y;
                sol.s = cand_s;
                sol.objective = ctx;
                sol.residuals = r;
                return finish(SolverStatus::Optimal, "", iter);
            }
            if (pres + dres + gres <
                best.primal / (1.0 + b_norm) + best.dual / (1.0 + c_norm) + best.gap) {
                best = r;
                sol.x = cand_x;
                sol.y = cand_y;
                sol.s = cand_s;
                sol.objective = ctx;
                sol.residuals = r;
            }
        }

        // --- infeasibility certificates (scale-invariant tests) ---
        if (b_norm > 0.0) {
            for (int i = 0; i < m; ++i)
                py[i] = erow[i] * u[n + i];
            double bty = 0.0;
            for (int i = 0; i < m; ++i)
                bty += prog.b[i] * py[i];
            if (bty < -1e-12) {
                std::vector<double> aty(n, 0.0);
                a0.gaxpy_t(py.data(), aty.data());
                const double res = nrm2(aty) * b_norm / (-bty);
                if (res <= opts.cert_tol) {
                    const double scale = -1.0 / bty;
                    for (int i = 0; i < m; ++i)
                        sol.y[i] = py[i] * scale;
                    sol.x.assign(n, 0.0);
                    sol.s.assign(m, 0.0);
                    sol.certificate_residual = res;
                    return finish(SolverStatus::PrimalInfeasible,
                                  "primal infeasibility certificate found", iter);
                }
            }
        }
        if (c_norm > 0.0) {
            for (int j = 0; j < n; ++j)
                px[j] = dcol[j] * u[j];
            double ctx = 0.0;
            for (int j = 0; j < n; ++j)
                ctx += prog.c[j] * px[j];
            if (ctx < -1e-12) {
                std::vector<double> ax(m, 0.0);
                a0.gaxpy(px.data(), ax.data());
                std::vector<double> sx(ax);
                for (auto& z : sx)
                    z = -z;
                proj.project_primal(sx.data());
                for (int i = 0; i < m; ++i)
                    ax[i] += sx[i];
                const double res = nrm2(ax) * c_norm / (-ctx);
                if (res <= opts.cert_tol) {
                    const double scale = -1.0 / ctx;
                    for (int j = 0; j < n; ++j)
                        sol.x[j] = px[j] * scale;
                    sol.y.assign(m, 0.0);
                    for (int i = 0; i < m; ++i)
                        sol.s[i] = sx[i] * scale;
                    sol.certificate_residual = res;
                    return finish(SolverStatus::DualInfeasible,
                                  "dual infeasibility certificate found (objective unbounded)",
                                  iter);
                }
            }
        }
    }

    return finish(SolverStatus::MaxIters, "iteration limit reached", opts.max_iters);
}

}  // namespace robeam

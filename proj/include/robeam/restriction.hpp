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
// Semidefinite-relaxed design problems and the four conic restrictions of the
// per-user outage constraint
//
//     Prob{ e^H Q e + 2 Re{e^H r} + s >= 0 } >= 1 - rho,
//
// with (Q, r, s) affine in the matrix variables W_1..W_K:
//
//   sphere bounding      LMI  [[Q + tI, r],[r^H, s - t d^2]] >= 0, t >= 0,
//                        d = sqrt(quantile_{chi2_{2n}}(1-rho)/2)
//   Bernstein bound      tr(Q) - sqrt(-2 ln rho) x + ln(rho) y + s >= 0,
//                        ||[vec(Q); sqrt(2) r]|| <= x,  y I + Q >= 0,  y >= 0
//   decomposition        s + tr(Q) >= 2 sqrt(-ln rho) (x + y),
//   (Gaussian)           ||r||/sqrt(2) <= x,  v ||vec(Q)|| <= y
//   decomposition        s + sigma_e^2 tr(Q) >= 2 sqrt(-ln rho) sum t_l,
//   (bounded support)    sqrt(2)||r|| <= t_0, per-band SOCs over Q entries
//
// plus the perfect-CSI (non-robust) linear constraints.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robeam/conic.hpp"
#include "robeam/model.hpp"
#include "robeam/numerics.hpp"

namespace robeam {

// ---------------------------------------------------------------------------
// Method selection
// ---------------------------------------------------------------------------

enum class Method { SphereBounding, Bernstein, DecompGaussian, DecompBounded, NonRobust };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::SphereBounding: return "sphere";
        case Method::Bernstein: return "bernstein";
        case Method::DecompGaussian: return "decomp";
        case Method::DecompBounded: return "decomp-bounded";
        case Method::NonRobust: return "nonrobust";
    }
    return "unknown";
}

struct MethodSelector {
    Method method = Method::NonRobust;
    std::optional<double> d_override;    // SphereBounding: common sphere radius
    std::optional<double> rho_override;  // Bernstein/Decomp*: effective outage cap

    static MethodSelector sphere(std::optional<double> d = {}) {
        return {Method::SphereBounding, d, {}};
    }
    static MethodSelector bernstein(std::optional<double> rho = {}) {
        return {Method::Bernstein, {}, rho};
    }
    static MethodSelector decomp_gaussian(std::optional<double> rho = {}) {
        return {Method::DecompGaussian, {}, rho};
    }
    static MethodSelector decomp_bounded(std::optional<double> rho = {}) {
        return {Method::DecompBounded, {}, rho};
    }
    static MethodSelector nonrobust() { return {Method::NonRobust, {}, {}}; }

    void validate() const {
        if (d_override) {
            if (method != Method::SphereBounding)
                throw std::invalid_argument("MethodSelector: d override only applies to sphere");
            if (!(*d_override > 0.0))
                throw std::invalid_argument("MethodSelector: d override must be positive");
        }
        if (rho_override) {
            if (method == Method::SphereBounding || method == Method::NonRobust)
                throw std::invalid_argument("MethodSelector: rho override not applicable");
            if (!(*rho_override > 0.0 && *rho_override < 1.0))
                throw std::invalid_argument("MethodSelector: rho override must lie in (0,1)");
        }
    }
};

inline MethodSelector method_from_name(const std::string& name) {
    if (name == "sphere" || name == "method1")
        return MethodSelector::sphere();
    if (name == "bernstein" || name == "method2")
        return MethodSelector::bernstein();
    if (name == "decomp" || name == "method3")
        return MethodSelector::decomp_gaussian();
    if (name == "decomp-bounded" || name == "method4")
        return MethodSelector::decomp_bounded();
    if (name == "nonrobust")
        return MethodSelector::nonrobust();
    throw std::invalid_argument("unknown method '" + name + "'");
}

// ---------------------------------------------------------------------------
// Method constants
// ---------------------------------------------------------------------------

/// Sphere radius d = sqrt(quantile_{chi2_{2n}}(1 - rho) / 2); rho = 1 gives 0.
inline double sphere_radius(int n, double rho) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::domain_error("sphere_radius: rho must lie in (0,1]");
    if (rho >= 1.0)
        return 0.0;
    return std::sqrt(chi2_inv_cdf(2 * n, 1.0 - rho) / 2.0);
}

struct DecompConstants {
    double theta_bar;  // root of theta + ln(1-theta) = ln(rho)
    double v;          // sqrt(-ln rho)/theta_bar
    double mu;         // 2 sqrt(-ln rho)
};

inline DecompConstants decomp_constants(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("decomp_constants: rho must lie in (0,1)");
    DecompConstants c{};
    c.theta_bar = solve_theta_bar(rho);
    c.v = std::sqrt(-std::log(rho)) / c.theta_bar;
    c.mu = 2.0 * std::sqrt(-std::log(rho));
    return c;
}

/// Bernstein lower-tail level T(eta) = tr(Q) - sqrt(2 eta) sqrt(||Q||_F^2 +
/// 2||r||^2) - eta lambda^+(Q); the quadratic form stays above it with
/// probability >= 1 - exp(-eta).
inline double bernstein_t(const HermitianMatrix& q, const CVec& r, double eta) {
    if (!(eta > 0.0))
        throw std::domain_error("bernstein_t: eta must be positive");
    const double qf = q.norm_fro();
    const double rn = vnorm(r);
    return q.trace() - std::sqrt(2.0 * eta) * std::sqrt(qf * qf + 2.0 * rn * rn) -
           eta * lambda_plus_of_negated(q);
}

/// Anti-diagonal index bands A_1..A_n partitioning all (j,k) pairs: the
/// 0-indexed pair (j,k) lands in band (j+k) mod n.  Within one band every row
/// and column index appears exactly once, so the band's quadratic terms are
/// sums of independent variables.
inline std::vector<std::vector<std::pair<int, int>>> coloring_sets(int n) {
    std::vector<std::vector<std::pair<int, int>>> sets(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            sets[(j + k) % n].push_back({j, k});
    return sets;
}

// ---------------------------------------------------------------------------
// Numeric (Q, r, s) evaluation -- the oracle tying symbolic constraint
// construction to numbers
// ---------------------------------------------------------------------------

struct QrsData {
    bool real_embedding = false;  // true for the bounded-error identification
    HermitianMatrix q;            // complex n x n, or real 2*nt x 2*nt
    CVec r;                       // complex n, or real 2*nt (imaginary parts zero)
    double s = 0.0;
    double rho = 0.0;
};

namespace detail {

inline HermitianMatrix combine_w(const BeamformingInstance& inst,
                                 const std::vector<HermitianMatrix>& w, int user) {
    HermitianMatrix z(inst.nt);
    for (int k = 0; k < inst.k; ++k) {
        const double f = k == user ? 1.0 / inst.gamma(user) : -1.0;
        HermitianMatrix t = w[k];
        t *= f;
        z += t;
    }
    return z;
}

}  // namespace detail

inline QrsData eval_qrs_gaussian(const BeamformingInstance& inst,
                                 const std::vector<HermitianMatrix>& w, int user) {
    if (inst.error_model.kind != ErrorModel::Kind::GaussianCov)
        throw std::invalid_argument("eval_qrs_gaussian: instance does not use the Gaussian model");
    if (static_cast<int>(w.size()) != inst.k)
        throw std::invalid_argument("eval_qrs_gaussian: need one W per user");
    const HermitianMatrix z = detail::combine_w(inst, w, user);
    const HermitianMatrix f = cholesky_psd(inst.error_model.cov[user]);
    QrsData out;
    out.q = congruence(z, f.dense());
    out.r = matvec(f, matvec(z, inst.channels[user]));
    out.s = vdot(inst.channels[user], matvec(z, inst.channels[user])).real() -
            inst.noise_powers[user];
    out.rho = inst.rho[user];
    return out;
}

inline QrsData eval_qrs_bounded(const BeamformingInstance& inst,
                                const std::vector<HermitianMatrix>& w, int user) {
    if (inst.error_model.kind != ErrorModel::Kind::UniformIID)
        throw std::invalid_argument("eval_qrs_bounded: instance does not use the uniform model");
    if (static_cast<int>(w.size()) != inst.k)
        throw std::invalid_argument("eval_qrs_bounded: need one W per user");
    const int n = inst.nt;
    const HermitianMatrix z = detail::combine_w(inst, w, user);
    const double eps = inst.error_model.epsilon[user];
    const double qs = eps * eps / 3.0;
    const double rs = eps / std::sqrt(3.0);

    QrsData out;
    out.real_embedding = true;
    out.q = HermitianMatrix(2 * n);
    // [[Re Z, -Im Z],[Im Z, Re Z]] scaled by eps^2/3; real symmetric
    auto embedded = [&](int a, int b) -> double {
        const bool ra = a < n, rb = b < n;
        const int ja = ra ? a : a - n, jb = rb ? b : b - n;
        const cplx zv = z(ja, jb);
        if (ra == rb)
            return qs * zv.real();
        return (ra ? -1.0 : 1.0) * qs * zv.imag();  // upper-right -Im, lower-left +Im
    };
    for (int a = 0; a < 2 * n; ++a)
        for (int b = a; b < 2 * n; ++b)
            out.q.set(a, b, embedded(a, b));
    const CVec zh = matvec(z, inst.channels[user]);
    out.r.resize(2 * n);
    for (int j = 0; j < n; ++j) {
        out.r[j] = rs * zh[j].real();
        out.r[n + j] = rs * zh[j].imag();
    }
    out.s = vdot(inst.channels[user], zh).real() - inst.noise_powers[user];
    out.rho = inst.rho[user];
    return out;
}

// ---------------------------------------------------------------------------
// SDR program construction
// ---------------------------------------------------------------------------

/// Variable layout of the SDR problem: per user, n diagonal entries followed
/// by (re, im) pairs for each strict upper-triangular entry, column-major.
struct SdrLayout {
    int nt = 0;
    int k = 0;

    int per_user() const { return nt * nt; }

    int w_diag(int user, int j) const { return user * per_user() + j; }

    int w_off_re(int user, int j, int kcol) const {
        return user * per_user() + nt + 2 * off_index(j, kcol);
    }
    int w_off_im(int user, int j, int kcol) const {
        return user * per_user() + nt + 2 * off_index(j, kcol) + 1;
    }

    int off_index(int j, int kcol) const {
        // strict upper triangle, column-major: (0,1),(0,2),(1,2),(0,3),...
        return kcol * (kcol - 1) / 2 + j;
    }
};

/// An SDR design problem plus the metadata needed to read solutions back.
struct SdrProgram {
    ConicProgram prog;
    SdrLayout layout;
    BeamformingInstance inst;
    MethodSelector selector;

    /// Hermitian expression of W_user over the program variables.
    HermitianExpr w_expr(int user) const {
        HermitianExpr w(layout.nt);
        for (int kc = 0; kc < layout.nt; ++kc) {
            w.at(kc, kc).re.add_term(layout.w_diag(user, kc), 1.0);
            for (int j = 0; j < kc; ++j) {
                w.at(j, kc).re.add_term(layout.w_off_re(user, j, kc), 1.0);
                w.at(j, kc).im.add_term(layout.w_off_im(user, j, kc), 1.0);
            }
        }
        return w;
    }

    /// Numeric W matrices from a primal point.
    std::vector<HermitianMatrix> read_w(const std::vector<double>& x) const {
        std::vector<HermitianMatrix> w(layout.k, HermitianMatrix(layout.nt));
        for (int u = 0; u < layout.k; ++u)
            for (int kc = 0; kc < layout.nt; ++kc) {
                w[u].set(kc, kc, x[layout.w_diag(u, kc)]);
                for (int j = 0; j < kc; ++j)
                    w[u].set(j, kc,
                             cplx{x[layout.w_off_re(u, j, kc)], x[layout.w_off_im(u, j, kc)]});
            }
        return w;
    }
};

namespace detail {

/// Per-user (Q, r, s) affine expressions for the Gaussian model.
struct QrsExpr {
    HermitianExpr q;
    std::vector<CLinComb> r;
    LinComb s;
};

inline HermitianExpr combine_w_expr(const BeamformingInstance& inst,
                                    const std::vector<HermitianExpr>& w, int user) {
    HermitianExpr z(inst.nt);
    for (int k = 0; k < inst.k; ++k)
        z.add_scaled(w[k], k == user ? 1.0 / inst.gamma(user) : -1.0);
    return z;
}

inline QrsExpr qrs_expr_gaussian(const BeamformingInstance& inst,
                                 const std::vector<HermitianExpr>& w, int user) {
    const HermitianExpr z = combine_w_expr(inst, w, user);
    const HermitianMatrix f = cholesky_psd(inst.error_model.cov[user]);
    QrsExpr out;
    out.q = z.congruence(f.dense());
    const std::vector<CLinComb> zh = z.matvec(inst.channels[user]);
    out.r.resize(inst.nt);
    for (int j = 0; j < inst.nt; ++j) {
        for (int k = 0; k < inst.nt; ++k) {
            if (f(j, k) == cplx{})
                continue;
            out.r[j].add(zh[k], f(j, k));
        }
        out.r[j].compress();
    }
    out.s = z.quad_form(inst.channels[user]);
    out.s.constant -= inst.noise_powers[user];
    return out;
}

/// Emits the rows of a second-order cone ||tail|| <= head.
inline void append_soc(ConicProgram& prog, const LinComb& head, const std::vector<LinComb>& tail) {
    const int row = prog.add_block(ConeBlock::soc(1 + static_cast<int>(tail.size())));
    prog.set_row_expr(row, head);
    for (size_t i = 0; i < tail.size(); ++i)
        prog.set_row_expr(row + 1 + static_cast<int>(i), tail[i]);
}

inline void append_nonneg(ConicProgram& prog, const LinComb& e) {
    const int row = prog.add_block(ConeBlock::nonneg(1));
    prog.set_row_expr(row, e);
}

inline void append_psd(ConicProgram& prog, const HermitianExpr& e) {
    const EmbeddedPsdRows emb = embed_hermitian_psd(e);
    const int row = prog.add_block(ConeBlock::psd(emb.side));
    for (size_t i = 0; i < emb.rows.size(); ++i)
        prog.set_row_expr(row + static_cast<int>(i), emb.rows[i]);
}

/// vec(Q) rows for the Frobenius-norm SOCs: Re and Im of every matrix entry
/// (both triangles), so the Euclidean norm of the stack equals ||Q||_F
/// exactly.  Dimension 2 n^2.
inline std::vector<LinComb> vec_q_rows(const HermitianExpr& q, double scale = 1.0) {
    const int n = q.dim();
    std::vector<LinComb> rows;
    rows.reserve(2 * n * n);
    for (int kc = 0; kc < n; ++kc)
        for (int j = 0; j < n; ++j) {
            CLinComb e = q.entry(j, kc);
            e.re.scale(scale);
            e.im.scale(scale);
            e.compress();
            rows.push_back(std::move(e.re));
            rows.push_back(std::move(e.im));
        }
    return rows;
}

/// Stacked real/imag rows of a complex vector expression, scaled.
inline std::vector<LinComb> stack_reim(const std::vector<CLinComb>& v, double scale) {
    std::vector<LinComb> rows;
    rows.reserve(2 * v.size());
    for (const auto& e : v) {
        LinComb re = e.re, im = e.im;
        re.scale(scale);
        im.scale(scale);
        rows.push_back(std::move(re));
        rows.push_back(std::move(im));
    }
    return rows;
}

inline void require_gaussian(const BeamformingInstance& inst, const char* who) {
    if (inst.error_model.kind != ErrorModel::Kind::GaussianCov)
        throw std::invalid_argument(std::string(who) + ": requires the Gaussian error model");
}

/// Appends the chosen restriction for every user, over arbitrary W providers.
inline void append_restriction(ConicProgram& prog, const BeamformingInstance& inst,
                               const std::vector<HermitianExpr>& w, const MethodSelector& sel,
                               const std::string& tag) {
    sel.validate();
    const int n = inst.nt;
    switch (sel.method) {
        case Method::SphereBounding: {
            require_gaussian(inst, "sphere bounding");
            for (int i = 0; i < inst.k; ++i) {
                const QrsExpr qrs = qrs_expr_gaussian(inst, w, i);
                const double d =
                    sel.d_override ? *sel.d_override : sphere_radius(n, inst.rho[i]);
                const int t = prog.add_var("t" + tag + "[" + std::to_string(i) + "]");
                LinComb tpos;
                tpos.add_term(t, 1.0);
                append_nonneg(prog, tpos);
                // congruence-scaled form diag(dI,1) [[Q+tI, r],[r^H, s-t d^2]]
                // diag(dI,1): [[d^2 Q + t' I, d r],[d r^H, s - t']] with
                // t' = t d^2; equivalent PSD constraint, better balanced rows
                HermitianExpr lmi(n + 1);
                for (int j = 0; j < n; ++j)
                    for (int kc = j; kc < n; ++kc) {
                        lmi.at(j, kc).add(qrs.q.at(j, kc), d * d);
                        lmi.at(j, kc).compress();
                    }
                for (int j = 0; j < n; ++j)
                    lmi.at(j, j).re.add_term(t, 1.0);
                lmi.at(n, n).re.add(qrs.s);
                lmi.at(n, n).re.add_term(t, -1.0);
                for (int j = 0; j < n; ++j) {
                    lmi.at(j, n).add(qrs.r[j], d);
                    lmi.at(j, n).compress();
                }
                append_psd(prog, lmi);
            }
            break;
        }
        case Method::Bernstein: {
            require_gaussian(inst, "Bernstein restriction");
            for (int i = 0; i < inst.k; ++i) {
                const double rho = sel.rho_override ? *sel.rho_override : inst.rho[i];
                if (!(rho > 0.0 && rho < 1.0))
                    throw std::invalid_argument(
                        "Bernstein restriction: rho must lie in (0,1) (rho = 1 degenerates)");
                const QrsExpr qrs = qrs_expr_gaussian(inst, w, i);
                const int x = prog.add_var("x" + tag + "[" + std::to_string(i) + "]");
                const int y = prog.add_var("y" + tag + "[" + std::to_string(i) + "]");
                // tr(Q) - sqrt(-2 ln rho) x + ln(rho) y + s >= 0
                LinComb lin = qrs.q.trace();
                lin.add(qrs.s);
                lin.add_term(x, -std::sqrt(-2.0 * std::log(rho)));
                lin.add_term(y, std::log(rho));
                lin.compress();
                append_nonneg(prog, lin);
                // ||[vec(Q); sqrt(2) r]|| <= x
                LinComb head;
                head.add_term(x, 1.0);
                std::vector<LinComb> tail = vec_q_rows(qrs.q);
                std::vector<LinComb> rrows = stack_reim(qrs.r, kSqrt2);
                tail.insert(tail.end(), rrows.begin(), rrows.end());
                append_soc(prog, head, tail);
                // y I + Q >= 0
                HermitianExpr lmi = qrs.q;
                lmi.add_identity_var(y, 1.0);
                append_psd(prog, lmi);
                // y >= 0
                LinComb ypos;
                ypos.add_term(y, 1.0);
                append_nonneg(prog, ypos);
            }
            break;
        }
        case Method::DecompGaussian: {
            require_gaussian(inst, "decomposition restriction");
            for (int i = 0; i < inst.k; ++i) {
                const double rho = sel.rho_override ? *sel.rho_override : inst.rho[i];
                const DecompConstants dc = decomp_constants(rho);
                const QrsExpr qrs = qrs_expr_gaussian(inst, w, i);
                const int x = prog.add_var("x" + tag + "[" + std::to_string(i) + "]");
                const int y = prog.add_var("y" + tag + "[" + std::to_string(i) + "]");
                // s + tr(Q) - mu (x + y) >= 0
                LinComb lin = qrs.q.trace();
                lin.add(qrs.s);
                lin.add_term(x, -dc.mu);
                lin.add_term(y, -dc.mu);
                lin.compress();
                append_nonneg(prog, lin);
                // ||r|| / sqrt(2) <= x
                LinComb headx;
                headx.add_term(x, 1.0);
                append_soc(prog, headx, stack_reim(qrs.r, 1.0 / kSqrt2));
                // v ||vec(Q)|| <= y
                LinComb heady;
                heady.add_term(y, 1.0);
                append_soc(prog, heady, vec_q_rows(qrs.q, dc.v));
            }
            break;
        }
        case Method::DecompBounded: {
            if (inst.error_model.kind != ErrorModel::Kind::UniformIID)
                throw std::invalid_argument(
                    "bounded decomposition: requires the uniform error model");
            const int n2 = 2 * n;
            const auto bands = coloring_sets(n2);
            for (int i = 0; i < inst.k; ++i) {
                const double rho = sel.rho_override ? *sel.rho_override : inst.rho[i];
                if (!(rho > 0.0 && rho <= 1.0))
                    throw std::invalid_argument("bounded decomposition: rho must lie in (0,1]");
                const double eps = inst.error_model.epsilon[i];
                const double qscale = eps * eps / 3.0;
                const double rscale = eps / std::sqrt(3.0);
                const double mu = 2.0 * std::sqrt(-std::log(rho));

                const HermitianExpr z = combine_w_expr(inst, w, i);
                const std::vector<CLinComb> zh = z.matvec(inst.channels[i]);
                LinComb s = z.quad_form(inst.channels[i]);
                s.constant -= inst.noise_powers[i];

                // slacks t_0 .. t_{2n}
                std::vector<int> t(n2 + 1);
                for (int l = 0; l <= n2; ++l)
                    t[l] = prog.add_var("t" + tag + "[" + std::to_string(i) + "][" +
                                        std::to_string(l) + "]");

                // s + sigma_e^2 tr(Q) >= mu * sum t_l; the normalized error has
                // unit variance, and tr(Q) = qscale * 2 * tr(Re Z)
                LinComb lin = s;
                LinComb trz;
                for (int j = 0; j < n; ++j)
                    trz.add(z.at(j, j).re);
                lin.add(trz, 2.0 * qscale);
                for (int l = 0; l <= n2; ++l)
                    lin.add_term(t[l], -mu);
                lin.compress();
                append_nonneg(prog, lin);

                // sqrt(2) ||r|| <= t_0 with r = rscale [Re(Z h); Im(Z h)]
                LinComb head0;
                head0.add_term(t[0], 1.0);
                append_soc(prog, head0, stack_reim(zh, kSqrt2 * rscale));

                // per-band SOCs over the real embedded Q entries
                // Q[a][b] for a,b in [0, 2n): Re/Im block structure of qscale*Z
                auto q_entry = [&](int a, int b) -> LinComb {
                    const bool ra = a < n, rb = b < n;
                    const int ja = ra ? a : a - n, jb = rb ? b : b - n;
                    LinComb e;
                    if (ra == rb) {
                        e.add(z.at(std::min(ja, jb), std::max(ja, jb)).re, qscale);
                    } else if (!ra && rb) {
                        if (ja != jb)
                            e.add(z.at(std::min(ja, jb), std::max(ja, jb)).im,
                                  ja < jb ? qscale : -qscale);
                    } else {
                        if (ja != jb)
                            e.add(z.at(std::min(ja, jb), std::max(ja, jb)).im,
                                  ja < jb ? -qscale : qscale);
                    }
                    return e;
                };
                for (int l = 1; l <= n2; ++l) {
                    LinComb head;
                    head.add_term(t[l], 1.0);
                    std::vector<LinComb> tail;
                    for (const auto& [a, b] : bands[l - 1]) {
                        LinComb e = q_entry(a, b);
                        e.scale(a == b ? 1.0 / std::sqrt(8.0) : 1.0);
                        e.compress();
                        tail.push_back(std::move(e));
                    }
                    append_soc(prog, head, tail);
                }
            }
            break;
        }
        case Method::NonRobust: {
            for (int i = 0; i < inst.k; ++i) {
                const HermitianExpr z = combine_w_expr(inst, w, i);
                LinComb s = z.quad_form(inst.channels[i]);
                s.constant -= inst.noise_powers[i];
                append_nonneg(prog, s);
            }
            break;
        }
    }
}

}  // namespace detail

/// SDR skeleton: K complex-PSD matrix variables (embedded real), objective
/// = total transmit power, no outage constraints yet.
inline SdrProgram build_sdr(const BeamformingInstance& inst) {
    inst.validate();
    SdrProgram sp;
    sp.inst = inst;
    sp.layout = {inst.nt, inst.k};
    for (int u = 0; u < inst.k; ++u) {
        for (int kc = 0; kc < inst.nt; ++kc)
            sp.prog.add_var("W" + std::to_string(u) + "(" + std::to_string(kc) + "," +
                                std::to_string(kc) + ")",
                            1.0);
        for (int kc = 0; kc < inst.nt; ++kc)
            for (int j = 0; j < kc; ++j) {
                sp.prog.add_var("W" + std::to_string(u) + "(" + std::to_string(j) + "," +
                                    std::to_string(kc) + ").re",
                                0.0);
                sp.prog.add_var("W" + std::to_string(u) + "(" + std::to_string(j) + "," +
                                    std::to_string(kc) + ").im",
                                0.0);
            }
    }
    for (int u = 0; u < inst.k; ++u)
        detail::append_psd(sp.prog, sp.w_expr(u));
    return sp;
}

inline void add_method(SdrProgram& sp, const MethodSelector& sel) {
    std::vector<HermitianExpr> w;
    for (int u = 0; u < sp.inst.k; ++u)
        w.push_back(sp.w_expr(u));
    detail::append_restriction(sp.prog, sp.inst, w, sel, "");
    sp.selector = sel;
}

inline void add_method1(SdrProgram& sp, std::optional<double> d_override = {}) {
    add_method(sp, MethodSelector::sphere(d_override));
}
inline void add_method2(SdrProgram& sp, std::optional<double> rho_override = {}) {
    add_method(sp, MethodSelector::bernstein(rho_override));
}
inline void add_method3(SdrProgram& sp, std::optional<double> rho_override = {}) {
    add_method(sp, MethodSelector::decomp_gaussian(rho_override));
}
inline void add_method4(SdrProgram& sp, std::optional<double> rho_override = {}) {
    add_method(sp, MethodSelector::decomp_bounded(rho_override));
}
inline void add_nonrobust(SdrProgram& sp) { add_method(sp, MethodSelector::nonrobust()); }

/// Power-reallocation program: W_i = p_i u_i u_i^H with fixed unit directions,
/// variables p >= 0, same restriction constraints, objective sum p_i ||u_i||^2.
struct PowerProgram {
    ConicProgram prog;
    std::vector<int> p_vars;
};

inline PowerProgram build_power_program(const BeamformingInstance& inst,
                                        const std::vector<CVec>& directions,
                                        const MethodSelector& sel) {
    inst.validate();
    if (static_cast<int>(directions.size()) != inst.k)
        throw std::invalid_argument("build_power_program: need one direction per user");
    PowerProgram pp;
    std::vector<HermitianExpr> w;
    for (int u = 0; u < inst.k; ++u) {
        const CVec& d = directions[u];
        if (static_cast<int>(d.size()) != inst.nt)
            throw std::invalid_argument("build_power_program: direction length != nt");
        const double nn = vnorm(d);
        const int p = pp.prog.add_var("p[" + std::to_string(u) + "]", nn * nn);
        pp.p_vars.push_back(p);
        HermitianExpr we(inst.nt);
        for (int j = 0; j < inst.nt; ++j)
            for (int kc = j; kc < inst.nt; ++kc) {
                const cplx v = d[j] * std::conj(d[kc]);
                we.at(j, kc).re.add_term(p, v.real());
                if (j != kc)
                    we.at(j, kc).im.add_term(p, v.imag());
            }
        w.push_back(std::move(we));
        LinComb ppos;
        ppos.add_term(p, 1.0);
        detail::append_nonneg(pp.prog, ppos);
    }
    detail::append_restriction(pp.prog, inst, w, sel, "p");
    return pp;
}

}  // namespace robeam

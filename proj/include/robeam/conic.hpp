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
// Standard-form conic programs:  minimize c^T x  s.t.  A x + s = b,  s in K,
// where K is an ordered product of zero, nonnegative, second-order and real
// PSD cones.  PSD blocks use scaled lower-triangular storage (off-diagonals
// times sqrt(2)) so the cone inner product equals the vector inner product.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robeam/numerics.hpp"

namespace robeam {

// ---------------------------------------------------------------------------
// Cone description
// ---------------------------------------------------------------------------

enum class ConeKind { Zero, Nonneg, SecondOrder, PsdReal };

struct ConeBlock {
    ConeKind kind;
    int dim;   // storage dimension of the block
    int side;  // PsdReal only: matrix side, dim == side*(side+1)/2

    static ConeBlock zero(int d) { return {ConeKind::Zero, d, 0}; }
    static ConeBlock nonneg(int d) { return {ConeKind::Nonneg, d, 0}; }
    static ConeBlock soc(int d) { return {ConeKind::SecondOrder, d, 0}; }
    static ConeBlock psd(int side) { return {ConeKind::PsdReal, side * (side + 1) / 2, side}; }
};

struct ConeSpec {
    std::vector<ConeBlock> blocks;

    int total_dim() const {
        int d = 0;
        for (const auto& b : blocks)
            d += b.dim;
        return d;
    }

    void validate() const {
        for (const auto& b : blocks) {
            if (b.dim < 1)
                throw std::invalid_argument("ConeSpec: block dimension must be >= 1");
            if (b.kind == ConeKind::PsdReal && b.dim != b.side * (b.side + 1) / 2)
                throw std::invalid_argument("ConeSpec: PSD block dim != side*(side+1)/2");
        }
    }
};

// ---------------------------------------------------------------------------
// svec packing for real symmetric matrices
// ---------------------------------------------------------------------------

inline int svec_dim(int side) { return side * (side + 1) / 2; }

/// Index of entry (i,j), i >= j, in column-major lower-triangular packing.
inline int svec_index(int side, int i, int j) {
    // column j starts after j full columns of decreasing height
    return j * side - j * (j - 1) / 2 + (i - j);
}

inline constexpr double kSqrt2 = 1.4142135623730950488016887;

/// Packs a full column-major symmetric matrix into svec form.
inline std::vector<double> svec_pack(const std::vector<double>& s, int side) {
    std::vector<double> v(svec_dim(side));
    int idx = 0;
    for (int j = 0; j < side; ++j)
        for (int i = j; i < side; ++i)
            v[idx++] = (i == j ? 1.0 : kSqrt2) * s[static_cast<size_t>(j) * side + i];
    return v;
}

/// Unpacks svec form into a full column-major symmetric matrix.
inline std::vector<double> svec_unpack(const double* v, int side) {
    std::vector<double> s(static_cast<size_t>(side) * side);
    int idx = 0;
    for (int j = 0; j < side; ++j)
        for (int i = j; i < side; ++i) {
            const double val = (i == j ? v[idx] : v[idx] / kSqrt2);
            s[static_cast<size_t>(j) * side + i] = val;
            s[static_cast<size_t>(i) * side + j] = val;
            ++idx;
        }
    return s;
}

// ---------------------------------------------------------------------------
// Affine expressions over real decision variables
// ---------------------------------------------------------------------------

/// constant + sum_i coef_i * x[var_i]
struct LinComb {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;

    void add_term(int var, double coef) {
        if (coef != 0.0)
            terms.emplace_back(var, coef);
    }

    void add(const LinComb& o, double scale = 1.0) {
        constant += scale * o.constant;
        for (const auto& [v, c] : o.terms)
            terms.emplace_back(v, scale * c);
    }

    void scale(double f) {
        constant *= f;
        for (auto& t : terms)
            t.second *= f;
    }

    /// Merges duplicate variables and drops zero coefficients.
    void compress() {
        std::sort(terms.begin(), terms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        size_t out = 0;
        for (size_t i = 0; i < terms.size();) {
            int var = terms[i].first;
            double sum = 0.0;
            while (i < terms.size() && terms[i].first == var)
                sum += terms[i++].second;
            if (sum != 0.0)
                terms[out++] = {var, sum};
        }
        terms.resize(out);
    }

    double eval(const std::vector<double>& x) const {
        double s = constant;
        for (const auto& [v, c] : terms)
            s += c * x[v];
        return s;
    }
};

/// Complex affine expression over real variables.
struct CLinComb {
    LinComb re, im;

    void add(const CLinComb& o, cplx scale = 1.0) {
        re.add(o.re, scale.real());
        re.add(o.im, -scale.imag());
        im.add(o.re, scale.imag());
        im.add(o.im, scale.real());
    }

    void add_conj(const CLinComb& o, cplx scale = 1.0) {
        // scale * conj(o)
        re.add(o.re, scale.real());
        re.add(o.im, scale.imag());
        im.add(o.re, scale.imag());
        im.add(o.im, -scale.real());
    }

    void add_constant(cplx z) {
        re.constant += z.real();
        im.constant += z.imag();
    }

    void compress() {
        re.compress();
        im.compress();
    }

    cplx eval(const std::vector<double>& x) const { return {re.eval(x), im.eval(x)}; }
};

/// Hermitian-valued affine expression: upper triangle j <= k stored, diagonal
/// imaginary parts structurally zero.
class HermitianExpr {
  public:
    HermitianExpr() = default;
    explicit HermitianExpr(int n) : n_(n), e_(static_cast<size_t>(n) * (n + 1) / 2) {}

    int dim() const { return n_; }

    CLinComb& at(int j, int k) {
        check(j, k);
        return e_[idx(j, k)];
    }
    const CLinComb& at(int j, int k) const {
        check(j, k);
        return e_[idx(j, k)];
    }

    /// Entry (j,k) for any j,k, conjugating below the diagonal.
    CLinComb entry(int j, int k) const {
        if (j <= k)
            return e_[idx(j, k)];
        CLinComb c;
        c.add_conj(e_[idx(k, j)]);
        return c;
    }

    void add_scaled(const HermitianExpr& o, double f) {
        if (o.n_ != n_)
            throw std::invalid_argument("HermitianExpr: dimension mismatch");
        for (size_t i = 0; i < e_.size(); ++i)
            e_[i].add(o.e_[i], f);
    }

    /// Adds f * I to the expression via a single variable coefficient.
    void add_identity_var(int var, double coef) {
        for (int j = 0; j < n_; ++j)
            e_[idx(j, j)].re.add_term(var, coef);
    }

    void add_constant_identity(double c) {
        for (int j = 0; j < n_; ++j)
            e_[idx(j, j)].re.constant += c;
    }

    LinComb trace() const {
        LinComb t;
        for (int j = 0; j < n_; ++j)
            t.add(e_[idx(j, j)].re);
        t.compress();
        return t;
    }

    /// Congruence by a constant matrix: F^H (this) F (F need not be Hermitian).
    HermitianExpr congruence(const CMat& f) const {
        if (f.rows() != n_)
            throw std::invalid_argument("HermitianExpr::congruence: dimension mismatch");
        const int m = f.cols();
        HermitianExpr out(m);
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                CLinComb acc;
                for (int p = 0; p < n_; ++p)
                    for (int q = 0; q < n_; ++q) {
                        const cplx w = std::conj(f(p, a)) * f(q, b);
                        if (w == cplx{})
                            continue;
                        if (p <= q)
                            acc.add(e_[idx(p, q)], w);
                        else
                            acc.add_conj(e_[idx(q, p)], w);
                    }
                acc.compress();
                if (a == b)
                    acc.im = LinComb{};  // exactly real on the diagonal
                out.at(a, b) = std::move(acc);
            }
        return out;
    }

    /// (this) * h for a constant vector h.
    std::vector<CLinComb> matvec(const std::vector<cplx>& h) const {
        if (static_cast<int>(h.size()) != n_)
            throw std::invalid_argument("HermitianExpr::matvec: dimension mismatch");
        std::vector<CLinComb> out(n_);
        for (int j = 0; j < n_; ++j) {
            for (int k = 0; k < n_; ++k) {
                if (h[k] == cplx{})
                    continue;
                if (j <= k)
                    out[j].add(e_[idx(j, k)], h[k]);
                else
                    out[j].add_conj(e_[idx(k, j)], h[k]);
            }
            out[j].compress();
        }
        return out;
    }

    /// h^H (this) h; exactly real by conjugate symmetry.
    LinComb quad_form(const std::vector<cplx>& h) const {
        LinComb out;
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                const cplx w = std::conj(h[j]) * h[k];
                if (w == cplx{})
                    continue;
                const CLinComb& src = j <= k ? e_[idx(j, k)] : e_[idx(k, j)];
                const cplx ws = j <= k ? w : std::conj(w);
                // accumulate Re(ws * src)
                out.add(src.re, ws.real());
                out.add(src.im, -ws.imag());
            }
        out.compress();
        return out;
    }

    /// Numeric value at a point.
    HermitianMatrix eval(const std::vector<double>& x) const {
        HermitianMatrix m(n_);
        for (int j = 0; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                cplx z = e_[idx(j, k)].eval(x);
                if (j == k)
                    z = cplx{z.real(), 0.0};
                m.set(j, k, z);
            }
        return m;
    }

  private:
    void check(int j, int k) const {
        if (j < 0 || k < j || k >= n_)
            throw std::invalid_argument("HermitianExpr: bad entry index");
    }
    size_t idx(int j, int k) const { return static_cast<size_t>(k) * (k + 1) / 2 + j; }

    int n_ = 0;
    std::vector<CLinComb> e_;  // upper triangle, column-major
};

/// Real symmetric-valued affine expression (used by the bounded-error path).
class SymmetricExpr {
  public:
    SymmetricExpr() = default;
    explicit SymmetricExpr(int n) : n_(n), e_(static_cast<size_t>(n) * (n + 1) / 2) {}

    int dim() const { return n_; }
    LinComb& at(int j, int k) {
        if (j > k)
            std::swap(j, k);
        return e_[static_cast<size_t>(k) * (k + 1) / 2 + j];
    }
    const LinComb& at(int j, int k) const {
        int jj = j, kk = k;
        if (jj > kk)
            std::swap(jj, kk);
        return e_[static_cast<size_t>(kk) * (kk + 1) / 2 + jj];
    }

    LinComb trace() const {
        LinComb t;
        for (int j = 0; j < n_; ++j)
            t.add(at(j, j));
        t.compress();
        return t;
    }

  private:
    int n_ = 0;
    std::vector<LinComb> e_;
};

/// Real-symmetric embedding of a Hermitian affine expression: the svec rows of
/// [[Re M, -Im M],[Im M, Re M]] (side 2n).  The embedded matrix is PSD exactly
/// when M is, with every eigenvalue of M duplicated.
struct EmbeddedPsdRows {
    int side;  // 2n
    std::vector<LinComb> rows;
};

inline EmbeddedPsdRows embed_hermitian_psd(const HermitianExpr& m) {
    const int n = m.dim();
    const int side = 2 * n;
    EmbeddedPsdRows out;
    out.side = side;
    out.rows.resize(svec_dim(side));

    // S entry as an expression
    auto s_entry = [&](int a, int b) -> LinComb {
        const bool ra = a < n, rb = b < n;
        const int ja = ra ? a : a - n, jb = rb ? b : b - n;
        LinComb r;
        if (ra == rb) {
            // Re M[ja][jb] == Re M[jb][ja]
            r.add(m.at(std::min(ja, jb), std::max(ja, jb)).re);
        } else if (!ra && rb) {
            // Im block: S[n+ja][jb] = Im M[ja][jb]
            if (ja == jb)
                return r;  // structurally zero
            if (ja < jb)
                r.add(m.at(ja, jb).im);
            else
                r.add(m.at(jb, ja).im, -1.0);
        } else {
            // -Im M[ja][jb]
            if (ja == jb)
                return r;
            if (ja < jb)
                r.add(m.at(ja, jb).im, -1.0);
            else
                r.add(m.at(jb, ja).im);
        }
        return r;
    };

    int idx = 0;
    for (int j = 0; j < side; ++j)
        for (int i = j; i < side; ++i) {
            LinComb e = s_entry(i, j);
            if (i != j)
                e.scale(kSqrt2);
            e.compress();
            out.rows[idx++] = std::move(e);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Program container
// ---------------------------------------------------------------------------

enum class SolverStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIters, NumericalFailure };

inline const char* to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Optimal: return "optimal";
        case SolverStatus::PrimalInfeasible: return "primal_infeasible";
        case SolverStatus::DualInfeasible: return "dual_infeasible";
        case SolverStatus::MaxIters: return "max_iters";
        case SolverStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

struct Residuals {
    double primal = 0.0;  // ||A x + s - b||
    double dual = 0.0;    // ||A^T y + c||
    double gap = 0.0;     // |c^T x + b^T y|
};

struct ConicSolution {
    SolverStatus status = SolverStatus::NumericalFailure;
    std::vector<double> x;  // primal point, or improving ray for DualInfeasible
    std::vector<double> y;  // dual point, or improving ray for PrimalInfeasible
    std::vector<double> s;  // primal slacks
    double objective = 0.0;
    Residuals residuals;          // absolute residuals at the returned point
    double certificate_residual = 0.0;  // normalized, for infeasible statuses
    int iterations = 0;
    double solve_seconds = 0.0;
    std::string message;
};

class ConicProgram {
  public:
    int num_vars() const { return static_cast<int>(var_names_.size()); }
    int rows() const { return cone.total_dim(); }

    int add_var(std::string name, double obj_coef = 0.0) {
        var_names_.push_back(std::move(name));
        c.push_back(obj_coef);
        return static_cast<int>(var_names_.size()) - 1;
    }

    void set_obj(int var, double coef) { c.at(var) = coef; }

    /// Appends a cone block; returns its starting row.
    int add_block(ConeBlock blk) {
        const int start = rows();
        cone.blocks.push_back(blk);
        b.resize(static_cast<size_t>(start) + blk.dim, 0.0);
        return start;
    }

    void add_entry(int row, int var, double coef) {
        if (coef != 0.0)
            triplets_.push_back({row, var, coef});
    }

    void set_b(int row, double v) { b.at(row) = v; }

    /// Pins row `row` to the affine expression e: meaning s_row = e(x) in the
    /// cone.  A_row = -coef(e), b_row = constant(e).
    void set_row_expr(int row, const LinComb& e) {
        for (const auto& [var, coef] : e.terms)
            add_entry(row, var, -coef);
        b.at(row) = e.constant;
    }

    struct Triplet {
        int row, col;
        double value;
    };
    const std::vector<Triplet>& triplets() const { return triplets_; }
    const std::vector<std::string>& var_names() const { return var_names_; }

    void validate() const {
        cone.validate();
        if (static_cast<int>(b.size()) != rows())
            throw std::invalid_argument("ConicProgram: offset length != cone dimension");
        if (static_cast<int>(c.size()) != num_vars())
            throw std::invalid_argument("ConicProgram: objective length != variable count");
        for (const auto& t : triplets_)
            if (t.row < 0 || t.row >= rows() || t.col < 0 || t.col >= num_vars())
                throw std::invalid_argument("ConicProgram: matrix entry out of range");
    }

    std::vector<double> c;
    std::vector<double> b;
    ConeSpec cone;

  private:
    std::vector<Triplet> triplets_;
    std::vector<std::string> var_names_;
};

/// Exact recomputation of primal/dual residuals and the duality gap at a
/// candidate point; pure function of the inputs.
inline Residuals residuals(const ConicProgram& p, const std::vector<double>& x,
                           const std::vector<double>& y, const std::vector<double>& s) {
    const int m = p.rows(), n = p.num_vars();
    if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != m ||
        static_cast<int>(s.size()) != m)
        throw std::invalid_argument("residuals: shape mismatch");
    std::vector<double> pr(m, 0.0), du(n, 0.0);
    for (int i = 0; i < m; ++i)
        pr[i] = s[i] - p.b[i];
    for (int j = 0; j < n; ++j)
        du[j] = p.c[j];
    for (const auto& t : p.triplets()) {
        pr[t.row] += t.value * x[t.col];
        du[t.col] += t.value * y[t.row];
    }
    auto nrm = [](const std::vector<double>& v) {
        double sq = 0.0;
        for (double z : v)
            sq += z * z;
        return std::sqrt(sq);
    };
    double ctx = 0.0, bty = 0.0;
    for (int j = 0; j < n; ++j)
        ctx += p.c[j] * x[j];
    for (int i = 0; i < m; ++i)
        bty += p.b[i] * y[i];
    return {nrm(pr), nrm(du), std::abs(ctx + bty)};
}

inline Residuals residuals(const ConicProgram& p, const ConicSolution& sol) {
    return residuals(p, sol.x, sol.y, sol.s);
}

// ---------------------------------------------------------------------------
// Plain-text sparse-triplet dump (for cross-checks against external solvers)
// ---------------------------------------------------------------------------

inline void dump_program(const ConicProgram& p, std::ostream& os) {
    os << "robeam-conic v1\n";
    os << "vars " << p.num_vars() << "\n";
    os << "rows " << p.rows() << "\n";
    for (const auto& blk : p.cone.blocks) {
        switch (blk.kind) {
            case ConeKind::Zero: os << "cone zero " << blk.dim << "\n"; break;
            case ConeKind::Nonneg: os << "cone nonneg " << blk.dim << "\n"; break;
            case ConeKind::SecondOrder: os << "cone soc " << blk.dim << "\n"; break;
            case ConeKind::PsdReal: os << "cone psd " << blk.side << "\n"; break;
        }
    }
    os << "objective\n";
    for (int j = 0; j < p.num_vars(); ++j)
        if (p.c[j] != 0.0)
            os << j << " " << p.c[j] << "\n";
    os << "offset\n";
    for (int i = 0; i < p.rows(); ++i)
        if (p.b[i] != 0.0)
            os << i << " " << p.b[i] << "\n";
    os << "matrix\n";
    for (const auto& t : p.triplets())
        os << t.row << " " << t.col << " " << t.value << "\n";
    os << "names\n";
    for (int j = 0; j < p.num_vars(); ++j)
        os << j << " " << p.var_names()[j] << "\n";
    os << "end\n";
}

inline std::string dump_program(const ConicProgram& p) {
    std::ostringstream os;
    os.precision(17);
    dump_program(p, os);
    return os.str();
}

}  // namespace robeam

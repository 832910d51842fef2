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
// From matrix solutions to beam vectors: the rank-one test
// lambda_max(W)/tr(W) >= 0.99, direct eigen extraction when it passes, and
// the Gaussian randomization procedure (draw candidate directions from
// CN(0, W*), re-optimize per-user powers under the same restriction, keep
// the cheapest feasible round) when it does not.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robeam/model.hpp"
#include "robeam/numerics.hpp"
#include "robeam/restriction.hpp"
#include "robeam/solver.hpp"

namespace robeam {

/// Matrix-level solution of an SDR design problem.
struct RarSolution {
    std::vector<HermitianMatrix> w;
    double objective = 0.0;  // total transmit power, sum tr(W_i)
    SolverStatus status = SolverStatus::NumericalFailure;
    std::vector<double> rank_ratios;  // lambda_max / tr per user; 1 for zero W
    ConicSolution conic;              // solver diagnostics
};

inline double rank_ratio(const HermitianMatrix& w) {
    const double tr = w.trace();
    if (tr <= 1e-12 * std::max(1.0, w.norm_fro()))
        return 1.0;  // zero beam counts as rank one
    const EigDecomposition e = hermitian_eig(w);
    return e.eigenvalues.back() / tr;
}

/// Solves an SDR program and reads the matrix solution back.
inline RarSolution solve_rar(const SdrProgram& sp, const SolverOptions& opts = {}) {
    RarSolution out;
    out.conic = solve(sp.prog, opts);
    out.status = out.conic.status;
    if (out.status != SolverStatus::Optimal)
        return out;
    out.w = sp.read_w(out.conic.x);
    out.objective = 0.0;
    for (const auto& wi : out.w)
        out.objective += wi.trace();
    out.rank_ratios.reserve(out.w.size());
    for (const auto& wi : out.w)
        out.rank_ratios.push_back(rank_ratio(wi));
    return out;
}

/// True when every per-user ratio reaches the threshold (0.99 in the rank-one
/// convention used throughout).
inline bool rank_one_check(const RarSolution& sol, double threshold = 0.99) {
    for (double r : sol.rank_ratios)
        if (r < threshold)
            return false;
    return !sol.rank_ratios.empty() || sol.w.empty();
}

/// w_i = sqrt(lambda_max) * u_max with the first nonzero component rotated to
/// the positive real axis (fixes the eigensolver phase ambiguity).
inline BeamformerSet extract_beamformers(const RarSolution& sol, double threshold = 0.99) {
    if (!rank_one_check(sol, threshold))
        throw std::invalid_argument(
            "extract_beamformers: solution is not rank-one; run gaussian_randomization");
    BeamformerSet out;
    for (const auto& wi : sol.w) {
        const int n = wi.dim();
        const double tr = wi.trace();
        if (tr <= 1e-12 * std::max(1.0, wi.norm_fro())) {
            out.w.push_back(CVec(n, cplx{}));
            continue;
        }
        const EigDecomposition e = hermitian_eig(wi);
        CVec w = e.eigenvectors.col(n - 1);
        const double amp = std::sqrt(std::max(e.eigenvalues.back(), 0.0));
        for (auto& z : w)
            z *= amp;
        // phase convention
        const double wn = vnorm(w);
        for (int j = 0; j < n; ++j)
            if (std::abs(w[j]) > 1e-12 * wn) {
                const cplx phase = std::conj(w[j]) / std::abs(w[j]);
                for (auto& z : w)
                    z *= phase;
                break;
            }
        out.w.push_back(std::move(w));
    }
    return out;
}

/// Per-user power re-optimization for fixed unit directions under the given
/// restriction; only status Optimal is accepted as feasible.
struct PowerAllocation {
    bool feasible = false;
    std::vector<double> powers;
    double objective = std::numeric_limits<double>::infinity();
    SolverStatus status = SolverStatus::NumericalFailure;
};

inline PowerAllocation power_allocation(const std::vector<CVec>& directions,
                                        const BeamformingInstance& inst,
                                        const MethodSelector& sel,
                                        const SolverOptions& opts = {}) {
    const PowerProgram pp = build_power_program(inst, directions, sel);
    const ConicSolution cs = solve(pp.prog, opts);
    PowerAllocation out;
    out.status = cs.status;
    if (cs.status != SolverStatus::Optimal)
        return out;
    out.feasible = true;
    out.powers.reserve(pp.p_vars.size());
    for (int v : pp.p_vars)
        out.powers.push_back(std::max(cs.x[v], 0.0));
    out.objective = cs.objective;
    return out;
}

struct RandomizationResult {
    bool feasible = false;
    BeamformerSet beams;
    double objective = std::numeric_limits<double>::infinity();
    int best_round = -1;
    int rounds_feasible = 0;
};

/// Gaussian randomization: rounds of candidate directions w ~ CN(0, W_i*),
/// power re-optimization per round, argmin objective with ties broken by the
/// lowest round index.  Deterministic given the seed; rounds use streams
/// keyed by (seed, round, user).
inline RandomizationResult gaussian_randomization(const RarSolution& sol,
                                                  const BeamformingInstance& inst,
                                                  const MethodSelector& sel, int rounds,
                                                  std::uint64_t seed,
                                                  const SolverOptions& opts = {}) {
    if (rounds < 1)
        throw std::invalid_argument("gaussian_randomization: need at least one round");
    if (sol.status != SolverStatus::Optimal)
        throw std::invalid_argument("gaussian_randomization: needs a feasible RAR solution");
    const int k = static_cast<int>(sol.w.size());
    const int n = inst.nt;

    // clipped PSD factors of the solution matrices (solver tolerance can
    // leave slightly indefinite iterates)
    std::vector<HermitianMatrix> factors;
    factors.reserve(k);
    for (const auto& wi : sol.w)
        factors.push_back(cholesky_psd(psd_project(wi)));

    RandomizationResult out;
    for (int round = 0; round < rounds; ++round) {
        std::vector<CVec> dirs(k);
        bool degenerate = false;
        for (int i = 0; i < k && !degenerate; ++i) {
            RngStream rs(seed, {static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(i)});
            CVec w;
            double wn = 0.0;
            for (int attempt = 0; attempt < 10; ++attempt) {
                w = matvec(factors[i], rs.cgaussian_vector(n));
                wn = vnorm(w);
                if (wn > 1e-12)
                    break;
            }
            if (wn <= 1e-12) {
                degenerate = true;
                break;
            }
            for (auto& z : w)
                z /= wn;
            dirs[i] = std::move(w);
        }
        if (degenerate)
            continue;  // all redraw attempts degenerate, skip the round
        const PowerAllocation pa = power_allocation(dirs, inst, sel, opts);
        if (!pa.feasible)
            continue;
        ++out.rounds_feasible;
        if (pa.objective < out.objective) {
            out.objective = pa.objective;
            out.best_round = round;
            out.beams.w.clear();
            for (int i = 0; i < k; ++i) {
                CVec w = dirs[i];
                const double amp = std::sqrt(pa.powers[i]);
                for (auto& z : w)
                    z *= amp;
                out.beams.w.push_back(std::move(w));
            }
        }
    }
    out.feasible = out.best_round >= 0;
    return out;
}

}  // namespace robeam

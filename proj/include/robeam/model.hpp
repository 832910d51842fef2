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

#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "robeam/numerics.hpp"
#include "robeam/rng.hpp"

namespace robeam {

using CVec = std::vector<cplx>;

/// CSI error model: complex Gaussian with per-user covariance, or elementwise
/// i.i.d. bounded (uniform) errors with per-user half-width.
struct ErrorModel {
    enum class Kind { GaussianCov, UniformIID };

    Kind kind = Kind::GaussianCov;
    std::vector<HermitianMatrix> cov;  // GaussianCov: K PSD matrices
    std::vector<double> epsilon;       // UniformIID: K half-widths, > 0
    // set when the covariances came from the (sigma_e2, correlation) generator;
    // lets instance files use the compact parametric keys
    std::optional<std::pair<double, double>> gaussian_params;

    static ErrorModel gaussian(std::vector<HermitianMatrix> c) {
        ErrorModel m;
        m.kind = Kind::GaussianCov;
        m.cov = std::move(c);
        return m;
    }

    /// Spatially i.i.d. Gaussian errors, C_i = sigma_e2 * I.
    static ErrorModel gaussian_iid(double sigma_e2, int nt, int k) {
        if (sigma_e2 < 0.0)
            throw std::invalid_argument("ErrorModel: sigma_e2 must be nonnegative");
        HermitianMatrix c(nt);
        for (int j = 0; j < nt; ++j)
            c.set(j, j, sigma_e2);
        ErrorModel m = gaussian(std::vector<HermitianMatrix>(k, c));
        m.gaussian_params = {sigma_e2, 0.0};
        return m;
    }

    /// Spatially correlated Gaussian errors, [C]_{m,n} = sigma_e2 * corr^|m-n|.
    static ErrorModel gaussian_correlated(double sigma_e2, double corr, int nt, int k) {
        if (sigma_e2 < 0.0)
            throw std::invalid_argument("ErrorModel: sigma_e2 must be nonnegative");
        if (!(corr > -1.0 && corr < 1.0))
            throw std::invalid_argument("ErrorModel: correlation must lie in (-1,1)");
        HermitianMatrix c(nt);
        for (int m = 0; m < nt; ++m)
            for (int n = m; n < nt; ++n)
                c.set(m, n, sigma_e2 * std::pow(corr, n - m));
        ErrorModel m = gaussian(std::vector<HermitianMatrix>(k, c));
        m.gaussian_params = {sigma_e2, corr};
        return m;
    }

    static ErrorModel uniform_iid(double eps, int k) {
        if (!(eps > 0.0))
            throw std::invalid_argument("ErrorModel: epsilon must be positive");
        ErrorModel m;
        m.kind = Kind::UniformIID;
        m.epsilon.assign(k, eps);
        return m;
    }

    int users() const {
        return kind == Kind::GaussianCov ? static_cast<int>(cov.size())
                                         : static_cast<int>(epsilon.size());
    }
};

/// One beam per user; transmit power of beam i is ||w_i||^2.
struct BeamformerSet {
    std::vector<CVec> w;

    double total_power() const {
        double p = 0.0;
        for (const auto& wi : w)
            p += vnorm(wi) * vnorm(wi);
        return p;
    }
};

/// A problem instance: presumed channels plus the QoS and error-model data.
/// SINR targets are stored in dB (the unit every interface uses) and exposed
/// in linear scale through gamma().
struct BeamformingInstance {
    int nt = 0;
    int k = 0;
    std::vector<CVec> channels;        // presumed h-bar_i, k vectors of length nt
    std::vector<double> noise_powers;  // sigma_i^2 > 0
    std::vector<double> gamma_db;      // SINR targets, dB
    std::vector<double> rho;           // outage caps in (0,1]
    ErrorModel error_model;

    double gamma(int i) const { return std::pow(10.0, gamma_db.at(i) / 10.0); }

    void validate() const {
        if (k < 1 || nt < 1)
            throw std::invalid_argument("BeamformingInstance: need nt >= 1 and k >= 1");
        if (static_cast<int>(channels.size()) != k || static_cast<int>(noise_powers.size()) != k ||
            static_cast<int>(gamma_db.size()) != k || static_cast<int>(rho.size()) != k)
            throw std::invalid_argument("BeamformingInstance: per-user arrays must have length k");
        for (const auto& h : channels)
            if (static_cast<int>(h.size()) != nt)
                throw std::invalid_argument("BeamformingInstance: channel length != nt");
        for (double s : noise_powers)
            if (!(s > 0.0))
                throw std::invalid_argument("BeamformingInstance: noise powers must be positive");
        for (double r : rho)
            if (!(r > 0.0 && r <= 1.0))
                throw std::invalid_argument("BeamformingInstance: rho must lie in (0,1]");
        if (error_model.users() != k)
            throw std::invalid_argument("BeamformingInstance: error model user count != k");
        if (error_model.kind == ErrorModel::Kind::GaussianCov)
            for (const auto& c : error_model.cov)
                if (c.dim() != nt)
                    throw std::invalid_argument("BeamformingInstance: covariance side != nt");
    }
};

/// K presumed channels drawn i.i.d. from CN(0, I_nt).  Deterministic in seed.
inline std::vector<CVec> generate_channels(int nt, int k, std::uint64_t seed) {
    if (nt < 1 || k < 1)
        throw std::invalid_argument("generate_channels: need nt >= 1 and k >= 1");
    std::vector<CVec> h(k);
    for (int i = 0; i < k; ++i) {
        RngStream rs(seed, {0x6368616eull /*chan*/, static_cast<std::uint64_t>(i)});
        h[i] = rs.cgaussian_vector(nt);
    }
    return h;
}

/// Draws CSI error vectors; Gaussian covariances are factored once at
/// construction so repeated draws stay cheap.
class ErrorSampler {
  public:
    ErrorSampler(const ErrorModel& model, int nt) : model_(&model), nt_(nt) {
        if (model.kind == ErrorModel::Kind::GaussianCov)
            for (const auto& c : model.cov)
                factors_.push_back(cholesky_psd(c));
    }

    /// One error vector for `user` from the given stream.
    CVec draw(int user, RngStream& rs) const {
        if (model_->kind == ErrorModel::Kind::GaussianCov) {
            const CVec z = rs.cgaussian_vector(nt_);
            return matvec(factors_[user], z);
        }
        CVec e(nt_);
        const double eps = model_->epsilon[user];
        for (int j = 0; j < nt_; ++j) {
            const double re = rs.uniform_sym(eps);
            const double im = rs.uniform_sym(eps);
            e[j] = cplx{re, im};
        }
        return e;
    }

  private:
    const ErrorModel* model_;
    int nt_;
    std::vector<HermitianMatrix> factors_;
};

/// Per-user error vectors with streams keyed by (seed, trial, user).
inline std::vector<CVec> sample_errors(const ErrorModel& model, int nt, std::uint64_t seed,
                                       std::uint64_t trial = 0) {
    ErrorSampler sampler(model, nt);
    std::vector<CVec> e(model.users());
    for (int i = 0; i < model.users(); ++i) {
        RngStream rs(seed, {trial, static_cast<std::uint64_t>(i)});
        e[i] = sampler.draw(i, rs);
    }
    return e;
}

/// SINR of `user` under channel h: |h^H w_i|^2 / (sum_{k != i} |h^H w_k|^2 + sigma2).
inline double sinr(const BeamformerSet& w, const CVec& h, double sigma2, int user) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("sinr: noise power must be positive");
    if (user < 0 || user >= static_cast<int>(w.w.size()))
        throw std::invalid_argument("sinr: user index out of range");
    double signal = 0.0, interference = 0.0;
    for (int i = 0; i < static_cast<int>(w.w.size()); ++i) {
        if (w.w[i].size() != h.size())
            throw std::invalid_argument("sinr: beam/channel dimension mismatch");
        const double p = std::norm(vdot(h, w.w[i]));
        if (i == user)
            signal = p;
        else
            interference += p;
    }
    return signal / (interference + sigma2);
}

// ---------------------------------------------------------------------------
// Instance and beamformer files (JSON).  Channels are stored per user as
// interleaved [re, im, re, im, ...] arrays.
// ---------------------------------------------------------------------------

inline nlohmann::json cvec_to_json(const CVec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& z : v) {
        a.push_back(z.real());
        a.push_back(z.imag());
    }
    return a;
}

inline CVec cvec_from_json(const nlohmann::json& a) {
    if (!a.is_array() || a.size() % 2 != 0)
        throw std::invalid_argument("expected interleaved [re, im, ...] array");
    CVec v(a.size() / 2);
    for (size_t j = 0; j < v.size(); ++j)
        v[j] = cplx{a[2 * j].get<double>(), a[2 * j + 1].get<double>()};
    return v;
}

inline nlohmann::json instance_to_json(const BeamformingInstance& inst) {
    inst.validate();
    nlohmann::json j;
    j["n_t"] = inst.nt;
    j["k"] = inst.k;
    j["sigma2"] = inst.noise_powers;
    j["gamma_db"] = inst.gamma_db;
    j["rho"] = inst.rho;
    nlohmann::json ch = nlohmann::json::array();
    for (const auto& h : inst.channels)
        ch.push_back(cvec_to_json(h));
    j["channels"] = ch;

    nlohmann::json em;
    if (inst.error_model.kind == ErrorModel::Kind::UniformIID) {
        em["type"] = "uniform";
        em["epsilon"] = inst.error_model.epsilon;
    } else if (inst.error_model.gaussian_params) {
        em["type"] = "gaussian";
        em["sigma_e2"] = inst.error_model.gaussian_params->first;
        em["correlation"] = inst.error_model.gaussian_params->second;
    } else {
        em["type"] = "gaussian";
        nlohmann::json covs = nlohmann::json::array();
        for (const auto& c : inst.error_model.cov) {
            nlohmann::json rowsj = nlohmann::json::array();
            for (int r = 0; r < c.dim(); ++r) {
                CVec row(c.dim());
                for (int cc = 0; cc < c.dim(); ++cc)
                    row[cc] = c(r, cc);
                rowsj.push_back(cvec_to_json(row));
            }
            covs.push_back(rowsj);
        }
        em["cov"] = covs;
    }
    j["error_model"] = em;
    return j;
}

inline BeamformingInstance instance_from_json(const nlohmann::json& j) {
    BeamformingInstance inst;
    inst.nt = j.at("n_t").get<int>();
    inst.k = j.at("k").get<int>();
    inst.noise_powers = j.at("sigma2").get<std::vector<double>>();
    inst.gamma_db = j.at("gamma_db").get<std::vector<double>>();
    inst.rho = j.at("rho").get<std::vector<double>>();
    for (const auto& a : j.at("channels"))
        inst.channels.push_back(cvec_from_json(a));

    const auto& em = j.at("error_model");
    const std::string type = em.at("type").get<std::string>();
    if (type == "uniform") {
        inst.error_model.kind = ErrorModel::Kind::UniformIID;
        inst.error_model.epsilon = em.at("epsilon").get<std::vector<double>>();
    } else if (type == "gaussian") {
        if (em.contains("cov")) {
            std::vector<HermitianMatrix> covs;
            for (const auto& cj : em.at("cov")) {
                const int n = static_cast<int>(cj.size());
                CMat m(n, n);
                for (int r = 0; r < n; ++r) {
                    const CVec row = cvec_from_json(cj[r]);
                    for (int c = 0; c < n; ++c)
                        m(r, c) = row[c];
                }
                covs.push_back(HermitianMatrix::from_dense(m, 1e-9));
            }
            inst.error_model = ErrorModel::gaussian(std::move(covs));
        } else {
            const double se2 = em.at("sigma_e2").get<double>();
            const double corr = em.value("correlation", 0.0);
            inst.error_model = corr == 0.0
                                   ? ErrorModel::gaussian_iid(se2, inst.nt, inst.k)
                                   : ErrorModel::gaussian_correlated(se2, corr, inst.nt, inst.k);
        }
    } else {
        throw std::invalid_argument("instance_from_json: unknown error model type '" + type + "'");
    }
    inst.validate();
    return inst;
}

inline void save_instance(const BeamformingInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_instance: cannot open " + path);
    out << instance_to_json(inst).dump(2) << "\n";
}

inline BeamformingInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_instance: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return instance_from_json(j);
}

inline nlohmann::json beamformers_to_json(const BeamformerSet& w) {
    nlohmann::json j;
    nlohmann::json beams = nlohmann::json::array();
    for (const auto& wi : w.w)
        beams.push_back(cvec_to_json(wi));
    j["beams"] = beams;
    j["total_power"] = w.total_power();
    return j;
}

inline BeamformerSet beamformers_from_json(const nlohmann::json& j) {
    BeamformerSet w;
    for (const auto& a : j.at("beams"))
        w.w.push_back(cvec_from_json(a));
    return w;
}

}  // namespace robeam

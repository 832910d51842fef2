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
// Artifact emission: CSV tables (documented schemas), run manifests, and
// minimal standalone SVG charts.  All numeric formatting is locale-free and
// shortest-round-trip so repeated runs produce byte-identical files.

#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "robeam/experiment.hpp"

namespace robeam {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char cand[32];
        std::snprintf(cand, sizeof cand, "%.*g", prec, v);
        double back;
        std::sscanf(cand, "%lf", &back);
        if (back == v)
            return cand;
    }
    return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_file: cannot open " + path);
    out << content;
}

// --- CSV schemas ---

/// method,gamma_db,value,n_trials
inline std::string csv_sweep(const SweepTable& t) {
    std::string s = "method,gamma_db,value,n_trials\n";
    for (const auto& r : t.rows)
        s += r.method + "," + fmt_double(r.gamma_db) + "," + fmt_double(r.value) + "," +
             std::to_string(r.n_trials) + "\n";
    return s;
}

/// method,bin_lo,bin_hi,count
inline std::string csv_histogram(const HistogramTable& t) {
    std::string s = "method,bin_lo,bin_hi,count\n";
    for (const auto& r : t.rows)
        s += r.method + "," + fmt_double(r.bin_lo) + "," + fmt_double(r.bin_hi) + "," +
             std::to_string(r.count) + "\n";
    return s;
}

/// trial,user,p_hat,radius,pass — per-user validation records of one method
/// at the pick-up gamma.
inline std::string csv_validation(const ExperimentConfig& cfg, const GridResults& grid,
                                  int method_index) {
    int pickup = -1;
    for (size_t gi = 0; gi < cfg.gamma_grid_db.size(); ++gi)
        if (cfg.gamma_grid_db[gi] == cfg.pickup_gamma_db)
            pickup = static_cast<int>(gi);
    if (pickup < 0)
        throw std::invalid_argument("csv_validation: pick-up gamma not on the grid");
    std::string s = "trial,user,p_hat,radius,pass\n";
    const auto& cells = grid.cells[method_index][pickup];
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const auto& cell = cells[trial];
        if (!cell.validated)
            continue;
        for (size_t u = 0; u < cell.p_hat.size(); ++u) {
            const double p = cell.p_hat[u];
            const double radius = 3.0 * std::sqrt(p * (1.0 - p) / cfg.final_mc_samples);
            const bool pass = p >= 1.0 - cfg.rho - radius;
            s += std::to_string(trial) + "," + std::to_string(u) + "," + fmt_double(p) + "," +
                 fmt_double(radius) + "," + (pass ? "1" : "0") + "\n";
        }
    }
    return s;
}

/// method,nt,k,median_seconds,iqr_lo,iqr_hi,reps,cone_rows
inline std::string csv_bench(const std::vector<BenchRow>& rows) {
    std::string s = "method,nt,k,median_seconds,iqr_lo,iqr_hi,reps,cone_rows\n";
    for (const auto& r : rows)
        s += r.method + "," + std::to_string(r.nt) + "," + std::to_string(r.k) + "," +
             fmt_double(r.median_seconds) + "," + fmt_double(r.iqr_lo) + "," +
             fmt_double(r.iqr_hi) + "," + std::to_string(r.reps) + "," +
             std::to_string(r.cone_rows) + "\n";
    return s;
}

// --- run manifest ---

inline nlohmann::json make_manifest(const std::string& subcommand,
                                    const std::vector<std::string>& argv_resolved,
                                    std::uint64_t seed, double wall_seconds) {
    nlohmann::json m;
    m["tool"] = "robeam";
    m["version"] = "0.1.0";
    m["subcommand"] = subcommand;
    m["argv_resolved"] = argv_resolved;
    m["seed"] = seed;
    m["wall_seconds"] = wall_seconds;
    return m;
}

// --- minimal SVG line/bar charts ---

namespace detail_svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline const char* color(int i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    return palette[i % 6];
}

}  // namespace detail_svg

/// One polyline per method: value against gamma_db.
inline std::string svg_sweep(const SweepTable& t, const std::string& title,
                             const std::string& ylabel) {
    const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    std::vector<std::string> methods;
    for (const auto& r : t.rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        if (!std::isfinite(r.value))
            continue;
        xmin = std::min(xmin, r.gamma_db);
        xmax = std::max(xmax, r.gamma_db);
        ymax = std::max(ymax, r.value);
    }
    if (xmax <= xmin)
        xmax = xmin + 1.0;
    if (ymax <= ymin)
        ymax = ymin + 1.0;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    detail_svg::num(w) + "\" height=\"" + detail_svg::num(h) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + detail_svg::num(w / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
    // axes
    s += "<line x1=\"" + detail_svg::num(ml) + "\" y1=\"" + detail_svg::num(h - mb) +
         "\" x2=\"" + detail_svg::num(w - mr) + "\" y2=\"" + detail_svg::num(h - mb) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + detail_svg::num(ml) + "\" y1=\"" + detail_svg::num(mt) + "\" x2=\"" +
         detail_svg::num(ml) + "\" y2=\"" + detail_svg::num(h - mb) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + detail_svg::num(w / 2) + "\" y=\"" + detail_svg::num(h - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">gamma (dB)"
         "</text>\n";
    s += "<text x=\"16\" y=\"" + detail_svg::num(h / 2) +
         "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         detail_svg::num(h / 2) + ")\" text-anchor=\"middle\">" + ylabel + "</text>\n";
    // y ticks
    for (int tick = 0; tick <= 4; ++tick) {
        const double yv = ymin + (ymax - ymin) * tick / 4.0;
        s += "<text x=\"" + detail_svg::num(ml - 8) + "\" y=\"" + detail_svg::num(py(yv) + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
             fmt_double(std::round(yv * 100) / 100) + "</text>\n";
    }
    int mi = 0;
    for (const auto& method : methods) {
        std::string pts;
        for (const auto& r : t.rows)
            if (r.method == method && std::isfinite(r.value))
                pts += detail_svg::num(px(r.gamma_db)) + "," + detail_svg::num(py(r.value)) + " ";
        s += "<polyline fill=\"none\" stroke=\"" + std::string(detail_svg::color(mi)) +
             "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        s += "<text x=\"" + detail_svg::num(w - mr - 8) + "\" y=\"" +
             detail_svg::num(mt + 16 * mi + 12) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
             detail_svg::color(mi) + "\">" + method + "</text>\n";
        ++mi;
    }
    s += "</svg>\n";
    return s;
}

/// Per-method histogram bars of min-user satisfaction probability.
inline std::string svg_histogram(const HistogramTable& t, const std::string& title) {
    const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    std::vector<std::string> methods;
    int cmax = 1;
    for (const auto& r : t.rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        cmax = std::max(cmax, r.count);
    }
    auto px = [&](double x) { return ml + x * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - y / cmax * (h - mt - mb); };
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    detail_svg::num(w) + "\" height=\"" + detail_svg::num(h) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + detail_svg::num(w / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
    s += "<line x1=\"" + detail_svg::num(ml) + "\" y1=\"" + detail_svg::num(h - mb) +
         "\" x2=\"" + detail_svg::num(w - mr) + "\" y2=\"" + detail_svg::num(h - mb) +
         "\" stroke=\"black\"/>\n";
    int mi = 0;
    const int nm = std::max<int>(1, static_cast<int>(methods.size()));
    for (const auto& method : methods) {
        for (const auto& r : t.rows) {
            if (r.method != method || r.count == 0)
                continue;
            const double x0 = px(r.bin_lo), x1 = px(r.bin_hi);
            const double bw = (x1 - x0) / nm;
            s += "<rect x=\"" + detail_svg::num(x0 + bw * mi) + "\" y=\"" +
                 detail_svg::num(py(r.count)) + "\" width=\"" + detail_svg::num(bw * 0.9) +
                 "\" height=\"" + detail_svg::num(h - mb - py(r.count)) + "\" fill=\"" +
                 detail_svg::color(mi) + "\" fill-opacity=\"0.8\"/>\n";
        }
        s += "<text x=\"" + detail_svg::num(w - mr - 8) + "\" y=\"" +
             detail_svg::num(mt + 16 * mi + 12) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
             detail_svg::color(mi) + "\">" + method + "</text>\n";
        ++mi;
    }
    s += "</svg>\n";
    return s;
}

}  // namespace robeam

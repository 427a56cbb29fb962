// SPDX-License-Identifier: Apache-2.0
//
// csiloc -- CSI fingerprint localization toolkit
// Copyright (C) 2026 the csiloc authors
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
// Localization error metrics: MDE, maximum error, and the empirical CDF
// used to compare methods, plus the CSV/JSON report writers. Reports are
// byte-deterministic for identical inputs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csiloc/common.hpp"

namespace csiloc {

inline std::vector<double> per_sample_errors(std::span<const LocationEstimate> estimates,
                                             std::span<const Point2> truths) {
    if (estimates.size() != truths.size() || estimates.empty())
        throw parameter_error("per_sample_errors: length mismatch or empty input");
    std::vector<double> errors;
    errors.reserve(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i)
        errors.push_back(distance(estimates[i].xy, truths[i]));
    return errors;
}

// Mean Euclidean distance between estimates and truths.
inline double mde(std::span<const LocationEstimate> estimates, std::span<const Point2> truths) {
    const std::vector<double> errors = per_sample_errors(estimates, truths);
    double sum = 0.0;
    for (double e : errors) sum += e;
    return sum / static_cast<double>(errors.size());
}

// Empirical CDF as (sorted error, i/n) step points.
inline std::vector<std::pair<double, double>> error_cdf(std::vector<double> errors) {
    if (errors.empty()) throw parameter_error("error_cdf: empty error list");
    std::sort(errors.begin(), errors.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(errors.size());
    const double n = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        cdf.emplace_back(errors[i], static_cast<double>(i + 1) / n);
    return cdf;
}

struct ErrorReport {
    std::string method_tag;
    std::vector<double> per_sample_errors;
    double mde = 0.0;
    double max_error = 0.0;
    std::vector<std::pair<double, double>> cdf;
    std::uint64_t scene_digest = 0;
    std::uint64_t config_digest = 0;

    static ErrorReport from_errors(std::string method_tag, std::vector<double> errors,
                                   std::uint64_t scene_digest, std::uint64_t config_digest) {
        if (errors.empty()) throw parameter_error("ErrorReport: empty error list");
        ErrorReport r;
        r.method_tag = std::move(method_tag);
        r.per_sample_errors = std::move(errors);
        double sum = 0.0;
        r.max_error = r.per_sample_errors.front();
        for (double e : r.per_sample_errors) {
            sum += e;
            r.max_error = std::max(r.max_error, e);
        }
        r.mde = sum / static_cast<double>(r.per_sample_errors.size());
        r.cdf = error_cdf(r.per_sample_errors);
        r.scene_digest = scene_digest;
        r.config_digest = config_digest;
        return r;
    }
};

namespace metrics_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace metrics_detail

inline void write_errors_csv(const ErrorReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    out << "index,error_m\n";
    for (std::size_t i = 0; i < report.per_sample_errors.size(); ++i)
        out << i << ',' << metrics_detail::fmt(report.per_sample_errors[i]) << '\n';
}

inline void write_cdf_csv(const ErrorReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    out << "error_m,cumulative_fraction\n";
    for (const auto& [e, f] : report.cdf)
        out << metrics_detail::fmt(e) << ',' << metrics_detail::fmt(f) << '\n';
}

inline void write_summary_json(std::span<const ErrorReport> reports,
                               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    out << "{\n  \"methods\": {\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const ErrorReport& r = reports[i];
        out << "    \"" << r.method_tag << "\": {"
            << "\"mde_m\": " << metrics_detail::fmt(r.mde)
            << ", \"max_error_m\": " << metrics_detail::fmt(r.max_error)
            << ", \"samples\": " << r.per_sample_errors.size()
            << ", \"scene_digest\": \"" << std::to_string(r.scene_digest) << "\""
            << ", \"config_digest\": \"" << std::to_string(r.config_digest) << "\"}";
        out << (i + 1 < reports.size() ? ",\n" : "\n");
    }
    out << "  }\n}\n";
}

}  // namespace csiloc

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

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "csiloc/metrics.hpp"
#include "csiloc/rng.hpp"
#include "test_support.hpp"

using namespace csiloc;

namespace {

std::vector<LocationEstimate> as_estimates(const std::vector<Point2>& pts) {
    std::vector<LocationEstimate> out;
    for (const auto& p : pts) out.push_back(LocationEstimate{p, EstimateSource::knn});
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("mde closed forms") {
    const std::vector<Point2> truths{{0.0, 0.0}, {5.0, 5.0}};
    REQUIRE(mde(as_estimates({{0.0, 0.0}, {5.0, 5.0}}), truths) == 0.0);

    // single 3-4-5 offset
    REQUIRE(mde(as_estimates({{3.0, 4.0}}), std::vector<Point2>{{0.0, 0.0}}) == 5.0);

    // offsets (3,4) and (0,0): mean of {5, 0}
    REQUIRE(mde(as_estimates({{3.0, 4.0}, {5.0, 5.0}}), truths) == 2.5);

    REQUIRE_THROWS_AS(mde(as_estimates({{0.0, 0.0}}), truths), parameter_error);
    REQUIRE_THROWS_AS(mde({}, {}), parameter_error);
}

TEST_CASE("error_cdf matches its definition") {
    const auto cdf = error_cdf({4.0, 1.0, 3.0, 2.0});
    const std::vector<std::pair<double, double>> expected{
        {1.0, 0.25}, {2.0, 0.5}, {3.0, 0.75}, {4.0, 1.0}};
    REQUIRE(cdf == expected);

    const auto flat = error_cdf({2.5, 2.5, 2.5});
    for (const auto& [e, f] : flat) REQUIRE(e == 2.5);
    REQUIRE(flat.back().second == 1.0);

    REQUIRE_THROWS_AS(error_cdf({}), parameter_error);
}

TEST_CASE("median read from the CDF equals the sort-based median") {
    const CounterRng rng(77);
    std::vector<double> errors;
    for (int i = 0; i < 1000; ++i)
        errors.push_back(10.0 * rng.uniform(static_cast<std::uint64_t>(i)));
    const auto cdf = error_cdf(errors);
    double from_cdf = cdf.back().first;
    for (const auto& [e, f] : cdf)
        if (f >= 0.5) {
            from_cdf = e;
            break;
        }
    // the 0.5-quantile step lands within one order statistic of the median
    const double direct = test::sorted_median(errors);
    REQUIRE(from_cdf <= direct + 1e-12);
    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(from_cdf == sorted[499]);  // i/n reaches 0.5 exactly at rank n/2
}

TEST_CASE("error report is internally consistent") {
    const CounterRng rng(5);
    std::vector<double> errors;
    for (int i = 0; i < 257; ++i)
        errors.push_back(3.0 * rng.uniform(static_cast<std::uint64_t>(i)));
    const ErrorReport r = ErrorReport::from_errors("knn", errors, 111, 222);

    double sum = 0.0, mx = 0.0;
    for (double e : r.per_sample_errors) {
        sum += e;
        mx = std::max(mx, e);
    }
    REQUIRE(r.mde == sum / static_cast<double>(r.per_sample_errors.size()));
    REQUIRE(r.max_error == mx);
    REQUIRE(r.cdf.size() == r.per_sample_errors.size());
    for (std::size_t i = 1; i < r.cdf.size(); ++i) {
        REQUIRE(r.cdf[i].first >= r.cdf[i - 1].first);
        REQUIRE(r.cdf[i].second > r.cdf[i - 1].second);
    }
    REQUIRE(r.cdf.back().second == 1.0);
}

TEST_CASE("report writers are byte-deterministic") {
    const ErrorReport r =
        ErrorReport::from_errors("sln", {0.25, 1.5, 0.125, 3.75, 0.5}, 9, 10);
    const auto errors_path = test::temp_path("errors.csv");
    const auto cdf_path = test::temp_path("cdf.csv");
    const auto summary_path = test::temp_path("summary.json");

    write_errors_csv(r, errors_path);
    write_cdf_csv(r, cdf_path);
    write_summary_json(std::vector<ErrorReport>{r}, summary_path);
    const std::string e1 = slurp(errors_path), c1 = slurp(cdf_path), s1 = slurp(summary_path);

    write_errors_csv(r, errors_path);
    write_cdf_csv(r, cdf_path);
    write_summary_json(std::vector<ErrorReport>{r}, summary_path);
    REQUIRE(slurp(errors_path) == e1);
    REQUIRE(slurp(cdf_path) == c1);
    REQUIRE(slurp(summary_path) == s1);

    REQUIRE(e1.find("index,error_m") == 0);
    REQUIRE(c1.find("error_m,cumulative_fraction") == 0);
    REQUIRE(s1.find("\"sln\"") != std::string::npos);

    std::filesystem::remove(errors_path);
    std::filesystem::remove(cdf_path);
    std::filesystem::remove(summary_path);
}

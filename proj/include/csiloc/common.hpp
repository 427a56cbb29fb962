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

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csiloc {

// Error taxonomy. Everything thrown by the library derives from csiloc::error
// so callers can distinguish library faults from std exceptions.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument to an operation (width mismatch, invalid k, bad fraction, ...).
struct parameter_error : error {
    using error::error;
};

// Input outside the feasible localization area.
struct domain_error : error {
    using error::error;
};

// Malformed or truncated file. Carries the byte offset where parsing failed.
struct format_error : error {
    format_error(const std::string& what, std::uint64_t byte_offset)
        : error(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::uint64_t offset = 0;
};

// Mismatched or stale internal state (e.g. backward() with a foreign cache).
struct state_error : error {
    using error::error;
};

// Training diverged. Carries the last epoch whose losses were still finite.
struct training_error : error {
    training_error(const std::string& what, int last_finite)
        : error(what), last_finite_epoch(last_finite) {}
    int last_finite_epoch = -1;
};

// Bad or missing configuration key/value.
struct config_error : error {
    using error::error;
};

// A pipeline stage failed. Carries the stage name for diagnostics.
struct stage_error : error {
    stage_error(const std::string& stage_name, const std::string& what)
        : error("stage '" + stage_name + "' failed: " + what), stage(stage_name) {}
    std::string stage;
};

// 2-D point in meters.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2& a, const Point2& b) {
        return a.x == b.x && a.y == b.y;
    }
};

inline double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Axis-aligned rectangle, [min_x, max_x] x [min_y, max_y].
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    bool contains(const Point2& p) const {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    Point2 center() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }

    // Rectangle grown by `factor` of its extent on every side (0.1 = +10%).
    Rect expanded(double factor) const {
        const double dx = width() * factor;
        const double dy = height() * factor;
        return {min_x - dx, min_y - dy, max_x + dx, max_y + dy};
    }

    friend bool operator==(const Rect& a, const Rect& b) {
        return a.min_x == b.min_x && a.min_y == b.min_y && a.max_x == b.max_x &&
               a.max_y == b.max_y;
    }
};

// Which estimator produced a location estimate.
enum class EstimateSource : std::uint8_t { knn = 0, wknn = 1, sln = 2, fusion = 3 };

inline const char* to_string(EstimateSource s) {
    switch (s) {
        case EstimateSource::knn: return "knn";
        case EstimateSource::wknn: return "wknn";
        case EstimateSource::sln: return "sln";
        case EstimateSource::fusion: return "fusion";
    }
    return "unknown";
}

// A single 2-D position estimate in meters.
struct LocationEstimate {
    Point2 xy;
    EstimateSource source = EstimateSource::knn;
};

// One slot's amplitude fingerprint, flattened row-major over
// [n_tx x n_subcarriers]. Entries are nonnegative linear gains.
using CsiSnapshot = std::vector<double>;

}  // namespace csiloc

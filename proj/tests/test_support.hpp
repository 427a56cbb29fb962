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
// Shared test helpers and independent oracles. Everything here is written
// from first principles (sorts, scans, hull walks) so it stays independent
// of the implementation paths it cross-checks.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csiloc/common.hpp"

namespace csiloc::test {

inline std::filesystem::path temp_path(const std::string& stem) {
    static std::atomic<std::uint64_t> counter{0};
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "csiloc_tests";
    std::filesystem::create_directories(dir);
    return dir / (stem + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter.fetch_add(1)));
}

// Exhaustive k-NN oracle: full scan, full sort on (distance^2, index).
inline std::vector<std::pair<double, int>> brute_force_knn(
    const std::vector<std::vector<double>>& points, const std::vector<double>& query, int k) {
    std::vector<std::pair<double, int>> all;
    all.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j) {
            const double diff = query[j] - points[i][j];
            d2 += diff * diff;
        }
        all.emplace_back(d2, static_cast<int>(i));
    }
    std::sort(all.begin(), all.end());
    all.resize(static_cast<std::size_t>(k));
    for (auto& [d2, i] : all) d2 = std::sqrt(d2);
    return all;
}

// Convex hull via Andrew's monotone chain (counter-clockwise).
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    const auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Point-in-convex-polygon oracle (hull counter-clockwise), with tolerance
// for points on the boundary.
inline bool inside_hull(const std::vector<Point2>& hull, const Point2& p, double tol = 1e-9) {
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2& a = hull[i];
        const Point2& b = hull[(i + 1) % hull.size()];
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (cross < -tol) return false;
    }
    return true;
}

inline double sorted_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace csiloc::test

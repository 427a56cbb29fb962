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

#include "csiloc/crs.hpp"

using namespace csiloc;

TEST_CASE("one RB holds exactly two comb positions") {
    const CrsLayout layout = crs_subcarrier_indices(1, 0, 0);
    REQUIRE(layout.subcarrier_indices == std::vector<int>{0, 6});
    REQUIRE(layout.n_subcarriers() == 2);
}

TEST_CASE("25 RBs give the 50-wide comb 0,6,...,294") {
    const CrsLayout layout = crs_subcarrier_indices(25, 0, 0);
    REQUIRE(layout.n_subcarriers() == 50);
    // independent enumeration: all multiples of 6 below 300
    std::vector<int> expected;
    for (int k = 0; 6 * k < 300; ++k) expected.push_back(6 * k);
    REQUIRE(layout.subcarrier_indices == expected);
    REQUIRE(layout.subcarrier_indices.front() == 0);
    REQUIRE(layout.subcarrier_indices.back() == 294);
}

TEST_CASE("cell shift rotates the comb") {
    const CrsLayout layout = crs_subcarrier_indices(1, 0, 3);
    REQUIRE(layout.subcarrier_indices == std::vector<int>{3, 9});
}

TEST_CASE("ports 1 and 3 ride the offset comb") {
    REQUIRE(crs_subcarrier_indices(1, 1, 0).subcarrier_indices == std::vector<int>{3, 9});
    REQUIRE(crs_subcarrier_indices(1, 3, 2).subcarrier_indices == std::vector<int>{5, 11});
    REQUIRE(crs_subcarrier_indices(1, 2, 1).subcarrier_indices == std::vector<int>{1, 7});
    // shift + port offset wraps inside the 6-subcarrier period
    REQUIRE(crs_subcarrier_indices(1, 1, 4).subcarrier_indices == std::vector<int>{1, 7});
}

TEST_CASE("comb properties hold for every port and shift") {
    for (int n_rb : {1, 2, 6, 25, 100}) {
        for (int port = 0; port < 4; ++port) {
            for (int shift = 0; shift <= 5; ++shift) {
                const CrsLayout layout = crs_subcarrier_indices(n_rb, port, shift);
                REQUIRE(layout.n_subcarriers() == 2 * n_rb);
                for (std::size_t i = 0; i < layout.subcarrier_indices.size(); ++i) {
                    const int k = layout.subcarrier_indices[i];
                    REQUIRE(k >= 0);
                    REQUIRE(k < 12 * n_rb);
                    if (i > 0) REQUIRE(k == layout.subcarrier_indices[i - 1] + 6);
                }
            }
        }
    }
}

TEST_CASE("invalid layout parameters are rejected") {
    REQUIRE_THROWS_AS(crs_subcarrier_indices(0, 0, 0), parameter_error);
    REQUIRE_THROWS_AS(crs_subcarrier_indices(1, 4, 0), parameter_error);
    REQUIRE_THROWS_AS(crs_subcarrier_indices(1, -1, 0), parameter_error);
    REQUIRE_THROWS_AS(crs_subcarrier_indices(1, 0, 6), parameter_error);
    REQUIRE_THROWS_AS(crs_subcarrier_indices(1, 0, -1), parameter_error);
}

TEST_CASE("layout digest tracks content") {
    REQUIRE(crs_subcarrier_indices(25, 0, 0).digest() ==
            crs_subcarrier_indices(25, 0, 0).digest());
    REQUIRE(crs_subcarrier_indices(25, 0, 0).digest() !=
            crs_subcarrier_indices(25, 0, 1).digest());
}

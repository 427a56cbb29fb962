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

#include <cstdint>
#include <vector>

#include "csiloc/binio.hpp"
#include "csiloc/common.hpp"

namespace csiloc {

// Cell-specific reference signal frequency comb for one antenna port in the
// first CRS-bearing OFDM symbol of a slot. One RB spans 12 subcarriers and
// carries two CRS resource elements per symbol, so a layout over n_rb RBs has
// exactly 2*n_rb pilot subcarriers, spaced 6 apart.
struct CrsLayout {
    int n_rb = 0;
    int port = 0;
    int cell_shift = 0;                   // cell-id derived comb shift, 0..5
    std::vector<int> subcarrier_indices;  // strictly increasing, < 12*n_rb

    int n_subcarriers() const { return static_cast<int>(subcarrier_indices.size()); }

    std::uint64_t digest() const {
        ByteWriter w;
        w.i32(n_rb);
        w.i32(port);
        w.i32(cell_shift);
        for (int k : subcarrier_indices) w.i32(k);
        return w.content_hash();
    }

    friend bool operator==(const CrsLayout& a, const CrsLayout& b) {
        return a.n_rb == b.n_rb && a.port == b.port && a.cell_shift == b.cell_shift &&
               a.subcarrier_indices == b.subcarrier_indices;
    }
};

// Pilot subcarriers of the first CRS-bearing symbol for the given port.
// Ports 1 and 3 ride the comb offset by 3 relative to ports 0 and 2; the
// cell shift rotates the whole comb within its 6-subcarrier period.
inline CrsLayout crs_subcarrier_indices(int n_rb, int port, int cell_shift) {
    if (n_rb < 1) throw parameter_error("crs_subcarrier_indices: n_rb must be >= 1");
    if (port < 0 || port > 3)
        throw parameter_error("crs_subcarrier_indices: port must be in {0,1,2,3}");
    if (cell_shift < 0 || cell_shift > 5)
        throw parameter_error("crs_subcarrier_indices: cell_shift must be in 0..5");

    const int port_offset = (port == 1 || port == 3) ? 3 : 0;
    const int shift = (cell_shift + port_offset) % 6;

    CrsLayout layout;
    layout.n_rb = n_rb;
    layout.port = port;
    layout.cell_shift = cell_shift;
    layout.subcarrier_indices.reserve(static_cast<std::size_t>(2 * n_rb));
    for (int k = shift; k < 12 * n_rb; k += 6) layout.subcarrier_indices.push_back(k);
    return layout;
}

}  // namespace csiloc

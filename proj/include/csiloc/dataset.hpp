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
// Fingerprint datasets: the offline CSI map and derived training material.
//
// File format (all little-endian):
//   32-byte header: magic "CSILOCFP", u16 version, u16 flags, u32 feature
//   length, u64 record count, u64 reserved; then u64 scene digest, the CRS
//   layout descriptor, u32 n_tx, the normalization vectors, and fixed-width
//   records (f64 x, f64 y, i32 rp_index, i64 slot, f64 amplitudes). Fixed
//   record width gives bit-exact round-trips and O(1) record addressing.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csiloc/binio.hpp"
#include "csiloc/channel.hpp"
#include "csiloc/common.hpp"
#include "csiloc/crs.hpp"
#include "csiloc/rng.hpp"

namespace csiloc {

inline constexpr std::string_view kDatasetMagic = "CSILOCFP";
inline constexpr std::uint16_t kDatasetVersion = 1;

// One slot's labeled fingerprint. rp_index is -1 for test-point records.
struct FingerprintRecord {
    Point2 location;
    std::int32_t rp_index = -1;
    std::int64_t slot = 0;
    CsiSnapshot snapshot;

    friend bool operator==(const FingerprintRecord& a, const FingerprintRecord& b) {
        return a.location == b.location && a.rp_index == b.rp_index && a.slot == b.slot &&
               a.snapshot == b.snapshot;
    }
};

// Per-feature standardization: x -> (x - mean) / scale, scale > 0.
struct Normalization {
    std::vector<double> mean;
    std::vector<double> scale;

    std::size_t size() const { return mean.size(); }

    void validate() const {
        if (mean.size() != scale.size())
            throw parameter_error("Normalization: mean/scale length mismatch");
        for (double s : scale)
            if (!(s > 0.0)) throw parameter_error("Normalization: scale entries must be > 0");
    }

    void apply(std::span<const double> in, std::span<double> out) const {
        if (in.size() != mean.size() || out.size() != mean.size())
            throw parameter_error("Normalization: feature width mismatch");
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = (in[i] - mean[i]) / scale[i];
    }

    std::vector<double> applied(std::span<const double> in) const {
        std::vector<double> out(in.size());
        apply(in, out);
        return out;
    }

    friend bool operator==(const Normalization& a, const Normalization& b) {
        return a.mean == b.mean && a.scale == b.scale;
    }
};

struct FingerprintDataset {
    CrsLayout layout;
    int n_tx = 1;
    std::uint64_t scene_digest = 0;
    std::vector<FingerprintRecord> records;
    Normalization normalization;

    int feature_len() const { return n_tx * layout.n_subcarriers(); }

    void validate() const {
        normalization.validate();
        if (static_cast<int>(normalization.size()) != feature_len())
            throw parameter_error("FingerprintDataset: normalization width mismatch");
        for (const auto& r : records)
            if (static_cast<int>(r.snapshot.size()) != feature_len())
                throw parameter_error("FingerprintDataset: record width mismatch");
    }

    ByteWriter serialize() const {
        ByteWriter w;
        w.ascii(kDatasetMagic);
        w.u16(kDatasetVersion);
        w.u16(0);  // flags
        w.u32(static_cast<std::uint32_t>(feature_len()));
        w.u64(records.size());
        w.u64(0);  // reserved; header is exactly 32 bytes
        w.u64(scene_digest);
        w.i32(layout.n_rb);
        w.i32(layout.port);
        w.i32(layout.cell_shift);
        w.u32(static_cast<std::uint32_t>(layout.subcarrier_indices.size()));
        for (int k : layout.subcarrier_indices) w.i32(k);
        w.u32(static_cast<std::uint32_t>(n_tx));
        for (double v : normalization.mean) w.f64(v);
        for (double v : normalization.scale) w.f64(v);
        for (const auto& r : records) {
            w.f64(r.location.x);
            w.f64(r.location.y);
            w.i32(r.rp_index);
            w.i64(r.slot);
            for (double a : r.snapshot) w.f64(a);
        }
        return w;
    }

    std::uint64_t content_hash() const { return serialize().content_hash(); }
};

// Standardization statistics over all records of a dataset.
inline Normalization compute_normalization(const FingerprintDataset& dataset) {
    if (dataset.records.empty())
        throw parameter_error("compute_normalization: empty dataset");
    const std::size_t d = dataset.records.front().snapshot.size();
    Normalization norm;
    norm.mean.assign(d, 0.0);
    norm.scale.assign(d, 0.0);
    const double n = static_cast<double>(dataset.records.size());
    for (const auto& r : dataset.records)
        for (std::size_t i = 0; i < d; ++i) norm.mean[i] += r.snapshot[i];
    for (double& m : norm.mean) m /= n;
    for (const auto& r : dataset.records)
        for (std::size_t i = 0; i < d; ++i) {
            const double c = r.snapshot[i] - norm.mean[i];
            norm.scale[i] += c * c;
        }
    for (double& s : norm.scale) {
        s = std::sqrt(s / n);
        if (s < 1e-12) s = 1e-12;  // constant features map to ~0 after centering
    }
    return norm;
}

// Offline map generation: one record per (RP, slot), normalization over all
// records.
inline FingerprintDataset build_map(const Scene& scene, const ChannelParams& params,
                                    int slots_per_rp) {
    if (slots_per_rp < 1) throw parameter_error("build_map: slots_per_rp must be >= 1");
    scene.validate();
    params.validate();

    FingerprintDataset ds;
    ds.layout = crs_subcarrier_indices(scene.n_rb, 0, 0);
    ds.n_tx = scene.n_tx;
    ds.scene_digest = scene.digest();
    ds.records.reserve(scene.rp_locations.size() * static_cast<std::size_t>(slots_per_rp));
    for (std::size_t m = 0; m < scene.rp_locations.size(); ++m) {
        const LocationChannel chan(scene, params, ds.layout, scene.rp_locations[m]);
        for (int slot = 0; slot < slots_per_rp; ++slot)
            ds.records.push_back(FingerprintRecord{scene.rp_locations[m],
                                                   static_cast<std::int32_t>(m),
                                                   slot, chan.snapshot(slot)});
    }
    ds.normalization = compute_normalization(ds);
    return ds;
}

// Deterministic stratified split into train/val/test. Strata are rp_index
// groups; per-stratum counts follow the fractions with largest-remainder
// rounding. The train split's normalization is recomputed from its own
// records and copied onto val/test so no statistics leak out of train.
inline std::array<FingerprintDataset, 3> split(const FingerprintDataset& dataset,
                                               std::array<double, 3> fractions,
                                               std::uint64_t seed) {
    for (double f : fractions)
        if (!(f > 0.0)) throw parameter_error("split: fractions must be positive");
    const double total = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(total - 1.0) > 1e-9)
        throw parameter_error("split: fractions must sum to 1");

    std::map<std::int32_t, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < dataset.records.size(); ++i)
        strata[dataset.records[i].rp_index].push_back(i);

    std::array<FingerprintDataset, 3> parts;
    for (auto& p : parts) {
        p.layout = dataset.layout;
        p.n_tx = dataset.n_tx;
        p.scene_digest = dataset.scene_digest;
    }

    for (auto& [rp, indices] : strata) {
        if (indices.size() < 3)
            throw parameter_error("split: stratum rp_index=" + std::to_string(rp) +
                                  " has fewer than 3 records");
        RngStream rng(CounterRng(seed).fork("split").fork(
            static_cast<std::uint64_t>(static_cast<std::int64_t>(rp))));
        deterministic_shuffle(indices, rng);

        const std::size_t n = indices.size();
        std::array<std::size_t, 3> counts{};
        std::array<double, 3> remainders{};
        std::size_t assigned = 0;
        for (int j = 0; j < 3; ++j) {
            const double want = fractions[static_cast<std::size_t>(j)] * static_cast<double>(n);
            counts[static_cast<std::size_t>(j)] = static_cast<std::size_t>(want);
            remainders[static_cast<std::size_t>(j)] =
                want - static_cast<double>(counts[static_cast<std::size_t>(j)]);
            assigned += counts[static_cast<std::size_t>(j)];
        }
        while (assigned < n) {  // hand leftovers to the largest remainders
            int best = 0;
            for (int j = 1; j < 3; ++j)
                if (remainders[static_cast<std::size_t>(j)] >
                    remainders[static_cast<std::size_t>(best)])
                    best = j;
            ++counts[static_cast<std::size_t>(best)];
            remainders[static_cast<std::size_t>(best)] = -1.0;
            ++assigned;
        }

        std::size_t cursor = 0;
        for (int j = 0; j < 3; ++j)
            for (std::size_t c = 0; c < counts[static_cast<std::size_t>(j)]; ++c)
                parts[static_cast<std::size_t>(j)].records.push_back(
                    dataset.records[indices[cursor++]]);
    }

    parts[0].normalization = compute_normalization(parts[0]);
    parts[1].normalization = parts[0].normalization;
    parts[2].normalization = parts[0].normalization;
    return parts;
}

inline void write_dataset(const FingerprintDataset& dataset,
                          const std::filesystem::path& path) {
    dataset.validate();
    dataset.serialize().write_file(path);
}

inline FingerprintDataset read_dataset(const std::filesystem::path& path) {
    ByteReader r = ByteReader::from_file(path);
    r.need(32, "dataset header");
    const std::string magic = r.ascii(kDatasetMagic.size());
    if (magic != kDatasetMagic) throw format_error("dataset: bad magic", 0);
    const std::uint16_t version = r.u16();
    if (version != kDatasetVersion)
        throw format_error("dataset: unsupported version " + std::to_string(version), 8);
    r.u16();  // flags
    const std::uint32_t feature_len = r.u32();
    const std::uint64_t record_count = r.u64();
    r.u64();  // reserved

    FingerprintDataset ds;
    ds.scene_digest = r.u64();
    ds.layout.n_rb = r.i32();
    ds.layout.port = r.i32();
    ds.layout.cell_shift = r.i32();
    const std::uint32_t n_sc = r.u32();
    ds.layout.subcarrier_indices.resize(n_sc);
    for (std::uint32_t i = 0; i < n_sc; ++i) ds.layout.subcarrier_indices[i] = r.i32();
    ds.n_tx = static_cast<int>(r.u32());
    if (feature_len != static_cast<std::uint32_t>(ds.n_tx) * n_sc)
        throw format_error("dataset: feature length " + std::to_string(feature_len) +
                               " inconsistent with layout " + std::to_string(ds.n_tx) + "x" +
                               std::to_string(n_sc),
                           r.offset());

    ds.normalization.mean.resize(feature_len);
    ds.normalization.scale.resize(feature_len);
    r.need(static_cast<std::size_t>(feature_len) * 16, "normalization vectors");
    for (auto& v : ds.normalization.mean) v = r.f64();
    for (auto& v : ds.normalization.scale) v = r.f64();

    ds.records.resize(record_count);
    for (auto& rec : ds.records) {
        r.need(8 + 8 + 4 + 8 + static_cast<std::size_t>(feature_len) * 8, "record");
        rec.location.x = r.f64();
        rec.location.y = r.f64();
        rec.rp_index = r.i32();
        rec.slot = r.i64();
        rec.snapshot.resize(feature_len);
        for (auto& a : rec.snapshot) a = r.f64();
    }
    r.expect_exhausted("dataset");
    ds.validate();
    return ds;
}

// One record per line: {"x":..,"y":..,"rp_index":..,"slot":..,"amplitudes":[..]}.
// Implemented without a JSON dependency so exports of big maps stay cheap.
inline void export_jsonl(const FingerprintDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    char num[64];
    const auto put = [&](double v) {
        std::snprintf(num, sizeof(num), "%.17g", v);
        out << num;
    };
    for (const auto& r : dataset.records) {
        out << "{\"x\":";
        put(r.location.x);
        out << ",\"y\":";
        put(r.location.y);
        out << ",\"rp_index\":" << r.rp_index << ",\"slot\":" << r.slot << ",\"amplitudes\":[";
        for (std::size_t i = 0; i < r.snapshot.size(); ++i) {
            if (i) out << ',';
            put(r.snapshot[i]);
        }
        out << "]}\n";
    }
    if (!out) throw error("write failed: " + path.string());
}

// Temporal fusion input: s consecutive slot estimates sharing a truth point.
struct FusionWindow {
    std::vector<LocationEstimate> estimates;  // length exactly s
    Point2 truth;
    std::int64_t window_id = 0;
};

// One slot-level estimate tagged with its ground truth, for window assembly.
struct TimedEstimate {
    LocationEstimate estimate;
    Point2 truth;
    std::int64_t slot = 0;
};

// Cuts slot-ordered, truth-grouped estimates into windows of length s with
// the given stride (stride == s: disjoint training windows; stride == 1:
// sliding inference windows). Tails shorter than s are dropped. When bounds
// are given, every estimate must lie inside the bounds expanded by 10%.
inline std::vector<FusionWindow> make_fusion_windows(std::span<const TimedEstimate> estimates,
                                                     int s, int stride,
                                                     const std::optional<Rect>& bounds) {
    if (s < 1) throw parameter_error("make_fusion_windows: s must be >= 1");
    if (stride < 1) throw parameter_error("make_fusion_windows: stride must be >= 1");

    std::vector<FusionWindow> windows;
    std::int64_t window_id = 0;
    std::size_t group_begin = 0;
    std::size_t group_index = 0;
    while (group_begin < estimates.size()) {
        std::size_t group_end = group_begin + 1;
        while (group_end < estimates.size() &&
               estimates[group_end].truth == estimates[group_begin].truth) {
            if (estimates[group_end].slot < estimates[group_end - 1].slot)
                throw parameter_error("make_fusion_windows: group " +
                                      std::to_string(group_index) + " is not slot-ordered");
            ++group_end;
        }
        const std::size_t len = group_end - group_begin;
        if (len < static_cast<std::size_t>(s))
            throw parameter_error("make_fusion_windows: group " + std::to_string(group_index) +
                                  " has " + std::to_string(len) + " estimates, needs >= " +
                                  std::to_string(s));
        for (std::size_t start = group_begin; start + static_cast<std::size_t>(s) <= group_end;
             start += static_cast<std::size_t>(stride)) {
            FusionWindow w;
            w.truth = estimates[group_begin].truth;
            w.window_id = window_id++;
            w.estimates.reserve(static_cast<std::size_t>(s));
            for (std::size_t i = start; i < start + static_cast<std::size_t>(s); ++i) {
                if (bounds && !bounds->expanded(0.10).contains(estimates[i].estimate.xy))
                    throw parameter_error(
                        "make_fusion_windows: estimate outside the expanded feasible area");
                w.estimates.push_back(estimates[i].estimate);
            }
            windows.push_back(std::move(w));
        }
        group_begin = group_end;
        ++group_index;
    }
    return windows;
}

inline std::vector<FusionWindow> make_fusion_windows(std::span<const TimedEstimate> estimates,
                                                     int s) {
    return make_fusion_windows(estimates, s, s, std::nullopt);
}

}  // namespace csiloc

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
// Temporal fusion g2 over s consecutive slot estimates: mean and median
// baselines plus the FN regression network (Dense 100/64/48/12, linear
// output, no dropout). FN inputs are mapped to a [-1,1]^2 frame before
// flattening and the output is mapped back to meters.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csiloc/common.hpp"
#include "csiloc/dataset.hpp"
#include "csiloc/mlp.hpp"

namespace csiloc {

inline LocationEstimate fuse_mean(const FusionWindow& window) {
    if (window.estimates.empty()) throw parameter_error("fuse_mean: empty window");
    Point2 p{0.0, 0.0};
    for (const auto& e : window.estimates) {
        p.x += e.xy.x;
        p.y += e.xy.y;
    }
    p.x /= static_cast<double>(window.estimates.size());
    p.y /= static_cast<double>(window.estimates.size());
    return LocationEstimate{p, EstimateSource::fusion};
}

// Coordinatewise median; even windows take the midpoint of the central pair.
inline LocationEstimate fuse_median(const FusionWindow& window) {
    if (window.estimates.empty()) throw parameter_error("fuse_median: empty window");
    const auto axis_median = [&](auto&& get) {
        std::vector<double> v;
        v.reserve(window.estimates.size());
        for (const auto& e : window.estimates) v.push_back(get(e.xy));
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    return LocationEstimate{{axis_median([](const Point2& p) { return p.x; }),
                             axis_median([](const Point2& p) { return p.y; })},
                            EstimateSource::fusion};
}

// Affine map between scene coordinates and the FN's normalized frame.
struct AxisScaling {
    double center_x = 0.0, center_y = 0.0;
    double half_x = 1.0, half_y = 1.0;

    static AxisScaling from_bounds(const Rect& bounds) {
        return {bounds.center().x, bounds.center().y, std::max(bounds.width() / 2.0, 1e-12),
                std::max(bounds.height() / 2.0, 1e-12)};
    }

    Point2 to_unit(const Point2& p) const {
        return {(p.x - center_x) / half_x, (p.y - center_y) / half_y};
    }
    Point2 from_unit(const Point2& p) const {
        return {p.x * half_x + center_x, p.y * half_y + center_y};
    }
};

struct FusionNet {
    MlpModel model;  // input 2s, linear head, output 2
    int s = 0;
    AxisScaling input_scaling;

    void validate() const {
        model.validate();
        if (model.head != Head::linear)
            throw parameter_error("FusionNet: model must have a linear head");
        if (s < 1 || model.input_width != 2 * s)
            throw parameter_error("FusionNet: input width must be 2*s");
        if (model.output_width != 2) throw parameter_error("FusionNet: output width must be 2");
    }
};

inline std::vector<double> flatten_window(const FusionWindow& window,
                                          const AxisScaling& scaling) {
    std::vector<double> x;
    x.reserve(window.estimates.size() * 2);
    for (const auto& e : window.estimates) {
        const Point2 u = scaling.to_unit(e.xy);
        x.push_back(u.x);
        x.push_back(u.y);
    }
    return x;
}

// Flatten s x 2 in slot order, run the net, map back to meters.
inline LocationEstimate fn_infer(const FusionNet& net, const FusionWindow& window) {
    if (static_cast<int>(window.estimates.size()) != net.s)
        throw parameter_error("fn_infer: window length " +
                              std::to_string(window.estimates.size()) +
                              " does not match network s=" + std::to_string(net.s));
    const std::vector<double> x = flatten_window(window, net.input_scaling);
    const std::vector<double> out = forward(net.model, x, RunMode::infer, nullptr, nullptr);
    return LocationEstimate{net.input_scaling.from_unit({out[0], out[1]}),
                            EstimateSource::fusion};
}

inline const std::vector<int>& fn_hidden_widths() {
    static const std::vector<int> widths{100, 64, 48, 12};
    return widths;
}

inline FusionNet make_fusion_net(int s, const AxisScaling& scaling, std::uint64_t seed) {
    if (s < 1) throw parameter_error("make_fusion_net: s must be >= 1");
    FusionNet net;
    net.s = s;
    net.input_scaling = scaling;
    net.model = make_mlp(2 * s, fn_hidden_widths(), 2, Head::linear, 0.0, seed);
    return net;
}

struct FnTrainOutput {
    FusionNet net;
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

// MSE regression from flattened windows to their truth points, both in the
// normalized frame; returns the best-validation weights.
inline FnTrainOutput train_fn(const std::vector<FusionWindow>& windows_train,
                              const std::vector<FusionWindow>& windows_val,
                              const AxisScaling& scaling, const TrainConfig& cfg) {
    if (windows_train.empty() || windows_val.empty())
        throw parameter_error("train_fn: empty window set");
    const int s = static_cast<int>(windows_train.front().estimates.size());
    const auto to_samples = [&](const std::vector<FusionWindow>& windows,
                                std::vector<std::vector<double>>& x,
                                std::vector<std::vector<double>>& y) {
        x.reserve(windows.size());
        y.reserve(windows.size());
        for (const auto& w : windows) {
            if (static_cast<int>(w.estimates.size()) != s)
                throw parameter_error("train_fn: inconsistent window lengths");
            x.push_back(flatten_window(w, scaling));
            const Point2 t = scaling.to_unit(w.truth);
            y.push_back({t.x, t.y});
        }
    };
    std::vector<std::vector<double>> x_train, y_train, x_val, y_val;
    to_samples(windows_train, x_train, y_train);
    to_samples(windows_val, x_val, y_val);

    FusionNet net = make_fusion_net(s, scaling, cfg.seed);
    TrainResult result = train(net.model, x_train, y_train, x_val, y_val, LossKind::mse, cfg);
    net.model = std::move(result.model);
    net.validate();
    return FnTrainOutput{std::move(net), std::move(result.history), result.best_epoch,
                         result.best_val_loss};
}

inline constexpr std::string_view kFnMagic = "CSILOCFN";
inline constexpr std::uint16_t kFnVersion = 1;

inline void save_fusion_net(const FusionNet& net, const std::filesystem::path& path) {
    net.validate();
    ByteWriter w;
    w.ascii(kFnMagic);
    w.u16(kFnVersion);
    w.u32(static_cast<std::uint32_t>(net.s));
    w.f64(net.input_scaling.center_x);
    w.f64(net.input_scaling.center_y);
    w.f64(net.input_scaling.half_x);
    w.f64(net.input_scaling.half_y);
    w.bytes(net.model.serialize().data());
    w.write_file(path);
}

inline FusionNet load_fusion_net(const std::filesystem::path& path) {
    ByteReader r = ByteReader::from_file(path);
    r.need(8, "fusion net header");
    if (r.ascii(kFnMagic.size()) != kFnMagic) throw format_error("fusion net: bad magic", 0);
    const std::uint16_t version = r.u16();
    if (version != kFnVersion)
        throw format_error("fusion net: unsupported version " + std::to_string(version), 8);
    FusionNet net;
    net.s = static_cast<int>(r.u32());
    net.input_scaling.center_x = r.f64();
    net.input_scaling.center_y = r.f64();
    net.input_scaling.half_x = r.f64();
    net.input_scaling.half_y = r.f64();
    net.model = deserialize_model(r, 2 * net.s);
    r.expect_exhausted("fusion net");
    net.validate();
    return net;
}

}  // namespace csiloc

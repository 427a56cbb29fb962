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
// Experiment orchestration: map generation -> split -> SLN training -> FN
// window generation and training -> test-point evaluation -> reports.
//
// The map splits three ways: SLN training, SLN validation, and an FN source
// whose held-out records are pushed through the trained SLN to produce the
// fusion network's training windows (truth = RP coordinates). Test points
// are evaluated on freshly generated slot streams: KNN/WKNN/SLN per slot,
// SLN+FN per disjoint window of s slots.
//
// Every stage persists its artifacts into out_dir as it completes, so a
// failing stage leaves the earlier outputs behind for inspection. Stage
// failures surface as stage_error carrying the stage name.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "csiloc/config.hpp"
#include "csiloc/dataset.hpp"
#include "csiloc/fusion.hpp"
#include "csiloc/localizers.hpp"
#include "csiloc/metrics.hpp"

namespace csiloc {

struct SlotEstimateRow {
    int tp_index = 0;
    std::int64_t slot = 0;  // window_id for fused rows
    LocationEstimate estimate;
    Point2 truth;
    double error_m = 0.0;
};

struct ExperimentResult {
    std::vector<ErrorReport> reports;  // knn, wknn, sln, sln_fn
    double sln_val_top1_accuracy = 0.0;
    int sln_best_epoch = 0;
    int fn_best_epoch = 0;
    std::filesystem::path out_dir;

    const ErrorReport& report(const std::string& tag) const {
        for (const auto& r : reports)
            if (r.method_tag == tag) return r;
        throw parameter_error("ExperimentResult: no report tagged '" + tag + "'");
    }
};

namespace experiment_detail {

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const stage_error&) {
        throw;
    } catch (const std::exception& e) {
        throw stage_error(name, e.what());
    }
}

inline void write_estimates_csv(const std::vector<SlotEstimateRow>& rows,
                                const std::filesystem::path& path, const char* index_header) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    out << "tp_index," << index_header << ",est_x,est_y,true_x,true_y,error_m\n";
    char buf[200];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.tp_index,
                      static_cast<long long>(r.slot), r.estimate.xy.x, r.estimate.xy.y,
                      r.truth.x, r.truth.y, r.error_m);
        out << buf;
    }
}

}  // namespace experiment_detail

// Slot-level inference over freshly generated test-point streams.
struct TpEvaluation {
    std::vector<SlotEstimateRow> knn_rows, wknn_rows, sln_rows;
    std::vector<TimedEstimate> sln_estimates;  // grouped by TP, slot-ordered
};

inline TpEvaluation evaluate_test_points(const ExperimentConfig& cfg, const KnnIndex& index,
                                         const SlnLocalizer& sln, const CrsLayout& layout) {
    TpEvaluation ev;
    const std::uint64_t layout_digest = layout.digest();
    for (std::size_t t = 0; t < cfg.scene.tp_locations.size(); ++t) {
        const Point2 truth = cfg.scene.tp_locations[t];
        const LocationChannel chan(cfg.scene, cfg.channel, layout, truth);
        for (int slot = 0; slot < cfg.eval_slots_per_tp; ++slot) {
            const CsiSnapshot snapshot = chan.snapshot(slot);
            const LocationEstimate knn_est = knn_locate(index, snapshot, cfg.knn_k);
            const LocationEstimate wknn_est = wknn_locate(index, snapshot, cfg.wknn_k);
            const auto [probs, sln_est] = sln_infer(sln, snapshot, layout_digest);
            const int tp = static_cast<int>(t);
            ev.knn_rows.push_back(
                {tp, slot, knn_est, truth, distance(knn_est.xy, truth)});
            ev.wknn_rows.push_back(
                {tp, slot, wknn_est, truth, distance(wknn_est.xy, truth)});
            ev.sln_rows.push_back(
                {tp, slot, sln_est, truth, distance(sln_est.xy, truth)});
            ev.sln_estimates.push_back(TimedEstimate{sln_est, truth, slot});
        }
    }
    return ev;
}

// Full pipeline (the CLI's `evaluate --all`). Deterministic under a fixed
// config+seed: rerunning produces byte-identical artifacts.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    using experiment_detail::run_stage;

    ExperimentResult result;
    result.out_dir = cfg.out_dir;
    fs::create_directories(cfg.out_dir);

    run_stage("scene", [&] {
        cfg.scene.validate();
        write_scene_file(cfg.scene, cfg.out_dir / "scene.txt");
        return 0;
    });

    const FingerprintDataset map = run_stage("build-map", [&] {
        FingerprintDataset m = build_map(cfg.scene, cfg.channel, cfg.slots_per_rp);
        write_dataset(m, cfg.out_dir / "map.bin");
        if (cfg.export_map_jsonl) export_jsonl(m, cfg.out_dir / "map.jsonl");
        return m;
    });

    const std::array<FingerprintDataset, 3> parts = run_stage("split", [&] {
        auto p = split(map, cfg.split_fractions, cfg.split_seed);
        write_dataset(p[0], cfg.out_dir / "map_train.bin");
        write_dataset(p[1], cfg.out_dir / "map_val.bin");
        write_dataset(p[2], cfg.out_dir / "map_fn.bin");
        return p;
    });

    const SlnTrainOutput sln = run_stage("train-sln", [&] {
        SlnTrainOutput out =
            train_sln(parts[0], parts[1], cfg.scene, cfg.sln_train, cfg.sln_dropout);
        save_localizer(out.localizer, cfg.out_dir / "sln.bin");
        write_history_csv(out.history, cfg.out_dir / "sln_history.csv");
        return out;
    });
    result.sln_best_epoch = sln.best_epoch;
    result.sln_val_top1_accuracy = sln_top1_accuracy(sln.localizer, parts[1]);

    // FN training windows: trained-SLN estimates on the held-out FN split,
    // grouped per RP and slot-ordered, cut into disjoint windows.
    const std::vector<FusionWindow> fn_windows = run_stage("fn-data", [&] {
        FingerprintDataset fn_source = parts[2];
        std::sort(fn_source.records.begin(), fn_source.records.end(),
                  [](const FingerprintRecord& a, const FingerprintRecord& b) {
                      return a.rp_index != b.rp_index ? a.rp_index < b.rp_index
                                                      : a.slot < b.slot;
                  });
        std::vector<TimedEstimate> estimates;
        estimates.reserve(fn_source.records.size());
        for (const auto& r : fn_source.records) {
            const auto [probs, est] = sln_infer(sln.localizer, r.snapshot);
            estimates.push_back(TimedEstimate{est, r.location, r.slot});
        }
        return make_fusion_windows(estimates, cfg.fusion_s, cfg.fusion_s,
                                   cfg.scene.area_bounds);
    });

    const FnTrainOutput fn = run_stage("train-fn", [&] {
        std::vector<FusionWindow> train_windows, val_windows;
        const int val_every =
            std::max<int>(2, static_cast<int>(std::llround(1.0 / (1.0 - cfg.fn_train_fraction))));
        for (std::size_t i = 0; i < fn_windows.size(); ++i) {
            if ((i + 1) % static_cast<std::size_t>(val_every) == 0)
                val_windows.push_back(fn_windows[i]);
            else
                train_windows.push_back(fn_windows[i]);
        }
        if (train_windows.empty() || val_windows.empty())
            throw parameter_error("train-fn: not enough FN windows (" +
                                  std::to_string(fn_windows.size()) + ")");
        FnTrainOutput out = train_fn(train_windows, val_windows,
                                     AxisScaling::from_bounds(cfg.scene.area_bounds),
                                     cfg.fn_train);
        save_fusion_net(out.net, cfg.out_dir / "fn.bin");
        write_history_csv(out.history, cfg.out_dir / "fn_history.csv");
        return out;
    });
    result.fn_best_epoch = fn.best_epoch;

    const TpEvaluation ev = run_stage("evaluate", [&] {
        if (cfg.scene.tp_locations.empty())
            throw parameter_error("evaluate: scene has no test points");
        const KnnIndex index = KnnIndex::build(map);
        TpEvaluation e = evaluate_test_points(cfg, index, sln.localizer, map.layout);
        experiment_detail::write_estimates_csv(e.knn_rows, cfg.out_dir / "estimates_knn.csv",
                                               "slot");
        experiment_detail::write_estimates_csv(e.wknn_rows, cfg.out_dir / "estimates_wknn.csv",
                                               "slot");
        experiment_detail::write_estimates_csv(e.sln_rows, cfg.out_dir / "estimates_sln.csv",
                                               "slot");
        return e;
    });

    const std::vector<SlotEstimateRow> fused_rows = run_stage("fuse", [&] {
        const std::vector<FusionWindow> windows =
            make_fusion_windows(ev.sln_estimates, cfg.fusion_s, cfg.fusion_s,
                                cfg.scene.area_bounds);
        std::vector<SlotEstimateRow> rows;
        rows.reserve(windows.size());
        for (const auto& w : windows) {
            const LocationEstimate est = fn_infer(fn.net, w);
            // recover the TP index from the window truth
            int tp = 0;
            for (std::size_t t = 0; t < cfg.scene.tp_locations.size(); ++t)
                if (cfg.scene.tp_locations[t] == w.truth) tp = static_cast<int>(t);
            rows.push_back({tp, w.window_id, est, w.truth, distance(est.xy, w.truth)});
        }
        experiment_detail::write_estimates_csv(rows, cfg.out_dir / "estimates_sln_fn.csv",
                                               "window_id");
        return rows;
    });

    run_stage("report", [&] {
        const auto collect = [&](const std::vector<SlotEstimateRow>& rows, const char* tag) {
            std::vector<double> errors;
            errors.reserve(rows.size());
            for (const auto& r : rows) errors.push_back(r.error_m);
            result.reports.push_back(ErrorReport::from_errors(tag, std::move(errors),
                                                              cfg.scene.digest(),
                                                              cfg.config_digest));
        };
        collect(ev.knn_rows, "knn");
        collect(ev.wknn_rows, "wknn");
        collect(ev.sln_rows, "sln");
        collect(fused_rows, "sln_fn");
        for (const auto& r : result.reports) {
            write_errors_csv(r, cfg.out_dir / ("report_" + r.method_tag + "_errors.csv"));
            write_cdf_csv(r, cfg.out_dir / ("report_" + r.method_tag + "_cdf.csv"));
        }
        write_summary_json(result.reports, cfg.out_dir / "summary.json");
        return 0;
    });

    return result;
}

}  // namespace csiloc

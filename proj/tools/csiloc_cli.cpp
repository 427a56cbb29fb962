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
// Command-line front end for the localization pipeline. Every subcommand
// takes --config <file> and --seed <int>; `evaluate --all` runs the whole
// experiment. Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csiloc/experiment.hpp"

namespace fs = std::filesystem;
using namespace csiloc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitStageFailure = 3;

ExperimentConfig load_config(const std::string& config_path,
                             std::optional<std::int64_t> seed) {
    std::optional<std::uint64_t> seed_override;
    if (seed) seed_override = static_cast<std::uint64_t>(*seed);
    return load_experiment_config(fs::path(config_path), seed_override);
}

void print_reports(const std::vector<ErrorReport>& reports) {
    for (const auto& r : reports)
        std::cout << r.method_tag << ": mde=" << r.mde << " m, max=" << r.max_error << " m ("
                  << r.per_sample_errors.size() << " samples)\n";
}

// Rebuilds (tp_index, index, error) rows from an estimates CSV.
std::vector<double> read_errors_column(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open: " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> errors;
    while (std::getline(in, line)) {
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) throw format_error("estimates csv: bad row", 0);
        errors.push_back(std::stod(line.substr(comma + 1)));
    }
    if (errors.empty()) throw error("estimates csv has no rows: " + path.string());
    return errors;
}

void write_reports_from_estimates(const ExperimentConfig& cfg) {
    const std::pair<const char*, const char*> methods[] = {
        {"knn", "estimates_knn.csv"},
        {"wknn", "estimates_wknn.csv"},
        {"sln", "estimates_sln.csv"},
        {"sln_fn", "estimates_sln_fn.csv"},
    };
    std::vector<ErrorReport> reports;
    for (const auto& [tag, file] : methods) {
        const fs::path p = cfg.out_dir / file;
        if (!fs::exists(p)) continue;
        reports.push_back(ErrorReport::from_errors(tag, read_errors_column(p),
                                                   cfg.scene.digest(), cfg.config_digest));
    }
    if (reports.empty()) throw error("no estimates CSVs found in " + cfg.out_dir.string());
    for (const auto& r : reports) {
        write_errors_csv(r, cfg.out_dir / ("report_" + r.method_tag + "_errors.csv"));
        write_cdf_csv(r, cfg.out_dir / ("report_" + r.method_tag + "_cdf.csv"));
    }
    write_summary_json(reports, cfg.out_dir / "summary.json");
    print_reports(reports);
}

// Evaluation over existing artifacts (map.bin, sln.bin, fn.bin).
void evaluate_existing(const ExperimentConfig& cfg) {
    const FingerprintDataset map = read_dataset(cfg.out_dir / "map.bin");
    SlnLocalizer sln = load_localizer(cfg.out_dir / "sln.bin");
    FusionNet fn = load_fusion_net(cfg.out_dir / "fn.bin");
    const KnnIndex index = KnnIndex::build(map);

    const TpEvaluation ev = evaluate_test_points(cfg, index, sln, map.layout);
    experiment_detail::write_estimates_csv(ev.knn_rows, cfg.out_dir / "estimates_knn.csv",
                                           "slot");
    experiment_detail::write_estimates_csv(ev.wknn_rows, cfg.out_dir / "estimates_wknn.csv",
                                           "slot");
    experiment_detail::write_estimates_csv(ev.sln_rows, cfg.out_dir / "estimates_sln.csv",
                                           "slot");

    const std::vector<FusionWindow> windows =
        make_fusion_windows(ev.sln_estimates, cfg.fusion_s, cfg.fusion_s, cfg.scene.area_bounds);
    std::vector<SlotEstimateRow> fused;
    for (const auto& w : windows) {
        const LocationEstimate est = fn_infer(fn, w);
        int tp = 0;
        for (std::size_t t = 0; t < cfg.scene.tp_locations.size(); ++t)
            if (cfg.scene.tp_locations[t] == w.truth) tp = static_cast<int>(t);
        fused.push_back({tp, w.window_id, est, w.truth, distance(est.xy, w.truth)});
    }
    experiment_detail::write_estimates_csv(fused, cfg.out_dir / "estimates_sln_fn.csv",
                                           "window_id");
    write_reports_from_estimates(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"csiloc: CSI fingerprint localization pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::int64_t> seed;
    std::string scene_out = "scene.txt";
    bool run_all = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file")->required();
        cmd->add_option("--seed", seed, "override the config's master seed");
    };

    CLI::App* gen_scene = app.add_subcommand("gen-scene", "resolve the scene preset to a file");
    add_common(gen_scene);
    gen_scene->add_option("--out", scene_out, "output scene file");

    CLI::App* build_map_cmd = app.add_subcommand("build-map", "generate the fingerprint map");
    add_common(build_map_cmd);

    CLI::App* split_cmd = app.add_subcommand("split", "stratified train/val/fn split");
    add_common(split_cmd);

    CLI::App* train_sln_cmd = app.add_subcommand("train-sln", "train the slot localizer");
    add_common(train_sln_cmd);

    CLI::App* infer_slot_cmd =
        app.add_subcommand("infer-slot", "slot-level inference on test-point streams");
    add_common(infer_slot_cmd);

    CLI::App* train_fn_cmd = app.add_subcommand("train-fn", "train the fusion network");
    add_common(train_fn_cmd);

    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "evaluate methods on test points");
    add_common(evaluate_cmd);
    evaluate_cmd->add_flag("--all", run_all, "run the full pipeline from scratch");

    CLI::App* report_cmd = app.add_subcommand("report", "rebuild reports from estimate CSVs");
    add_common(report_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = load_config(config_path, seed);
        fs::create_directories(cfg.out_dir);

        if (gen_scene->parsed()) {
            write_scene_file(cfg.scene, scene_out);
            std::cout << "wrote " << scene_out << " (" << cfg.scene.rp_locations.size()
                      << " RPs, " << cfg.scene.tp_locations.size() << " TPs)\n";
        } else if (build_map_cmd->parsed()) {
            const FingerprintDataset map = build_map(cfg.scene, cfg.channel, cfg.slots_per_rp);
            write_dataset(map, cfg.out_dir / "map.bin");
            if (cfg.export_map_jsonl) export_jsonl(map, cfg.out_dir / "map.jsonl");
            std::cout << "wrote " << (cfg.out_dir / "map.bin").string() << " ("
                      << map.records.size() << " records)\n";
        } else if (split_cmd->parsed()) {
            const FingerprintDataset map = read_dataset(cfg.out_dir / "map.bin");
            const auto parts = split(map, cfg.split_fractions, cfg.split_seed);
            write_dataset(parts[0], cfg.out_dir / "map_train.bin");
            write_dataset(parts[1], cfg.out_dir / "map_val.bin");
            write_dataset(parts[2], cfg.out_dir / "map_fn.bin");
            std::cout << "split sizes: " << parts[0].records.size() << "/"
                      << parts[1].records.size() << "/" << parts[2].records.size() << "\n";
        } else if (train_sln_cmd->parsed()) {
            const FingerprintDataset train = read_dataset(cfg.out_dir / "map_train.bin");
            const FingerprintDataset val = read_dataset(cfg.out_dir / "map_val.bin");
            const SlnTrainOutput out =
                train_sln(train, val, cfg.scene, cfg.sln_train, cfg.sln_dropout);
            save_localizer(out.localizer, cfg.out_dir / "sln.bin");
            write_history_csv(out.history, cfg.out_dir / "sln_history.csv");
            std::cout << "sln best epoch " << out.best_epoch << ", val loss "
                      << out.best_val_loss << ", val top-1 "
                      << sln_top1_accuracy(out.localizer, val) << "\n";
        } else if (infer_slot_cmd->parsed()) {
            const FingerprintDataset map = read_dataset(cfg.out_dir / "map.bin");
            const SlnLocalizer sln = load_localizer(cfg.out_dir / "sln.bin");
            const KnnIndex index = KnnIndex::build(map);
            const TpEvaluation ev = evaluate_test_points(cfg, index, sln, map.layout);
            experiment_detail::write_estimates_csv(ev.knn_rows,
                                                   cfg.out_dir / "estimates_knn.csv", "slot");
            experiment_detail::write_estimates_csv(ev.wknn_rows,
                                                   cfg.out_dir / "estimates_wknn.csv", "slot");
            experiment_detail::write_estimates_csv(ev.sln_rows,
                                                   cfg.out_dir / "estimates_sln.csv", "slot");
            std::cout << "wrote slot estimates for " << cfg.scene.tp_locations.size()
                      << " TPs x " << cfg.eval_slots_per_tp << " slots\n";
        } else if (train_fn_cmd->parsed()) {
            const FingerprintDataset fn_source = read_dataset(cfg.out_dir / "map_fn.bin");
            const SlnLocalizer sln = load_localizer(cfg.out_dir / "sln.bin");
            FingerprintDataset sorted = fn_source;
            std::sort(sorted.records.begin(), sorted.records.end(),
                      [](const FingerprintRecord& a, const FingerprintRecord& b) {
                          return a.rp_index != b.rp_index ? a.rp_index < b.rp_index
                                                          : a.slot < b.slot;
                      });
            std::vector<TimedEstimate> estimates;
            for (const auto& r : sorted.records) {
                const auto [probs, est] = sln_infer(sln, r.snapshot);
                estimates.push_back(TimedEstimate{est, r.location, r.slot});
            }
            const std::vector<FusionWindow> windows = make_fusion_windows(
                estimates, cfg.fusion_s, cfg.fusion_s, cfg.scene.area_bounds);
            std::vector<FusionWindow> train_w, val_w;
            const int val_every = std::max<int>(
                2, static_cast<int>(std::llround(1.0 / (1.0 - cfg.fn_train_fraction))));
            for (std::size_t i = 0; i < windows.size(); ++i)
                ((i + 1) % static_cast<std::size_t>(val_every) == 0 ? val_w : train_w)
                    .push_back(windows[i]);
            const FnTrainOutput out = train_fn(
                train_w, val_w, AxisScaling::from_bounds(cfg.scene.area_bounds), cfg.fn_train);
            save_fusion_net(out.net, cfg.out_dir / "fn.bin");
            write_history_csv(out.history, cfg.out_dir / "fn_history.csv");
            std::cout << "fn best epoch " << out.best_epoch << ", val loss "
                      << out.best_val_loss << " (" << windows.size() << " windows)\n";
        } else if (evaluate_cmd->parsed()) {
            if (run_all) {
                const ExperimentResult result = run_experiment(cfg);
                std::cout << "sln val top-1 accuracy: " << result.sln_val_top1_accuracy << "\n";
                print_reports(result.reports);
            } else {
                evaluate_existing(cfg);
            }
        } else if (report_cmd->parsed()) {
            write_reports_from_estimates(cfg);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const stage_error& e) {
        std::cerr << e.what() << "\n";
        return kExitStageFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageFailure;
    }
    return kExitOk;
}

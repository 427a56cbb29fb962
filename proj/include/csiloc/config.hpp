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
// Plain-text `key = value` configuration (one pair per line, `#` comments,
// repeated keys allowed for list-valued entries such as `rp`), the scene
// presets, and the assembled experiment configuration.
//
// Scene presets:
//   indoor   3.6 m x 6 m room, 15 RPs on a 1.2 m grid; the base station
//            sits outside the room (the field setup never states its
//            position, so it is an explicit config default here).
//   outdoor  195 m x 360 m suburban box, 105 RPs at 5 m spacing along an
//            L-shaped drive path, base station at the box corner;
//            `outdoor_rp_stride` thins the RP line for desk-scale runs.
// Test points are drawn with a seeded generator: uniformly inside the RP
// grid for `indoor`, uniformly along the drive path for `outdoor`.

#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csiloc/channel.hpp"
#include "csiloc/common.hpp"
#include "csiloc/localizers.hpp"
#include "csiloc/rng.hpp"

namespace csiloc {

class KeyValueConfig {
  public:
    static KeyValueConfig parse_string(const std::string& text) {
        KeyValueConfig cfg;
        cfg.raw_text_ = text;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(line_no) +
                                   ": expected 'key = value', got '" + trimmed + "'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw config_error("config line " + std::to_string(line_no) + ": empty key");
            cfg.entries_.emplace_back(key, value);
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        KeyValueConfig cfg = parse_string(ss.str());
        cfg.source_path_ = path;
        return cfg;
    }

    bool has(const std::string& key) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return true;
        return false;
    }

    // Last occurrence wins for scalar keys.
    std::optional<std::string> get(const std::string& key) const {
        std::optional<std::string> found;
        for (const auto& [k, v] : entries_)
            if (k == key) found = v;
        return found;
    }

    std::vector<std::string> get_all(const std::string& key) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries_)
            if (k == key) out.push_back(v);
        return out;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto v = get(key);
        return v ? *v : fallback;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto v = get(key);
        return v ? parse_double(key, *v) : fallback;
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        const auto v = get(key);
        if (!v) return fallback;
        char* end = nullptr;
        const long long parsed = std::strtoll(v->c_str(), &end, 10);
        if (end == v->c_str() || *end != '\0')
            throw config_error("config key '" + key + "': '" + *v + "' is not an integer");
        return parsed;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        throw config_error("config key '" + key + "': '" + *v + "' is not a boolean");
    }

    static double parse_double(const std::string& key, const std::string& value) {
        char* end = nullptr;
        const double parsed = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0')
            throw config_error("config key '" + key + "': '" + value + "' is not a number");
        return parsed;
    }

    // Whitespace-separated doubles, e.g. "0.5 0.25 0.25" or "1.2 3.4".
    std::vector<double> get_doubles(const std::string& key) const {
        const auto v = get(key);
        if (!v) return {};
        return split_doubles(key, *v);
    }

    static std::vector<double> split_doubles(const std::string& key, const std::string& value) {
        std::vector<double> out;
        std::istringstream ss(value);
        std::string tok;
        while (ss >> tok) out.push_back(parse_double(key, tok));
        return out;
    }

    const std::string& raw_text() const { return raw_text_; }
    const std::optional<std::filesystem::path>& source_path() const { return source_path_; }

    std::uint64_t digest() const {
        return fnv1a64({reinterpret_cast<const std::uint8_t*>(raw_text_.data()),
                        raw_text_.size()});
    }

  private:
    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    std::vector<std::pair<std::string, std::string>> entries_;
    std::string raw_text_;
    std::optional<std::filesystem::path> source_path_;
};

namespace preset_detail {

inline std::vector<Point2> indoor_rp_grid() {
    std::vector<Point2> rps;
    for (double y = 0.6; y < 6.0; y += 1.2)
        for (double x = 0.6; x < 3.6; x += 1.2) rps.push_back({x, y});
    return rps;  // 3 x 5 = 15 points
}

inline std::vector<Point2> outdoor_rp_line(int stride) {
    std::vector<Point2> rps;
    for (int i = 0; i < 70; ++i) rps.push_back({20.0, 355.0 - 5.0 * i});  // north-south leg
    for (int i = 0; i < 35; ++i) rps.push_back({25.0 + 5.0 * i, 10.0});   // west-east leg
    if (stride <= 1) return rps;
    std::vector<Point2> thinned;
    for (std::size_t i = 0; i < rps.size(); i += static_cast<std::size_t>(stride))
        thinned.push_back(rps[i]);
    return thinned;
}

inline Point2 along_polyline(const std::vector<Point2>& poly, double t) {
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const double seg = distance(poly[i], poly[i + 1]);
        if (t <= seg || i + 2 == poly.size()) {
            const double f = std::min(t / seg, 1.0);
            return {poly[i].x + f * (poly[i + 1].x - poly[i].x),
                    poly[i].y + f * (poly[i + 1].y - poly[i].y)};
        }
        t -= seg;
    }
    return poly.back();
}

}  // namespace preset_detail

// Builds a preset scene. `tp_seed` drives test-point placement; `n_tp` the
// number of test points; `rp_stride` (outdoor only) thins the RP line.
inline Scene scene_preset(const std::string& name, std::uint64_t tp_seed, int n_tp,
                          int rp_stride = 1) {
    if (n_tp < 1) throw parameter_error("scene_preset: n_tp must be >= 1");
    Scene scene;
    RngStream rng(CounterRng(tp_seed).fork("tp"));
    if (name == "indoor") {
        scene.area_bounds = {0.0, 0.0, 3.6, 6.0};
        scene.bs_location = {1.8, -20.0};
        scene.rp_locations = preset_detail::indoor_rp_grid();
        for (int i = 0; i < n_tp; ++i)
            scene.tp_locations.push_back({0.6 + rng.next_uniform() * 2.4,
                                          0.6 + rng.next_uniform() * 4.8});
    } else if (name == "outdoor") {
        scene.area_bounds = {0.0, 0.0, 195.0, 360.0};
        scene.bs_location = {0.0, 0.0};
        scene.rp_locations = preset_detail::outdoor_rp_line(rp_stride);
        const std::vector<Point2> path{{20.0, 355.0}, {20.0, 10.0}, {195.0, 10.0}};
        const double total = distance(path[0], path[1]) + distance(path[1], path[2]);
        for (int i = 0; i < n_tp; ++i)
            scene.tp_locations.push_back(
                preset_detail::along_polyline(path, rng.next_uniform() * total));
    } else {
        throw config_error("unknown scene preset '" + name + "'");
    }
    scene.validate();
    return scene;
}

// Scene file round-trip (gen-scene output): `area`, `bs`, repeated `rp` and
// `tp` lines, plus the grid configuration keys.
inline void write_scene_file(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    char buf[160];
    const auto line = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof(buf), fmt, args...);
        out << buf << '\n';
    };
    line("area = %.17g %.17g %.17g %.17g", scene.area_bounds.min_x, scene.area_bounds.min_y,
         scene.area_bounds.max_x, scene.area_bounds.max_y);
    line("bs = %.17g %.17g", scene.bs_location.x, scene.bs_location.y);
    line("n_rb = %d", scene.n_rb);
    line("n_tx = %d", scene.n_tx);
    line("carrier_freq_hz = %.17g", scene.carrier_freq_hz);
    for (const auto& p : scene.rp_locations) line("rp = %.17g %.17g", p.x, p.y);
    for (const auto& p : scene.tp_locations) line("tp = %.17g %.17g", p.x, p.y);
}

inline Scene read_scene_file(const std::filesystem::path& path) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(path);
    Scene scene;
    const std::vector<double> area = cfg.get_doubles("area");
    if (area.size() != 4) throw config_error("scene file: 'area' needs 4 numbers");
    scene.area_bounds = {area[0], area[1], area[2], area[3]};
    const std::vector<double> bs = cfg.get_doubles("bs");
    if (bs.size() != 2) throw config_error("scene file: 'bs' needs 2 numbers");
    scene.bs_location = {bs[0], bs[1]};
    scene.n_rb = static_cast<int>(cfg.get_int("n_rb", 25));
    scene.n_tx = static_cast<int>(cfg.get_int("n_tx", 1));
    scene.carrier_freq_hz = cfg.get_double("carrier_freq_hz", 2.12e9);
    for (const std::string& v : cfg.get_all("rp")) {
        const std::vector<double> p = KeyValueConfig::split_doubles("rp", v);
        if (p.size() != 2) throw config_error("scene file: 'rp' needs 2 numbers");
        scene.rp_locations.push_back({p[0], p[1]});
    }
    for (const std::string& v : cfg.get_all("tp")) {
        const std::vector<double> p = KeyValueConfig::split_doubles("tp", v);
        if (p.size() != 2) throw config_error("scene file: 'tp' needs 2 numbers");
        scene.tp_locations.push_back({p[0], p[1]});
    }
    scene.validate();
    return scene;
}

// Everything one experiment run needs, resolved from a config file. Every
// key has a default; the file only pins what differs.
struct ExperimentConfig {
    Scene scene;
    ChannelParams channel;

    int slots_per_rp = 2000;
    std::array<double, 3> split_fractions{0.4, 0.1, 0.5};  // SLN train / SLN val / FN source
    std::uint64_t split_seed = 1;

    int knn_k = 5;
    int wknn_k = 5;

    TrainConfig sln_train;
    double sln_dropout = kSlnDefaultDropout;

    int fusion_s = 50;
    double fn_train_fraction = 0.8;  // window-level FN train/val split
    TrainConfig fn_train;

    int eval_slots_per_tp = 1000;
    std::filesystem::path out_dir = "out";
    bool export_map_jsonl = false;

    std::uint64_t master_seed = 1;
    std::uint64_t config_digest = 0;
};

namespace config_detail {

inline Optimizer parse_optimizer(const std::string& name) {
    if (name == "sgd") return Optimizer::sgd;
    if (name == "sgd_momentum") return Optimizer::sgd_momentum;
    if (name == "adam") return Optimizer::adam;
    throw config_error("unknown optimizer '" + name + "'");
}

inline TrainConfig parse_train(const KeyValueConfig& cfg, const std::string& prefix,
                               std::uint64_t seed, const TrainConfig& defaults) {
    TrainConfig t = defaults;
    t.learning_rate = cfg.get_double(prefix + "_learning_rate", defaults.learning_rate);
    t.batch_size = static_cast<int>(cfg.get_int(prefix + "_batch_size", defaults.batch_size));
    t.max_epochs = static_cast<int>(cfg.get_int(prefix + "_max_epochs", defaults.max_epochs));
    t.patience = static_cast<int>(cfg.get_int(prefix + "_patience", defaults.patience));
    t.optimizer = parse_optimizer(cfg.get_string(prefix + "_optimizer", "adam"));
    t.momentum = cfg.get_double(prefix + "_momentum", defaults.momentum);
    t.seed = seed;
    t.validate();
    return t;
}

}  // namespace config_detail

// Assembles the experiment configuration. `seed_override`, when present,
// replaces the file's `seed` key (the CLI --seed flag).
inline ExperimentConfig load_experiment_config(const KeyValueConfig& cfg,
                                               std::optional<std::uint64_t> seed_override) {
    ExperimentConfig ec;
    ec.master_seed = seed_override
                         ? *seed_override
                         : static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    ec.config_digest = rng_detail::combine(cfg.digest(), ec.master_seed);

    const CounterRng seeds(ec.master_seed);

    // scene
    const std::string preset = cfg.get_string("scene_preset", "indoor");
    const int n_tp = static_cast<int>(cfg.get_int("n_tp", 10));
    const std::uint64_t tp_seed = cfg.has("tp_seed")
                                      ? static_cast<std::uint64_t>(cfg.get_int("tp_seed", 0))
                                      : seeds.fork("tp").key();
    if (const auto scene_file = cfg.get("scene_file")) {
        std::filesystem::path p = *scene_file;
        if (p.is_relative() && cfg.source_path())
            p = cfg.source_path()->parent_path() / p;
        ec.scene = read_scene_file(p);
    } else {
        const int stride = static_cast<int>(cfg.get_int("outdoor_rp_stride", 1));
        ec.scene = scene_preset(preset, tp_seed, n_tp, stride);
    }
    if (cfg.has("bs_x") || cfg.has("bs_y")) {
        ec.scene.bs_location = {cfg.get_double("bs_x", ec.scene.bs_location.x),
                                cfg.get_double("bs_y", ec.scene.bs_location.y)};
    }
    ec.scene.n_rb = static_cast<int>(cfg.get_int("n_rb", ec.scene.n_rb));
    ec.scene.n_tx = static_cast<int>(cfg.get_int("n_tx", ec.scene.n_tx));
    ec.scene.carrier_freq_hz = cfg.get_double("carrier_freq_hz", ec.scene.carrier_freq_hz);
    ec.scene.validate();

    // channel
    ec.channel.pathloss_exponent = cfg.get_double("pathloss_exponent", 2.2);
    ec.channel.pathloss_ref_db = cfg.get_double("pathloss_ref_db", 0.0);
    ec.channel.shadowing_sigma_db = cfg.get_double("shadowing_sigma_db", 6.0);
    ec.channel.rician_k = cfg.get_double("rician_k", 6.0);
    ec.channel.coherence_slots = static_cast<int>(cfg.get_int("coherence_slots", 1));
    ec.channel.noise_sigma = cfg.get_double("noise_sigma", 0.0);
    ec.channel.rng_seed = seeds.fork("channel").key();
    ec.channel.validate();

    // dataset
    ec.slots_per_rp = static_cast<int>(cfg.get_int("slots_per_rp", 2000));
    const std::vector<double> fractions = cfg.get_doubles("split_fractions");
    if (!fractions.empty()) {
        if (fractions.size() != 3)
            throw config_error("split_fractions needs exactly 3 numbers");
        ec.split_fractions = {fractions[0], fractions[1], fractions[2]};
    }
    ec.split_seed = seeds.fork("split").key();

    // localizers
    ec.knn_k = static_cast<int>(cfg.get_int("knn_k", 5));
    ec.wknn_k = static_cast<int>(cfg.get_int("wknn_k", ec.knn_k));
    ec.sln_dropout = cfg.get_double("sln_dropout", kSlnDefaultDropout);

    TrainConfig sln_defaults;
    sln_defaults.max_epochs = 30;
    sln_defaults.patience = 5;
    ec.sln_train = config_detail::parse_train(cfg, "sln", seeds.fork("sln").key(), sln_defaults);

    // fusion
    ec.fusion_s = static_cast<int>(cfg.get_int("fusion_s", 50));
    ec.fn_train_fraction = cfg.get_double("fn_train_fraction", 0.8);
    TrainConfig fn_defaults;
    fn_defaults.max_epochs = 300;
    fn_defaults.patience = 30;
    fn_defaults.batch_size = 32;
    ec.fn_train = config_detail::parse_train(cfg, "fn", seeds.fork("fn").key(), fn_defaults);

    // evaluation
    ec.eval_slots_per_tp = static_cast<int>(cfg.get_int("eval_slots_per_tp", 1000));
    ec.out_dir = cfg.get_string("out_dir", "out");
    ec.export_map_jsonl = cfg.get_bool("export_map_jsonl", false);

    if (ec.slots_per_rp < 1 || ec.eval_slots_per_tp < 1 || ec.fusion_s < 1 || ec.knn_k < 1 ||
        ec.wknn_k < 1)
        throw config_error("counts must be positive");
    if (!(ec.fn_train_fraction > 0.0 && ec.fn_train_fraction < 1.0))
        throw config_error("fn_train_fraction must be in (0,1)");
    return ec;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                               std::optional<std::uint64_t> seed_override) {
    return load_experiment_config(KeyValueConfig::parse_file(path), seed_override);
}

}  // namespace csiloc

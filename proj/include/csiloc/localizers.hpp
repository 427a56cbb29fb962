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
// Slot-based localizers g1: KNN and WKNN over the fingerprint map, and the
// SLN (softmax MLP over reference points with a probability-weighted
// coordinate estimate). KNN distances are Euclidean over standardized
// amplitudes; ties resolve to the lower record index. Both a linear-scan
// index and an exact kd-tree are provided and must agree query-for-query.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csiloc/common.hpp"
#include "csiloc/dataset.hpp"
#include "csiloc/mlp.hpp"

namespace csiloc {

// SLN output over the M reference points.
struct ProbabilityVector {
    std::vector<double> probs;

    void validate() const {
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw parameter_error("ProbabilityVector: negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw parameter_error("ProbabilityVector: entries sum to " + std::to_string(sum));
    }
};

// Neighbor in standardized feature space: (Euclidean distance, record index).
// Ordering is lexicographic so equal distances resolve to the lower index.
using Neighbor = std::pair<double, int>;

// Linear-scan exact k-NN over a map's standardized snapshots.
class KnnIndex {
  public:
    static KnnIndex build(const FingerprintDataset& map) {
        if (map.records.empty()) throw parameter_error("KnnIndex: empty map");
        map.validate();
        KnnIndex index;
        index.dim_ = map.feature_len();
        index.locations_.reserve(map.records.size());
        index.features_.resize(map.records.size() * static_cast<std::size_t>(index.dim_));
        for (std::size_t i = 0; i < map.records.size(); ++i) {
            map.normalization.apply(
                map.records[i].snapshot,
                std::span<double>(&index.features_[i * static_cast<std::size_t>(index.dim_)],
                                  static_cast<std::size_t>(index.dim_)));
            index.locations_.push_back(map.records[i].location);
        }
        index.normalization_ = map.normalization;
        index.layout_digest_ = map.layout.digest();
        return index;
    }

    int size() const { return static_cast<int>(locations_.size()); }
    int dim() const { return dim_; }
    const Normalization& normalization() const { return normalization_; }
    std::uint64_t layout_digest() const { return layout_digest_; }
    const Point2& location(int i) const { return locations_[static_cast<std::size_t>(i)]; }

    // k smallest (distance, index) pairs in lexicographic order.
    std::vector<Neighbor> query(std::span<const double> normalized_snapshot, int k) const {
        if (k < 1) throw parameter_error("KnnIndex: k must be >= 1");
        if (k > size())
            throw parameter_error("KnnIndex: k=" + std::to_string(k) + " exceeds record count " +
                                  std::to_string(size()));
        if (static_cast<int>(normalized_snapshot.size()) != dim_)
            throw parameter_error("KnnIndex: snapshot width mismatch");

        std::priority_queue<Neighbor> best;  // max-heap on (dist^2, index)
        for (int i = 0; i < size(); ++i) {
            double d2 = 0.0;
            const double* f = &features_[static_cast<std::size_t>(i) * dim_];
            for (int j = 0; j < dim_; ++j) {
                const double diff = normalized_snapshot[static_cast<std::size_t>(j)] - f[j];
                d2 += diff * diff;
            }
            const Neighbor cand{d2, i};
            if (static_cast<int>(best.size()) < k)
                best.push(cand);
            else if (cand < best.top()) {
                best.pop();
                best.push(cand);
            }
        }
        std::vector<Neighbor> out(best.size());
        for (std::size_t i = out.size(); i-- > 0;) {
            out[i] = best.top();
            best.pop();
        }
        for (auto& [d2, idx] : out) d2 = std::sqrt(d2);
        return out;
    }

    std::vector<double> normalize(const CsiSnapshot& snapshot) const {
        return normalization_.applied(snapshot);
    }

    std::span<const double> feature(int i) const {
        return {&features_[static_cast<std::size_t>(i) * dim_], static_cast<std::size_t>(dim_)};
    }

  private:
    int dim_ = 0;
    std::vector<double> features_;  // n x dim, standardized
    std::vector<Point2> locations_;
    Normalization normalization_;
    std::uint64_t layout_digest_ = 0;
};

// Exact kd-tree over the same standardized features. Returns exactly the
// same neighbor set as the linear scan, including index tie-breaks; a
// subtree is only pruned when its bound strictly exceeds the current worst.
class KdTree {
  public:
    static KdTree build(const KnnIndex& index, int leaf_size = 16) {
        KdTree tree;
        tree.index_ = &index;
        tree.leaf_size_ = leaf_size;
        tree.order_.resize(static_cast<std::size_t>(index.size()));
        for (int i = 0; i < index.size(); ++i) tree.order_[static_cast<std::size_t>(i)] = i;
        tree.nodes_.reserve(2 * tree.order_.size() / static_cast<std::size_t>(leaf_size) + 4);
        tree.build_node(0, index.size());
        return tree;
    }

    std::vector<Neighbor> query(std::span<const double> normalized_snapshot, int k) const {
        if (k < 1) throw parameter_error("KdTree: k must be >= 1");
        if (k > index_->size()) throw parameter_error("KdTree: k exceeds record count");
        std::priority_queue<Neighbor> best;
        std::vector<double> dim_offset_sq(static_cast<std::size_t>(index_->dim()), 0.0);
        search(0, normalized_snapshot, k, 0.0, dim_offset_sq, best);
        std::vector<Neighbor> out(best.size());
        for (std::size_t i = out.size(); i-- > 0;) {
            out[i] = best.top();
            best.pop();
        }
        for (auto& [d2, idx] : out) d2 = std::sqrt(d2);
        return out;
    }

  private:
    struct Node {
        int begin = 0, end = 0;       // leaf: range into order_
        int split_dim = -1;           // -1 marks a leaf
        double split_value = 0.0;
        int left = -1, right = -1;
    };

    int build_node(int begin, int end) {
        const int node_id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{begin, end, -1, 0.0, -1, -1});
        if (end - begin <= leaf_size_) return node_id;

        // split on the widest-spread dimension at its midpoint
        int best_dim = 0;
        double best_spread = -1.0;
        double best_lo = 0.0, best_hi = 0.0;
        for (int d = 0; d < index_->dim(); ++d) {
            double lo = index_->feature(order_[static_cast<std::size_t>(begin)])[static_cast<std::size_t>(d)];
            double hi = lo;
            for (int i = begin + 1; i < end; ++i) {
                const double v =
                    index_->feature(order_[static_cast<std::size_t>(i)])[static_cast<std::size_t>(d)];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                best_dim = d;
                best_lo = lo;
                best_hi = hi;
            }
        }
        if (best_spread <= 0.0) return node_id;  // all points identical: keep as leaf

        const double split = 0.5 * (best_lo + best_hi);
        auto* base = order_.data();
        int* mid = std::partition(base + begin, base + end, [&](int i) {
            return index_->feature(i)[static_cast<std::size_t>(best_dim)] < split;
        });
        int m = static_cast<int>(mid - base);
        if (m == begin || m == end) m = begin + (end - begin) / 2;  // degenerate mass at split

        nodes_[static_cast<std::size_t>(node_id)].split_dim = best_dim;
        nodes_[static_cast<std::size_t>(node_id)].split_value = split;
        const int left = build_node(begin, m);
        nodes_[static_cast<std::size_t>(node_id)].left = left;
        const int right = build_node(m, end);
        nodes_[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    void scan_leaf(const Node& node, std::span<const double> q, int k,
                   std::priority_queue<Neighbor>& best) const {
        for (int i = node.begin; i < node.end; ++i) {
            const int idx = order_[static_cast<std::size_t>(i)];
            const auto f = index_->feature(idx);
            double d2 = 0.0;
            for (int j = 0; j < index_->dim(); ++j) {
                const double diff = q[static_cast<std::size_t>(j)] - f[static_cast<std::size_t>(j)];
                d2 += diff * diff;
            }
            const Neighbor cand{d2, idx};
            if (static_cast<int>(best.size()) < k)
                best.push(cand);
            else if (cand < best.top()) {
                best.pop();
                best.push(cand);
            }
        }
    }

    // Branch-and-bound with per-dimension region offsets: `bound_d2` is the
    // exact squared distance from the query to the current node's region.
    void search(int node_id, std::span<const double> q, int k, double bound_d2,
                std::vector<double>& dim_offset_sq, std::priority_queue<Neighbor>& best) const {
        const Node& node = nodes_[static_cast<std::size_t>(node_id)];
        if (static_cast<int>(best.size()) == k && bound_d2 > best.top().first) return;
        if (node.split_dim < 0) {
            scan_leaf(node, q, k, best);
            return;
        }
        const std::size_t dim = static_cast<std::size_t>(node.split_dim);
        const double delta = q[dim] - node.split_value;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;

        search(near, q, k, bound_d2, dim_offset_sq, best);

        const double old_offset = dim_offset_sq[dim];
        const double far_offset = delta * delta;
        const double far_bound = bound_d2 - old_offset + far_offset;
        dim_offset_sq[dim] = far_offset;
        search(far, q, k, far_bound, dim_offset_sq, best);
        dim_offset_sq[dim] = old_offset;
    }

    const KnnIndex* index_ = nullptr;
    int leaf_size_ = 16;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

// Unweighted mean of the k nearest records' locations.
inline LocationEstimate knn_locate(const KnnIndex& index, const CsiSnapshot& snapshot, int k) {
    const std::vector<Neighbor> nn = index.query(index.normalize(snapshot), k);
    Point2 p{0.0, 0.0};
    for (const auto& [d, i] : nn) {
        p.x += index.location(i).x;
        p.y += index.location(i).y;
    }
    p.x /= static_cast<double>(nn.size());
    p.y /= static_cast<double>(nn.size());
    return LocationEstimate{p, EstimateSource::knn};
}

inline LocationEstimate knn_locate(const CsiSnapshot& snapshot, const FingerprintDataset& map,
                                   int k) {
    return knn_locate(KnnIndex::build(map), snapshot, k);
}

inline constexpr double kWknnDistanceEpsilon = 1e-9;

// Inverse-distance weighted mean of the k nearest records' locations.
inline LocationEstimate wknn_locate(const KnnIndex& index, const CsiSnapshot& snapshot, int k) {
    const std::vector<Neighbor> nn = index.query(index.normalize(snapshot), k);
    double wsum = 0.0;
    for (const auto& [d, i] : nn) wsum += 1.0 / (d + kWknnDistanceEpsilon);
    Point2 p{0.0, 0.0};
    for (const auto& [d, i] : nn) {
        const double w = (1.0 / (d + kWknnDistanceEpsilon)) / wsum;
        p.x += w * index.location(i).x;
        p.y += w * index.location(i).y;
    }
    return LocationEstimate{p, EstimateSource::wknn};
}

inline LocationEstimate wknn_locate(const CsiSnapshot& snapshot, const FingerprintDataset& map,
                                    int k) {
    return wknn_locate(KnnIndex::build(map), snapshot, k);
}

// Trained slot-based localization network plus everything inference needs:
// the RP coordinates, the training-split normalization, and the digest of
// the CRS layout the fingerprints came from.
struct SlnLocalizer {
    MlpModel model;
    std::vector<Point2> rp_locations;
    Normalization normalization;
    std::uint64_t layout_digest = 0;

    void validate() const {
        model.validate();
        if (model.head != Head::softmax)
            throw parameter_error("SlnLocalizer: model must have a softmax head");
        if (model.output_width != static_cast<int>(rp_locations.size()))
            throw parameter_error("SlnLocalizer: output width != number of RPs");
        normalization.validate();
        if (static_cast<int>(normalization.size()) != model.input_width)
            throw parameter_error("SlnLocalizer: normalization width mismatch");
    }
};

// Softmax probabilities over RPs and the probability-weighted coordinate
// estimate sum_m p_m * L_m.
inline std::pair<ProbabilityVector, LocationEstimate> sln_infer(const SlnLocalizer& localizer,
                                                                const CsiSnapshot& snapshot) {
    if (static_cast<int>(snapshot.size()) != localizer.model.input_width)
        throw parameter_error("sln_infer: snapshot width " + std::to_string(snapshot.size()) +
                              " does not match model input width " +
                              std::to_string(localizer.model.input_width));
    const std::vector<double> x = localizer.normalization.applied(snapshot);
    ProbabilityVector pv{forward(localizer.model, x, RunMode::infer, nullptr, nullptr)};
    Point2 p{0.0, 0.0};
    for (std::size_t m = 0; m < pv.probs.size(); ++m) {
        p.x += pv.probs[m] * localizer.rp_locations[m].x;
        p.y += pv.probs[m] * localizer.rp_locations[m].y;
    }
    return {std::move(pv), LocationEstimate{p, EstimateSource::sln}};
}

// Digest-checked variant: rejects snapshots produced under a different CRS
// layout than the localizer was trained on.
inline std::pair<ProbabilityVector, LocationEstimate> sln_infer(const SlnLocalizer& localizer,
                                                                const CsiSnapshot& snapshot,
                                                                std::uint64_t layout_digest) {
    if (layout_digest != localizer.layout_digest)
        throw parameter_error("sln_infer: snapshot layout digest mismatch");
    return sln_infer(localizer, snapshot);
}

inline constexpr int kSlnHiddenWidth = 256;
inline constexpr int kSlnHiddenLayers = 4;
inline constexpr double kSlnDefaultDropout = 0.3;

struct SlnTrainOutput {
    SlnLocalizer localizer;
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

// Builds the four-layer Dense-256 softmax classifier over the M RPs and
// trains it with cross-entropy on one-hot rp_index targets. Features are
// standardized with the training split's normalization.
inline SlnTrainOutput train_sln(const FingerprintDataset& map_train,
                                const FingerprintDataset& map_val, const Scene& scene,
                                const TrainConfig& cfg,
                                double dropout_rate = kSlnDefaultDropout) {
    scene.validate();
    map_train.validate();
    map_val.validate();
    if (map_train.layout.digest() != map_val.layout.digest())
        throw parameter_error("train_sln: train/val layout mismatch");
    const int m_rps = static_cast<int>(scene.rp_locations.size());
    const int width = map_train.feature_len();

    const auto to_samples = [&](const FingerprintDataset& ds,
                                std::vector<std::vector<double>>& x,
                                std::vector<std::vector<double>>& y) {
        x.reserve(ds.records.size());
        y.reserve(ds.records.size());
        for (const auto& r : ds.records) {
            if (r.rp_index < 0 || r.rp_index >= m_rps)
                throw parameter_error("train_sln: record without a valid rp_index label");
            x.push_back(map_train.normalization.applied(r.snapshot));
            std::vector<double> onehot(static_cast<std::size_t>(m_rps), 0.0);
            onehot[static_cast<std::size_t>(r.rp_index)] = 1.0;
            y.push_back(std::move(onehot));
        }
    };
    std::vector<std::vector<double>> x_train, y_train, x_val, y_val;
    to_samples(map_train, x_train, y_train);
    to_samples(map_val, x_val, y_val);

    const MlpModel initial =
        make_mlp(width, std::vector<int>(kSlnHiddenLayers, kSlnHiddenWidth), m_rps,
                 Head::softmax, dropout_rate, cfg.seed);
    TrainResult result = train(initial, x_train, y_train, x_val, y_val,
                               LossKind::cross_entropy, cfg);

    SlnTrainOutput out;
    out.localizer = SlnLocalizer{std::move(result.model), scene.rp_locations,
                                 map_train.normalization, map_train.layout.digest()};
    out.history = std::move(result.history);
    out.best_epoch = result.best_epoch;
    out.best_val_loss = result.best_val_loss;
    out.localizer.validate();
    return out;
}

// Fraction of records whose argmax probability lands on their rp_index.
inline double sln_top1_accuracy(const SlnLocalizer& localizer,
                                const FingerprintDataset& dataset) {
    if (dataset.records.empty()) throw parameter_error("sln_top1_accuracy: empty dataset");
    std::size_t hits = 0;
    for (const auto& r : dataset.records) {
        const std::vector<double> x = localizer.normalization.applied(r.snapshot);
        const std::vector<double> probs =
            forward(localizer.model, x, RunMode::infer, nullptr, nullptr);
        if (argmax(probs) == r.rp_index) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(dataset.records.size());
}

inline constexpr std::string_view kSlnMagic = "CSILOCSL";
inline constexpr std::uint16_t kSlnVersion = 1;

// Container: localizer metadata followed by the embedded model stream.
inline void save_localizer(const SlnLocalizer& localizer, const std::filesystem::path& path) {
    localizer.validate();
    ByteWriter w;
    w.ascii(kSlnMagic);
    w.u16(kSlnVersion);
    w.u64(localizer.layout_digest);
    w.u32(static_cast<std::uint32_t>(localizer.rp_locations.size()));
    for (const auto& p : localizer.rp_locations) {
        w.f64(p.x);
        w.f64(p.y);
    }
    w.u32(static_cast<std::uint32_t>(localizer.normalization.size()));
    for (double v : localizer.normalization.mean) w.f64(v);
    for (double v : localizer.normalization.scale) w.f64(v);
    const ByteWriter model_bytes = localizer.model.serialize();
    w.bytes(model_bytes.data());
    w.write_file(path);
}

inline SlnLocalizer load_localizer(const std::filesystem::path& path) {
    ByteReader r = ByteReader::from_file(path);
    r.need(8, "localizer header");
    if (r.ascii(kSlnMagic.size()) != kSlnMagic) throw format_error("localizer: bad magic", 0);
    const std::uint16_t version = r.u16();
    if (version != kSlnVersion)
        throw format_error("localizer: unsupported version " + std::to_string(version), 8);
    SlnLocalizer loc;
    loc.layout_digest = r.u64();
    const std::uint32_t m = r.u32();
    loc.rp_locations.resize(m);
    for (auto& p : loc.rp_locations) {
        p.x = r.f64();
        p.y = r.f64();
    }
    const std::uint32_t width = r.u32();
    loc.normalization.mean.resize(width);
    loc.normalization.scale.resize(width);
    for (auto& v : loc.normalization.mean) v = r.f64();
    for (auto& v : loc.normalization.scale) v = r.f64();
    loc.model = deserialize_model(r, static_cast<int>(width));
    r.expect_exhausted("localizer");
    loc.validate();
    return loc;
}

}  // namespace csiloc

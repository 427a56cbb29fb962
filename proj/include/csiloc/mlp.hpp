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
// Plain dense multilayer perceptron: forward pass with inverted dropout,
// backpropagation, softmax/linear heads, cross-entropy/MSE losses, minibatch
// descent (SGD / momentum / Adam) with early stopping, and bit-exact model
// serialization. No BLAS; the inner loops use a fixed summation order so
// results are reproducible across runs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csiloc/binio.hpp"
#include "csiloc/common.hpp"
#include "csiloc/rng.hpp"

namespace csiloc {

enum class Activation : std::uint8_t { relu = 0, identity = 1 };
enum class Head : std::uint8_t { softmax = 0, linear = 1 };
enum class LossKind : std::uint8_t { cross_entropy = 0, mse = 1 };
enum class Optimizer : std::uint8_t { sgd = 0, sgd_momentum = 1, adam = 2 };

inline constexpr double kCeLogFloor = 1e-12;  // clamp for log(q) in cross-entropy

struct DenseLayer {
    int in_width = 0;
    int out_width = 0;
    std::vector<double> weights;  // [out x in], row-major
    std::vector<double> biases;   // [out]
    Activation activation = Activation::relu;
    double dropout_rate = 0.0;    // inverted dropout; 0 disables

    void validate() const {
        if (in_width < 1 || out_width < 1) throw parameter_error("DenseLayer: bad widths");
        if (weights.size() != static_cast<std::size_t>(in_width) * out_width)
            throw parameter_error("DenseLayer: weight shape mismatch");
        if (biases.size() != static_cast<std::size_t>(out_width))
            throw parameter_error("DenseLayer: bias shape mismatch");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
            throw parameter_error("DenseLayer: dropout_rate must be in [0,1)");
        for (double w : weights)
            if (!std::isfinite(w)) throw parameter_error("DenseLayer: non-finite weight");
        for (double b : biases)
            if (!std::isfinite(b)) throw parameter_error("DenseLayer: non-finite bias");
    }
};

struct MlpModel {
    std::vector<DenseLayer> layers;  // may be empty (head-only model)
    Head head = Head::linear;
    int input_width = 0;
    int output_width = 0;

    void validate() const {
        if (input_width < 1 || output_width < 1) throw parameter_error("MlpModel: bad widths");
        int w = input_width;
        for (const auto& layer : layers) {
            layer.validate();
            if (layer.in_width != w) throw parameter_error("MlpModel: layer widths do not chain");
            w = layer.out_width;
        }
        if (w != output_width) throw parameter_error("MlpModel: output width mismatch");
        if (head == Head::softmax && output_width < 2)
            throw parameter_error("MlpModel: softmax head needs output_width >= 2");
    }

    ByteWriter serialize() const;
    std::uint64_t content_hash() const { return serialize().content_hash(); }
};

// He-uniform for ReLU layers, Glorot-uniform otherwise, zero biases.
inline DenseLayer make_dense_layer(int in_width, int out_width, Activation activation,
                                   double dropout_rate, RngStream& rng) {
    DenseLayer layer;
    layer.in_width = in_width;
    layer.out_width = out_width;
    layer.activation = activation;
    layer.dropout_rate = dropout_rate;
    const double limit = activation == Activation::relu
                             ? std::sqrt(6.0 / in_width)
                             : std::sqrt(6.0 / (in_width + out_width));
    layer.weights.resize(static_cast<std::size_t>(in_width) * out_width);
    for (double& w : layer.weights) w = (2.0 * rng.next_uniform() - 1.0) * limit;
    layer.biases.assign(static_cast<std::size_t>(out_width), 0.0);
    return layer;
}

// Hidden ReLU stack with uniform dropout plus an identity output layer.
inline MlpModel make_mlp(int input_width, const std::vector<int>& hidden_widths,
                         int output_width, Head head, double dropout_rate,
                         std::uint64_t seed) {
    MlpModel model;
    model.input_width = input_width;
    model.output_width = output_width;
    model.head = head;
    RngStream rng(CounterRng(seed).fork("init"));
    int w = input_width;
    for (int h : hidden_widths) {
        model.layers.push_back(make_dense_layer(w, h, Activation::relu, dropout_rate, rng));
        w = h;
    }
    model.layers.push_back(make_dense_layer(w, output_width, Activation::identity, 0.0, rng));
    model.validate();
    return model;
}

enum class RunMode : std::uint8_t { train = 0, infer = 1 };

// Intermediate state of one forward() call, consumed by backward().
struct ForwardCache {
    std::vector<std::vector<double>> inputs;   // input to each layer
    std::vector<std::vector<double>> preacts;  // z = W a + b per layer
    std::vector<std::vector<double>> masks;    // dropout multipliers; empty per layer if none
    std::vector<double> logits;                // pre-head output
    bool train_mode = false;
    int input_width = 0;
    int output_width = 0;
    std::size_t n_layers = 0;
};

namespace mlp_detail {

// Fixed-order dot product, four-lane unrolled. The lane structure pins the
// summation order so optimized builds stay run-to-run reproducible.
inline double dot(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3)) + tail;
}

inline void softmax_inplace(std::vector<double>& v) {
    double max_logit = v[0];
    for (double x : v) max_logit = std::max(max_logit, x);
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - max_logit);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

}  // namespace mlp_detail

// Single-sample forward pass. In train mode, layers with dropout draw
// inverted-dropout masks from `rng` (scale kept at train time, so infer mode
// is the plain affine stack). `cache`, when given, captures what backward()
// needs.
inline std::vector<double> forward(const MlpModel& model, std::span<const double> input,
                                   RunMode mode, RngStream* rng, ForwardCache* cache) {
    if (static_cast<int>(input.size()) != model.input_width)
        throw parameter_error("forward: input width " + std::to_string(input.size()) +
                              " does not match model input width " +
                              std::to_string(model.input_width));
    for (double v : input)
        if (!std::isfinite(v)) throw parameter_error("forward: non-finite input");

    const bool train = mode == RunMode::train;
    if (cache) {
        cache->inputs.resize(model.layers.size());
        cache->preacts.resize(model.layers.size());
        cache->masks.resize(model.layers.size());
        cache->train_mode = train;
        cache->input_width = model.input_width;
        cache->output_width = model.output_width;
        cache->n_layers = model.layers.size();
    }

    std::vector<double> a(input.begin(), input.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const DenseLayer& layer = model.layers[l];
        if (cache) cache->inputs[l] = a;

        std::vector<double> z(static_cast<std::size_t>(layer.out_width));
        for (int o = 0; o < layer.out_width; ++o)
            z[static_cast<std::size_t>(o)] =
                mlp_detail::dot(&layer.weights[static_cast<std::size_t>(o) * layer.in_width],
                                a.data(), layer.in_width) +
                layer.biases[static_cast<std::size_t>(o)];
        if (cache) cache->preacts[l] = z;

        if (layer.activation == Activation::relu)
            for (double& x : z) x = x > 0.0 ? x : 0.0;

        if (train && layer.dropout_rate > 0.0) {
            if (!rng)
                throw parameter_error("forward: train mode with dropout requires an RNG");
            const double keep_scale = 1.0 / (1.0 - layer.dropout_rate);
            std::vector<double> mask(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                mask[i] = rng->next_uniform() < layer.dropout_rate ? 0.0 : keep_scale;
                z[i] *= mask[i];
            }
            if (cache) cache->masks[l] = std::move(mask);
        } else if (cache) {
            cache->masks[l].clear();
        }

        a = std::move(z);
    }

    if (cache) cache->logits = a;
    if (model.head == Head::softmax) mlp_detail::softmax_inplace(a);
    return a;
}

// Per-sample loss. Cross-entropy clamps log at 1e-12 and requires the target
// to be a probability distribution; MSE is the squared Euclidean error.
inline double loss_value(LossKind kind, std::span<const double> predicted,
                         std::span<const double> target) {
    if (predicted.size() != target.size())
        throw parameter_error("loss_value: shape mismatch");
    if (kind == LossKind::cross_entropy) {
        double sum = 0.0;
        for (double t : target) {
            if (t < 0.0) throw parameter_error("loss_value: negative cross-entropy target");
            sum += t;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw parameter_error("loss_value: cross-entropy target sums to " +
                                  std::to_string(sum) + ", not 1");
        double loss = 0.0;
        for (std::size_t i = 0; i < target.size(); ++i)
            loss -= target[i] * std::log(std::max(predicted[i], kCeLogFloor));
        return loss;
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = predicted[i] - target[i];
        loss += d * d;
    }
    return loss;
}

// Gradient of the loss with respect to the pre-head logits. Softmax and
// cross-entropy fuse to (q - p); a linear head passes 2*(prediction - target)
// straight through.
inline std::vector<double> loss_logit_gradient(LossKind kind, Head head,
                                               std::span<const double> predicted,
                                               std::span<const double> target) {
    if (predicted.size() != target.size())
        throw parameter_error("loss_logit_gradient: shape mismatch");
    if (kind == LossKind::cross_entropy && head != Head::softmax)
        throw parameter_error("loss_logit_gradient: cross-entropy requires a softmax head");
    if (kind == LossKind::mse && head != Head::linear)
        throw parameter_error("loss_logit_gradient: MSE requires a linear head");
    std::vector<double> g(predicted.size());
    if (kind == LossKind::cross_entropy) {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = predicted[i] - target[i];
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (predicted[i] - target[i]);
    }
    return g;
}

// Parameter gradients mirroring the model's layer structure.
struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static Gradients zeros_like(const MlpModel& model) {
        Gradients g;
        g.weights.resize(model.layers.size());
        g.biases.resize(model.layers.size());
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            g.weights[l].assign(model.layers[l].weights.size(), 0.0);
            g.biases[l].assign(model.layers[l].biases.size(), 0.0);
        }
        return g;
    }

    void set_zero() {
        for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
        for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
    }

    void scale(double f) {
        for (auto& w : weights)
            for (double& v : w) v *= f;
        for (auto& b : biases)
            for (double& v : b) v *= f;
    }
};

// Backpropagates `logit_grad` (dL/d logits) through the cached forward pass,
// accumulating parameter gradients into `grads`.
inline void backward_accumulate(const MlpModel& model, const ForwardCache& cache,
                                std::span<const double> logit_grad, Gradients& grads) {
    if (cache.n_layers != model.layers.size() || cache.input_width != model.input_width ||
        cache.output_width != model.output_width)
        throw state_error("backward: cache does not match this model");
    if (static_cast<int>(logit_grad.size()) != model.output_width)
        throw parameter_error("backward: logit gradient width mismatch");

    std::vector<double> delta(logit_grad.begin(), logit_grad.end());
    for (std::size_t li = model.layers.size(); li-- > 0;) {
        const DenseLayer& layer = model.layers[li];
        if (cache.preacts[li].size() != static_cast<std::size_t>(layer.out_width) ||
            cache.inputs[li].size() != static_cast<std::size_t>(layer.in_width))
            throw state_error("backward: stale cache for layer " + std::to_string(li));

        if (cache.train_mode && !cache.masks[li].empty())
            for (int o = 0; o < layer.out_width; ++o)
                delta[static_cast<std::size_t>(o)] *= cache.masks[li][static_cast<std::size_t>(o)];
        if (layer.activation == Activation::relu)
            for (int o = 0; o < layer.out_width; ++o)
                if (cache.preacts[li][static_cast<std::size_t>(o)] <= 0.0)
                    delta[static_cast<std::size_t>(o)] = 0.0;

        const std::vector<double>& a_in = cache.inputs[li];
        std::vector<double>& gw = grads.weights[li];
        std::vector<double>& gb = grads.biases[li];
        for (int o = 0; o < layer.out_width; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            gb[static_cast<std::size_t>(o)] += d;
            double* grow = &gw[static_cast<std::size_t>(o) * layer.in_width];
            for (int i = 0; i < layer.in_width; ++i) grow[i] += d * a_in[static_cast<std::size_t>(i)];
        }

        if (li > 0) {
            std::vector<double> prev(static_cast<std::size_t>(layer.in_width), 0.0);
            for (int o = 0; o < layer.out_width; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                if (d == 0.0) continue;
                const double* wrow = &layer.weights[static_cast<std::size_t>(o) * layer.in_width];
                for (int i = 0; i < layer.in_width; ++i) prev[static_cast<std::size_t>(i)] += d * wrow[i];
            }
            delta = std::move(prev);
        }
    }
}

inline Gradients backward(const MlpModel& model, const ForwardCache& cache,
                          std::span<const double> logit_grad) {
    Gradients grads = Gradients::zeros_like(model);
    backward_accumulate(model, cache, logit_grad, grads);
    return grads;
}

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 128;
    int max_epochs = 100;
    int patience = 10;  // epochs without val improvement before stopping
    std::uint64_t seed = 1;
    Optimizer optimizer = Optimizer::adam;
    double momentum = 0.9;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const {
        if (learning_rate < 0.0) throw parameter_error("TrainConfig: negative learning_rate");
        if (batch_size < 1) throw parameter_error("TrainConfig: batch_size must be >= 1");
        if (max_epochs < 1) throw parameter_error("TrainConfig: max_epochs must be >= 1");
        if (patience < 1) throw parameter_error("TrainConfig: patience must be >= 1");
    }
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    MlpModel model;  // best-validation weights
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

namespace mlp_detail {

struct OptimizerState {
    Gradients m, v;  // momentum / first moment, second moment
    std::int64_t step = 0;

    static OptimizerState zeros_like(const MlpModel& model) {
        return {Gradients::zeros_like(model), Gradients::zeros_like(model), 0};
    }
};

inline void apply_update(MlpModel& model, const Gradients& grad, const TrainConfig& cfg,
                         OptimizerState& state) {
    ++state.step;
    const auto update_span = [&](std::vector<double>& param, const std::vector<double>& g,
                                 std::vector<double>& m, std::vector<double>& v) {
        switch (cfg.optimizer) {
            case Optimizer::sgd:
                for (std::size_t i = 0; i < param.size(); ++i)
                    param[i] -= cfg.learning_rate * g[i];
                break;
            case Optimizer::sgd_momentum:
                for (std::size_t i = 0; i < param.size(); ++i) {
                    m[i] = cfg.momentum * m[i] + g[i];
                    param[i] -= cfg.learning_rate * m[i];
                }
                break;
            case Optimizer::adam: {
                const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.step));
                const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.step));
                for (std::size_t i = 0; i < param.size(); ++i) {
                    m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g[i];
                    v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
                    param[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
                }
                break;
            }
        }
    };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        update_span(model.layers[l].weights, grad.weights[l], state.m.weights[l], state.v.weights[l]);
        update_span(model.layers[l].biases, grad.biases[l], state.m.biases[l], state.v.biases[l]);
    }
}

}  // namespace mlp_detail

// Mean infer-mode loss over a sample set.
inline double evaluate_loss(const MlpModel& model, LossKind kind,
                            const std::vector<std::vector<double>>& x,
                            const std::vector<std::vector<double>>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::vector<double> out = forward(model, x[i], RunMode::infer, nullptr, nullptr);
        total += loss_value(kind, out, y[i]);
    }
    return total / static_cast<double>(x.size());
}

// Minibatch gradient descent with seeded shuffling and early stopping on the
// validation loss. Returns the weights of the best validation epoch. Throws
// training_error (carrying the last finite epoch) if a loss goes non-finite.
inline TrainResult train(const MlpModel& initial,
                         const std::vector<std::vector<double>>& x_train,
                         const std::vector<std::vector<double>>& y_train,
                         const std::vector<std::vector<double>>& x_val,
                         const std::vector<std::vector<double>>& y_val, LossKind kind,
                         const TrainConfig& cfg) {
    initial.validate();
    cfg.validate();
    if (x_train.empty() || x_val.empty()) throw parameter_error("train: empty sample set");
    if (x_train.size() != y_train.size() || x_val.size() != y_val.size())
        throw parameter_error("train: sample/target count mismatch");
    if (kind == LossKind::cross_entropy && initial.head != Head::softmax)
        throw parameter_error("train: cross-entropy requires a softmax head");
    if (kind == LossKind::mse && initial.head != Head::linear)
        throw parameter_error("train: MSE requires a linear head");

    MlpModel model = initial;
    mlp_detail::OptimizerState opt = mlp_detail::OptimizerState::zeros_like(model);
    RngStream shuffle_rng(CounterRng(cfg.seed).fork("shuffle"));
    RngStream dropout_rng(CounterRng(cfg.seed).fork("dropout"));

    TrainResult result;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    MlpModel best_model = model;
    int epochs_since_best = 0;
    int last_finite_epoch = 0;

    std::vector<std::size_t> order(x_train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    Gradients batch_grad = Gradients::zeros_like(model);
    ForwardCache cache;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        deterministic_shuffle(order, shuffle_rng);

        double train_loss_sum = 0.0;
        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t batch_n =
                std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                      order.size() - cursor);
            batch_grad.set_zero();
            for (std::size_t b = 0; b < batch_n; ++b) {
                const std::size_t idx = order[cursor + b];
                const std::vector<double> out =
                    forward(model, x_train[idx], RunMode::train, &dropout_rng, &cache);
                train_loss_sum += loss_value(kind, out, y_train[idx]);
                const std::vector<double> g =
                    loss_logit_gradient(kind, model.head, out, y_train[idx]);
                backward_accumulate(model, cache, g, batch_grad);
            }
            batch_grad.scale(1.0 / static_cast<double>(batch_n));
            mlp_detail::apply_update(model, batch_grad, cfg, opt);
            cursor += batch_n;
        }

        const double train_loss = train_loss_sum / static_cast<double>(order.size());
        const double val_loss = evaluate_loss(model, kind, x_val, y_val);
        result.history.push_back(EpochStats{epoch, train_loss, val_loss});

        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw training_error("train: loss diverged at epoch " + std::to_string(epoch) +
                                     " (last finite epoch " + std::to_string(last_finite_epoch) +
                                     ")",
                                 last_finite_epoch);
        last_finite_epoch = epoch;

        if (val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            best_model = model;
            epochs_since_best = 0;
        } else if (++epochs_since_best >= cfg.patience) {
            break;
        }
    }

    result.model = std::move(best_model);
    return result;
}

inline constexpr std::string_view kModelMagic = "CSILOCNN";
inline constexpr std::uint16_t kModelVersion = 1;

inline ByteWriter MlpModel::serialize() const {
    ByteWriter w;
    w.ascii(kModelMagic);
    w.u16(kModelVersion);
    w.u8(static_cast<std::uint8_t>(head));
    w.u8(0);
    w.u32(static_cast<std::uint32_t>(input_width));
    w.u32(static_cast<std::uint32_t>(output_width));
    w.u32(static_cast<std::uint32_t>(layers.size()));
    for (const auto& layer : layers) {
        w.u32(static_cast<std::uint32_t>(layer.in_width));
        w.u32(static_cast<std::uint32_t>(layer.out_width));
        w.u8(static_cast<std::uint8_t>(layer.activation));
        w.f64(layer.dropout_rate);
    }
    for (const auto& layer : layers) {
        for (double v : layer.weights) w.f64(v);
        for (double v : layer.biases) w.f64(v);
    }
    return w;
}

inline void save_model(const MlpModel& model, const std::filesystem::path& path) {
    model.validate();
    model.serialize().write_file(path);
}

inline MlpModel deserialize_model(ByteReader& r, int expected_input_width = -1) {
    r.need(8, "model header");
    if (r.ascii(kModelMagic.size()) != kModelMagic)
        throw format_error("model: bad magic", r.offset() - kModelMagic.size());
    const std::uint16_t version = r.u16();
    if (version != kModelVersion)
        throw format_error("model: unsupported version " + std::to_string(version),
                           r.offset() - 2);
    MlpModel model;
    model.head = static_cast<Head>(r.u8());
    r.u8();
    model.input_width = static_cast<int>(r.u32());
    model.output_width = static_cast<int>(r.u32());
    if (expected_input_width >= 0 && model.input_width != expected_input_width)
        throw format_error("model: input width " + std::to_string(model.input_width) +
                               " does not match expected width " +
                               std::to_string(expected_input_width),
                           r.offset() - 8);
    const std::uint32_t n_layers = r.u32();
    model.layers.resize(n_layers);
    for (auto& layer : model.layers) {
        layer.in_width = static_cast<int>(r.u32());
        layer.out_width = static_cast<int>(r.u32());
        layer.activation = static_cast<Activation>(r.u8());
        layer.dropout_rate = r.f64();
    }
    for (auto& layer : model.layers) {
        layer.weights.resize(static_cast<std::size_t>(layer.in_width) * layer.out_width);
        layer.biases.resize(static_cast<std::size_t>(layer.out_width));
        r.need(8 * (layer.weights.size() + layer.biases.size()), "layer parameters");
        for (double& v : layer.weights) v = r.f64();
        for (double& v : layer.biases) v = r.f64();
    }
    try {
        model.validate();
    } catch (const parameter_error& e) {
        throw format_error(std::string("model: ") + e.what(), r.offset());
    }
    return model;
}

inline MlpModel load_model(const std::filesystem::path& path, int expected_input_width = -1) {
    ByteReader r = ByteReader::from_file(path);
    MlpModel model = deserialize_model(r, expected_input_width);
    r.expect_exhausted("model");
    return model;
}

inline void write_history_csv(const std::vector<EpochStats>& history,
                              const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    out << "epoch,train_loss,val_loss\n";
    char line[128];
    for (const auto& e : history) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", e.epoch, e.train_loss, e.val_loss);
        out << line;
    }
}

inline int argmax(std::span<const double> v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

}  // namespace csiloc

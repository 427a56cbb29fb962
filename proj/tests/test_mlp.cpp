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

#include <cmath>
#include <fstream>
#include <vector>

#include "csiloc/mlp.hpp"
#include "test_support.hpp"

using namespace csiloc;

namespace {

// Independent reference forward pass (plain loops, optional fixed dropout
// masks). Used as the oracle for finite-difference gradient checks.
std::vector<double> ref_forward(const MlpModel& model, const std::vector<double>& input,
                                const std::vector<std::vector<double>>& masks) {
    std::vector<double> a = input;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const DenseLayer& layer = model.layers[l];
        std::vector<double> z(static_cast<std::size_t>(layer.out_width), 0.0);
        for (int o = 0; o < layer.out_width; ++o) {
            double s = layer.biases[static_cast<std::size_t>(o)];
            for (int i = 0; i < layer.in_width; ++i)
                s += layer.weights[static_cast<std::size_t>(o) * layer.in_width + i] *
                     a[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] = s;
        }
        if (layer.activation == Activation::relu)
            for (double& x : z) x = std::max(x, 0.0);
        if (l < masks.size() && !masks[l].empty())
            for (std::size_t i = 0; i < z.size(); ++i) z[i] *= masks[l][i];
        a = std::move(z);
    }
    if (model.head == Head::softmax) {
        double mx = a[0];
        for (double v : a) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : a) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : a) v /= sum;
    }
    return a;
}

double ref_loss(const MlpModel& model, LossKind kind, const std::vector<double>& input,
                const std::vector<double>& target,
                const std::vector<std::vector<double>>& masks) {
    return loss_value(kind, ref_forward(model, input, masks), target);
}

struct GradCheckReport {
    double max_rel_error = 0.0;
};

// Central finite differences (eps = 1e-5) over every parameter.
GradCheckReport gradient_check(const MlpModel& model, LossKind kind,
                               const std::vector<double>& input,
                               const std::vector<double>& target,
                               const std::vector<std::vector<double>>& masks) {
    ForwardCache cache;
    cache.train_mode = !masks.empty();
    cache.input_width = model.input_width;
    cache.output_width = model.output_width;
    cache.n_layers = model.layers.size();
    cache.inputs.resize(model.layers.size());
    cache.preacts.resize(model.layers.size());
    cache.masks.resize(model.layers.size());

    // analytic gradients via the library path, replaying the same masks
    std::vector<double> a = input;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const DenseLayer& layer = model.layers[l];
        cache.inputs[l] = a;
        std::vector<double> z(static_cast<std::size_t>(layer.out_width));
        for (int o = 0; o < layer.out_width; ++o) {
            double s = layer.biases[static_cast<std::size_t>(o)];
            for (int i = 0; i < layer.in_width; ++i)
                s += layer.weights[static_cast<std::size_t>(o) * layer.in_width + i] *
                     a[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] = s;
        }
        cache.preacts[l] = z;
        if (layer.activation == Activation::relu)
            for (double& x : z) x = std::max(x, 0.0);
        if (l < masks.size() && !masks[l].empty()) {
            cache.masks[l] = masks[l];
            for (std::size_t i = 0; i < z.size(); ++i) z[i] *= masks[l][i];
        }
        a = std::move(z);
    }
    cache.logits = a;
    std::vector<double> out = a;
    if (model.head == Head::softmax) {
        double mx = out[0];
        for (double v : out) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : out) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : out) v /= sum;
    }
    const std::vector<double> logit_grad = loss_logit_gradient(kind, model.head, out, target);
    const Gradients analytic = backward(model, cache, logit_grad);

    constexpr double eps = 1e-5;
    GradCheckReport report;
    MlpModel probe = model;
    const auto check_param = [&](double& p, double analytic_grad) {
        const double saved = p;
        p = saved + eps;
        const double up = ref_loss(probe, kind, input, target, masks);
        p = saved - eps;
        const double down = ref_loss(probe, kind, input, target, masks);
        p = saved;
        const double fd = (up - down) / (2.0 * eps);
        const double rel =
            std::abs(analytic_grad - fd) / std::max(std::abs(analytic_grad) + std::abs(fd), 1e-6);
        report.max_rel_error = std::max(report.max_rel_error, rel);
    };
    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        for (std::size_t i = 0; i < probe.layers[l].weights.size(); ++i)
            check_param(probe.layers[l].weights[i], analytic.weights[l][i]);
        for (std::size_t i = 0; i < probe.layers[l].biases.size(); ++i)
            check_param(probe.layers[l].biases[i], analytic.biases[l][i]);
    }
    return report;
}

std::vector<double> random_vector(const CounterRng& rng, std::uint64_t tag, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = rng.gaussian(tag, static_cast<std::uint64_t>(i));
    return v;
}

std::vector<double> one_hot(int n, int k) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(k)] = 1.0;
    return v;
}

}  // namespace

TEST_CASE("head-only model with a linear head is the identity") {
    MlpModel model;
    model.input_width = 4;
    model.output_width = 4;
    model.head = Head::linear;
    model.validate();
    const std::vector<double> x{0.5, -1.0, 2.0, 0.0};
    REQUIRE(forward(model, x, RunMode::infer, nullptr, nullptr) == x);
}

TEST_CASE("softmax of equal logits is uniform and shift-invariant") {
    MlpModel model;
    model.input_width = 15;
    model.output_width = 15;
    model.head = Head::softmax;
    const std::vector<double> zeros(15, 0.0);
    const std::vector<double> probs = forward(model, zeros, RunMode::infer, nullptr, nullptr);
    for (double p : probs) REQUIRE(p == Catch::Approx(1.0 / 15.0).epsilon(1e-12));

    const CounterRng rng(3);
    const std::vector<double> logits = random_vector(rng, 0, 15);
    std::vector<double> shifted = logits;
    for (double& v : shifted) v += 123.456;
    const auto p1 = forward(model, logits, RunMode::infer, nullptr, nullptr);
    const auto p2 = forward(model, shifted, RunMode::infer, nullptr, nullptr);
    double sum = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        REQUIRE(std::abs(p1[i] - p2[i]) < 1e-12);
        REQUIRE(p1[i] > 0.0);
        REQUIRE(p1[i] < 1.0);
        sum += p1[i];
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("loss closed forms") {
    const std::vector<double> uniform(15, 1.0 / 15.0);
    REQUIRE(loss_value(LossKind::cross_entropy, uniform, one_hot(15, 3)) ==
            Catch::Approx(std::log(15.0)).margin(1e-12));

    // perfect prediction under the log clamp
    REQUIRE(loss_value(LossKind::cross_entropy, one_hot(15, 3), one_hot(15, 3)) <= 1e-11);

    REQUIRE(loss_value(LossKind::mse, std::vector<double>{1.0, 2.0},
                       std::vector<double>{1.0, 2.0}) == 0.0);
    // 3-4-5 triangle: squared Euclidean error 25
    REQUIRE(loss_value(LossKind::mse, std::vector<double>{4.0, 6.0},
                       std::vector<double>{1.0, 2.0}) == 25.0);
}

TEST_CASE("cross-entropy rejects non-distribution targets") {
    const std::vector<double> q(4, 0.25);
    REQUIRE_THROWS_AS(loss_value(LossKind::cross_entropy, q, std::vector<double>{0.5, 0.5, 0.5, 0.5}),
                      parameter_error);
    REQUIRE_THROWS_AS(loss_value(LossKind::cross_entropy, q, std::vector<double>{1.5, -0.5, 0.0, 0.0}),
                      parameter_error);
}

TEST_CASE("fused softmax cross-entropy gradient is q - p") {
    const std::vector<double> q(15, 1.0 / 15.0);
    const std::vector<double> p = one_hot(15, 4);
    const std::vector<double> g = loss_logit_gradient(LossKind::cross_entropy, Head::softmax, q, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double expected = i == 4 ? 1.0 / 15.0 - 1.0 : 1.0 / 15.0;
        REQUIRE(g[i] == Catch::Approx(expected).margin(1e-15));
    }
    REQUIRE_THROWS_AS(loss_logit_gradient(LossKind::cross_entropy, Head::linear, q, p),
                      parameter_error);
    REQUIRE_THROWS_AS(loss_logit_gradient(LossKind::mse, Head::softmax, q, p), parameter_error);
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
    const MlpModel model = make_mlp(4, {8}, 3, Head::linear, 0.0, 9);
    ForwardCache cache;
    const std::vector<double> x{1.0, -2.0, 0.5, 3.0};
    forward(model, x, RunMode::train, nullptr, &cache);
    const Gradients g = backward(model, cache, std::vector<double>{0.0, 0.0, 0.0});
    for (const auto& w : g.weights)
        for (double v : w) REQUIRE(v == 0.0);
    for (const auto& b : g.biases)
        for (double v : b) REQUIRE(v == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    const CounterRng rng(21);
    const std::vector<std::vector<double>> no_masks;

    SECTION("relu stack, softmax head, cross-entropy") {
        const MlpModel model = make_mlp(4, {8}, 3, Head::softmax, 0.0, 100);
        const auto r = gradient_check(model, LossKind::cross_entropy, random_vector(rng, 1, 4),
                                      one_hot(3, 1), no_masks);
        REQUIRE(r.max_rel_error < 1e-4);
    }
    SECTION("relu stack, linear head, MSE") {
        const MlpModel model = make_mlp(4, {8}, 3, Head::linear, 0.0, 101);
        const auto r = gradient_check(model, LossKind::mse, random_vector(rng, 2, 4),
                                      random_vector(rng, 3, 3), no_masks);
        REQUIRE(r.max_rel_error < 1e-4);
    }
    SECTION("identity activations") {
        MlpModel model = make_mlp(5, {6, 6}, 2, Head::linear, 0.0, 102);
        for (auto& layer : model.layers) layer.activation = Activation::identity;
        const auto r = gradient_check(model, LossKind::mse, random_vector(rng, 4, 5),
                                      random_vector(rng, 5, 2), no_masks);
        REQUIRE(r.max_rel_error < 1e-4);
    }
    SECTION("dropout masks flow through the backward pass") {
        const MlpModel model = make_mlp(4, {8, 8}, 3, Head::softmax, 0.3, 103);
        // fixed masks: drop a few units, scale the rest by 1/(1-0.3)
        std::vector<std::vector<double>> masks(3);
        const double keep = 1.0 / 0.7;
        masks[0] = {keep, 0.0, keep, keep, 0.0, keep, keep, keep};
        masks[1] = {0.0, keep, keep, keep, keep, 0.0, keep, keep};
        const auto r = gradient_check(model, LossKind::cross_entropy, random_vector(rng, 6, 4),
                                      one_hot(3, 2), masks);
        REQUIRE(r.max_rel_error < 1e-4);
    }
}

TEST_CASE("library forward agrees with the reference forward") {
    const CounterRng rng(55);
    const MlpModel model = make_mlp(6, {10, 7}, 4, Head::softmax, 0.0, 200);
    for (int t = 0; t < 20; ++t) {
        const std::vector<double> x = random_vector(rng, static_cast<std::uint64_t>(t), 6);
        const auto lib = forward(model, x, RunMode::infer, nullptr, nullptr);
        const auto ref = ref_forward(model, x, {});
        for (std::size_t i = 0; i < lib.size(); ++i)
            REQUIRE(lib[i] == Catch::Approx(ref[i]).margin(1e-12));
    }
}

TEST_CASE("relu output is nonnegative and gates gradients") {
    const MlpModel model = make_mlp(3, {8}, 2, Head::linear, 0.0, 77);
    ForwardCache cache;
    const std::vector<double> x{0.3, -1.2, 0.8};
    forward(model, x, RunMode::train, nullptr, &cache);
    for (double z : cache.preacts[0]) (void)z;
    // layer outputs (= inputs of the next layer) are nonnegative after relu
    for (double v : cache.inputs[1]) REQUIRE(v >= 0.0);

    const Gradients g = backward(model, cache, std::vector<double>{1.0, -1.0});
    for (int o = 0; o < 8; ++o) {
        if (cache.preacts[0][static_cast<std::size_t>(o)] < 0.0) {
            REQUIRE(g.biases[0][static_cast<std::size_t>(o)] == 0.0);
            for (int i = 0; i < 3; ++i)
                REQUIRE(g.weights[0][static_cast<std::size_t>(o) * 3 + i] == 0.0);
        }
    }
}

TEST_CASE("inverted dropout: train-mode expectation equals infer output") {
    // positive weights and inputs keep every unit active, so the masked sum
    // concentrates tightly around its expectation
    MlpModel model;
    model.input_width = 5;
    model.output_width = 4;
    model.head = Head::linear;
    DenseLayer hidden;
    hidden.in_width = 5;
    hidden.out_width = 6;
    hidden.activation = Activation::relu;
    hidden.dropout_rate = 0.4;
    const CounterRng wrng(31);
    hidden.weights.resize(30);
    for (std::size_t i = 0; i < hidden.weights.size(); ++i)
        hidden.weights[i] = 0.2 + 0.8 * wrng.uniform(std::uint64_t{1}, i);
    hidden.biases.assign(6, 0.1);
    DenseLayer out_layer;
    out_layer.in_width = 6;
    out_layer.out_width = 4;
    out_layer.activation = Activation::identity;
    out_layer.weights.resize(24);
    for (std::size_t i = 0; i < out_layer.weights.size(); ++i)
        out_layer.weights[i] = 0.2 + 0.8 * wrng.uniform(std::uint64_t{2}, i);
    out_layer.biases.assign(4, 0.0);
    model.layers = {hidden, out_layer};
    model.validate();

    const std::vector<double> x{1.0, 0.8, 1.2, 0.9, 1.1};
    const std::vector<double> infer = forward(model, x, RunMode::infer, nullptr, nullptr);

    RngStream rng(123);
    std::vector<double> mean(infer.size(), 0.0);
    const int n = 20000;
    for (int t = 0; t < n; ++t) {
        const std::vector<double> out = forward(model, x, RunMode::train, &rng, nullptr);
        for (std::size_t i = 0; i < out.size(); ++i) mean[i] += out[i];
    }
    for (double& v : mean) v /= n;
    for (std::size_t i = 0; i < mean.size(); ++i)
        REQUIRE(mean[i] == Catch::Approx(infer[i]).epsilon(0.02));
}

TEST_CASE("train mode with dropout requires an RNG") {
    const MlpModel model = make_mlp(3, {4}, 2, Head::linear, 0.5, 1);
    REQUIRE_THROWS_AS(forward(model, std::vector<double>{1.0, 2.0, 3.0}, RunMode::train,
                              nullptr, nullptr),
                      parameter_error);
}

TEST_CASE("forward rejects bad inputs") {
    const MlpModel model = make_mlp(3, {4}, 2, Head::linear, 0.0, 1);
    REQUIRE_THROWS_AS(forward(model, std::vector<double>{1.0}, RunMode::infer, nullptr, nullptr),
                      parameter_error);
    REQUIRE_THROWS_AS(forward(model, std::vector<double>{1.0, std::nan(""), 0.0},
                              RunMode::infer, nullptr, nullptr),
                      parameter_error);
}

TEST_CASE("backward rejects a foreign cache") {
    const MlpModel model = make_mlp(3, {4}, 2, Head::linear, 0.0, 1);
    const MlpModel other = make_mlp(5, {4}, 2, Head::linear, 0.0, 1);
    ForwardCache cache;
    forward(other, std::vector<double>{1, 2, 3, 4, 5}, RunMode::train, nullptr, &cache);
    REQUIRE_THROWS_AS(backward(model, cache, std::vector<double>{1.0, 1.0}), state_error);
}

TEST_CASE("zero learning rate leaves weights untouched") {
    const MlpModel initial = make_mlp(2, {4}, 2, Head::linear, 0.0, 5);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.max_epochs = 3;
    cfg.batch_size = 2;
    const std::vector<std::vector<double>> x{{0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
    const std::vector<std::vector<double>> y{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    for (Optimizer opt : {Optimizer::sgd, Optimizer::sgd_momentum, Optimizer::adam}) {
        cfg.optimizer = opt;
        const TrainResult r = train(initial, x, y, x, y, LossKind::mse, cfg);
        REQUIRE(r.model.content_hash() == initial.content_hash());
    }
}

TEST_CASE("two Gaussian blobs separate to >= 99% train accuracy") {
    // 200 points, two classes at (-2,0) and (2,0), sigma 0.5
    const CounterRng rng(404);
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        const int cls = i % 2;
        const double cx = cls == 0 ? -2.0 : 2.0;
        x.push_back({cx + 0.5 * rng.gaussian(static_cast<std::uint64_t>(2 * i)),
                     0.5 * rng.gaussian(static_cast<std::uint64_t>(2 * i + 1))});
        y.push_back(one_hot(2, cls));
        labels.push_back(cls);
    }

    // logistic-regression oracle: plain gradient descent reaches 100%
    {
        double w0 = 0.0, w1 = 0.0, b = 0.0;
        for (int epoch = 0; epoch < 500; ++epoch) {
            double g0 = 0.0, g1 = 0.0, gb = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double z = w0 * x[i][0] + w1 * x[i][1] + b;
                const double p = 1.0 / (1.0 + std::exp(-z));
                const double d = p - static_cast<double>(labels[i]);
                g0 += d * x[i][0];
                g1 += d * x[i][1];
                gb += d;
            }
            w0 -= 0.05 * g0 / 200.0;
            w1 -= 0.05 * g1 / 200.0;
            b -= 0.05 * gb / 200.0;
        }
        int correct = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = w0 * x[i][0] + w1 * x[i][1] + b;
            if ((z > 0.0) == (labels[i] == 1)) ++correct;
        }
        REQUIRE(correct == 200);  // the set really is linearly separable
    }

    const MlpModel initial = make_mlp(2, {16}, 2, Head::softmax, 0.0, 8);
    TrainConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.batch_size = 32;
    cfg.max_epochs = 200;
    cfg.patience = 200;
    cfg.seed = 8;
    const TrainResult result = train(initial, x, y, x, y, LossKind::cross_entropy, cfg);
    int correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto probs = forward(result.model, x[i], RunMode::infer, nullptr, nullptr);
        if (argmax(probs) == labels[i]) ++correct;
    }
    REQUIRE(correct >= 198);  // >= 99%
}

TEST_CASE("training is deterministic for a fixed config and seed") {
    const CounterRng rng(11);
    std::vector<std::vector<double>> x, y;
    for (int i = 0; i < 60; ++i) {
        x.push_back(random_vector(rng, static_cast<std::uint64_t>(i), 3));
        y.push_back({x.back()[0] + x.back()[1], x.back()[2]});
    }
    const MlpModel initial = make_mlp(3, {8, 8}, 2, Head::linear, 0.2, 77);
    TrainConfig cfg;
    cfg.max_epochs = 12;
    cfg.patience = 12;
    cfg.batch_size = 16;
    cfg.seed = 99;
    const TrainResult a = train(initial, x, y, x, y, LossKind::mse, cfg);
    const TrainResult b = train(initial, x, y, x, y, LossKind::mse, cfg);
    REQUIRE(a.model.content_hash() == b.model.content_hash());
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        REQUIRE(a.history[i].train_loss == b.history[i].train_loss);
        REQUIRE(a.history[i].val_loss == b.history[i].val_loss);
    }
}

TEST_CASE("best validation loss is the running minimum of history") {
    const CounterRng rng(13);
    std::vector<std::vector<double>> x, y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(random_vector(rng, static_cast<std::uint64_t>(i), 4));
        y.push_back({x.back()[0], x.back()[1] - x.back()[3]});
    }
    TrainConfig cfg;
    cfg.max_epochs = 25;
    cfg.patience = 25;
    cfg.batch_size = 8;
    const TrainResult r = train(make_mlp(4, {8}, 2, Head::linear, 0.0, 3), x, y, x, y,
                                LossKind::mse, cfg);
    double best = std::numeric_limits<double>::infinity();
    double best_at_end = best;
    for (const auto& e : r.history) {
        const double prev = best;
        best = std::min(best, e.val_loss);
        REQUIRE(best <= prev);  // running minimum never increases
        best_at_end = best;
    }
    REQUIRE(r.best_val_loss == Catch::Approx(best_at_end));
}

TEST_CASE("divergence raises a training error carrying the last finite epoch") {
    std::vector<std::vector<double>> x{{1.0}, {2.0}, {3.0}, {4.0}};
    std::vector<std::vector<double>> y{{1e3}, {2e3}, {3e3}, {4e3}};
    TrainConfig cfg;
    cfg.learning_rate = 1e12;
    cfg.optimizer = Optimizer::sgd;
    cfg.max_epochs = 50;
    cfg.batch_size = 4;
    bool threw = false;
    try {
        train(make_mlp(1, {4}, 1, Head::linear, 0.0, 2), x, y, x, y, LossKind::mse, cfg);
    } catch (const training_error& e) {
        threw = true;
        REQUIRE(e.last_finite_epoch >= 0);
    }
    REQUIRE(threw);
}

TEST_CASE("model round-trip is bit-exact") {
    const MlpModel model = make_mlp(7, {12, 5}, 3, Head::softmax, 0.25, 321);
    const auto path = test::temp_path("model.bin");
    save_model(model, path);
    const MlpModel loaded = load_model(path);
    REQUIRE(loaded.content_hash() == model.content_hash());

    const CounterRng rng(9);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> x = random_vector(rng, static_cast<std::uint64_t>(t), 7);
        REQUIRE(forward(model, x, RunMode::infer, nullptr, nullptr) ==
                forward(loaded, x, RunMode::infer, nullptr, nullptr));
    }
    std::filesystem::remove(path);
}

TEST_CASE("model loading rejects corruption and width mismatches") {
    const MlpModel model = make_mlp(7, {4}, 3, Head::softmax, 0.0, 1);
    const auto path = test::temp_path("model_corrupt.bin");
    save_model(model, path);

    SECTION("corrupted magic") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');
        f.close();
        REQUIRE_THROWS_AS(load_model(path), format_error);
    }
    SECTION("truncation") {
        const auto size = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, size - 9);
        REQUIRE_THROWS_AS(load_model(path), format_error);
    }
    SECTION("mismatched expected input width names both widths") {
        try {
            load_model(path, 50);
            FAIL("expected format_error");
        } catch (const format_error& e) {
            const std::string what = e.what();
            REQUIRE(what.find("7") != std::string::npos);
            REQUIRE(what.find("50") != std::string::npos);
        }
    }
    std::filesystem::remove(path);
}

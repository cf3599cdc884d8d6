// Copyright 2026 The Hieracoustic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "asc/error.h"
#include "asc/network.h"
#include "asc/rng.h"
#include "doctest.h"
#include "testing_util.h"

using namespace asc;
using namespace asc::testing;

namespace {

Mat<double> random_batch(size_t rows, size_t cols, Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
  Mat<double> m(rows, cols);
  for (size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.uniform(lo, hi);
  }
  return m;
}

// Mean objective: batch-summed loss divided by the batch size, the quantity
// whose gradients backward() reports. Masks are pinned by mask_seed so the
// function is deterministic and finite differences are valid.
double mean_objective(const Network<double>& net, const Mat<double>& batch,
                      const Mat<double>& d_low, const Mat<double>* d_high,
                      double alpha, uint64_t mask_seed) {
  Rng rng(mask_seed);
  ForwardCache<double> cache;
  const ForwardOutput<double> out = forward_train(net, batch, rng, &cache);
  const double n = static_cast<double>(batch.rows());
  if (d_high != nullptr) {
    return multi_level_loss(out.low, out.high, d_low, *d_high, alpha) / n;
  }
  return cross_entropy(out.low, d_low) / n;
}

struct ParamRef {
  double* value;
  const double* grad;
};

std::vector<ParamRef> collect_params(Network<double>& net,
                                     const Gradients<double>& grads) {
  std::vector<ParamRef> refs;
  auto add_layer = [&](Layer<double>& layer, const LayerGrads<double>& g) {
    for (size_t i = 0; i < layer.weights.size(); ++i) {
      refs.push_back({&layer.weights.data()[i], &g.d_weights.data()[i]});
    }
    for (size_t o = 0; o < layer.bias.size(); ++o) {
      refs.push_back({&layer.bias[o], &g.d_bias[o]});
    }
  };
  for (size_t l = 0; l < net.hidden.size(); ++l) {
    add_layer(net.hidden[l], grads.hidden[l]);
  }
  add_layer(net.low_head, grads.low_head);
  if (net.high_head) add_layer(*net.high_head, *grads.high_head);
  return refs;
}

// Central finite differences against backward() over every parameter.
double max_gradient_error(Network<double>& net, const Mat<double>& batch,
                          const Mat<double>& d_low, const Mat<double>* d_high,
                          double alpha, uint64_t mask_seed) {
  Rng rng(mask_seed);
  ForwardCache<double> cache;
  forward_train(net, batch, rng, &cache);
  const Gradients<double> grads =
      backward(net, cache, d_low, d_high, alpha);

  const double h = 1e-5;
  double worst = 0.0;
  for (const ParamRef& ref : collect_params(net, grads)) {
    const double saved = *ref.value;
    *ref.value = saved + h;
    const double up = mean_objective(net, batch, d_low, d_high, alpha,
                                     mask_seed);
    *ref.value = saved - h;
    const double down = mean_objective(net, batch, d_low, d_high, alpha,
                                       mask_seed);
    *ref.value = saved;
    const double fd = (up - down) / (2.0 * h);
    const double err = std::abs(fd - *ref.grad) /
                       std::max({1e-3, std::abs(fd), std::abs(*ref.grad)});
    worst = std::max(worst, err);
  }
  return worst;
}

Mat<float> bytes_as_f32(std::initializer_list<float> values, size_t rows,
                        size_t cols) {
  Mat<float> m(rows, cols);
  size_t i = 0;
  for (float v : values) m.data()[i++] = v;
  return m;
}

}  // namespace

TEST_CASE("relu and its derivative") {
  const std::vector<double> out = relu(std::vector<double>{-1.0, 0.0, 2.5});
  CHECK_EQ(out[0], 0.0);
  CHECK_EQ(out[1], 0.0);
  CHECK_EQ(out[2], 2.5);
  CHECK_EQ(relu_derivative(-3.0), 0.0);
  CHECK_EQ(relu_derivative(0.0), 0.0);  // dead at exactly zero
  CHECK_EQ(relu_derivative(2.0), 1.0);
}

TEST_CASE("softmax closed forms") {
  SUBCASE("equal logits give the uniform distribution") {
    const std::vector<double> p = softmax(std::vector<double>{0.0, 0.0});
    CHECK_EQ(p[0], 0.5);
    CHECK_EQ(p[1], 0.5);
  }
  SUBCASE("log-odds recoverable") {
    const std::vector<double> p =
        softmax(std::vector<double>{std::log(2.0), 0.0});
    CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("shift invariance") {
    const std::vector<double> base{0.3, -1.2, 2.7, 0.0};
    std::vector<double> shifted = base;
    for (double& v : shifted) v += 123.456;
    const std::vector<double> p = softmax(base);
    const std::vector<double> q = softmax(shifted);
    for (size_t i = 0; i < p.size(); ++i) {
      CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-12));
    }
  }
  SUBCASE("extreme logits do not overflow") {
    const std::vector<double> p =
        softmax(std::vector<double>{800.0, 0.0, -800.0});
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isfinite(p[1]));
    CHECK(std::isfinite(p[2]));
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("loss weights validation") {
  LossWeights w;
  CHECK_NOTHROW(w.validate());
  w.alpha = 0.0;
  CHECK_NOTHROW(w.validate());
  w.alpha = 1.0;
  CHECK_NOTHROW(w.validate());
  w.alpha = -0.1;
  CHECK_THROWS_AS(w.validate(), ConfigError);
  w.alpha = 1.1;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("make_network draws layers bottom-up with fan-based bounds") {
  const auto net = make_network<double>(2, {}, 3, std::nullopt, 0.0, 0.0, 7);
  REQUIRE_EQ(net.hidden.size(), 0);
  REQUIRE_EQ(net.low_head.out_dim(), 3);
  REQUIRE_EQ(net.low_head.in_dim(), 2);
  CHECK_FALSE(net.has_high_head());
  CHECK_EQ(net.low_head.activation, Activation::kSoftmax);
  for (double b : net.low_head.bias) CHECK_EQ(b, 0.0);

  // Replicate the draw stream: six uniforms at the head's fan bound.
  Rng rng(7);
  const double bound = std::sqrt(6.0 / 5.0);
  for (size_t i = 0; i < 6; ++i) {
    CHECK_EQ(net.low_head.weights.data()[i], rng.uniform(-bound, bound));
  }
}

TEST_CASE("make_network draw order is hidden, low head, high head") {
  const auto net =
      make_network<double>(2, {2}, 3, std::optional<size_t>(2), 0.1, 0.3, 99);
  Rng rng(99);
  const double b_hidden = std::sqrt(6.0 / 4.0);
  for (size_t i = 0; i < 4; ++i) {
    CHECK_EQ(net.hidden[0].weights.data()[i], rng.uniform(-b_hidden, b_hidden));
  }
  const double b_low = std::sqrt(6.0 / 5.0);
  for (size_t i = 0; i < 6; ++i) {
    CHECK_EQ(net.low_head.weights.data()[i], rng.uniform(-b_low, b_low));
  }
  const double b_high = std::sqrt(6.0 / 4.0);
  for (size_t i = 0; i < 4; ++i) {
    CHECK_EQ(net.high_head->weights.data()[i],
             rng.uniform(-b_high, b_high));
  }
  CHECK_EQ(net.hidden[0].activation, Activation::kRelu);
  CHECK_EQ(net.high_head->activation, Activation::kSoftmax);
  CHECK_EQ(net.dropout_input, 0.1);
  CHECK_EQ(net.dropout_hidden, 0.3);
}

TEST_CASE("initialization statistics for a large layer") {
  const auto net =
      make_network<double>(300, {}, 300, std::nullopt, 0.0, 0.0, 5);
  const double bound = std::sqrt(6.0 / 600.0);  // 0.1
  double max_abs = 0.0, sum = 0.0;
  size_t positive = 0;
  const size_t n = net.low_head.weights.size();
  for (size_t i = 0; i < n; ++i) {
    const double w = net.low_head.weights.data()[i];
    max_abs = std::max(max_abs, std::abs(w));
    sum += w;
    if (w > 0.0) ++positive;
  }
  CHECK(max_abs <= bound);
  CHECK(max_abs > 0.95 * bound);
  CHECK(std::abs(sum / static_cast<double>(n)) < 1e-3);
  const double pos_fraction = static_cast<double>(positive) / n;
  CHECK(pos_fraction > 0.48);
  CHECK(pos_fraction < 0.52);
}

TEST_CASE("make_network is deterministic in the seed") {
  const auto a = make_network<float>(6, {5, 4}, 3, std::optional<size_t>(2),
                                     0.1f, 0.3f, 11);
  const auto b = make_network<float>(6, {5, 4}, 3, std::optional<size_t>(2),
                                     0.1f, 0.3f, 11);
  const auto c = make_network<float>(6, {5, 4}, 3, std::optional<size_t>(2),
                                     0.1f, 0.3f, 12);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("zero weights give uniform posteriors") {
  auto net = make_network<double>(4, {}, 5, std::nullopt, 0.0, 0.0, 1);
  for (size_t i = 0; i < net.low_head.weights.size(); ++i) {
    net.low_head.weights.data()[i] = 0.0;
  }
  Rng rng(3);
  const Mat<double> batch = random_batch(3, 4, rng);
  const ForwardOutput<double> out = forward_infer(net, batch);
  for (size_t i = 0; i < out.low.size(); ++i) {
    CHECK_EQ(out.low.data()[i], 0.2);
  }
}

TEST_CASE("with dropout off, training and inference forwards agree exactly") {
  const auto net = make_network<float>(6, {5, 4}, 3, std::optional<size_t>(2),
                                       0.0f, 0.0f, 3);
  Rng data_rng(8);
  Mat<float> batch(7, 6);
  for (size_t i = 0; i < batch.size(); ++i) {
    batch.data()[i] = static_cast<float>(data_rng.uniform(-1.0, 1.0));
  }
  Rng mask_rng(123);
  ForwardCache<float> cache;
  const ForwardOutput<float> train = forward_train(net, batch, mask_rng,
                                                   &cache);
  const ForwardOutput<float> infer = forward_infer(net, batch);
  CHECK(train.low == infer.low);
  CHECK(train.high == infer.high);
}

TEST_CASE("inference scales the accumulated dot product, not the weights") {
  Network<float> net;
  net.input_dim = 2;
  net.low_head.weights = bytes_as_f32({1.0f, 2.0f, 3.0f, 4.0f}, 2, 2);
  net.low_head.bias = {0.5f, -0.25f};
  net.low_head.activation = Activation::kSoftmax;
  net.dropout_input = 0.5f;
  net.dropout_hidden = 0.25f;  // unused: no hidden layer
  net.validate();

  Mat<float> batch(1, 2);
  batch(0, 0) = 1.0f;
  batch(0, 1) = -2.0f;
  const ForwardOutput<float> out = forward_infer(net, batch);

  // keep_in = 0.5 applies to the head because it reads the input directly.
  const float pre0 = 0.5f * (1.0f * 1.0f + 2.0f * -2.0f) + 0.5f;
  const float pre1 = 0.5f * (3.0f * 1.0f + 4.0f * -2.0f) + -0.25f;
  const std::vector<float> expected = softmax(std::vector<float>{pre0, pre1});
  CHECK_EQ(out.low(0, 0), expected[0]);
  CHECK_EQ(out.low(0, 1), expected[1]);
}

TEST_CASE("train-mode dropout matches the inference expectation") {
  // Positive regime: positive inputs, positive first-layer weights and a
  // positive bias keep ReLU strictly linear, so the mask expectation passes
  // through the hidden layer exactly and only the softmax curvature is left.
  Rng setup(21);
  Network<double> net;
  net.input_dim = 4;
  Layer<double> hidden;
  hidden.weights.resize(6, 4);
  for (size_t i = 0; i < hidden.weights.size(); ++i) {
    hidden.weights.data()[i] = setup.uniform(0.2, 0.8);
  }
  hidden.bias.assign(6, 0.1);
  hidden.activation = Activation::kRelu;
  net.hidden.push_back(hidden);
  Layer<double> head;
  head.weights.resize(3, 6);
  for (size_t i = 0; i < head.weights.size(); ++i) {
    head.weights.data()[i] = setup.uniform(-0.15, 0.15);
  }
  head.bias.assign(3, 0.0);
  head.activation = Activation::kSoftmax;
  net.low_head = head;
  net.dropout_input = 0.3;
  net.dropout_hidden = 0.5;
  net.validate();

  Mat<double> x(1, 4);
  for (size_t d = 0; d < 4; ++d) x(0, d) = setup.uniform(0.5, 1.5);

  const ForwardOutput<double> infer = forward_infer(net, x);

  Rng mask_rng(2024);
  std::vector<double> mean(3, 0.0);
  const int draws = 20000;
  for (int t = 0; t < draws; ++t) {
    ForwardCache<double> cache;
    const ForwardOutput<double> out = forward_train(net, x, mask_rng, &cache);
    for (size_t j = 0; j < 3; ++j) mean[j] += out.low(0, j);
  }
  for (size_t j = 0; j < 3; ++j) {
    mean[j] /= draws;
    CHECK(std::abs(mean[j] - infer.low(0, j)) < 0.05);
  }
}

TEST_CASE("cross entropy closed forms") {
  SUBCASE("uniform posteriors over 15 classes") {
    Mat<double> p(7, 15, 1.0 / 15.0);
    Mat<double> d(7, 15, 0.0);
    for (size_t n = 0; n < 7; ++n) d(n, n % 15) = 1.0;
    CHECK(cross_entropy(p, d) ==
          doctest::Approx(7.0 * std::log(15.0)).epsilon(1e-12));
  }
  SUBCASE("probability floor engages below 1e-12") {
    Mat<double> p(1, 2);
    p(0, 0) = 1e-30;
    p(0, 1) = 1.0 - 1e-30;
    Mat<double> d(1, 2, 0.0);
    d(0, 0) = 1.0;
    CHECK(cross_entropy(p, d) ==
          doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
    p(0, 0) = 0.0;
    CHECK(cross_entropy(p, d) ==
          doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
  }
  SUBCASE("zero-target entries are skipped even at p == 0") {
    Mat<double> p(1, 3, 0.0);
    p(0, 2) = 1.0;
    Mat<double> d(1, 3, 0.0);
    d(0, 2) = 1.0;
    CHECK_EQ(cross_entropy(p, d), 0.0);  // -1 * log(1)
  }
  SUBCASE("soft targets weight the log terms") {
    Mat<double> p(1, 3);
    p(0, 0) = 0.2;
    p(0, 1) = 0.3;
    p(0, 2) = 0.5;
    Mat<double> d(1, 3);
    d(0, 0) = 0.5;
    d(0, 1) = 0.5;
    d(0, 2) = 0.0;
    const double expected = -0.5 * std::log(0.2) - 0.5 * std::log(0.3);
    CHECK(cross_entropy(p, d) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("random batches match an independent loop") {
    Rng rng(17);
    Mat<double> p(20, 6);
    Mat<double> d(20, 6, 0.0);
    for (size_t n = 0; n < 20; ++n) {
      double sum = 0.0;
      for (size_t j = 0; j < 6; ++j) {
        p(n, j) = rng.uniform(0.01, 1.0);
        sum += p(n, j);
      }
      for (size_t j = 0; j < 6; ++j) p(n, j) /= sum;
      d(n, rng.below(6)) = 1.0;
    }
    long double oracle = 0.0;
    for (size_t n = 0; n < 20; ++n) {
      for (size_t j = 0; j < 6; ++j) {
        if (d(n, j) != 0.0) oracle -= d(n, j) * std::log(p(n, j));
      }
    }
    CHECK(cross_entropy(p, d) ==
          doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
  }
  SUBCASE("shape mismatch is an internal error") {
    Mat<double> p(2, 3, 0.5);
    Mat<double> d(2, 4, 0.0);
    CHECK_THROWS_AS(cross_entropy(p, d), InternalError);
  }
}

TEST_CASE("multi-level loss identities") {
  Rng rng(31);
  Mat<double> p_low(9, 15), p_high(9, 3);
  Mat<double> d_low(9, 15, 0.0), d_high(9, 3, 0.0);
  for (size_t n = 0; n < 9; ++n) {
    double s = 0.0;
    for (size_t j = 0; j < 15; ++j) {
      p_low(n, j) = rng.uniform(0.01, 1.0);
      s += p_low(n, j);
    }
    for (size_t j = 0; j < 15; ++j) p_low(n, j) /= s;
    s = 0.0;
    for (size_t k = 0; k < 3; ++k) {
      p_high(n, k) = rng.uniform(0.01, 1.0);
      s += p_high(n, k);
    }
    for (size_t k = 0; k < 3; ++k) p_high(n, k) /= s;
    d_low(n, rng.below(15)) = 1.0;
    d_high(n, rng.below(3)) = 1.0;
  }

  const double ce_low = cross_entropy(p_low, d_low);
  const double ce_high = cross_entropy(p_high, d_high);
  const double l1 = multi_level_loss(p_low, p_high, d_low, d_high, 1.0);
  const double l0 = multi_level_loss(p_low, p_high, d_low, d_high, 0.0);
  CHECK_EQ(l1, ce_low);
  CHECK_EQ(l0, ce_high);

  // The objective is computed literally as the alpha blend, so the linear
  // interpolation identity holds bit-for-bit, not merely approximately.
  for (double alpha : {0.1, 0.3, 0.5, 0.6, 0.9}) {
    const double blended =
        multi_level_loss(p_low, p_high, d_low, d_high, alpha);
    CHECK_EQ(blended, alpha * l1 + (1.0 - alpha) * l0);
  }
}

TEST_CASE("multi-level loss hand value") {
  Mat<double> p_low(1, 15, 1.0 / 15.0);
  Mat<double> p_high(1, 3, 1.0 / 3.0);
  Mat<double> d_low(1, 15, 0.0);
  Mat<double> d_high(1, 3, 0.0);
  d_low(0, 4) = 1.0;
  d_high(0, 1) = 1.0;
  const double loss = multi_level_loss(p_low, p_high, d_low, d_high, 0.6);
  CHECK(loss == doctest::Approx(0.6 * std::log(15.0) + 0.4 * std::log(3.0))
                    .epsilon(1e-12));
  CHECK(loss == doctest::Approx(2.0642747).epsilon(1e-6));
}

TEST_CASE("multi-level loss requires high posteriors") {
  Mat<double> p_low(1, 2, 0.5), d_low(1, 2, 0.0);
  Mat<double> empty, d_high(1, 2, 0.0);
  d_low(0, 0) = 1.0;
  CHECK_THROWS_AS(multi_level_loss(p_low, empty, d_low, d_high, 0.5),
                  InternalError);
}

TEST_CASE("backward matches central finite differences") {
  Rng rng(55);

  SUBCASE("dual head over alpha grid") {
    auto net = make_network<double>(10, {8, 6}, 5, std::optional<size_t>(3),
                                    0.0, 0.0, 13);
    const Mat<double> batch = random_batch(4, 10, rng);
    std::vector<int> low_labels{0, 4, 2, 1};
    std::vector<int> high_labels{2, 0, 1, 2};
    const Mat<double> d_low = one_hot_rows<double>(low_labels, 5);
    const Mat<double> d_high = one_hot_rows<double>(high_labels, 3);
    for (double alpha : {0.0, 0.3, 1.0}) {
      CAPTURE(alpha);
      CHECK(max_gradient_error(net, batch, d_low, &d_high, alpha, 9) < 1e-6);
    }
  }

  SUBCASE("single head") {
    auto net = make_network<double>(7, {6}, 4, std::nullopt, 0.0, 0.0, 29);
    const Mat<double> batch = random_batch(5, 7, rng);
    std::vector<int> labels{3, 0, 2, 1, 3};
    const Mat<double> d_low = one_hot_rows<double>(labels, 4);
    CHECK(max_gradient_error(net, batch, d_low, nullptr, 1.0, 9) < 1e-6);
  }

  SUBCASE("single head with no hidden layers") {
    auto net = make_network<double>(6, {}, 3, std::nullopt, 0.0, 0.0, 41);
    const Mat<double> batch = random_batch(4, 6, rng);
    std::vector<int> labels{0, 2, 1, 0};
    const Mat<double> d_low = one_hot_rows<double>(labels, 3);
    CHECK(max_gradient_error(net, batch, d_low, nullptr, 1.0, 9) < 1e-6);
  }

  SUBCASE("dropout masks active but pinned") {
    auto net = make_network<double>(10, {8, 6}, 5, std::optional<size_t>(3),
                                    0.4, 0.5, 13);
    // Fresh networks have zero biases, so a unit whose inputs are all
    // dropped sits exactly on the ReLU kink where finite differences are
    // invalid. Nonzero biases keep every kept unit away from the kink.
    Rng brng(7);
    for (auto& layer : net.hidden) {
      for (double& b : layer.bias) b = brng.uniform(0.3, 0.9);
    }
    const Mat<double> batch = random_batch(4, 10, rng);
    std::vector<int> low_labels{1, 2, 0, 4};
    std::vector<int> high_labels{0, 2, 2, 1};
    const Mat<double> d_low = one_hot_rows<double>(low_labels, 5);
    const Mat<double> d_high = one_hot_rows<double>(high_labels, 3);
    CHECK(max_gradient_error(net, batch, d_low, &d_high, 0.6, 42) < 1e-6);
  }
}

TEST_CASE("head gradient closed form for one sample") {
  auto net = make_network<double>(3, {}, 4, std::nullopt, 0.0, 0.0, 61);
  Mat<double> x(1, 3);
  x(0, 0) = 1.0;
  x(0, 1) = 2.0;
  x(0, 2) = 3.0;
  std::vector<int> labels{2};
  const Mat<double> d = one_hot_rows<double>(labels, 4);

  Rng rng(1);
  ForwardCache<double> cache;
  const ForwardOutput<double> out = forward_train(net, x, rng, &cache);
  const Gradients<double> grads = backward<double>(net, cache, d, nullptr, 1.0);

  // dL/dW = (p - d) x^T and dL/db = p - d for a softmax head with N = 1.
  for (size_t j = 0; j < 4; ++j) {
    const double delta = out.low(0, j) - d(0, j);
    CHECK(grads.low_head.d_bias[j] == doctest::Approx(delta).epsilon(1e-12));
    for (size_t i = 0; i < 3; ++i) {
      CHECK(grads.low_head.d_weights(j, i) ==
            doctest::Approx(delta * x(0, i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("backward invariants") {
  auto dual = make_network<double>(4, {3}, 3, std::optional<size_t>(2), 0.0,
                                   0.0, 5);
  auto single = make_network<double>(4, {3}, 3, std::nullopt, 0.0, 0.0, 5);
  Rng rng(2);
  const Mat<double> batch = random_batch(2, 4, rng);
  std::vector<int> low_labels{0, 2};
  std::vector<int> high_labels{1, 0};
  const Mat<double> d_low = one_hot_rows<double>(low_labels, 3);
  const Mat<double> d_high = one_hot_rows<double>(high_labels, 2);

  ForwardCache<double> cache;
  Rng mask(1);
  forward_train(dual, batch, mask, &cache);
  CHECK_THROWS_AS(backward<double>(dual, cache, d_low, nullptr, 0.6), InternalError);

  ForwardCache<double> cache_single;
  Rng mask2(1);
  forward_train(single, batch, mask2, &cache_single);
  CHECK_THROWS_AS(backward(single, cache_single, d_low, &d_high, 0.6),
                  InternalError);

  ForwardCache<double> empty_cache;
  CHECK_THROWS_AS(backward<double>(single, empty_cache, d_low, nullptr, 1.0),
                  InternalError);
}

TEST_CASE("classical momentum unrolls as v = m v - lr g") {
  Network<float> net;
  net.input_dim = 2;
  net.low_head.weights = bytes_as_f32({0.5f, -0.5f, 1.0f, 0.25f}, 2, 2);
  net.low_head.bias = {0.1f, -0.1f};
  net.low_head.activation = Activation::kSoftmax;
  net.dropout_input = 0.0f;
  net.dropout_hidden = 0.0f;
  net.validate();
  const Network<float> start = net;

  Gradients<float> g1, g2;
  g1.low_head.d_weights = bytes_as_f32({0.3f, -0.2f, 0.1f, 0.4f}, 2, 2);
  g1.low_head.d_bias = {0.05f, -0.15f};
  g2.low_head.d_weights = bytes_as_f32({-0.1f, 0.2f, 0.3f, -0.4f}, 2, 2);
  g2.low_head.d_bias = {-0.25f, 0.35f};

  const float lr = 0.005f;
  const float m = 0.9f;
  auto opt = make_optimizer(net, lr, m);
  sgd_momentum_step(net, g1, opt);
  sgd_momentum_step(net, g2, opt);

  for (size_t i = 0; i < 4; ++i) {
    const float w0 = start.low_head.weights.data()[i];
    float v = -lr * g1.low_head.d_weights.data()[i];
    float w = w0 + v;
    v = m * v - lr * g2.low_head.d_weights.data()[i];
    w = w + v;
    CHECK_EQ(net.low_head.weights.data()[i], w);
    CHECK_EQ(opt.velocity.low_head.d_weights.data()[i], v);
  }
  for (size_t o = 0; o < 2; ++o) {
    const float b0 = start.low_head.bias[o];
    float v = -lr * g1.low_head.d_bias[o];
    float b = b0 + v;
    v = m * v - lr * g2.low_head.d_bias[o];
    b = b + v;
    CHECK_EQ(net.low_head.bias[o], b);
  }
}

TEST_CASE("one_hot_rows") {
  const Mat<float> rows = one_hot_rows<float>({2, 0, 1}, 3);
  REQUIRE_EQ(rows.rows(), 3);
  REQUIRE_EQ(rows.cols(), 3);
  for (size_t n = 0; n < 3; ++n) {
    for (size_t j = 0; j < 3; ++j) {
      const float expected = (n == 0 && j == 2) || (n == 1 && j == 0) ||
                                     (n == 2 && j == 1)
                                 ? 1.0f
                                 : 0.0f;
      CHECK_EQ(rows(n, j), expected);
    }
  }
  CHECK_THROWS_AS(one_hot_rows<float>({3}, 3), InternalError);
  CHECK_THROWS_AS(one_hot_rows<float>({-1}, 3), InternalError);
}

TEST_CASE("network validation rejects inconsistent structure") {
  auto good = make_network<float>(4, {3}, 2, std::nullopt, 0.1f, 0.3f, 1);
  CHECK_NOTHROW(good.validate());

  SUBCASE("layers must chain") {
    auto net = good;
    net.low_head.weights.resize(2, 7, 0.0f);
    CHECK_THROWS_WITH_AS(net.validate(), doctest::Contains("does not chain"),
                         DataError);
  }
  SUBCASE("bias length must match") {
    auto net = good;
    net.low_head.bias.push_back(0.0f);
    CHECK_THROWS_WITH_AS(net.validate(),
                         doctest::Contains("bias/weight shape mismatch"),
                         DataError);
  }
  SUBCASE("hidden layers are relu") {
    auto net = good;
    net.hidden[0].activation = Activation::kSoftmax;
    CHECK_THROWS_WITH_AS(net.validate(),
                         doctest::Contains("wrong activation"), DataError);
  }
  SUBCASE("heads are softmax") {
    auto net = good;
    net.low_head.activation = Activation::kNone;
    CHECK_THROWS_AS(net.validate(), DataError);
  }
  SUBCASE("dropout rates live in [0, 1)") {
    auto net = good;
    net.dropout_input = 1.0f;
    CHECK_THROWS_WITH_AS(net.validate(),
                         doctest::Contains("dropout rates must lie in [0, 1)"),
                         DataError);
    net.dropout_input = 0.1f;
    net.dropout_hidden = -0.25f;
    CHECK_THROWS_AS(net.validate(), DataError);
  }
}

TEST_CASE("model files round-trip bit-exactly") {
  TempDir tmp("network_io");

  SUBCASE("dual head with hidden layers") {
    const auto net = make_network<float>(5, {4, 3}, 6, std::optional<size_t>(2),
                                         0.1f, 0.3f, 11);
    const std::string path = tmp.file("dual.model");
    save_model(net, path);
    const Network<float> loaded = load_model(path);
    CHECK(loaded == net);
  }
  SUBCASE("single head, no hidden layers") {
    const auto net =
        make_network<float>(3, {}, 4, std::nullopt, 0.0f, 0.0f, 1);
    const std::string path = tmp.file("single.model");
    save_model(net, path);
    const Network<float> loaded = load_model(path);
    CHECK(loaded == net);
    CHECK_FALSE(loaded.has_high_head());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model(tmp.file("absent.model")), DataError);
  }
}

TEST_CASE("model loader rejects corrupt files") {
  TempDir tmp("network_io_bad");
  // Reference layout, fixed offsets: 16-byte header; low head record at 16
  // (in u32, out u32, act u8, 6 weights, 3 biases = 45 bytes); has_high at
  // 61; dropout rates in the final 8 bytes.
  const auto net = make_network<float>(2, {}, 3, std::nullopt, 0.1f, 0.3f, 9);
  const std::string ref = tmp.file("ref.model");
  save_model(net, ref);
  const std::string base = read_bytes(ref);
  REQUIRE_EQ(base.size(), 70);

  auto corrupted = [&](std::string bytes, const std::string& name) {
    const std::string path = tmp.file(name);
    write_bytes(path, bytes);
    return path;
  };

  SUBCASE("bad magic") {
    std::string bytes = base;
    bytes[0] = 'X';
    CHECK_THROWS_WITH_AS(load_model(corrupted(bytes, "magic.model")),
                         doctest::Contains("bad magic"), DataError);
  }
  SUBCASE("unsupported version") {
    std::string bytes = base;
    bytes[4] = 2;
    CHECK_THROWS_WITH_AS(load_model(corrupted(bytes, "version.model")),
                         doctest::Contains("unsupported model version"),
                         DataError);
  }
  SUBCASE("unknown activation code") {
    std::string bytes = base;
    bytes[24] = 7;
    CHECK_THROWS_WITH_AS(load_model(corrupted(bytes, "act.model")),
                         doctest::Contains("unknown activation code"),
                         DataError);
  }
  SUBCASE("zero layer dimension") {
    std::string bytes = base;
    bytes[20] = 0;
    bytes[21] = 0;
    bytes[22] = 0;
    bytes[23] = 0;
    CHECK_THROWS_WITH_AS(load_model(corrupted(bytes, "dim.model")),
                         doctest::Contains("zero dimension"), DataError);
  }
  SUBCASE("corrupt high-head flag") {
    std::string bytes = base;
    bytes[61] = 2;
    CHECK_THROWS_WITH_AS(load_model(corrupted(bytes, "flag.model")),
                         doctest::Contains("corrupt high-head flag"),
                         DataError);
  }
  SUBCASE("non-finite dropout rate") {
    std::string bytes = base;
    const uint32_t nan_bits = 0x7FC00000u;
    for (int i = 0; i < 4; ++i) {
      bytes[66 + i] = static_cast<char>((nan_bits >> (8 * i)) & 0xFF);
    }
    CHECK_THROWS_WITH_AS(load_model(corrupted(bytes, "nan.model")),
                         doctest::Contains("non-finite dropout"), DataError);
  }
  SUBCASE("truncated file") {
    std::string bytes = base.substr(0, base.size() - 1);
    CHECK_THROWS_WITH_AS(load_model(corrupted(bytes, "short.model")),
                         doctest::Contains("truncated"), DataError);
  }
}

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

#ifndef ASC_NETWORK_H_
#define ASC_NETWORK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asc/error.h"
#include "asc/mat.h"
#include "asc/rng.h"

// Feed-forward classification network with ReLU hidden layers, a primary
// softmax head, and an optional auxiliary softmax head for the coarse scene
// classes. Everything is templated on the scalar type: production code runs
// in float, gradient-check tests in double.

namespace asc {

/// Probabilities are clamped at this floor inside the log of the
/// cross-entropy, so a zero posterior cannot produce -inf.
constexpr double kProbFloor = 1e-12;

enum class Activation : uint8_t { kNone = 0, kRelu = 1, kSoftmax = 2 };

/// Mixing weight of the dual-head objective: alpha on the primary (low-level)
/// term, 1 - alpha on the auxiliary (high-level) term.
struct LossWeights {
  double alpha = 0.6;

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0) {
      throw ConfigError("alpha must lie in [0, 1], got " +
                        std::to_string(alpha));
    }
  }
};

template <typename T>
struct Layer {
  Mat<T> weights;       // out x in
  std::vector<T> bias;  // out
  Activation activation = Activation::kNone;

  size_t in_dim() const { return weights.cols(); }
  size_t out_dim() const { return weights.rows(); }

  friend bool operator==(const Layer&, const Layer&) = default;
};

template <typename T>
struct Network {
  size_t input_dim = 0;
  std::vector<Layer<T>> hidden;       // ReLU layers
  Layer<T> low_head;                  // softmax over scene classes
  std::optional<Layer<T>> high_head;  // softmax over coarse classes
  T dropout_input = T(0.1);
  T dropout_hidden = T(0.3);

  size_t num_low() const { return low_head.out_dim(); }
  bool has_high_head() const { return high_head.has_value(); }
  size_t num_high() const { return high_head ? high_head->out_dim() : 0; }

  /// Dimension feeding the heads (top hidden layer, or the input itself).
  size_t top_dim() const {
    return hidden.empty() ? input_dim : hidden.back().out_dim();
  }

  /// Throws DataError when layer dimensions do not chain or dropout rates
  /// are out of range. Used on freshly deserialized models.
  void validate() const;

  friend bool operator==(const Network&, const Network&) = default;
};

// ---------------------------------------------------------------------------
// Activations

/// max(0, y) componentwise.
template <typename T>
void relu_inplace(std::span<T> v) {
  for (T& x : v) x = std::max(x, T(0));
}

template <typename T>
std::vector<T> relu(std::vector<T> v) {
  relu_inplace(std::span<T>(v));
  return v;
}

/// Subgradient convention: 1 for pre > 0, 0 otherwise (including pre == 0).
template <typename T>
T relu_derivative(T pre) {
  return pre > T(0) ? T(1) : T(0);
}

/// Max-subtracted softmax; rows of extreme logits saturate without overflow.
template <typename T>
void softmax_inplace(std::span<T> logits) {
  ASC_CHECK(!logits.empty(), "softmax of an empty vector");
  const T max = *std::max_element(logits.begin(), logits.end());
  T sum = T(0);
  for (T& z : logits) {
    z = std::exp(z - max);
    sum += z;
  }
  for (T& z : logits) z /= sum;
}

template <typename T>
std::vector<T> softmax(std::vector<T> logits) {
  softmax_inplace(std::span<T>(logits));
  return logits;
}

// ---------------------------------------------------------------------------
// Forward pass

template <typename T>
struct ForwardOutput {
  Mat<T> low;   // N x J posteriors
  Mat<T> high;  // N x K posteriors; empty when the network has one head
};

/// Activations and dropout masks retained by a training-mode forward pass;
/// backward() requires them.
template <typename T>
struct ForwardCache {
  Mat<T> input;              // N x in, after the input dropout mask
  std::vector<Mat<T>> pre;   // per hidden layer: N x h pre-activations
  std::vector<Mat<T>> act;   // per hidden layer: N x h post ReLU and mask
  std::vector<Mat<T>> mask;  // per hidden layer: 0/1 keep masks
  ForwardOutput<T> out;
};

namespace detail {

// out = scale * (W x) + b for every row of the batch. The scale multiplies
// the accumulated dot product, not the stored weights, so the inference
// identity pre = (1-rho)*(W*x)+b holds bit-for-bit.
template <typename T>
void affine_batch(const Layer<T>& layer, const Mat<T>& in, T scale,
                  Mat<T>& out) {
  const size_t n_rows = in.rows();
  const size_t n_out = layer.out_dim();
  const size_t n_in = layer.in_dim();
  ASC_CHECK(in.cols() == n_in, "batch width does not match layer input");
  out.resize(n_rows, n_out);
  for (size_t n = 0; n < n_rows; ++n) {
    auto x = in.row(n);
    auto y = out.row(n);
    for (size_t o = 0; o < n_out; ++o) {
      auto w = layer.weights.row(o);
      T acc = T(0);
      for (size_t k = 0; k < n_in; ++k) acc += w[k] * x[k];
      y[o] = scale * acc + layer.bias[o];
    }
  }
}

template <typename T>
void softmax_rows(Mat<T>& m) {
  for (size_t n = 0; n < m.rows(); ++n) softmax_inplace(m.row(n));
}

}  // namespace detail

/// Inference-mode forward pass: no dropout masks; every weight matrix whose
/// inputs were dropped during training is discounted by the corresponding
/// keep probability (1 - dropout rate of the layer below).
template <typename T>
ForwardOutput<T> forward_infer(const Network<T>& net, const Mat<T>& batch) {
  ASC_CHECK(batch.cols() == net.input_dim,
            "batch dimension does not match network input");
  const T keep_in = T(1) - net.dropout_input;
  const T keep_hidden = T(1) - net.dropout_hidden;

  Mat<T> a = batch;
  Mat<T> next;
  for (size_t l = 0; l < net.hidden.size(); ++l) {
    const T scale = l == 0 ? keep_in : keep_hidden;
    detail::affine_batch(net.hidden[l], a, scale, next);
    relu_inplace(std::span<T>(next.data(), next.size()));
    std::swap(a, next);
  }
  const T head_scale = net.hidden.empty() ? keep_in : keep_hidden;

  ForwardOutput<T> out;
  detail::affine_batch(net.low_head, a, head_scale, out.low);
  detail::softmax_rows(out.low);
  if (net.high_head) {
    detail::affine_batch(*net.high_head, a, head_scale, out.high);
    detail::softmax_rows(out.high);
  }
  return out;
}

/// Training-mode forward pass. Bernoulli keep masks (probability 1 - rho) are
/// drawn from `rng` sample by sample: first the input units, then each hidden
/// layer in order, the same stream regardless of how many heads exist.
/// Weights are used as stored. Fills `cache` for backward().
template <typename T>
ForwardOutput<T> forward_train(const Network<T>& net, const Mat<T>& batch,
                               Rng& rng, ForwardCache<T>* cache) {
  ASC_CHECK(batch.cols() == net.input_dim,
            "batch dimension does not match network input");
  const size_t n_rows = batch.rows();
  const size_t n_hidden = net.hidden.size();

  Mat<T> input_mask(n_rows, net.input_dim);
  std::vector<Mat<T>> hidden_mask(n_hidden);
  for (size_t l = 0; l < n_hidden; ++l) {
    hidden_mask[l].resize(n_rows, net.hidden[l].out_dim());
  }
  for (size_t n = 0; n < n_rows; ++n) {
    for (size_t d = 0; d < net.input_dim; ++d) {
      input_mask(n, d) =
          rng.uniform() >= static_cast<double>(net.dropout_input) ? T(1) : T(0);
    }
    for (size_t l = 0; l < n_hidden; ++l) {
      auto m = hidden_mask[l].row(n);
      for (size_t u = 0; u < m.size(); ++u) {
        m[u] = rng.uniform() >= static_cast<double>(net.dropout_hidden)
                   ? T(1)
                   : T(0);
      }
    }
  }

  ForwardCache<T> local;
  ForwardCache<T>& c = cache ? *cache : local;
  c.pre.assign(n_hidden, Mat<T>());
  c.act.assign(n_hidden, Mat<T>());
  c.mask = std::move(hidden_mask);

  c.input = batch;
  for (size_t i = 0; i < c.input.size(); ++i) {
    c.input.data()[i] *= input_mask.data()[i];
  }

  const Mat<T>* a = &c.input;
  for (size_t l = 0; l < n_hidden; ++l) {
    detail::affine_batch(net.hidden[l], *a, T(1), c.pre[l]);
    c.act[l] = c.pre[l];
    relu_inplace(std::span<T>(c.act[l].data(), c.act[l].size()));
    for (size_t i = 0; i < c.act[l].size(); ++i) {
      c.act[l].data()[i] *= c.mask[l].data()[i];
    }
    a = &c.act[l];
  }

  detail::affine_batch(net.low_head, *a, T(1), c.out.low);
  detail::softmax_rows(c.out.low);
  if (net.high_head) {
    detail::affine_batch(*net.high_head, *a, T(1), c.out.high);
    detail::softmax_rows(c.out.high);
  }
  return c.out;
}

// ---------------------------------------------------------------------------
// Losses

/// Batch-summed cross entropy: -sum_t sum_j d[t,j] * log(max(p[t,j], floor)).
template <typename T>
T cross_entropy(const Mat<T>& p, const Mat<T>& d) {
  ASC_CHECK(p.rows() == d.rows() && p.cols() == d.cols(),
            "posterior/target shape mismatch");
  T loss = T(0);
  for (size_t i = 0; i < p.size(); ++i) {
    if (d.data()[i] == T(0)) continue;
    loss -= d.data()[i] *
            std::log(std::max(p.data()[i], static_cast<T>(kProbFloor)));
  }
  return loss;
}

/// Dual-head objective: alpha * CE(low) + (1 - alpha) * CE(high), batch-summed.
template <typename T>
T multi_level_loss(const Mat<T>& p_low, const Mat<T>& p_high,
                   const Mat<T>& d_low, const Mat<T>& d_high, T alpha) {
  ASC_CHECK(!p_high.empty(), "multi-level loss requires the high head");
  return alpha * cross_entropy(p_low, d_low) +
         (T(1) - alpha) * cross_entropy(p_high, d_high);
}

// ---------------------------------------------------------------------------
// Gradients

template <typename T>
struct LayerGrads {
  Mat<T> d_weights;
  std::vector<T> d_bias;
};

template <typename T>
struct Gradients {
  std::vector<LayerGrads<T>> hidden;
  LayerGrads<T> low_head;
  std::optional<LayerGrads<T>> high_head;
};

namespace detail {

template <typename T>
LayerGrads<T> zero_grads(const Layer<T>& layer) {
  LayerGrads<T> g;
  g.d_weights.resize(layer.out_dim(), layer.in_dim());
  g.d_bias.assign(layer.out_dim(), T(0));
  return g;
}

// Accumulates head gradients and the error pushed down to the layer feeding
// the head. delta rows are already scaled by weight/N.
template <typename T>
void head_backward(const Layer<T>& head, const Mat<T>& delta,
                   const Mat<T>& top_act, LayerGrads<T>& grads,
                   Mat<T>& err_below) {
  const size_t n_rows = delta.rows();
  for (size_t n = 0; n < n_rows; ++n) {
    auto d = delta.row(n);
    auto x = top_act.row(n);
    auto e = err_below.row(n);
    for (size_t o = 0; o < head.out_dim(); ++o) {
      auto dw = grads.d_weights.row(o);
      auto w = head.weights.row(o);
      const T dv = d[o];
      grads.d_bias[o] += dv;
      for (size_t k = 0; k < head.in_dim(); ++k) {
        dw[k] += dv * x[k];
        e[k] += dv * w[k];
      }
    }
  }
}

}  // namespace detail

/// Exact gradients of the batch-averaged loss. For a dual-head network the
/// softmax+cross-entropy error at each head is (p - d) scaled by alpha or
/// (1 - alpha); a single-head network uses (p - d) unscaled and
/// `high_targets` must be null. Dropout masks recorded in the cache are
/// applied to the backpropagated errors exactly as in the forward pass.
template <typename T>
Gradients<T> backward(const Network<T>& net, const ForwardCache<T>& cache,
                      const Mat<T>& low_targets, const Mat<T>* high_targets,
                      T alpha = T(1)) {
  ASC_CHECK(cache.pre.size() == net.hidden.size() &&
                cache.input.cols() == net.input_dim &&
                cache.out.low.rows() == cache.input.rows(),
            "forward cache does not match network (train-mode forward "
            "required before backward)");
  ASC_CHECK(low_targets.rows() == cache.out.low.rows() &&
                low_targets.cols() == net.num_low(),
            "low target shape mismatch");
  if (net.has_high_head()) {
    ASC_CHECK(high_targets != nullptr,
              "dual-head network requires high-level targets");
    ASC_CHECK(high_targets->rows() == cache.out.high.rows() &&
                  high_targets->cols() == net.num_high(),
              "high target shape mismatch");
  } else {
    ASC_CHECK(high_targets == nullptr,
              "single-head network got high-level targets");
  }

  const size_t n_rows = cache.input.rows();
  const T inv_n = T(1) / static_cast<T>(n_rows);
  const T low_scale = (net.has_high_head() ? alpha : T(1)) * inv_n;

  Gradients<T> grads;
  grads.low_head = detail::zero_grads(net.low_head);
  grads.hidden.reserve(net.hidden.size());
  for (const auto& layer : net.hidden) {
    grads.hidden.push_back(detail::zero_grads(layer));
  }

  const Mat<T>& top_act = net.hidden.empty() ? cache.input : cache.act.back();

  Mat<T> delta_low(n_rows, net.num_low());
  for (size_t n = 0; n < n_rows; ++n) {
    for (size_t j = 0; j < net.num_low(); ++j) {
      delta_low(n, j) = low_scale * (cache.out.low(n, j) - low_targets(n, j));
    }
  }

  Mat<T> err(n_rows, net.top_dim(), T(0));
  detail::head_backward(net.low_head, delta_low, top_act, grads.low_head, err);

  if (net.has_high_head()) {
    const T high_scale = (T(1) - alpha) * inv_n;
    grads.high_head = detail::zero_grads(*net.high_head);
    Mat<T> delta_high(n_rows, net.num_high());
    for (size_t n = 0; n < n_rows; ++n) {
      for (size_t k = 0; k < net.num_high(); ++k) {
        delta_high(n, k) =
            high_scale * (cache.out.high(n, k) - (*high_targets)(n, k));
      }
    }
    detail::head_backward(*net.high_head, delta_high, top_act,
                          *grads.high_head, err);
  }

  for (size_t li = net.hidden.size(); li-- > 0;) {
    const Layer<T>& layer = net.hidden[li];
    const Mat<T>& below = li == 0 ? cache.input : cache.act[li - 1];
    Mat<T> err_below(n_rows, layer.in_dim(), T(0));
    LayerGrads<T>& g = grads.hidden[li];

    for (size_t n = 0; n < n_rows; ++n) {
      auto e = err.row(n);
      auto pre = cache.pre[li].row(n);
      auto mask = cache.mask[li].row(n);
      auto x = below.row(n);
      auto eb = err_below.row(n);
      for (size_t u = 0; u < layer.out_dim(); ++u) {
        const T eu = e[u] * mask[u] * relu_derivative(pre[u]);
        if (eu == T(0)) continue;
        g.d_bias[u] += eu;
        auto dw = g.d_weights.row(u);
        auto w = layer.weights.row(u);
        for (size_t k = 0; k < layer.in_dim(); ++k) {
          dw[k] += eu * x[k];
          eb[k] += eu * w[k];
        }
      }
    }
    err = std::move(err_below);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Optimizer

/// Classical (heavy-ball) momentum SGD without weight decay:
///   v <- momentum * v - lr * g;  theta <- theta + v
template <typename T>
struct OptimizerState {
  T learning_rate = T(0.005);
  T momentum = T(0.9);
  Gradients<T> velocity;  // zero-initialized, mirrors the network
};

template <typename T>
OptimizerState<T> make_optimizer(const Network<T>& net, T learning_rate,
                                 T momentum) {
  OptimizerState<T> opt;
  opt.learning_rate = learning_rate;
  opt.momentum = momentum;
  for (const auto& layer : net.hidden) {
    opt.velocity.hidden.push_back(detail::zero_grads(layer));
  }
  opt.velocity.low_head = detail::zero_grads(net.low_head);
  if (net.high_head) {
    opt.velocity.high_head = detail::zero_grads(*net.high_head);
  }
  return opt;
}

namespace detail {

template <typename T>
void momentum_update(Layer<T>& layer, const LayerGrads<T>& g,
                     LayerGrads<T>& v, T lr, T momentum) {
  ASC_CHECK(g.d_weights.rows() == layer.out_dim() &&
                g.d_weights.cols() == layer.in_dim(),
            "gradient shape mismatch");
  for (size_t i = 0; i < layer.weights.size(); ++i) {
    T& vel = v.d_weights.data()[i];
    vel = momentum * vel - lr * g.d_weights.data()[i];
    layer.weights.data()[i] += vel;
  }
  for (size_t o = 0; o < layer.bias.size(); ++o) {
    T& vel = v.d_bias[o];
    vel = momentum * vel - lr * g.d_bias[o];
    layer.bias[o] += vel;
  }
}

}  // namespace detail

template <typename T>
void sgd_momentum_step(Network<T>& net, const Gradients<T>& grads,
                       OptimizerState<T>& opt) {
  ASC_CHECK(grads.hidden.size() == net.hidden.size(),
            "gradient/network layer count mismatch");
  for (size_t l = 0; l < net.hidden.size(); ++l) {
    detail::momentum_update(net.hidden[l], grads.hidden[l],
                            opt.velocity.hidden[l], opt.learning_rate,
                            opt.momentum);
  }
  detail::momentum_update(net.low_head, grads.low_head, opt.velocity.low_head,
                          opt.learning_rate, opt.momentum);
  if (net.high_head) {
    ASC_CHECK(grads.high_head.has_value(), "missing high head gradients");
    detail::momentum_update(*net.high_head, *grads.high_head,
                            *opt.velocity.high_head, opt.learning_rate,
                            opt.momentum);
  }
}

// ---------------------------------------------------------------------------
// Initialization

/// Uniform fan-in/fan-out init: W ~ U(-sqrt(6/(in+out)), +sqrt(6/(in+out))),
/// zero biases. Deterministic for a fixed rng state.
template <typename T>
Layer<T> init_layer(size_t in_dim, size_t out_dim, Activation activation,
                    Rng& rng) {
  ASC_CHECK(in_dim > 0 && out_dim > 0, "layer dimensions must be positive");
  Layer<T> layer;
  layer.activation = activation;
  layer.weights.resize(out_dim, in_dim);
  layer.bias.assign(out_dim, T(0));
  const double bound = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (size_t i = 0; i < layer.weights.size(); ++i) {
    layer.weights.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
  }
  return layer;
}

/// Fresh network with random hidden layers and head(s). Layers are drawn in
/// order (hidden bottom-up, then low head, then high head), so a seed pins
/// every parameter.
template <typename T>
Network<T> make_network(size_t input_dim, const std::vector<size_t>& hidden_dims,
                        size_t num_low, std::optional<size_t> num_high,
                        T dropout_input, T dropout_hidden, uint64_t seed) {
  Rng rng(seed);
  Network<T> net;
  net.input_dim = input_dim;
  net.dropout_input = dropout_input;
  net.dropout_hidden = dropout_hidden;
  size_t prev = input_dim;
  for (size_t dim : hidden_dims) {
    net.hidden.push_back(init_layer<T>(prev, dim, Activation::kRelu, rng));
    prev = dim;
  }
  net.low_head = init_layer<T>(prev, num_low, Activation::kSoftmax, rng);
  if (num_high) {
    net.high_head = init_layer<T>(prev, *num_high, Activation::kSoftmax, rng);
  }
  net.validate();
  return net;
}

template <typename T>
void Network<T>::validate() const {
  if (input_dim == 0) throw DataError("network input dimension is zero");
  const auto check_layer = [](const Layer<T>& layer, size_t expected_in,
                              Activation expected_act, const char* what) {
    if (layer.in_dim() != expected_in) {
      throw DataError(std::string(what) + " input dimension " +
                      std::to_string(layer.in_dim()) + " does not chain (" +
                      std::to_string(expected_in) + " expected)");
    }
    if (layer.bias.size() != layer.out_dim() || layer.out_dim() == 0) {
      throw DataError(std::string(what) + " bias/weight shape mismatch");
    }
    if (layer.activation != expected_act) {
      throw DataError(std::string(what) + " has the wrong activation");
    }
  };
  size_t prev = input_dim;
  for (const auto& layer : hidden) {
    check_layer(layer, prev, Activation::kRelu, "hidden layer");
    prev = layer.out_dim();
  }
  check_layer(low_head, prev, Activation::kSoftmax, "low head");
  if (high_head) {
    check_layer(*high_head, prev, Activation::kSoftmax, "high head");
  }
  const double rho_in = static_cast<double>(dropout_input);
  const double rho_h = static_cast<double>(dropout_hidden);
  if (rho_in < 0.0 || rho_in >= 1.0 || rho_h < 0.0 || rho_h >= 1.0) {
    throw DataError("dropout rates must lie in [0, 1)");
  }
}

/// One-hot target rows for a batch of label indices.
template <typename T>
Mat<T> one_hot_rows(const std::vector<int>& labels, size_t num_classes) {
  Mat<T> rows(labels.size(), num_classes, T(0));
  for (size_t n = 0; n < labels.size(); ++n) {
    ASC_CHECK(labels[n] >= 0 && static_cast<size_t>(labels[n]) < num_classes,
              "label out of range");
    rows(n, labels[n]) = T(1);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization (production float models)
//
// Model file: magic "HACM", version u32, input_dim u32, hidden count u32,
// hidden layers, low head, has_high u8, optional high head, then the two
// dropout rates as f32. Each layer is: in u32, out u32, activation u8,
// weights f32 row-major, bias f32. Round-trips are bit-exact.

void save_model(const Network<float>& net, const std::string& path);
Network<float> load_model(const std::string& path);

}  // namespace asc

#endif  // ASC_NETWORK_H_

#pragma once

// Dense MLP (affine + ReLU hidden layers, softmax output) trained with
// mini-batch SGD on softmax cross-entropy. Backpropagation is written out by
// hand and verified against central finite differences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "autorank/dataset.hpp"
#include "autorank/error.hpp"
#include "autorank/matrix.hpp"
#include "autorank/rng.hpp"

namespace autorank::nn {

enum class Activation { Relu, Softmax };

struct DenseLayer {
  Matrix weight;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::Relu;

  std::size_t in() const noexcept { return weight.cols(); }
  std::size_t out() const noexcept { return weight.rows(); }

  bool operator==(const DenseLayer&) const = default;
};

struct DenseNet {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.front().in(); }
  std::size_t classes() const { return layers.back().out(); }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d{input_dim()};
    for (const auto& l : layers) d.push_back(l.out());
    return d;
  }

  bool operator==(const DenseNet&) const = default;
};

struct TrainingConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::size_t epochs = 1;
  std::uint64_t seed = 42;
};

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};

inline void validate(const TrainingConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    fail(ErrorCode::InvalidParams, "learning rate must be a finite non-negative number");
  if (cfg.batch_size == 0) fail(ErrorCode::InvalidParams, "batch size must be >= 1");
}

/// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases.
/// dims = {input, hidden..., classes}; every layer but the last is ReLU.
inline DenseNet init_net(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  if (dims.size() < 2) fail(ErrorCode::InvalidSpec, "need at least input and output dims");
  for (auto d : dims)
    if (d == 0) fail(ErrorCode::InvalidSpec, "layer dims must be positive");
  Rng rng(seed);
  DenseNet net;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    const std::size_t in = dims[l], out = dims[l + 1];
    layer.weight = Matrix(out, in);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& w : layer.weight.flat()) w = rng.uniform(-limit, limit);
    layer.bias.assign(out, 0.0);
    layer.activation = l + 2 == dims.size() ? Activation::Softmax : Activation::Relu;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace detail {

/// out = x * W^T + b, one row per sample.
inline void affine(const Matrix& x, const Matrix& weight, std::span<const double> bias, Matrix& out) {
  matmul_bt(x, weight, out);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias[j];
  }
}

inline void relu_inplace(Matrix& z) {
  for (double& v : z.flat()) v = v > 0.0 ? v : 0.0;
}

/// Row-wise max-shifted softmax in place.
inline void softmax_inplace(Matrix& z) {
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto r = z.row(i);
    const double m = *std::max_element(r.begin(), r.end());
    double s = 0.0;
    for (double& v : r) {
      v = std::exp(v - m);
      s += v;
    }
    for (double& v : r) v /= s;
  }
}

/// Mean cross-entropy of logits against labels, computed via log-sum-exp.
/// On return `logits` holds the gradient of the mean loss w.r.t. the logits.
inline double softmax_xent_grad(Matrix& logits, std::span<const int> labels) {
  const double inv_b = 1.0 / static_cast<double>(logits.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto r = logits.row(i);
    const double m = *std::max_element(r.begin(), r.end());
    double s = 0.0;
    for (double v : r) s += std::exp(v - m);
    const double lse = m + std::log(s);
    total += lse - r[static_cast<std::size_t>(labels[i])];
    for (double& v : r) v = std::exp(v - lse) * inv_b;
    r[static_cast<std::size_t>(labels[i])] -= inv_b;
  }
  return total * inv_b;
}

inline double softmax_xent(const Matrix& logits, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto r = logits.row(i);
    const double m = *std::max_element(r.begin(), r.end());
    double s = 0.0;
    for (double v : r) s += std::exp(v - m);
    total += m + std::log(s) - r[static_cast<std::size_t>(labels[i])];
  }
  return total / static_cast<double>(logits.rows());
}

/// Zero the upstream gradient where the ReLU was inactive.
inline void relu_backward(Matrix& grad, const Matrix& activated) {
  auto g = grad.flat();
  auto a = activated.flat();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (a[i] <= 0.0) g[i] = 0.0;
}

inline std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> s(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) s[j] += r[j];
  }
  return s;
}

inline void check_batch(const Matrix& x, std::span<const int> labels, std::size_t input_dim, std::size_t classes) {
  if (x.cols() != input_dim) fail(ErrorCode::DimensionMismatch, "input width does not match the network");
  if (x.rows() != labels.size()) fail(ErrorCode::DimensionMismatch, "batch feature/label count mismatch");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= classes) fail(ErrorCode::InvalidParams, "label out of range");
}

/// Iterates seeded-shuffled mini-batches of `data`, handing each batch to
/// `step(features, labels)` and returning the mean of the returned losses.
template <typename Step>
double for_each_minibatch(const LabeledDataset& data, std::size_t batch_size, std::uint64_t seed, Step&& step) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  double loss_sum = 0.0;
  std::size_t batches = 0;
  Matrix x;
  std::vector<int> y;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    x = Matrix(end - start, data.dim());
    y.resize(end - start);
    for (std::size_t i = start; i < end; ++i) {
      auto src = data.features.row(order[i]);
      std::copy(src.begin(), src.end(), x.row(i - start).begin());
      y[i - start] = data.labels[order[i]];
    }
    loss_sum += step(x, std::span<const int>(y));
    ++batches;
  }
  return loss_sum / static_cast<double>(batches);
}

/// Shared evaluation loop over a dataset in fixed-size chunks.
template <typename Logits>
Evaluation evaluate_with(const LabeledDataset& data, Logits&& logits_of) {
  if (data.size() == 0) fail(ErrorCode::EmptyDataset, "cannot evaluate on an empty dataset");
  constexpr std::size_t chunk = 256;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < data.size(); start += chunk) {
    const std::size_t end = std::min(data.size(), start + chunk);
    std::vector<std::size_t> idx(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const auto part = data.select(idx);
    const Matrix logits = logits_of(part.features);
    for (std::size_t i = 0; i < logits.rows(); ++i) {
      auto r = logits.row(i);
      const auto best = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
      if (best == static_cast<std::size_t>(part.labels[i])) ++correct;
    }
    loss_sum += softmax_xent(logits, part.labels) * static_cast<double>(logits.rows());
  }
  return {static_cast<double>(correct) / static_cast<double>(data.size()),
          loss_sum / static_cast<double>(data.size())};
}

}  // namespace detail

struct Gradients {
  std::vector<Matrix> weight;
  std::vector<std::vector<double>> bias;
};

/// Output-layer logits (pre-softmax).
inline Matrix logits(const DenseNet& net, const Matrix& x) {
  if (x.cols() != net.input_dim()) fail(ErrorCode::DimensionMismatch, "input width does not match the network");
  Matrix a = x, z;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    detail::affine(a, net.layers[l].weight, net.layers[l].bias, z);
    if (l + 1 < net.layers.size()) detail::relu_inplace(z);
    a = std::move(z);
  }
  return a;
}

/// Class probability rows.
inline Matrix forward(const DenseNet& net, const Matrix& x) {
  Matrix p = logits(net, x);
  detail::softmax_inplace(p);
  return p;
}

/// Mean cross-entropy of the batch and its gradient w.r.t. every parameter.
inline double loss_and_gradients(const DenseNet& net, const Matrix& x, std::span<const int> labels, Gradients& grads) {
  detail::check_batch(x, labels, net.input_dim(), net.classes());
  const std::size_t n_layers = net.layers.size();
  std::vector<Matrix> acts(n_layers + 1);
  acts[0] = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    detail::affine(acts[l], net.layers[l].weight, net.layers[l].bias, acts[l + 1]);
    if (l + 1 < n_layers) detail::relu_inplace(acts[l + 1]);
  }
  Matrix delta = std::move(acts[n_layers]);
  const double loss = detail::softmax_xent_grad(delta, labels);

  grads.weight.resize(n_layers);
  grads.bias.resize(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    matmul_at(delta, acts[l], grads.weight[l]);
    grads.bias[l] = detail::column_sums(delta);
    if (l > 0) {
      Matrix prev;
      matmul(delta, net.layers[l].weight, prev);
      detail::relu_backward(prev, acts[l]);
      delta = std::move(prev);
    }
  }
  return loss;
}

inline double batch_loss(const DenseNet& net, const Matrix& x, std::span<const int> labels) {
  detail::check_batch(x, labels, net.input_dim(), net.classes());
  return detail::softmax_xent(logits(net, x), labels);
}

inline void sgd_step(DenseNet& net, const Gradients& grads, double learning_rate) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto w = net.layers[l].weight.flat();
    auto g = grads.weight[l].flat();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate * g[i];
    auto& b = net.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= learning_rate * grads.bias[l][i];
  }
}

/// One pass of mini-batch SGD over `shard` in an order shuffled by
/// `config.seed`. Returns the arithmetic mean of the per-batch losses, each
/// measured before that batch's update.
inline double train_epoch(DenseNet& net, const LabeledDataset& shard, const TrainingConfig& config) {
  validate(config);
  if (shard.size() == 0) fail(ErrorCode::EmptyShard, "cannot train on an empty shard");
  Gradients grads;
  return detail::for_each_minibatch(shard, config.batch_size, config.seed, [&](const Matrix& x, std::span<const int> y) {
    const double loss = loss_and_gradients(net, x, y, grads);
    sgd_step(net, grads, config.learning_rate);
    return loss;
  });
}

/// Accuracy (argmax, ties to the lowest class) and mean cross-entropy.
inline Evaluation evaluate(const DenseNet& net, const LabeledDataset& data) {
  if (data.size() == 0) fail(ErrorCode::EmptyDataset, "cannot evaluate on an empty dataset");
  if (data.dim() != net.input_dim()) fail(ErrorCode::DimensionMismatch, "input width does not match the network");
  return detail::evaluate_with(data, [&](const Matrix& x) { return logits(net, x); });
}

// --- Gradient verification ---------------------------------------------------

inline std::vector<double> flatten(const DenseNet& net) {
  std::vector<double> out;
  for (const auto& l : net.layers) {
    out.insert(out.end(), l.weight.flat().begin(), l.weight.flat().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

inline std::vector<double> flatten(const Gradients& g) {
  std::vector<double> out;
  for (std::size_t l = 0; l < g.weight.size(); ++l) {
    out.insert(out.end(), g.weight[l].flat().begin(), g.weight[l].flat().end());
    out.insert(out.end(), g.bias[l].begin(), g.bias[l].end());
  }
  return out;
}

inline void unflatten(DenseNet& net, std::span<const double> params) {
  std::size_t pos = 0;
  for (auto& l : net.layers) {
    for (double& w : l.weight.flat()) w = params[pos++];
    for (double& b : l.bias) b = params[pos++];
  }
  if (pos != params.size()) fail(ErrorCode::DimensionMismatch, "parameter vector length mismatch");
}

struct GradientCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = false;
};

inline constexpr double kFiniteDifferenceStep = 1e-5;

/// Relative error |a - n| / max(|a|, |n|, 1e-4) between analytic and central
/// finite-difference derivatives of `loss_at` at `params`. The 1e-4 floor
/// keeps near-zero derivatives from amplifying finite-difference noise.
inline GradientCheckResult finite_difference_check(std::vector<double> params,
                                                   const std::function<double(std::span<const double>)>& loss_at,
                                                   std::span<const double> analytic, double tolerance,
                                                   double step = kFiniteDifferenceStep) {
  if (analytic.size() != params.size()) fail(ErrorCode::DimensionMismatch, "analytic gradient length mismatch");
  GradientCheckResult res;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double up = loss_at(params);
    params[i] = saved - step;
    const double down = loss_at(params);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-4});
    const double err = std::abs(analytic[i] - numeric) / denom;
    if (err > res.max_rel_error) {
      res.max_rel_error = err;
      res.worst_index = i;
    }
  }
  res.passed = res.max_rel_error < tolerance;
  return res;
}

inline void check_gradient_check_size(const std::vector<std::size_t>& dims, std::size_t batch) {
  if (batch == 0 || batch > 8) fail(ErrorCode::InvalidParams, "gradient check batch must hold 1..8 samples");
  for (auto d : dims)
    if (d > 16) fail(ErrorCode::InvalidParams, "gradient check expects layer dims <= 16");
}

inline GradientCheckResult gradient_check(const DenseNet& net, const Matrix& x, std::span<const int> labels,
                                          double tolerance = 1e-4) {
  check_gradient_check_size(net.dims(), x.rows());
  Gradients grads;
  loss_and_gradients(net, x, labels, grads);
  DenseNet probe = net;
  return finite_difference_check(
      flatten(net),
      [&](std::span<const double> p) {
        unflatten(probe, p);
        return batch_loss(probe, x, labels);
      },
      flatten(grads), tolerance);
}

}  // namespace autorank::nn

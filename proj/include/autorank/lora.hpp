#pragma once

// Low-rank adaptation of dense layers, W_eff = W0 + B*A with W0 frozen
// (scaling factor 1), and rank-heterogeneous aggregation by zero padding
// with per-slice weight renormalization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "autorank/dataset.hpp"
#include "autorank/error.hpp"
#include "autorank/matrix.hpp"
#include "autorank/nn.hpp"
#include "autorank/rank.hpp"
#include "autorank/rng.hpp"

namespace autorank::lora {

struct LoraDenseLayer {
  Matrix base_weight;  // W0, out x in
  Matrix lora_down;    // A, r x in
  Matrix lora_up;      // B, out x r
  std::vector<double> bias;
  nn::Activation activation = nn::Activation::Relu;

  std::size_t rank() const noexcept { return lora_down.rows(); }
  std::size_t in() const noexcept { return base_weight.cols(); }
  std::size_t out() const noexcept { return base_weight.rows(); }

  Matrix effective_weight() const {
    Matrix ba;
    matmul(lora_up, lora_down, ba);
    auto dst = ba.flat();
    auto src = base_weight.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    return ba;
  }

  bool operator==(const LoraDenseLayer&) const = default;
};

struct LoraNet {
  std::vector<LoraDenseLayer> layers;
  bool train_base = false;

  std::size_t input_dim() const { return layers.front().in(); }
  std::size_t classes() const { return layers.back().out(); }
  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d{input_dim()};
    for (const auto& l : layers) d.push_back(l.out());
    return d;
  }
  std::vector<std::size_t> ranks() const {
    std::vector<std::size_t> r;
    for (const auto& l : layers) r.push_back(l.rank());
    return r;
  }

  bool operator==(const LoraNet&) const = default;
};

/// The part of one layer that trains and travels between client and server.
/// `base` is only populated when the base weight is trained as well.
struct LayerState {
  Matrix down;  // A
  Matrix up;    // B
  std::vector<double> bias;
  Matrix base;

  std::size_t rank() const noexcept { return down.rows(); }

  bool operator==(const LayerState&) const = default;
};

using LoraState = std::vector<LayerState>;

struct GlobalLoraState {
  std::vector<LayerState> layers;
  std::vector<std::size_t> global_ranks;

  bool operator==(const GlobalLoraState&) const = default;
};

// --- Rank and parameter arithmetic -------------------------------------------

/// Smallest rank at which r*(in+out) reaches in*out.
inline std::size_t break_even_rank(std::size_t in, std::size_t out) {
  return (in * out + (in + out) - 1) / (in + out);
}

inline std::vector<std::size_t> default_global_ranks(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) out.push_back(break_even_rank(dims[l], dims[l + 1]));
  return out;
}

/// One global rank for every layer, clamped per layer to min(in, out).
inline std::vector<std::size_t> uniform_global_ranks(const std::vector<std::size_t>& dims, std::size_t rank) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) out.push_back(std::min({rank, dims[l], dims[l + 1]}));
  return out;
}

/// Per-layer client ranks R_g * ratio, rounded half-up, clamped to [1, R_g].
inline std::vector<std::size_t> client_ranks(const std::vector<std::size_t>& global_ranks, double ratio) {
  std::vector<std::size_t> out;
  for (auto g : global_ranks) out.push_back(static_cast<std::size_t>(rank::integer_rank(static_cast<int>(g), ratio)));
  return out;
}

/// Trainable parameters of one adapted layer: r*(in+out) + out (+ in*out
/// when the base weight trains too).
inline std::size_t layer_trainable_parameters(std::size_t in, std::size_t out, std::size_t rank, bool train_base = false) {
  return rank * (in + out) + out + (train_base ? in * out : 0);
}

inline std::size_t trainable_parameters(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& ranks,
                                        bool train_base = false) {
  if (ranks.size() + 1 != dims.size()) fail(ErrorCode::DimensionMismatch, "one rank per layer expected");
  std::size_t total = 0;
  for (std::size_t l = 0; l < ranks.size(); ++l)
    total += layer_trainable_parameters(dims[l], dims[l + 1], ranks[l], train_base);
  return total;
}

inline std::size_t trainable_parameters(const LoraNet& net) {
  return trainable_parameters(net.dims(), net.ranks(), net.train_base);
}

/// sum r*(in+out) / sum in*out over the dense layers (weights only).
inline double weight_parameter_ratio(const std::vector<std::size_t>& dims, std::size_t rank) {
  double lora = 0.0, dense = 0.0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    lora += static_cast<double>(rank * (dims[l] + dims[l + 1]));
    dense += static_cast<double>(dims[l] * dims[l + 1]);
  }
  return lora / dense;
}

// --- Construction ------------------------------------------------------------

/// Adapts every dense layer of `base`: A ~ N(0, 1/in), B = 0, so the adapted
/// net computes exactly the base function until trained.
inline LoraNet lora_init(const nn::DenseNet& base, const std::vector<std::size_t>& ranks, std::uint64_t seed,
                         bool train_base = false) {
  if (ranks.size() != base.layers.size()) fail(ErrorCode::DimensionMismatch, "one rank per layer expected");
  Rng rng(seed);
  LoraNet net;
  net.train_base = train_base;
  for (std::size_t l = 0; l < base.layers.size(); ++l) {
    const auto& src = base.layers[l];
    const std::size_t r = ranks[l];
    if (r == 0) fail(ErrorCode::InvalidParams, "LoRA rank must be >= 1");
    if (r > std::min(src.in(), src.out()))
      fail(ErrorCode::RankTooLarge, "rank " + std::to_string(r) + " exceeds min(in, out) of layer " + std::to_string(l));
    LoraDenseLayer layer;
    layer.base_weight = src.weight;
    layer.bias = src.bias;
    layer.activation = src.activation;
    layer.lora_down = Matrix(r, src.in());
    const double stddev = 1.0 / std::sqrt(static_cast<double>(src.in()));
    for (double& a : layer.lora_down.flat()) a = stddev * rng.normal();
    layer.lora_up = Matrix(src.out(), r, 0.0);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

inline LoraNet lora_init(const nn::DenseNet& base, std::size_t rank, std::uint64_t seed, bool train_base = false) {
  return lora_init(base, std::vector<std::size_t>(base.layers.size(), rank), seed, train_base);
}

inline LoraState state_of(const LoraNet& net) {
  LoraState s;
  for (const auto& l : net.layers) s.push_back({l.lora_down, l.lora_up, l.bias, net.train_base ? l.base_weight : Matrix{}});
  return s;
}

/// Rebuilds a client net around the shared frozen base and a received state.
inline LoraNet from_state(const nn::DenseNet& base, const LoraState& state, bool train_base = false) {
  if (state.size() != base.layers.size()) fail(ErrorCode::DimensionMismatch, "state/base layer count mismatch");
  LoraNet net;
  net.train_base = train_base;
  for (std::size_t l = 0; l < state.size(); ++l) {
    const auto& b = base.layers[l];
    const auto& s = state[l];
    if (s.down.cols() != b.in() || s.up.rows() != b.out() || s.up.cols() != s.down.rows() || s.bias.size() != b.out())
      fail(ErrorCode::DimensionMismatch, "LoRA state shape does not match base layer " + std::to_string(l));
    LoraDenseLayer layer;
    layer.base_weight = s.base.empty() ? b.weight : s.base;
    layer.lora_down = s.down;
    layer.lora_up = s.up;
    layer.bias = s.bias;
    layer.activation = b.activation;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

// --- Forward / backward --------------------------------------------------------

struct Gradients {
  std::vector<Matrix> down;
  std::vector<Matrix> up;
  std::vector<std::vector<double>> bias;
  std::vector<Matrix> base;  // empty unless train_base
};

namespace detail {

/// z = x W0^T + (x A^T) B^T + b; also returns h = x A^T for the backward pass.
inline void layer_forward(const LoraDenseLayer& layer, const Matrix& x, Matrix& z, Matrix& h) {
  matmul_bt(x, layer.lora_down, h);
  Matrix low;
  matmul_bt(h, layer.lora_up, low);
  nn::detail::affine(x, layer.base_weight, layer.bias, z);
  auto zf = z.flat();
  auto lf = low.flat();
  for (std::size_t i = 0; i < zf.size(); ++i) zf[i] += lf[i];
}

}  // namespace detail

inline Matrix logits(const LoraNet& net, const Matrix& x) {
  if (x.cols() != net.input_dim()) fail(ErrorCode::DimensionMismatch, "input width does not match the network");
  Matrix a = x, z, h;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    detail::layer_forward(net.layers[l], a, z, h);
    if (l + 1 < net.layers.size()) nn::detail::relu_inplace(z);
    a = std::move(z);
  }
  return a;
}

inline Matrix forward(const LoraNet& net, const Matrix& x) {
  Matrix p = logits(net, x);
  nn::detail::softmax_inplace(p);
  return p;
}

/// Gradients flow to A, B and the bias (and W0 only if train_base).
/// With G = dL/dW_eff: dA = B^T G and dB = G A^T, evaluated in factored form.
inline double loss_and_gradients(const LoraNet& net, const Matrix& x, std::span<const int> labels, Gradients& grads) {
  nn::detail::check_batch(x, labels, net.input_dim(), net.classes());
  const std::size_t n_layers = net.layers.size();
  std::vector<Matrix> acts(n_layers + 1), hidden(n_layers);
  acts[0] = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    detail::layer_forward(net.layers[l], acts[l], acts[l + 1], hidden[l]);
    if (l + 1 < n_layers) nn::detail::relu_inplace(acts[l + 1]);
  }
  Matrix delta = std::move(acts[n_layers]);
  const double loss = nn::detail::softmax_xent_grad(delta, labels);

  grads.down.resize(n_layers);
  grads.up.resize(n_layers);
  grads.bias.resize(n_layers);
  grads.base.assign(net.train_base ? n_layers : 0, Matrix{});
  for (std::size_t l = n_layers; l-- > 0;) {
    const auto& layer = net.layers[l];
    Matrix delta_up;  // delta * B, batch x r
    matmul(delta, layer.lora_up, delta_up);
    matmul_at(delta, hidden[l], grads.up[l]);
    matmul_at(delta_up, acts[l], grads.down[l]);
    grads.bias[l] = nn::detail::column_sums(delta);
    if (net.train_base) matmul_at(delta, acts[l], grads.base[l]);
    if (l > 0) {
      Matrix prev, low;
      matmul(delta, layer.base_weight, prev);
      matmul(delta_up, layer.lora_down, low);
      auto pf = prev.flat();
      auto lf = low.flat();
      for (std::size_t i = 0; i < pf.size(); ++i) pf[i] += lf[i];
      nn::detail::relu_backward(prev, acts[l]);
      delta = std::move(prev);
    }
  }
  return loss;
}

inline double batch_loss(const LoraNet& net, const Matrix& x, std::span<const int> labels) {
  nn::detail::check_batch(x, labels, net.input_dim(), net.classes());
  return nn::detail::softmax_xent(logits(net, x), labels);
}

inline void sgd_step(LoraNet& net, const Gradients& grads, double learning_rate) {
  auto apply = [learning_rate](std::span<double> p, std::span<const double> g) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learning_rate * g[i];
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    apply(layer.lora_down.flat(), grads.down[l].flat());
    apply(layer.lora_up.flat(), grads.up[l].flat());
    apply(layer.bias, grads.bias[l]);
    if (net.train_base) apply(layer.base_weight.flat(), grads.base[l].flat());
  }
}

inline double lora_train_epoch(LoraNet& net, const LabeledDataset& shard, const nn::TrainingConfig& config) {
  nn::validate(config);
  if (shard.size() == 0) fail(ErrorCode::EmptyShard, "cannot train on an empty shard");
  Gradients grads;
  return nn::detail::for_each_minibatch(shard, config.batch_size, config.seed,
                                        [&](const Matrix& x, std::span<const int> y) {
                                          const double loss = loss_and_gradients(net, x, y, grads);
                                          sgd_step(net, grads, config.learning_rate);
                                          return loss;
                                        });
}

inline nn::Evaluation evaluate(const LoraNet& net, const LabeledDataset& data) {
  if (data.size() == 0) fail(ErrorCode::EmptyDataset, "cannot evaluate on an empty dataset");
  if (data.dim() != net.input_dim()) fail(ErrorCode::DimensionMismatch, "input width does not match the network");
  return nn::detail::evaluate_with(data, [&](const Matrix& x) { return logits(net, x); });
}

// --- Gradient verification ---------------------------------------------------

inline std::vector<double> flatten_trainable(const LoraNet& net) {
  std::vector<double> out;
  auto put = [&out](std::span<const double> s) { out.insert(out.end(), s.begin(), s.end()); };
  for (const auto& l : net.layers) {
    put(l.lora_down.flat());
    put(l.lora_up.flat());
    put(l.bias);
    if (net.train_base) put(l.base_weight.flat());
  }
  return out;
}

inline std::vector<double> flatten(const Gradients& g) {
  std::vector<double> out;
  auto put = [&out](std::span<const double> s) { out.insert(out.end(), s.begin(), s.end()); };
  for (std::size_t l = 0; l < g.down.size(); ++l) {
    put(g.down[l].flat());
    put(g.up[l].flat());
    put(g.bias[l]);
    if (!g.base.empty()) put(g.base[l].flat());
  }
  return out;
}

inline void unflatten_trainable(LoraNet& net, std::span<const double> params) {
  std::size_t pos = 0;
  auto take = [&](std::span<double> dst) {
    for (double& v : dst) v = params[pos++];
  };
  for (auto& l : net.layers) {
    take(l.lora_down.flat());
    take(l.lora_up.flat());
    take(l.bias);
    if (net.train_base) take(l.base_weight.flat());
  }
  if (pos != params.size()) fail(ErrorCode::DimensionMismatch, "parameter vector length mismatch");
}

inline nn::GradientCheckResult gradient_check(const LoraNet& net, const Matrix& x, std::span<const int> labels,
                                              double tolerance = 1e-4) {
  nn::check_gradient_check_size(net.dims(), x.rows());
  Gradients grads;
  loss_and_gradients(net, x, labels, grads);
  LoraNet probe = net;
  return nn::finite_difference_check(
      flatten_trainable(net),
      [&](std::span<const double> p) {
        unflatten_trainable(probe, p);
        return batch_loss(probe, x, labels);
      },
      flatten(grads), tolerance);
}

// --- Aggregation -------------------------------------------------------------

struct ClientContribution {
  LoraState state;
  double volume = 0.0;  // p_i
};

/// Zero-pads every client to the global rank and averages each rank slice
/// (row of A, column of B) over the clients that own it, with volume weights
/// renormalized over those owners. Slices nobody owns come out zero. Biases,
/// and base weights when present, use plain volume-weighted averaging.
inline GlobalLoraState aggregate_hetero(const std::vector<ClientContribution>& clients,
                                        const std::vector<std::size_t>& global_ranks) {
  if (clients.empty()) fail(ErrorCode::ZeroTotalVolume, "no clients to aggregate");
  double total = 0.0;
  for (const auto& c : clients) {
    if (!(c.volume >= 0.0) || !std::isfinite(c.volume)) fail(ErrorCode::InvalidParams, "client volume must be >= 0");
    total += c.volume;
  }
  if (!(total > 0.0)) fail(ErrorCode::ZeroTotalVolume, "total client data volume is zero");

  const std::size_t n_layers = global_ranks.size();
  const auto& first = clients.front().state;
  if (first.size() != n_layers) fail(ErrorCode::DimensionMismatch, "client layer count differs from global");

  GlobalLoraState g;
  g.global_ranks = global_ranks;
  g.layers.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = first[l].down.cols();
    const std::size_t out = first[l].up.rows();
    const std::size_t rg = global_ranks[l];
    const bool with_base = !first[l].base.empty();
    for (const auto& c : clients) {
      const auto& s = c.state.at(l);
      if (s.rank() > rg)
        fail(ErrorCode::RankExceedsGlobal, "client rank " + std::to_string(s.rank()) + " exceeds global rank " +
                                               std::to_string(rg) + " in layer " + std::to_string(l));
      if (s.down.cols() != in || s.up.rows() != out || s.up.cols() != s.rank() || s.bias.size() != out ||
          s.base.empty() == with_base)
        fail(ErrorCode::DimensionMismatch, "client state shapes disagree in layer " + std::to_string(l));
    }

    auto& gl = g.layers[l];
    gl.down = Matrix(rg, in, 0.0);
    gl.up = Matrix(out, rg, 0.0);
    gl.bias.assign(out, 0.0);
    if (with_base) gl.base = Matrix(out, in, 0.0);

    for (std::size_t slice = 0; slice < rg; ++slice) {
      double owners = 0.0;
      for (const auto& c : clients)
        if (c.state[l].rank() > slice) owners += c.volume;
      if (!(owners > 0.0)) continue;
      auto dst = gl.down.row(slice);
      for (const auto& c : clients) {
        const auto& s = c.state[l];
        if (s.rank() <= slice) continue;
        const double w = c.volume / owners;
        auto src = s.down.row(slice);
        for (std::size_t j = 0; j < in; ++j) dst[j] += w * src[j];
        for (std::size_t o = 0; o < out; ++o) gl.up(o, slice) += w * s.up(o, slice);
      }
    }
    for (const auto& c : clients) {
      const double w = c.volume / total;
      const auto& s = c.state[l];
      for (std::size_t o = 0; o < out; ++o) gl.bias[o] += w * s.bias[o];
      if (with_base) {
        auto dst = gl.base.flat();
        auto src = s.base.flat();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
      }
    }
  }
  return g;
}

/// First r_l rows of A_g and first r_l columns of B_g per layer, plus bias.
inline LoraState broadcast_truncate(const GlobalLoraState& global, const std::vector<std::size_t>& ranks) {
  if (ranks.size() != global.layers.size()) fail(ErrorCode::DimensionMismatch, "one rank per layer expected");
  LoraState out;
  for (std::size_t l = 0; l < ranks.size(); ++l) {
    const auto& gl = global.layers[l];
    const std::size_t r = ranks[l];
    if (r > gl.rank() || r > global.global_ranks[l])
      fail(ErrorCode::RankExceedsGlobal, "requested rank exceeds global rank in layer " + std::to_string(l));
    if (r == 0) fail(ErrorCode::InvalidParams, "LoRA rank must be >= 1");
    LayerState s;
    s.down = Matrix(r, gl.down.cols());
    for (std::size_t i = 0; i < r; ++i) std::copy(gl.down.row(i).begin(), gl.down.row(i).end(), s.down.row(i).begin());
    s.up = Matrix(gl.up.rows(), r);
    for (std::size_t o = 0; o < gl.up.rows(); ++o)
      for (std::size_t i = 0; i < r; ++i) s.up(o, i) = gl.up(o, i);
    s.bias = gl.bias;
    s.base = gl.base;
    out.push_back(std::move(s));
  }
  return out;
}

inline LoraState broadcast_truncate(const GlobalLoraState& global, std::size_t rank) {
  return broadcast_truncate(global, std::vector<std::size_t>(global.layers.size(), rank));
}

/// The global state seen as a full-rank client, for evaluation.
inline LoraState as_state(const GlobalLoraState& global) { return global.layers; }

// --- Snapshot files ----------------------------------------------------------
//
// Layout (all integers uint32 little-endian, all reals float64 little-endian):
//   "ARLS" | version=1 | layer_count
//   per layer: layer_index | rank | in | out | has_base
//              A (rank*in) | B (out*rank) | bias (out) | W0 (out*in, if has_base)

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) fail(ErrorCode::TruncatedFile, "LoRA snapshot ends early");
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_snapshot(const LoraState& state) {
  std::string buf = "ARLS";
  detail::put_u32(buf, 1);
  detail::put_u32(buf, static_cast<std::uint32_t>(state.size()));
  for (std::size_t l = 0; l < state.size(); ++l) {
    const auto& s = state[l];
    detail::put_u32(buf, static_cast<std::uint32_t>(l));
    detail::put_u32(buf, static_cast<std::uint32_t>(s.rank()));
    detail::put_u32(buf, static_cast<std::uint32_t>(s.down.cols()));
    detail::put_u32(buf, static_cast<std::uint32_t>(s.up.rows()));
    detail::put_u32(buf, s.base.empty() ? 0u : 1u);
    for (double v : s.down.flat()) detail::put_f64(buf, v);
    for (double v : s.up.flat()) detail::put_f64(buf, v);
    for (double v : s.bias) detail::put_f64(buf, v);
    for (double v : s.base.flat()) detail::put_f64(buf, v);
  }
  return buf;
}

inline LoraState decode_snapshot(std::span<const unsigned char> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "ARLS", 4) != 0)
    fail(ErrorCode::BadMagic, "not a LoRA snapshot");
  detail::Reader rd(bytes.subspan(4));
  const auto version = rd.u32();
  if (version != 1) fail(ErrorCode::ParseError, "unsupported snapshot version " + std::to_string(version));
  const auto n_layers = rd.u32();
  LoraState state;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    const auto index = rd.u32();
    if (index != l) fail(ErrorCode::ParseError, "snapshot layers out of order");
    const auto r = rd.u32(), in = rd.u32(), out = rd.u32(), has_base = rd.u32();
    LayerState s;
    s.down = Matrix(r, in);
    s.up = Matrix(out, r);
    s.bias.resize(out);
    for (double& v : s.down.flat()) v = rd.f64();
    for (double& v : s.up.flat()) v = rd.f64();
    for (double& v : s.bias) v = rd.f64();
    if (has_base) {
      s.base = Matrix(out, in);
      for (double& v : s.base.flat()) v = rd.f64();
    }
    state.push_back(std::move(s));
  }
  if (!rd.done()) fail(ErrorCode::ParseError, "trailing bytes after LoRA snapshot");
  return state;
}

inline void save_snapshot(const std::string& path, const LoraState& state) {
  const auto bytes = encode_snapshot(state);
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorCode::IoError, "failed writing " + path);
}

inline LoraState load_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace autorank::lora

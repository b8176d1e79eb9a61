#pragma once

// Dataset sources (seeded Gaussian blobs, IDX image/label files) and the
// non-IID partitioners used by the simulator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "autorank/dataset.hpp"
#include "autorank/error.hpp"
#include "autorank/rng.hpp"

namespace autorank::data {

// --- Synthetic blobs ---------------------------------------------------------

struct BlobParams {
  std::size_t classes = 10;
  std::size_t per_class = 100;
  std::size_t dim = 16;
  double spread = 0.1;
  std::uint64_t seed = 42;
};

/// Class c is an isotropic Gaussian (stddev `spread`) around a center drawn
/// uniformly from [0,1]^dim; features are clipped to [0,1]. Samples are laid
/// out class by class.
inline LabeledDataset generate_blobs(const BlobParams& p) {
  if (p.classes == 0 || p.per_class == 0 || p.dim == 0)
    fail(ErrorCode::InvalidParams, "blob classes, per_class and dim must be positive");
  if (!(p.spread >= 0.0) || !std::isfinite(p.spread)) fail(ErrorCode::InvalidParams, "blob spread must be >= 0");

  Rng center_rng(derive_seed(p.seed, Stream::Data, {0}));
  Matrix centers(p.classes, p.dim);
  for (double& c : centers.flat()) c = center_rng.uniform();

  LabeledDataset ds;
  ds.classes = p.classes;
  ds.features = Matrix(p.classes * p.per_class, p.dim);
  ds.labels.resize(p.classes * p.per_class);
  Rng noise(derive_seed(p.seed, Stream::Data, {1}));
  for (std::size_t c = 0; c < p.classes; ++c) {
    for (std::size_t s = 0; s < p.per_class; ++s) {
      const std::size_t row = c * p.per_class + s;
      ds.labels[row] = static_cast<int>(c);
      auto dst = ds.features.row(row);
      for (std::size_t j = 0; j < p.dim; ++j) {
        const double v = p.spread == 0.0 ? centers(c, j) : centers(c, j) + p.spread * noise.normal();
        dst[j] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return ds;
}

inline LabeledDataset generate_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double spread,
                                     std::uint64_t seed) {
  return generate_blobs(BlobParams{classes, per_class, dim, spread, seed});
}

// --- IDX ---------------------------------------------------------------------

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

namespace detail {

inline std::uint32_t read_be32(std::span<const unsigned char> bytes, std::size_t offset, const char* what) {
  if (offset + 4 > bytes.size()) fail(ErrorCode::TruncatedFile, std::string(what) + ": header truncated");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

inline std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Parses an IDX image file (magic 0x00000803: count, rows, cols, then raw
/// bytes) and an IDX label file (magic 0x00000801: count, then raw bytes).
/// Pixels are scaled by 1/255; classes = max label + 1.
inline LabeledDataset parse_idx(std::span<const unsigned char> images, std::span<const unsigned char> labels) {
  const auto img_magic = detail::read_be32(images, 0, "images");
  if (img_magic != kIdxImagesMagic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "images: magic 0x%08x, expected 0x%08x", img_magic, kIdxImagesMagic);
    fail(ErrorCode::BadMagic, buf);
  }
  const auto lbl_magic = detail::read_be32(labels, 0, "labels");
  if (lbl_magic != kIdxLabelsMagic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "labels: magic 0x%08x, expected 0x%08x", lbl_magic, kIdxLabelsMagic);
    fail(ErrorCode::BadMagic, buf);
  }
  const std::size_t n_images = detail::read_be32(images, 4, "images");
  const std::size_t rows = detail::read_be32(images, 8, "images");
  const std::size_t cols = detail::read_be32(images, 12, "images");
  const std::size_t n_labels = detail::read_be32(labels, 4, "labels");

  const std::size_t pixels = rows * cols;
  if (images.size() < 16 || (pixels > 0 && n_images > (images.size() - 16) / pixels))
    fail(ErrorCode::TruncatedFile, "images: header promises " + std::to_string(n_images) + " images of " +
                                       std::to_string(pixels) + " bytes, file has " +
                                       std::to_string(images.size() - 16) + " payload bytes");
  if (labels.size() < 8 + n_labels)
    fail(ErrorCode::TruncatedFile, "labels: header promises " + std::to_string(n_labels) + " labels");
  if (n_images != n_labels)
    fail(ErrorCode::CountMismatch,
         std::to_string(n_images) + " images but " + std::to_string(n_labels) + " labels");
  if (n_images == 0 || pixels == 0) fail(ErrorCode::EmptyDataset, "IDX files hold no samples");

  LabeledDataset ds;
  ds.features = Matrix(n_images, pixels);
  ds.labels.resize(n_images);
  int max_label = 0;
  for (std::size_t i = 0; i < n_images; ++i) {
    auto dst = ds.features.row(i);
    for (std::size_t j = 0; j < pixels; ++j) dst[j] = static_cast<double>(images[16 + i * pixels + j]) / 255.0;
    ds.labels[i] = labels[8 + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.classes = static_cast<std::size_t>(max_label) + 1;
  return ds;
}

inline LabeledDataset read_idx(const std::string& images_path, const std::string& labels_path) {
  const auto images = detail::read_file(images_path);
  const auto labels = detail::read_file(labels_path);
  return parse_idx(images, labels);
}

// --- Splits and partitions ---------------------------------------------------

struct Shard {
  std::vector<std::size_t> indices;  // into the source dataset
  LabeledDataset data;
};

enum class Scheme { Staircase, TwoClient, Iid };

struct PartitionSpec {
  Scheme scheme = Scheme::Staircase;
  std::size_t clients = 10;
  std::size_t per_label_quota = 20;
  std::size_t anchor_multiplier = 5;
  std::uint64_t seed = 42;
};

namespace detail {

/// Per-label index pools, each shuffled by a (seed, label) stream.
inline std::map<int, std::vector<std::size_t>> label_pools(const LabeledDataset& ds, std::uint64_t seed, Stream tag) {
  std::map<int, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < ds.size(); ++i) pools[ds.labels[i]].push_back(i);
  for (auto& [label, idx] : pools) {
    Rng rng(derive_seed(seed, tag, {static_cast<std::uint64_t>(label)}));
    rng.shuffle(std::span<std::size_t>(idx));
  }
  return pools;
}

class PoolCursor {
 public:
  explicit PoolCursor(std::map<int, std::vector<std::size_t>> pools) : pools_(std::move(pools)) {}

  void take(int label, std::size_t count, std::vector<std::size_t>& out) {
    auto& pool = pools_[label];
    auto& pos = used_[label];
    if (pos + count > pool.size())
      fail(ErrorCode::InsufficientSamples, "label " + std::to_string(label) + " needs " + std::to_string(pos + count) +
                                               " samples, pool has " + std::to_string(pool.size()));
    out.insert(out.end(), pool.begin() + static_cast<std::ptrdiff_t>(pos),
               pool.begin() + static_cast<std::ptrdiff_t>(pos + count));
    pos += count;
  }

 private:
  std::map<int, std::vector<std::size_t>> pools_;
  std::map<int, std::size_t> used_;
};

inline Shard make_shard(const LabeledDataset& ds, std::vector<std::size_t> indices) {
  Shard s;
  s.data = ds.select(indices);
  s.indices = std::move(indices);
  return s;
}

}  // namespace detail

/// Stratified hold-out: per class, a seeded share of round(fraction * count)
/// samples goes to the second dataset. Returns {train, test}.
inline std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds, double test_fraction,
                                                                  std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) fail(ErrorCode::InvalidParams, "test fraction must be in [0, 1)");
  std::vector<std::size_t> train, test;
  for (const auto& [label, idx] : detail::label_pools(ds, seed, Stream::Split)) {
    const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(idx.size()) + 0.5));
    test.insert(test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {ds.select(train), ds.select(test)};
}

/// Keeps at most `per_class` seeded samples of every class.
inline LabeledDataset stratified_subset(const LabeledDataset& ds, std::size_t per_class, std::uint64_t seed) {
  std::vector<std::size_t> keep;
  for (const auto& [label, idx] : detail::label_pools(ds, seed, Stream::Split)) {
    const std::size_t n = std::min(per_class, idx.size());
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
  }
  std::sort(keep.begin(), keep.end());
  auto out = ds.select(keep);
  out.classes = ds.classes;
  return out;
}

/// Double-imbalance stair-case: client i < K-1 holds labels {0..i} with
/// `per_label_quota` samples each; client K-1 holds every label with
/// anchor_multiplier * per_label_quota samples each.
inline std::vector<Shard> partition_staircase(const LabeledDataset& ds, const PartitionSpec& spec) {
  if (spec.clients < 2) fail(ErrorCode::InvalidParams, "stair-case partition needs at least 2 clients");
  if (spec.per_label_quota == 0 || spec.anchor_multiplier == 0)
    fail(ErrorCode::InvalidParams, "quota and anchor multiplier must be >= 1");
  if (ds.classes == 0) fail(ErrorCode::InvalidParams, "dataset has no classes");
  detail::PoolCursor cursor(detail::label_pools(ds, spec.seed, Stream::Partition));
  std::vector<Shard> shards;
  for (std::size_t i = 0; i < spec.clients; ++i) {
    const bool anchor = i + 1 == spec.clients;
    const std::size_t n_labels = anchor ? ds.classes : std::min(i + 1, ds.classes);
    const std::size_t quota = anchor ? spec.anchor_multiplier * spec.per_label_quota : spec.per_label_quota;
    std::vector<std::size_t> idx;
    for (std::size_t l = 0; l < n_labels; ++l) cursor.take(static_cast<int>(l), quota, idx);
    shards.push_back(detail::make_shard(ds, std::move(idx)));
  }
  return shards;
}

/// Client 0 holds all labels with `per_label` samples each; client 1 holds
/// label 0 only, with classes * per_label samples.
inline std::vector<Shard> partition_two_client(const LabeledDataset& ds, std::size_t per_label, std::uint64_t seed) {
  if (per_label == 0) fail(ErrorCode::InvalidParams, "per-label count must be >= 1");
  detail::PoolCursor cursor(detail::label_pools(ds, seed, Stream::Partition));
  std::vector<std::size_t> wide, narrow;
  for (std::size_t l = 0; l < ds.classes; ++l) cursor.take(static_cast<int>(l), per_label, wide);
  cursor.take(0, ds.classes * per_label, narrow);
  std::vector<Shard> shards;
  shards.push_back(detail::make_shard(ds, std::move(wide)));
  shards.push_back(detail::make_shard(ds, std::move(narrow)));
  return shards;
}

/// Uniform random split into K near-equal shards.
inline std::vector<Shard> partition_iid(const LabeledDataset& ds, std::size_t clients, std::uint64_t seed) {
  if (clients == 0) fail(ErrorCode::InvalidParams, "need at least one client");
  if (ds.size() < clients) fail(ErrorCode::InsufficientSamples, "fewer samples than clients");
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, Stream::Partition, {0xffff}));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<Shard> shards;
  for (std::size_t c = 0; c < clients; ++c) {
    const std::size_t begin = c * ds.size() / clients, end = (c + 1) * ds.size() / clients;
    shards.push_back(detail::make_shard(ds, {order.begin() + static_cast<std::ptrdiff_t>(begin),
                                             order.begin() + static_cast<std::ptrdiff_t>(end)}));
  }
  return shards;
}

inline std::vector<Shard> partition(const LabeledDataset& ds, const PartitionSpec& spec) {
  switch (spec.scheme) {
    case Scheme::Staircase: return partition_staircase(ds, spec);
    case Scheme::TwoClient:
      if (spec.clients != 2) fail(ErrorCode::InvalidParams, "two_client partition requires clients = 2");
      return partition_two_client(ds, spec.per_label_quota, spec.seed);
    case Scheme::Iid: return partition_iid(ds, spec.clients, spec.seed);
  }
  fail(ErrorCode::InvalidParams, "unknown partition scheme");
}

/// `label,f0,...,f{d-1}` with a header row.
inline std::string to_csv(const LabeledDataset& ds) {
  std::string out = "label";
  for (std::size_t j = 0; j < ds.dim(); ++j) out += ",f" + std::to_string(j);
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += std::to_string(ds.labels[i]);
    for (double v : ds.features.row(i)) {
      std::snprintf(buf, sizeof buf, ",%.9g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace autorank::data

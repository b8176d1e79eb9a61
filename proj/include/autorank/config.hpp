#pragma once

// Flat `key = value` experiment configuration (`#` starts a comment) and the
// run manifest written next to simulation outputs.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "autorank/error.hpp"
#include "autorank/fedsim.hpp"

namespace autorank::config {

inline constexpr const char* kToolVersion = "0.3.1";

/// Canonical keys with their meaning, in the order they are written back.
inline const std::vector<std::pair<std::string, std::string>>& keys() {
  static const std::vector<std::pair<std::string, std::string>> k = {
      {"seed", "master seed; every random stream derives from it (default 42)"},
      {"dataset", "blobs | idx"},
      {"blobs_classes", "synthetic: number of classes"},
      {"blobs_per_class", "synthetic: samples per class"},
      {"blobs_dim", "synthetic: feature dimension"},
      {"blobs_spread", "synthetic: per-feature Gaussian stddev"},
      {"idx_images", "idx: image file (relative paths resolve against the config file)"},
      {"idx_labels", "idx: label file"},
      {"subset_per_class", "keep at most this many samples per class (0 = all)"},
      {"test_fraction", "stratified held-out share used as the global test set"},
      {"partition", "staircase | two_client | iid"},
      {"clients", "number of clients K"},
      {"per_label_quota", "samples per (client, label); two_client: samples per label of client 0"},
      {"anchor_multiplier", "staircase: last client holds multiplier x quota per label"},
      {"mode", "autorank_finegrain | autorank_alt1 | autorank_alt2 | homogeneous | manual_per_label"},
      {"rank_ratio", "homogeneous mode: shared rank ratio in (0, 1]"},
      {"global_rank", "R_g for every layer (0 = per-layer break-even rank)"},
      {"floor", "minimum rank ratio rho in (0, 1]"},
      {"profile_epochs", "profiling epochs E before rank negotiation"},
      {"rounds", "federated rounds T"},
      {"local_epochs", "local epochs per round"},
      {"learning_rate", "SGD step size"},
      {"batch_size", "mini-batch size"},
      {"hidden", "comma-separated hidden layer widths"},
      {"train_base", "true | false: also train and average the base weights"},
  };
  return k;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) fail(ErrorCode::ConfigError, "key '" + key + "': cannot parse '" + v + "'");
  if constexpr (std::is_unsigned_v<T>) {
    if (!v.empty() && v.front() == '-') fail(ErrorCode::ConfigError, "key '" + key + "' must be non-negative");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::ConfigError, "key '" + key + "': expected true/false, got '" + v + "'");
}

inline std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Applies one key to a config. Unknown keys are errors.
inline void apply(fedsim::ExperimentConfig& cfg, const std::string& key, const std::string& value,
                  const std::filesystem::path& base_dir = {}) {
  using detail::parse_number;
  auto path_of = [&](const std::string& v) {
    std::filesystem::path p(v);
    return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
  };
  if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "dataset") {
    if (value == "blobs") cfg.dataset.kind = fedsim::DatasetKind::Blobs;
    else if (value == "idx") cfg.dataset.kind = fedsim::DatasetKind::Idx;
    else fail(ErrorCode::ConfigError, "dataset must be blobs or idx");
  } else if (key == "blobs_classes") cfg.dataset.blobs.classes = parse_number<std::size_t>(key, value);
  else if (key == "blobs_per_class") cfg.dataset.blobs.per_class = parse_number<std::size_t>(key, value);
  else if (key == "blobs_dim") cfg.dataset.blobs.dim = parse_number<std::size_t>(key, value);
  else if (key == "blobs_spread") cfg.dataset.blobs.spread = parse_number<double>(key, value);
  else if (key == "idx_images") cfg.dataset.idx_images = path_of(value);
  else if (key == "idx_labels") cfg.dataset.idx_labels = path_of(value);
  else if (key == "subset_per_class") cfg.dataset.subset_per_class = parse_number<std::size_t>(key, value);
  else if (key == "test_fraction") cfg.dataset.test_fraction = parse_number<double>(key, value);
  else if (key == "partition") {
    if (value == "staircase") cfg.partition.scheme = data::Scheme::Staircase;
    else if (value == "two_client") cfg.partition.scheme = data::Scheme::TwoClient;
    else if (value == "iid") cfg.partition.scheme = data::Scheme::Iid;
    else fail(ErrorCode::ConfigError, "partition must be staircase, two_client or iid");
  } else if (key == "clients") cfg.partition.clients = parse_number<std::size_t>(key, value);
  else if (key == "per_label_quota") cfg.partition.per_label_quota = parse_number<std::size_t>(key, value);
  else if (key == "anchor_multiplier") cfg.partition.anchor_multiplier = parse_number<std::size_t>(key, value);
  else if (key == "mode") {
    auto m = fedsim::parse_rank_mode(value);
    if (!m) fail(ErrorCode::ConfigError, "unknown mode '" + value + "'");
    cfg.mode = *m;
  } else if (key == "rank_ratio") cfg.rank_ratio = parse_number<double>(key, value);
  else if (key == "global_rank") cfg.global_rank = parse_number<int>(key, value);
  else if (key == "floor") cfg.floor = parse_number<double>(key, value);
  else if (key == "profile_epochs") cfg.profile_epochs = parse_number<std::size_t>(key, value);
  else if (key == "rounds") cfg.rounds = parse_number<std::size_t>(key, value);
  else if (key == "local_epochs") cfg.local_epochs = parse_number<std::size_t>(key, value);
  else if (key == "learning_rate") cfg.trainer.learning_rate = parse_number<double>(key, value);
  else if (key == "batch_size") cfg.trainer.batch_size = parse_number<std::size_t>(key, value);
  else if (key == "hidden") {
    cfg.hidden.clear();
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) cfg.hidden.push_back(parse_number<std::size_t>(key, detail::trim(item)));
  } else if (key == "train_base") cfg.train_base = detail::parse_bool(key, value);
  else fail(ErrorCode::ConfigError, "unknown key '" + key + "'");
}

inline fedsim::ExperimentConfig parse(const std::string& text, const std::filesystem::path& base_dir = {}) {
  fedsim::ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    apply(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), base_dir);
  }
  return cfg;
}

inline fedsim::ExperimentConfig load(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), std::filesystem::path(path).parent_path());
}

/// Canonical text for a (resolved) config: every key, no implicit defaults.
inline std::string to_text(const fedsim::ExperimentConfig& cfg) {
  using detail::real_text;
  std::map<std::string, std::string> v;
  v["seed"] = std::to_string(cfg.seed);
  v["dataset"] = cfg.dataset.kind == fedsim::DatasetKind::Blobs ? "blobs" : "idx";
  v["blobs_classes"] = std::to_string(cfg.dataset.blobs.classes);
  v["blobs_per_class"] = std::to_string(cfg.dataset.blobs.per_class);
  v["blobs_dim"] = std::to_string(cfg.dataset.blobs.dim);
  v["blobs_spread"] = real_text(cfg.dataset.blobs.spread);
  v["idx_images"] = cfg.dataset.idx_images;
  v["idx_labels"] = cfg.dataset.idx_labels;
  v["subset_per_class"] = std::to_string(cfg.dataset.subset_per_class);
  v["test_fraction"] = real_text(cfg.dataset.test_fraction);
  switch (cfg.partition.scheme) {
    case data::Scheme::Staircase: v["partition"] = "staircase"; break;
    case data::Scheme::TwoClient: v["partition"] = "two_client"; break;
    case data::Scheme::Iid: v["partition"] = "iid"; break;
  }
  v["clients"] = std::to_string(cfg.partition.clients);
  v["per_label_quota"] = std::to_string(cfg.partition.per_label_quota);
  v["anchor_multiplier"] = std::to_string(cfg.partition.anchor_multiplier);
  v["mode"] = fedsim::to_string(cfg.mode);
  v["rank_ratio"] = real_text(cfg.rank_ratio);
  v["global_rank"] = std::to_string(cfg.global_rank);
  v["floor"] = real_text(cfg.floor);
  v["profile_epochs"] = std::to_string(cfg.profile_epochs);
  v["rounds"] = std::to_string(cfg.rounds);
  v["local_epochs"] = std::to_string(cfg.local_epochs);
  v["learning_rate"] = real_text(cfg.trainer.learning_rate);
  v["batch_size"] = std::to_string(cfg.trainer.batch_size);
  std::string hidden;
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) hidden += (i ? "," : "") + std::to_string(cfg.hidden[i]);
  v["hidden"] = hidden;
  v["train_base"] = cfg.train_base ? "true" : "false";

  std::string out;
  for (const auto& [key, help] : keys()) out += key + " = " + v.at(key) + "\n";
  return out;
}

/// FNV-1a 64 over a file's bytes, as 16 hex digits.
inline std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (f.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunManifest {
  fedsim::ExperimentConfig config;  // resolved
  std::string tool_version = kToolVersion;
  std::vector<std::pair<std::string, std::string>> input_digests;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> results;
};

inline std::string to_text(const RunManifest& m) {
  std::string out = "# autorank run manifest\n";
  out += "tool_version = " + m.tool_version + "\n";
  out += to_text(m.config);
  for (const auto& [name, digest] : m.input_digests) out += "input_digest." + name + " = " + digest + "\n";
  for (const auto& name : m.outputs) out += "output = " + name + "\n";
  for (const auto& [k, v] : m.results) out += "result." + k + " = " + v + "\n";
  return out;
}

/// Reads `key = value` lines of a manifest (comments and repeats kept last-wins).
inline std::map<std::string, std::string> read_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace autorank::config

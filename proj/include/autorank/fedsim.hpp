#pragma once

// Federated simulation: profiling epochs on every client, server-side rank
// negotiation, then synchronous LoRA rounds with rank-heterogeneous
// aggregation and global evaluation after every round.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autorank/complexity.hpp"
#include "autorank/data.hpp"
#include "autorank/dataset.hpp"
#include "autorank/error.hpp"
#include "autorank/lora.hpp"
#include "autorank/nn.hpp"
#include "autorank/parallel.hpp"
#include "autorank/rank.hpp"
#include "autorank/rng.hpp"

namespace autorank::fedsim {

enum class RankMode { AutoRankFineGrain, AutoRankAlt1, AutoRankAlt2, Homogeneous, ManualPerLabel };

inline std::string to_string(RankMode m) {
  switch (m) {
    case RankMode::AutoRankFineGrain: return "autorank_finegrain";
    case RankMode::AutoRankAlt1: return "autorank_alt1";
    case RankMode::AutoRankAlt2: return "autorank_alt2";
    case RankMode::Homogeneous: return "homogeneous";
    case RankMode::ManualPerLabel: return "manual_per_label";
  }
  return "?";
}

inline std::optional<RankMode> parse_rank_mode(const std::string& s) {
  for (auto m : {RankMode::AutoRankFineGrain, RankMode::AutoRankAlt1, RankMode::AutoRankAlt2, RankMode::Homogeneous,
                 RankMode::ManualPerLabel})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

inline std::optional<complexity::MetricConfig> metric_config(RankMode m) {
  switch (m) {
    case RankMode::AutoRankFineGrain: return complexity::MetricConfig::FineGrain;
    case RankMode::AutoRankAlt1: return complexity::MetricConfig::Alternative1;
    case RankMode::AutoRankAlt2: return complexity::MetricConfig::Alternative2;
    default: return std::nullopt;
  }
}

enum class DatasetKind { Blobs, Idx };

struct DatasetSource {
  DatasetKind kind = DatasetKind::Blobs;
  data::BlobParams blobs;
  std::string idx_images;
  std::string idx_labels;
  std::size_t subset_per_class = 0;  // 0 keeps everything
  double test_fraction = 0.2;
};

struct ExperimentConfig {
  DatasetSource dataset;
  data::PartitionSpec partition;
  RankMode mode = RankMode::AutoRankFineGrain;
  double rank_ratio = 1.0;  // homogeneous mode
  int global_rank = 0;      // 0: per-layer break-even rank
  double floor = rank::kDefaultFloor;
  std::size_t profile_epochs = 5;
  std::size_t rounds = 100;
  std::size_t local_epochs = 1;
  nn::TrainingConfig trainer;
  std::vector<std::size_t> hidden{200, 200};
  bool train_base = false;
  std::uint64_t seed = 42;
  std::size_t threads = 1;  // execution only; never changes results
};

/// Pushes the master seed into every component seed.
inline ExperimentConfig resolve(ExperimentConfig cfg) {
  cfg.dataset.blobs.seed = cfg.seed;
  cfg.partition.seed = cfg.seed;
  cfg.trainer.seed = cfg.seed;
  cfg.trainer.epochs = cfg.local_epochs;
  if (cfg.partition.scheme == data::Scheme::TwoClient) cfg.partition.clients = 2;
  return cfg;
}

inline void validate(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& m) { fail(ErrorCode::ConfigError, m); };
  if (cfg.partition.clients < 1) bad("clients must be >= 1");
  if (cfg.partition.scheme != data::Scheme::Iid && cfg.partition.clients < 2) bad("non-IID schemes need >= 2 clients");
  if (!(cfg.floor > 0.0 && cfg.floor <= 1.0)) fail(ErrorCode::InvalidFloor, "floor must lie in (0, 1]");
  if (cfg.mode == RankMode::Homogeneous && !(cfg.rank_ratio > 0.0 && cfg.rank_ratio <= 1.0))
    bad("homogeneous rank_ratio must lie in (0, 1]");
  if (cfg.global_rank < 0) bad("global_rank must be >= 0");
  if (cfg.profile_epochs < 2) bad("profile_epochs must be >= 2");
  if (cfg.rounds < 1) bad("rounds must be >= 1");
  if (cfg.local_epochs < 1) bad("local_epochs must be >= 1");
  if (!(cfg.trainer.learning_rate > 0.0)) bad("learning_rate must be > 0");
  if (cfg.trainer.batch_size < 1) bad("batch_size must be >= 1");
  for (auto h : cfg.hidden)
    if (h == 0) bad("hidden layer widths must be positive");
  if (!(cfg.dataset.test_fraction > 0.0 && cfg.dataset.test_fraction < 1.0)) bad("test_fraction must lie in (0, 1)");
  if (cfg.dataset.kind == DatasetKind::Idx && (cfg.dataset.idx_images.empty() || cfg.dataset.idx_labels.empty()))
    bad("idx dataset needs idx_images and idx_labels");
}

struct ClientState {
  std::string id;
  LabeledDataset shard;
  complexity::LabelHistogram histogram;
  complexity::ComplexityReport report;
  rank::RankAssignment rank;
  std::vector<std::size_t> layer_ranks;

  double data_volume() const { return static_cast<double>(shard.size()); }
};

struct RoundRecord {
  std::size_t round = 0;
  double test_accuracy = 0.0;
  double test_loss = 0.0;
  std::vector<double> client_train_loss;
  double mean_client_train_loss = 0.0;
};

/// Everything fixed before the first round.
struct Federation {
  ExperimentConfig config;
  LabeledDataset train;
  LabeledDataset test;
  std::vector<ClientState> clients;
  nn::DenseNet base;
  std::vector<std::size_t> dims;
  std::vector<std::size_t> global_ranks;
  int reference_rank = 1;  // R_g used for the integer rank column
  std::vector<complexity::Warning> warnings;
};

inline LabeledDataset load_dataset(const DatasetSource& src) {
  LabeledDataset ds;
  if (src.kind == DatasetKind::Blobs) {
    ds = data::generate_blobs(src.blobs);
  } else {
    ds = data::read_idx(src.idx_images, src.idx_labels);
  }
  if (src.subset_per_class > 0) ds = data::stratified_subset(ds, src.subset_per_class, src.blobs.seed);
  return ds;
}

inline std::vector<std::size_t> global_ranks_for(const std::vector<std::size_t>& dims, int global_rank) {
  return global_rank > 0 ? lora::uniform_global_ranks(dims, static_cast<std::size_t>(global_rank))
                         : lora::default_global_ranks(dims);
}

/// Builds datasets, shards and the shared frozen base from the config.
inline Federation prepare(const ExperimentConfig& raw, std::optional<LabeledDataset> preloaded = std::nullopt) {
  Federation fed;
  fed.config = resolve(raw);
  validate(fed.config);
  const auto& cfg = fed.config;

  LabeledDataset source = preloaded ? std::move(*preloaded) : load_dataset(cfg.dataset);
  source.validate();
  auto [train, test] = data::stratified_split(source, cfg.dataset.test_fraction, cfg.seed);
  fed.train = std::move(train);
  fed.test = std::move(test);
  if (fed.test.size() == 0) fail(ErrorCode::InsufficientSamples, "held-out test split is empty");

  auto shards = data::partition(fed.train, cfg.partition);
  for (std::size_t i = 0; i < shards.size(); ++i) {
    ClientState c;
    c.id = std::to_string(i);
    c.shard = std::move(shards[i].data);
    c.histogram = complexity::LabelHistogram::from_labels(c.shard.labels);
    fed.clients.push_back(std::move(c));
  }

  fed.dims = {fed.train.dim()};
  fed.dims.insert(fed.dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  fed.dims.push_back(fed.train.classes);
  fed.base = nn::init_net(fed.dims, derive_seed(cfg.seed, Stream::Init, {0}));
  fed.global_ranks = global_ranks_for(fed.dims, cfg.global_rank);
  fed.reference_rank = static_cast<int>(*std::max_element(fed.global_ranks.begin(), fed.global_ranks.end()));
  return fed;
}

/// Trains a fresh full-parameter net for `profile_epochs` epochs on every
/// shard and derives the complexity report from the loss trace and labels.
/// All clients start from the same initialization; shuffling streams are
/// keyed by (seed, client, round 0, epoch).
inline std::vector<complexity::ComplexityReport> profile_clients(Federation& fed) {
  const auto& cfg = fed.config;
  std::vector<complexity::ComplexityReport> reports(fed.clients.size());
  std::vector<std::vector<complexity::Warning>> warnings(fed.clients.size());
  const auto init_seed = derive_seed(cfg.seed, Stream::Init, {1});
  parallel_for(fed.clients.size(), cfg.threads, [&](std::size_t i) {
    auto net = nn::init_net(fed.dims, init_seed);
    complexity::EpochLossTrace trace;
    for (std::size_t e = 0; e < cfg.profile_epochs; ++e) {
      nn::TrainingConfig tc = cfg.trainer;
      tc.seed = derive_seed(cfg.seed, Stream::Shuffle, {i, 0, e});
      trace.mean_epoch_losses.push_back(nn::train_epoch(net, fed.clients[i].shard, tc));
    }
    reports[i] = complexity::make_report(fed.clients[i].id, trace, fed.clients[i].histogram, &warnings[i]);
  });
  for (std::size_t i = 0; i < fed.clients.size(); ++i) {
    fed.clients[i].report = reports[i];
    for (auto& w : warnings[i]) fed.warnings.push_back({w.code, "client " + fed.clients[i].id + ": " + w.message});
  }
  return reports;
}

/// Manual baseline: ratio 0.1 per owned label, clamped to [floor, 1].
inline double manual_ratio(std::size_t labels_owned, double floor) {
  return std::clamp(static_cast<double>(labels_owned) / 10.0, floor, 1.0);
}

/// Server-side rank negotiation. AutoRank modes read the reports through
/// the CSV wire format, exactly as an external server would.
inline std::vector<rank::RankAssignment> negotiate_ranks(const std::vector<complexity::ComplexityReport>& reports,
                                                         const std::vector<std::size_t>& labels_owned, RankMode mode,
                                                         int reference_rank, double floor, double homogeneous_ratio) {
  if (reports.empty()) fail(ErrorCode::EmptyMatrix, "no reports to negotiate");
  rank::check_floor(floor);
  rank::check_global_rank(reference_rank);
  if (auto mc = metric_config(mode)) {
    const auto received = complexity::parse_csv(complexity::to_csv(reports));
    return rank::assign_ranks(complexity::build_decision_matrix(received, *mc), reference_rank, floor);
  }
  std::vector<rank::RankAssignment> out(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out[i].participant_id = reports[i].participant_id;
    if (mode == RankMode::Homogeneous) {
      out[i].rank_ratio = homogeneous_ratio;
    } else {
      if (labels_owned.size() != reports.size()) fail(ErrorCode::DimensionMismatch, "label counts missing");
      out[i].rank_ratio = manual_ratio(labels_owned[i], floor);
    }
    out[i].rank = rank::integer_rank(reference_rank, out[i].rank_ratio);
  }
  return out;
}

inline std::vector<rank::RankAssignment> negotiate_ranks(Federation& fed) {
  std::vector<complexity::ComplexityReport> reports;
  std::vector<std::size_t> owned;
  for (const auto& c : fed.clients) {
    reports.push_back(c.report);
    owned.push_back(c.histogram.present_labels());
  }
  const auto& cfg = fed.config;
  auto ranks = negotiate_ranks(reports, owned, cfg.mode, fed.reference_rank, cfg.floor, cfg.rank_ratio);
  for (std::size_t i = 0; i < fed.clients.size(); ++i) {
    fed.clients[i].rank = ranks[i];
    fed.clients[i].layer_ranks = lora::client_ranks(fed.global_ranks, ranks[i].rank_ratio);
  }
  return ranks;
}

inline lora::GlobalLoraState initial_global_state(const Federation& fed) {
  const auto net = lora::lora_init(fed.base, fed.global_ranks, derive_seed(fed.config.seed, Stream::Lora, {0}),
                                   fed.config.train_base);
  return {lora::state_of(net), fed.global_ranks};
}

inline nn::Evaluation evaluate_global(const Federation& fed, const lora::GlobalLoraState& global) {
  const auto net = lora::from_state(fed.base, lora::as_state(global), fed.config.train_base);
  return lora::evaluate(net, fed.test);
}

/// One synchronous round with full participation: broadcast-truncate, local
/// training, volume-weighted heterogeneous aggregation, global evaluation.
/// `round` is 1-based.
inline std::pair<lora::GlobalLoraState, RoundRecord> run_round(const Federation& fed,
                                                               const lora::GlobalLoraState& global,
                                                               std::size_t round) {
  const auto& cfg = fed.config;
  const std::size_t k = fed.clients.size();
  std::vector<lora::ClientContribution> contributions(k);
  std::vector<double> losses(k, 0.0);
  parallel_for(k, cfg.threads, [&](std::size_t i) {
    const auto& client = fed.clients[i];
    if (client.layer_ranks.empty()) fail(ErrorCode::ConfigError, "ranks must be negotiated before training");
    auto net = lora::from_state(fed.base, lora::broadcast_truncate(global, client.layer_ranks), cfg.train_base);
    double loss = 0.0;
    for (std::size_t e = 0; e < cfg.local_epochs; ++e) {
      nn::TrainingConfig tc = cfg.trainer;
      tc.seed = derive_seed(cfg.seed, Stream::Shuffle, {i, round, e});
      loss = lora::lora_train_epoch(net, client.shard, tc);
    }
    contributions[i] = {lora::state_of(net), client.data_volume()};
    losses[i] = loss;
  });

  auto next = lora::aggregate_hetero(contributions, fed.global_ranks);
  const auto eval = evaluate_global(fed, next);
  RoundRecord rec;
  rec.round = round;
  rec.test_accuracy = eval.accuracy;
  rec.test_loss = eval.loss;
  rec.client_train_loss = losses;
  double sum = 0.0;
  for (double l : losses) sum += l;
  rec.mean_client_train_loss = sum / static_cast<double>(k);
  return {std::move(next), rec};
}

inline std::size_t total_trainable_parameters(const Federation& fed) {
  std::size_t total = 0;
  for (const auto& c : fed.clients) total += lora::trainable_parameters(fed.dims, c.layer_ranks, fed.config.train_base);
  return total;
}

/// Trailing moving average; the first window-1 points average what exists.
inline std::vector<double> smooth(const std::vector<double>& xs, std::size_t window = 10) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
    double s = 0.0;
    for (std::size_t j = lo; j <= i; ++j) s += xs[j];
    out[i] = s / static_cast<double>(i - lo + 1);
  }
  return out;
}

struct ExperimentResult {
  ExperimentConfig config;  // resolved
  std::vector<complexity::ComplexityReport> reports;
  std::vector<rank::RankAssignment> ranks;
  std::vector<std::vector<std::size_t>> layer_ranks;
  std::vector<RoundRecord> records;
  std::vector<std::vector<double>> similarity;
  std::vector<std::size_t> dims;
  std::vector<std::size_t> global_ranks;
  std::size_t total_trainable_params = 0;
  lora::GlobalLoraState final_state;
  std::vector<complexity::Warning> warnings;

  std::vector<double> accuracies() const {
    std::vector<double> a;
    for (const auto& r : records) a.push_back(r.test_accuracy);
    return a;
  }
};

/// profile -> negotiate (once) -> T rounds.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       std::optional<LabeledDataset> preloaded = std::nullopt) {
  auto fed = prepare(config, std::move(preloaded));
  ExperimentResult res;
  res.reports = profile_clients(fed);
  res.ranks = negotiate_ranks(fed);
  res.similarity = rank::rank_similarity_matrix(res.ranks);
  for (const auto& c : fed.clients) res.layer_ranks.push_back(c.layer_ranks);

  auto global = initial_global_state(fed);
  for (std::size_t t = 1; t <= fed.config.rounds; ++t) {
    auto [next, rec] = run_round(fed, global, t);
    global = std::move(next);
    res.records.push_back(std::move(rec));
  }
  res.config = fed.config;
  res.dims = fed.dims;
  res.global_ranks = fed.global_ranks;
  res.total_trainable_params = total_trainable_parameters(fed);
  res.final_state = std::move(global);
  res.warnings = fed.warnings;
  return res;
}

// --- CSV artifacts -----------------------------------------------------------

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string learning_curve_csv(const std::vector<RoundRecord>& records) {
  std::string out = "round,test_accuracy,test_loss\n";
  for (const auto& r : records)
    out += std::to_string(r.round) + "," + format_real(r.test_accuracy) + "," + format_real(r.test_loss) + "\n";
  return out;
}

inline std::string smoothed_curve_csv(const std::vector<RoundRecord>& records, std::size_t window = 10) {
  std::vector<double> acc, loss;
  for (const auto& r : records) {
    acc.push_back(r.test_accuracy);
    loss.push_back(r.test_loss);
  }
  const auto sa = smooth(acc, window), sl = smooth(loss, window);
  std::string out = "round,test_accuracy,test_loss\n";
  for (std::size_t i = 0; i < records.size(); ++i)
    out += std::to_string(records[i].round) + "," + format_real(sa[i]) + "," + format_real(sl[i]) + "\n";
  return out;
}

inline std::string client_loss_csv(const std::vector<RoundRecord>& records) {
  std::string out = "round";
  const std::size_t k = records.empty() ? 0 : records.front().client_train_loss.size();
  for (std::size_t i = 0; i < k; ++i) out += ",client_" + std::to_string(i);
  out += ",mean\n";
  for (const auto& r : records) {
    out += std::to_string(r.round);
    for (double l : r.client_train_loss) out += "," + format_real(l);
    out += "," + format_real(r.mean_client_train_loss) + "\n";
  }
  return out;
}

}  // namespace autorank::fedsim

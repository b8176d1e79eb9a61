#pragma once

// Subcommand implementations behind the `autorank` executable. Each returns
// a process exit code: 0 success, 2 usage/config error, 3 data/runtime error.
// Artifacts are rendered fully in memory and only then written, each through
// a temporary file renamed into place, so failures leave no partial output.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "autorank/complexity.hpp"
#include "autorank/config.hpp"
#include "autorank/error.hpp"
#include "autorank/fedsim.hpp"
#include "autorank/lora.hpp"
#include "autorank/rank.hpp"

namespace autorank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidFloor:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidSpec:
      return kExitUsage;
    default:
      return kExitData;
  }
}

using Artifacts = std::vector<std::pair<std::string, std::string>>;  // file name -> content

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) fail(ErrorCode::IoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot move " + tmp.string() + " into place: " + ec.message());
}

/// Stages every artifact as a temp file first, then renames them all.
inline void write_artifacts(const std::filesystem::path& dir, const Artifacts& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> staged;
  try {
    for (const auto& [name, content] : files) {
      auto tmp = dir / (name + ".tmp");
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) fail(ErrorCode::IoError, "cannot write " + tmp.string());
      f.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!f) fail(ErrorCode::IoError, "failed writing " + tmp.string());
      staged.push_back(tmp);
    }
  } catch (...) {
    for (const auto& p : staged) std::filesystem::remove(p, ec);
    throw;
  }
  for (const auto& [name, content] : files) {
    std::filesystem::rename(dir / (name + ".tmp"), dir / name, ec);
    if (ec) fail(ErrorCode::IoError, "cannot move " + name + " into place: " + ec.message());
  }
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Runs `body`, translating library errors into exit codes on `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

// --- profile -----------------------------------------------------------------

struct ProfileOptions {
  std::string config_path;
  std::string out = "complexity.csv";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

inline int cmd_profile(const ProfileOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = config::load(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    cfg.threads = opt.threads;
    auto fed = fedsim::prepare(cfg);
    const auto reports = fedsim::profile_clients(fed);
    for (const auto& w : fed.warnings) err << "warning: " << w.message << "\n";
    write_atomic(opt.out, complexity::to_csv(reports));
    out << "wrote " << reports.size() << " complexity reports to " << opt.out << "\n";
  });
}

// --- assign-ranks --------------------------------------------------------------

struct AssignRanksOptions {
  std::string input;
  int global_rank = 16;
  double floor = rank::kDefaultFloor;
  std::string mode = "autorank_finegrain";
  double rank_ratio = 1.0;
  std::string out_dir = ".";
};

inline int cmd_assign_ranks(const AssignRanksOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    rank::check_floor(opt.floor);
    if (opt.global_rank < 1) fail(ErrorCode::InvalidParams, "--global-rank must be >= 1");
    const auto mode = fedsim::parse_rank_mode(opt.mode);
    if (!mode) fail(ErrorCode::ConfigError, "unknown mode '" + opt.mode + "'");
    if (*mode == fedsim::RankMode::ManualPerLabel)
      fail(ErrorCode::ConfigError, "manual_per_label needs label counts; use `simulate` instead");
    if (*mode == fedsim::RankMode::Homogeneous && !(opt.rank_ratio > 0.0 && opt.rank_ratio <= 1.0))
      fail(ErrorCode::ConfigError, "--rank-ratio must lie in (0, 1]");
    const auto reports = complexity::parse_csv(read_text(opt.input));
    const auto ranks = fedsim::negotiate_ranks(reports, {}, *mode, opt.global_rank, opt.floor, opt.rank_ratio);
    write_artifacts(opt.out_dir, {{"ranks.csv", rank::ranks_csv(reports, ranks)},
                                  {"similarity.csv", rank::similarity_csv(ranks)}});
    out << "assigned ranks for " << ranks.size() << " participants\n";
  });
}

// --- simulate ------------------------------------------------------------------

struct SimulateOptions {
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<std::size_t> rounds;
  std::optional<std::uint64_t> seed;
  std::optional<double> rank_ratio;
  std::size_t threads = 1;
  std::string out_dir = "run";
};

inline const std::vector<std::string>& simulate_outputs() {
  static const std::vector<std::string> names = {
      "complexity.csv", "ranks.csv", "similarity.csv", "learning_curve.csv", "learning_curve_smoothed.csv",
      "client_loss.csv", "final_global.lora", "manifest.txt"};
  return names;
}

/// Renders every simulation artifact for a finished experiment.
inline Artifacts render_simulation(const fedsim::ExperimentResult& res) {
  config::RunManifest manifest;
  manifest.config = res.config;
  if (res.config.dataset.kind == fedsim::DatasetKind::Idx) {
    manifest.input_digests.push_back({"idx_images", config::file_digest(res.config.dataset.idx_images)});
    manifest.input_digests.push_back({"idx_labels", config::file_digest(res.config.dataset.idx_labels)});
  }
  manifest.outputs = simulate_outputs();
  std::string layer_ranks;
  for (std::size_t l = 0; l < res.global_ranks.size(); ++l)
    layer_ranks += (l ? "," : "") + std::to_string(res.global_ranks[l]);
  manifest.results = {{"global_layer_ranks", layer_ranks},
                      {"total_trainable_params", std::to_string(res.total_trainable_params)}};
  for (std::size_t i = 0; i < res.layer_ranks.size(); ++i) {
    std::string r;
    for (std::size_t l = 0; l < res.layer_ranks[i].size(); ++l) r += (l ? "," : "") + std::to_string(res.layer_ranks[i][l]);
    manifest.results.push_back({"client_layer_ranks." + res.ranks[i].participant_id, r});
  }
  for (const auto& w : res.warnings) manifest.results.push_back({"warning", w.message});

  return {
      {"complexity.csv", complexity::to_csv(res.reports)},
      {"ranks.csv", rank::ranks_csv(res.reports, res.ranks)},
      {"similarity.csv", rank::similarity_csv(res.ranks)},
      {"learning_curve.csv", fedsim::learning_curve_csv(res.records)},
      {"learning_curve_smoothed.csv", fedsim::smoothed_curve_csv(res.records)},
      {"client_loss.csv", fedsim::client_loss_csv(res.records)},
      {"final_global.lora", lora::encode_snapshot(lora::as_state(res.final_state))},
      {"manifest.txt", config::to_text(manifest)},
  };
}

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = config::load(opt.config_path);
    if (opt.mode) {
      auto m = fedsim::parse_rank_mode(*opt.mode);
      if (!m) fail(ErrorCode::ConfigError, "unknown mode '" + *opt.mode + "'");
      cfg.mode = *m;
    }
    if (opt.rounds) cfg.rounds = *opt.rounds;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.rank_ratio) cfg.rank_ratio = *opt.rank_ratio;
    cfg.threads = std::max<std::size_t>(opt.threads, 1);
    const auto res = fedsim::run_experiment(cfg);
    write_artifacts(opt.out_dir, render_simulation(res));
    double best = 0.0;
    for (const auto& r : res.records) best = std::max(best, r.test_accuracy);
    out << fedsim::to_string(res.config.mode) << ": " << res.records.size() << " rounds, best test accuracy "
        << fedsim::format_real(best) << ", trainable params " << res.total_trainable_params << " -> " << opt.out_dir
        << "\n";
  });
}

// --- report --------------------------------------------------------------------

struct ReportOptions {
  std::vector<std::string> run_dirs;
  std::string out_dir = ".";
};

struct RunSummary {
  std::string name;
  std::size_t rounds = 0;
  double best_accuracy = 0.0;
  std::size_t best_round = 0;
  double best_smoothed_accuracy = 0.0;
  std::size_t best_smoothed_round = 0;
  std::size_t trainable_params = 0;
  std::vector<double> smoothed;
};

inline std::vector<double> read_curve_accuracy(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "round,test_accuracy,test_loss")
    fail(ErrorCode::ParseError, path.string() + ": unexpected header");
  std::vector<double> acc;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find(','), b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) fail(ErrorCode::ParseError, path.string() + ": bad row");
    acc.push_back(complexity::detail::parse_real(line.substr(a + 1, b - a - 1), acc.size() + 2));
  }
  if (acc.empty()) fail(ErrorCode::ParseError, path.string() + ": no rounds");
  return acc;
}

inline RunSummary summarize_run(const std::filesystem::path& dir) {
  RunSummary s;
  s.name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  const auto acc = read_curve_accuracy(dir / "learning_curve.csv");
  const auto manifest = config::read_key_values(read_text(dir / "manifest.txt"));
  const auto it = manifest.find("result.total_trainable_params");
  if (it == manifest.end()) fail(ErrorCode::ParseError, (dir / "manifest.txt").string() + ": no parameter total");
  s.trainable_params = static_cast<std::size_t>(std::stoull(it->second));
  s.rounds = acc.size();
  s.smoothed = fedsim::smooth(acc, 10);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] > s.best_accuracy || i == 0) {
      s.best_accuracy = acc[i];
      s.best_round = i + 1;
    }
    if (s.smoothed[i] > s.best_smoothed_accuracy || i == 0) {
      s.best_smoothed_accuracy = s.smoothed[i];
      s.best_smoothed_round = i + 1;
    }
  }
  return s;
}

inline int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.run_dirs.empty()) fail(ErrorCode::ConfigError, "report needs at least one run directory");
    std::vector<RunSummary> runs;
    for (const auto& d : opt.run_dirs) runs.push_back(summarize_run(d));

    std::string csv = "run,rounds,best_accuracy,best_round,best_smoothed_accuracy,best_smoothed_round,trainable_params\n";
    std::size_t max_rounds = 0;
    for (const auto& r : runs) {
      csv += r.name + "," + std::to_string(r.rounds) + "," + fedsim::format_real(r.best_accuracy) + "," +
             std::to_string(r.best_round) + "," + fedsim::format_real(r.best_smoothed_accuracy) + "," +
             std::to_string(r.best_smoothed_round) + "," + std::to_string(r.trainable_params) + "\n";
      max_rounds = std::max(max_rounds, r.rounds);
    }
    std::string curves = "round";
    for (const auto& r : runs) curves += "," + r.name;
    curves += "\n";
    for (std::size_t t = 0; t < max_rounds; ++t) {
      curves += std::to_string(t + 1);
      for (const auto& r : runs) curves += "," + (t < r.smoothed.size() ? fedsim::format_real(r.smoothed[t]) : "");
      curves += "\n";
    }
    write_artifacts(opt.out_dir, {{"report.csv", csv}, {"report_smoothed.csv", curves}});

    char line[256];
    std::snprintf(line, sizeof line, "%-24s %7s %9s %6s %12s %6s %14s\n", "run", "rounds", "best_acc", "round",
                  "best_smooth", "round", "trainable");
    out << line;
    for (const auto& r : runs) {
      std::snprintf(line, sizeof line, "%-24s %7zu %9.4f %6zu %12.4f %6zu %14zu\n", r.name.c_str(), r.rounds,
                    r.best_accuracy, r.best_round, r.best_smoothed_accuracy, r.best_smoothed_round, r.trainable_params);
      out << line;
    }
  });
}

}  // namespace autorank::cli

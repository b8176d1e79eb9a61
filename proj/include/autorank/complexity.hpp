#pragma once

// Per-participant data-complexity metrics: loss-trace entropy, the
// volume-weighted label entropy, Gini-Simpson diversity and log data volume,
// plus the decision-matrix layouts used by the server.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "autorank/error.hpp"
#include "autorank/mcda.hpp"

namespace autorank::complexity {

struct EpochLossTrace {
  std::vector<double> mean_epoch_losses;
};

struct LabelHistogram {
  std::map<int, std::uint64_t> counts;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [label, n] : counts) t += n;
    return t;
  }

  std::size_t present_labels() const {
    std::size_t k = 0;
    for (const auto& [label, n] : counts) k += n > 0 ? 1 : 0;
    return k;
  }

  template <typename Labels>
  static LabelHistogram from_labels(const Labels& labels) {
    LabelHistogram h;
    for (int l : labels) ++h.counts[l];
    return h;
  }
};

struct ComplexityReport {
  std::string participant_id;
  double loss_entropy = 0.0;
  double label_entropy = 0.0;
  double gini_simpson = 0.0;
  double log_data_volume = 0.0;

  bool operator==(const ComplexityReport&) const = default;
};

struct Warning {
  ErrorCode code;
  std::string message;
};

enum class MetricConfig { FineGrain, Alternative1, Alternative2 };

/// Entropy (natural log) of the normalized loss trace. A trace that sums to
/// zero yields 0 and, if a sink is supplied, an AllZeroTrace warning.
inline double loss_entropy(const EpochLossTrace& trace, std::vector<Warning>* warnings = nullptr) {
  const auto& losses = trace.mean_epoch_losses;
  if (losses.size() < 2) fail(ErrorCode::InvalidInput, "loss trace needs at least 2 epochs");
  for (double l : losses) {
    if (!std::isfinite(l)) fail(ErrorCode::NonFiniteInput, "loss trace contains NaN/Inf");
    if (l < 0.0) fail(ErrorCode::InvalidInput, "loss trace contains a negative loss");
  }
  const double total = ordered_sum(losses);
  if (total == 0.0) {
    if (warnings) warnings->push_back({ErrorCode::AllZeroTrace, "loss trace sums to zero; entropy set to 0"});
    return 0.0;
  }
  double h = 0.0;
  for (double l : losses) {
    if (l == 0.0) continue;
    const double p = l / total;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

inline void validate(const LabelHistogram& hist) {
  if (hist.total() == 0) fail(ErrorCode::EmptyHistogram, "label histogram has no samples");
}

/// H(Y) = -ln(total) * sum p ln p over labels with a positive count.
inline double label_entropy(const LabelHistogram& hist) {
  validate(hist);
  const double total = static_cast<double>(hist.total());
  double plogp = 0.0;
  for (const auto& [label, n] : hist.counts) {
    if (n == 0) continue;
    const double p = static_cast<double>(n) / total;
    plogp += p * std::log(p);
  }
  return -std::log(total) * plogp + 0.0;  // +0.0 turns -0 into 0
}

inline double gini_simpson(const LabelHistogram& hist) {
  validate(hist);
  const double total = static_cast<double>(hist.total());
  double sq = 0.0;
  for (const auto& [label, n] : hist.counts) {
    const double p = static_cast<double>(n) / total;
    sq += p * p;
  }
  return 1.0 - sq;
}

inline double log_data_volume(const LabelHistogram& hist) {
  validate(hist);
  return std::log(static_cast<double>(hist.total()));
}

inline ComplexityReport make_report(std::string participant_id, const EpochLossTrace& trace,
                                    const LabelHistogram& hist, std::vector<Warning>* warnings = nullptr) {
  ComplexityReport r;
  r.participant_id = std::move(participant_id);
  r.loss_entropy = loss_entropy(trace, warnings);
  r.label_entropy = label_entropy(hist);
  r.gini_simpson = gini_simpson(hist);
  r.log_data_volume = log_data_volume(hist);
  return r;
}

inline std::string to_string(MetricConfig c) {
  switch (c) {
    case MetricConfig::FineGrain: return "finegrain";
    case MetricConfig::Alternative1: return "alt1";
    case MetricConfig::Alternative2: return "alt2";
  }
  return "finegrain";
}

/// Column layouts:
///   FineGrain    -> [label entropy, gini-simpson, loss entropy * LDV]
///   Alternative1 -> [loss entropy * LDV]
///   Alternative2 -> [loss entropy, LDV]
inline mcda::DecisionMatrix build_decision_matrix(const std::vector<ComplexityReport>& reports, MetricConfig config) {
  if (reports.empty()) fail(ErrorCode::EmptyMatrix, "no complexity reports");
  std::set<std::string> seen;
  for (const auto& r : reports)
    if (!seen.insert(r.participant_id).second)
      fail(ErrorCode::InconsistentReports, "duplicate participant id '" + r.participant_id + "'");

  mcda::DecisionMatrix dm;
  std::vector<std::vector<double>> rows;
  for (const auto& r : reports) {
    dm.participant_ids.push_back(r.participant_id);
    const double le_ldv = r.loss_entropy * r.log_data_volume;
    switch (config) {
      case MetricConfig::FineGrain: rows.push_back({r.label_entropy, r.gini_simpson, le_ldv}); break;
      case MetricConfig::Alternative1: rows.push_back({le_ldv}); break;
      case MetricConfig::Alternative2: rows.push_back({r.loss_entropy, r.log_data_volume}); break;
    }
  }
  switch (config) {
    case MetricConfig::FineGrain: dm.metric_names = {"label_entropy", "gini_simpson", "le_x_ldv"}; break;
    case MetricConfig::Alternative1: dm.metric_names = {"le_x_ldv"}; break;
    case MetricConfig::Alternative2: dm.metric_names = {"loss_entropy", "log_data_volume"}; break;
  }
  dm.values = Matrix::from_rows(rows);
  return dm;
}

// --- CSV wire format --------------------------------------------------------

inline constexpr const char* kReportCsvHeader = "participant_id,loss_entropy,label_entropy,gini_simpson,log_data_volume";

inline std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string to_csv_row(const ComplexityReport& r) {
  return r.participant_id + "," + format_g6(r.loss_entropy) + "," + format_g6(r.label_entropy) + "," +
         format_g6(r.gini_simpson) + "," + format_g6(r.log_data_volume);
}

inline std::string to_csv(const std::vector<ComplexityReport>& reports) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& r : reports) out += to_csv_row(r) + "\n";
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_real(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}

}  // namespace detail

inline ComplexityReport parse_csv_row(const std::string& line, std::size_t line_no = 0) {
  auto fields = detail::split_csv_line(line);
  if (fields.size() != 5)
    fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 5 fields, got " +
                                    std::to_string(fields.size()));
  ComplexityReport r;
  r.participant_id = fields[0];
  r.loss_entropy = detail::parse_real(fields[1], line_no);
  r.label_entropy = detail::parse_real(fields[2], line_no);
  r.gini_simpson = detail::parse_real(fields[3], line_no);
  r.log_data_volume = detail::parse_real(fields[4], line_no);
  return r;
}

inline std::vector<ComplexityReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ComplexityReport> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kReportCsvHeader) fail(ErrorCode::ParseError, "unexpected header: '" + line + "'");
      header_seen = true;
      continue;
    }
    out.push_back(parse_csv_row(line, line_no));
  }
  if (!header_seen) fail(ErrorCode::ParseError, "empty complexity CSV");
  return out;
}

}  // namespace autorank::complexity

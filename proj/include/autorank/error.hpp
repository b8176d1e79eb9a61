#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autorank {

enum class ErrorCode {
  NonFiniteInput,
  EmptyMatrix,
  DimensionMismatch,
  InvalidInput,
  AllZeroTrace,
  EmptyHistogram,
  InconsistentReports,
  InvalidFloor,
  InvalidSpec,
  EmptyShard,
  EmptyDataset,
  RankTooLarge,
  RankExceedsGlobal,
  ZeroTotalVolume,
  InvalidParams,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  InsufficientSamples,
  ConfigError,
  IoError,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::AllZeroTrace: return "AllZeroTrace";
    case ErrorCode::EmptyHistogram: return "EmptyHistogram";
    case ErrorCode::InconsistentReports: return "InconsistentReports";
    case ErrorCode::InvalidFloor: return "InvalidFloor";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyShard: return "EmptyShard";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::RankExceedsGlobal: return "RankExceedsGlobal";
    case ErrorCode::ZeroTotalVolume: return "ZeroTotalVolume";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace autorank

// errors.hpp — error taxonomy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace momlab {

enum class ErrorCode {
  // data errors
  MalformedRow,
  NonPositivePrice,
  DuplicateBar,
  EmptyDataset,
  UnknownInstrument,
  DateOutsideCalendar,
  NoPriceAvailable,
  StaleData,
  OverlappingInterval,
  EndBeforeStart,
  NoFlowData,
  EmptyUniverse,
  TooFewInstruments,
  EmptyExtremeGroup,
  InsufficientHistory,
  SeriesTooShort,
  ShapeMismatch,
  FileNotFound,
  IoError,
  // config errors
  SyntaxError,
  UnknownIndexToken,
  UnknownCriterion,
  InvalidParams,
  // everything else
  Internal,
};

// Category drives process exit codes: data -> 2, config -> 3, internal -> 4.
enum class ErrorCategory { Data = 2, Config = 3, Internal = 4 };

inline ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIndexToken:
    case ErrorCode::UnknownCriterion:
    case ErrorCode::InvalidParams:
      return ErrorCategory::Config;
    case ErrorCode::Internal:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Data;
  }
}

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorCategory error_category() const { return category(code_); }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::DuplicateBar: return "DuplicateBar";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnknownInstrument: return "UnknownInstrument";
    case ErrorCode::DateOutsideCalendar: return "DateOutsideCalendar";
    case ErrorCode::NoPriceAvailable: return "NoPriceAvailable";
    case ErrorCode::StaleData: return "StaleData";
    case ErrorCode::OverlappingInterval: return "OverlappingInterval";
    case ErrorCode::EndBeforeStart: return "EndBeforeStart";
    case ErrorCode::NoFlowData: return "NoFlowData";
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::TooFewInstruments: return "TooFewInstruments";
    case ErrorCode::EmptyExtremeGroup: return "EmptyExtremeGroup";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIndexToken: return "UnknownIndexToken";
    case ErrorCode::UnknownCriterion: return "UnknownCriterion";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

}  // namespace momlab

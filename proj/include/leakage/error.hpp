#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace leakage {

enum class ErrorCode {
  NegativeProbability,
  NotNormalized,
  DuplicateLabel,
  LabelMismatch,
  ShapeMismatch,
  AbsoluteContinuityViolated,
  NotConvexAtOne,
  DegenerateAlpha,
  NoSupport,
  EmptySupport,
  DivergentConjugate,
  NoFiniteNorm,
  NonMonotoneGenerator,
  AssumptionViolated,
  TooManyAtoms,
  NegativeLeakage,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AbsoluteContinuityViolated: return "AbsoluteContinuityViolated";
    case ErrorCode::NotConvexAtOne: return "NotConvexAtOne";
    case ErrorCode::DegenerateAlpha: return "DegenerateAlpha";
    case ErrorCode::NoSupport: return "NoSupport";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::DivergentConjugate: return "DivergentConjugate";
    case ErrorCode::NoFiniteNorm: return "NoFiniteNorm";
    case ErrorCode::NonMonotoneGenerator: return "NonMonotoneGenerator";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::TooManyAtoms: return "TooManyAtoms";
    case ErrorCode::NegativeLeakage: return "NegativeLeakage";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Domain error raised by every module. Carries the offending index (when
/// one exists) and the offending value (e.g. the sum for NotNormalized).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message,
        std::optional<std::size_t> index = std::nullopt,
        std::optional<double> value = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(std::move(message)),
        index_(index),
        value_(value) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix carried by what().
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<std::size_t> index_;
  std::optional<double> value_;
};

}  // namespace leakage

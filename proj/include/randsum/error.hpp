#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace randsum {

enum class Errc {
  EmptyWeights,
  NegativeWeight,
  NonFiniteWeight,
  ZeroTail,
  CapTooSmall,
  ExcessiveDeficit,
  NegativeX,
  SupportTooShort,
  DeficitDominatesWindow,
  SeriesTooShort,
  NoThresholdFound,
  SupportExceedsK,
  InvalidArgument,
  FileNotFound,
  ParseError,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyWeights: return "EmptyWeights";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::NonFiniteWeight: return "NonFiniteWeight";
    case Errc::ZeroTail: return "ZeroTail";
    case Errc::CapTooSmall: return "CapTooSmall";
    case Errc::ExcessiveDeficit: return "ExcessiveDeficit";
    case Errc::NegativeX: return "NegativeX";
    case Errc::SupportTooShort: return "SupportTooShort";
    case Errc::DeficitDominatesWindow: return "DeficitDominatesWindow";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::NoThresholdFound: return "NoThresholdFound";
    case Errc::SupportExceedsK: return "SupportExceedsK";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Domain error raised by every randsum operation. The code is stable and
/// is what the CLI reports in its machine-readable error object.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace randsum

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kinship {

enum class ErrorCode {
  MalformedRow,
  DuplicateAllele,
  MissingLocusForSubpop,
  ProportionSumOutOfTolerance,
  NonPositiveFrequency,
  MissingSampleSizes,
  InvalidMetadata,
  InvalidTheta,
  UnknownAllele,
  PanelMismatch,
  InvalidConfig,
  EmptySubpopSample,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Validation failures carry a code so the CLI can map them to exit codes and
// print a stable diagnostic name.
class KinshipError : public std::runtime_error {
 public:
  KinshipError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kinship

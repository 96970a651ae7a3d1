#include "kinship/error.hpp"

namespace kinship {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateAllele: return "DuplicateAllele";
    case ErrorCode::MissingLocusForSubpop: return "MissingLocusForSubpop";
    case ErrorCode::ProportionSumOutOfTolerance: return "ProportionSumOutOfTolerance";
    case ErrorCode::NonPositiveFrequency: return "NonPositiveFrequency";
    case ErrorCode::MissingSampleSizes: return "MissingSampleSizes";
    case ErrorCode::InvalidMetadata: return "InvalidMetadata";
    case ErrorCode::InvalidTheta: return "InvalidTheta";
    case ErrorCode::UnknownAllele: return "UnknownAllele";
    case ErrorCode::PanelMismatch: return "PanelMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptySubpopSample: return "EmptySubpopSample";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace kinship

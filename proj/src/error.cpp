#include "subflow/error.hpp"

namespace subflow {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kNegativeCapacity: return "NegativeCapacity";
    case Errc::kDanglingEndpoint: return "DanglingEndpoint";
    case Errc::kNegativeWeight: return "NegativeWeight";
    case Errc::kOverlappingForcedSets: return "OverlappingForcedSets";
    case Errc::kMalformedHeader: return "MalformedHeader";
    case Errc::kUnknownLineType: return "UnknownLineType";
    case Errc::kMissingTerminal: return "MissingTerminal";
    case Errc::kNoFiniteCut: return "NoFiniteCut";
    case Errc::kGroundSetTooLarge: return "GroundSetTooLarge";
    case Errc::kNonPositiveThreshold: return "NonPositiveThreshold";
    case Errc::kNonPositiveD: return "NonPositiveD";
    case Errc::kNonFiniteRatio: return "NonFiniteRatio";
    case Errc::kPositivityViolated: return "PositivityViolated";
    case Errc::kInvalidDims: return "InvalidDims";
    case Errc::kNonFiniteInput: return "NonFiniteInput";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kUnknownProfile: return "UnknownProfile";
    case Errc::kSchemaError: return "SchemaError";
    case Errc::kUsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace subflow

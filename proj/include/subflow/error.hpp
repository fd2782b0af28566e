#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subflow {

enum class Errc {
  kNegativeCapacity,
  kDanglingEndpoint,
  kNegativeWeight,
  kOverlappingForcedSets,
  kMalformedHeader,
  kUnknownLineType,
  kMissingTerminal,
  kNoFiniteCut,
  kGroundSetTooLarge,
  kNonPositiveThreshold,
  kNonPositiveD,
  kNonFiniteRatio,
  kPositivityViolated,
  kInvalidDims,
  kNonFiniteInput,
  kInvalidArgument,
  kUnknownProfile,
  kSchemaError,
  kUsageError,
};

std::string_view errc_name(Errc code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace subflow

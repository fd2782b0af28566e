#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subflow/apps.hpp"
#include "subflow/decomposition.hpp"
#include "subflow/graph.hpp"
#include "subflow/submodular.hpp"

namespace subflow::cli {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitInput = 2, kExitSolver = 3 };

/// Maps an error to the process exit code: 3 for failures inside a solver,
/// 2 for everything caused by the input.
int exit_code_for(Errc code);

// ---------------------------------------------------------------------------
// Problem files (see docs/formats.md). Set indices in files are 1-based.

/// A set function read from JSON: either graph-backed or an explicit table.
struct FunctionInput {
  std::optional<SubmodularSpec> spec;
  std::optional<TableFunction> table;

  int size() const { return spec ? spec->size() : table->size(); }
};

FlowNetwork network_from_json(const json& j);
FunctionInput function_from_json(const json& j);
ObjectiveVariant variant_from_json(const json& j);
Regularizer regularizer_from_json(const json& j, int n);
/// Reads version and kind; throws SchemaError when the file is unusable for
/// the expected kind.
void check_problem_header(const json& problem, const std::string& expected_kind);

/// SHA-256 of the canonical (sorted-key, compact) serialization.
std::string config_hash(const json& problem);

/// Throws SchemaError unless j has the ResultFile shape.
void validate_result(const json& j);

json to_json(const GroundSubset& s);  // 1-based

// ---------------------------------------------------------------------------

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Benchmark profiles; returns the CSV table (header row first).
std::string bench_csv(const std::string& profile, int jobs, std::uint64_t seed);

struct SelftestOptions {
  /// Multiplies every comparison tolerance; a negative value makes exact
  /// matches fail, which is how the self-test checks itself.
  double tolerance_scale = 1.0;
  std::uint64_t seed = 2024;
};

/// Runs the embedded oracle suites, printing one line per suite. Returns true
/// iff all pass.
bool selftest(const SelftestOptions& options, std::ostream& out);

}  // namespace subflow::cli

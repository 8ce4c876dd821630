#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "diffeo/cli/spec_file.hpp"

namespace diffeo::cli {

struct RunOptions {
  std::string suite = "all";
  double tol = kDefaultTolerance;
  double svd_tol = 1e-9;
  std::optional<double> dt;
  int jobs = 1;
  std::optional<int> max_degree;
  std::optional<Vector> point;
  std::optional<int> order;
  std::optional<std::string> field;
  std::optional<double> t_end;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailure = 1,
  kExitSpecParse = 2,
  kExitBasisDegenerate = 3,
  kExitToleranceAmbiguous = 4,
  kExitStepOutOfDomain = 5,
  kExitUnreachablePoint = 6,
};

int exit_code(ErrorCode code);

nlohmann::json run_verify(const SpecFile& spec, const RunOptions& options);
nlohmann::json run_cohomology(const SpecFile& spec, const RunOptions& options);
nlohmann::json run_flow(const SpecFile& spec, const RunOptions& options);
nlohmann::json run_tangent(const SpecFile& spec, const RunOptions& options);

nlohmann::json to_json(const CohomologyReport& report);
nlohmann::json to_json(const TangentReport& report);

// Loads the spec, runs `command` and returns the exit status. The report
// (including wall_clock_seconds) is always filled; library failures become an
// "error" entry. Human diagnostics go to `diagnostics`.
int run_command(const std::string& command, const std::filesystem::path& spec_path, const RunOptions& options,
                nlohmann::json& report, std::string& diagnostics);

}  // namespace diffeo::cli

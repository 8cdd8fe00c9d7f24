#pragma once

// Subcommand implementations behind tools/pseudomode. Each returns a process
// exit code and writes its artifacts into the configured output directory.

#include <string>
#include <vector>

#include <json.hpp>

#include "pseudomode/config.hpp"

namespace pseudomode::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,   // compare / qrt-check below threshold
  kInputError = 2,    // bad config, file, or domain
  kNumericalError = 3,
  kConvergenceError = 4,
  kDimensionError = 5,
};

/// Maps the library exception hierarchy onto exit codes.
int exit_code_for(const std::exception& e);

struct CompareArgs {
  std::string a;
  std::string b;
  double threshold = 0.02;
  std::string gate = "sz";
  bool interpolate = false;
  std::string report;  // empty: stdout only
};

int cmd_fit(const RunConfig& cfg);
int cmd_build(const RunConfig& cfg);
/// `modes_file` replaces the pipeline when non-empty.
int cmd_simulate(const RunConfig& cfg, const std::string& modes_file = {});
int cmd_heom(const RunConfig& cfg);
int cmd_dephasing_oracle(const RunConfig& cfg);
int cmd_compare(const CompareArgs& args);
/// Convergence sweep over fock.schedule for every config; configs run concurrently.
int cmd_sweep(const std::vector<RunConfig>& cfgs);
int cmd_qrt_check(const RunConfig& cfg);

/// Build metadata embedded in every report.
nlohmann::json provenance(const std::string& command, const RunConfig* cfg);

}  // namespace pseudomode::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "modquad/actuation.hpp"
#include "modquad/config.hpp"
#include "modquad/error.hpp"

namespace modquad {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitSchema = 2,
  kExitInapplicable = 3,
  kExitDiverged = 4,
};

int exit_code_for(ErrorCode code) noexcept;

enum class Format { kText, kJson };

/// Level names as accepted by MODQUAD_LOG (trace, debug, info, warn, error,
/// critical, off). Unknown names leave the default (warn).
void configure_logging(const char* level);

std::string analysis_json(const StructureConfig& config, const StructureModel& structure,
                          const ActuationAnalysis& analysis);
std::string analysis_text(const StructureConfig& config, const StructureModel& structure,
                          const ActuationAnalysis& analysis);

/// Prints the report; returns 3 when the design cannot hover.
int cmd_analyze(const std::string& config_path, Format format, std::ostream& out,
                std::ostream& err);

struct SimulateJob {
  std::string config_path;
  std::string output_path;
};

/// Runs each job (up to `jobs` at once) and writes telemetry plus its
/// sidecar. Returns the largest exit code over all jobs.
int cmd_simulate(const std::vector<SimulateJob>& jobs, int jobs_in_parallel, Format format,
                 std::ostream& out, std::ostream& err);

int cmd_metrics(const std::string& telemetry_path, double skip, Format format, std::ostream& out,
                std::ostream& err);

}  // namespace modquad

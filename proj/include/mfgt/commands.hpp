#pragma once

#include <ostream>
#include <string>

#include "mfgt/config.hpp"

namespace mfgt {

// Each command writes its artifacts plus the echoed config into out_dir and
// returns the process exit status.
int cmd_solve_hj(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_optimal_curves(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_cost_matrix(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_mfg(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_fenchel_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_continuity_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

// Recomputes every certificate number from the xi* stored in the report and
// compares within 1e-9. Returns 1 on mismatch. Throws
// Error(kDimensionMismatch) when the report grid differs from the config.
int cmd_verify(const RunConfig& cfg, const std::string& report_path, std::ostream& log);

}  // namespace mfgt

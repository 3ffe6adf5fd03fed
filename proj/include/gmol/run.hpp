#pragma once
// Command layer behind the gmol tool.

#include <ostream>
#include <string_view>

#include "gmol/config.hpp"

namespace gmol {

enum ExitCode : int {
  kExitOk = 0,
  kExitNumeric = 1,  // NoConvergence, TargetNotReached, NotAGradient, ...
  kExitConfig = 2,   // bad configuration, unreadable input, busy output directory
};

// Lines exported side by side for comparison with the published figures.
inline constexpr std::size_t kFigureLines[] = {1, 5, 10, 15, 19};

// Preset name or CSV path.
BoundaryData load_boundary(const RunConfig& config, const DomainGrid& grid);

// "solve", "fit", "verify-theorem" or "report", writing into config.outputs.
// Never throws; errors are written to log and mapped to an exit code.
int run(std::string_view command, const RunConfig& config, std::ostream& log);

}  // namespace gmol

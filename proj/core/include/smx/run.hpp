#pragma once

#include <vector>

#include "smx/config.hpp"
#include "smx/report.hpp"

namespace smx {

// Executes the configured command and returns its records in deterministic
// order (grid order for sweeps, trace order for learning curves). Writes
// the CSV/SVG outputs named in the config, when set. `checks_failed` is
// true when a verification-style record has pass=false (the CLI maps this
// to exit code 3 for contract runs).
struct RunOutcome {
    std::vector<ResultRecord> records;
    bool checks_failed = false;
};

RunOutcome run(const ExperimentConfig& config);

}  // namespace smx

#pragma once

#include <iosfwd>

#include "qclab/config.hpp"

namespace qclab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int no_fracture = 1;  ///< fracture demo converged instead
inline constexpr int violation = 2;    ///< hypothesis, admissibility or stall
inline constexpr int fracture = 3;     ///< a run that should converge broke
inline constexpr int config = 4;
}  // namespace exit_code

// Each command validates the config, writes its files under c.out and a
// summary to log, and returns its exit code. Every report.json carries the
// config text and its hash.

/// Landmarks and the shape-condition table.
int cmd_profile(const ExperimentConfig& c, std::ostream& log);
/// bands_alpha_{n}_{d}.csv for alpha in {1/8, 1/4, 1/2, 8/9}.
int cmd_bands(const ExperimentConfig& c, std::ostream& log);
/// Single load step to s = 1 from the undeformed chain; success means fracture.
int cmd_fracture(const ExperimentConfig& c, std::ostream& log);
/// Plans, executes and reports a continuation run.
int cmd_continue(const ExperimentConfig& c, std::ostream& log);
/// Plans only: plan.csv and plan.json.
int cmd_plan(const ExperimentConfig& c, std::ostream& log);

}  // namespace qclab

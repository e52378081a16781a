#pragma once

#include "sqg/cli/experiment.hpp"
#include "sqg/illposed/illposed.hpp"
#include "sqg/solver/solver.hpp"

namespace sqg::cli {

// Value of a normalized summability index (a number or "inf").
double exponent_value(const Json& v);
illposed::ExponentMap exponent_map(const Json& j);
// Forcing spec of an ill-posedness experiment for one N.
illposed::ForceSpec force_spec(const ExperimentConfig& config, int N);
solver::SolveConfig solver_config(const ExperimentConfig& config);

}  // namespace sqg::cli

#pragma once

#include "gcs/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace gcs {

using ParamMap = std::map<std::string, Real>;

// Closed-form reference expressions for the built-in scenarios. Every
// built-in run re-evaluates its registered set against the simulated
// quantities and fails on deviation. `x` is the sweep variable (time or
// measurement outcome, per formula); remaining inputs are named parameters.
Real regression_eval(const std::string& name, const ParamMap& params, Real x = 0.0);

std::vector<std::string> regression_names();
std::string regression_describe(const std::string& name);

}  // namespace gcs

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace adfit {

/// Scalar function of a parameter vector.
using Objective = std::function<double(std::span<const double>)>;

/// Full-gradient function of a parameter vector.
using GradientSource = std::function<std::vector<double>(std::span<const double>)>;

} // namespace adfit

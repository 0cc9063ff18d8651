#pragma once

#include "adfit/objective.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace adfit {

/// Step-size rule for central differences: h_i = base * max(1, |x_i|).
/// The default base, the cube root of machine epsilon, balances truncation
/// against round-off for a second-order-accurate difference.
struct StepRule {
    double base = std::cbrt(std::numeric_limits<double>::epsilon());
};

double step_size(const StepRule& rule, double x);

struct NumdiffResult {
    std::vector<double> gradient;
    long eval_count = 0; // exactly 2 * n
};

/// Central-difference gradient: gradient_i = (f(x + h_i e_i) - f(x - h_i e_i))
/// / (2 h_i), costing exactly two objective evaluations per parameter. The
/// caller's x is never modified. Throws NumericalDomainError naming the
/// parameter index if the objective is non-finite at a perturbed point.
NumdiffResult central_diff_gradient(const Objective& objective, std::span<const double> x,
                                    const StepRule& rule = {});

} // namespace adfit

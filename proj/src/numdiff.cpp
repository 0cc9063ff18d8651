#include "adfit/numdiff.hpp"

#include "adfit/errors.hpp"

#include <cmath>
#include <string>

namespace adfit {

double step_size(const StepRule& rule, double x) {
    return rule.base * std::max(1.0, std::abs(x));
}

NumdiffResult central_diff_gradient(const Objective& objective, std::span<const double> x,
                                    const StepRule& rule) {
    const std::size_t n = x.size();
    std::vector<double> work(x.begin(), x.end());
    NumdiffResult result;
    result.gradient.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double orig = work[i];
        const double h = step_size(rule, orig);

        work[i] = orig + h;
        const double f_plus = objective(work);
        ++result.eval_count;

        work[i] = orig - h;
        const double f_minus = objective(work);
        ++result.eval_count;

        work[i] = orig;

        if (!std::isfinite(f_plus) || !std::isfinite(f_minus))
            throw NumericalDomainError(
                "objective non-finite while perturbing parameter " + std::to_string(i), i);

        result.gradient[i] = (f_plus - f_minus) / (2.0 * h);
    }
    return result;
}

} // namespace adfit

#pragma once

#include "adfit/objective.hpp"

#include <functional>
#include <span>
#include <vector>

namespace adfit {

struct MinimizeOptions {
    double grad_tol = 1e-6;       // max-norm of the gradient at convergence
    int max_iterations = 1000;
    double armijo_c = 1e-4;       // sufficient-decrease coefficient, in (0,1)
    double backtrack_factor = 0.5; // step shrink per backtrack, in (0,1)
    double initial_step = 1.0;
    int max_backtracks = 60;
};

struct FitResult {
    std::vector<double> params_hat;
    double nll_min = 0.0;
    int n_iterations = 0;
    long n_fn_evals = 0;
    long n_grad_evals = 0;
    bool converged = false;
    double final_grad_norm = 0.0;
};

struct LineSearchResult {
    double step = 0.0;
    double f_new = 0.0;
    long n_evals = 0;
};

/// Armijo backtracking: the largest step initial_step * backtrack_factor^k
/// (k in [0, max_backtracks]) with f(x + step*d) <= f(x) + armijo_c * step *
/// g.d. Non-finite trial values count as failures and backtracking continues.
/// Throws Error for a non-descent direction and LineSearchError when the
/// backtracking budget is exhausted.
LineSearchResult line_search(const Objective& objective, std::span<const double> x,
                             std::span<const double> direction,
                             std::span<const double> gradient, double f_x,
                             const MinimizeOptions& opts);

struct IterationInfo {
    int iteration = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

/// BFGS with a dense inverse-Hessian approximation (initialized to the
/// identity) and Armijo backtracking. The curvature update is skipped when
/// s.y <= 1e-12 |s||y|, keeping the approximation positive definite.
/// Accepted objective values are non-increasing. A failed line search ends
/// the run with converged = false rather than throwing; a non-finite
/// objective or gradient at x0 is an immediate error.
FitResult minimize(const Objective& objective, const GradientSource& gradient_source,
                   std::vector<double> x0, const MinimizeOptions& opts = {},
                   const IterationObserver& observer = {});

} // namespace adfit

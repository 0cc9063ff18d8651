#include "adfit/minimize.hpp"

#include "adfit/errors.hpp"

#include <cmath>
#include <string>

namespace adfit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

void check_options(const MinimizeOptions& o) {
    if (!(o.grad_tol > 0) || o.max_iterations <= 0 || !(o.initial_step > 0) ||
        o.max_backtracks <= 0 || !(o.armijo_c > 0 && o.armijo_c < 1) ||
        !(o.backtrack_factor > 0 && o.backtrack_factor < 1))
        throw InvalidModelError("minimize: invalid options");
}

} // namespace

LineSearchResult line_search(const Objective& objective, std::span<const double> x,
                             std::span<const double> direction,
                             std::span<const double> gradient, double f_x,
                             const MinimizeOptions& opts) {
    const double gtd = dot(gradient, direction);
    if (!(gtd < 0.0))
        throw Error("line_search: direction is not a descent direction (g.d = " +
                    std::to_string(gtd) + ")");

    std::vector<double> trial(x.size());
    LineSearchResult result;
    double step = opts.initial_step;
    for (int k = 0; k <= opts.max_backtracks; ++k, step *= opts.backtrack_factor) {
        for (std::size_t i = 0; i < x.size(); ++i)
            trial[i] = x[i] + step * direction[i];
        const double f_trial = objective(trial);
        ++result.n_evals;
        if (std::isfinite(f_trial) && f_trial <= f_x + opts.armijo_c * step * gtd) {
            result.step = step;
            result.f_new = f_trial;
            return result;
        }
    }
    throw LineSearchError("line_search: no acceptable step within " +
                          std::to_string(opts.max_backtracks) + " backtracks");
}

FitResult minimize(const Objective& objective, const GradientSource& gradient_source,
                   std::vector<double> x0, const MinimizeOptions& opts,
                   const IterationObserver& observer) {
    check_options(opts);
    const std::size_t n = x0.size();

    FitResult result;
    std::vector<double> x = std::move(x0);

    double fx = objective(x);
    ++result.n_fn_evals;
    if (!std::isfinite(fx))
        throw Error("minimize: objective non-finite at the initial point");

    std::vector<double> g = gradient_source(x);
    ++result.n_grad_evals;
    if (g.size() != n || !all_finite(g))
        throw Error("minimize: gradient invalid at the initial point");

    // Dense inverse-Hessian approximation, row-major.
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        H[i * n + i] = 1.0;

    std::vector<double> d(n), x_new(n), g_new(n), s(n), y(n), Hy(n);

    double gnorm = max_norm(g);
    while (true) {
        if (gnorm <= opts.grad_tol) {
            result.converged = true;
            break;
        }
        if (result.n_iterations >= opts.max_iterations)
            break;

        // d = -H g
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const double* row = &H[i * n];
            for (std::size_t j = 0; j < n; ++j)
                acc += row[j] * g[j];
            d[i] = -acc;
        }
        if (!(dot(g, d) < 0.0)) {
            // Numerical loss of positive definiteness; restart from steepest
            // descent.
            for (std::size_t i = 0; i < n * n; ++i)
                H[i] = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                H[i * n + i] = 1.0;
                d[i] = -g[i];
            }
        }

        LineSearchResult ls;
        try {
            ls = line_search(objective, x, d, g, fx, opts);
        } catch (const LineSearchError&) {
            result.n_fn_evals += opts.max_backtracks + 1;
            break; // converged stays false: domain wall or bad scaling
        }
        result.n_fn_evals += ls.n_evals;

        for (std::size_t i = 0; i < n; ++i)
            x_new[i] = x[i] + ls.step * d[i];

        g_new = gradient_source(x_new);
        ++result.n_grad_evals;
        if (g_new.size() != n || !all_finite(g_new))
            break;

        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sty = dot(s, y);
        if (sty > 1e-12 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T, r = 1/s.y
            const double rho = 1.0 / sty;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                const double* row = &H[i * n];
                for (std::size_t j = 0; j < n; ++j)
                    acc += row[j] * y[j];
                Hy[i] = acc;
            }
            const double yHy = dot(y, Hy);
            const double c = rho * rho * yHy + rho;
            for (std::size_t i = 0; i < n; ++i) {
                double* row = &H[i * n];
                const double si = s[i];
                const double hyi = Hy[i];
                for (std::size_t j = 0; j < n; ++j)
                    row[j] += c * si * s[j] - rho * (si * Hy[j] + hyi * s[j]);
            }
        }

        x.swap(x_new);
        g.swap(g_new);
        fx = ls.f_new;
        gnorm = max_norm(g);
        ++result.n_iterations;
        if (observer)
            observer({result.n_iterations, fx, gnorm, ls.step});
    }

    result.params_hat = std::move(x);
    result.nll_min = fx;
    result.final_grad_norm = gnorm;
    return result;
}

} // namespace adfit

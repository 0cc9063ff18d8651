#include "adfit/minimize.hpp"

#include "adfit/errors.hpp"
#include "adfit/histfactory.hpp"
#include "adfit/numdiff.hpp"
#include "adfit/pipeline.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace adfit;

namespace {

const Objective quadratic = [](std::span<const double> x) {
    return (x[0] - 3.0) * (x[0] - 3.0);
};
const GradientSource quadratic_grad = [](std::span<const double> x) {
    return std::vector<double>{2.0 * (x[0] - 3.0)};
};

const Objective rosenbrock = [](std::span<const double> x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
};
const GradientSource rosenbrock_grad = [](std::span<const double> x) {
    const double b = x[1] - x[0] * x[0];
    return std::vector<double>{-2.0 * (1.0 - x[0]) - 400.0 * x[0] * b, 200.0 * b};
};

} // namespace

TEST_SUITE("minimize") {

TEST_CASE("line search backtracks as hand-executed on x^2") {
    // From x=1 along d=-2: the full step overshoots to x=-1 (no decrease),
    // half step lands exactly at the minimum.
    const std::vector<double> x{1.0};
    const std::vector<double> d{-2.0};
    const std::vector<double> g{2.0};
    const auto r = line_search(quadratic, x, d, g, 1.0, MinimizeOptions{});
    CHECK(r.step == 0.5);
    CHECK(r.f_new == 0.0);
    CHECK(r.n_evals == 2);
}

TEST_CASE("line search accepts the full step on a linear function") {
    const Objective linear = [](std::span<const double> x) { return x[0]; };
    const std::vector<double> x{0.0};
    const std::vector<double> d{-1.0};
    const std::vector<double> g{1.0};
    const auto r = line_search(linear, x, d, g, 0.0, MinimizeOptions{});
    CHECK(r.step == 1.0);
    CHECK(r.n_evals == 1);
}

TEST_CASE("line search rejects a non-descent direction") {
    const std::vector<double> x{1.0};
    const std::vector<double> d{2.0}; // +gradient
    const std::vector<double> g{2.0};
    CHECK_THROWS_AS((void)line_search(quadratic, x, d, g, 1.0, MinimizeOptions{}), Error);
}

TEST_CASE("quadratic converges to the analytic minimum") {
    const FitResult r = minimize(quadratic, quadratic_grad, {0.0});
    CHECK(r.converged);
    CHECK(r.params_hat[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.final_grad_norm <= 1e-6);
    CHECK(r.n_grad_evals == r.n_iterations + 1);
    CHECK(r.n_fn_evals >= r.n_iterations);
}

TEST_CASE("rosenbrock converges to (1, 1)") {
    const FitResult r = minimize(rosenbrock, rosenbrock_grad, {-1.2, 1.0});
    CHECK(r.converged);
    CHECK(r.params_hat[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.params_hat[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.n_grad_evals == r.n_iterations + 1);
}

TEST_CASE("accepted objective values are non-increasing") {
    std::vector<double> accepted;
    const IterationObserver observer = [&](const IterationInfo& info) {
        accepted.push_back(info.f);
    };
    const FitResult r =
        minimize(rosenbrock, rosenbrock_grad, {-1.2, 1.0}, MinimizeOptions{}, observer);
    REQUIRE(r.converged);
    REQUIRE(!accepted.empty());
    for (std::size_t i = 1; i < accepted.size(); ++i)
        CHECK(accepted[i] <= accepted[i - 1]);
}

TEST_CASE("asimov start point is already stationary") {
    const CompiledModel model =
        compile_model(testing::one_bin_spec(), testing::one_bin_asimov());
    const FitResult r = minimize(make_objective(model.objective),
                                 make_ad_gradient(model.gradient), model.layout.nominal());
    CHECK(r.converged);
    CHECK(r.n_iterations <= 2);
    for (double v : r.params_hat)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gradient sources agree on the fitted minimum") {
    const HistFactorySpec spec = default_spec(7);
    const ParamLayout layout{7};
    const Dataset data = asimov_dataset(spec, layout.nominal());
    const CompiledModel model = compile_model(spec, data);
    const Objective objective = make_objective(model.objective);

    std::vector<double> x0(layout.n_params(), 1.1);

    const FitResult ad_fit =
        minimize(objective, make_ad_gradient(model.gradient), x0);
    const FitResult num_fit =
        minimize(objective, make_numdiff_gradient(model.objective), x0);

    REQUIRE(ad_fit.converged);
    REQUIRE(num_fit.converged);
    CHECK(std::abs(ad_fit.nll_min - num_fit.nll_min) <= 1e-6);
    for (std::size_t i = 0; i < layout.n_params(); ++i)
        CHECK(std::abs(ad_fit.params_hat[i] - num_fit.params_hat[i]) <= 1e-3);
}

TEST_CASE("exhausted line search reports non-convergence") {
    // Finite only at the start point; every trial step is rejected.
    const Objective wall = [](std::span<const double> x) {
        if (x[0] == 0.0)
            return 1.0;
        return std::numeric_limits<double>::quiet_NaN();
    };
    const GradientSource wall_grad = [](std::span<const double>) {
        return std::vector<double>{1.0};
    };
    const FitResult r = minimize(wall, wall_grad, {0.0});
    CHECK(!r.converged);
    CHECK(r.params_hat[0] == 0.0);
    CHECK(r.n_iterations == 0);
}

TEST_CASE("iteration limit reports non-convergence") {
    MinimizeOptions opts;
    opts.max_iterations = 2;
    const FitResult r = minimize(rosenbrock, rosenbrock_grad, {-1.2, 1.0}, opts);
    CHECK(!r.converged);
    CHECK(r.n_iterations == 2);
}

TEST_CASE("non-finite start is an immediate error") {
    const Objective bad = [](std::span<const double>) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS((void)minimize(bad, quadratic_grad, {0.0}), Error);
}

TEST_CASE("invalid options are rejected") {
    MinimizeOptions opts;
    opts.backtrack_factor = 1.5;
    CHECK_THROWS_AS((void)minimize(quadratic, quadratic_grad, {0.0}, opts),
                    InvalidModelError);
}

} // TEST_SUITE

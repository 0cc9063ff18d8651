#include "adfit/pipeline.hpp"

#include "adfit/ad.hpp"
#include "adfit/errors.hpp"
#include "adfit/squash.hpp"

#include <chrono>
#include <limits>
#include <memory>

namespace adfit {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

CompiledModel compile_model(const HistFactorySpec& spec, const Dataset& data) {
    BuiltModel built = build_model(spec, data);

    CompiledModel compiled;
    compiled.layout = built.layout;

    auto t0 = std::chrono::steady_clock::now();
    compiled.objective = optimize(squash(built.graph, built.root));
    compiled.squash_seconds = seconds_since(t0);

    auto t1 = std::chrono::steady_clock::now();
    compiled.gradient = optimize(reverse_grad(compiled.objective));
    compiled.grad_transform_seconds = seconds_since(t1);

    return compiled;
}

namespace {

struct InterpState {
    Program program;
    std::vector<double> temps;
    std::vector<double> outputs;
};

} // namespace

Objective make_objective(Program program) {
    auto state = std::make_shared<InterpState>(InterpState{std::move(program), {}, {}});
    return [state](std::span<const double> params) -> double {
        try {
            interpret(state->program, params, state->temps, state->outputs);
        } catch (const NumericalDomainError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return state->outputs[0];
    };
}

GradientSource make_ad_gradient(Program gradient_program) {
    auto state =
        std::make_shared<InterpState>(InterpState{std::move(gradient_program), {}, {}});
    return [state](std::span<const double> params) {
        interpret(state->program, params, state->temps, state->outputs);
        return std::vector<double>(state->outputs.begin() + 1, state->outputs.end());
    };
}

GradientSource make_numdiff_gradient(Program objective_program, StepRule rule) {
    Objective objective = make_objective(std::move(objective_program));
    return [objective, rule](std::span<const double> params) {
        return central_diff_gradient(objective, params, rule).gradient;
    };
}

} // namespace adfit

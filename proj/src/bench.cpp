#include "adfit/bench.hpp"

#include "adfit/ad.hpp"
#include "adfit/errors.hpp"
#include "adfit/histfactory.hpp"
#include "adfit/minimize.hpp"
#include "adfit/numdiff.hpp"
#include "adfit/pipeline.hpp"
#include "adfit/squash.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>

namespace adfit {

const char* grad_mode_name(GradMode mode) {
    return mode == GradMode::Ad ? "ad" : "numdiff";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename Fn>
double mean_ms(int repeats, Fn&& fn) {
    fn(); // warm-up
    const auto start = Clock::now();
    for (int r = 0; r < repeats; ++r)
        fn();
    return ms_since(start) / repeats;
}

std::string double_text(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

BenchRecord run_one(std::size_t n_bins, GradMode mode, const HistFactorySpec& spec,
                    const Dataset& data, const BenchOptions& options) {
    BenchRecord record;
    record.n_bins = n_bins;
    record.mode = mode;

    // Build, timed: squash + passes, plus the gradient transform in AD mode.
    const auto build_start = Clock::now();
    BuiltModel built = build_model(spec, data);
    Program objective_prog = optimize(squash(built.graph, built.root));
    Program gradient_prog;
    if (mode == GradMode::Ad)
        gradient_prog = optimize(reverse_grad(objective_prog));
    record.build_ms = ms_since(build_start);
    record.n_params = built.layout.n_params();

    const Objective objective = make_objective(objective_prog);

    // Objective evaluations made from inside the gradient; lets us check
    // the 2*n accounting per central-difference call.
    auto grad_fn_calls = std::make_shared<long>(0);
    GradientSource gradient;
    if (mode == GradMode::Ad) {
        gradient = make_ad_gradient(gradient_prog);
    } else {
        Objective counted = [objective, grad_fn_calls](std::span<const double> x) {
            ++*grad_fn_calls;
            return objective(x);
        };
        gradient = [counted](std::span<const double> x) {
            return central_diff_gradient(counted, x, StepRule{}).gradient;
        };
    }

    // Representative gradient point: nominal, with mu pushed off the
    // stationary point.
    std::vector<double> grad_point = built.layout.nominal();
    grad_point[ParamLayout::mu] += 0.1;

    record.grad_ms_mean = mean_ms(options.repeats, [&] { gradient(grad_point); });
    record.eval_ms_mean = mean_ms(options.repeats, [&] { objective(grad_point); });

    MinimizeOptions mopts;
    mopts.grad_tol = options.tol;
    mopts.max_iterations = options.max_iterations;
    std::vector<double> x0(built.layout.n_params(), options.start_value);

    *grad_fn_calls = 0;
    const auto min_start = Clock::now();
    const FitResult fit = minimize(objective, gradient, std::move(x0), mopts);
    record.minimize_ms = ms_since(min_start);

    record.n_iterations = fit.n_iterations;
    record.n_fn_evals = fit.n_fn_evals;
    record.n_grad_evals = fit.n_grad_evals;
    record.final_nll = fit.nll_min;
    record.converged = fit.converged;

    if (mode == GradMode::Numdiff) {
        const long expected = fit.n_grad_evals * 2 * static_cast<long>(record.n_params);
        if (*grad_fn_calls != expected)
            throw Error("benchmark: central-difference accounting violated (" +
                        std::to_string(*grad_fn_calls) + " objective calls for " +
                        std::to_string(fit.n_grad_evals) + " gradients of " +
                        std::to_string(record.n_params) + " parameters)");
    }
    return record;
}

} // namespace

std::vector<BenchRecord> run_benchmark(const BenchOptions& options,
                                       const std::function<void(const BenchRecord&)>& on_record,
                                       std::ostream* progress) {
    if (options.repeats < 1)
        throw InvalidModelError("benchmark: repeats must be at least 1");

    std::vector<BenchRecord> records;
    for (std::size_t n_bins : options.bins) {
        const HistFactorySpec spec = default_spec(n_bins);
        const ParamLayout layout{n_bins};
        const Dataset data = asimov_dataset(spec, layout.nominal());

        for (GradMode mode : options.modes) {
            if (progress)
                *progress << "bench: bins=" << n_bins << " mode=" << grad_mode_name(mode)
                          << " ..." << std::endl;
            BenchRecord record = run_one(n_bins, mode, spec, data, options);
            if (progress)
                *progress << "bench: bins=" << n_bins << " mode=" << grad_mode_name(mode)
                          << " grad_ms=" << record.grad_ms_mean
                          << " minimize_ms=" << record.minimize_ms
                          << " iterations=" << record.n_iterations
                          << (record.converged ? "" : " (NOT CONVERGED)") << std::endl;
            if (on_record)
                on_record(record);
            records.push_back(std::move(record));
        }
    }
    return records;
}

const char* bench_csv_header() {
    return "n_bins,n_params,mode,build_ms,grad_ms_mean,eval_ms_mean,minimize_ms,"
           "n_iterations,n_fn_evals,n_grad_evals,final_nll,converged";
}

std::string bench_csv_row(const BenchRecord& r) {
    std::string row;
    row += std::to_string(r.n_bins);
    row += ',';
    row += std::to_string(r.n_params);
    row += ',';
    row += grad_mode_name(r.mode);
    row += ',';
    row += double_text(r.build_ms);
    row += ',';
    row += double_text(r.grad_ms_mean);
    row += ',';
    row += double_text(r.eval_ms_mean);
    row += ',';
    row += double_text(r.minimize_ms);
    row += ',';
    row += std::to_string(r.n_iterations);
    row += ',';
    row += std::to_string(r.n_fn_evals);
    row += ',';
    row += std::to_string(r.n_grad_evals);
    row += ',';
    row += double_text(r.final_nll);
    row += ',';
    row += r.converged ? "true" : "false";
    return row;
}

} // namespace adfit

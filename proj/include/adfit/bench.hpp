#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace adfit {

enum class GradMode { Ad, Numdiff };

const char* grad_mode_name(GradMode mode); // "ad" / "numdiff"

/// One benchmark row. build_ms covers squash plus (in AD mode) the gradient
/// transform; grad_ms_mean and eval_ms_mean are means over the repeat count
/// after one warm-up call.
struct BenchRecord {
    std::size_t n_bins = 0;
    std::size_t n_params = 0;
    GradMode mode = GradMode::Ad;
    double build_ms = 0.0;
    double grad_ms_mean = 0.0;
    double eval_ms_mean = 0.0;
    double minimize_ms = 0.0;
    int n_iterations = 0;
    long n_fn_evals = 0;
    long n_grad_evals = 0;
    double final_nll = 0.0;
    bool converged = false;
};

struct BenchOptions {
    std::vector<std::size_t> bins;
    std::vector<GradMode> modes{GradMode::Ad, GradMode::Numdiff};
    int repeats = 5;
    // Minimization settings. The start point is the nominal vector with
    // every entry moved to start_value, and the gradient tolerance is kept
    // loose enough that central differences can meet it at large n_params.
    double tol = 1e-5;
    int max_iterations = 5000;
    double start_value = 1.2;
};

/// Runs the benchmark matrix. Models are Asimov datasets over the default
/// templates; for a given bin count both modes see the same model. Gradient
/// timings are taken at the nominal point with mu shifted by +0.1 so the
/// work is representative rather than stationary. Strictly sequential.
/// `on_record`, when set, is called after each completed row (so partial
/// results can be persisted).
std::vector<BenchRecord> run_benchmark(
    const BenchOptions& options,
    const std::function<void(const BenchRecord&)>& on_record = {},
    std::ostream* progress = nullptr);

/// Exact CSV header for benchmark output.
const char* bench_csv_header();

std::string bench_csv_row(const BenchRecord& record);

} // namespace adfit

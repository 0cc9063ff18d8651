#include "adfit/cli.hpp"

#include "adfit/ad.hpp"
#include "adfit/bench.hpp"
#include "adfit/errors.hpp"
#include "adfit/histfactory.hpp"
#include "adfit/minimize.hpp"
#include "adfit/numdiff.hpp"
#include "adfit/pipeline.hpp"
#include "adfit/random.hpp"
#include "adfit/squash.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>

namespace adfit {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitNumerical = 3;

struct GenModelOpts {
    std::size_t bins = 1;
    std::string out_path;
    double tau = 100.0;
    double sigma_alpha = 0.1;
    std::uint64_t seed = 1;
    bool toy = false;
};

int cmd_gen_model(const GenModelOpts& o, std::ostream&, std::ostream& err) {
    ModelFile file;
    file.spec = default_spec(o.bins, o.sigma_alpha, o.tau);
    if (o.toy) {
        const ParamLayout layout{o.bins};
        file.observed = toy_dataset(file.spec, layout.nominal(), o.seed);
    }
    save_model_file(file, o.out_path);
    err << "wrote " << o.out_path << " (" << o.bins << " bins, "
        << (o.toy ? "toy observed" : "observed omitted: Asimov at nominal") << ")\n";
    return kExitOk;
}

struct FitOpts {
    std::string model_path;
    std::string mode = "ad";
    double tol = 1e-6;
    int max_iter = 1000;
};

int cmd_fit(const FitOpts& o, std::ostream& out, std::ostream& err) {
    const ModelFile file = load_model_file(o.model_path);
    const Dataset data = file.dataset();
    const CompiledModel model = compile_model(file.spec, data);

    const Objective objective = make_objective(model.objective);
    const GradientSource gradient = o.mode == "ad"
                                        ? make_ad_gradient(model.gradient)
                                        : make_numdiff_gradient(model.objective);

    MinimizeOptions opts;
    opts.grad_tol = o.tol;
    opts.max_iterations = o.max_iter;

    const FitResult fit = minimize(objective, gradient, model.layout.nominal(), opts);

    out << "mode: " << o.mode << "\n";
    out << "converged: " << (fit.converged ? "yes" : "no") << "\n";
    out << "iterations: " << fit.n_iterations << "\n";
    out << "function evaluations: " << fit.n_fn_evals << "\n";
    out << "gradient evaluations: " << fit.n_grad_evals << "\n";
    out << std::setprecision(17);
    out << "final gradient max-norm: " << fit.final_grad_norm << "\n";
    out << "final nll: " << fit.nll_min << "\n";
    const std::vector<std::string> names = model.layout.names();
    for (std::size_t i = 0; i < names.size(); ++i)
        out << "  " << names[i] << " = " << fit.params_hat[i] << "\n";

    if (!fit.converged) {
        err << "fit did not converge within " << o.max_iter << " iterations\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

struct GradCheckOpts {
    std::string model_path;
    int points = 100;
    std::uint64_t seed = 12345;
};

double relative_deviation(double a, double b) {
    const double diff = std::abs(a - b);
    if (diff == 0.0)
        return 0.0;
    return diff / std::max(std::abs(a), std::abs(b));
}

int cmd_grad_check(const GradCheckOpts& o, std::ostream& out, std::ostream& err) {
    const ModelFile file = load_model_file(o.model_path);
    const Dataset data = file.dataset();
    const CompiledModel model = compile_model(file.spec, data);
    const std::size_t n = model.layout.n_params();

    std::vector<Program> forward_programs;
    forward_programs.reserve(n);
    for (std::size_t p = 0; p < n; ++p)
        forward_programs.push_back(forward_derivative(model.objective, p));

    const GradientSource reverse = make_ad_gradient(model.gradient);
    const Objective objective = make_objective(model.objective);

    std::mt19937_64 rng(o.seed);
    std::vector<double> point(n);
    std::vector<double> temps, fwd_out;

    double max_fd_dev = 0.0;      // reverse vs central differences
    double max_forward_dev = 0.0; // reverse vs forward mode
    bool fd_ok = true;

    for (int pt = 0; pt < o.points; ++pt) {
        for (double& x : point)
            x = uniform(rng, 0.5, 1.5);

        const std::vector<double> rev = reverse(point);
        const NumdiffResult fd = central_diff_gradient(objective, point);

        for (std::size_t p = 0; p < n; ++p) {
            interpret(forward_programs[p], point, temps, fwd_out);
            max_forward_dev = std::max(max_forward_dev, relative_deviation(rev[p], fwd_out[1]));

            const double diff = std::abs(rev[p] - fd.gradient[p]);
            if (diff > 1e-8) { // absolute floor below which agreement counts
                max_fd_dev = std::max(max_fd_dev, relative_deviation(rev[p], fd.gradient[p]));
                fd_ok = fd_ok &&
                        diff <= 1e-5 * std::max(std::abs(rev[p]), std::abs(fd.gradient[p]));
            }
        }
    }

    const bool forward_ok = max_forward_dev <= 1e-10;
    out << "parameters: " << n << "  points: " << o.points << "  seed: " << o.seed << "\n";
    out << std::scientific << std::setprecision(3);
    out << "max reverse-vs-central-difference relative deviation: " << max_fd_dev << "\n";
    out << "max reverse-vs-forward relative deviation: " << max_forward_dev << "\n";
    out << "gradient check: " << (fd_ok && forward_ok ? "PASS" : "FAIL") << "\n";
    if (!(fd_ok && forward_ok)) {
        err << "gradient check failed\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

struct DumpIrOpts {
    std::string model_path;
    bool grad = false;
    bool opt = false;
};

int cmd_dump_ir(const DumpIrOpts& o, std::ostream& out, std::ostream&) {
    const ModelFile file = load_model_file(o.model_path);
    const Dataset data = file.dataset();
    BuiltModel built = build_model(file.spec, data);

    Program program = squash(built.graph, built.root);
    if (o.opt)
        program = optimize(program);
    if (o.grad) {
        program = reverse_grad(program);
        if (o.opt)
            program = optimize(program);
    }

    out << emit_source(program, o.grad ? "nll_grad" : "nll");
    const ProgramStats stats = program_stats(program);
    out << "; statements: " << stats.n_statements << "  params: " << program.n_params
        << "  outputs: " << program.outputs.size() << "\n";
    out << ";";
    for (Op op : {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Neg, Op::Log, Op::Exp})
        out << " " << op_name(op) << ": " << stats.count(op) << " ";
    out << "\n";
    return kExitOk;
}

struct BenchOpts {
    std::vector<std::size_t> bins;
    std::vector<std::string> modes{"ad", "numdiff"};
    int repeats = 5;
    std::string out_path;
    double tol = 1e-5;
    int max_iter = 5000;
};

int cmd_bench(const BenchOpts& o, std::ostream&, std::ostream& err) {
    BenchOptions options;
    options.bins = o.bins;
    options.modes.clear();
    for (const std::string& m : o.modes)
        options.modes.push_back(m == "ad" ? GradMode::Ad : GradMode::Numdiff);
    options.repeats = o.repeats;
    options.tol = o.tol;
    options.max_iterations = o.max_iter;

    std::ofstream csv(o.out_path);
    if (!csv)
        throw Error("cannot write benchmark output '" + o.out_path + "'");
    csv << bench_csv_header() << "\n";
    csv.flush();

    bool all_converged = true;
    run_benchmark(
        options,
        [&](const BenchRecord& record) {
            csv << bench_csv_row(record) << "\n";
            csv.flush();
            all_converged = all_converged && record.converged;
        },
        &err);

    if (!all_converged) {
        err << "at least one benchmark minimization did not converge\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Binned-likelihood fitting with program-level reverse-mode "
                 "automatic differentiation"};
    app.name("adfit");
    app.require_subcommand(1);

    GenModelOpts gen;
    CLI::App* gen_cmd = app.add_subcommand(
        "gen-model", "Write a model-spec JSON file using the built-in template shapes");
    gen_cmd->add_option("--bins", gen.bins, "Number of bins")->required()
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--out", gen.out_path, "Output JSON path")->required();
    gen_cmd->add_option("--tau", gen.tau, "Poisson constraint strength per gamma");
    gen_cmd->add_option("--sigma-alpha", gen.sigma_alpha, "Gaussian constraint width for alpha");
    gen_cmd->add_option("--seed", gen.seed, "Seed for --toy observed counts");
    gen_cmd->add_flag("--toy", gen.toy,
                      "Include Poisson-fluctuated observed counts (default: omit; "
                      "consumers fall back to the Asimov dataset)");

    FitOpts fit;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "Minimize the model NLL from nominal initial values");
    fit_cmd->add_option("--model", fit.model_path, "Model-spec JSON path")->required();
    fit_cmd->add_option("--mode", fit.mode, "Gradient source")
        ->check(CLI::IsMember({"ad", "numdiff"}));
    fit_cmd->add_option("--tol", fit.tol, "Gradient max-norm tolerance");
    fit_cmd->add_option("--max-iter", fit.max_iter, "Iteration limit");

    GradCheckOpts gc;
    CLI::App* gc_cmd = app.add_subcommand(
        "grad-check",
        "Compare reverse-mode, forward-mode and central-difference gradients");
    gc_cmd->add_option("--model", gc.model_path, "Model-spec JSON path")->required();
    gc_cmd->add_option("--points", gc.points, "Number of random evaluation points")
        ->check(CLI::PositiveNumber);
    gc_cmd->add_option("--seed", gc.seed, "Random point seed");

    DumpIrOpts dump;
    CLI::App* dump_cmd =
        app.add_subcommand("dump-ir", "Print the squashed program as source text");
    dump_cmd->add_option("--model", dump.model_path, "Model-spec JSON path")->required();
    dump_cmd->add_flag("--grad", dump.grad, "Print the reverse-mode gradient program");
    dump_cmd->add_flag("--optimize", dump.opt,
                       "Apply constant folding, CSE and dead-code elimination");

    BenchOpts bench;
    CLI::App* bench_cmd = app.add_subcommand(
        "bench", "Time AD vs central-difference gradients and full minimizations");
    bench_cmd->add_option("--bins", bench.bins, "Comma-separated bin counts (e.g. 1,10,499)")
        ->required()
        ->delimiter(',');
    bench_cmd->add_option("--modes", bench.modes, "Comma-separated gradient modes")
        ->delimiter(',')
        ->check(CLI::IsMember({"ad", "numdiff"}));
    bench_cmd->add_option("--repeats", bench.repeats, "Timing repeats per measurement")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--out", bench.out_path, "Output CSV path")->required();
    bench_cmd->add_option("--tol", bench.tol, "Minimization gradient tolerance");
    bench_cmd->add_option("--max-iter", bench.max_iter, "Minimization iteration limit");

    std::vector<const char*> argv;
    argv.push_back("adfit");
    for (const std::string& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run 'adfit --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed())
            return cmd_gen_model(gen, out, err);
        if (fit_cmd->parsed())
            return cmd_fit(fit, out, err);
        if (gc_cmd->parsed())
            return cmd_grad_check(gc, out, err);
        if (dump_cmd->parsed())
            return cmd_dump_ir(dump, out, err);
        if (bench_cmd->parsed())
            return cmd_bench(bench, out, err);
    } catch (const NumericalDomainError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace adfit

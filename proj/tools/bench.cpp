// Benchmark CLI: runs {strategy x memory x alpha} experiment matrices from a
// key=value config file, and single image registrations on PGM pairs.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 I/O error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qnopt/experiment.hpp"
#include "qnopt/image.hpp"
#include "qnopt/registration.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int cmd_run(const std::string& config_path, std::string out_path, const std::string& format,
            unsigned parallel, bool per_rep) {
    qnopt::ExperimentSpec spec;
    try {
        spec = qnopt::parse_config_file(config_path);
    } catch (const qnopt::ConfigError& e) {
        std::cerr << "bench: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return kExitIo;
    }

    std::vector<qnopt::ReportRow> rows;
    try {
        rows = qnopt::run_experiment(spec, parallel);
    } catch (const std::exception& e) {
        std::cerr << "bench: config error: " << e.what() << '\n';
        return kExitConfig;
    }
    const auto fmt =
        format == "table" ? qnopt::ReportFormat::aligned_table : qnopt::ReportFormat::csv;

    if (out_path.empty()) out_path = spec.output;
    if (out_path.empty()) {
        qnopt::emit_report(rows, fmt, std::cout, !per_rep);
        return kExitOk;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "bench: cannot open output path '" << out_path << "'\n";
        return kExitIo;
    }
    qnopt::emit_report(rows, fmt, out, !per_rep);
    out.flush();
    if (!out) {
        std::cerr << "bench: write failed for '" << out_path << "'\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_register(const std::string& ref_path, const std::string& tpl_path,
                 const std::string& strategy, double alpha, const std::string& regularizer,
                 std::size_t max_iter, std::size_t memory, const std::string& out_path) {
    qnopt::ImageBuffer ref, tpl;
    try {
        ref = qnopt::load_pgm(ref_path);
        tpl = qnopt::load_pgm(tpl_path);
    } catch (const std::exception& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return kExitIo;
    }

    qnopt::OptimizerConfig cfg;
    cfg.max_iter = max_iter;
    cfg.memory = memory;
    bool steepest = strategy == "sd";
    try {
        if (!steepest) cfg.strategy.tag = qnopt::parse_strategy_tag(strategy);
    } catch (const std::exception& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        qnopt::RegistrationProblem problem(std::move(ref), std::move(tpl), alpha,
                                           qnopt::parse_regularizer(regularizer));
        qnopt::Vector u0(problem.dim(), 0.0);
        auto [u, rec] = steepest ? qnopt::steepest_descent_minimize(problem, u0, cfg)
                                 : qnopt::lbfgs_minimize(problem, u0, cfg);

        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "bench: cannot open output path '" << out_path << "'\n";
            return kExitIo;
        }
        const auto& grid = problem.grid();
        const std::size_t nc = grid.cells();
        out << "i,j,ux,uy\n";
        std::size_t c = 0;
        for (std::size_t j = 0; j < grid.dims[1]; ++j)
            for (std::size_t i = 0; i < grid.dims[0]; ++i, ++c)
                out << i << ',' << j << ',' << u[c] << ',' << u[nc + c] << '\n';
        out.flush();
        if (!out) {
            std::cerr << "bench: write failed for '" << out_path << "'\n";
            return kExitIo;
        }

        std::cout << "iterations=" << rec.iterations << " fevals=" << rec.fevals
                  << " reduction=" << rec.reduction << " converged_by=" << to_string(rec.converged_by)
                  << '\n';
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-Newton optimization benchmark runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment matrix from a config file");
    std::string config_path, out_path, format = "csv";
    unsigned parallel = 1;
    bool per_rep = false;
    run->add_option("--config", config_path, "Run configuration (key=value lines)")->required();
    run->add_option("--out", out_path, "Output path (default: config 'out' or stdout)");
    run->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "table"}));
    run->add_option("--parallel", parallel, "Worker threads for matrix cells")
        ->check(CLI::PositiveNumber);
    run->add_flag("--per-rep", per_rep, "Emit one row per repetition instead of averaging");

    auto* reg = app.add_subcommand("register", "Register a template PGM onto a reference PGM");
    std::string ref_path, tpl_path, strategy = "dp", regularizer = "curvature", field_path;
    double alpha = 1e-2;
    std::size_t max_iter = 200, memory = 5;
    reg->add_option("--ref", ref_path, "Reference image (PGM)")->required();
    reg->add_option("--tpl", tpl_path, "Template image (PGM)")->required();
    reg->add_option("--strategy", strategy, "Initialization strategy tag (or sd)");
    reg->add_option("--alpha", alpha, "Regularization weight");
    reg->add_option("--regularizer", regularizer, "Regularizer kind")
        ->check(CLI::IsMember({"curvature", "elastic"}));
    reg->add_option("--max-iter", max_iter, "Iteration cap");
    reg->add_option("--memory", memory, "L-BFGS memory");
    reg->add_option("--out", field_path, "Displacement field CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(config_path, out_path, format, parallel, per_rep);
    return cmd_register(ref_path, tpl_path, strategy, alpha, regularizer, max_iter, memory,
                        field_path);
}

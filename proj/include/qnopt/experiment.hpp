#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qnopt/lbfgs.hpp"

namespace qnopt {

/// Raised on invalid run configurations; the message names the offending
/// field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sentinel for unbounded memory (the `inf` config token); realized as
/// capacity = max_iter at run time.
inline constexpr std::size_t kUnboundedMemory = static_cast<std::size_t>(-1);

struct ExperimentSpec {
    std::string problem = "quadratic";  // quadratic | disc
    std::vector<std::string> strategies;  // strategy tags, plus "sd" for steepest descent
    std::vector<std::size_t> memories;    // kUnboundedMemory encodes inf
    std::vector<double> alphas;
    std::size_t repetitions = 1;
    std::uint64_t seed = 1;
    std::string output;  // optional; empty = stdout unless overridden

    // quadratic parameters
    std::size_t n = 256;
    double decay_span = 14.0;

    // disc registration parameters
    std::size_t size = 32;
    double radius_ref = 9.0;
    double radius_tpl = 9.0;
    double offset_x = 3.0;
    double offset_y = 2.0;
    std::string regularizer = "curvature";
    double mu = 1.0;
    double lambda = 0.0;

    // optimizer knobs
    std::size_t max_iter = 5000;
    double pcg_tol = 1e-6;
    std::size_t pcg_max_iter = 100;
    double fair_factor = 1e-3;
};

struct ReportRow {
    std::string strategy;
    std::size_t ell = 0;  // kUnboundedMemory = inf
    double alpha = 0.0;
    std::size_t rep = 0;
    std::size_t iterations = 0;
    std::size_t fevals = 0;
    double avg_ls = 0.0;
    double reduction = 1.0;
    double time_s = 0.0;
    std::string converged_by;
    std::optional<double> rel_err;  // quadratic only: |x - c| / |c|
};

/// Parses the flat key=value run configuration (# comments, lists as a,b,c,
/// the literal token inf for unbounded memory). Throws ConfigError naming
/// the bad field.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec parse_config_file(const std::string& path);  // I/O failures -> std::ios_base::failure

/// Runs the full {strategy x ell x alpha x repetition} matrix. Deterministic
/// given the seed except for wall time; individual run failures are recorded
/// in converged_by and never abort the matrix. Cells run on `parallel`
/// threads; row order is always the configured nesting order regardless of
/// completion order.
std::vector<ReportRow> run_experiment(const ExperimentSpec& spec, unsigned parallel = 1);

enum class ReportFormat { csv, aligned_table };

/// Writes rows with the header
///   strategy,ell,alpha,iter,feval,avg_ls,reduction,time_s,converged_by,rel_err
/// With aggregate = true (the default), repetitions collapse to one row with
/// the mean wall time; per-repetition rows are emitted otherwise.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, std::ostream& out,
                 bool aggregate = true);

}  // namespace qnopt

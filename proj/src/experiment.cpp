#include "qnopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "qnopt/quadratic.hpp"
#include "qnopt/registration.hpp"

namespace qnopt {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream iss(s);
    while (std::getline(iss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': not a number: '" + value + "'");
    }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size() || v < 0) throw std::invalid_argument("");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': not a non-negative integer: '" + value + "'");
    }
}

void validate(const ExperimentSpec& spec) {
    if (spec.problem != "quadratic" && spec.problem != "disc")
        throw ConfigError("field 'problem': must be quadratic or disc");
    if (spec.strategies.empty()) throw ConfigError("field 'strategies': empty list");
    for (const auto& s : spec.strategies) {
        if (s == "sd") continue;
        try {
            parse_strategy_tag(s);
        } catch (const std::exception&) {
            throw ConfigError("field 'strategies': unknown tag '" + s + "'");
        }
    }
    if (spec.memories.empty()) throw ConfigError("field 'memories': empty list");
    for (std::size_t m : spec.memories)
        if (m == 0) throw ConfigError("field 'memories': entries must be >= 1 or inf");
    if (spec.alphas.empty()) throw ConfigError("field 'alphas': empty list");
    for (double a : spec.alphas)
        if (!(a > 0.0)) throw ConfigError("field 'alphas': entries must be > 0");
    if (spec.repetitions < 1) throw ConfigError("field 'repetitions': must be >= 1");
    if (spec.max_iter < 1) throw ConfigError("field 'max_iter': must be >= 1");
    if (spec.problem == "quadratic" && spec.n < 4)
        throw ConfigError("field 'n': must be >= 4");
    if (spec.problem == "disc") {
        if (spec.size < 4) throw ConfigError("field 'size': must be >= 4");
        if (spec.regularizer != "curvature" && spec.regularizer != "elastic")
            throw ConfigError("field 'regularizer': must be curvature or elastic");
        const double half = static_cast<double>(spec.size) / 2.0;
        if (!(spec.radius_ref < half) || !(spec.radius_tpl < half))
            throw ConfigError("field 'radius_ref'/'radius_tpl': radii must be < size/2");
    }
}

}  // namespace

ExperimentSpec parse_config(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");

        if (key == "problem") {
            spec.problem = value;
        } else if (key == "strategies") {
            spec.strategies = split_list(value);
            for (auto& s : spec.strategies)
                std::transform(s.begin(), s.end(), s.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        } else if (key == "memories") {
            spec.memories.clear();
            for (const auto& tok : split_list(value))
                spec.memories.push_back(tok == "inf" ? kUnboundedMemory
                                                     : parse_size(key, tok));
        } else if (key == "alphas") {
            spec.alphas.clear();
            for (const auto& tok : split_list(value)) spec.alphas.push_back(parse_double(key, tok));
        } else if (key == "repetitions") {
            spec.repetitions = parse_size(key, value);
        } else if (key == "seed") {
            spec.seed = parse_size(key, value);
        } else if (key == "out") {
            spec.output = value;
        } else if (key == "n") {
            spec.n = parse_size(key, value);
        } else if (key == "decay_span") {
            spec.decay_span = parse_double(key, value);
        } else if (key == "size") {
            spec.size = parse_size(key, value);
        } else if (key == "radius_ref") {
            spec.radius_ref = parse_double(key, value);
        } else if (key == "radius_tpl") {
            spec.radius_tpl = parse_double(key, value);
        } else if (key == "offset_x") {
            spec.offset_x = parse_double(key, value);
        } else if (key == "offset_y") {
            spec.offset_y = parse_double(key, value);
        } else if (key == "regularizer") {
            spec.regularizer = value;
        } else if (key == "mu") {
            spec.mu = parse_double(key, value);
        } else if (key == "lambda") {
            spec.lambda = parse_double(key, value);
        } else if (key == "max_iter") {
            spec.max_iter = parse_size(key, value);
        } else if (key == "pcg_tol") {
            spec.pcg_tol = parse_double(key, value);
        } else if (key == "pcg_max_iter") {
            spec.pcg_max_iter = parse_size(key, value);
        } else if (key == "fair_factor") {
            spec.fair_factor = parse_double(key, value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    validate(spec);
    return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
    return parse_config(in);
}

namespace {

struct Cell {
    std::string strategy;
    std::size_t ell;
    double alpha;
    std::size_t rep;
    std::size_t alpha_index;
};

ReportRow run_cell(const ExperimentSpec& spec, const Cell& cell, const Objective& problem,
                   const Vector& x0, const Vector* minimizer) {
    ReportRow row;
    row.strategy = cell.strategy;
    row.ell = cell.ell;
    row.alpha = cell.alpha;
    row.rep = cell.rep;

    OptimizerConfig cfg;
    cfg.memory = cell.ell == kUnboundedMemory ? spec.max_iter : cell.ell;
    cfg.max_iter = spec.max_iter;
    cfg.pcg = PcgConfig{spec.pcg_tol, spec.pcg_max_iter};
    if (minimizer != nullptr) {
        cfg.target = *minimizer;  // the paper-style relative-error rule
        cfg.target_rel_tol = 1e-5;
    }

    try {
        std::pair<Vector, RunRecord> result;
        if (cell.strategy == "sd") {
            result = steepest_descent_minimize(problem, x0, cfg);
        } else {
            cfg.strategy = Strategy{parse_strategy_tag(cell.strategy), spec.fair_factor};
            result = lbfgs_minimize(problem, x0, cfg);
        }
        const RunRecord& rec = result.second;
        row.iterations = rec.iterations;
        row.fevals = rec.fevals;
        row.avg_ls = rec.avg_ls_per_iter;
        row.reduction = rec.reduction;
        row.time_s = rec.wall_time_s;
        row.converged_by = to_string(rec.converged_by);
        if (minimizer != nullptr) {
            const double denom = norm2(*minimizer);
            row.rel_err = denom > 0.0 ? norm2(sub(result.first, *minimizer)) / denom : 0.0;
        }
    } catch (const std::exception&) {
        row.converged_by = "error";
    }
    return row;
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentSpec& spec, unsigned parallel) {
    validate(spec);

    // One immutable problem instance per alpha, shared across cells.
    std::vector<std::shared_ptr<const Objective>> problems;
    std::vector<Vector> starts;
    std::vector<Vector> minimizers;  // quadratic only
    const bool quadratic = spec.problem == "quadratic";
    for (double alpha : spec.alphas) {
        if (quadratic) {
            auto prob = std::make_shared<QuadraticProblem>(
                build_quadratic(spec.n, alpha, spec.decay_span, spec.seed));
            minimizers.push_back(prob->minimizer());
            starts.emplace_back(prob->dim(), 0.0);
            problems.push_back(std::move(prob));
        } else {
            auto [ref, tpl] = make_disc_pair(spec.size, spec.radius_ref, spec.radius_tpl,
                                             spec.offset_x, spec.offset_y);
            auto prob = std::make_shared<RegistrationProblem>(
                std::move(ref), std::move(tpl), alpha, parse_regularizer(spec.regularizer),
                spec.mu, spec.lambda);
            starts.emplace_back(prob->dim(), 0.0);
            problems.push_back(std::move(prob));
        }
    }

    std::vector<Cell> cells;
    for (const auto& strategy : spec.strategies)
        for (std::size_t ell : spec.memories)
            for (std::size_t ai = 0; ai < spec.alphas.size(); ++ai)
                for (std::size_t rep = 0; rep < spec.repetitions; ++rep)
                    cells.push_back(Cell{strategy, ell, spec.alphas[ai], rep, ai});

    std::vector<ReportRow> rows(cells.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(parallel, cells.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            rows[i] = run_cell(spec, cell, *problems[cell.alpha_index], starts[cell.alpha_index],
                               quadratic ? &minimizers[cell.alpha_index] : nullptr);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return rows;
}

namespace {

std::string format_full(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string format_sig3(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

std::string ell_token(std::size_t ell) {
    return ell == kUnboundedMemory ? "inf" : std::to_string(ell);
}

std::vector<ReportRow> aggregate_rows(const std::vector<ReportRow>& rows) {
    // Repetitions of a cell differ only in wall time; average it, keep the
    // first repetition's remaining columns, preserve first-seen order.
    std::vector<ReportRow> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::size_t> counts;
    for (const auto& row : rows) {
        std::string key = row.strategy + '|' + ell_token(row.ell) + '|' + format_full(row.alpha);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(std::move(key), out.size());
            out.push_back(row);
            counts.push_back(1);
        } else {
            out[it->second].time_s += row.time_s;
            ++counts[it->second];
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].time_s /= static_cast<double>(counts[i]);
    return out;
}

}  // namespace

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, std::ostream& out,
                 bool aggregate) {
    const std::vector<ReportRow> data = aggregate ? aggregate_rows(rows) : rows;

    if (format == ReportFormat::csv) {
        out << "strategy,ell,alpha,iter,feval,avg_ls,reduction,time_s,converged_by,rel_err\n";
        for (const auto& r : data) {
            out << r.strategy << ',' << ell_token(r.ell) << ',' << format_full(r.alpha) << ','
                << r.iterations << ',' << r.fevals << ',' << format_full(r.avg_ls) << ','
                << format_full(r.reduction) << ',' << format_full(r.time_s) << ','
                << r.converged_by << ',' << (r.rel_err ? format_full(*r.rel_err) : std::string())
                << '\n';
        }
        return;
    }

    const char* headers[] = {"strategy", "ell",    "alpha",  "iter",         "feval",
                             "avg_ls",   "reduction", "time_s", "converged_by", "rel_err"};
    std::vector<std::vector<std::string>> table;
    for (const auto& r : data) {
        table.push_back({r.strategy, ell_token(r.ell), format_sig3(r.alpha),
                         std::to_string(r.iterations), std::to_string(r.fevals),
                         format_sig3(r.avg_ls), format_sig3(r.reduction), format_sig3(r.time_s),
                         r.converged_by, r.rel_err ? format_sig3(*r.rel_err) : std::string("-")});
    }
    std::size_t widths[10];
    for (std::size_t c = 0; c < 10; ++c) {
        widths[c] = std::string(headers[c]).size();
        for (const auto& row : table) widths[c] = std::max(widths[c], row[c].size());
    }
    for (std::size_t c = 0; c < 10; ++c)
        out << std::left << std::setw(static_cast<int>(widths[c] + 2)) << headers[c];
    out << '\n';
    for (const auto& row : table) {
        for (std::size_t c = 0; c < 10; ++c)
            out << std::left << std::setw(static_cast<int>(widths[c] + 2)) << row[c];
        out << '\n';
    }
}

}  // namespace qnopt

// Acceptance suite: runs the end-to-end checks the library must satisfy and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qnopt/experiment.hpp"
#include "qnopt/quadratic.hpp"
#include "qnopt/registration.hpp"
#include "support/dense.hpp"

using namespace qnopt;
using testsupport::DenseMatrix;
using testsupport::random_vector;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fail(const std::string& msg) { return msg; }

// ---------------------------------------------------------------------------
// 1. Two-loop direction equals the dense rank-two recurrence after 8
//    iterations at unbounded memory with a scalar center step. Runtime < 1 s.
std::string criterion_two_loop_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(314);
    const std::size_t n = 10;
    DenseMatrix m = testsupport::random_spd(rng, n, 1.0, 200.0);
    Vector c = random_vector(rng, n);

    Vector x(n, 0.0), g(n);
    auto eval = [&](const Vector& xx, Vector& gg) {
        Vector r = sub(xx, c);
        gg = m.apply(r);
        return 0.5 * dot(r, gg);
    };

    class Wrapper final : public Objective {
    public:
        Wrapper(std::function<double(const Vector&, Vector&)> f, std::size_t n)
            : f_(std::move(f)), n_(n) {}
        std::size_t dim() const override { return n_; }
        double eval(const Vector& x, Vector& g) const override { return f_(x, g); }
        OperatorPtr regularizer_hessian(const Vector&) const override { return nullptr; }

    private:
        std::function<double(const Vector&, Vector&)> f_;
        std::size_t n_;
    } obj(eval, n);

    double value = eval(x, g);
    LbfgsMemory memory(1000);  // unbounded at this scale
    std::vector<std::pair<Vector, Vector>> pairs;
    for (int k = 0; k < 8; ++k) {
        Vector d = negated(two_loop_apply(memory, g, 1.0));
        LineSearchResult ls = armijo_backtrack(obj, x, d, value, g, ArmijoConfig{});
        if (!ls.success) return fail("line search failed at iteration " + std::to_string(k));
        Vector p = sub(ls.x_new, x);
        Vector y = sub(ls.grad_new, g);
        memory.push(SecantPair::make(p, y));
        pairs.emplace_back(std::move(p), std::move(y));
        x = ls.x_new;
        value = ls.value_new;
        g = ls.grad_new;
    }

    Vector direction = two_loop_apply(memory, g, 1.0);
    DenseMatrix h = testsupport::bfgs_recurrence(DenseMatrix::identity(n), pairs);
    Vector want = h.apply(g);
    const double rel = norm2(sub(direction, want)) / norm2(want);
    if (rel > 1e-10) return fail("direction rel err " + std::to_string(rel) + " > 1e-10");
    const double dt = seconds_since(t0);
    if (dt >= 1.0) return fail("runtime " + std::to_string(dt) + " s >= 1 s");
    return {};
}

// ---------------------------------------------------------------------------
// 2. tau_du matches the 1e6-point angle-sweep minimizer of |eta1 p - eta2 z|
//    after rescaling, on 100 random pairs with positive delta. Runtime < 30 s.
std::string criterion_tls_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<std::size_t> dim(2, 50);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int done = 0;
    while (done < 100) {
        const std::size_t n = dim(rng);
        Vector p(n), z(n);
        for (double& v : p) v = gauss(rng);
        for (double& v : z) v = gauss(rng);
        // Positive, well-separated delta keeps the sweep minimum away from
        // the poles of the cotangent rescaling.
        if (dot(p, z) < 0.05 * norm2(p) * norm2(z)) continue;
        ++done;
        const double du = tau_du(p, z, -1e300).tau;
        const double swept = testsupport::angle_sweep_tls(p, z, 1000000);
        const double rel = std::abs(du - swept) / std::abs(swept);
        if (rel > 1e-4)
            return fail("pair " + std::to_string(done) + ": tau_du " + std::to_string(du) +
                        " vs sweep " + std::to_string(swept));
    }
    const double dt = seconds_since(t0);
    if (dt >= 30.0) return fail("runtime " + std::to_string(dt) + " s >= 30 s");
    return {};
}

// ---------------------------------------------------------------------------
// 3. Ordering chains |tau_dp| <= |tau_du| <= |tau_dz| and
//    tau_dp <= tau_gm <= tau_dz on 1e4 random pairs with delta > 0, slack 1e-12.
std::string criterion_ordering() {
    std::mt19937_64 rng(161803);
    std::uniform_int_distribution<std::size_t> dim(2, 100);
    auto leq = [](double a, double b) {
        return a <= b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    int done = 0;
    while (done < 10000) {
        const std::size_t n = dim(rng);
        Vector p = random_vector(rng, n);
        Vector z = random_vector(rng, n);
        if (dot(p, z) <= 1e-8 * norm2(p) * norm2(z)) continue;
        ++done;
        const double dp = tau_dp(p, z, -1e300).tau;
        const double du = tau_du(p, z, -1e300).tau;
        const double dz = tau_dz(p, z, -1e300).tau;
        const double gm = tau_gm(p, z, -1e300).tau;
        if (!leq(std::abs(dp), std::abs(du)) || !leq(std::abs(du), std::abs(dz)))
            return fail("absolute chain violated at pair " + std::to_string(done));
        if (!leq(dp, gm) || !leq(gm, dz))
            return fail("geometric-mean chain violated at pair " + std::to_string(done));
    }
    return {};
}

// ---------------------------------------------------------------------------
// Shared quadratic benchmark matrix (paper protocol: n = 256, start at zero,
// stop at relative error 1e-5 or 5000 iterations).
using MatrixKey = std::tuple<std::string, std::size_t, double>;

std::map<MatrixKey, ReportRow> run_quadratic_matrix() {
    ExperimentSpec spec;
    spec.problem = "quadratic";
    spec.n = 256;
    spec.seed = 42;
    spec.strategies = {"id", "lsy", "lsp", "fair", "dp", "dz", "du", "gm"};
    spec.memories = {1, 5, 10, kUnboundedMemory};
    spec.alphas = {1e-5, 1e-3, 1e-1};
    spec.max_iter = 5000;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    auto rows = run_experiment(spec, hw);
    std::map<MatrixKey, ReportRow> out;
    for (auto& row : rows) out.emplace(MatrixKey{row.strategy, row.ell, row.alpha}, std::move(row));
    return out;
}

// 4. Every strategy except Id converges to relative error 1e-5 within 5000
//    iterations at alpha in {1e-3, 1e-1}, ell in {5, 10}.
std::string criterion_quadratic_convergence(const std::map<MatrixKey, ReportRow>& matrix) {
    for (const std::string s : {"lsy", "lsp", "fair", "dp", "dz", "du", "gm"})
        for (std::size_t ell : {5u, 10u})
            for (double alpha : {1e-3, 1e-1}) {
                const ReportRow& row = matrix.at({s, ell, alpha});
                std::ostringstream cell;
                cell << s << " ell=" << ell << " alpha=" << alpha;
                if (row.converged_by != "target")
                    return fail(cell.str() + ": stopped by " + row.converged_by);
                if (!row.rel_err || *row.rel_err > 1e-5)
                    return fail(cell.str() + ": relative error above 1e-5");
                if (row.iterations > 5000) return fail(cell.str() + ": iteration cap exceeded");
            }
    return {};
}

// 5. At alpha = 1e-1, ell = 5 each regularization-equipped strategy beats
//    every scaled-identity strategy on iterations; Id at alpha = 1e-5,
//    ell = 1 hits the 5000-iteration cap.
std::string criterion_qualitative_table(const std::map<MatrixKey, ReportRow>& matrix) {
    for (const std::string fast : {"dp", "dz", "du", "gm", "fair"})
        for (const std::string slow : {"lsy", "lsp", "id"}) {
            const auto& f = matrix.at({fast, 5, 1e-1});
            const auto& s = matrix.at({slow, 5, 1e-1});
            if (!(f.iterations < s.iterations))
                return fail(fast + " (" + std::to_string(f.iterations) + ") not below " + slow +
                            " (" + std::to_string(s.iterations) + ")");
        }
    const auto& id_row = matrix.at({"id", 1, 1e-5});
    if (id_row.converged_by != "max_iter" || id_row.iterations != 5000)
        return fail("id at alpha=1e-5, ell=1 stopped by " + id_row.converged_by + " after " +
                    std::to_string(id_row.iterations) + " iterations");
    return {};
}

// 6. Dz averages at most 1.5 line-search evaluations per iteration across the
//    whole alpha x ell matrix; Dp averages at least Dz at alpha=1e-1, ell=5.
std::string criterion_line_search_behavior(const std::map<MatrixKey, ReportRow>& matrix) {
    for (double alpha : {1e-5, 1e-3, 1e-1})
        for (std::size_t ell : {std::size_t{1}, std::size_t{5}, std::size_t{10}, kUnboundedMemory}) {
            const auto& row = matrix.at({"dz", ell, alpha});
            if (row.avg_ls > 1.5) {
                std::ostringstream cell;
                cell << "dz alpha=" << alpha << " ell=" << ell << ": avg LS " << row.avg_ls;
                return fail(cell.str());
            }
        }
    const double dp_ls = matrix.at({"dp", 5, 1e-1}).avg_ls;
    const double dz_ls = matrix.at({"dz", 5, 1e-1}).avg_ls;
    if (dp_ls < dz_ls)
        return fail("dp avg LS " + std::to_string(dp_ls) + " below dz " + std::to_string(dz_ls));
    return {};
}

// ---------------------------------------------------------------------------
// 7. Step lengths shrink as tau grows: |d(dp)| >= |d(gm)| >= |d(dz)| for the
//    same gradient at iteration 1 with empty memory.
std::string criterion_tau_step_length() {
    QuadraticProblem prob = build_quadratic(256, 1e-1, 14.0, 42);
    OperatorPtr a = prob.regularizer_hessian({});

    Vector x0(256, 0.0), g0(256);
    double v0 = prob.eval(x0, g0);
    LbfgsMemory empty(0);
    ShiftedOperator b0_first(1e-6, a);
    Vector d0 = negated(two_loop_apply(empty, g0, b0_first, PcgConfig{}));
    LineSearchResult ls = armijo_backtrack(prob, x0, d0, v0, g0, ArmijoConfig{});
    if (!ls.success) return fail("first line search failed");

    SecantPair pair = SecantPair::make(sub(ls.x_new, x0), sub(ls.grad_new, g0));
    Vector z = compute_z(pair, *a);
    const double t_dp = tau_dp(pair.p, z, 1e-6).tau;
    const double t_gm = tau_gm(pair.p, z, 1e-6).tau;
    const double t_dz = tau_dz(pair.p, z, 1e-6).tau;
    if (!(t_dp <= t_gm && t_gm <= t_dz)) return fail("tau ordering violated");

    const PcgConfig tight{1e-12, 2000};
    auto step_norm = [&](double tau) {
        ShiftedOperator b0(tau, a);
        return norm2(two_loop_apply(empty, ls.grad_new, b0, tight));
    };
    const double len_dp = step_norm(t_dp);
    const double len_gm = step_norm(t_gm);
    const double len_dz = step_norm(t_dz);
    const double slack = 1e-9 * len_dp;
    if (!(len_dp + slack >= len_gm && len_gm + slack >= len_dz)) {
        std::ostringstream os;
        os << "step lengths not ordered: " << len_dp << ", " << len_gm << ", " << len_dz;
        return fail(os.str());
    }
    return {};
}

// ---------------------------------------------------------------------------
// 8. Central finite differences confirm the analytic gradients at 5 random
//    points (quadratic to 1e-6, registration to 1e-5).
std::string criterion_gradient_checks() {
    auto fd_rel_err = [](const Objective& obj, const Vector& x) {
        Vector g(x.size()), scratch(x.size());
        obj.eval(x, g);
        Vector xp = x, xm = x;
        Vector fd(x.size());
        const double h = 1e-6;
        for (std::size_t i = 0; i < x.size(); ++i) {
            xp[i] = x[i] + h;
            xm[i] = x[i] - h;
            fd[i] = (obj.eval(xp, scratch) - obj.eval(xm, scratch)) / (2 * h);
            xp[i] = x[i];
            xm[i] = x[i];
        }
        return norm2(sub(fd, g)) / norm2(g);
    };

    std::mt19937_64 rng(55);
    QuadraticProblem quad = build_quadratic(10, 1e-2, 14.0, 5);
    for (int t = 0; t < 5; ++t) {
        const double rel = fd_rel_err(quad, random_vector(rng, 10));
        if (rel > 1e-6) return fail("quadratic gradient rel err " + std::to_string(rel));
    }

    auto [ref, tpl] = make_disc_pair(16, 5, 4, 2, 1);
    RegistrationProblem reg(ref, tpl, 1e-2, RegularizerKind::curvature);
    for (int t = 0; t < 5; ++t) {
        const double rel = fd_rel_err(reg, random_vector(rng, reg.dim(), -0.4, 0.4));
        if (rel > 1e-5) return fail("registration gradient rel err " + std::to_string(rel));
    }
    return {};
}

// ---------------------------------------------------------------------------
// 9. Desk-scale registration: 32x32 disc pair, SSD + curvature, alpha = 1e-2.
//    Dp at least halves the objective within 100 iterations without a line
//    search failure, and Gm is no more than 10% worse. Runtime < 60 s.
std::string criterion_registration() {
    const auto t0 = std::chrono::steady_clock::now();
    auto [ref, tpl] = make_disc_pair(32, 9, 9, 3, 2);
    RegistrationProblem prob(std::move(ref), std::move(tpl), 1e-2, RegularizerKind::curvature);
    Vector u0(prob.dim(), 0.0);

    auto run = [&](StrategyTag tag) {
        OptimizerConfig cfg;
        cfg.max_iter = 100;
        cfg.strategy.tag = tag;
        return lbfgs_minimize(prob, u0, cfg).second;
    };
    const RunRecord dp = run(StrategyTag::Dp);
    if (dp.converged_by == StopReason::line_search_failure) return fail("dp line search failed");
    if (dp.iterations > 100) return fail("dp exceeded 100 iterations");
    if (dp.reduction > 0.5) return fail("dp reduction " + std::to_string(dp.reduction) + " > 0.5");

    const RunRecord gm = run(StrategyTag::Gm);
    if (gm.converged_by == StopReason::line_search_failure) return fail("gm line search failed");
    if (gm.reduction > 1.1 * dp.reduction + 1e-15)
        return fail("gm reduction " + std::to_string(gm.reduction) + " more than 10% worse than dp " +
                    std::to_string(dp.reduction));

    const double dt = seconds_since(t0);
    if (dt >= 60.0) return fail("runtime " + std::to_string(dt) + " s >= 60 s");
    return {};
}

// ---------------------------------------------------------------------------
// 10. PCG solves B0 = tau I + alpha R (tau from a real first secant pair) to
//     relative residual 1e-6 within 100 iterations for alpha >= 1e-3, and the
//     reported residual equals the recomputed one to 1e-8.
std::string criterion_pcg_contract() {
    std::mt19937_64 rng(77);
    for (double alpha : {1e-3, 1e-1}) {
        QuadraticProblem prob = build_quadratic(256, alpha, 14.0, 42);
        OptimizerConfig cfg;
        cfg.strategy.tag = StrategyTag::Dp;
        cfg.max_iter = 1;
        auto [x1, rec] = lbfgs_minimize(prob, Vector(256, 0.0), cfg);

        Vector g0(256), g1(256);
        prob.eval(Vector(256, 0.0), g0);
        prob.eval(x1, g1);
        SecantPair pair = SecantPair::make(x1, sub(g1, g0));
        OperatorPtr a = prob.regularizer_hessian(x1);
        auto [metric, tau] = build_initial_metric(Strategy{StrategyTag::Dp}, &pair, a, 1e-6);

        Vector b = random_vector(rng, 256);
        PcgResult res = pcg_solve(*metric.b0, b, PcgConfig{1e-6, 100});
        std::ostringstream label;
        label << "alpha=" << alpha;
        if (!res.converged || res.iterations > 100)
            return fail(label.str() + ": not converged within 100 iterations");
        const double recomputed = norm2(sub(b, metric.b0->apply(res.solution))) / norm2(b);
        if (std::abs(res.final_rel_residual - recomputed) > 1e-8)
            return fail(label.str() + ": reported residual drifts from the recomputed one");
    }
    return {};
}

}  // namespace

int main() {
    std::printf("running the quadratic benchmark matrix (n=256, 8 strategies, "
                "ell in {1,5,10,inf}, alpha in {1e-5,1e-3,1e-1})...\n");
    const auto matrix = run_quadratic_matrix();

    struct Criterion {
        int id;
        const char* label;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "two-loop direction matches the dense recurrence oracle", criterion_two_loop_oracle},
        {2, "tau_du matches the angle-sweep total-least-squares oracle", criterion_tls_oracle},
        {3, "tau ordering chains hold on 10^4 random pairs", criterion_ordering},
        {4, "all non-identity strategies converge on the quadratic family",
         [&] { return criterion_quadratic_convergence(matrix); }},
        {5, "regularization-equipped strategies need fewer iterations; id hits the cap",
         [&] { return criterion_qualitative_table(matrix); }},
        {6, "dz stays within 1.5 line searches per iteration; dp is not below dz",
         [&] { return criterion_line_search_behavior(matrix); }},
        {7, "step length is inversely ordered with tau at iteration 1", criterion_tau_step_length},
        {8, "analytic gradients pass central finite-difference checks", criterion_gradient_checks},
        {9, "desk-scale disc registration halves the objective (dp, gm within 10%)",
         criterion_registration},
        {10, "pcg reaches 1e-6 on tau I + alpha R within 100 iterations", criterion_pcg_contract},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string message;
        try {
            message = c.run();
        } catch (const std::exception& e) {
            message = std::string("exception: ") + e.what();
        }
        const double dt = seconds_since(t0);
        if (message.empty()) {
            std::printf("[PASS] %2d. %s (%.2f s)\n", c.id, c.label, dt);
        } else {
            std::printf("[FAIL] %2d. %s (%.2f s): %s\n", c.id, c.label, dt, message.c_str());
            ++failures;
        }
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

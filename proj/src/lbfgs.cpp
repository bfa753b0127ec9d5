#include "qnopt/lbfgs.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace qnopt {

namespace {
constexpr double kGradAbsTol = 1e-12;
}

void LbfgsMemory::push(SecantPair pair) {
    if (capacity_ == 0) return;
    if (pair.py <= 0.0)
        throw std::invalid_argument("LbfgsMemory::push: pair violates the curvature condition");
    if (pairs_.size() == capacity_) {
        pairs_.pop_front();
        rho_.pop_front();
    }
    rho_.push_back(1.0 / pair.py);
    pairs_.push_back(std::move(pair));
}

void LbfgsMemory::clear() {
    pairs_.clear();
    rho_.clear();
}

namespace {

template <typename CenterStep>
Vector two_loop_impl(const LbfgsMemory& memory, const Vector& g, CenterStep&& center) {
    Vector q = g;
    const std::size_t m = memory.size();
    std::vector<double> alpha(m);
    for (std::size_t i = m; i-- > 0;) {
        const SecantPair& pr = memory.pair(i);
        alpha[i] = memory.rho(i) * dot(pr.p, q);
        axpy(-alpha[i], pr.y, q);
    }
    Vector r = center(q);
    for (std::size_t i = 0; i < m; ++i) {
        const SecantPair& pr = memory.pair(i);
        const double beta = memory.rho(i) * dot(pr.y, r);
        axpy(alpha[i] - beta, pr.p, r);
    }
    return r;
}

}  // namespace

Vector two_loop_apply(const LbfgsMemory& memory, const Vector& g, double gamma) {
    return two_loop_impl(memory, g, [gamma](Vector& q) { return scaled(q, gamma); });
}

Vector two_loop_apply(const LbfgsMemory& memory, const Vector& g, const LinearOperator& b0,
                      const PcgConfig& pcg) {
    return two_loop_impl(memory, g,
                         [&](const Vector& q) { return pcg_solve(b0, q, pcg).solution; });
}

Vector two_loop_apply(const LbfgsMemory& memory, const Vector& g, const InitialMetric& metric,
                      const PcgConfig& pcg) {
    if (metric.uses_operator()) return two_loop_apply(memory, g, *metric.b0, pcg);
    return two_loop_apply(memory, g, metric.gamma);
}

LineSearchResult armijo_backtrack(const Objective& obj, const Vector& x, const Vector& d,
                                  double value0, const Vector& grad0, const ArmijoConfig& cfg) {
    const double slope = dot(d, grad0);
    if (slope >= 0.0)
        throw std::invalid_argument("armijo_backtrack: not a descent direction (d.g >= 0)");

    LineSearchResult res;
    double t = 1.0;
    Vector trial(x.size());
    Vector grad(x.size());
    for (int k = 0; k < cfg.max_trials; ++k) {
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + t * d[i];
        const double value = obj.eval(trial, grad);
        ++res.trials;
        if (value <= value0 + cfg.c1 * t * slope) {
            res.success = true;
            res.step = t;
            res.x_new = std::move(trial);
            res.value_new = value;
            res.grad_new = std::move(grad);
            return res;
        }
        t *= cfg.shrink;
    }
    res.x_new = x;
    res.value_new = value0;
    res.grad_new = grad0;
    return res;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::not_stopped: return "not_stopped";
        case StopReason::gradient: return "gradient";
        case StopReason::all_three: return "all_three";
        case StopReason::max_iter: return "max_iter";
        case StopReason::target: return "target";
        case StopReason::line_search_failure: return "ls_fail";
    }
    return "?";
}

StopReason check_stopping(const IterateSnapshot& prev, const IterateSnapshot& cur, double value0,
                          const StoppingTols& tols) {
    if (norm_inf(cur.grad) <= kGradAbsTol) return StopReason::gradient;
    const double ref = 1.0 + std::abs(value0);
    const bool value_ok = std::abs(prev.value - cur.value) <= tols.eps_J * ref;
    const bool iterate_ok = norm_inf(sub(prev.x, cur.x)) <= tols.eps_W * (1.0 + norm_inf(cur.x));
    const bool grad_ok = norm_inf(cur.grad) <= tols.eps_G * ref;
    return (value_ok && iterate_ok && grad_ok) ? StopReason::all_three : StopReason::not_stopped;
}

namespace {

std::pair<Vector, RunRecord> minimize_impl(const Objective& obj, const Vector& x0,
                                           const OptimizerConfig& cfg, bool use_lbfgs) {
    const auto t_start = std::chrono::steady_clock::now();

    Vector x = x0;
    Vector g(obj.dim());
    double value = obj.eval(x, g);
    if (!std::isfinite(value) || !all_finite(g))
        throw std::invalid_argument("minimize: objective not finite at the starting point");

    RunRecord rec;
    rec.fevals = 1;
    rec.initial_value = value;

    double target_norm = 0.0;
    if (cfg.target) {
        require_same_size(*cfg.target, x0, "minimize: target");
        target_norm = norm2(*cfg.target);
    }

    LbfgsMemory memory(use_lbfgs ? cfg.memory : 0);
    std::size_t ls_evals_total = 0;
    rec.converged_by = StopReason::max_iter;

    if (norm_inf(g) <= kGradAbsTol) {
        rec.converged_by = StopReason::gradient;
    } else {
        while (rec.iterations < cfg.max_iter) {
            Vector d;
            double tau_for_trace;
            if (use_lbfgs) {
                OperatorPtr reg = cfg.strategy.scaled_identity() ? nullptr
                                                                 : obj.regularizer_hessian(x);
                auto [metric, tau] =
                    build_initial_metric(cfg.strategy, memory.newest(), reg, cfg.tau_min);
                d = negated(two_loop_apply(memory, g, metric, cfg.pcg));
                tau_for_trace = tau.tau;
            } else {
                d = negated(g);
                tau_for_trace = 1.0;
            }

            // Inexact PCG can produce a non-descent direction; fall back to
            // steepest descent for this iteration.
            if (dot(d, g) >= 0.0) {
                d = negated(g);
                ++rec.non_descent_resets;
            }

            LineSearchResult ls = armijo_backtrack(obj, x, d, value, g, cfg.armijo);
            rec.fevals += static_cast<std::size_t>(ls.trials);
            if (!ls.success) {
                rec.converged_by = StopReason::line_search_failure;
                break;
            }

            ++rec.iterations;
            ls_evals_total += static_cast<std::size_t>(ls.trials);
            rec.tau_trace.push_back(tau_for_trace);

            if (use_lbfgs) {
                Vector p = sub(ls.x_new, x);
                Vector y = sub(ls.grad_new, g);
                const double py = dot(p, y);
                if (py > cfg.curvature_threshold * norm2(y) * norm2(p))
                    memory.push(SecantPair{std::move(p), std::move(y), py});
                else
                    ++rec.skipped_pairs;
            }

            StopReason reason = StopReason::not_stopped;
            if (cfg.target) {
                if (norm_inf(ls.grad_new) <= kGradAbsTol)
                    reason = StopReason::gradient;
                else if (target_norm > 0.0 &&
                         norm2(sub(ls.x_new, *cfg.target)) <= cfg.target_rel_tol * target_norm)
                    reason = StopReason::target;
            } else {
                reason = check_stopping({value, x, g}, {ls.value_new, ls.x_new, ls.grad_new},
                                        rec.initial_value, cfg.stop);
            }

            x = std::move(ls.x_new);
            value = ls.value_new;
            g = std::move(ls.grad_new);

            if (reason != StopReason::not_stopped) {
                rec.converged_by = reason;
                break;
            }
        }
    }

    rec.final_value = value;
    rec.final_grad_norm_inf = norm_inf(g);
    rec.reduction = rec.initial_value != 0.0 ? value / rec.initial_value : 1.0;
    rec.avg_ls_per_iter = rec.iterations > 0
                              ? static_cast<double>(ls_evals_total) / static_cast<double>(rec.iterations)
                              : 0.0;
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(x), std::move(rec)};
}

}  // namespace

std::pair<Vector, RunRecord> lbfgs_minimize(const Objective& obj, const Vector& x0,
                                            const OptimizerConfig& cfg) {
    return minimize_impl(obj, x0, cfg, true);
}

std::pair<Vector, RunRecord> steepest_descent_minimize(const Objective& obj, const Vector& x0,
                                                       const OptimizerConfig& cfg) {
    return minimize_impl(obj, x0, cfg, false);
}

}  // namespace qnopt

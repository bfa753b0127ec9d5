#pragma once

#include <deque>
#include <optional>
#include <string>
#include <utility>

#include "qnopt/pcg.hpp"
#include "qnopt/scaling.hpp"

namespace qnopt {

/// Objective with an explicitly accessible regularizer Hessian. eval()
/// computes value and gradient together and counts as one function
/// evaluation.
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t dim() const = 0;
    virtual double eval(const Vector& x, Vector& grad) const = 0;
    /// Hessian of the regularizer part at x; constant for the built-in
    /// problem families.
    virtual OperatorPtr regularizer_hessian(const Vector& x) const = 0;
};

/// Bounded FIFO of secant pairs with cached rho = 1/(y.p). Oldest pair is
/// evicted first once capacity is reached; callers must only push pairs that
/// passed the curvature test.
class LbfgsMemory {
public:
    explicit LbfgsMemory(std::size_t capacity) : capacity_(capacity) {}

    void push(SecantPair pair);
    void clear();

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const SecantPair& pair(std::size_t i) const { return pairs_[i]; }  // i = 0 is oldest
    double rho(std::size_t i) const { return rho_[i]; }
    const SecantPair* newest() const { return pairs_.empty() ? nullptr : &pairs_.back(); }

private:
    std::size_t capacity_;
    std::deque<SecantPair> pairs_;
    std::deque<double> rho_;
};

/// Two-loop recursion applying the L-BFGS inverse metric to g. The center
/// step is either r = gamma*q or the PCG solve of B0 r = q.
Vector two_loop_apply(const LbfgsMemory& memory, const Vector& g, double gamma);
Vector two_loop_apply(const LbfgsMemory& memory, const Vector& g, const LinearOperator& b0,
                      const PcgConfig& pcg);
Vector two_loop_apply(const LbfgsMemory& memory, const Vector& g, const InitialMetric& metric,
                      const PcgConfig& pcg);

struct ArmijoConfig {
    double c1 = 1e-4;
    double shrink = 0.5;
    int max_trials = 50;
};

struct LineSearchResult {
    bool success = false;
    double step = 0.0;
    int trials = 0;  // objective evaluations performed; accepted-at-once is 1
    Vector x_new;
    double value_new = 0.0;
    Vector grad_new;
};

/// Armijo backtracking from t = 1: accepts the largest t in {1, s, s^2, ...}
/// with J(x + t d) <= J0 + c1 t (g0 . d). Requires a descent direction;
/// throws std::invalid_argument when d.g0 >= 0. On exhaustion returns
/// success = false with the inputs echoed back.
LineSearchResult armijo_backtrack(const Objective& obj, const Vector& x, const Vector& d,
                                  double value0, const Vector& grad0, const ArmijoConfig& cfg);

struct StoppingTols {
    double eps_J = 1e-5;
    double eps_W = 1e-1;
    double eps_G = 1e-2;
};

enum class StopReason {
    not_stopped,
    gradient,      // |g|_inf <= 1e-12
    all_three,     // value, iterate and gradient tests all hold
    max_iter,
    target,        // known minimizer reached to target_rel_tol
    line_search_failure,
};

std::string to_string(StopReason reason);

struct IterateSnapshot {
    double value = 0.0;
    Vector x;
    Vector grad;
};

/// Composite stopping rule on two consecutive iterates:
///   |J_prev - J_cur|    <= eps_J * (1 + |J0|)
///   |x_prev - x_cur|_inf <= eps_W * (1 + |x_cur|_inf)
///   |g_cur|_inf          <= eps_G * (1 + |J0|)
/// all three must hold. An exactly stationary gradient (|g|_inf <= 1e-12)
/// stops on its own.
StopReason check_stopping(const IterateSnapshot& prev, const IterateSnapshot& cur, double value0,
                          const StoppingTols& tols);

struct OptimizerConfig {
    std::size_t memory = 5;     // secant pairs kept; use max_iter for unbounded
    std::size_t max_iter = 5000;
    StoppingTols stop;
    ArmijoConfig armijo;
    double curvature_threshold = 1e-10;  // store pair iff y.p > threshold*|y||p|
    PcgConfig pcg;
    Strategy strategy;
    double tau_min = 1e-6;

    /// When set, the run stops once |x - target|/|target| <= target_rel_tol
    /// (or at max_iter) instead of using the composite rule.
    std::optional<Vector> target;
    double target_rel_tol = 1e-5;
};

struct RunRecord {
    std::size_t iterations = 0;
    std::size_t fevals = 0;  // combined value+gradient evaluations
    double avg_ls_per_iter = 0.0;
    double reduction = 1.0;  // J(x_final) / J(x0)
    double wall_time_s = 0.0;
    StopReason converged_by = StopReason::max_iter;
    std::vector<double> tau_trace;  // per-iteration tau (or gamma)

    double initial_value = 0.0;
    double final_value = 0.0;
    double final_grad_norm_inf = 0.0;
    std::size_t skipped_pairs = 0;
    std::size_t non_descent_resets = 0;
};

/// L-BFGS with the configured initial-metric strategy: per iteration builds
/// the metric from the newest stored pair, applies the two-loop recursion,
/// backtracks, then stores (or skips) the new secant pair.
std::pair<Vector, RunRecord> lbfgs_minimize(const Objective& obj, const Vector& x0,
                                            const OptimizerConfig& cfg);

/// Steepest descent baseline: d = -g with the same line search and stopping
/// machinery.
std::pair<Vector, RunRecord> steepest_descent_minimize(const Objective& obj, const Vector& x0,
                                                       const OptimizerConfig& cfg);

}  // namespace qnopt

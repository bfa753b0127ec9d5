#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "qnopt/operators.hpp"

namespace qnopt {

/// Initial-metric strategies for the L-BFGS center step.
///
/// Id, LSy, LSp keep a pure scaled identity H0 = gamma*I applied directly in
/// the two-loop recursion. Fair, Dp, Dz, Du, Gm build the operator form
/// B0 = tau*I + A (A the regularizer Hessian), whose inverse action is
/// obtained with a capped PCG solve.
enum class StrategyTag { Id, LSy, LSp, Fair, Dp, Dz, Du, Gm };

struct Strategy {
    StrategyTag tag = StrategyTag::Id;
    double fair_factor = 1e-3;  // Fair only: tau = fair_factor * diag(A)[0]

    bool scaled_identity() const {
        return tag == StrategyTag::Id || tag == StrategyTag::LSy || tag == StrategyTag::LSp;
    }
};

/// Case-insensitive tag names: id, lsy, lsp, fair, dp, dz, du, gm.
StrategyTag parse_strategy_tag(std::string_view name);
std::string to_string(StrategyTag tag);

/// Step / gradient-difference pair with its cached curvature product.
struct SecantPair {
    Vector p;   // x_{k+1} - x_k
    Vector y;   // grad_{k+1} - grad_k
    double py;  // p . y

    static SecantPair make(Vector p, Vector y);
};

struct TauResult {
    double tau = 0.0;
    bool clamped = false;   // the tau_min floor was active
    bool fallback = false;  // p.z degeneracy rerouted Dz/Du to the Gm value
};

/// z = y - A p: the share of the gradient change not explained by the
/// regularizer Hessian.
Vector compute_z(const SecantPair& pair, const LinearOperator& A);

/// Least-squares fit of tau*p ~ z in the p-residual: tau = max(p.z/p.p, tau_min).
TauResult tau_dp(const Vector& p, const Vector& z, double tau_min);

/// Least-squares fit in the z-residual: tau = max(z.z/p.z, tau_min).
/// Falls back to the Gm value when |p.z| <= 1e-12 |p||z|.
TauResult tau_dz(const Vector& p, const Vector& z, double tau_min);

/// Total least squares: with delta = p.z and
/// lambda = (|p|^2 + |z|^2 - sqrt((|p|^2 - |z|^2)^2 + 4 delta^2)) / 2,
/// tau = max((|z|^2 - lambda)/delta, tau_min). Same degeneracy fallback as Dz.
TauResult tau_du(const Vector& p, const Vector& z, double tau_min);

/// Geometric-mean regression: tau = max(|z|/|p|, tau_min).
TauResult tau_gm(const Vector& p, const Vector& z, double tau_min);

/// Inverse-metric scalings gamma for H0 = gamma*I. Require p.y > 0
/// (guaranteed for stored pairs by the curvature-skip rule).
double tau_lsy(const SecantPair& pair);  // y.p / y.y
double tau_lsp(const SecantPair& pair);  // p.p / y.p

/// Center-step metric for one iteration: either a scaled identity applied
/// directly, or the SPD operator B0 = tau*I + A solved by PCG.
struct InitialMetric {
    double gamma = 1.0;
    OperatorPtr b0;  // null for the scaled-identity form

    bool uses_operator() const { return b0 != nullptr; }
};

/// Builds the metric from the newest stored pair (pass nullptr before one
/// exists: the operator strategies then use tau = tau_min and the identity
/// strategies gamma = 1). reg_hessian may be null for Id/LSy/LSp.
std::pair<InitialMetric, TauResult> build_initial_metric(const Strategy& strategy,
                                                         const SecantPair* newest_pair,
                                                         const OperatorPtr& reg_hessian,
                                                         double tau_min);

}  // namespace qnopt

#pragma once

#include <functional>

#include "qnopt/operators.hpp"

namespace qnopt {

struct PcgConfig {
    double rel_tol = 1e-6;
    std::size_t max_iter = 100;
};

struct PcgResult {
    Vector solution;
    std::size_t iterations = 0;
    double final_rel_residual = 0.0;  // |b - op(x)| / |b|, recomputed
    bool converged = false;
};

/// Called with the current iterate after each update.
using PcgObserver = std::function<void(const Vector&)>;

/// Jacobi-preconditioned conjugate gradient for SPD operators. Starts from
/// the zero vector; the preconditioner is diag(op) with entries clamped below
/// at 1e-12. Returns the best iterate with converged=false when the relative
/// residual is still above rel_tol after max_iter iterations; callers proceed
/// with the inexact result. Throws std::runtime_error on numerical breakdown.
PcgResult pcg_solve(const LinearOperator& op, const Vector& b, const PcgConfig& cfg = {},
                    const PcgObserver& observer = {});

}  // namespace qnopt

#pragma once

#include <cstdint>

#include "qnopt/lbfgs.hpp"
#include "qnopt/stencils.hpp"

namespace qnopt {

/// Strictly convex quadratic J(x) = 0.5 (x-c)^T (D + alpha R) (x-c) with
/// exponentially decaying data-term eigenvalues D and the 1D zero-boundary
/// Laplacian R as regularizer. Unique minimizer at c.
class QuadraticProblem final : public Objective {
public:
    QuadraticProblem(Vector d_diag, double alpha, Vector c);

    std::size_t dim() const override { return c_.size(); }
    double eval(const Vector& x, Vector& grad) const override;
    OperatorPtr regularizer_hessian(const Vector& /*x*/) const override { return reg_hessian_; }

    const Vector& minimizer() const { return c_; }
    const Vector& data_diag() const { return d_diag_; }
    double alpha() const { return alpha_; }

private:
    Vector d_diag_;
    double alpha_;
    Vector c_;
    OperatorPtr laplacian_;    // R
    OperatorPtr reg_hessian_;  // alpha * R
};

/// d_diag[i] = exp(-decay_span * i / (n-1)), i = 0..n-1, so the data-term
/// condition number is exp(decay_span) for every n; c is drawn from a seeded
/// uniform(-1, 1).
QuadraticProblem build_quadratic(std::size_t n, double alpha, double decay_span = 14.0,
                                 std::uint64_t seed = 0);

}  // namespace qnopt

#include "qnopt/pcg.hpp"

#include <cmath>
#include <stdexcept>

namespace qnopt {

PcgResult pcg_solve(const LinearOperator& op, const Vector& b, const PcgConfig& cfg,
                    const PcgObserver& observer) {
    if (b.size() != op.dim())
        throw std::invalid_argument("pcg_solve: rhs length does not match operator dim");
    if (!all_finite(b)) throw std::invalid_argument("pcg_solve: non-finite rhs");
    if (!(cfg.rel_tol > 0.0) || cfg.max_iter < 1)
        throw std::invalid_argument("pcg_solve: invalid config");

    const std::size_t n = b.size();
    PcgResult res;
    res.solution.assign(n, 0.0);

    const double norm_b = norm2(b);
    if (norm_b == 0.0) {
        res.converged = true;
        return res;
    }

    Vector inv_diag = op.diagonal();
    for (double& d : inv_diag) d = 1.0 / std::max(d, 1e-12);

    Vector x(n, 0.0);
    Vector r = b;
    Vector z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    Vector p = z;
    Vector ap(n);
    double rz = dot(r, z);

    std::size_t it = 0;
    while (it < cfg.max_iter) {
        op.apply(p, ap);
        const double pap = dot(p, ap);
        const double alpha = rz / pap;
        if (!std::isfinite(alpha))
            throw std::runtime_error("pcg_solve: numerical breakdown (non-finite step)");
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        ++it;
        if (observer) observer(x);
        if (norm2(r) <= cfg.rel_tol * norm_b) break;
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_next = dot(r, z);
        if (!std::isfinite(rz_next))
            throw std::runtime_error("pcg_solve: numerical breakdown (non-finite residual)");
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    if (!all_finite(x)) throw std::runtime_error("pcg_solve: numerical breakdown (non-finite iterate)");

    // Report the true residual, not the recurrence value.
    op.apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) ap[i] = b[i] - ap[i];
    res.solution = std::move(x);
    res.iterations = it;
    res.final_rel_residual = norm2(ap) / norm_b;
    res.converged = res.final_rel_residual <= cfg.rel_tol;
    return res;
}

}  // namespace qnopt

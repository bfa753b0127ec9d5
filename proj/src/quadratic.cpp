#include "qnopt/quadratic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace qnopt {

QuadraticProblem::QuadraticProblem(Vector d_diag, double alpha, Vector c)
    : d_diag_(std::move(d_diag)), alpha_(alpha), c_(std::move(c)) {
    require_same_size(d_diag_, c_, "QuadraticProblem");
    if (c_.size() < 2) throw std::invalid_argument("QuadraticProblem: dimension must be >= 2");
    if (!(alpha_ > 0.0)) throw std::invalid_argument("QuadraticProblem: alpha must be > 0");
    GridSpec grid{{c_.size()}, {1.0}};
    laplacian_ = std::make_shared<LaplacianOperator>(grid);
    reg_hessian_ = std::make_shared<ScaledOperator>(alpha_, laplacian_);
}

double QuadraticProblem::eval(const Vector& x, Vector& grad) const {
    require_same_size(x, c_, "QuadraticProblem::eval");
    Vector r = sub(x, c_);
    reg_hessian_->apply(r, grad);  // alpha * R * r
    for (std::size_t i = 0; i < r.size(); ++i) grad[i] += d_diag_[i] * r[i];
    return 0.5 * dot(r, grad);
}

QuadraticProblem build_quadratic(std::size_t n, double alpha, double decay_span,
                                 std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("build_quadratic: n must be >= 4");
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = std::exp(-decay_span * static_cast<double>(i) / static_cast<double>(n - 1));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vector c(n);
    for (double& v : c) v = uni(rng);
    return QuadraticProblem(std::move(d), alpha, std::move(c));
}

}  // namespace qnopt

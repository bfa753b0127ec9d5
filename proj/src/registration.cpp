#include "qnopt/registration.hpp"

#include <stdexcept>

namespace qnopt {

RegularizerKind parse_regularizer(std::string_view name) {
    if (name == "curvature") return RegularizerKind::curvature;
    if (name == "elastic") return RegularizerKind::elastic;
    throw std::invalid_argument("unknown regularizer '" + std::string(name) + "'");
}

RegistrationProblem::RegistrationProblem(ImageBuffer reference, ImageBuffer templ, double alpha,
                                         RegularizerKind kind, double mu, double lambda,
                                         double spacing_x, double spacing_y)
    : ref_(std::move(reference)), tpl_(std::move(templ)), alpha_(alpha) {
    if (ref_.width != tpl_.width || ref_.height != tpl_.height)
        throw std::invalid_argument("RegistrationProblem: image sizes differ");
    if (!(alpha_ > 0.0)) throw std::invalid_argument("RegistrationProblem: alpha must be > 0");
    grid_ = GridSpec{{ref_.width, ref_.height}, {spacing_x, spacing_y}};
    grid_.validate();
    cell_area_ = spacing_x * spacing_y;

    OperatorPtr reg;
    if (kind == RegularizerKind::curvature)
        reg = std::make_shared<BiharmonicOperator>(grid_, 2);
    else
        reg = std::make_shared<ElasticOperator>(grid_, mu, lambda);
    reg_hessian_ = std::make_shared<ScaledOperator>(alpha_ * cell_area_, std::move(reg));
}

double RegistrationProblem::eval(const Vector& u, Vector& grad) const {
    if (u.size() != dim())
        throw std::invalid_argument("RegistrationProblem::eval: displacement length mismatch");

    const std::size_t nc = grid_.cells();
    const double hx = grid_.spacing[0];
    const double hy = grid_.spacing[1];

    // Regularizer part: grad = alpha h^2 L u, value = 0.5 u . grad.
    reg_hessian_->apply(u, grad);
    double value = 0.5 * dot(u, grad);

    double ssd_acc = 0.0;
    std::size_t c = 0;
    for (std::size_t j = 0; j < grid_.dims[1]; ++j) {
        for (std::size_t i = 0; i < grid_.dims[0]; ++i, ++c) {
            const double cx = (static_cast<double>(i) + 0.5) * hx;
            const double cy = (static_cast<double>(j) + 0.5) * hy;
            // Sample the template at the warped point, in pixel coordinates.
            const InterpSample s =
                interp_bilinear(tpl_, (cx + u[c]) / hx, (cy + u[nc + c]) / hy);
            const double resid = s.value - ref_.at(i, j);
            ssd_acc += resid * resid;
            grad[c] += cell_area_ * resid * s.dx / hx;
            grad[nc + c] += cell_area_ * resid * s.dy / hy;
        }
    }
    return value + 0.5 * cell_area_ * ssd_acc;
}

double RegistrationProblem::ssd(const Vector& u) const {
    if (u.size() != dim())
        throw std::invalid_argument("RegistrationProblem::ssd: displacement length mismatch");
    const std::size_t nc = grid_.cells();
    const double hx = grid_.spacing[0];
    const double hy = grid_.spacing[1];
    double acc = 0.0;
    std::size_t c = 0;
    for (std::size_t j = 0; j < grid_.dims[1]; ++j) {
        for (std::size_t i = 0; i < grid_.dims[0]; ++i, ++c) {
            const double cx = (static_cast<double>(i) + 0.5) * hx;
            const double cy = (static_cast<double>(j) + 0.5) * hy;
            const InterpSample s =
                interp_bilinear(tpl_, (cx + u[c]) / hx, (cy + u[nc + c]) / hy);
            const double resid = s.value - ref_.at(i, j);
            acc += resid * resid;
        }
    }
    return 0.5 * cell_area_ * acc;
}

}  // namespace qnopt

#pragma once

#include "qnopt/image.hpp"
#include "qnopt/lbfgs.hpp"
#include "qnopt/stencils.hpp"

namespace qnopt {

enum class RegularizerKind { curvature, elastic };

RegularizerKind parse_regularizer(std::string_view name);

/// Intensity-based registration objective on a cell-centered displacement
/// field u (component-blocked: all x-displacements, then all y):
///
///   J(u) = 0.5 h^2 sum_c (T(x_c + u_c) - R(x_c))^2  +  0.5 alpha h^2 u^T L u
///
/// with L the curvature (squared Laplacian) or elastic operator and h^2 the
/// cell area. The template is sampled with bilinear interpolation; the
/// regularizer Hessian alpha h^2 L is exposed for the initial-metric
/// strategies. One grid cell per image pixel.
class RegistrationProblem final : public Objective {
public:
    RegistrationProblem(ImageBuffer reference, ImageBuffer templ, double alpha,
                        RegularizerKind kind = RegularizerKind::curvature, double mu = 1.0,
                        double lambda = 0.0, double spacing_x = 1.0, double spacing_y = 1.0);

    std::size_t dim() const override { return 2 * grid_.cells(); }
    double eval(const Vector& u, Vector& grad) const override;
    OperatorPtr regularizer_hessian(const Vector& /*u*/) const override { return reg_hessian_; }

    /// Data term only, 0.5 h^2 sum of squared residuals.
    double ssd(const Vector& u) const;

    const GridSpec& grid() const { return grid_; }
    const ImageBuffer& reference() const { return ref_; }

private:
    ImageBuffer ref_, tpl_;
    GridSpec grid_;
    double alpha_;
    double cell_area_;
    OperatorPtr reg_hessian_;  // alpha * h^2 * L
};

}  // namespace qnopt

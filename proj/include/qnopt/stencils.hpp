#pragma once

#include <cstddef>
#include <vector>

#include "qnopt/operators.hpp"

namespace qnopt {

/// Uniform cell-centered grid. dims[a] is the cell count along axis a
/// (axis 0 has the fastest-running linear index), spacing[a] the cell width.
struct GridSpec {
    std::vector<std::size_t> dims;
    std::vector<double> spacing;

    std::size_t rank() const { return dims.size(); }
    std::size_t cells() const;
    void validate() const;  // throws std::invalid_argument
};

/// Negated discrete Laplacian (-Delta_h): second-order central differences,
/// zero Dirichlet boundary (values outside the grid are 0), scaled 1/h^2 per
/// axis. Acts independently on each of `components` equally-sized blocks of
/// the input. SPD.
class LaplacianOperator final : public LinearOperator {
public:
    explicit LaplacianOperator(GridSpec grid, std::size_t components = 1);

    using LinearOperator::apply;
    std::size_t dim() const override;
    void apply(const Vector& x, Vector& out) const override;
    Vector diagonal() const override;

    const GridSpec& grid() const { return grid_; }
    std::size_t components() const { return components_; }

private:
    GridSpec grid_;
    std::size_t components_;
    std::vector<std::size_t> strides_;
    std::vector<double> inv_h2_;
};

/// Squared Laplacian Delta_h^T Delta_h = Delta_h^2 (curvature-type penalty),
/// realized as two Laplacian passes. Symmetric PSD by construction.
class BiharmonicOperator final : public LinearOperator {
public:
    explicit BiharmonicOperator(GridSpec grid, std::size_t components = 1);

    using LinearOperator::apply;
    std::size_t dim() const override { return lap_.dim(); }
    void apply(const Vector& x, Vector& out) const override;
    Vector diagonal() const override;

    const GridSpec& grid() const { return lap_.grid(); }

private:
    LaplacianOperator lap_;
};

/// Elastic-type operator on a displacement field with one component per grid
/// axis: mu * (-Delta) per component + (mu + lambda) * grad(div), central
/// differences, zero Dirichlet boundary. Symmetric PSD.
class ElasticOperator final : public LinearOperator {
public:
    ElasticOperator(GridSpec grid, double mu = 1.0, double lambda = 0.0);

    using LinearOperator::apply;
    std::size_t dim() const override;
    void apply(const Vector& x, Vector& out) const override;
    Vector diagonal() const override;

    const GridSpec& grid() const { return grid_; }

private:
    GridSpec grid_;
    double mu_, lambda_;
    LaplacianOperator lap_;
    std::vector<std::size_t> strides_;
    std::vector<double> inv_2h_;
};

}  // namespace qnopt

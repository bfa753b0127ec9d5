#include "qnopt/stencils.hpp"

#include <stdexcept>

namespace qnopt {
namespace {

std::vector<std::size_t> make_strides(const GridSpec& grid) {
    std::vector<std::size_t> strides(grid.rank());
    std::size_t s = 1;
    for (std::size_t a = 0; a < grid.rank(); ++a) {
        strides[a] = s;
        s *= grid.dims[a];
    }
    return strides;
}

// Number of in-grid neighbors of coordinate c along an axis of extent n.
inline std::size_t neighbor_count(std::size_t c, std::size_t n) {
    return (c > 0 ? 1u : 0u) + (c + 1 < n ? 1u : 0u);
}

// Advance a mixed-radix coordinate (axis 0 fastest).
inline void advance(std::vector<std::size_t>& coord, const std::vector<std::size_t>& dims) {
    for (std::size_t a = 0; a < dims.size(); ++a) {
        if (++coord[a] < dims[a]) return;
        coord[a] = 0;
    }
}

}  // namespace

std::size_t GridSpec::cells() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
}

void GridSpec::validate() const {
    if (dims.empty()) throw std::invalid_argument("GridSpec: no axes");
    if (spacing.size() != dims.size())
        throw std::invalid_argument("GridSpec: spacing/dims rank mismatch");
    for (std::size_t d : dims)
        if (d < 2) throw std::invalid_argument("GridSpec: all dims must be >= 2");
    for (double h : spacing)
        if (!(h > 0.0)) throw std::invalid_argument("GridSpec: spacing must be > 0");
}

LaplacianOperator::LaplacianOperator(GridSpec grid, std::size_t components)
    : grid_(std::move(grid)), components_(components) {
    grid_.validate();
    if (components_ == 0) throw std::invalid_argument("LaplacianOperator: components must be >= 1");
    strides_ = make_strides(grid_);
    inv_h2_.resize(grid_.rank());
    for (std::size_t a = 0; a < grid_.rank(); ++a)
        inv_h2_[a] = 1.0 / (grid_.spacing[a] * grid_.spacing[a]);
}

std::size_t LaplacianOperator::dim() const { return components_ * grid_.cells(); }

void LaplacianOperator::apply(const Vector& x, Vector& out) const {
    require_dim(x, "LaplacianOperator::apply");
    out.resize(x.size());
    const std::size_t nc = grid_.cells();
    const std::size_t rank = grid_.rank();
    for (std::size_t comp = 0; comp < components_; ++comp) {
        const double* src = x.data() + comp * nc;
        double* dst = out.data() + comp * nc;
        std::vector<std::size_t> coord(rank, 0);
        for (std::size_t i = 0; i < nc; ++i) {
            double acc = 0.0;
            for (std::size_t a = 0; a < rank; ++a) {
                double v = 2.0 * src[i];
                if (coord[a] > 0) v -= src[i - strides_[a]];
                if (coord[a] + 1 < grid_.dims[a]) v -= src[i + strides_[a]];
                acc += v * inv_h2_[a];
            }
            dst[i] = acc;
            advance(coord, grid_.dims);
        }
    }
}

Vector LaplacianOperator::diagonal() const {
    // Zero Dirichlet keeps the center coefficient constant, boundary included.
    double center = 0.0;
    for (double w : inv_h2_) center += 2.0 * w;
    return Vector(dim(), center);
}

BiharmonicOperator::BiharmonicOperator(GridSpec grid, std::size_t components)
    : lap_(std::move(grid), components) {}

void BiharmonicOperator::apply(const Vector& x, Vector& out) const {
    Vector tmp(x.size());
    lap_.apply(x, tmp);
    lap_.apply(tmp, out);
}

Vector BiharmonicOperator::diagonal() const {
    // diag(L^2)_i = |L e_i|^2: squared center coefficient plus one squared
    // off-diagonal weight per existing neighbor.
    const GridSpec& g = lap_.grid();
    const std::size_t rank = g.rank();
    std::vector<double> inv_h2(rank), inv_h4(rank);
    double center = 0.0;
    for (std::size_t a = 0; a < rank; ++a) {
        inv_h2[a] = 1.0 / (g.spacing[a] * g.spacing[a]);
        inv_h4[a] = inv_h2[a] * inv_h2[a];
        center += 2.0 * inv_h2[a];
    }
    const std::size_t nc = g.cells();
    Vector diag(dim());
    std::vector<std::size_t> coord(rank, 0);
    for (std::size_t i = 0; i < nc; ++i) {
        double v = center * center;
        for (std::size_t a = 0; a < rank; ++a)
            v += static_cast<double>(neighbor_count(coord[a], g.dims[a])) * inv_h4[a];
        diag[i] = v;
        advance(coord, g.dims);
    }
    for (std::size_t comp = 1; comp < lap_.components(); ++comp)
        std::copy(diag.begin(), diag.begin() + nc, diag.begin() + comp * nc);
    return diag;
}

ElasticOperator::ElasticOperator(GridSpec grid, double mu, double lambda)
    : grid_(std::move(grid)), mu_(mu), lambda_(lambda), lap_(grid_, grid_.rank()) {
    if (!(mu_ > 0.0)) throw std::invalid_argument("ElasticOperator: mu must be > 0");
    if (mu_ + lambda_ < 0.0) throw std::invalid_argument("ElasticOperator: mu + lambda must be >= 0");
    strides_ = make_strides(grid_);
    inv_2h_.resize(grid_.rank());
    for (std::size_t a = 0; a < grid_.rank(); ++a) inv_2h_[a] = 1.0 / (2.0 * grid_.spacing[a]);
}

std::size_t ElasticOperator::dim() const { return grid_.rank() * grid_.cells(); }

void ElasticOperator::apply(const Vector& x, Vector& out) const {
    require_dim(x, "ElasticOperator::apply");
    lap_.apply(x, out);
    scale(out, mu_);
    const double w = mu_ + lambda_;
    if (w == 0.0) return;

    const std::size_t nc = grid_.cells();
    const std::size_t rank = grid_.rank();

    // div = sum_a D_a x_a with central differences, zero outside the grid.
    Vector div(nc, 0.0);
    std::vector<std::size_t> coord(rank, 0);
    for (std::size_t i = 0; i < nc; ++i) {
        double acc = 0.0;
        for (std::size_t a = 0; a < rank; ++a) {
            const double* comp = x.data() + a * nc;
            double fwd = coord[a] + 1 < grid_.dims[a] ? comp[i + strides_[a]] : 0.0;
            double bwd = coord[a] > 0 ? comp[i - strides_[a]] : 0.0;
            acc += (fwd - bwd) * inv_2h_[a];
        }
        div[i] = acc;
        advance(coord, grid_.dims);
    }

    // grad(div) contribution: D_a^T div = -D_a div for the zero-boundary
    // central-difference matrix, keeping the assembled operator symmetric PSD.
    coord.assign(rank, 0);
    for (std::size_t i = 0; i < nc; ++i) {
        for (std::size_t a = 0; a < rank; ++a) {
            double fwd = coord[a] + 1 < grid_.dims[a] ? div[i + strides_[a]] : 0.0;
            double bwd = coord[a] > 0 ? div[i - strides_[a]] : 0.0;
            out[a * nc + i] += w * (bwd - fwd) * inv_2h_[a];
        }
        advance(coord, grid_.dims);
    }
}

Vector ElasticOperator::diagonal() const {
    const std::size_t nc = grid_.cells();
    const std::size_t rank = grid_.rank();
    double lap_center = 0.0;
    for (std::size_t a = 0; a < rank; ++a)
        lap_center += 2.0 / (grid_.spacing[a] * grid_.spacing[a]);
    const double w = mu_ + lambda_;

    Vector diag(dim());
    std::vector<std::size_t> coord(rank, 0);
    for (std::size_t i = 0; i < nc; ++i) {
        for (std::size_t a = 0; a < rank; ++a) {
            // diag(D_a^T D_a)_i counts one (1/2h)^2 per existing neighbor.
            double grad_div = static_cast<double>(neighbor_count(coord[a], grid_.dims[a])) *
                              inv_2h_[a] * inv_2h_[a];
            diag[a * nc + i] = mu_ * lap_center + w * grad_div;
        }
        advance(coord, grid_.dims);
    }
    return diag;
}

}  // namespace qnopt

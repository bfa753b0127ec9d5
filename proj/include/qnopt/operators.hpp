#pragma once

#include <memory>

#include "qnopt/vector_ops.hpp"

namespace qnopt {

/// Matrix-free symmetric linear operator: an apply() and its main diagonal
/// (the diagonal feeds the Jacobi preconditioner). Implementations are
/// immutable after construction and safe to share across threads; apply()
/// reads its input and writes only the output buffer.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual std::size_t dim() const = 0;
    virtual void apply(const Vector& x, Vector& out) const = 0;
    virtual Vector diagonal() const = 0;

    Vector apply(const Vector& x) const {
        Vector out(dim());
        apply(x, out);
        return out;
    }

protected:
    void require_dim(const Vector& x, const char* where) const {
        if (x.size() != dim())
            throw std::invalid_argument(std::string(where) + ": vector length " +
                                        std::to_string(x.size()) + " does not match operator dim " +
                                        std::to_string(dim()));
    }
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class ZeroOperator final : public LinearOperator {
public:
    explicit ZeroOperator(std::size_t n) : n_(n) {}
    using LinearOperator::apply;
    std::size_t dim() const override { return n_; }
    void apply(const Vector& x, Vector& out) const override {
        require_dim(x, "ZeroOperator::apply");
        out.assign(n_, 0.0);
    }
    Vector diagonal() const override { return Vector(n_, 0.0); }

private:
    std::size_t n_;
};

class DiagonalOperator final : public LinearOperator {
public:
    explicit DiagonalOperator(Vector d) : d_(std::move(d)) {}
    using LinearOperator::apply;
    std::size_t dim() const override { return d_.size(); }
    void apply(const Vector& x, Vector& out) const override {
        require_dim(x, "DiagonalOperator::apply");
        out.resize(d_.size());
        for (std::size_t i = 0; i < d_.size(); ++i) out[i] = d_[i] * x[i];
    }
    Vector diagonal() const override { return d_; }

private:
    Vector d_;
};

/// c * base
class ScaledOperator final : public LinearOperator {
public:
    ScaledOperator(double c, OperatorPtr base) : c_(c), base_(std::move(base)) {
        if (!base_) throw std::invalid_argument("ScaledOperator: null base");
    }
    using LinearOperator::apply;
    std::size_t dim() const override { return base_->dim(); }
    void apply(const Vector& x, Vector& out) const override {
        base_->apply(x, out);
        scale(out, c_);
    }
    Vector diagonal() const override { return scaled(base_->diagonal(), c_); }

private:
    double c_;
    OperatorPtr base_;
};

/// tau*I + base. SPD whenever tau > 0 and base is PSD.
class ShiftedOperator final : public LinearOperator {
public:
    ShiftedOperator(double tau, OperatorPtr base) : tau_(tau), base_(std::move(base)) {
        if (!base_) throw std::invalid_argument("ShiftedOperator: null base");
    }
    using LinearOperator::apply;
    std::size_t dim() const override { return base_->dim(); }
    void apply(const Vector& x, Vector& out) const override {
        base_->apply(x, out);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] += tau_ * x[i];
    }
    Vector diagonal() const override {
        Vector d = base_->diagonal();
        for (double& v : d) v += tau_;
        return d;
    }
    double tau() const { return tau_; }
    const OperatorPtr& base() const { return base_; }

private:
    double tau_;
    OperatorPtr base_;
};

}  // namespace qnopt

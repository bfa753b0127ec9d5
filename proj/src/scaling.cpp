#include "qnopt/scaling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qnopt {
namespace {

constexpr double kDegeneracyFactor = 1e-12;  // |p.z| <= factor*|p||z| is degenerate
constexpr double kGammaFloor = 1e-12;

void require_nonzero_p(double pp) {
    if (pp == 0.0) throw std::invalid_argument("scaling: degenerate secant pair (p = 0)");
}

bool delta_degenerate(double delta, double np, double nz) {
    return std::abs(delta) <= kDegeneracyFactor * np * nz;
}

TauResult clamp_tau(double raw, double tau_min) {
    TauResult res;
    res.clamped = raw < tau_min;
    res.tau = res.clamped ? tau_min : raw;
    return res;
}

}  // namespace

StrategyTag parse_strategy_tag(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "id") return StrategyTag::Id;
    if (s == "lsy") return StrategyTag::LSy;
    if (s == "lsp") return StrategyTag::LSp;
    if (s == "fair") return StrategyTag::Fair;
    if (s == "dp") return StrategyTag::Dp;
    if (s == "dz") return StrategyTag::Dz;
    if (s == "du") return StrategyTag::Du;
    if (s == "gm") return StrategyTag::Gm;
    throw std::invalid_argument("unknown strategy tag '" + std::string(name) + "'");
}

std::string to_string(StrategyTag tag) {
    switch (tag) {
        case StrategyTag::Id: return "id";
        case StrategyTag::LSy: return "lsy";
        case StrategyTag::LSp: return "lsp";
        case StrategyTag::Fair: return "fair";
        case StrategyTag::Dp: return "dp";
        case StrategyTag::Dz: return "dz";
        case StrategyTag::Du: return "du";
        case StrategyTag::Gm: return "gm";
    }
    return "?";
}

SecantPair SecantPair::make(Vector p, Vector y) {
    require_same_size(p, y, "SecantPair");
    double py = dot(p, y);
    return SecantPair{std::move(p), std::move(y), py};
}

Vector compute_z(const SecantPair& pair, const LinearOperator& A) {
    Vector ap = A.apply(pair.p);
    return sub(pair.y, ap);
}

TauResult tau_dp(const Vector& p, const Vector& z, double tau_min) {
    require_same_size(p, z, "tau_dp");
    const double pp = dot(p, p);
    require_nonzero_p(pp);
    return clamp_tau(dot(p, z) / pp, tau_min);
}

TauResult tau_gm(const Vector& p, const Vector& z, double tau_min) {
    require_same_size(p, z, "tau_gm");
    const double np = norm2(p);
    require_nonzero_p(np);
    return clamp_tau(norm2(z) / np, tau_min);
}

TauResult tau_dz(const Vector& p, const Vector& z, double tau_min) {
    require_same_size(p, z, "tau_dz");
    const double np = norm2(p);
    require_nonzero_p(np);
    const double delta = dot(p, z);
    if (delta_degenerate(delta, np, norm2(z))) {
        TauResult res = tau_gm(p, z, tau_min);
        res.fallback = true;
        return res;
    }
    return clamp_tau(dot(z, z) / delta, tau_min);
}

TauResult tau_du(const Vector& p, const Vector& z, double tau_min) {
    require_same_size(p, z, "tau_du");
    const double np = norm2(p);
    require_nonzero_p(np);
    const double delta = dot(p, z);
    const double nz = norm2(z);
    if (delta_degenerate(delta, np, nz)) {
        TauResult res = tau_gm(p, z, tau_min);
        res.fallback = true;
        return res;
    }
    const double pp = np * np;
    const double zz = nz * nz;
    const double disc = std::sqrt((pp - zz) * (pp - zz) + 4.0 * delta * delta);
    const double lambda = 0.5 * (pp + zz - disc);
    return clamp_tau((zz - lambda) / delta, tau_min);
}

double tau_lsy(const SecantPair& pair) {
    if (pair.py <= 0.0)
        throw std::invalid_argument("tau_lsy: requires positive curvature p.y > 0");
    return pair.py / dot(pair.y, pair.y);
}

double tau_lsp(const SecantPair& pair) {
    if (pair.py <= 0.0)
        throw std::invalid_argument("tau_lsp: requires positive curvature p.y > 0");
    return dot(pair.p, pair.p) / pair.py;
}

std::pair<InitialMetric, TauResult> build_initial_metric(const Strategy& strategy,
                                                         const SecantPair* newest_pair,
                                                         const OperatorPtr& reg_hessian,
                                                         double tau_min) {
    InitialMetric metric;
    TauResult tau;

    if (strategy.scaled_identity()) {
        double gamma = 1.0;
        bool clamped = false;
        if (newest_pair != nullptr && strategy.tag != StrategyTag::Id) {
            gamma = strategy.tag == StrategyTag::LSy ? tau_lsy(*newest_pair)
                                                     : tau_lsp(*newest_pair);
            if (gamma < kGammaFloor) {
                gamma = kGammaFloor;
                clamped = true;
            }
        }
        metric.gamma = gamma;
        tau = TauResult{gamma, clamped, false};
        return {metric, tau};
    }

    if (!reg_hessian)
        throw std::invalid_argument("build_initial_metric: strategy requires the regularizer Hessian");

    switch (strategy.tag) {
        case StrategyTag::Fair:
            tau.tau = strategy.fair_factor * reg_hessian->diagonal()[0];
            break;
        case StrategyTag::Dp:
        case StrategyTag::Dz:
        case StrategyTag::Du:
        case StrategyTag::Gm:
            if (newest_pair == nullptr) {
                tau.tau = tau_min;  // no secant information yet
            } else {
                Vector z = compute_z(*newest_pair, *reg_hessian);
                switch (strategy.tag) {
                    case StrategyTag::Dp: tau = tau_dp(newest_pair->p, z, tau_min); break;
                    case StrategyTag::Dz: tau = tau_dz(newest_pair->p, z, tau_min); break;
                    case StrategyTag::Du: tau = tau_du(newest_pair->p, z, tau_min); break;
                    default: tau = tau_gm(newest_pair->p, z, tau_min); break;
                }
            }
            break;
        default:
            throw std::logic_error("build_initial_metric: unhandled strategy");
    }

    metric.b0 = std::make_shared<ShiftedOperator>(tau.tau, reg_hessian);
    return {metric, tau};
}

}  // namespace qnopt

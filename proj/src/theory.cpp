#include "bpa/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpa {

namespace {
constexpr double kBracketDelta = 1e-9;
constexpr double kSymmetryTol = 1e-9;

bool offspring_symmetric(double mx, double my) {
    return std::fabs(mx - my) <= kSymmetryTol * std::max(1.0, std::fabs(mx));
}

// Dividing the smaller limit and complementing the larger one keeps
// beta(a,b) + beta(b,a) == 1 exact in floating point.
double attack_share(double mxy_star, double myx_star) {
    const double sum = mxy_star + myx_star;
    return myx_star <= mxy_star ? myx_star / sum : 1.0 - mxy_star / sum;
}
} // namespace

const char *to_string(EquilibriumClass c) {
    switch (c) {
    case EquilibriumClass::BothExtinct:
        return "both-extinct";
    case EquilibriumClass::YOnly:
        return "y-only";
    case EquilibriumClass::XOnly:
        return "x-only";
    case EquilibriumClass::Coexist:
        return "coexist";
    case EquilibriumClass::Unresolved:
        return "unresolved";
    }
    return "?";
}

double extinction_root(const OffspringLaw &law) {
    const double m = mean(law);
    if (!(m > 1.0))
        throw std::invalid_argument("extinction_root: law must be supercritical (mean > 1)");
    const double p0 = prob_zero(law);
    if (!(p0 > 0.0) || !(p0 < 1.0))
        throw std::invalid_argument("extinction_root: requires 0 < P(xi = 0) < 1");

    // f is convex with f(0) = p0 > 0 and f(1-d) < 1-d under supercriticality,
    // so the crossing in the bracket is unique; bisection cannot miss it.
    double lo = 0.0, hi = 1.0 - kBracketDelta;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pgf(law, mid) - mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double q = 0.5 * (lo + hi);
    if (std::fabs(pgf(law, q) - q) > 1e-12)
        throw std::runtime_error("extinction_root: residual exceeds 1e-12");
    return q;
}

BpnaProbabilities bpna_probabilities(double q_star_x, double q_star_y, std::uint64_t x0,
                                     std::uint64_t y0) {
    if (!(q_star_x >= 0.0 && q_star_x < 1.0) || !(q_star_y >= 0.0 && q_star_y < 1.0))
        throw std::invalid_argument("bpna_probabilities: q* inputs must lie in [0,1)");
    BpnaProbabilities r;
    r.extinct_x = std::pow(q_star_x, (double)x0);
    r.extinct_y = std::pow(q_star_y, (double)y0);
    r.extinct_total = r.extinct_x * r.extinct_y;
    r.coexist = (1.0 - r.extinct_x) * (1.0 - r.extinct_y);
    return r;
}

SymmetricRatio symmetric_ratio(double mxy_star, double myx_star, double m) {
    if (!(mxy_star + myx_star > 0.0))
        throw std::invalid_argument("symmetric_ratio: attack limits must not both be zero");
    if (!(mxy_star >= 0.0) || !(myx_star >= 0.0))
        throw std::invalid_argument("symmetric_ratio: attack limits must be >= 0");
    const double beta = attack_share(mxy_star, myx_star);
    return {beta, (m - 1.0) * beta};
}

AsymmetricRatio asymmetric_ratio(double mx, double my, double mxy_star, double myx_star) {
    if (!(mx > my))
        throw std::invalid_argument("asymmetric_ratio: requires m_x > m_y (swap labels otherwise)");
    if (mx - my < 1e-9)
        throw std::invalid_argument("asymmetric_ratio: means nearly equal, use symmetric_ratio");
    if (!(mxy_star >= 0.0) || !(myx_star >= 0.0))
        throw std::invalid_argument("asymmetric_ratio: attack limits must be >= 0");
    const double sum = mxy_star + myx_star;
    const double gap = mx - my;
    const double beta = 0.5 + (sum - std::sqrt(gap * gap + sum * sum)) / (2.0 * gap);
    const double psi = my - 1.0 + beta * gap;
    return {beta, psi, beta * psi};
}

std::array<LimitPoint, 4> limit_set(const ModelParams &params) {
    const double mx = mean(params.offspring_x), my = mean(params.offspring_y);
    if (!offspring_symmetric(mx, my))
        throw std::invalid_argument("limit_set: offspring means must be equal");
    return candidate_limits(params);
}

std::array<LimitPoint, 4> candidate_limits(const ModelParams &params) {
    const double mx = mean(params.offspring_x), my = mean(params.offspring_y);
    const double mxy = attack_mean_limit(params.attack_xy);
    const double myx = attack_mean_limit(params.attack_yx);

    LimitPoint coexist{EquilibriumClass::Coexist, 0, 0};
    if (mxy + myx <= 0.0) {
        // No attack: the co-existence ratio is not pinned to a fixed point.
        coexist.psi = std::max(mx, my) - 1.0;
        coexist.theta = std::numeric_limits<double>::quiet_NaN();
    } else if (offspring_symmetric(mx, my)) {
        const auto r = symmetric_ratio(mxy, myx, mx);
        coexist.psi = mx - 1.0;
        coexist.theta = r.theta_l;
    } else if (mx > my) {
        const auto r = asymmetric_ratio(mx, my, mxy, myx);
        coexist.psi = r.psi_al;
        coexist.theta = r.theta_al;
    } else {
        // y dominates: compute in the mirrored orientation, then express
        // theta for the x share again.
        const auto r = asymmetric_ratio(my, mx, myx, mxy);
        coexist.psi = r.psi_al;
        coexist.theta = r.psi_al - r.theta_al;
    }
    return {LimitPoint{EquilibriumClass::BothExtinct, 0.0, 0.0},
            LimitPoint{EquilibriumClass::YOnly, my - 1.0, 0.0},
            LimitPoint{EquilibriumClass::XOnly, mx - 1.0, mx - 1.0}, coexist};
}

TheoryReport theory_report(const ModelParams &params) {
    TheoryReport r;
    const double mx = mean(params.offspring_x), my = mean(params.offspring_y);
    r.alpha_x = params.lambda * (mx - 1.0);
    r.alpha_y = params.lambda * (my - 1.0);
    r.q_star_x = extinction_root(params.offspring_x);
    r.q_star_y = extinction_root(params.offspring_y);
    r.bpna = bpna_probabilities(r.q_star_x, r.q_star_y, params.x0, params.y0);

    const double mxy = attack_mean_limit(params.attack_xy);
    const double myx = attack_mean_limit(params.attack_yx);
    if (mxy + myx > 0.0) {
        r.beta_l = attack_share(mxy, myx);
        if (offspring_symmetric(mx, my)) {
            r.theta_l = (mx - 1.0) * r.beta_l;
        } else if (mx > my) {
            r.asymmetric = asymmetric_ratio(mx, my, mxy, myx);
        } else {
            r.asymmetric = asymmetric_ratio(my, mx, myx, mxy);
            r.asymmetric_swapped = true;
        }
    }
    r.limit_points = candidate_limits(params);
    return r;
}

} // namespace bpa

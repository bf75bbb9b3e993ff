#pragma once

#include <array>
#include <optional>

#include "bpa/bpa_core.hpp"

namespace bpa {

enum class EquilibriumClass { BothExtinct, YOnly, XOnly, Coexist, Unresolved };
const char *to_string(EquilibriumClass c);

/// Unique fixed point q* of the offspring PGF in [0,1), located by
/// bracketed bisection on [0, 1-1e-9]; |f(q*) - q*| <= 1e-12.
/// Requires a supercritical law with 0 < P(xi=0) < 1.
double extinction_root(const OffspringLaw &law);

/// No-attack limits: each line dies independently with probability
/// q*^(initial size).
struct BpnaProbabilities {
    double extinct_x, extinct_y, extinct_total, coexist;
};
BpnaProbabilities bpna_probabilities(double q_star_x, double q_star_y, std::uint64_t x0,
                                     std::uint64_t y0);

/// Co-existence ratio when both offspring means equal m:
///   beta = m_yx* / (m_xy* + m_yx*),  theta = (m - 1) * beta.
struct SymmetricRatio {
    double beta_l, theta_l;
};
SymmetricRatio symmetric_ratio(double mxy_star, double myx_star, double m);

/// Conjectured co-existence equilibrium when m_x > m_y (strictly; callers
/// swap labels when y dominates). Depends on the attack limits only through
/// their sum.
struct AsymmetricRatio {
    double beta_al, psi_al, theta_al;
};
AsymmetricRatio asymmetric_ratio(double mx, double my, double mxy_star, double myx_star);

struct LimitPoint {
    EquilibriumClass label;
    double psi, theta;
};

/// The four candidate limits of (psi_n, theta_n) for symmetric offspring.
std::array<LimitPoint, 4> limit_set(const ModelParams &params);

/// Same, but also covering the asymmetric case (conjectured coexist point).
std::array<LimitPoint, 4> candidate_limits(const ModelParams &params);

struct TheoryReport {
    double alpha_x = 0, alpha_y = 0; // lambda * (m_i - 1)
    double q_star_x = 0, q_star_y = 0;
    BpnaProbabilities bpna{};
    double beta_l = 0;
    std::optional<double> theta_l;              // symmetric case only
    std::optional<AsymmetricRatio> asymmetric;  // oriented so the dominant type leads
    bool asymmetric_swapped = false;            // true when y dominates (labels swapped)
    bool asymmetric_conjecture = true;          // the asymmetric equilibrium is conjectural
    std::array<LimitPoint, 4> limit_points{};
};

TheoryReport theory_report(const ModelParams &params);

} // namespace bpa

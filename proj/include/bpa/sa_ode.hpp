#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "bpa/bpa_core.hpp"
#include "bpa/theory.hpp"

namespace bpa {

/// Normalized triplet along a path: psi = S_n/n, theta = X_n/n, and the
/// harmonic clock t_n = sum_{k<n} 1/(k+1).
struct Theta {
    double psi = 0, theta = 0, t = 0;
};

/// H_n = 1 + 1/2 + ... + 1/n, accumulated left to right. Matches the
/// tracker's clock bit for bit for n <= 1e7 (checkpointed partial sums);
/// asymptotic expansion beyond.
double harmonic_time(std::uint64_t n);

/// eta(t) = max{n : H_n <= t}. Exact against harmonic_time for n <= 1e7;
/// for larger t inverted through exp(t - gamma) with a +-2 candidate
/// search on the expansion (consecutive H values drop below double
/// resolution long after the attack means have saturated, so nothing
/// downstream can tell).
std::uint64_t eta(double t);

/// Integer populations encoded by a triplet: (theta*eta(t), (psi-theta)*eta(t)).
std::pair<std::int64_t, std::int64_t> recover_counts(const Theta &th);

/// Normalized triplets for every point of a full-stride trajectory.
/// Computes the direct ratios and, in parallel, the stochastic-approximation
/// recursion with step 1/(n+1) driven by the per-step increments recovered
/// from the path; the two are the same quantity written two ways, so any
/// relative gap above 1e-6 throws std::logic_error.
std::vector<Theta> track(std::span<const TrajectoryPoint> trajectory);

struct OdeConfig {
    double dt = 0.01;
    double t_end = 10.0;
    bool clamp_theta = true; // project theta into [0, psi] after each step
};

/// Drift of (psi, theta, t) with equal offspring means.
class SymmetricRhs {
  public:
    SymmetricRhs(double m, const AttackSpec &attack_xy, const AttackSpec &attack_yx)
        : m_(m), mxy_(attack_xy), myx_(attack_yx) {}
    std::array<double, 3> operator()(const Theta &th) const;

  private:
    double m_;
    AttackMeanFn mxy_, myx_;
};

/// Drift with dominant-x offspring (m_x > m_y allowed to differ).
class AsymmetricRhs {
  public:
    AsymmetricRhs(double mx, double my, const AttackSpec &attack_xy, const AttackSpec &attack_yx)
        : mx_(mx), my_(my), mxy_(attack_xy), myx_(attack_yx) {}
    std::array<double, 3> operator()(const Theta &th) const;

  private:
    double mx_, my_;
    AttackMeanFn mxy_, myx_;
};

std::array<double, 3> ode_rhs_symmetric(const Theta &th, double m, const AttackSpec &attack_xy,
                                        const AttackSpec &attack_yx);
std::array<double, 3> ode_rhs_asymmetric(const Theta &th, double mx, double my,
                                         const AttackSpec &attack_xy, const AttackSpec &attack_yx);

/// Classical RK4 from start.t to config.t_end; aborts on non-finite values.
std::vector<Theta> integrate(const std::function<std::array<double, 3>(const Theta &)> &rhs,
                             Theta start, const OdeConfig &config);

/// Nearest candidate limit within tol (relative to the psi scale of the
/// model); Unresolved when none is close enough.
EquilibriumClass classify(const Theta &final_state, const ModelParams &params, double tol = 0.05);

/// Drift of the ratio theta/psi (times 1/psi); sign decides which
/// population the path is drifting toward once attack means saturate.
/// Throws std::domain_error at psi = 0.
double ratio_rhs(const Theta &th, const ModelParams &params);

/// Earliest clock time T0 from which the saturation bound
///   eta(T0) * beta_l * (m - 1 - eps) >= max{y_bar k_xy/k_yx, x_bar k_yx/k_xy}
/// holds, computed from measured envelope constants.
double saturation_time(const AssumptionReport &report, double beta_l, double m, double eps);

} // namespace bpa

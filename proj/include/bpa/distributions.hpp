#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "bpa/rng.hpp"

namespace bpa {

// ---------------------------------------------------------------------------
// Offspring / attack count laws.
//
// BinomialOfFriends(F, p) thins a random friend count F by an independent
// per-friend share probability p. When F is Poisson the thinned law is again
// Poisson (mean m_f * p); moments, PGFs and samplers use that identity so the
// common configuration gets exact closed forms.
// ---------------------------------------------------------------------------

struct PoissonCount {
    double mean;
};
struct ConstantCount {
    std::uint64_t k;
};
struct PmfCount {
    std::vector<double> probs; // P(F = i) = probs[i]
};
using CountLaw = std::variant<PoissonCount, ConstantCount, PmfCount>;

struct PoissonThinned {
    double friend_mean;
    double share_prob;
};
struct BinomialOfFriends {
    CountLaw friends;
    double share_prob;
};
struct ExplicitPmf {
    std::vector<double> probs;
};
struct ConstantLaw {
    std::uint64_t k;
};
struct ZeroLaw {};

using OffspringLaw =
    std::variant<PoissonThinned, BinomialOfFriends, ExplicitPmf, ConstantLaw, ZeroLaw>;

/// Throws std::invalid_argument on malformed parameters (probabilities
/// outside [0,1], PMFs that do not sum to 1 within 1e-12, ...).
void validate(const CountLaw &law);
void validate(const OffspringLaw &law);

double mean(const OffspringLaw &law);
double second_moment(const OffspringLaw &law);
double prob_zero(const OffspringLaw &law);

/// E[s^xi] for s in [0,1]; throws std::domain_error outside.
double pgf(const OffspringLaw &law, double s);

double pmf(const OffspringLaw &law, std::uint64_t k);

/// Smallest k with P(xi <= k) >= q.
std::uint64_t percentile(const OffspringLaw &law, double q);

// ---------------------------------------------------------------------------
// Compiled samplers. A LawSampler freezes per-law constants so the hot
// simulation loop pays no setup per draw. Draws are exact, not approximate.
// ---------------------------------------------------------------------------

class LawSampler {
  public:
    static LawSampler compile(const OffspringLaw &law);

    std::uint64_t draw(Rng &rng) const;

    /// True when the law is identically zero; callers may then skip the
    /// draw without consuming randomness.
    bool is_zero() const { return kind_ == Kind::Constant && k_ == 0; }

  private:
    enum class Kind { Constant, PoissonSmall, PoissonLarge, BinomialFixed, FriendPmf, Pmf };

    Kind kind_ = Kind::Constant;
    std::uint64_t k_ = 0;            // Constant
    double mu_ = 0.0;                // Poisson*
    double exp_neg_mu_ = 1.0;        // PoissonSmall
    std::uint64_t n_ = 0;            // BinomialFixed
    double p_ = 0.0;                 // BinomialFixed / FriendPmf
    std::vector<double> cdf_;        // FriendPmf / Pmf
};

std::uint64_t sample_offspring(const OffspringLaw &law, Rng &rng);

// ---------------------------------------------------------------------------
// Attacks: a waking individual converts Bin(min{xi_ij, opposite}, p) members
// of the opposite population, where xi_ij ~ max_attacks.
// ---------------------------------------------------------------------------

struct AttackSpec {
    OffspringLaw max_attacks;
    double success_prob; // per-individual probability that the conversion sticks
};

void validate(const AttackSpec &spec);

class AttackSampler {
  public:
    static AttackSampler compile(const AttackSpec &spec);

    std::uint64_t draw(Rng &rng, std::uint64_t opposite) const {
        if (never_hits_ || opposite == 0)
            return 0;
        const std::uint64_t cap = max_attacks_.draw(rng);
        const std::uint64_t n = cap < opposite ? cap : opposite;
        return rng.binomial(n, success_prob_);
    }

  private:
    LawSampler max_attacks_;
    double success_prob_ = 0.0;
    bool never_hits_ = true;
};

std::uint64_t sample_attack(const AttackSpec &spec, std::uint64_t opposite, Rng &rng);

/// Mean successful attacks against an opposite population of size y:
///    m_ij(y) = p * E[min{xi, y}] = p * sum_{k<y} P(xi > k),
/// with the tail truncated where the survival mass drops below 1e-12.
/// Precomputes the truncated survival prefix once; calls are O(1) for
/// integer-spaced queries and extend piecewise-linearly to real y (the
/// exact value of E[min{xi, y}] for fractional y).
class AttackMeanFn {
  public:
    explicit AttackMeanFn(const AttackSpec &spec);

    double operator()(double y) const;
    double limit() const { return limit_; } // p * E[xi]

  private:
    std::vector<double> prefix_;   // prefix_[j] = sum_{k<j} P(xi > k)
    std::vector<double> survival_; // survival_[k] = P(xi > k)
    double success_prob_ = 0.0;
    double limit_ = 0.0;
};

double attack_mean(const AttackSpec &spec, std::uint64_t opposite);
double attack_mean_limit(const AttackSpec &spec);

// ---------------------------------------------------------------------------
// Model assumption diagnostics (never throws; records verdicts).
// ---------------------------------------------------------------------------

struct AssumptionReport {
    double m_x = 0, m_y = 0;
    // E[xi_x^2], E[xi_y^2], E[xi_xy^2], E[xi_yx^2]
    std::array<double, 4> second_moments{};
    double m_xy_star = 0, m_yx_star = 0;

    bool a1_ok = false;        // supercritical offspring means, finite
    bool zero_prob_ok = false; // 0 < P(xi_i = 0) < 1 for both offspring laws
    bool a2_ok = false;        // finite second moments
    bool a3_ok = false;        // piecewise-linear envelopes hold on the grid
    bool a4_ok = false;        // max-population attack dominance on the grid

    struct A3Params {
        double kappa_xy = 0, kappa_yx = 0;
        double x_bar = 0, y_bar = 0;
    } a3;

    std::vector<std::pair<std::uint64_t, std::uint64_t>> a4_violations; // (u, v), capped
    std::uint64_t a4_violation_count = 0;
};

AssumptionReport validate_assumptions(const OffspringLaw &offspring_x,
                                      const OffspringLaw &offspring_y,
                                      const AttackSpec &attack_xy, const AttackSpec &attack_yx);

} // namespace bpa

#pragma once

#include "bpa/montecarlo.hpp"
#include "bpa/theory.hpp"

namespace bpa {

/// Network-facing parameters of two content providers competing on the
/// same platform. gamma is the fraction of any user set already holding a
/// given post; it thins offspring (shares to fresh users) and feeds the
/// attack channel (shares to holders of the rival post).
struct MarketParams {
    CountLaw friend_law;          // law of a user's friend count
    double eta_x = 0, eta_y = 0;  // per-friend share probabilities (post quality)
    double gamma = 0;             // in [0, 1/2)
    double p_xy = 0, p_yx = 0;    // preference for the newer post
    std::uint64_t seeds_x = 0, seeds_y = 0;
    double lambda = 1.0;
    /// Draw the offspring and attack counts of one wake-up by splitting a
    /// single friend-count draw instead of sampling the two marginals
    /// independently. Same marginal laws, negatively correlated counts.
    bool joint_friend_split = false;
};

void validate(const MarketParams &market);

/// Competing-propagation model: offspring Bin(F, eta(1-2 gamma)), attack
/// capacity Bin(F, eta gamma) succeeding with the preference probability.
ModelParams to_bpa(const MarketParams &market);

/// Independent-propagation baseline: offspring Bin(F, eta), no attack.
ModelParams to_bpna(const MarketParams &market);

struct ComparisonReport {
    ProbabilityEstimates bpa, bpna;
    TheoryReport theory_bpa, theory_bpna;
};

/// Runs the same replication seeds through both models.
ComparisonReport compare(const MarketParams &market, const EstimatorConfig &config);

} // namespace bpa

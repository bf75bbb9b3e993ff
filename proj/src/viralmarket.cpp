#include "bpa/viralmarket.hpp"

#include <cmath>
#include <stdexcept>

namespace bpa {

namespace {

void check_prob(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

/// Event source that draws one friend count per wake-up and splits it
/// three ways: share-to-fresh (offspring), share-to-rival-holder (attack
/// capacity), neither. The transition loop always asks for the offspring
/// draw first and the attack draw second within a wake-up, so the pending
/// capacity is consumed by the matching attack call.
struct JointMarketSource {
    Rng rng;
    LawSampler friends;
    double fresh_x, atk_x; // eta_x(1-2g), eta_x g
    double fresh_y, atk_y;
    double p_xy, p_yx;
    std::uint64_t pending_x = 0, pending_y = 0;

    double gap(double rate) { return rng.exponential(rate); }
    bool wake_is_x(double p_x) { return rng.uniform01() < p_x; }

    std::uint64_t split(double fresh, double atk, std::uint64_t &pending) {
        const std::uint64_t f = friends.draw(rng);
        std::uint64_t off = 0, cap = 0;
        for (std::uint64_t i = 0; i < f; ++i) {
            const double u = rng.uniform01();
            if (u < fresh)
                ++off;
            else if (u < fresh + atk)
                ++cap;
        }
        pending = cap;
        return off;
    }

    std::uint64_t offspring_x() { return split(fresh_x, atk_x, pending_x); }
    std::uint64_t offspring_y() { return split(fresh_y, atk_y, pending_y); }
    std::uint64_t attack_xy(std::uint64_t opposite) {
        return rng.binomial(std::min(pending_x, opposite), p_xy);
    }
    std::uint64_t attack_yx(std::uint64_t opposite) {
        return rng.binomial(std::min(pending_y, opposite), p_yx);
    }
};

} // namespace

void validate(const MarketParams &market) {
    validate(market.friend_law);
    check_prob(market.eta_x, "eta_x");
    check_prob(market.eta_y, "eta_y");
    check_prob(market.p_xy, "p_xy");
    check_prob(market.p_yx, "p_yx");
    if (!(market.gamma >= 0.0) || !(1.0 - 2.0 * market.gamma > 0.0))
        throw std::invalid_argument("MarketParams: gamma must lie in [0, 1/2)");
    if (!(market.lambda > 0.0) || !std::isfinite(market.lambda))
        throw std::invalid_argument("MarketParams: lambda must be > 0");
    if (market.seeds_x + market.seeds_y == 0)
        throw std::invalid_argument("MarketParams: needs at least one seed user");
}

ModelParams to_bpa(const MarketParams &market) {
    validate(market);
    ModelParams p;
    p.lambda = market.lambda;
    p.offspring_x = BinomialOfFriends{market.friend_law, market.eta_x * (1.0 - 2.0 * market.gamma)};
    p.offspring_y = BinomialOfFriends{market.friend_law, market.eta_y * (1.0 - 2.0 * market.gamma)};
    p.attack_xy = AttackSpec{BinomialOfFriends{market.friend_law, market.eta_x * market.gamma},
                             market.p_xy};
    p.attack_yx = AttackSpec{BinomialOfFriends{market.friend_law, market.eta_y * market.gamma},
                             market.p_yx};
    p.x0 = market.seeds_x;
    p.y0 = market.seeds_y;
    p.mode = Mode::Bpa;
    return p;
}

ModelParams to_bpna(const MarketParams &market) {
    validate(market);
    ModelParams p;
    p.lambda = market.lambda;
    p.offspring_x = BinomialOfFriends{market.friend_law, market.eta_x};
    p.offspring_y = BinomialOfFriends{market.friend_law, market.eta_y};
    p.attack_xy = AttackSpec{ZeroLaw{}, 0.0};
    p.attack_yx = AttackSpec{ZeroLaw{}, 0.0};
    p.x0 = market.seeds_x;
    p.y0 = market.seeds_y;
    p.mode = Mode::Bpna;
    return p;
}

ComparisonReport compare(const MarketParams &market, const EstimatorConfig &config) {
    const ModelParams bpa_params = to_bpa(market);
    const ModelParams bpna_params = to_bpna(market);

    ComparisonReport report;
    if (market.joint_friend_split) {
        if (config.replications < 10)
            throw std::invalid_argument("compare: needs at least 10 replications");
        if (!config.stop.time_horizon && !config.stop.survival_cap)
            throw std::invalid_argument("compare: stop rule needs a horizon or a survival cap");
        validate(bpa_params);
        validate(config.stop);
        const CompiledModel model = CompiledModel::compile(bpa_params);
        const LawSampler friends =
            LawSampler::compile(BinomialOfFriends{market.friend_law, 1.0});
        auto one = [&](std::uint64_t i) {
            JointMarketSource src{Rng::stream(config.master_seed, i),
                                  friends,
                                  market.eta_x * (1.0 - 2.0 * market.gamma),
                                  market.eta_x * market.gamma,
                                  market.eta_y * (1.0 - 2.0 * market.gamma),
                                  market.eta_y * market.gamma,
                                  market.p_xy,
                                  market.p_yx};
            return run_with(model, config.stop, src);
        };
        report.bpa =
            summarize_extinction(run_replications_with(one, config.replications, config.parallelism));
    } else {
        report.bpa = estimate_extinction(bpa_params, config);
    }
    report.bpna = estimate_extinction(bpna_params, config);
    report.theory_bpa = theory_report(bpa_params);
    report.theory_bpna = theory_report(bpna_params);
    return report;
}

} // namespace bpa

#include "bpa/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpa {

namespace {

constexpr double kPmfSumTol = 1e-12;
constexpr double kTailCutoff = 1e-12;

void check_prob(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

void check_pmf(const std::vector<double> &probs, const char *what) {
    if (probs.empty())
        throw std::invalid_argument(std::string(what) + ": empty pmf");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0))
            throw std::invalid_argument(std::string(what) + ": negative pmf entry");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kPmfSumTol)
        throw std::invalid_argument(std::string(what) + ": pmf does not sum to 1");
}

double poisson_pmf(std::uint64_t k, double mu) {
    if (mu <= 0.0)
        return k == 0 ? 1.0 : 0.0;
    return std::exp((double)k * std::log(mu) - mu - std::lgamma((double)k + 1.0));
}

double binomial_pmf(std::uint64_t k, std::uint64_t n, double p) {
    if (k > n)
        return 0.0;
    if (p <= 0.0)
        return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0)
        return k == n ? 1.0 : 0.0;
    const double nk = (double)n, kk = (double)k;
    return std::exp(std::lgamma(nk + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nk - kk + 1.0) +
                    kk * std::log(p) + (nk - kk) * std::log1p(-p));
}

double count_mean(const CountLaw &law) {
    return std::visit(
        [](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonCount>)
                return l.mean;
            else if constexpr (std::is_same_v<T, ConstantCount>)
                return (double)l.k;
            else {
                double m = 0.0;
                for (std::size_t i = 0; i < l.probs.size(); ++i)
                    m += (double)i * l.probs[i];
                return m;
            }
        },
        law);
}

// E[z^F]; defined for z in [0,1].
double count_pgf(const CountLaw &law, double z) {
    return std::visit(
        [z](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonCount>)
                return std::exp(l.mean * (z - 1.0));
            else if constexpr (std::is_same_v<T, ConstantCount>)
                return l.k == 0 ? 1.0 : std::pow(z, (double)l.k);
            else {
                double acc = 0.0, zp = 1.0;
                for (std::size_t i = 0; i < l.probs.size(); ++i) {
                    acc += l.probs[i] * zp;
                    zp *= z;
                }
                return acc;
            }
        },
        law);
}

} // namespace

void validate(const CountLaw &law) {
    std::visit(
        [](const auto &l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonCount>) {
                if (!(l.mean >= 0.0) || !std::isfinite(l.mean))
                    throw std::invalid_argument("count law: Poisson mean must be >= 0");
            } else if constexpr (std::is_same_v<T, PmfCount>) {
                check_pmf(l.probs, "count law");
            }
        },
        law);
}

void validate(const OffspringLaw &law) {
    std::visit(
        [](const auto &l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonThinned>) {
                if (!(l.friend_mean > 0.0) || !std::isfinite(l.friend_mean))
                    throw std::invalid_argument("PoissonThinned: friend_mean must be > 0");
                check_prob(l.share_prob, "PoissonThinned share_prob");
            } else if constexpr (std::is_same_v<T, BinomialOfFriends>) {
                validate(l.friends);
                check_prob(l.share_prob, "BinomialOfFriends share_prob");
            } else if constexpr (std::is_same_v<T, ExplicitPmf>) {
                check_pmf(l.probs, "offspring law");
            }
        },
        law);
}

double mean(const OffspringLaw &law) {
    return std::visit(
        [](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonThinned>)
                return l.friend_mean * l.share_prob;
            else if constexpr (std::is_same_v<T, BinomialOfFriends>)
                return count_mean(l.friends) * l.share_prob;
            else if constexpr (std::is_same_v<T, ExplicitPmf>) {
                double m = 0.0;
                for (std::size_t k = 0; k < l.probs.size(); ++k)
                    m += (double)k * l.probs[k];
                return m;
            } else if constexpr (std::is_same_v<T, ConstantLaw>)
                return (double)l.k;
            else
                return 0.0;
        },
        law);
}

double second_moment(const OffspringLaw &law) {
    return std::visit(
        [](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonThinned>) {
                const double mu = l.friend_mean * l.share_prob;
                return mu + mu * mu;
            } else if constexpr (std::is_same_v<T, BinomialOfFriends>) {
                // E[xi^2 | F=f] = f p(1-p) + (f p)^2
                const double p = l.share_prob;
                return std::visit(
                    [p](const auto &f) -> double {
                        using F = std::decay_t<decltype(f)>;
                        if constexpr (std::is_same_v<F, PoissonCount>) {
                            const double mu = f.mean * p; // thinned Poisson
                            return mu + mu * mu;
                        } else if constexpr (std::is_same_v<F, ConstantCount>) {
                            const double n = (double)f.k;
                            return n * p * (1.0 - p) + n * n * p * p;
                        } else {
                            double acc = 0.0;
                            for (std::size_t i = 0; i < f.probs.size(); ++i) {
                                const double n = (double)i;
                                acc += f.probs[i] * (n * p * (1.0 - p) + n * n * p * p);
                            }
                            return acc;
                        }
                    },
                    l.friends);
            } else if constexpr (std::is_same_v<T, ExplicitPmf>) {
                double m2 = 0.0;
                for (std::size_t k = 0; k < l.probs.size(); ++k)
                    m2 += (double)k * (double)k * l.probs[k];
                return m2;
            } else if constexpr (std::is_same_v<T, ConstantLaw>)
                return (double)l.k * (double)l.k;
            else
                return 0.0;
        },
        law);
}

double prob_zero(const OffspringLaw &law) { return pmf(law, 0); }

double pgf(const OffspringLaw &law, double s) {
    if (!(s >= 0.0 && s <= 1.0))
        throw std::domain_error("pgf: s must lie in [0,1]");
    return std::visit(
        [s](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonThinned>)
                return std::exp(l.friend_mean * l.share_prob * (s - 1.0));
            else if constexpr (std::is_same_v<T, BinomialOfFriends>)
                // E[s^Bin(F,p)] = E[(1 - p + p s)^F]
                return count_pgf(l.friends, 1.0 - l.share_prob + l.share_prob * s);
            else if constexpr (std::is_same_v<T, ExplicitPmf>) {
                double acc = 0.0, sp = 1.0;
                for (std::size_t k = 0; k < l.probs.size(); ++k) {
                    acc += l.probs[k] * sp;
                    sp *= s;
                }
                return acc;
            } else if constexpr (std::is_same_v<T, ConstantLaw>)
                return l.k == 0 ? 1.0 : std::pow(s, (double)l.k);
            else
                return 1.0;
        },
        law);
}

double pmf(const OffspringLaw &law, std::uint64_t k) {
    return std::visit(
        [k](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonThinned>)
                return poisson_pmf(k, l.friend_mean * l.share_prob);
            else if constexpr (std::is_same_v<T, BinomialOfFriends>) {
                const double p = l.share_prob;
                return std::visit(
                    [k, p](const auto &f) -> double {
                        using F = std::decay_t<decltype(f)>;
                        if constexpr (std::is_same_v<F, PoissonCount>)
                            return poisson_pmf(k, f.mean * p);
                        else if constexpr (std::is_same_v<F, ConstantCount>)
                            return binomial_pmf(k, f.k, p);
                        else {
                            double acc = 0.0;
                            for (std::size_t i = k; i < f.probs.size(); ++i)
                                acc += f.probs[i] * binomial_pmf(k, i, p);
                            return acc;
                        }
                    },
                    l.friends);
            } else if constexpr (std::is_same_v<T, ExplicitPmf>)
                return k < l.probs.size() ? l.probs[k] : 0.0;
            else if constexpr (std::is_same_v<T, ConstantLaw>)
                return k == l.k ? 1.0 : 0.0;
            else
                return k == 0 ? 1.0 : 0.0;
        },
        law);
}

std::uint64_t percentile(const OffspringLaw &law, double q) {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::domain_error("percentile: q must lie in [0,1]");
    double cum = 0.0;
    constexpr std::uint64_t kHardCap = 100000000;
    for (std::uint64_t k = 0; k < kHardCap; ++k) {
        cum += pmf(law, k);
        if (cum + 1e-13 >= q)
            return k;
    }
    return kHardCap;
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

namespace {

std::vector<double> cumulative(const std::vector<double> &probs) {
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    if (!cdf.empty())
        cdf.back() = 1.0;
    return cdf;
}

std::uint64_t invert_cdf(const std::vector<double> &cdf, double u) {
    for (std::size_t i = 0; i < cdf.size(); ++i)
        if (u < cdf[i])
            return i;
    return cdf.size() - 1;
}

} // namespace

LawSampler LawSampler::compile(const OffspringLaw &law) {
    LawSampler s;
    auto as_poisson = [&s](double mu) {
        if (mu <= 0.0) {
            s.kind_ = Kind::Constant;
            s.k_ = 0;
        } else if (mu < Rng::kPoissonInversionCutoff) {
            s.kind_ = Kind::PoissonSmall;
            s.mu_ = mu;
            s.exp_neg_mu_ = std::exp(-mu);
        } else {
            s.kind_ = Kind::PoissonLarge;
            s.mu_ = mu;
        }
    };
    std::visit(
        [&](const auto &l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonThinned>)
                as_poisson(l.friend_mean * l.share_prob);
            else if constexpr (std::is_same_v<T, BinomialOfFriends>) {
                const double p = l.share_prob;
                std::visit(
                    [&](const auto &f) {
                        using F = std::decay_t<decltype(f)>;
                        if constexpr (std::is_same_v<F, PoissonCount>)
                            as_poisson(f.mean * p); // Poisson thinning
                        else if constexpr (std::is_same_v<F, ConstantCount>) {
                            if (p <= 0.0 || f.k == 0) {
                                s.kind_ = Kind::Constant;
                                s.k_ = 0;
                            } else {
                                s.kind_ = Kind::BinomialFixed;
                                s.n_ = f.k;
                                s.p_ = p;
                            }
                        } else {
                            s.kind_ = Kind::FriendPmf;
                            s.p_ = p;
                            s.cdf_ = cumulative(f.probs);
                        }
                    },
                    l.friends);
            } else if constexpr (std::is_same_v<T, ExplicitPmf>) {
                s.kind_ = Kind::Pmf;
                s.cdf_ = cumulative(l.probs);
            } else if constexpr (std::is_same_v<T, ConstantLaw>) {
                s.kind_ = Kind::Constant;
                s.k_ = l.k;
            } else {
                s.kind_ = Kind::Constant;
                s.k_ = 0;
            }
        },
        law);
    return s;
}

std::uint64_t LawSampler::draw(Rng &rng) const {
    switch (kind_) {
    case Kind::Constant:
        return k_;
    case Kind::PoissonSmall:
        return rng.poisson_inversion(exp_neg_mu_);
    case Kind::PoissonLarge:
        return rng.poisson_ptrd(mu_);
    case Kind::BinomialFixed:
        return rng.binomial(n_, p_);
    case Kind::FriendPmf:
        return rng.binomial(invert_cdf(cdf_, rng.uniform01()), p_);
    case Kind::Pmf:
        return invert_cdf(cdf_, rng.uniform01());
    }
    return 0;
}

std::uint64_t sample_offspring(const OffspringLaw &law, Rng &rng) {
    return LawSampler::compile(law).draw(rng);
}

void validate(const AttackSpec &spec) {
    validate(spec.max_attacks);
    check_prob(spec.success_prob, "attack success_prob");
}

AttackSampler AttackSampler::compile(const AttackSpec &spec) {
    AttackSampler a;
    a.max_attacks_ = LawSampler::compile(spec.max_attacks);
    a.success_prob_ = spec.success_prob;
    a.never_hits_ = a.max_attacks_.is_zero() || spec.success_prob <= 0.0;
    return a;
}

std::uint64_t sample_attack(const AttackSpec &spec, std::uint64_t opposite, Rng &rng) {
    return AttackSampler::compile(spec).draw(rng, opposite);
}

AttackMeanFn::AttackMeanFn(const AttackSpec &spec) {
    success_prob_ = spec.success_prob;
    limit_ = spec.success_prob * mean(spec.max_attacks);
    double cum = 0.0, acc = 0.0;
    prefix_.push_back(0.0);
    constexpr std::uint64_t kHardCap = 10000000;
    for (std::uint64_t k = 0; k < kHardCap; ++k) {
        cum += pmf(spec.max_attacks, k);
        const double s = std::max(0.0, 1.0 - cum);
        if (s < kTailCutoff)
            break;
        survival_.push_back(s);
        acc += s;
        prefix_.push_back(acc);
    }
}

double AttackMeanFn::operator()(double y) const {
    if (y <= 0.0)
        return 0.0;
    const double fl = std::floor(y);
    const std::size_t len = survival_.size();
    const std::size_t k = fl >= (double)len ? len : (std::size_t)fl;
    double value = prefix_[k];
    if (k < len)
        value += (y - fl) * survival_[k];
    return success_prob_ * value;
}

double attack_mean(const AttackSpec &spec, std::uint64_t opposite) {
    return AttackMeanFn(spec)((double)opposite);
}

double attack_mean_limit(const AttackSpec &spec) {
    return spec.success_prob * mean(spec.max_attacks);
}

// ---------------------------------------------------------------------------
// Assumption diagnostics
// ---------------------------------------------------------------------------

AssumptionReport validate_assumptions(const OffspringLaw &offspring_x,
                                      const OffspringLaw &offspring_y,
                                      const AttackSpec &attack_xy, const AttackSpec &attack_yx) {
    AssumptionReport r;
    r.m_x = mean(offspring_x);
    r.m_y = mean(offspring_y);
    r.second_moments = {second_moment(offspring_x), second_moment(offspring_y),
                        second_moment(attack_xy.max_attacks),
                        second_moment(attack_yx.max_attacks)};
    r.m_xy_star = attack_mean_limit(attack_xy);
    r.m_yx_star = attack_mean_limit(attack_yx);

    r.a1_ok = r.m_x > 1.0 && r.m_y > 1.0 && std::isfinite(r.m_x) && std::isfinite(r.m_y);
    const double p0x = prob_zero(offspring_x), p0y = prob_zero(offspring_y);
    r.zero_prob_ok = p0x > 0.0 && p0x < 1.0 && p0y > 0.0 && p0y < 1.0;
    r.a2_ok = true;
    for (double m2 : r.second_moments)
        r.a2_ok = r.a2_ok && std::isfinite(m2);

    const AttackMeanFn m_xy(attack_xy), m_yx(attack_yx);

    // A.3: envelopes kappa*min{y, y_bar} <= m(y) <= m_star with the cap at
    // the 99.9th percentile of the max-attack law and kappa = m_star / cap.
    // The verdict allows 1% relative slack: the percentile cap leaves a
    // sliver of tail mass, so the lower envelope grazes m(cap) from above.
    const double slack = 1e-2;
    r.a3.y_bar = (double)percentile(attack_xy.max_attacks, 0.999);
    r.a3.x_bar = (double)percentile(attack_yx.max_attacks, 0.999);
    r.a3.kappa_xy = r.a3.y_bar > 0 ? r.m_xy_star / r.a3.y_bar : 0.0;
    r.a3.kappa_yx = r.a3.x_bar > 0 ? r.m_yx_star / r.a3.x_bar : 0.0;
    auto envelope_ok = [slack](const AttackMeanFn &m, double kappa, double cap, double star) {
        if (star <= 0.0)
            return true; // law never attacks; bounds are 0 <= 0 <= 0
        for (double y = 1.0; y <= cap; y += 1.0) {
            const double v = m(y);
            if (v < kappa * y * (1.0 - slack) - 1e-15)
                return false;
            if (v > star * (1.0 + slack) + 1e-15)
                return false;
        }
        return true;
    };
    r.a3_ok = envelope_ok(m_xy, r.a3.kappa_xy, r.a3.y_bar, r.m_xy_star) &&
              envelope_ok(m_yx, r.a3.kappa_yx, r.a3.x_bar, r.m_yx_star);

    // A.4 on the grid 1 <= v <= u <= 1000. Both type assignments of
    // (max, min) are possible along a path, so both orientations are
    // checked; they coincide for symmetric attacks.
    constexpr std::uint64_t kGrid = 1000;
    constexpr std::size_t kMaxRecorded = 4096;
    std::vector<double> mx(kGrid + 1), my(kGrid + 1);
    for (std::uint64_t k = 1; k <= kGrid; ++k) {
        mx[k] = m_xy((double)k);
        my[k] = m_yx((double)k);
    }
    r.a4_ok = true;
    for (std::uint64_t u = 1; u <= kGrid; ++u) {
        for (std::uint64_t v = 1; v <= u; ++v) {
            const bool bad = (double)u * mx[v] - (double)v * my[u] < -1e-12 ||
                             (double)u * my[v] - (double)v * mx[u] < -1e-12;
            if (bad) {
                r.a4_ok = false;
                ++r.a4_violation_count;
                if (r.a4_violations.size() < kMaxRecorded)
                    r.a4_violations.emplace_back(u, v);
            }
        }
    }
    return r;
}

} // namespace bpa

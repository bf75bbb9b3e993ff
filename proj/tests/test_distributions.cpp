#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "bpa/distributions.hpp"

using namespace bpa;

namespace {
const CountLaw kPoisson4 = PoissonCount{4.0};
const OffspringLaw kTable1Offspring = BinomialOfFriends{kPoisson4, 0.2667};
const AttackSpec kTable1Attack{BinomialOfFriends{kPoisson4, 0.053}, 0.3};
} // namespace

TEST_CASE("analytic means") {
    CHECK(mean(ConstantLaw{3}) == 3.0);
    CHECK(mean(ZeroLaw{}) == 0.0);
    CHECK(mean(kTable1Offspring) == doctest::Approx(1.0668).epsilon(1e-12));
    CHECK(mean(ExplicitPmf{{0.5, 0, 0, 0.5}}) == doctest::Approx(1.5));
    CHECK(mean(PoissonThinned{4.0, 0.2667}) == doctest::Approx(1.0668));
}

TEST_CASE("thinned Poisson equals binomial-of-Poisson-friends") {
    const OffspringLaw a = PoissonThinned{4.0, 0.2667};
    const OffspringLaw b = kTable1Offspring;
    CHECK(mean(a) == doctest::Approx(mean(b)).epsilon(1e-14));
    CHECK(second_moment(a) == doctest::Approx(second_moment(b)).epsilon(1e-14));
    for (double s : {0.0, 0.3, 0.7, 1.0})
        CHECK(pgf(a, s) == doctest::Approx(pgf(b, s)).epsilon(1e-14));
    for (std::uint64_t k = 0; k < 8; ++k)
        CHECK(pmf(a, k) == doctest::Approx(pmf(b, k)).epsilon(1e-12));
}

TEST_CASE("pgf endpoints, closed form, and derivative oracle") {
    const std::vector<OffspringLaw> laws = {kTable1Offspring, ExplicitPmf{{0.25, 0.5, 0.25}},
                                            ConstantLaw{2}, PoissonThinned{3.0, 0.5}};
    for (const auto &law : laws) {
        CHECK(pgf(law, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pgf(law, 0.0) == doctest::Approx(pmf(law, 0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)pgf(kTable1Offspring, 1.5), std::domain_error);
    CHECK_THROWS_AS((void)pgf(kTable1Offspring, -0.1), std::domain_error);

    // Poisson closed form exp(mu(s-1)); central finite difference of the
    // closed form at s=1 recovers the mean.
    const double mu = 1.0668;
    const OffspringLaw law = PoissonThinned{4.0, 0.2667};
    for (double s = 0.0; s <= 1.0; s += 0.1)
        CHECK(pgf(law, s) == doctest::Approx(std::exp(mu * (s - 1.0))).epsilon(1e-12));
    const double h = 1e-6;
    auto f = [mu](double s) { return std::exp(mu * (s - 1.0)); };
    const double central = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
    CHECK(std::fabs(central - mu) / mu < 1e-6);

    // One-sided difference of the implemented pgf at 1 against mean(law).
    for (const auto &l : laws) {
        const double d = (pgf(l, 1.0) - pgf(l, 1.0 - h)) / h;
        CHECK(std::fabs(d - mean(l)) / mean(l) < 1e-5);
    }
}

TEST_CASE("pgf is nondecreasing and convex on [0,1]") {
    const std::vector<OffspringLaw> laws = {kTable1Offspring, ExplicitPmf{{0.5, 0, 0, 0.5}},
                                            PoissonThinned{2.0, 0.9}};
    for (const auto &law : laws) {
        double prev = pgf(law, 0.0);
        double prev_slope = -1.0;
        for (int i = 1; i <= 100; ++i) {
            const double s = (double)i / 100.0;
            const double v = pgf(law, s);
            CHECK(v >= prev - 1e-12);
            const double slope = (v - prev) * 100.0;
            CHECK(slope >= prev_slope - 1e-9);
            prev = v;
            prev_slope = slope;
        }
    }
}

TEST_CASE("sampling matches analytic means") {
    Rng rng(31337);
    CHECK(sample_offspring(ConstantLaw{2}, rng) == 2);
    CHECK(sample_offspring(ZeroLaw{}, rng) == 0);

    const std::size_t n = 1000000;
    const std::vector<OffspringLaw> laws = {kTable1Offspring, ExplicitPmf{{0.5, 0, 0, 0.5}},
                                            BinomialOfFriends{ConstantCount{10}, 0.17},
                                            BinomialOfFriends{PmfCount{{0.2, 0.3, 0.5}}, 0.4}};
    for (const auto &law : laws) {
        const LawSampler sampler = LawSampler::compile(law);
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            sum += (double)sampler.draw(rng);
        const double m = sum / (double)n;
        const double se = std::sqrt(std::max(second_moment(law) - mean(law) * mean(law), 1e-12) /
                                    (double)n);
        CHECK(std::fabs(m - mean(law)) < 4 * se);
    }
    // Headline instance: empirical mean within 0.01 of 1.067.
    const LawSampler s = LawSampler::compile(kTable1Offspring);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i)
        sum += (double)s.draw(rng);
    CHECK(std::fabs(sum / (double)n - 1.067) < 0.01);
}

TEST_CASE("attack draws respect the opposite-population cap") {
    Rng rng(55);
    CHECK(sample_attack(kTable1Attack, 0, rng) == 0);
    CHECK(sample_attack(AttackSpec{ConstantLaw{2}, 1.0}, 10, rng) == 2);

    const AttackSampler sampler = AttackSampler::compile(kTable1Attack);
    for (std::uint64_t y : {0ULL, 1ULL, 2ULL, 5ULL}) {
        for (int i = 0; i < 100000; ++i)
            CHECK(sampler.draw(rng, y) <= y);
    }

    // Saturated regime: empirical mean near the limit 0.064.
    double sum = 0;
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i)
        sum += (double)sampler.draw(rng, 1000000);
    CHECK(std::fabs(sum / (double)n - 0.064) < 0.002);
}

TEST_CASE("attack mean: truncated tail sum and limit") {
    CHECK(attack_mean(kTable1Attack, 0) == 0.0);
    CHECK(attack_mean(AttackSpec{ConstantLaw{2}, 0.5}, 1) == doctest::Approx(0.5));
    CHECK(attack_mean_limit(AttackSpec{ZeroLaw{}, 0.7}) == 0.0);
    CHECK(attack_mean_limit(AttackSpec{ConstantLaw{5}, 0.2}) == doctest::Approx(1.0));
    CHECK(attack_mean_limit(kTable1Attack) == doctest::Approx(4 * 0.053 * 0.3).epsilon(1e-12));

    const AttackMeanFn fn(kTable1Attack);
    double prev = 0.0;
    for (int y = 0; y <= 200; ++y) {
        const double v = fn((double)y);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
    // Past the 99.99th percentile only the clipped tail mass is missing.
    const std::uint64_t far = percentile(kTable1Attack.max_attacks, 0.9999);
    CHECK(std::fabs(fn((double)far) - fn.limit()) < 1e-4);
    CHECK(std::fabs(attack_mean(kTable1Attack, 1000) - 0.0636) < 1e-9);

    // Piecewise-linear extension interpolates the integer values exactly.
    CHECK(fn(2.5) == doctest::Approx(0.5 * (fn(2.0) + fn(3.0))).epsilon(1e-12));

    // Mixture against a brute-force pmf sum oracle at small y.
    const AttackSpec mix{BinomialOfFriends{PmfCount{{0.1, 0.4, 0.5}}, 0.6}, 0.8};
    for (std::uint64_t y = 1; y <= 4; ++y) {
        double expect = 0.0;
        for (std::uint64_t k = 0; k <= 10; ++k)
            expect += pmf(mix.max_attacks, k) * (double)std::min(k, y);
        CHECK(attack_mean(mix, y) == doctest::Approx(0.8 * expect).epsilon(1e-10));
    }
}

TEST_CASE("law validation rejects malformed parameters") {
    CHECK_THROWS_AS(validate(OffspringLaw{ExplicitPmf{{0.5, 0.4}}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(OffspringLaw{ExplicitPmf{{-0.1, 1.1}}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(OffspringLaw{PoissonThinned{0.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(OffspringLaw{BinomialOfFriends{kPoisson4, 1.5}}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate(OffspringLaw{ExplicitPmf{{0.5, 0.5}}}));
}

TEST_CASE("assumption report on the symmetric benchmark") {
    const auto r =
        validate_assumptions(kTable1Offspring, kTable1Offspring, kTable1Attack, kTable1Attack);
    CHECK(r.m_x == doctest::Approx(1.0668));
    CHECK(r.a1_ok);
    CHECK(r.zero_prob_ok);
    CHECK(r.a2_ok);
    CHECK(r.a3_ok);
    CHECK(r.a4_ok);
    CHECK(r.a4_violations.empty());
    CHECK(r.m_xy_star == doctest::Approx(0.0636));
    CHECK(r.a3.y_bar >= 1.0);
    CHECK(r.a3.kappa_xy == doctest::Approx(r.m_xy_star / r.a3.y_bar));
}

TEST_CASE("assumption report flags subcritical and asymmetric-attack cases") {
    const OffspringLaw dead = BinomialOfFriends{kPoisson4, 0.0};
    const auto r = validate_assumptions(dead, kTable1Offspring, kTable1Attack, kTable1Attack);
    CHECK_FALSE(r.a1_ok);
    CHECK_FALSE(r.zero_prob_ok); // P(xi = 0) = 1 for the dead law

    // At-most-one attack per wake-up with equal strengths satisfies the
    // max-dominance inequality everywhere.
    const AttackSpec bernoulli{ExplicitPmf{{0.4, 0.6}}, 0.5};
    const auto rb =
        validate_assumptions(kTable1Offspring, kTable1Offspring, bernoulli, bernoulli);
    CHECK(rb.a4_ok);

    // Unequal attack strengths violate it near the diagonal.
    const AttackSpec strong{BinomialOfFriends{kPoisson4, 0.0667}, 0.3};
    const auto ra = validate_assumptions(kTable1Offspring, kTable1Offspring, strong, kTable1Attack);
    CHECK_FALSE(ra.a4_ok);
    CHECK(ra.a4_violation_count > 0);
    CHECK(!ra.a4_violations.empty());
}

TEST_CASE("percentile is the smallest k reaching the mass") {
    CHECK(percentile(ConstantLaw{7}, 0.5) == 7);
    CHECK(percentile(ZeroLaw{}, 0.999) == 0);
    const OffspringLaw law = PoissonThinned{4.0, 0.053};
    const std::uint64_t k = percentile(law, 0.999);
    double cum = 0.0;
    for (std::uint64_t j = 0; j < k; ++j)
        cum += pmf(law, j);
    CHECK(cum < 0.999);
    CHECK(cum + pmf(law, k) >= 0.999 - 1e-12);
}

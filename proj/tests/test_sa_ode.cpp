#include "doctest.h"

#include <cmath>

#include "bpa/montecarlo.hpp"
#include "bpa/presets.hpp"
#include "bpa/sa_ode.hpp"

using namespace bpa;

TEST_CASE("eta at small clock values") {
    CHECK(eta(0.0) == 0);
    CHECK(eta(0.999) == 0);
    CHECK(eta(1.0) == 1);
    CHECK(eta(1.4999) == 1);
    CHECK(eta(1.5) == 2);
    CHECK(eta(2.283) == 4); // H_4 ~ 2.0833 <= t < H_5 ~ 2.2833
    CHECK_THROWS_AS((void)eta(-0.1), std::domain_error);
}

TEST_CASE("eta inverts the running harmonic clock exactly") {
    // Same accumulation order as the tracker's t_n.
    double t = 0.0;
    for (std::uint64_t n = 1; n <= 100000; ++n) {
        t += 1.0 / (double)n;
        REQUIRE(eta(t) == n);
        CHECK(harmonic_time(n) == t);
    }
}

TEST_CASE("eta beyond the exact table") {
    // The expansion regime only needs to be consistent to a relative whisker.
    for (std::uint64_t n : {20000000ULL, 400000000ULL}) {
        const double t = harmonic_time(n);
        const std::uint64_t k = eta(t);
        CHECK(std::fabs((double)k - (double)n) <= 1e-6 * (double)n + 2.0);
    }
    CHECK(eta(200.0) == (std::uint64_t{1} << 62)); // saturated
}

TEST_CASE("tracker reproduces direct ratios and recovers counts") {
    const ModelParams params = presets::coexist_instance(2.0, 2.0, 0.02, 5, 3);
    StopRule stop;
    stop.max_transitions = 10000;

    for (std::uint64_t path = 0; path < 100; ++path) {
        Rng rng = Rng::stream(606, path);
        std::vector<TrajectoryPoint> traj;
        (void)run_recorded(params, stop, rng, traj);
        const auto thetas = track(traj);
        REQUIRE(thetas.size() == traj.size());
        CHECK(thetas[0].psi == 8.0);
        CHECK(thetas[0].theta == 5.0);
        CHECK(thetas[0].t == 0.0);
        for (std::size_t i = 1; i < thetas.size(); ++i) {
            const double n = (double)traj[i].n;
            const double scale = std::max(1.0, std::fabs(thetas[i].psi));
            CHECK(std::fabs(thetas[i].psi - (double)(traj[i].x + traj[i].y) / n) <=
                  1e-9 * scale);
            CHECK(std::fabs(thetas[i].theta - (double)traj[i].x / n) <= 1e-9 * scale);
            const auto [x, y] = recover_counts(thetas[i]);
            CHECK(x == traj[i].x);
            CHECK(y == traj[i].y);
        }
    }
}

TEST_CASE("tracker freezes at total extinction") {
    ModelParams params = presets::symmetric_base(1, 1);
    params.offspring_x = ZeroLaw{};
    params.offspring_y = ZeroLaw{};
    StopRule stop;
    stop.max_transitions = 10;
    Rng rng(3);
    std::vector<TrajectoryPoint> traj;
    const auto out = run_recorded(params, stop, rng, traj);
    CHECK(out.total_extinct);
    const auto thetas = track(traj);
    CHECK(thetas.back().psi == 0.0);
    CHECK(thetas.back().theta == 0.0);
}

TEST_CASE("tracker rejects gappy trajectories") {
    std::vector<TrajectoryPoint> traj = {{0, 2, 2, 0.0}, {2, 3, 2, 1.0}};
    CHECK_THROWS_AS((void)track(traj), std::invalid_argument);
}

TEST_CASE("symmetric drift vanishes at the candidate limits") {
    const double m = 1.0668;
    const auto params = presets::symmetric_base(2, 2);
    const SymmetricRhs rhs(m, params.attack_xy, params.attack_yx);
    const double t_late = 40.0; // attack means saturated

    for (const Theta th : {Theta{0.0, 0.0, t_late},               // both extinct
                           Theta{m - 1, 0.0, t_late},             // y only
                           Theta{m - 1, m - 1, t_late},           // x only
                           Theta{m - 1, 0.5 * (m - 1), t_late}}) { // coexist, beta = 1/2
        const auto g = rhs(th);
        CHECK(std::fabs(g[0]) <= 1e-8);
        CHECK(std::fabs(g[1]) <= 1e-8);
        CHECK(g[2] == 1.0);
    }
    const auto frozen = rhs(Theta{-0.5, 0.0, 1.0});
    CHECK(frozen[0] == 0.0);
    CHECK(frozen[1] == 0.0);
}

TEST_CASE("asymmetric drift reduces to single-type dynamics at the edges") {
    const auto params = presets::coexist_instance(3.0, 2.98, 0.02, 2, 2);
    const AsymmetricRhs rhs(3.0, 2.98, params.attack_xy, params.attack_yx);

    const auto y_only = rhs(Theta{1.5, 0.0, 5.0});
    CHECK(y_only[0] == doctest::Approx(2.98 - 1.0 - 1.5));
    CHECK(y_only[1] == 0.0);

    const auto x_only = rhs(Theta{1.5, 1.5, 5.0});
    CHECK(x_only[0] == doctest::Approx(3.0 - 1.0 - 1.5));

    const auto eq = asymmetric_ratio(3.0, 2.98, 0.02, 0.02);
    const auto at_eq = rhs(Theta{eq.psi_al, eq.theta_al, 40.0});
    CHECK(std::fabs(at_eq[0]) <= 1e-8);
    CHECK(std::fabs(at_eq[1]) <= 1e-8);
}

TEST_CASE("RK4 tracks the closed-form total-mass relaxation") {
    const double m = 2.0;
    const auto params = presets::coexist_instance(m, m, 0.02, 3, 1);
    const SymmetricRhs rhs(m, params.attack_xy, params.attack_yx);
    OdeConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 10.0;
    const Theta start{3.0, 1.0, 0.0};
    const auto path = integrate(rhs, start, cfg);
    double max_err = 0.0;
    for (const auto &th : path) {
        const double exact = std::exp(-th.t) * (start.psi - m + 1.0) + m - 1.0;
        max_err = std::max(max_err, std::fabs(th.psi - exact));
    }
    CHECK(max_err <= 1e-8);

    // Halving the step must not move the endpoint (or the classification).
    OdeConfig half = cfg;
    half.dt = 0.005;
    const auto path2 = integrate(rhs, start, half);
    CHECK(std::fabs(path.back().psi - path2.back().psi) < 1e-10);
}

TEST_CASE("integrate aborts on non-finite states") {
    auto blowup = [](const Theta &th) {
        return std::array<double, 3>{th.psi * th.psi * 1e30, 0.0, 1.0};
    };
    OdeConfig cfg;
    cfg.t_end = 50.0;
    CHECK_THROWS_AS((void)integrate(blowup, Theta{2.0, 1.0, 0.0}, cfg), std::runtime_error);
}

TEST_CASE("classification against the candidate limits") {
    const auto params = presets::coexist_instance(1.067, 1.067, 0.064, 2, 2);
    const double m1 = 0.067;
    CHECK(classify(Theta{0.0, 0.0, 50.0}, params) == EquilibriumClass::BothExtinct);
    CHECK(classify(Theta{m1 * 1.01, m1 * 1.01, 50.0}, params) == EquilibriumClass::XOnly);
    CHECK(classify(Theta{m1, 0.0005, 50.0}, params) == EquilibriumClass::YOnly);
    CHECK(classify(Theta{m1, 0.5 * m1 * 1.02, 50.0}, params) == EquilibriumClass::Coexist);
    CHECK(classify(Theta{10.0, 5.0, 50.0}, params) == EquilibriumClass::Unresolved);
}

TEST_CASE("ratio drift: sign decides the exit direction") {
    const auto params = presets::symmetric_base(2, 2);
    const double m = mean(params.offspring_x);
    const double t_late = 40.0;
    const Theta balanced{m - 1, 0.5 * (m - 1), t_late};
    CHECK(std::fabs(ratio_rhs(balanced, params)) < 1e-12);
    CHECK(ratio_rhs(Theta{m - 1, 0.52 * (m - 1), t_late}, params) > 0.0);
    CHECK(ratio_rhs(Theta{m - 1, 0.48 * (m - 1), t_late}, params) < 0.0);
    CHECK_THROWS_AS((void)ratio_rhs(Theta{0.0, 0.0, 1.0}, params), std::domain_error);
}

TEST_CASE("the coexist point is unstable in the ratio direction") {
    const auto params = presets::symmetric_base(2, 2);
    const double m = mean(params.offspring_x);
    const auto report = validate_assumptions(params.offspring_x, params.offspring_y,
                                             params.attack_xy, params.attack_yx);
    const double t0 = saturation_time(report, 0.5, m, 0.01 * (m - 1.0));
    CHECK(t0 > 0.0);
    CHECK(std::isfinite(t0));

    const SymmetricRhs rhs(m, params.attack_xy, params.attack_yx);
    for (double dir : {1.0, -1.0}) {
        const double ratio0 = 0.5 + dir * 1e-3;
        OdeConfig cfg;
        cfg.dt = 0.01;
        cfg.t_end = t0 + 400.0;
        const auto path = integrate(rhs, Theta{m - 1, ratio0 * (m - 1), t0}, cfg);
        bool exited = false;
        double prev = ratio0;
        bool monotone = true;
        for (const auto &th : path) {
            const double r = th.theta / th.psi;
            monotone = monotone && (dir > 0 ? r >= prev - 1e-12 : r <= prev + 1e-12);
            prev = r;
            exited = exited || std::fabs(r - 0.5) > 1e-2;
        }
        CHECK(monotone);
        CHECK(exited);
    }
}

TEST_CASE("simulated paths from a co-existence start classify as coexist") {
    const auto params = presets::coexist_instance(2.0, 2.0, 0.02, 2000, 2000);
    StopRule stop;
    stop.max_transitions = 200000;
    int coexist = 0, total = 0;
    for (std::uint64_t path = 0; path < 100; ++path) {
        Rng rng = Rng::stream(777, path);
        const auto out = run(params, stop, rng);
        if (out.halt != HaltReason::Transitions)
            continue;
        ++total;
        const auto &fs = out.final_state;
        const Theta th{(double)(fs.x + fs.y) / (double)fs.n, (double)fs.x / (double)fs.n,
                       harmonic_time(fs.n)};
        coexist += classify(th, params, 0.05) == EquilibriumClass::Coexist ? 1 : 0;
    }
    REQUIRE(total == 100);
    CHECK(coexist >= 95);
}

#include "doctest.h"

#include <cmath>

#include "bpa/bpa_core.hpp"
#include "bpa/presets.hpp"
#include "replay_sources.hpp"

using namespace bpa;
using namespace bpa_test;

TEST_CASE("step arithmetic uses pre-step values") {
    const ModelParams params = presets::symmetric_base(3, 2);
    const CompiledModel model = CompiledModel::compile(params);

    ChainState s;
    s.x = 3;
    s.y = 2;

    ScriptedSource src{{DrawRecord{0.5, true, 2, 1}}};
    const ChainState next = step_with(s, model, src);
    CHECK(next.x == 5); // 3 - 1 + 2 + 1
    CHECK(next.y == 1); // 2 - 1
    CHECK(next.n == 1);
    CHECK(next.tau == doctest::Approx(0.5));
    CHECK_FALSE(next.absorbed);
}

TEST_CASE("no-attack mode never touches the other population") {
    ModelParams params = presets::symmetric_base(3, 2, Mode::Bpna);
    const CompiledModel model = CompiledModel::compile(params);
    ChainState s;
    s.x = 3;
    s.y = 2;
    // zeta scripted nonzero on purpose: the loop must not even ask for it
    ScriptedSource src{{DrawRecord{0.1, true, 4, 9}}};
    const ChainState next = step_with(s, model, src);
    CHECK(next.x == 6);
    CHECK(next.y == 2);
}

TEST_CASE("absorption freezes the chain") {
    const ModelParams params = presets::symmetric_base(1, 0);
    const CompiledModel model = CompiledModel::compile(params);
    ChainState s;
    s.x = 1;
    s.y = 0;
    ScriptedSource src{{DrawRecord{2.0, true, 0, 0}}};
    const ChainState next = step_with(s, model, src);
    CHECK(next.x == 0);
    CHECK(next.y == 0);
    CHECK(next.absorbed);
    ScriptedSource more{{DrawRecord{1.0, true, 3, 0}}};
    CHECK_THROWS_AS((void)step_with(next, model, more), std::logic_error);
}

TEST_CASE("max_min") {
    ChainState s;
    s.x = 3;
    s.y = 7;
    CHECK(max_min(s) == std::pair<std::int64_t, std::int64_t>{7, 3});
    s.x = s.y = 0;
    CHECK(max_min(s) == std::pair<std::int64_t, std::int64_t>{0, 0});

    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        s.x = (std::int64_t)(rng.next() % 1000);
        s.y = (std::int64_t)(rng.next() % 1000);
        const auto [u, v] = max_min(s);
        CHECK(u + v == s.x + s.y);
        CHECK(2 * u >= s.x + s.y);
        CHECK(u <= s.x + s.y);
    }
}

TEST_CASE("run: immediate extinction of a childless line") {
    ModelParams params = presets::symmetric_base(0, 1);
    params.offspring_y = ZeroLaw{};
    StopRule stop;
    stop.max_transitions = 100;
    Rng rng(1);
    const ReplicationOutcome out = run(params, stop, rng);
    CHECK(out.y_extinct);
    CHECK(out.x_extinct);
    CHECK(out.total_extinct);
    CHECK(out.halt == HaltReason::Extinction);
    CHECK(out.final_state.n == 1);
    CHECK(out.extinct_epoch_x == 0); // empty from the start
    CHECK(out.extinct_epoch_y == 1);
    CHECK(out.terminal_fraction == 0.0);
}

TEST_CASE("stop rules: transitions, horizon, cap") {
    const ModelParams params = presets::symmetric_base(5, 5);

    StopRule by_n;
    by_n.max_transitions = 50;
    Rng r1(9);
    const auto o1 = run(params, by_n, r1);
    CHECK((o1.halt == HaltReason::Transitions || o1.halt == HaltReason::Extinction));
    if (o1.halt == HaltReason::Transitions)
        CHECK(o1.final_state.n == 50);

    StopRule by_tau;
    by_tau.time_horizon = 2000.0;
    Rng r2(9);
    const auto o2 = run(params, by_tau, r2);
    CHECK(o2.final_state.tau <= 2000.0);

    StopRule by_cap;
    by_cap.survival_cap = 20;
    by_cap.max_transitions = 100000;
    Rng r3(10);
    const auto o3 = run(params, by_cap, r3);
    if (o3.halt == HaltReason::SurvivalCap)
        CHECK(o3.final_state.x + o3.final_state.y >= 20);

    StopRule none;
    CHECK_THROWS_AS(validate(none), std::invalid_argument);
}

TEST_CASE("tau strictly increases and counts stay nonnegative") {
    const ModelParams params = presets::symmetric_base(2, 2);
    StopRule stop;
    stop.max_transitions = 2000;
    Rng rng(77);
    std::vector<TrajectoryPoint> traj;
    (void)run_recorded(params, stop, rng, traj);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        CHECK(traj[i].tau > traj[i - 1].tau);
        CHECK(traj[i].x >= 0);
        CHECK(traj[i].y >= 0);
    }
}

TEST_CASE("conservation: total increment is offspring minus one, every step") {
    const ModelParams params = presets::symmetric_base(2, 2);
    const CompiledModel model = CompiledModel::compile(params);
    StopRule stop;
    stop.max_transitions = 2000;
    for (std::uint64_t path = 0; path < 200; ++path) {
        RecordingSource src{ModelSampler{&model, Rng::stream(11, path)}, {}};
        TrajectoryRecorder rec;
        (void)run_with(model, stop, src, rec);
        const auto &pts = rec.points;
        REQUIRE(pts.size() == src.log.size() + 1);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const auto &d = src.log[i - 1];
            const std::int64_t ds = (pts[i].x + pts[i].y) - (pts[i - 1].x + pts[i - 1].y);
            CHECK(ds == (std::int64_t)d.xi - 1);
            if (d.attacked) {
                const std::int64_t opposite = d.wake_x ? pts[i - 1].y : pts[i - 1].x;
                CHECK((std::int64_t)d.zeta <= opposite);
            }
        }
    }
}

TEST_CASE("coupling: total population path is bit-identical with and without attack") {
    const ModelParams bpa_params = presets::symmetric_base(2, 2, Mode::Bpa);
    ModelParams bpna_params = bpa_params;
    bpna_params.mode = Mode::Bpna;
    const CompiledModel bpa_model = CompiledModel::compile(bpa_params);
    const CompiledModel bpna_model = CompiledModel::compile(bpna_params);
    StopRule stop;
    stop.max_transitions = 3000;

    for (std::uint64_t path = 0; path < 100; ++path) {
        RecordingSource rec_src{ModelSampler{&bpa_model, Rng::stream(303, path)}, {}};
        TrajectoryRecorder rec_a;
        (void)run_with(bpa_model, stop, rec_src, rec_a);

        ReplaySource replay{&rec_src.log, 0};
        TrajectoryRecorder rec_b;
        (void)run_with(bpna_model, stop, replay, rec_b);

        REQUIRE(rec_a.points.size() == rec_b.points.size());
        for (std::size_t i = 0; i < rec_a.points.size(); ++i) {
            CHECK(rec_a.points[i].x + rec_a.points[i].y ==
                  rec_b.points[i].x + rec_b.points[i].y);
            CHECK(rec_a.points[i].tau == rec_b.points[i].tau);
        }
    }
}

TEST_CASE("wake-type frequency matches x/(x+y)") {
    const ModelParams params = presets::symmetric_base(3, 7);
    const CompiledModel model = CompiledModel::compile(params);
    ChainState s;
    s.x = 3;
    s.y = 7;
    Rng rng(12);
    const int n = 100000;
    int x_wakes = 0;
    for (int i = 0; i < n; ++i) {
        RecordingSource src{ModelSampler{&model, rng}, {}};
        (void)step_with(s, model, src);
        rng = src.inner.rng;
        x_wakes += src.log.back().wake_x ? 1 : 0;
    }
    const double p = 0.3;
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs((double)x_wakes / n - p) < 4 * se);
}

TEST_CASE("inter-wake gaps have mean 1/(lambda s)") {
    const double lambda = 2e-4;
    const ModelParams params = presets::symmetric_base(4, 6);
    const CompiledModel model = CompiledModel::compile(params);
    ChainState s;
    s.x = 4;
    s.y = 6;
    Rng rng(13);
    const int n = 100000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        RecordingSource src{ModelSampler{&model, rng}, {}};
        (void)step_with(s, model, src);
        rng = src.inner.rng;
        sum += src.log.back().gap;
    }
    const double want = 1.0 / (lambda * 10.0);
    CHECK(std::fabs(sum / n - want) < 4 * want / std::sqrt((double)n));
}

TEST_CASE("runs are deterministic in the seed") {
    const ModelParams params = presets::symmetric_base(2, 2);
    StopRule stop = presets::capped_horizon();
    Rng r1 = Rng::stream(42, 0), r2 = Rng::stream(42, 0);
    const auto a = run(params, stop, r1);
    const auto b = run(params, stop, r2);
    CHECK(a.final_state.n == b.final_state.n);
    CHECK(a.final_state.x == b.final_state.x);
    CHECK(a.final_state.tau == b.final_state.tau);
    CHECK(a.halt == b.halt);
}

TEST_CASE("adaptive recorder keeps a bounded uniformly-strided sample") {
    const ModelParams params = presets::symmetric_base(50, 50);
    const CompiledModel model = CompiledModel::compile(params);
    StopRule stop;
    stop.max_transitions = 100000;
    ModelSampler src{&model, Rng::stream(5, 0)};
    AdaptiveRecorder rec(512);
    (void)run_with(model, stop, src, rec);
    CHECK(rec.points.size() <= 512);
    CHECK(rec.points.size() >= 128);
    const std::uint64_t stride = rec.points[1].n - rec.points[0].n;
    for (std::size_t i = 1; i < rec.points.size(); ++i)
        CHECK(rec.points[i].n - rec.points[i - 1].n == stride);
}

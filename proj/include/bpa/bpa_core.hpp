#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bpa/distributions.hpp"
#include "bpa/rng.hpp"

namespace bpa {

enum class Mode { Bpa, Bpna };

/// Full specification of one process instance. In Bpna mode the attack
/// specs are ignored (treated as identically zero).
struct ModelParams {
    double lambda = 1.0;
    OffspringLaw offspring_x;
    OffspringLaw offspring_y;
    AttackSpec attack_xy;
    AttackSpec attack_yx;
    std::uint64_t x0 = 0, y0 = 0;
    Mode mode = Mode::Bpa;
};

void validate(const ModelParams &params);

/// Embedded-chain state at the n-th wake-up epoch. Aggregate counts only:
/// a step costs O(1) regardless of population size.
struct ChainState {
    std::uint64_t n = 0;
    std::int64_t x = 0, y = 0;
    double tau = 0.0;
    bool absorbed = false;
};

inline std::pair<std::int64_t, std::int64_t> max_min(const ChainState &s) {
    return s.x >= s.y ? std::make_pair(s.x, s.y) : std::make_pair(s.y, s.x);
}

struct StopRule {
    std::optional<std::uint64_t> max_transitions;
    std::optional<double> time_horizon;
    /// Total population at which the path is declared surviving and halted.
    /// Residual extinction probability above size c is q*^c, negligible for
    /// the default 1e4 used by the estimators.
    std::optional<std::int64_t> survival_cap;
    bool stop_on_extinction = true;
};

void validate(const StopRule &stop);

enum class HaltReason { Extinction, Horizon, Transitions, SurvivalCap, Overflow };
const char *to_string(HaltReason r);

struct ReplicationOutcome {
    bool x_extinct = false, y_extinct = false, total_extinct = false;
    std::optional<std::uint64_t> extinct_epoch_x, extinct_epoch_y;
    ChainState final_state;
    double terminal_fraction = 0.0; // x/(x+y) at halt, 0 when extinct
    HaltReason halt = HaltReason::Extinction;
};

/// Per-instance samplers compiled once so the transition loop pays no
/// per-step setup.
struct CompiledModel {
    double lambda = 1.0;
    LawSampler offspring_x, offspring_y;
    AttackSampler attack_xy, attack_yx;
    bool attacks_enabled = true;
    std::uint64_t x0 = 0, y0 = 0;

    static CompiledModel compile(const ModelParams &params);
};

/// Draw source used by the transition loop. The production source wraps a
/// compiled model and an Rng stream; tests substitute recording/replaying
/// sources. Within one transition the loop calls, in order:
///   gap, wake_is_x, offspring_{x|y}, attack_{xy|yx} (Bpa mode only).
struct ModelSampler {
    const CompiledModel *model;
    Rng rng;

    double gap(double rate) { return rng.exponential(rate); }
    bool wake_is_x(double p_x) { return rng.uniform01() < p_x; }
    std::uint64_t offspring_x() { return model->offspring_x.draw(rng); }
    std::uint64_t offspring_y() { return model->offspring_y.draw(rng); }
    std::uint64_t attack_xy(std::uint64_t opposite) { return model->attack_xy.draw(rng, opposite); }
    std::uint64_t attack_yx(std::uint64_t opposite) { return model->attack_yx.draw(rng, opposite); }
};

namespace detail {

// Counts above this bound abort the run (HaltReason::Overflow) before any
// 64-bit arithmetic can wrap.
constexpr std::int64_t kCountCap = std::int64_t{1} << 62;

/// One transition; all draws use pre-step values. Returns false without
/// touching the state when the next wake-up would land past `horizon`.
template <class Source>
bool advance(ChainState &s, const CompiledModel &m, Source &src, const double *horizon) {
    const std::int64_t total = s.x + s.y;
    const double gap = src.gap(m.lambda * (double)total);
    if (horizon && s.tau + gap > *horizon)
        return false;
    const bool x_wakes = src.wake_is_x((double)s.x / (double)total);
    if (x_wakes) {
        const std::uint64_t xi = src.offspring_x();
        const std::uint64_t zeta = m.attacks_enabled ? src.attack_xy((std::uint64_t)s.y) : 0;
        s.x += (std::int64_t)xi + (std::int64_t)zeta - 1;
        s.y -= (std::int64_t)zeta;
    } else {
        const std::uint64_t xi = src.offspring_y();
        const std::uint64_t zeta = m.attacks_enabled ? src.attack_yx((std::uint64_t)s.x) : 0;
        s.y += (std::int64_t)xi + (std::int64_t)zeta - 1;
        s.x -= (std::int64_t)zeta;
    }
    s.n += 1;
    s.tau += gap;
    if (s.x + s.y == 0)
        s.absorbed = true;
    return true;
}

} // namespace detail

/// One transition of the embedded chain. Stepping an absorbed state is a
/// contract violation.
template <class Source>
ChainState step_with(const ChainState &state, const CompiledModel &model, Source &src) {
    if (state.absorbed)
        throw std::logic_error("step: state is absorbed");
    ChainState next = state;
    detail::advance(next, model, src, nullptr);
    return next;
}

ChainState step(const ChainState &state, const ModelParams &params, Rng &rng);

struct NullSink {
    void operator()(const ChainState &) {}
};

/// Runs the chain from (x0, y0) until a stop-rule bound trips or the whole
/// population is absorbed. The sink receives the initial state and every
/// post-transition state.
template <class Source, class Sink = NullSink>
ReplicationOutcome run_with(const CompiledModel &model, const StopRule &stop, Source &src,
                            Sink &&sink = Sink{}) {
    ChainState s;
    s.x = (std::int64_t)model.x0;
    s.y = (std::int64_t)model.y0;
    s.absorbed = (s.x + s.y == 0);

    ReplicationOutcome out;
    auto note_zeros = [&out, &s]() {
        if (s.x == 0 && !out.x_extinct) {
            out.x_extinct = true;
            out.extinct_epoch_x = s.n;
        }
        if (s.y == 0 && !out.y_extinct) {
            out.y_extinct = true;
            out.extinct_epoch_y = s.n;
        }
    };
    note_zeros();
    sink(std::as_const(s));

    for (;;) {
        if (s.absorbed) {
            out.halt = HaltReason::Extinction;
            break;
        }
        if (stop.max_transitions && s.n >= *stop.max_transitions) {
            out.halt = HaltReason::Transitions;
            break;
        }
        if (stop.survival_cap && s.x + s.y >= *stop.survival_cap) {
            out.halt = HaltReason::SurvivalCap;
            break;
        }
        const double *horizon = stop.time_horizon ? &*stop.time_horizon : nullptr;
        if (!detail::advance(s, model, src, horizon)) {
            out.halt = HaltReason::Horizon;
            break;
        }
        if (s.x > detail::kCountCap || s.y > detail::kCountCap) {
            out.halt = HaltReason::Overflow;
            break;
        }
        note_zeros();
        sink(std::as_const(s));
    }

    out.total_extinct = s.absorbed;
    out.final_state = s;
    const std::int64_t total = s.x + s.y;
    out.terminal_fraction = total > 0 ? (double)s.x / (double)total : 0.0;
    return out;
}

ReplicationOutcome run(const ModelParams &params, const StopRule &stop, Rng &rng);

// ---------------------------------------------------------------------------
// Trajectory sinks
// ---------------------------------------------------------------------------

struct TrajectoryPoint {
    std::uint64_t n;
    std::int64_t x, y;
    double tau;
};

/// Records every state (stride 1) or a fixed-stride subsample.
struct TrajectoryRecorder {
    std::uint64_t stride = 1;
    std::vector<TrajectoryPoint> points;

    void operator()(const ChainState &s) {
        if (s.n % stride == 0)
            points.push_back({s.n, s.x, s.y, s.tau});
    }
};

/// Keeps at most `capacity` uniformly strided points without knowing the
/// path length in advance: when full, drops every other point and doubles
/// the stride.
struct AdaptiveRecorder {
    explicit AdaptiveRecorder(std::size_t capacity = 2048) : capacity_(capacity) {}

    void operator()(const ChainState &s) {
        if (s.n % stride_ != 0)
            return;
        points.push_back({s.n, s.x, s.y, s.tau});
        if (points.size() >= capacity_) {
            std::size_t w = 0;
            for (std::size_t i = 0; i < points.size(); i += 2)
                points[w++] = points[i];
            points.resize(w);
            stride_ *= 2;
        }
    }

    std::vector<TrajectoryPoint> points;

  private:
    std::size_t capacity_;
    std::uint64_t stride_ = 1;
};

ReplicationOutcome run_recorded(const ModelParams &params, const StopRule &stop, Rng &rng,
                                std::vector<TrajectoryPoint> &trajectory, std::uint64_t stride = 1);

inline AssumptionReport validate_assumptions(const ModelParams &params) {
    return validate_assumptions(params.offspring_x, params.offspring_y, params.attack_xy,
                                params.attack_yx);
}

} // namespace bpa

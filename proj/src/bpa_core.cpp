#include "bpa/bpa_core.hpp"

#include <cmath>

namespace bpa {

void validate(const ModelParams &params) {
    if (!(params.lambda > 0.0) || !std::isfinite(params.lambda))
        throw std::invalid_argument("ModelParams: lambda must be > 0");
    validate(params.offspring_x);
    validate(params.offspring_y);
    validate(params.attack_xy);
    validate(params.attack_yx);
    if (params.x0 + params.y0 == 0)
        throw std::invalid_argument("ModelParams: x0 + y0 must be >= 1");
}

void validate(const StopRule &stop) {
    if (!stop.max_transitions && !stop.time_horizon && !stop.survival_cap)
        throw std::invalid_argument("StopRule: at least one bound must be set");
    if (stop.max_transitions && *stop.max_transitions == 0)
        throw std::invalid_argument("StopRule: max_transitions must be >= 1");
    if (stop.time_horizon && !(*stop.time_horizon > 0.0))
        throw std::invalid_argument("StopRule: time_horizon must be > 0");
    if (stop.survival_cap && *stop.survival_cap < 1)
        throw std::invalid_argument("StopRule: survival_cap must be >= 1");
}

const char *to_string(HaltReason r) {
    switch (r) {
    case HaltReason::Extinction:
        return "extinction";
    case HaltReason::Horizon:
        return "horizon";
    case HaltReason::Transitions:
        return "transitions";
    case HaltReason::SurvivalCap:
        return "survivalCap";
    case HaltReason::Overflow:
        return "overflow";
    }
    return "?";
}

CompiledModel CompiledModel::compile(const ModelParams &params) {
    CompiledModel m;
    m.lambda = params.lambda;
    m.offspring_x = LawSampler::compile(params.offspring_x);
    m.offspring_y = LawSampler::compile(params.offspring_y);
    m.attack_xy = AttackSampler::compile(params.attack_xy);
    m.attack_yx = AttackSampler::compile(params.attack_yx);
    m.attacks_enabled = params.mode == Mode::Bpa;
    m.x0 = params.x0;
    m.y0 = params.y0;
    return m;
}

ChainState step(const ChainState &state, const ModelParams &params, Rng &rng) {
    const CompiledModel model = CompiledModel::compile(params);
    ModelSampler src{&model, rng};
    ChainState next = step_with(state, model, src);
    rng = src.rng;
    return next;
}

ReplicationOutcome run(const ModelParams &params, const StopRule &stop, Rng &rng) {
    validate(params);
    validate(stop);
    const CompiledModel model = CompiledModel::compile(params);
    ModelSampler src{&model, rng};
    ReplicationOutcome out = run_with(model, stop, src);
    rng = src.rng;
    return out;
}

ReplicationOutcome run_recorded(const ModelParams &params, const StopRule &stop, Rng &rng,
                                std::vector<TrajectoryPoint> &trajectory, std::uint64_t stride) {
    validate(params);
    validate(stop);
    const CompiledModel model = CompiledModel::compile(params);
    ModelSampler src{&model, rng};
    TrajectoryRecorder rec{stride, std::move(trajectory)};
    ReplicationOutcome out = run_with(model, stop, src, rec);
    trajectory = std::move(rec.points);
    rng = src.rng;
    return out;
}

} // namespace bpa

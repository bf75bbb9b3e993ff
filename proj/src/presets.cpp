#include "bpa/presets.hpp"

namespace bpa::presets {

namespace {
const CountLaw kFriends = PoissonCount{4.0};
constexpr double kResist = 0.3;
} // namespace

ModelParams symmetric_base(std::uint64_t x0, std::uint64_t y0, Mode mode) {
    ModelParams p;
    p.lambda = 2e-4;
    p.offspring_x = BinomialOfFriends{kFriends, 0.2667};
    p.offspring_y = BinomialOfFriends{kFriends, 0.2667};
    p.attack_xy = AttackSpec{BinomialOfFriends{kFriends, 0.053}, kResist};
    p.attack_yx = AttackSpec{BinomialOfFriends{kFriends, 0.053}, kResist};
    p.x0 = x0;
    p.y0 = y0;
    p.mode = mode;
    return p;
}

ModelParams asymmetric_base(std::uint64_t x0, std::uint64_t y0, Mode mode) {
    ModelParams p = symmetric_base(x0, y0, mode);
    p.offspring_x = BinomialOfFriends{kFriends, 0.3325};
    p.attack_xy = AttackSpec{BinomialOfFriends{kFriends, 0.0667}, kResist};
    return p;
}

ModelParams coexist_instance(double mx, double my, double mc_star, std::uint64_t x0,
                             std::uint64_t y0, double lambda) {
    ModelParams p;
    p.lambda = lambda;
    p.offspring_x = PoissonThinned{mx, 1.0};
    p.offspring_y = PoissonThinned{my, 1.0};
    p.attack_xy = AttackSpec{PoissonThinned{mc_star / kResist, 1.0}, kResist};
    p.attack_yx = AttackSpec{PoissonThinned{mc_star / kResist, 1.0}, kResist};
    p.x0 = x0;
    p.y0 = y0;
    p.mode = Mode::Bpa;
    return p;
}

StopRule capped_horizon() {
    StopRule stop;
    stop.time_horizon = 1e7;
    stop.survival_cap = 10000;
    return stop;
}

} // namespace bpa::presets

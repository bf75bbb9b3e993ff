#pragma once

#include "bpa/bpa_core.hpp"

namespace bpa::presets {

/// Symmetric benchmark instance behind the `table` presets 1 and 2:
/// lambda = 2e-4, F ~ Poisson(4), offspring Bin(F, 0.2667),
/// attack capacity Bin(F, 0.053) succeeding w.p. 0.3.
/// Offspring mean 1.0668, attack-mean limit 0.0636.
ModelParams symmetric_base(std::uint64_t x0, std::uint64_t y0, Mode mode = Mode::Bpa);

/// Asymmetric variant (presets 3 and 4): the x side upgrades to offspring
/// Bin(F, 0.3325) and attack capacity Bin(F, 0.0667); the y side keeps the
/// symmetric_base laws.
ModelParams asymmetric_base(std::uint64_t x0, std::uint64_t y0, Mode mode = Mode::Bpa);

/// Co-existence study instance (presets 5 and 6): Poisson offspring at the
/// given means, Poisson attack capacity scaled so each side's attack-mean
/// limit equals mc_star (success probability 0.3).
ModelParams coexist_instance(double mx, double my, double mc_star, std::uint64_t x0,
                             std::uint64_t y0, double lambda = 2e-4);

/// Horizon 1e7 with survival cap 1e4.
StopRule capped_horizon();

} // namespace bpa::presets

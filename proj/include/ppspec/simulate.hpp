#pragma once

#include <cstdint>

#include "ppspec/geometry.hpp"
#include "ppspec/models.hpp"

namespace ppspec {

// Draw one pattern from the model on the window; pure function of the seed.
// Replicate streams are derived by callers as derive_seed(master, replicate).
PointPattern simulate(const SpectralModel& model, const Window& window,
                      std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replicate);

}  // namespace ppspec

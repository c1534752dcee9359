#ifndef BNREFINE_SAMPLER_HPP
#define BNREFINE_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bnrefine/network.hpp"

namespace bnrefine {

/// Draws `n` examples by sampling each variable in order from its table row
/// given the already-sampled parents. Reproducible across platforms.
std::vector<Example> forward_sample(const ConcreteNetwork& network, std::size_t n,
                                    std::uint64_t seed);

}  // namespace bnrefine

#endif  // BNREFINE_SAMPLER_HPP

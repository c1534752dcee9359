#include "bnrefine/sampler.hpp"

#include "bnrefine/random.hpp"

namespace bnrefine {

std::vector<Example> forward_sample(const ConcreteNetwork& network, std::size_t n,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Example> out;
  out.reserve(n);
  const std::size_t vars = network.size();
  for (std::size_t t = 0; t < n; ++t) {
    Example ex;
    ex.values.assign(vars, 0);
    for (std::size_t x = 0; x < vars; ++x) {
      const auto j = static_cast<std::size_t>(network.indexer(x).index(ex));
      ex.values[x] = rng.categorical(network.cpt(x).row(j));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace bnrefine

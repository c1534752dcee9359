#ifndef BNREFINE_NETWORK_HPP
#define BNREFINE_NETWORK_HPP

#include <cstddef>
#include <vector>

#include "bnrefine/counts.hpp"
#include "bnrefine/math.hpp"
#include "bnrefine/schema.hpp"

namespace bnrefine {

/// One parent structure with a table per variable. Parents always precede
/// their child in the schema ordering, so the graph is acyclic.
class ConcreteNetwork {
 public:
  ConcreteNetwork() = default;
  /// Validates shapes, ordering and that every row is a probability vector.
  ConcreteNetwork(DomainSchema schema, std::vector<std::vector<std::size_t>> parents,
                  std::vector<Cpt> cpts);

  const DomainSchema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return schema_.size(); }
  const std::vector<std::size_t>& parents(std::size_t x) const { return parents_.at(x); }
  const Cpt& cpt(std::size_t x) const { return cpts_.at(x); }
  const ParentIndexer& indexer(std::size_t x) const { return indexers_.at(x); }

  /// θ_{x = value | parent configuration of `example`}.
  double probability(std::size_t x, const Example& example) const;

  bool operator==(const ConcreteNetwork& o) const {
    return schema_ == o.schema_ && parents_ == o.parents_ && cpts_ == o.cpts_;
  }

 private:
  DomainSchema schema_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<Cpt> cpts_;
  std::vector<ParentIndexer> indexers_;
};

/// Σ_x ln θ_{x=I|x | I|Π_x}; −∞ when some entry is zero.
double joint_log_likelihood(const ConcreteNetwork& network, const Example& example);

}  // namespace bnrefine

#endif  // BNREFINE_NETWORK_HPP

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "equix/document.hpp"
#include "equix/dtd.hpp"
#include "equix/query.hpp"

namespace equix::testing {

// Deterministic generator of small DTDs, conforming documents and queries.
class RandomInstances {
 public:
  explicit RandomInstances(std::uint64_t seed) : rng_(seed) {}

  // Element names r, a..e with r as root. Content models reference later
  // elements, plus occasional optional back references, so small
  // documents always exist.
  Dtd dtd();

  // A document strictly conforming to `dtd` with at most `max_nodes` nodes
  // (elements, attributes and atomic nodes), or nullopt when sampling fails.
  std::optional<XmlDocument> document(const Dtd& dtd, std::size_t max_nodes);

  // Query whose child labels are realizable children of their parent in
  // `dtd` (element content or attributes), occasionally any known label.
  AbstractQuery query(const Dtd& dtd, std::size_t max_nodes);

  // Query labels drawn from the DTD descendants of the parent label.
  AbstractQuery reg_query(const Dtd& dtd, std::size_t max_nodes);

  // Concrete query with at least one negated quantifier when it has edges.
  ConcreteQuery concrete_query(const Dtd& dtd, std::size_t max_nodes);

  Matcher matcher(int depth = 0);

  std::mt19937_64& rng() { return rng_; }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  template <class Q>
  QueryTree<Q> grow(const Dtd& dtd, std::size_t max_nodes, bool descendants, Q (*quantifier)(RandomInstances&));
  NodeSpec node_spec(std::string label);

  std::mt19937_64 rng_;
};

inline constexpr const char* element_alphabet[] = {"r", "a", "b", "c", "d", "e"};
inline constexpr const char* text_vocabulary[] = {"x", "y", "z", "x y", "y z", "1", "2", "10"};

// Satisfaction of a concrete query evaluated directly on its quantifiers,
// without translating it. Returns the nodes retained for output query
// nodes, closed like an output set.
struct ConcreteVerdict {
  bool satisfied = false;
  std::vector<NodeId> out;
};
ConcreteVerdict concrete_oracle(const XmlDocument& doc, const ConcreteQuery& cq);

}  // namespace equix::testing

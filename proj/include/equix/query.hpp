#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "equix/dtd.hpp"
#include "equix/error.hpp"
#include "equix/ids.hpp"
#include "equix/matcher.hpp"

namespace equix {

enum class Quantifier : std::uint8_t { exists, for_all };
enum class ConcreteQuantifier : std::uint8_t { one_is, none_is, all_are, not_all_are };
enum class NodeOperator : std::uint8_t { conjunction, disjunction };

enum class AggFunction : std::uint8_t { count, min, max, sum, avg };
enum class Comparison : std::uint8_t { lt, le, eq, ne, ge, gt };

struct AggConstraint {
  AggFunction function = AggFunction::count;
  Comparison op = Comparison::eq;
  std::string value;

  friend bool operator==(const AggConstraint&, const AggConstraint&) = default;
};

// Per-node data shared by concrete and abstract queries.
struct NodeSpec {
  std::string label;
  Matcher matcher = Matcher::always();
  bool output = false;
  NodeOperator op = NodeOperator::conjunction;
  std::vector<AggFunction> aggregates;
  std::vector<AggConstraint> having;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

// Rooted query tree. A node's id is its insertion index, so parents always
// have smaller ids than their children. `Q` is the edge quantifier type; the
// root's quantifier is unused.
template <class Q>
class QueryTree {
 public:
  struct Node : NodeSpec {
    QueryNodeId id;
    std::optional<QueryNodeId> parent;
    Q quantifier{};
    std::vector<QueryNodeId> children;
    std::uint32_t depth = 0;

    friend bool operator==(const Node&, const Node&) = default;
  };

  explicit QueryTree(NodeSpec root) {
    Node node;
    static_cast<NodeSpec&>(node) = std::move(root);
    nodes_.push_back(std::move(node));
  }

  QueryNodeId add_child(QueryNodeId parent, Q quantifier, NodeSpec spec) {
    Node node;
    static_cast<NodeSpec&>(node) = std::move(spec);
    node.id = QueryNodeId{static_cast<std::uint32_t>(nodes_.size())};
    node.parent = parent;
    node.quantifier = quantifier;
    node.depth = at(parent).depth + 1;
    nodes_[parent.value].children.push_back(node.id);
    nodes_.push_back(std::move(node));
    return nodes_.back().id;
  }

  QueryNodeId root() const { return QueryNodeId{0}; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(QueryNodeId id) const { return at(id); }
  Node& mutable_node(QueryNodeId id) {
    at(id);
    return nodes_[id.value];
  }
  std::span<const Node> nodes() const { return nodes_; }

  std::vector<std::string> path(QueryNodeId id) const {
    std::vector<std::string> out;
    for (std::optional<QueryNodeId> n = id; n; n = at(*n).parent) out.insert(out.begin(), at(*n).label);
    return out;
  }

  std::vector<QueryNodeId> outputs() const {
    std::vector<QueryNodeId> out;
    for (const auto& n : nodes_) {
      if (n.output) out.push_back(n.id);
    }
    return out;
  }

  bool is_ancestor_or_self(QueryNodeId ancestor, QueryNodeId n) const {
    for (std::optional<QueryNodeId> c = n; c; c = at(*c).parent) {
      if (*c == ancestor) return true;
    }
    return false;
  }

  // True when `id` is an output node or an ancestor of one.
  bool leads_to_output(QueryNodeId id) const {
    for (const auto& n : nodes_) {
      if (n.output && is_ancestor_or_self(id, n.id)) return true;
    }
    return false;
  }

  friend bool operator==(const QueryTree&, const QueryTree&) = default;

 private:
  const Node& at(QueryNodeId id) const {
    if (id.value >= nodes_.size()) throw Error("unknown query node " + std::to_string(id.value));
    return nodes_[id.value];
  }

  std::vector<Node> nodes_;
};

using ConcreteQuery = QueryTree<ConcreteQuantifier>;
using AbstractQuery = QueryTree<Quantifier>;

// Pushes negated quantifiers down the tree so that only exists/for-all edges
// and and/or nodes remain. Node ids are preserved.
AbstractQuery translate(const ConcreteQuery& cq);

// Empty when the query can be posed against `dtd`.
std::vector<std::string> validate_query_against_dtd(const AbstractQuery& q, const Dtd& dtd);

// A query node whose label names an attribute of its parent's element.
bool is_attribute_node(const AbstractQuery& q, QueryNodeId id, const Dtd& dtd);

enum class QueryMode : std::uint8_t { strict, ontology };

// A query file: one of the two tree forms plus evaluation settings.
struct QuerySpec {
  std::variant<ConcreteQuery, AbstractQuery> tree;
  QueryMode mode = QueryMode::strict;
  std::string ontology;

  bool is_concrete() const { return std::holds_alternative<ConcreteQuery>(tree); }
  AbstractQuery abstract() const;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

// Throws QuerySchemaError with a JSON pointer to the offending value.
QuerySpec parse_query_file(std::string_view text);
// Canonical JSON text; parse_query_file(serialize_query(q)) == q.
std::string serialize_query(const QuerySpec& spec);

std::string_view to_string(ConcreteQuantifier q);
std::string_view to_string(Quantifier q);
std::string_view to_string(AggFunction f);
std::string_view to_string(Comparison c);

}  // namespace equix

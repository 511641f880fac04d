#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "equix/document.hpp"
#include "equix/ids.hpp"
#include "equix/query.hpp"

namespace equix {

// Assignment of document nodes to query nodes. Each set is kept sorted.
class Matching {
 public:
  explicit Matching(std::size_t query_size) : sets_(query_size) {}

  std::size_t query_size() const { return sets_.size(); }
  std::span<const NodeId> operator[](QueryNodeId q) const { return sets_.at(q.value); }
  bool contains(QueryNodeId q, NodeId x) const;
  void insert(QueryNodeId q, NodeId x);
  void assign(QueryNodeId q, std::vector<NodeId> nodes);

  // Pointwise containment.
  bool subset_of(const Matching& other) const;

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<std::vector<NodeId>> sets_;
};

Matching union_matchings(const Matching& a, const Matching& b);

// Boolean table over (query node, document node).
class MatchArray {
 public:
  MatchArray(std::size_t query_size, std::size_t document_size)
      : columns_(document_size), cells_(query_size * document_size, 0) {}

  bool operator()(QueryNodeId q, NodeId x) const { return cells_[q.value * columns_ + x.value] != 0; }
  void set(QueryNodeId q, NodeId x, bool value) { cells_[q.value * columns_ + x.value] = value ? 1 : 0; }

  std::size_t query_size() const { return columns_ == 0 ? 0 : cells_.size() / columns_; }
  std::size_t document_size() const { return columns_; }

  // The matching whose sets are the true entries of each row.
  Matching retrieval() const;

 private:
  std::size_t columns_;
  std::vector<char> cells_;
};

struct OutputSet {
  std::vector<NodeId> out;
  std::vector<NodeId> ancestors;
  std::vector<NodeId> descendants;

  bool empty() const { return out.empty(); }
  // N_R, sorted.
  std::vector<NodeId> all() const;

  friend bool operator==(const OutputSet&, const OutputSet&) = default;
};

// Closure of `out` under proper ancestors and proper descendants.
OutputSet close_output_set(const XmlDocument& doc, std::vector<NodeId> out);

// Output set induced by a matching: the nodes matched to output query nodes.
OutputSet output_set_of(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu);

// Whether a query edge is realized by a child edge (strict queries) or by
// any descendant (ontology queries).
enum class EdgeSemantics : std::uint8_t { child, descendant };

bool node_matches(const XmlDocument& doc, NodeId x, const AbstractQuery& q, QueryNodeId n);

// `child` identifies the edge (parent(child), child); `x` is matched to the
// parent.
bool edge_satisfied(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu, NodeId x,
                    QueryNodeId child, EdgeSemantics semantics = EdgeSemantics::child);

// Label and connectivity conditions of a matching.
bool is_matching(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu,
                 EdgeSemantics semantics = EdgeSemantics::child);

bool is_satisfying_matching(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu, const TextCache& text,
                            EdgeSemantics semantics = EdgeSemantics::child);
bool is_satisfying_matching(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu,
                            EdgeSemantics semantics = EdgeSemantics::child);

// Node condition evaluated against the current match table; every child row
// of `n` must already be final.
bool matches_proc(const XmlDocument& doc, const AbstractQuery& q, QueryNodeId n, NodeId x, const MatchArray& table,
                  const TextCache& text);

struct Evaluation {
  MatchArray table;
  Matching retrieval;
  OutputSet output;
};

Evaluation evaluate(const XmlDocument& doc, const AbstractQuery& q);
Evaluation evaluate(const XmlDocument& doc, const AbstractQuery& q, const TextCache& text);
OutputSet query_evaluate(const XmlDocument& doc, const AbstractQuery& q);

struct Projection {
  XmlDocument document;
  // Original node id for every node of `document`.
  std::vector<NodeId> source;
};

// Subtree induced by N_R. Throws Error when the output set is empty.
XmlDocument project(const XmlDocument& doc, const OutputSet& output);
// Attribute types and the ID index carry over from `doc`.
Projection project_with_source(const XmlDocument& doc, const OutputSet& output);

struct CatalogResult {
  std::size_t source_index = 0;
  XmlDocument document;
};

// One projected document per input document with a nonempty output set, in
// input order.
std::vector<CatalogResult> evaluate_catalog(const AbstractQuery& q, std::span<const XmlDocument> documents);

struct BruteForceBounds {
  std::size_t max_document_nodes = 14;
  std::size_t max_query_nodes = 7;
  std::uint64_t max_steps = 20'000'000;
};

// Calls `visit` for every satisfying matching that maps the query root to
// the document root. Throws BoundExceeded when an input or the search is
// larger than the bounds allow (documents are capped at 64 nodes).
void for_each_satisfying_matching(const XmlDocument& doc, const AbstractQuery& q, EdgeSemantics semantics,
                                  const BruteForceBounds& bounds, const std::function<void(const Matching&)>& visit);

// Output set of the union of all satisfying matchings.
OutputSet brute_force_output_set(const XmlDocument& doc, const AbstractQuery& q, const BruteForceBounds& bounds = {});
OutputSet brute_force_output_set(const XmlDocument& doc, const AbstractQuery& q, EdgeSemantics semantics,
                                 const BruteForceBounds& bounds);

}  // namespace equix

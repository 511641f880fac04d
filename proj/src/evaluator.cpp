#include "equix/evaluator.hpp"

#include <algorithm>
#include <map>
#include <string_view>

#include "equix/error.hpp"

namespace equix {

bool Matching::contains(QueryNodeId q, NodeId x) const {
  const auto& set = sets_.at(q.value);
  return std::binary_search(set.begin(), set.end(), x);
}

void Matching::insert(QueryNodeId q, NodeId x) {
  auto& set = sets_.at(q.value);
  auto it = std::lower_bound(set.begin(), set.end(), x);
  if (it == set.end() || *it != x) set.insert(it, x);
}

void Matching::assign(QueryNodeId q, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  sets_.at(q.value) = std::move(nodes);
}

bool Matching::subset_of(const Matching& other) const {
  if (other.sets_.size() != sets_.size()) return false;
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    if (!std::includes(other.sets_[i].begin(), other.sets_[i].end(), sets_[i].begin(), sets_[i].end())) return false;
  }
  return true;
}

Matching union_matchings(const Matching& a, const Matching& b) {
  if (a.query_size() != b.query_size()) throw Error("matchings of different queries");
  Matching out(a.query_size());
  for (std::uint32_t i = 0; i < a.query_size(); ++i) {
    QueryNodeId q{i};
    std::vector<NodeId> merged;
    std::set_union(a[q].begin(), a[q].end(), b[q].begin(), b[q].end(), std::back_inserter(merged));
    out.assign(q, std::move(merged));
  }
  return out;
}

Matching MatchArray::retrieval() const {
  Matching out(query_size());
  for (std::uint32_t q = 0; q < query_size(); ++q) {
    std::vector<NodeId> row;
    for (std::uint32_t x = 0; x < columns_; ++x) {
      if (cells_[q * columns_ + x] != 0) row.push_back(NodeId{x});
    }
    out.assign(QueryNodeId{q}, std::move(row));
  }
  return out;
}

std::vector<NodeId> OutputSet::all() const {
  std::vector<NodeId> nodes = out;
  nodes.insert(nodes.end(), ancestors.begin(), ancestors.end());
  nodes.insert(nodes.end(), descendants.begin(), descendants.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

OutputSet close_output_set(const XmlDocument& doc, std::vector<NodeId> out) {
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<char> above(doc.size(), 0);
  std::vector<char> below(doc.size(), 0);
  for (NodeId n : out) {
    for (auto p = doc.parent(n); p && !above[p->value]; p = doc.parent(*p)) above[p->value] = 1;
    std::vector<NodeId> stack(doc.node(n).children.begin(), doc.node(n).children.end());
    while (!stack.empty()) {
      NodeId c = stack.back();
      stack.pop_back();
      if (below[c.value]) continue;
      below[c.value] = 1;
      const auto& children = doc.node(c).children;
      stack.insert(stack.end(), children.begin(), children.end());
    }
  }
  OutputSet result;
  result.out = std::move(out);
  for (std::uint32_t i = 0; i < doc.size(); ++i) {
    if (above[i]) result.ancestors.push_back(NodeId{i});
    if (below[i]) result.descendants.push_back(NodeId{i});
  }
  return result;
}

OutputSet output_set_of(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu) {
  std::vector<NodeId> out;
  for (QueryNodeId o : q.outputs()) out.insert(out.end(), mu[o].begin(), mu[o].end());
  return close_output_set(doc, std::move(out));
}

bool node_matches(const XmlDocument& doc, NodeId x, const AbstractQuery& q, QueryNodeId n) {
  const auto& node = doc.node(x);
  return node.kind != NodeKind::atomic && node.label == q.node(n).label;
}

namespace {

// Document nodes related to `x` through a query edge into `child`: matching
// children, or matching proper descendants.
std::vector<NodeId> related_nodes(const XmlDocument& doc, const AbstractQuery& q, NodeId x, QueryNodeId child,
                                  EdgeSemantics semantics) {
  std::vector<NodeId> out;
  if (semantics == EdgeSemantics::child) {
    for (NodeId c : doc.node(x).children) {
      if (node_matches(doc, c, q, child)) out.push_back(c);
    }
  } else {
    for (const auto& node : doc.nodes()) {
      if (doc.is_proper_ancestor(x, node.id) && node_matches(doc, node.id, q, child)) out.push_back(node.id);
    }
  }
  return out;
}

bool connected(const XmlDocument& doc, const Matching& mu, QueryNodeId parent, NodeId x, EdgeSemantics semantics) {
  if (semantics == EdgeSemantics::child) {
    auto p = doc.parent(x);
    return p && mu.contains(parent, *p);
  }
  for (NodeId a : mu[parent]) {
    if (doc.is_proper_ancestor(a, x)) return true;
  }
  return false;
}

}  // namespace

bool edge_satisfied(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu, NodeId x, QueryNodeId child,
                    EdgeSemantics semantics) {
  auto related = related_nodes(doc, q, x, child, semantics);
  auto in_mu = [&](NodeId y) { return mu.contains(child, y); };
  if (q.node(child).quantifier == Quantifier::exists) return std::any_of(related.begin(), related.end(), in_mu);
  return std::all_of(related.begin(), related.end(), in_mu);
}

bool is_matching(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu, EdgeSemantics semantics) {
  if (mu.query_size() != q.size()) return false;
  for (const auto& n : q.nodes()) {
    for (NodeId x : mu[n.id]) {
      if (!doc.contains(x) || !node_matches(doc, x, q, n.id)) return false;
      if (!n.parent) {
        if (x != doc.root()) return false;
      } else if (!connected(doc, mu, *n.parent, x, semantics)) {
        return false;
      }
    }
  }
  return true;
}

bool is_satisfying_matching(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu, const TextCache& text,
                            EdgeSemantics semantics) {
  if (!is_matching(doc, q, mu, semantics)) return false;
  for (const auto& n : q.nodes()) {
    for (NodeId x : mu[n.id]) {
      bool content = n.matcher(text(x));
      if (n.children.empty()) {
        if (!content) return false;
        continue;
      }
      auto satisfied = [&](QueryNodeId c) { return edge_satisfied(doc, q, mu, x, c, semantics); };
      bool ok = n.op == NodeOperator::conjunction
                    ? content && std::all_of(n.children.begin(), n.children.end(), satisfied)
                    : content || std::any_of(n.children.begin(), n.children.end(), satisfied);
      if (!ok) return false;
    }
  }
  return true;
}

bool is_satisfying_matching(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu,
                            EdgeSemantics semantics) {
  TextCache text(doc);
  return is_satisfying_matching(doc, q, mu, text, semantics);
}

bool matches_proc(const XmlDocument& doc, const AbstractQuery& q, QueryNodeId n, NodeId x, const MatchArray& table,
                  const TextCache& text) {
  const auto& node = q.node(n);
  auto content = [&] { return node.matcher.is_always() || node.matcher(text(x)); };
  if (node.children.empty()) return content();

  auto status = [&](QueryNodeId m) {
    bool universal = q.node(m).quantifier == Quantifier::for_all;
    for (NodeId c : doc.node(x).children) {
      if (!node_matches(doc, c, q, m)) continue;
      bool entry = table(m, c);
      if (universal && !entry) return false;
      if (!universal && entry) return true;
    }
    return universal;
  };

  if (node.op == NodeOperator::disjunction) {
    return std::any_of(node.children.begin(), node.children.end(), status) || content();
  }
  return std::all_of(node.children.begin(), node.children.end(), status) && content();
}

namespace {

// Interned label paths: every non-atomic document node and every query node
// gets the id of its root-to-node label sequence.
struct PathIndex {
  std::vector<int> of_document;
  std::vector<std::vector<NodeId>> nodes_with_path;
  std::vector<int> of_query;
};

PathIndex index_paths(const XmlDocument& doc, const AbstractQuery& q) {
  std::map<std::pair<int, std::string_view>, int> ids;
  PathIndex index;
  index.of_document.assign(doc.size(), -1);
  // Parents precede children in id order.
  for (const auto& node : doc.nodes()) {
    if (node.kind == NodeKind::atomic) continue;
    int parent = node.parent ? index.of_document[node.parent->value] : -1;
    auto [it, inserted] = ids.try_emplace({parent, node.label}, static_cast<int>(ids.size()));
    if (inserted) index.nodes_with_path.emplace_back();
    index.of_document[node.id.value] = it->second;
    index.nodes_with_path[it->second].push_back(node.id);
  }
  index.of_query.assign(q.size(), -1);
  for (const auto& node : q.nodes()) {
    int parent = node.parent ? index.of_query[node.parent->value] : -1;
    if (node.parent && parent < 0) continue;
    auto it = ids.find({parent, node.label});
    if (it != ids.end()) index.of_query[node.id.value] = it->second;
  }
  return index;
}

std::vector<QueryNodeId> by_depth(const AbstractQuery& q) {
  std::vector<QueryNodeId> order;
  for (const auto& n : q.nodes()) order.push_back(n.id);
  std::stable_sort(order.begin(), order.end(),
                   [&](QueryNodeId a, QueryNodeId b) { return q.node(a).depth < q.node(b).depth; });
  return order;
}

}  // namespace

Evaluation evaluate(const XmlDocument& doc, const AbstractQuery& q, const TextCache& text) {
  MatchArray table(q.size(), doc.size());
  const PathIndex paths = index_paths(doc, q);
  auto candidates = [&](QueryNodeId n) -> std::span<const NodeId> {
    int path = paths.of_query[n.value];
    if (path < 0) return {};
    return paths.nodes_with_path[path];
  };
  const auto ascending = by_depth(q);

  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) {
    for (NodeId x : candidates(*it)) table.set(*it, x, matches_proc(doc, q, *it, x, table, text));
  }
  for (QueryNodeId n : ascending) {
    auto parent = q.node(n).parent;
    if (!parent) continue;
    for (NodeId x : candidates(n)) {
      if (table(n, x) && !table(*parent, *doc.parent(x))) table.set(n, x, false);
    }
  }

  Matching retrieval = table.retrieval();
  OutputSet output = output_set_of(doc, q, retrieval);
  return Evaluation{std::move(table), std::move(retrieval), std::move(output)};
}

Evaluation evaluate(const XmlDocument& doc, const AbstractQuery& q) {
  TextCache text(doc);
  return evaluate(doc, q, text);
}

OutputSet query_evaluate(const XmlDocument& doc, const AbstractQuery& q) { return evaluate(doc, q).output; }

Projection project_with_source(const XmlDocument& doc, const OutputSet& output) {
  if (output.empty()) throw Error("cannot project an empty output set");
  std::vector<char> keep(doc.size(), 0);
  for (NodeId n : output.all()) keep[n.value] = 1;
  keep[doc.root().value] = 1;

  auto build = [&](auto& self, NodeId id) -> SourceNode {
    const auto& n = doc.node(id);
    if (n.kind == NodeKind::atomic) return SourceNode::text_node(n.label);
    SourceNode out = SourceNode::element(n.label);
    for (NodeId child : n.children) {
      if (!keep[child.value]) continue;
      const auto& c = doc.node(child);
      if (c.kind == NodeKind::attribute) {
        out.attributes.emplace_back(c.label, std::string(doc.attribute_value(child)));
      } else {
        out.children.push_back(self(self, child));
      }
    }
    return out;
  };
  SourceNode source = build(build, doc.root());

  XmlDocument projected = XmlDocument::from_source(source, attribute_types_of(doc));

  // Children of corresponding nodes line up once unkept children are skipped.
  std::vector<NodeId> origin(projected.size());
  std::vector<std::pair<NodeId, NodeId>> stack{{projected.root(), doc.root()}};
  while (!stack.empty()) {
    auto [mine, theirs] = stack.back();
    stack.pop_back();
    origin[mine.value] = theirs;
    std::vector<NodeId> kept;
    for (NodeId c : doc.node(theirs).children) {
      if (keep[c.value]) kept.push_back(c);
    }
    const auto& children = projected.node(mine).children;
    for (std::size_t i = 0; i < children.size(); ++i) stack.emplace_back(children[i], kept.at(i));
  }
  return Projection{std::move(projected), std::move(origin)};
}

XmlDocument project(const XmlDocument& doc, const OutputSet& output) {
  return project_with_source(doc, output).document;
}

std::vector<CatalogResult> evaluate_catalog(const AbstractQuery& q, std::span<const XmlDocument> documents) {
  std::vector<CatalogResult> out;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    OutputSet output = query_evaluate(documents[i], q);
    if (!output.empty()) out.push_back(CatalogResult{i, project(documents[i], output)});
  }
  return out;
}

}  // namespace equix

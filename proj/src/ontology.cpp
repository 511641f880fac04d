#include "equix/ontology.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>

#include "equix/error.hpp"

namespace equix {

using nlohmann::json;

Ontology parse_ontology(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw QuerySchemaError(std::string("invalid JSON: ") + e.what(), "/");
  }
  if (!j.is_object()) throw QuerySchemaError("ontology must be an object", "/");
  for (const auto& [key, value] : j.items()) {
    if (key != "name" && key != "terms") throw QuerySchemaError("unknown field '" + key + "'", "/" + key);
  }
  if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty()) {
    throw QuerySchemaError("'name' must be a non-empty string", "/name");
  }
  if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty()) {
    throw QuerySchemaError("'terms' must be a non-empty array", "/terms");
  }
  Ontology o{j["name"].get<std::string>(), {}};
  for (std::size_t i = 0; i < j["terms"].size(); ++i) {
    const auto& term = j["terms"][i];
    if (!term.is_string()) throw QuerySchemaError("term must be a string", "/terms/" + std::to_string(i));
    o.terms.insert(term.get<std::string>());
  }
  return o;
}

std::string serialize_ontology(const Ontology& o) {
  json j{{"name", o.name}, {"terms", json::array()}};
  for (const auto& t : o.terms) j["terms"].push_back(t);
  return j.dump(2);
}

bool describable_by(const XmlDocument& doc, const Ontology& o) {
  return std::any_of(doc.nodes().begin(), doc.nodes().end(),
                     [&](const XmlNode& n) { return n.kind != NodeKind::atomic && o.terms.contains(n.label); });
}

std::vector<std::string> validate_query_against_ontology(const AbstractQuery& q, const Ontology& o) {
  std::vector<std::string> out;
  for (const auto& n : q.nodes()) {
    if (!o.terms.contains(n.label)) {
      out.push_back("label '" + n.label + "' is not a term of ontology '" + o.name + "'");
    }
  }
  if (q.outputs().empty()) out.push_back("query has no output node");
  return out;
}

namespace {

// Non-atomic nodes per label in pre-order, for descendant range lookups.
class LabelIndex {
 public:
  explicit LabelIndex(const XmlDocument& doc) {
    std::vector<NodeId> order(doc.size());
    for (const auto& n : doc.nodes()) order[doc.preorder(n.id)] = n.id;
    for (NodeId id : order) {
      const auto& n = doc.node(id);
      if (n.kind != NodeKind::atomic) by_label_[n.label].push_back(id);
    }
  }

  std::span<const NodeId> nodes(std::string_view label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return {};
    return it->second;
  }

 private:
  std::map<std::string, std::vector<NodeId>, std::less<>> by_label_;
};

// Positions in a pre-order sorted node list that fall strictly inside the
// subtree of `x`.
std::pair<std::size_t, std::size_t> descendant_range(const XmlDocument& doc, std::span<const NodeId> list, NodeId x) {
  auto key = [&](NodeId n) { return doc.preorder(n); };
  auto lo = std::upper_bound(list.begin(), list.end(), doc.preorder(x),
                             [&](std::uint32_t v, NodeId n) { return v < key(n); });
  auto hi = std::lower_bound(list.begin(), list.end(), doc.subtree_end(x),
                             [&](NodeId n, std::uint32_t v) { return key(n) < v; });
  auto first = static_cast<std::size_t>(lo - list.begin());
  auto last = static_cast<std::size_t>(hi - list.begin());
  return {first, std::max(first, last)};
}

std::vector<QueryNodeId> by_depth(const AbstractQuery& q) {
  std::vector<QueryNodeId> order;
  for (const auto& n : q.nodes()) order.push_back(n.id);
  std::stable_sort(order.begin(), order.end(),
                   [&](QueryNodeId a, QueryNodeId b) { return q.node(a).depth < q.node(b).depth; });
  return order;
}

}  // namespace

Evaluation evaluate_reg(const XmlDocument& doc, const AbstractQuery& q, const TextCache& text) {
  MatchArray table(q.size(), doc.size());
  const LabelIndex index(doc);
  const std::vector<NodeId> root_only{doc.root()};
  auto candidates = [&](QueryNodeId n) -> std::span<const NodeId> {
    const auto& node = q.node(n);
    if (node.parent) return index.nodes(node.label);
    if (doc.label(doc.root()) == node.label) return root_only;
    return {};
  };
  const auto ascending = by_depth(q);

  // prefix[n][i]: true entries of row n among the first i nodes labeled l(n).
  std::vector<std::vector<std::uint32_t>> prefix(q.size());
  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) {
    const QueryNodeId n = *it;
    const auto& node = q.node(n);
    for (NodeId x : candidates(n)) {
      auto content = [&] { return node.matcher.is_always() || node.matcher(text(x)); };
      auto status = [&](QueryNodeId m) {
        auto list = index.nodes(q.node(m).label);
        auto [first, last] = descendant_range(doc, list, x);
        std::uint32_t hits = prefix[m.value][last] - prefix[m.value][first];
        return q.node(m).quantifier == Quantifier::exists ? hits > 0 : hits == last - first;
      };
      bool ok;
      if (node.children.empty()) {
        ok = content();
      } else if (node.op == NodeOperator::disjunction) {
        ok = std::any_of(node.children.begin(), node.children.end(), status) || content();
      } else {
        ok = std::all_of(node.children.begin(), node.children.end(), status) && content();
      }
      table.set(n, x, ok);
    }
    // Prefix counts over every node with the label, as the parent consults
    // them through descendant ranges.
    auto list = index.nodes(node.label);
    auto& counts = prefix[n.value];
    counts.assign(list.size() + 1, 0);
    for (std::size_t i = 0; i < list.size(); ++i) counts[i + 1] = counts[i] + (table(n, list[i]) ? 1 : 0);
  }

  // Keep an entry when some proper ancestor is kept for the parent query node.
  std::vector<NodeId> order(doc.size());
  for (const auto& n : doc.nodes()) order[doc.preorder(n.id)] = n.id;
  for (QueryNodeId n : ascending) {
    auto parent = q.node(n).parent;
    if (!parent) continue;
    // Stack of subtree ends of open ancestors kept for the parent.
    std::vector<std::uint32_t> open;
    for (NodeId x : order) {
      std::uint32_t pre = doc.preorder(x);
      while (!open.empty() && open.back() <= pre) open.pop_back();
      if (table(n, x) && open.empty()) table.set(n, x, false);
      if (table(*parent, x)) open.push_back(doc.subtree_end(x));
    }
  }

  Matching retrieval = table.retrieval();
  OutputSet output = output_set_of(doc, q, retrieval);
  return Evaluation{std::move(table), std::move(retrieval), std::move(output)};
}

Evaluation evaluate_reg(const XmlDocument& doc, const AbstractQuery& q) {
  TextCache text(doc);
  return evaluate_reg(doc, q, text);
}

OutputSet query_evaluate_reg(const XmlDocument& doc, const AbstractQuery& q) { return evaluate_reg(doc, q).output; }

OutputSet brute_force_output_set_reg(const XmlDocument& doc, const AbstractQuery& q, const BruteForceBounds& bounds) {
  return brute_force_output_set(doc, q, EdgeSemantics::descendant, bounds);
}

}  // namespace equix

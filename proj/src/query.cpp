#include <algorithm>
#include <string>
#include <vector>

#include "equix/query.hpp"

namespace equix {

namespace {

bool negated(ConcreteQuantifier q) { return q == ConcreteQuantifier::none_is || q == ConcreteQuantifier::not_all_are; }

Quantifier positive_form(ConcreteQuantifier q) {
  return (q == ConcreteQuantifier::one_is || q == ConcreteQuantifier::not_all_are) ? Quantifier::exists
                                                                                    : Quantifier::for_all;
}

Quantifier flip(Quantifier q) { return q == Quantifier::exists ? Quantifier::for_all : Quantifier::exists; }

NodeSpec polarized(const NodeSpec& spec, bool negative) {
  NodeSpec out = spec;
  out.op = negative ? NodeOperator::disjunction : NodeOperator::conjunction;
  if (negative) out.matcher = complement(spec.matcher);
  return out;
}

bool in_content(const Dtd& dtd, std::string_view parent, std::string_view child) {
  const auto& content = dtd.content(parent);
  if (content.kind == ContentModel::Kind::any) return dtd.has_element(child);
  auto names = referenced_names(content);
  return std::find(names.begin(), names.end(), child) != names.end();
}

}  // namespace

AbstractQuery translate(const ConcreteQuery& cq) {
  std::vector<char> negative(cq.size(), 0);
  AbstractQuery out(polarized(cq.node(cq.root()), false));
  for (const auto& node : cq.nodes()) {
    if (!node.parent) continue;
    bool parent_negative = negative[node.parent->value] != 0;
    bool child_negative = parent_negative != negated(node.quantifier);
    Quantifier q = positive_form(node.quantifier);
    if (parent_negative) q = flip(q);
    negative[node.id.value] = child_negative;
    out.add_child(*node.parent, q, polarized(node, child_negative));
  }
  return out;
}

bool is_attribute_node(const AbstractQuery& q, QueryNodeId id, const Dtd& dtd) {
  const auto& node = q.node(id);
  if (!node.parent) return false;
  const auto& parent = q.node(*node.parent);
  if (!dtd.has_element(parent.label) || dtd.find_attribute(parent.label, node.label) == nullptr) return false;
  return !in_content(dtd, parent.label, node.label);
}

std::vector<std::string> validate_query_against_dtd(const AbstractQuery& q, const Dtd& dtd) {
  std::vector<std::string> out;
  const auto& root = q.node(q.root());
  if (root.label != dtd.root_element()) {
    out.push_back("query root '" + root.label + "' does not match the DTD root element '" + dtd.root_element() + "'");
  }
  for (const auto& node : q.nodes()) {
    if (!node.parent) continue;
    const auto& parent = q.node(*node.parent);
    if (is_attribute_node(q, parent.id, dtd)) {
      out.push_back("'" + node.label + "' is placed under attribute '" + parent.label + "'");
      continue;
    }
    if (!dtd.has_element(parent.label)) continue;
    bool realizable = in_content(dtd, parent.label, node.label) ||
                      dtd.find_attribute(parent.label, node.label) != nullptr;
    if (!realizable) out.push_back("'" + node.label + "' cannot appear under '" + parent.label + "'");
  }
  if (q.outputs().empty()) out.push_back("query has no output node");
  return out;
}

AbstractQuery QuerySpec::abstract() const {
  if (const auto* cq = std::get_if<ConcreteQuery>(&tree)) return translate(*cq);
  return std::get<AbstractQuery>(tree);
}

std::string_view to_string(ConcreteQuantifier q) {
  switch (q) {
    case ConcreteQuantifier::one_is: return "one-is";
    case ConcreteQuantifier::none_is: return "none-is";
    case ConcreteQuantifier::all_are: return "all-are";
    case ConcreteQuantifier::not_all_are: return "not-all-are";
  }
  return {};
}

std::string_view to_string(Quantifier q) { return q == Quantifier::exists ? "exists" : "for-all"; }

std::string_view to_string(AggFunction f) {
  switch (f) {
    case AggFunction::count: return "count";
    case AggFunction::min: return "min";
    case AggFunction::max: return "max";
    case AggFunction::sum: return "sum";
    case AggFunction::avg: return "avg";
  }
  return {};
}

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::lt: return "<";
    case Comparison::le: return "<=";
    case Comparison::eq: return "=";
    case Comparison::ne: return "!=";
    case Comparison::ge: return ">=";
    case Comparison::gt: return ">";
  }
  return {};
}

}  // namespace equix

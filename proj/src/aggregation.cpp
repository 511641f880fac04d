#include "equix/aggregation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "equix/error.hpp"

namespace equix {

namespace {

std::optional<QueryNodeId> find_grouping_node(const AbstractQuery& q, QueryNodeId n) {
  for (auto p = q.node(n).parent; p; p = q.node(*p).parent) {
    if (q.leads_to_output(*p)) return p;
  }
  return std::nullopt;
}

bool annotated(const AbstractQuery::Node& n) { return !n.aggregates.empty() || !n.having.empty(); }

std::string join_path(const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& label : labels) {
    if (!out.empty()) out += '/';
    out += label;
  }
  return out;
}

// Functions needed at `n`: displayed ones first, then those only constrained.
std::vector<std::pair<AggFunction, bool>> needed_functions(const AbstractQuery::Node& n) {
  std::vector<std::pair<AggFunction, bool>> out;
  auto add = [&](AggFunction f, bool displayed) {
    auto it = std::find_if(out.begin(), out.end(), [f](const auto& e) { return e.first == f; });
    if (it == out.end()) out.emplace_back(f, displayed);
  };
  for (AggFunction f : n.aggregates) add(f, true);
  for (const auto& c : n.having) add(c.function, false);
  return out;
}

template <class T>
bool compare(const T& a, Comparison op, const T& b) {
  switch (op) {
    case Comparison::lt:
      return a < b;
    case Comparison::le:
      return a <= b;
    case Comparison::eq:
      return a == b;
    case Comparison::ne:
      return a != b;
    case Comparison::ge:
      return a >= b;
    case Comparison::gt:
      return a > b;
  }
  return false;
}

}  // namespace

QueryNodeId grouping_node(const AbstractQuery& q, QueryNodeId n) {
  if (auto g = find_grouping_node(q, n)) return *g;
  throw ValidationError({"aggregation at query node " + std::to_string(n.value) + " has no grouping node"});
}

std::vector<std::string> validate_aggregation(const AbstractQuery& q) {
  std::vector<std::string> out;
  for (const auto& n : q.nodes()) {
    if (annotated(n) && !find_grouping_node(q, n.id)) {
      out.push_back("aggregation on '" + join_path(q.path(n.id)) +
                    "' has no grouping node: no proper ancestor is an output node or lies above one");
    }
  }
  return out;
}

bool has_aggregation(const AbstractQuery& q) {
  return std::any_of(q.nodes().begin(), q.nodes().end(), annotated);
}

std::string format_value(const AggValue& value) {
  if (!value.defined) return "undefined";
  if (!value.numeric) return value.text;
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof buffer, value.number);
  return std::string(buffer, result.ptr);
}

std::optional<double> parse_number(std::string_view text) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!text.empty() && space(text.front())) text.remove_prefix(1);
  while (!text.empty() && space(text.back())) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  char first = text.front() == '-' && text.size() > 1 ? text[1] : text.front();
  if (first != '.' && (first < '0' || first > '9')) return std::nullopt;
  double value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

AggValue aggregate(AggFunction f, const std::vector<std::string>& group) {
  if (f == AggFunction::count) return AggValue::of_number(static_cast<double>(group.size()));

  std::vector<double> numbers;
  for (const auto& text : group) {
    if (auto v = parse_number(text)) numbers.push_back(*v);
  }
  bool all_numeric = numbers.size() == group.size();

  switch (f) {
    case AggFunction::sum: {
      if (!all_numeric) return AggValue::undefined();
      double total = 0;
      for (double v : numbers) total += v;
      return AggValue::of_number(total);
    }
    case AggFunction::avg: {
      if (!all_numeric || numbers.empty()) return AggValue::undefined();
      double total = 0;
      for (double v : numbers) total += v;
      return AggValue::of_number(total / static_cast<double>(numbers.size()));
    }
    case AggFunction::min:
    case AggFunction::max: {
      if (group.empty()) return AggValue::undefined();
      bool want_min = f == AggFunction::min;
      if (all_numeric) {
        auto it = want_min ? std::min_element(numbers.begin(), numbers.end())
                           : std::max_element(numbers.begin(), numbers.end());
        return AggValue::of_number(*it);
      }
      auto it = want_min ? std::min_element(group.begin(), group.end()) : std::max_element(group.begin(), group.end());
      return AggValue::of_text(*it);
    }
    case AggFunction::count:
      break;
  }
  return AggValue::undefined();
}

bool satisfies(const AggValue& value, Comparison op, std::string_view constant) {
  if (!value.defined) return false;
  if (value.numeric) {
    auto bound = parse_number(constant);
    return bound && compare(value.number, op, *bound);
  }
  return compare(std::string_view(value.text), op, constant);
}

std::vector<GroupAggregate> compute_aggregates(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu,
                                               const TextCache& text) {
  std::vector<GroupAggregate> out;
  for (const auto& n : q.nodes()) {
    if (!annotated(n)) continue;
    QueryNodeId g = grouping_node(q, n.id);
    const auto functions = needed_functions(n);
    for (NodeId instance : mu[g]) {
      std::vector<std::string> group;
      for (NodeId x : mu[n.id]) {
        if (doc.is_proper_ancestor(instance, x)) group.push_back(text(x));
      }
      for (const auto& [f, displayed] : functions) {
        out.push_back(GroupAggregate{n.id, g, instance, f, aggregate(f, group), displayed});
      }
    }
  }
  return out;
}

std::vector<NodeId> failing_groups(const AbstractQuery& q, const std::vector<GroupAggregate>& aggregates) {
  std::set<NodeId> failing;
  for (const auto& a : aggregates) {
    for (const auto& c : q.node(a.node).having) {
      if (c.function == a.function && !satisfies(a.value, c.op, c.value)) failing.insert(a.group);
    }
  }
  return {failing.begin(), failing.end()};
}

OutputSet apply_agg_constraints(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu,
                                const std::vector<GroupAggregate>& aggregates) {
  const auto failing = failing_groups(q, aggregates);
  auto removed = [&](NodeId x) {
    return std::any_of(failing.begin(), failing.end(),
                       [&](NodeId g) { return g == x || doc.is_proper_ancestor(g, x); });
  };
  std::vector<NodeId> out;
  for (QueryNodeId o : q.outputs()) {
    for (NodeId x : mu[o]) {
      if (!removed(x)) out.push_back(x);
    }
  }
  return close_output_set(doc, std::move(out));
}

XmlDocument inject_aggregates(const Projection& projection, const XmlDocument& original, const AbstractQuery& q,
                              const std::vector<GroupAggregate>& aggregates) {
  const XmlDocument& doc = projection.document;
  auto build = [&](auto& self, NodeId id) -> SourceNode {
    const auto& n = doc.node(id);
    if (n.kind == NodeKind::atomic) return SourceNode::text_node(n.label);
    SourceNode out = SourceNode::element(n.label);
    for (NodeId child : n.children) {
      const auto& c = doc.node(child);
      if (c.kind == NodeKind::attribute) {
        out.attributes.emplace_back(c.label, std::string(doc.attribute_value(child)));
      } else {
        out.children.push_back(self(self, child));
      }
    }
    NodeId source = projection.source.at(id.value);
    for (const auto& a : aggregates) {
      if (!a.displayed || a.group != source) continue;
      SourceNode agg = SourceNode::element(std::string(aggregate_element));
      agg.attributes = {{"fn", std::string(to_string(a.function))},
                        {"path", join_path(q.path(a.node))},
                        {"value", format_value(a.value)}};
      out.children.push_back(std::move(agg));
    }
    return out;
  };
  return XmlDocument::from_source(build(build, doc.root()), attribute_types_of(original));
}

void extend_result_dtd(Dtd& dtd, const AbstractQuery& q) {
  std::set<std::string> grouping_labels;
  for (const auto& n : q.nodes()) {
    if (!n.aggregates.empty()) grouping_labels.insert(q.node(grouping_node(q, n.id)).label);
  }
  if (grouping_labels.empty()) return;
  const ContentModel aggs = ContentModel::star(ContentModel::element(std::string(aggregate_element)));
  for (const auto& label : grouping_labels) {
    if (!dtd.has_element(label)) continue;
    const ContentModel& current = dtd.content(label);
    if (current.kind == ContentModel::Kind::any) continue;
    if (current.kind == ContentModel::Kind::empty) {
      dtd.set_content(label, aggs);
    } else {
      dtd.set_content(label, ContentModel::sequence({current, aggs}));
    }
  }
  // A result DTD being narrowed again already declares it.
  if (dtd.has_element(aggregate_element)) return;
  dtd.add_element(std::string(aggregate_element), ContentModel::empty());
  for (const char* name : {"fn", "path", "value"}) {
    dtd.add_attribute(std::string(aggregate_element), AttributeDecl{name, AttrType::cdata, AttrPresence::required});
  }
}

}  // namespace equix

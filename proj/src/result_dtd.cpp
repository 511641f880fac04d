#include "equix/result_dtd.hpp"

#include <algorithm>
#include <set>

#include "equix/error.hpp"

namespace equix {

namespace {

using Kind = ContentModel::Kind;

bool is_null(const ContentModel& m) { return m.kind == Kind::null; }

// Labels of output nodes split by whether they name elements or attributes;
// attribute outputs contribute their owner's label.
struct OutputLabels {
  std::set<std::string> elements;
  std::set<std::string> attribute_owners;
};

OutputLabels output_labels(const AbstractQuery& q, const Dtd& d) {
  OutputLabels out;
  for (QueryNodeId o : q.outputs()) {
    const auto& node = q.node(o);
    if (node.parent && is_attribute_node(q, o, d)) {
      out.attribute_owners.insert(q.node(*node.parent).label);
    } else {
      out.elements.insert(node.label);
    }
  }
  return out;
}

// Replaces each element name by `name?` when it qualifies and by null
// otherwise.
ContentModel restrict_names(const ContentModel& m, const std::set<std::string>& qualifying) {
  switch (m.kind) {
    case Kind::name:
      return qualifying.contains(m.name) ? ContentModel::optional(m) : ContentModel::null();
    case Kind::sequence:
    case Kind::choice:
    case Kind::optional:
    case Kind::star:
    case Kind::plus: {
      ContentModel out{m.kind, {}, {}};
      for (const auto& item : m.items) out.items.push_back(restrict_names(item, qualifying));
      return out;
    }
    default:
      return m;
  }
}

ContentModel reduce(const ContentModel& m) {
  switch (m.kind) {
    case Kind::sequence: {
      std::vector<ContentModel> kept;
      for (const auto& item : m.items) {
        ContentModel r = reduce(item);
        if (!is_null(r)) kept.push_back(std::move(r));
      }
      if (kept.empty()) return ContentModel::null();
      if (kept.size() == 1) return std::move(kept.front());
      return ContentModel::sequence(std::move(kept));
    }
    case Kind::choice: {
      std::vector<ContentModel> kept;
      bool dropped = false;
      for (const auto& item : m.items) {
        ContentModel r = reduce(item);
        if (is_null(r)) {
          dropped = true;
        } else {
          kept.push_back(std::move(r));
        }
      }
      if (kept.empty()) return ContentModel::null();
      ContentModel body = kept.size() == 1 ? std::move(kept.front()) : ContentModel::choice(std::move(kept));
      return dropped ? ContentModel::optional(std::move(body)) : body;
    }
    case Kind::optional:
    case Kind::star:
    case Kind::plus: {
      ContentModel inner = reduce(m.items.front());
      if (is_null(inner)) return ContentModel::null();
      return ContentModel{m.kind, {}, {std::move(inner)}};
    }
    default:
      return m;
  }
}

// Choice over alternative content definitions. EMPTY and ANY may only stand
// alone in a declaration, so ANY absorbs the rest and EMPTY makes the rest
// optional.
ContentModel combine(std::vector<ContentModel> alternatives) {
  std::vector<ContentModel> unique;
  for (auto& alt : alternatives) {
    if (std::find(unique.begin(), unique.end(), alt) == unique.end()) unique.push_back(std::move(alt));
  }
  if (unique.empty()) return ContentModel::empty();
  auto has = [&](Kind k) {
    return std::any_of(unique.begin(), unique.end(), [k](const ContentModel& m) { return m.kind == k; });
  };
  if (has(Kind::any)) return ContentModel::any();
  bool optional = has(Kind::empty);
  std::erase_if(unique, [](const ContentModel& m) { return m.kind == Kind::empty; });
  if (unique.empty()) return ContentModel::empty();
  ContentModel body = unique.size() == 1 ? std::move(unique.front()) : ContentModel::choice(std::move(unique));
  return optional ? ContentModel::optional(std::move(body)) : body;
}

}  // namespace

std::vector<std::string> element_name_set(const AbstractQuery& q, const Dtd& d) {
  const OutputLabels outputs = output_labels(q, d);
  const DtdReachability reach(d);
  auto selected = [&](const std::string& e) {
    if (outputs.elements.contains(e) || outputs.attribute_owners.contains(e)) return true;
    for (const auto& o : outputs.elements) {
      if (reach.nested_within(o, e) || reach.nested_within(e, o)) return true;
    }
    for (const auto& o : outputs.attribute_owners) {
      if (reach.nested_within(o, e)) return true;
    }
    return false;
  };
  std::vector<std::string> out;
  for (const auto& e : d.element_names()) {
    if (selected(e)) out.push_back(e);
  }
  return out;
}

ContentModel simplify(const ContentModel& model) {
  ContentModel reduced = reduce(model);
  return is_null(reduced) ? ContentModel::empty() : reduced;
}

ContentModel create_content_definition(std::string_view e, const AbstractQuery& q, const Dtd& d) {
  if (!d.has_element(e)) throw DtdError("element '" + std::string(e) + "' is not declared");
  const ContentModel& declared = d.content(e);
  const OutputLabels outputs = output_labels(q, d);
  const DtdReachability reach(d);

  std::vector<ContentModel> alternatives;
  bool full = outputs.elements.contains(std::string(e)) ||
              std::any_of(outputs.elements.begin(), outputs.elements.end(),
                          [&](const std::string& o) { return reach.nested_within(e, o); });
  if (full) alternatives.push_back(declared);

  for (const auto& n : q.nodes()) {
    // Outputs keep their whole subtree, covered by the full alternative.
    if (n.label != e || n.output || !q.leads_to_output(n.id)) continue;
    if (n.parent && is_attribute_node(q, n.id, d)) continue;
    const auto path = q.path(n.id);
    std::set<std::string> qualifying;
    for (const auto& m : q.nodes()) {
      if (m.label != e || q.path(m.id) != path) continue;
      for (QueryNodeId c : m.children) {
        if (!is_attribute_node(q, c, d) && q.leads_to_output(c)) qualifying.insert(q.node(c).label);
      }
    }
    alternatives.push_back(restrict_names(declared, qualifying));
  }

  std::vector<ContentModel> simplified;
  for (const auto& alt : alternatives) simplified.push_back(simplify(alt));
  return combine(std::move(simplified));
}

ResultDtd create_result_dtd(const AbstractQuery& q, const Dtd& d, std::string origin, std::string query_id) {
  if (q.outputs().empty()) throw ValidationError({"query has no output node"});
  Dtd result(d.root_element());
  auto names = element_name_set(q, d);
  if (std::find(names.begin(), names.end(), d.root_element()) == names.end()) {
    names.insert(names.begin(), d.root_element());
  }
  for (const auto& e : names) {
    result.add_element(e, create_content_definition(e, q, d));
    for (AttributeDecl decl : d.attributes(e)) {
      decl.presence = AttrPresence::implied;
      result.add_attribute(e, std::move(decl));
    }
  }
  result.check();
  return ResultDtd{std::move(result), std::move(origin), std::move(query_id)};
}

}  // namespace equix

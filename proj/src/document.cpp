#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "equix/document.hpp"
#include "equix/dtd.hpp"
#include "equix/error.hpp"

namespace equix {

const XmlNode& XmlDocument::node(NodeId n) const {
  if (!contains(n)) throw DocumentError("unknown node " + std::to_string(n.value));
  return nodes_[n.value];
}

XmlDocument XmlDocument::from_source(const SourceNode& root) { return build(root, nullptr); }

XmlDocument XmlDocument::from_source(const SourceNode& root, const Dtd& dtd) {
  AttrTypeResolver type_of = [&dtd](std::string_view element, std::string_view attribute) {
    const auto* decl = dtd.find_attribute(element, attribute);
    return decl != nullptr ? decl->type : AttrType::cdata;
  };
  return build(root, &type_of);
}

XmlDocument XmlDocument::from_source(const SourceNode& root, const AttrTypeResolver& type_of) {
  return build(root, &type_of);
}

XmlDocument XmlDocument::build(const SourceNode& root, const AttrTypeResolver* type_of) {
  if (root.is_text()) throw DocumentError("document root must be an element");

  // Elements breadth-first. `content` records each element's non-attribute
  // children in source order; text slots are filled once atomic ids exist.
  std::vector<const SourceNode*> elements{&root};
  std::vector<std::optional<NodeId>> element_parent{std::nullopt};
  std::vector<std::vector<std::optional<NodeId>>> content;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    std::vector<std::optional<NodeId>> slots;
    for (const auto& child : elements[i]->children) {
      if (child.is_text()) {
        slots.emplace_back(std::nullopt);
      } else {
        slots.emplace_back(NodeId{static_cast<std::uint32_t>(elements.size())});
        elements.push_back(&child);
        element_parent.emplace_back(NodeId{static_cast<std::uint32_t>(i)});
      }
    }
    content.push_back(std::move(slots));
  }

  XmlDocument doc;
  auto add = [&doc](NodeKind kind, std::string label, std::optional<NodeId> parent) {
    NodeId id{static_cast<std::uint32_t>(doc.nodes_.size())};
    doc.nodes_.push_back(XmlNode{id, kind, std::move(label), AttrType::none, parent, {}});
    return id;
  };

  for (std::size_t i = 0; i < elements.size(); ++i) add(NodeKind::element, elements[i]->name, element_parent[i]);

  std::vector<std::vector<NodeId>> attribute_ids(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (const auto& [name, value] : elements[i]->attributes) {
      NodeId id = add(NodeKind::attribute, name, NodeId{static_cast<std::uint32_t>(i)});
      doc.nodes_[id.value].attr_type = type_of != nullptr ? (*type_of)(elements[i]->name, name) : AttrType::cdata;
      attribute_ids[i].push_back(id);
    }
  }

  for (std::size_t i = 0; i < elements.size(); ++i) {
    std::size_t slot = 0;
    for (const auto& child : elements[i]->children) {
      if (child.is_text()) content[i][slot] = add(NodeKind::atomic, child.text, NodeId{static_cast<std::uint32_t>(i)});
      ++slot;
    }
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t a = 0; a < attribute_ids[i].size(); ++a) {
      NodeId attr = attribute_ids[i][a];
      NodeId value = add(NodeKind::atomic, elements[i]->attributes[a].second, attr);
      doc.nodes_[attr.value].children.push_back(value);
    }
  }

  for (std::size_t i = 0; i < elements.size(); ++i) {
    auto& children = doc.nodes_[i].children;
    children = attribute_ids[i];
    for (const auto& slot : content[i]) children.push_back(*slot);
  }

  if (type_of != nullptr) {
    for (const auto& node : doc.nodes_) {
      if (node.kind != NodeKind::attribute || node.attr_type != AttrType::id) continue;
      std::string value(doc.attribute_value(node.id));
      auto [it, inserted] = doc.id_index_.emplace(value, *node.parent);
      if (!inserted) throw DocumentError("duplicate ID value '" + value + "'");
    }
  }

  doc.index_structure();
  return doc;
}

void XmlDocument::index_structure() {
  const std::size_t n = nodes_.size();
  pre_.assign(n, 0);
  end_.assign(n, 0);
  depth_.assign(n, 0);
  std::uint32_t counter = 0;
  // (node, next child index)
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  pre_[0] = counter++;
  while (!stack.empty()) {
    auto& [current, next] = stack.back();
    const auto& children = nodes_[current].children;
    if (next < children.size()) {
      std::uint32_t child = children[next++].value;
      depth_[child] = depth_[current] + 1;
      pre_[child] = counter++;
      stack.emplace_back(child, 0);
    } else {
      end_[current] = counter;
      stack.pop_back();
    }
  }
  if (counter != n) throw DocumentError("document nodes are not all reachable from the root");
}

std::optional<NodeId> XmlDocument::element_with_id(std::string_view value) const {
  auto it = id_index_.find(value);
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

std::string_view XmlDocument::attribute_value(NodeId attribute) const {
  const auto& n = node(attribute);
  if (n.kind != NodeKind::attribute || n.children.empty()) return {};
  return nodes_[n.children.front().value].label;
}

bool XmlDocument::is_proper_ancestor(NodeId ancestor, NodeId n) const {
  auto a = pre_.at(ancestor.value);
  auto p = pre_.at(n.value);
  return a < p && p < end_[ancestor.value];
}

SourceNode XmlDocument::to_source() const {
  auto convert = [this](auto& self, NodeId id) -> SourceNode {
    const auto& n = nodes_[id.value];
    if (n.kind == NodeKind::atomic) return SourceNode::text_node(n.label);
    SourceNode out = SourceNode::element(n.label);
    for (NodeId child : n.children) {
      const auto& c = nodes_[child.value];
      if (c.kind == NodeKind::attribute) {
        out.attributes.emplace_back(c.label, std::string(attribute_value(child)));
      } else {
        out.children.push_back(self(self, child));
      }
    }
    return out;
  };
  return convert(convert, root());
}

XmlDocument::AttrTypeResolver attribute_types_of(const XmlDocument& doc) {
  using Key = std::pair<std::string, std::string>;
  auto types = std::make_shared<std::map<Key, AttrType>>();
  for (const auto& n : doc.nodes()) {
    if (n.kind == NodeKind::attribute) (*types)[Key(doc.label(*n.parent), n.label)] = n.attr_type;
  }
  return [types](std::string_view element, std::string_view attribute) {
    auto it = types->find(Key(element, attribute));
    return it == types->end() ? AttrType::cdata : it->second;
  };
}

std::vector<std::string> path_of(const XmlDocument& doc, NodeId n) {
  std::vector<std::string> path;
  std::optional<NodeId> current = n;
  while (current) {
    const auto& node = doc.node(*current);
    path.push_back(node.label);
    current = node.parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<NodeId> indirect_children(const XmlDocument& doc, NodeId n) {
  const auto& node = doc.node(n);
  if (node.kind != NodeKind::attribute || node.attr_type != AttrType::idref) return {};
  if (auto target = doc.element_with_id(doc.attribute_value(n))) return {*target};
  return {};
}

std::string textual_content(const XmlDocument& doc, NodeId n) {
  doc.node(n);
  std::vector<char> visited(doc.size(), 0);
  std::string out;
  bool first = true;
  std::vector<NodeId> stack{n};
  while (!stack.empty()) {
    NodeId current = stack.back();
    stack.pop_back();
    if (visited[current.value]) continue;
    visited[current.value] = 1;
    const auto& node = doc.node(current);
    if (node.kind == NodeKind::atomic) {
      if (!first) out.push_back(text_separator);
      out += node.label;
      first = false;
      continue;
    }
    if (node.attr_type == AttrType::id && current != n) continue;
    auto indirect = indirect_children(doc, current);
    for (auto it = indirect.rbegin(); it != indirect.rend(); ++it) stack.push_back(*it);
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

const std::string& TextCache::operator()(NodeId n) const {
  auto& slot = cache_.at(n.value);
  if (!slot) slot = textual_content(*doc_, n);
  return *slot;
}

}  // namespace equix

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "equix/ids.hpp"

namespace equix {

class Dtd;

enum class NodeKind : std::uint8_t { element, attribute, atomic };
enum class AttrType : std::uint8_t { none, cdata, id, idref };

struct XmlNode {
  NodeId id;
  NodeKind kind = NodeKind::element;
  // Element or attribute name; the text itself for atomic nodes.
  std::string label;
  AttrType attr_type = AttrType::none;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
};

// Source-order view of an XML element as it appears in text: attributes in
// declaration order and mixed content in order. Text entries have an empty
// name.
struct SourceNode {
  std::string name;
  std::string text;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<SourceNode> children;

  bool is_text() const { return name.empty(); }

  static SourceNode element(std::string name) { return SourceNode{std::move(name), {}, {}, {}}; }
  static SourceNode text_node(std::string text) { return SourceNode{{}, std::move(text), {}, {}}; }

  friend bool operator==(const SourceNode&, const SourceNode&) = default;
};

// Immutable rooted labeled tree. Node ids are layered: elements breadth-first
// in document order, then attribute nodes grouped by owner, then atomic
// nodes grouped by parent. Children keep source order with attribute nodes
// ahead of content.
class XmlDocument {
 public:
  // Attributes are typed CDATA and the ID index stays empty.
  static XmlDocument from_source(const SourceNode& root);
  // Attribute types come from the DTD; the ID index is filled and duplicate
  // ID values are rejected.
  static XmlDocument from_source(const SourceNode& root, const Dtd& dtd);
  // Same, with attribute types supplied by `type_of(element, attribute)`.
  using AttrTypeResolver = std::function<AttrType(std::string_view element, std::string_view attribute)>;
  static XmlDocument from_source(const SourceNode& root, const AttrTypeResolver& type_of);

  NodeId root() const { return NodeId{0}; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(NodeId n) const { return n.value < nodes_.size(); }

  const XmlNode& node(NodeId n) const;
  std::span<const XmlNode> nodes() const { return nodes_; }
  const std::string& label(NodeId n) const { return node(n).label; }
  std::optional<NodeId> parent(NodeId n) const { return node(n).parent; }

  std::optional<NodeId> element_with_id(std::string_view value) const;
  const std::map<std::string, NodeId, std::less<>>& id_index() const { return id_index_; }

  // Value of an attribute node (the label of its atomic child).
  std::string_view attribute_value(NodeId attribute) const;

  // Ancestor tests run in O(1) through pre-order intervals.
  bool is_proper_ancestor(NodeId ancestor, NodeId n) const;
  std::uint32_t depth(NodeId n) const { return depth_.at(n.value); }
  std::uint32_t preorder(NodeId n) const { return pre_.at(n.value); }
  std::uint32_t subtree_end(NodeId n) const { return end_.at(n.value); }

  SourceNode to_source() const;

 private:
  static XmlDocument build(const SourceNode& root, const AttrTypeResolver* type_of);
  void index_structure();

  std::vector<XmlNode> nodes_;
  std::map<std::string, NodeId, std::less<>> id_index_;
  std::vector<std::uint32_t> pre_;
  std::vector<std::uint32_t> end_;
  std::vector<std::uint32_t> depth_;
};

inline constexpr char text_separator = '\x1f';
inline constexpr std::string_view default_wrapper_label = "equix-root";

// Parses XML text into its source tree. Comments, processing instructions,
// the XML declaration and DOCTYPE are skipped; whitespace-only text is
// dropped. Several top-level elements are wrapped in `wrapper_label`.
SourceNode parse_xml(std::string_view text, std::string_view wrapper_label = default_wrapper_label);

XmlDocument parse_document(std::string_view text);
XmlDocument parse_document(std::string_view text, const Dtd& dtd);

std::string to_xml(const XmlDocument& doc);
std::string to_xml(const SourceNode& root);

// Resolver reproducing the attribute types found in `doc`; unknown
// attributes are CDATA.
XmlDocument::AttrTypeResolver attribute_types_of(const XmlDocument& doc);

std::vector<std::string> path_of(const XmlDocument& doc, NodeId n);

// The element referenced by an IDREF attribute node, if any.
std::vector<NodeId> indirect_children(const XmlDocument& doc, NodeId n);

// Concatenated data below `n`, following IDREF references, each node at most
// once, segments separated by `text_separator`.
std::string textual_content(const XmlDocument& doc, NodeId n);

// Lazily computed textual_content per node of one document.
class TextCache {
 public:
  explicit TextCache(const XmlDocument& doc) : doc_(&doc), cache_(doc.size()) {}

  const std::string& operator()(NodeId n) const;

 private:
  const XmlDocument* doc_;
  mutable std::vector<std::optional<std::string>> cache_;
};

}  // namespace equix

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equix/document.hpp"

namespace equix {

// Element content expression. `null` is the empty expression used while
// building result DTDs; it stands for "nothing here" (the empty sequence).
struct ContentModel {
  enum class Kind : std::uint8_t { empty, any, pcdata, name, sequence, choice, optional, star, plus, null };

  Kind kind = Kind::empty;
  std::string name;
  std::vector<ContentModel> items;

  static ContentModel empty() { return {Kind::empty, {}, {}}; }
  static ContentModel any() { return {Kind::any, {}, {}}; }
  static ContentModel pcdata() { return {Kind::pcdata, {}, {}}; }
  static ContentModel null() { return {Kind::null, {}, {}}; }
  static ContentModel element(std::string name) { return {Kind::name, std::move(name), {}}; }
  static ContentModel sequence(std::vector<ContentModel> items) { return {Kind::sequence, {}, std::move(items)}; }
  static ContentModel choice(std::vector<ContentModel> items) { return {Kind::choice, {}, std::move(items)}; }
  static ContentModel optional(ContentModel inner) { return {Kind::optional, {}, {std::move(inner)}}; }
  static ContentModel star(ContentModel inner) { return {Kind::star, {}, {std::move(inner)}}; }
  static ContentModel plus(ContentModel inner) { return {Kind::plus, {}, {std::move(inner)}}; }

  bool is_unary() const { return kind == Kind::optional || kind == Kind::star || kind == Kind::plus; }

  friend bool operator==(const ContentModel&, const ContentModel&) = default;
};

std::string to_string(const ContentModel& model);
ContentModel parse_content_model(std::string_view text);

// Element names referenced anywhere in the expression, first occurrence order.
std::vector<std::string> referenced_names(const ContentModel& model);

// Nondeterministic automaton over child symbols: element names, with
// `pcdata_symbol` standing for a text child.
class ContentAutomaton {
 public:
  static constexpr std::string_view pcdata_symbol = "#PCDATA";

  explicit ContentAutomaton(const ContentModel& model);

  bool accepts(std::span<const std::string_view> symbols) const;
  bool accepts(std::span<const std::string> symbols) const;

 private:
  struct State {
    std::vector<int> epsilon;
    std::string symbol;
    bool wildcard = false;
    int next = -1;
  };

  std::pair<int, int> build(const ContentModel& model);
  int add_state();
  void close(std::vector<char>& set, std::vector<int>& members) const;

  std::vector<State> states_;
  int start_ = 0;
  int accept_ = 0;
};

enum class AttrPresence : std::uint8_t { required, implied };

struct AttributeDecl {
  std::string name;
  AttrType type = AttrType::cdata;
  AttrPresence presence = AttrPresence::implied;

  friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

class Dtd {
 public:
  Dtd() = default;
  explicit Dtd(std::string root_element) : root_(std::move(root_element)) {}

  const std::string& root_element() const { return root_; }
  void set_root_element(std::string name) { root_ = std::move(name); }

  // Throws DtdError on a duplicate declaration.
  void add_element(std::string name, ContentModel content);
  void add_attribute(const std::string& element, AttributeDecl decl);

  bool has_element(std::string_view name) const { return contents_.find(name) != contents_.end(); }
  const ContentModel& content(std::string_view name) const;
  void set_content(std::string_view name, ContentModel content);
  std::span<const AttributeDecl> attributes(std::string_view element) const;
  const AttributeDecl* find_attribute(std::string_view element, std::string_view attribute) const;

  // Declaration order.
  const std::vector<std::string>& element_names() const { return order_; }

  // Throws DtdError when the root or a referenced element is undeclared.
  void check() const;

  friend bool operator==(const Dtd&, const Dtd&) = default;

 private:
  std::string root_;
  std::vector<std::string> order_;
  std::map<std::string, ContentModel, std::less<>> contents_;
  std::map<std::string, std::vector<AttributeDecl>, std::less<>> attlists_;
};

// When `root_element` is empty the first declared element becomes the root.
Dtd parse_dtd(std::string_view text, std::string root_element = {});
std::string to_dtd_text(const Dtd& dtd);

// DTD for documents wrapped under a synthetic root holding one or more of
// `top_level` elements.
Dtd wrap_dtd(const Dtd& dtd, std::string_view wrapper_label, const std::vector<std::string>& top_level);

// True when `descendant` can be nested somewhere inside `ancestor` according
// to the content models.
class DtdReachability {
 public:
  explicit DtdReachability(const Dtd& dtd);
  bool nested_within(std::string_view descendant, std::string_view ancestor) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> below_;
};

class ConformanceChecker {
 public:
  explicit ConformanceChecker(const Dtd& dtd);

  // Empty iff the document strictly conforms.
  std::vector<std::string> diagnostics(const XmlDocument& doc) const;
  bool strictly_conforms(const XmlDocument& doc) const { return diagnostics(doc).empty(); }

 private:
  const Dtd* dtd_;
  std::map<std::string, std::shared_ptr<const ContentAutomaton>, std::less<>> automata_;
};

bool strictly_conforms(const XmlDocument& doc, const Dtd& dtd);
std::vector<std::string> conformance_diagnostics(const XmlDocument& doc, const Dtd& dtd);

}  // namespace equix

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "equix/dtd.hpp"
#include "equix/error.hpp"
#include "text_reader.hpp"

namespace equix {

namespace {

using detail::TextReader;
using Kind = ContentModel::Kind;

ContentModel read_particle(TextReader& in);

ContentModel apply_suffix(TextReader& in, ContentModel model) {
  if (in.consume("?")) return ContentModel::optional(std::move(model));
  if (in.consume("*")) return ContentModel::star(std::move(model));
  if (in.consume("+")) return ContentModel::plus(std::move(model));
  return model;
}

ContentModel read_group(TextReader& in) {
  in.expect("(");
  in.skip_space();
  std::vector<ContentModel> items{read_particle(in)};
  char separator = 0;
  for (;;) {
    in.skip_space();
    if (in.consume(")")) break;
    char c = in.peek();
    if (c != ',' && c != '|') in.fail("expected ',', '|' or ')' in content model");
    if (separator != 0 && c != separator) in.fail("mixed ',' and '|' in one group");
    separator = c;
    in.get();
    in.skip_space();
    items.push_back(read_particle(in));
  }
  ContentModel group = items.size() == 1 ? std::move(items.front())
                       : separator == '|' ? ContentModel::choice(std::move(items))
                                          : ContentModel::sequence(std::move(items));
  return apply_suffix(in, std::move(group));
}

ContentModel read_particle(TextReader& in) {
  if (in.peek() == '(') return read_group(in);
  if (in.consume("#PCDATA")) return apply_suffix(in, ContentModel::pcdata());
  std::string name = in.read_name();
  if (name == "EMPTY") return ContentModel::empty();
  if (name == "ANY") return ContentModel::any();
  return apply_suffix(in, ContentModel::element(std::move(name)));
}

ContentModel read_content_spec(TextReader& in) {
  if (in.consume("EMPTY")) return ContentModel::empty();
  if (in.consume("ANY")) return ContentModel::any();
  if (in.peek() != '(') in.fail("expected EMPTY, ANY or '('");
  return read_group(in);
}

void collect(const ContentModel& model, std::vector<std::string>& out) {
  if (model.kind == Kind::name && std::find(out.begin(), out.end(), model.name) == out.end()) {
    out.push_back(model.name);
  }
  for (const auto& item : model.items) collect(item, out);
}

bool is_group(const ContentModel& m) { return m.kind == Kind::sequence || m.kind == Kind::choice; }

std::string render(const ContentModel& m) {
  switch (m.kind) {
    case Kind::empty: return "EMPTY";
    case Kind::any: return "ANY";
    case Kind::pcdata: return "#PCDATA";
    case Kind::null: return "∅";
    case Kind::name: return m.name;
    case Kind::sequence:
    case Kind::choice: {
      std::string out = "(";
      for (std::size_t i = 0; i < m.items.size(); ++i) {
        if (i > 0) out += m.kind == Kind::sequence ? "," : "|";
        out += render(m.items[i]);
      }
      return out + ")";
    }
    case Kind::optional:
    case Kind::star:
    case Kind::plus: {
      const auto& inner = m.items.front();
      std::string body = (inner.kind == Kind::name || is_group(inner)) ? render(inner) : "(" + render(inner) + ")";
      return body + (m.kind == Kind::optional ? "?" : m.kind == Kind::star ? "*" : "+");
    }
  }
  return {};
}

}  // namespace

std::string to_string(const ContentModel& model) {
  if (model.kind == Kind::empty || model.kind == Kind::any || is_group(model)) return render(model);
  if (model.is_unary() && is_group(model.items.front())) return render(model);
  return "(" + render(model) + ")";
}

ContentModel parse_content_model(std::string_view text) {
  TextReader in(text);
  in.skip_space();
  ContentModel model = read_content_spec(in);
  in.skip_space();
  if (!in.eof()) in.fail("trailing characters after content model");
  return model;
}

std::vector<std::string> referenced_names(const ContentModel& model) {
  std::vector<std::string> out;
  collect(model, out);
  return out;
}

void Dtd::add_element(std::string name, ContentModel content) {
  if (has_element(name)) throw DtdError("duplicate declaration of element '" + name + "'");
  order_.push_back(name);
  contents_.emplace(std::move(name), std::move(content));
}

void Dtd::add_attribute(const std::string& element, AttributeDecl decl) {
  auto& list = attlists_[element];
  for (const auto& existing : list) {
    if (existing.name == decl.name) {
      throw DtdError("duplicate attribute '" + decl.name + "' on element '" + element + "'");
    }
  }
  list.push_back(std::move(decl));
}

const ContentModel& Dtd::content(std::string_view name) const {
  auto it = contents_.find(name);
  if (it == contents_.end()) throw DtdError("undeclared element '" + std::string(name) + "'");
  return it->second;
}

void Dtd::set_content(std::string_view name, ContentModel content) {
  auto it = contents_.find(name);
  if (it == contents_.end()) throw DtdError("undeclared element '" + std::string(name) + "'");
  it->second = std::move(content);
}

std::span<const AttributeDecl> Dtd::attributes(std::string_view element) const {
  auto it = attlists_.find(element);
  if (it == attlists_.end()) return {};
  return it->second;
}

const AttributeDecl* Dtd::find_attribute(std::string_view element, std::string_view attribute) const {
  for (const auto& decl : attributes(element)) {
    if (decl.name == attribute) return &decl;
  }
  return nullptr;
}

void Dtd::check() const {
  if (root_.empty()) throw DtdError("no root element");
  if (!has_element(root_)) throw DtdError("root element '" + root_ + "' is not declared");
  for (const auto& name : order_) {
    for (const auto& ref : referenced_names(content(name))) {
      if (!has_element(ref)) {
        throw DtdError("element '" + ref + "' referenced by '" + name + "' is not declared");
      }
    }
  }
  for (const auto& [element, list] : attlists_) {
    if (!has_element(element)) throw DtdError("attribute list for undeclared element '" + element + "'");
  }
}

Dtd parse_dtd(std::string_view text, std::string root_element) {
  TextReader in(text);
  Dtd dtd;
  for (;;) {
    in.skip_space();
    if (in.eof()) break;
    if (in.starts_with("<!--")) {
      in.skip_past("-->", "comment");
    } else if (in.starts_with("<?")) {
      in.skip_past("?>", "processing instruction");
    } else if (in.consume("<!ELEMENT")) {
      in.require_space();
      std::string name = in.read_name();
      in.require_space();
      ContentModel content = read_content_spec(in);
      in.skip_space();
      in.expect(">");
      dtd.add_element(std::move(name), std::move(content));
    } else if (in.consume("<!ATTLIST")) {
      in.require_space();
      std::string element = in.read_name();
      for (;;) {
        in.skip_space();
        if (in.consume(">")) break;
        AttributeDecl decl;
        decl.name = in.read_name();
        in.require_space();
        std::string type = in.read_name();
        if (type == "CDATA") {
          decl.type = AttrType::cdata;
        } else if (type == "ID") {
          decl.type = AttrType::id;
        } else if (type == "IDREF") {
          decl.type = AttrType::idref;
        } else {
          in.fail("unsupported attribute type '" + type + "'");
        }
        in.require_space();
        if (in.consume("#REQUIRED")) {
          decl.presence = AttrPresence::required;
        } else if (in.consume("#IMPLIED")) {
          decl.presence = AttrPresence::implied;
        } else {
          in.fail("expected #REQUIRED or #IMPLIED");
        }
        dtd.add_attribute(element, std::move(decl));
      }
    } else {
      in.fail("expected <!ELEMENT or <!ATTLIST declaration");
    }
  }
  if (root_element.empty() && !dtd.element_names().empty()) root_element = dtd.element_names().front();
  dtd.set_root_element(std::move(root_element));
  dtd.check();
  return dtd;
}

std::string to_dtd_text(const Dtd& dtd) {
  std::string out;
  for (const auto& name : dtd.element_names()) {
    out += "<!ELEMENT " + name + " " + to_string(dtd.content(name)) + ">\n";
    auto attributes = dtd.attributes(name);
    if (attributes.empty()) continue;
    out += "<!ATTLIST " + name;
    for (const auto& decl : attributes) {
      out += " " + decl.name + " ";
      out += decl.type == AttrType::id ? "ID" : decl.type == AttrType::idref ? "IDREF" : "CDATA";
      out += decl.presence == AttrPresence::required ? " #REQUIRED" : " #IMPLIED";
    }
    out += ">\n";
  }
  return out;
}

Dtd wrap_dtd(const Dtd& dtd, std::string_view wrapper_label, const std::vector<std::string>& top_level) {
  if (top_level.empty()) throw DtdError("wrapper needs at least one top-level element");
  Dtd wrapped = dtd;
  std::vector<ContentModel> options;
  for (const auto& name : top_level) options.push_back(ContentModel::element(name));
  ContentModel body = options.size() == 1 ? std::move(options.front()) : ContentModel::choice(std::move(options));
  wrapped.add_element(std::string(wrapper_label), ContentModel::plus(std::move(body)));
  wrapped.set_root_element(std::string(wrapper_label));
  wrapped.check();
  return wrapped;
}

DtdReachability::DtdReachability(const Dtd& dtd) {
  std::map<std::string, std::vector<std::string>, std::less<>> direct;
  for (const auto& name : dtd.element_names()) {
    const auto& content = dtd.content(name);
    bool any = content.kind == Kind::any;
    std::vector<std::string> refs = any ? dtd.element_names() : referenced_names(content);
    direct[name] = std::move(refs);
  }
  for (const auto& name : dtd.element_names()) {
    std::set<std::string> seen;
    std::vector<std::string> work = direct[name];
    while (!work.empty()) {
      std::string next = std::move(work.back());
      work.pop_back();
      if (!seen.insert(next).second) continue;
      for (const auto& ref : direct[next]) work.push_back(ref);
    }
    below_[name] = std::vector<std::string>(seen.begin(), seen.end());
  }
}

bool DtdReachability::nested_within(std::string_view descendant, std::string_view ancestor) const {
  auto it = below_.find(ancestor);
  if (it == below_.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), descendant);
}

}  // namespace equix

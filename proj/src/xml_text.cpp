#include <algorithm>
#include <charconv>
#include <string>
#include <vector>

#include "equix/document.hpp"
#include "text_reader.hpp"
#include "utf8.hpp"

namespace equix {

namespace {

using detail::TextReader;

void read_reference(TextReader& in, std::string& out) {
  in.expect("&");
  std::string ref;
  while (!in.eof() && in.peek() != ';') {
    if (ref.size() > 16) in.fail("unterminated character reference");
    ref.push_back(in.get());
  }
  in.expect(";");
  if (ref == "lt") {
    out.push_back('<');
  } else if (ref == "gt") {
    out.push_back('>');
  } else if (ref == "amp") {
    out.push_back('&');
  } else if (ref == "quot") {
    out.push_back('"');
  } else if (ref == "apos") {
    out.push_back('\'');
  } else if (ref.size() > 1 && ref[0] == '#') {
    bool hex = ref[1] == 'x';
    std::string_view digits = std::string_view(ref).substr(hex ? 2 : 1);
    std::uint32_t cp = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
    if (ec != std::errc{} || end != digits.data() + digits.size() || digits.empty() || cp > 0x10FFFF) {
      in.fail("invalid character reference '&" + ref + ";'");
    }
    detail::append_utf8(out, cp);
  } else {
    in.fail("unknown entity '&" + ref + ";'");
  }
}

bool blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](char c) { return TextReader::is_space(c); });
}

void skip_misc(TextReader& in) {
  for (;;) {
    in.skip_space();
    if (in.starts_with("<?")) {
      in.skip_past("?>", "processing instruction");
    } else if (in.starts_with("<!--")) {
      in.skip_past("-->", "comment");
    } else if (in.starts_with("<!DOCTYPE")) {
      int depth = 0;
      while (!in.eof()) {
        char c = in.get();
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == '>' && depth == 0) break;
      }
    } else {
      return;
    }
  }
}

// Reads "<name attr=...". Returns true for a self-closing tag.
bool read_start_tag(TextReader& in, SourceNode& node) {
  in.expect("<");
  node.name = in.read_name();
  for (;;) {
    bool spaced = in.skip_space();
    if (in.consume("/>")) return true;
    if (in.consume(">")) return false;
    if (!spaced) in.fail("expected whitespace before attribute");
    std::string name = in.read_name();
    in.skip_space();
    in.expect("=");
    in.skip_space();
    char quote = in.peek();
    if (quote != '"' && quote != '\'') in.fail("expected quoted attribute value");
    in.get();
    std::string value;
    while (!in.eof() && in.peek() != quote) {
      if (in.peek() == '&') {
        read_reference(in, value);
      } else if (in.peek() == '<') {
        in.fail("'<' in attribute value");
      } else {
        char c = in.get();
        value.push_back(TextReader::is_space(c) ? ' ' : c);
      }
    }
    in.expect(std::string_view(&quote, 1));
    for (const auto& existing : node.attributes) {
      if (existing.first == name) in.fail("duplicate attribute '" + name + "'");
    }
    node.attributes.emplace_back(std::move(name), std::move(value));
  }
}

void add_text(SourceNode& parent, std::string text) {
  if (!parent.children.empty() && parent.children.back().is_text()) {
    parent.children.back().text += text;
  } else {
    parent.children.push_back(SourceNode::text_node(std::move(text)));
  }
}

void drop_blank_text(SourceNode& node) {
  std::erase_if(node.children, [](const SourceNode& child) { return child.is_text() && blank(child.text); });
}

SourceNode read_element(TextReader& in) {
  SourceNode first;
  if (read_start_tag(in, first)) return first;
  std::vector<SourceNode> open;
  open.push_back(std::move(first));
  for (;;) {
    if (in.eof()) in.fail("unclosed element '" + open.back().name + "'");
    if (in.consume("</")) {
      std::string name = in.read_name();
      if (name != open.back().name) {
        in.fail("mismatched closing tag '" + name + "' for '" + open.back().name + "'");
      }
      in.skip_space();
      in.expect(">");
      SourceNode done = std::move(open.back());
      open.pop_back();
      drop_blank_text(done);
      if (open.empty()) return done;
      open.back().children.push_back(std::move(done));
    } else if (in.starts_with("<!--")) {
      in.skip_past("-->", "comment");
    } else if (in.consume("<![CDATA[")) {
      std::string text;
      while (!in.consume("]]>")) {
        if (in.eof()) in.fail("unterminated CDATA section");
        text.push_back(in.get());
      }
      add_text(open.back(), std::move(text));
    } else if (in.starts_with("<?")) {
      in.skip_past("?>", "processing instruction");
    } else if (in.peek() == '<') {
      SourceNode child;
      if (read_start_tag(in, child)) {
        open.back().children.push_back(std::move(child));
      } else {
        open.push_back(std::move(child));
      }
    } else {
      std::string text;
      while (!in.eof() && in.peek() != '<') {
        if (in.peek() == '&') {
          read_reference(in, text);
        } else {
          text.push_back(in.get());
        }
      }
      add_text(open.back(), std::move(text));
    }
  }
}

void escape(std::string& out, std::string_view text, bool attribute) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += attribute ? "&quot;" : "\""; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += attribute ? "&#9;" : "\t"; break;
      case '\n': out += attribute ? "&#10;" : "\n"; break;
      default: out.push_back(c);
    }
  }
}

void write_open(std::string& out, const SourceNode& node) {
  out += '<';
  out += node.name;
  for (const auto& [name, value] : node.attributes) {
    out += ' ';
    out += name;
    out += "=\"";
    escape(out, value, true);
    out += '"';
  }
}

void write_inline(std::string& out, const SourceNode& node) {
  if (node.is_text()) {
    escape(out, node.text, false);
    return;
  }
  write_open(out, node);
  if (node.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& child : node.children) write_inline(out, child);
  out += "</" + node.name + ">";
}

void write_block(std::string& out, const SourceNode& node, std::size_t indent) {
  out.append(indent, ' ');
  bool has_text = std::any_of(node.children.begin(), node.children.end(),
                              [](const SourceNode& child) { return child.is_text(); });
  if (node.children.empty() || has_text) {
    write_inline(out, node);
    out += '\n';
    return;
  }
  write_open(out, node);
  out += ">\n";
  for (const auto& child : node.children) write_block(out, child, indent + 2);
  out.append(indent, ' ');
  out += "</" + node.name + ">\n";
}

}  // namespace

SourceNode parse_xml(std::string_view text, std::string_view wrapper_label) {
  TextReader in(text);
  if (in.starts_with("\xEF\xBB\xBF")) in.advance(3);
  std::vector<SourceNode> top;
  for (;;) {
    skip_misc(in);
    if (in.eof()) break;
    if (in.peek() != '<') in.fail("text outside the root element");
    top.push_back(read_element(in));
  }
  if (top.empty()) in.fail("no root element");
  if (top.size() == 1) return std::move(top.front());
  SourceNode wrapper = SourceNode::element(std::string(wrapper_label));
  wrapper.children = std::move(top);
  return wrapper;
}

std::string to_xml(const SourceNode& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_block(out, root, 0);
  return out;
}

std::string to_xml(const XmlDocument& doc) { return to_xml(doc.to_source()); }

XmlDocument parse_document(std::string_view text) { return XmlDocument::from_source(parse_xml(text)); }

XmlDocument parse_document(std::string_view text, const Dtd& dtd) {
  return XmlDocument::from_source(parse_xml(text), dtd);
}

}  // namespace equix

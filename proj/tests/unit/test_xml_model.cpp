#include <doctest.h>

#include "equix/document.hpp"
#include "equix/dtd.hpp"
#include "equix/error.hpp"
#include "equix/matcher.hpp"
#include "equix/regex.hpp"
#include "fixture.hpp"

using namespace equix;
using namespace equix::testing;

namespace {

std::string joined(std::initializer_list<const char*> parts) {
  std::string out;
  for (const char* p : parts) {
    if (!out.empty()) out += text_separator;
    out += p;
  }
  return out;
}

}  // namespace

TEST_CASE("movies document uses layered breadth-first numbering") {
  const XmlDocument& doc = movies_document();
  CHECK(doc.size() == 51);
  CHECK(doc.label(NodeId{0}) == "movieInfo");
  for (std::uint32_t m : {1u, 2u, 3u}) CHECK(doc.label(NodeId{m}) == "movie");
  CHECK(doc.label(NodeId{4}) == "actor");
  CHECK(doc.label(NodeId{10}) == "descr");
  CHECK(doc.label(NodeId{11}) == "title");
  CHECK(doc.label(NodeId{16}) == "character");
  CHECK(doc.label(NodeId{18}) == "name");

  // Attribute nodes follow all elements, grouped by owner.
  CHECK(doc.label(NodeId{19}) == "id");
  CHECK(doc.parent(NodeId{19}) == NodeId{4});
  CHECK(doc.label(NodeId{23}) == "role");
  CHECK(doc.label(NodeId{24}) == "star");
  CHECK(doc.parent(NodeId{24}) == NodeId{9});
  CHECK(doc.node(NodeId{24}).attr_type == AttrType::idref);
  CHECK(doc.node(NodeId{30}).kind == NodeKind::attribute);
  CHECK(doc.node(NodeId{31}).kind == NodeKind::atomic);
  CHECK(doc.attribute_value(NodeId{24}) == "436");

  // Attributes come first among children.
  const auto& children = doc.node(NodeId{9}).children;
  REQUIRE(children.size() == 2);
  CHECK(children[0] == NodeId{23});
  CHECK(children[1] == NodeId{24});
}

TEST_CASE("structure queries") {
  const XmlDocument& doc = movies_document();
  CHECK(doc.is_proper_ancestor(NodeId{0}, NodeId{24}));
  CHECK(doc.is_proper_ancestor(NodeId{1}, NodeId{9}));
  CHECK_FALSE(doc.is_proper_ancestor(NodeId{2}, NodeId{9}));
  CHECK_FALSE(doc.is_proper_ancestor(NodeId{9}, NodeId{9}));
  CHECK(doc.depth(NodeId{0}) == 0);
  CHECK(doc.depth(NodeId{24}) == 3);
  CHECK(path_of(doc, NodeId{24}) == std::vector<std::string>{"movieInfo", "movie", "character", "star"});
  CHECK(doc.element_with_id("436") == NodeId{5});
  CHECK_FALSE(doc.element_with_id("999"));
  CHECK(indirect_children(doc, NodeId{24}) == ids({5}));
  CHECK(indirect_children(doc, NodeId{23}).empty());
}

TEST_CASE("textual content follows IDREF references") {
  const XmlDocument& doc = movies_document();
  CHECK(textual_content(doc, NodeId{9}) == joined({"villain", "436", "Jack Redford"}));
  CHECK(textual_content(doc, NodeId{6}) == "A Wild West tale of two outlaws");
  CHECK(textual_content(doc, NodeId{10}) == "A Wild West comedy");
  CHECK(textual_content(doc, NodeId{24}) == joined({"436", "Jack Redford"}));
  // ID attributes only contribute when asked for directly.
  CHECK(textual_content(doc, NodeId{5}) == "Jack Redford");
  CHECK(textual_content(doc, NodeId{20}) == "436");
  TextCache cache(doc);
  CHECK(cache(NodeId{9}) == textual_content(doc, NodeId{9}));
}

TEST_CASE("textual content is cycle safe") {
  const Dtd dtd = parse_dtd(
      "<!ELEMENT a (b*)> <!ATTLIST a id ID #IMPLIED ref IDREF #IMPLIED>"
      "<!ELEMENT b (#PCDATA)> <!ATTLIST b ref IDREF #IMPLIED>");
  const XmlDocument doc = parse_document(R"(<a id="top" ref="top"><b ref="top">x</b></a>)", dtd);
  CHECK(textual_content(doc, doc.root()) == joined({"top", "top", "x"}));
}

TEST_CASE("xml text round trip") {
  const std::string text = R"(<?xml version="1.0"?>
<!-- comment -->
<a k="1 &amp; 2"><b>x &lt; y</b><c/><![CDATA[<raw>]]></a>)";
  const XmlDocument doc = parse_document(text);
  CHECK(doc.attribute_value(doc.node(doc.root()).children.front()) == "1 & 2");
  const XmlDocument again = parse_document(to_xml(doc));
  CHECK(again.to_source() == doc.to_source());
  CHECK(textual_content(doc, doc.root()).find("<raw>") != std::string::npos);
}

TEST_CASE("several top-level elements are wrapped") {
  const SourceNode root = parse_xml("<a/><b/>");
  CHECK(root.name == default_wrapper_label);
  CHECK(root.children.size() == 2);
}

TEST_CASE("malformed xml reports a position") {
  CHECK_THROWS_AS(parse_xml("<a><b></a>"), SyntaxError);
  CHECK_THROWS_AS(parse_xml("<a>"), SyntaxError);
  CHECK_THROWS_AS(parse_xml("<a x=1/>"), SyntaxError);
  CHECK_THROWS_AS(parse_xml("<a>&bogus;</a>"), SyntaxError);
  try {
    parse_xml("<a>\n  <b></c>\n</a>");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("duplicate ID values are rejected") {
  const Dtd dtd = parse_dtd("<!ELEMENT a (b*)> <!ELEMENT b EMPTY> <!ATTLIST b id ID #REQUIRED>");
  CHECK_THROWS_AS(parse_document(R"(<a><b id="x"/><b id="x"/></a>)", dtd), DocumentError);
}

TEST_CASE("dtd text round trip") {
  const Dtd& dtd = movies_dtd();
  CHECK(dtd.root_element() == "movieInfo");
  CHECK(to_string(dtd.content("movieInfo")) == "(movie+,actor+)");
  CHECK(to_string(dtd.content("descr")) == "(#PCDATA)");
  CHECK(to_string(dtd.content("character")) == "EMPTY");
  const AttributeDecl* star = dtd.find_attribute("character", "star");
  REQUIRE(star != nullptr);
  CHECK(star->type == AttrType::idref);
  CHECK(star->presence == AttrPresence::required);
  CHECK(parse_dtd(to_dtd_text(dtd), "movieInfo") == dtd);
}

TEST_CASE("content models") {
  for (const char* text : {"(a,b?,(c|d)*)", "(#PCDATA|a|b)*", "EMPTY", "ANY", "(a+)", "((a,b)|c)+"}) {
    CAPTURE(text);
    CHECK(parse_content_model(to_string(parse_content_model(text))) == parse_content_model(text));
  }
  CHECK_THROWS_AS(parse_content_model("(a,b|c)"), SyntaxError);

  const ContentAutomaton automaton(parse_content_model("(a,b?,(c|d)*)"));
  using V = std::vector<std::string>;
  CHECK(automaton.accepts(V{"a"}));
  CHECK(automaton.accepts(V{"a", "b", "d", "c", "c"}));
  CHECK_FALSE(automaton.accepts(V{"b"}));
  CHECK_FALSE(automaton.accepts(V{"a", "b", "b"}));

  const ContentAutomaton mixed(parse_content_model("(#PCDATA|a)*"));
  CHECK(mixed.accepts(V{std::string(ContentAutomaton::pcdata_symbol), "a", "a"}));
  CHECK_FALSE(mixed.accepts(V{"b"}));

  CHECK(referenced_names(parse_content_model("(a,(b|a)*,c?)")) == V{"a", "b", "c"});
}

TEST_CASE("dtd checks references") {
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a (b)>").check(), DtdError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a EMPTY> <!ELEMENT a ANY>"), DtdError);
}

TEST_CASE("strict conformance") {
  const Dtd& dtd = movies_dtd();
  ConformanceChecker checker(dtd);
  CHECK(checker.strictly_conforms(movies_document()));

  auto diagnostics = [&](const char* xml) { return checker.diagnostics(parse_document(xml, dtd)); };
  CHECK_FALSE(diagnostics("<movie><descr>d</descr><title>t</title><character role=\"r\" star=\"s\"/></movie>").empty());
  CHECK_FALSE(diagnostics("<movieInfo><actor id=\"a\"><name>n</name></actor></movieInfo>").empty());
  CHECK_FALSE(diagnostics(
                  "<movieInfo><movie><descr>d</descr><title>t</title><character star=\"a\"/></movie>"
                  "<actor id=\"a\"><name>n</name></actor></movieInfo>")
                  .empty());
  CHECK_FALSE(diagnostics(
                  "<movieInfo><movie><descr>d</descr><title>t</title><character role=\"r\" star=\"a\" x=\"1\"/>"
                  "</movie><actor id=\"a\"><name>n</name></actor></movieInfo>")
                  .empty());
}

TEST_CASE("wrapped dtd accepts wrapped documents") {
  const Dtd dtd = parse_dtd("<!ELEMENT a (#PCDATA)> <!ELEMENT b EMPTY>");
  const Dtd wrapped = wrap_dtd(dtd, default_wrapper_label, {"a", "b"});
  CHECK(wrapped.root_element() == default_wrapper_label);
  CHECK(strictly_conforms(parse_document("<a>x</a><b/><a/>", wrapped), wrapped));
}

TEST_CASE("dtd reachability") {
  DtdReachability reach(movies_dtd());
  CHECK(reach.nested_within("name", "movieInfo"));
  CHECK(reach.nested_within("character", "movie"));
  CHECK_FALSE(reach.nested_within("actor", "movie"));
  CHECK_FALSE(reach.nested_within("movieInfo", "movieInfo"));
}

TEST_CASE("regex search") {
  CHECK(Regex("ab|cd").search("xxcd"));
  CHECK(Regex("^a.c$").search("abc"));
  CHECK_FALSE(Regex("^a.c$").search("abcd"));
  CHECK(Regex("[0-9]+x").search("a12x"));
  CHECK(Regex("\\d{2,3}").search("a12"));
  CHECK_FALSE(Regex("\\d{2,3}").search("a1b"));
  CHECK(Regex("^$").search(""));
  CHECK(Regex("(a|b)*c").search("ababc"));
  CHECK(Regex("[^a]").search("ab"));
  CHECK_FALSE(Regex("[^a]").search("aaa"));
  // Pathological for backtracking engines.
  CHECK_FALSE(Regex("(a*)*b").search(std::string(5000, 'a')));
  CHECK_THROWS_AS(Regex("("), PatternError);
  CHECK_THROWS_AS(Regex("a{3,1}"), PatternError);
}

TEST_CASE("matchers") {
  CHECK(Matcher::word("redford")("Jack Redford"));
  CHECK_FALSE(Matcher::word("red")("Jack Redford"));
  CHECK(Matcher::phrase("Wild West")("A Wild West comedy"));
  CHECK_FALSE(Matcher::phrase("West Wild")("A Wild West comedy"));
  CHECK_THROWS_AS(Matcher::word("two words"), QuerySchemaError);
  CHECK(Matcher::regex("^A ")("A Wild West comedy"));
  CHECK(Matcher::always()(""));

  const Matcher villain = Matcher::word("villain");
  const std::string t = joined({"villain", "436", "Jack Redford"});
  CHECK(villain(t));
  CHECK_FALSE(complement(villain)(t));
  CHECK(complement(complement(villain)) == villain);
  CHECK(Matcher::all_of({villain, Matcher::word("redford")})(t));
  CHECK_FALSE(Matcher::all_of({villain, Matcher::word("newman")})(t));
  CHECK(Matcher::any_of({Matcher::word("hero"), villain})(t));
  CHECK(tokenize_words("Jack Redford, 436!") == std::vector<std::string>{"jack", "redford", "436"});
}

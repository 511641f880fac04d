#include <doctest.h>

#include "equix/error.hpp"
#include "equix/query.hpp"
#include "fixture.hpp"

using namespace equix;
using namespace equix::testing;

namespace {

std::string schema_pointer(const std::string& text) {
  try {
    parse_query_file(text);
  } catch (const QuerySchemaError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("fixture query parses as a concrete tree") {
  const QuerySpec spec = fixture_query("redford_not_villain");
  REQUIRE(spec.is_concrete());
  CHECK(spec.mode == QueryMode::strict);
  const auto& cq = std::get<ConcreteQuery>(spec.tree);
  CHECK(cq.size() == 8);
  const QueryNodeId character = node_at(cq, {"movieInfo", "movie", "character"});
  CHECK(cq.node(character).quantifier == ConcreteQuantifier::none_is);
  CHECK(cq.node(node_at(cq, {"movieInfo", "movie"})).matcher == Matcher::phrase("Wild West"));
  CHECK(cq.outputs().size() == 2);
}

TEST_CASE("translation pushes negation to the leaves") {
  const QuerySpec spec = fixture_query("redford_not_villain");
  const auto& cq = std::get<ConcreteQuery>(spec.tree);
  const AbstractQuery q = translate(cq);
  REQUIRE(q.size() == cq.size());
  for (const auto& n : q.nodes()) {
    CHECK(n.label == cq.node(n.id).label);
    CHECK(n.parent == cq.node(n.id).parent);
    CHECK(n.output == cq.node(n.id).output);
  }

  const QueryNodeId movie = node_at(q, {"movieInfo", "movie"});
  const QueryNodeId character = node_at(q, {"movieInfo", "movie", "character"});
  const QueryNodeId role = node_at(q, {"movieInfo", "movie", "character", "role"});
  CHECK(q.node(movie).quantifier == Quantifier::exists);
  CHECK(q.node(movie).op == NodeOperator::conjunction);
  CHECK(q.node(character).quantifier == Quantifier::for_all);
  CHECK(q.node(character).op == NodeOperator::disjunction);
  CHECK(q.node(role).quantifier == Quantifier::for_all);
  CHECK(q.node(role).op == NodeOperator::disjunction);
  CHECK(q.node(role).matcher == complement(Matcher::word("villain")));
}

TEST_CASE("double negation restores positive form") {
  ConcreteQuery cq(node_spec("a"));
  const auto b = cq.add_child(cq.root(), ConcreteQuantifier::not_all_are, node_spec("b"));
  NodeSpec c_spec = node_spec("c");
  c_spec.matcher = Matcher::word("x");
  const auto c = cq.add_child(b, ConcreteQuantifier::none_is, c_spec);
  const auto d = cq.add_child(b, ConcreteQuantifier::all_are, node_spec("d"));
  const AbstractQuery q = translate(cq);
  CHECK(q.node(b).quantifier == Quantifier::exists);
  CHECK(q.node(b).op == NodeOperator::disjunction);
  // Negative parent flips the positive form of none-is (for-all) to exists.
  CHECK(q.node(c).quantifier == Quantifier::exists);
  CHECK(q.node(c).op == NodeOperator::conjunction);
  CHECK(q.node(c).matcher == Matcher::word("x"));
  CHECK(q.node(d).quantifier == Quantifier::exists);
  CHECK(q.node(d).op == NodeOperator::disjunction);
}

TEST_CASE("query files round trip through the canonical form") {
  for (const char* name : {"redford_not_villain", "character_count", "wild_west", "film_titles"}) {
    CAPTURE(name);
    const QuerySpec spec = fixture_query(name);
    CHECK(parse_query_file(serialize_query(spec)) == spec);
  }

  const std::string abstract = R"({
    "form": "abstract", "label": "r", "operator": "or",
    "matcher": {"op": "and", "args": [{"op": "regex", "pattern": "^a+$"}, {"op": "not", "arg": {"op": "word", "value": "b"}}]},
    "children": [{"quantifier": "for-all", "node": {"label": "c", "output": true,
      "matcher": {"op": "or", "args": [{"op": "phrase", "value": "x y"}, {"op": "true"}]},
      "agg": ["count", "avg"], "having": [{"fn": "max", "op": "<", "value": "10"}]}}]
  })";
  const QuerySpec spec = parse_query_file(abstract);
  REQUIRE_FALSE(spec.is_concrete());
  const auto& q = std::get<AbstractQuery>(spec.tree);
  CHECK(q.node(q.root()).op == NodeOperator::disjunction);
  CHECK(q.node(QueryNodeId{1}).aggregates == std::vector<AggFunction>{AggFunction::count, AggFunction::avg});
  CHECK(q.node(QueryNodeId{1}).having.front().value == "10");
  CHECK(parse_query_file(serialize_query(spec)) == spec);
  CHECK(serialize_query(parse_query_file(serialize_query(spec))) == serialize_query(spec));
}

TEST_CASE("numeric having constants are kept as text") {
  const QuerySpec spec = fixture_query("character_count");
  const AbstractQuery q = spec.abstract();
  const auto& having = q.node(node_at(q, {"movieInfo", "movie", "character"})).having;
  REQUIRE(having.size() == 1);
  CHECK(having.front().function == AggFunction::count);
  CHECK(having.front().op == Comparison::ge);
  CHECK(having.front().value == "2");
}

TEST_CASE("schema errors carry a pointer") {
  CHECK(schema_pointer("[1]") == "/");
  CHECK(schema_pointer("{not json") == "/");
  CHECK(schema_pointer(R"({"children": []})") == "/");
  CHECK(schema_pointer(R"({"label": "a", "bogus": 1})") == "/bogus");
  CHECK(schema_pointer(R"({"label": "a", "children": [{"quantifier": "exists", "node": {"label": "b"}}]})") ==
        "/children/0/quantifier");
  CHECK(schema_pointer(R"({"form": "abstract", "label": "a", "children": [{"quantifier": "one-is", "node": {"label": "b"}}]})") ==
        "/children/0/quantifier");
  CHECK(schema_pointer(R"({"label": "a", "matcher": {"op": "regex", "pattern": "("}})") == "/matcher/pattern");
  CHECK(schema_pointer(R"({"label": "a", "matcher": {"op": "word", "value": "two words"}})") == "/matcher");
  CHECK(schema_pointer(R"({"label": "a", "operator": "or"})") == "/operator");
  CHECK(schema_pointer(R"({"label": "a", "agg": ["median"]})") == "/agg/0");
  CHECK(schema_pointer(R"({"label": "a", "having": [{"fn": "count", "op": "~", "value": 1}]})") == "/having/0/op");
  CHECK(schema_pointer(R"({"label": "a", "mode": "fuzzy"})") == "/mode");
  CHECK(schema_pointer(R"({"label": "a", "contains": "x", "matcher": {"op": "true"}})") == "/contains");
}

TEST_CASE("validation against the DTD") {
  const Dtd& dtd = movies_dtd();
  CHECK(validate_query_against_dtd(fixture_query("redford_not_villain").abstract(), dtd).empty());

  AbstractQuery wrong_root(node_spec("movie", Matcher::always(), true));
  CHECK_FALSE(validate_query_against_dtd(wrong_root, dtd).empty());

  AbstractQuery no_output(node_spec("movieInfo"));
  CHECK(validate_query_against_dtd(no_output, dtd) == std::vector<std::string>{"query has no output node"});

  AbstractQuery misplaced(node_spec("movieInfo", Matcher::always(), true));
  misplaced.add_child(misplaced.root(), Quantifier::exists, node_spec("title"));
  CHECK(validate_query_against_dtd(misplaced, dtd).size() == 1);

  AbstractQuery under_attribute(node_spec("movieInfo", Matcher::always(), true));
  const auto movie = under_attribute.add_child(under_attribute.root(), Quantifier::exists, node_spec("movie"));
  const auto character = under_attribute.add_child(movie, Quantifier::exists, node_spec("character"));
  const auto role = under_attribute.add_child(character, Quantifier::exists, node_spec("role"));
  under_attribute.add_child(role, Quantifier::exists, node_spec("name"));
  CHECK(is_attribute_node(under_attribute, role, dtd));
  CHECK_FALSE(is_attribute_node(under_attribute, character, dtd));
  CHECK(validate_query_against_dtd(under_attribute, dtd).size() == 1);
}

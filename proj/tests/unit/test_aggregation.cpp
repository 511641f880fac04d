#include <doctest.h>

#include "equix/aggregation.hpp"
#include "equix/engine.hpp"
#include "equix/error.hpp"
#include "equix/result_dtd.hpp"
#include "fixture.hpp"

using namespace equix;
using namespace equix::testing;

namespace {

using Texts = std::vector<std::string>;

AbstractQuery count_query() { return fixture_query("character_count").abstract(); }

const GroupAggregate* find_group(const std::vector<GroupAggregate>& aggs, std::uint32_t group, AggFunction f) {
  for (const auto& a : aggs) {
    if (a.group == NodeId{group} && a.function == f) return &a;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("number parsing") {
  CHECK(parse_number("  +3.5 ") == 3.5);
  CHECK(parse_number("-2") == -2.0);
  CHECK(parse_number("1e3") == 1000.0);
  CHECK(parse_number(".5") == 0.5);
  CHECK_FALSE(parse_number(""));
  CHECK_FALSE(parse_number("abc"));
  CHECK_FALSE(parse_number("12abc"));
  CHECK_FALSE(parse_number("inf"));
  CHECK_FALSE(parse_number("nan"));
  CHECK_FALSE(parse_number("1e999"));
}

TEST_CASE("aggregate functions") {
  CHECK(aggregate(AggFunction::count, {}).number == 0);
  CHECK(aggregate(AggFunction::count, Texts{"a", "b"}).number == 2);
  CHECK(aggregate(AggFunction::sum, {}).number == 0);
  CHECK(aggregate(AggFunction::sum, {}).defined);
  CHECK(aggregate(AggFunction::sum, Texts{"1", " 2.5"}).number == 3.5);
  CHECK_FALSE(aggregate(AggFunction::sum, Texts{"1", "x"}).defined);
  CHECK_FALSE(aggregate(AggFunction::avg, {}).defined);
  CHECK(aggregate(AggFunction::avg, Texts{"1", "2"}).number == 1.5);
  CHECK_FALSE(aggregate(AggFunction::min, {}).defined);
  CHECK_FALSE(aggregate(AggFunction::max, {}).defined);
  CHECK(aggregate(AggFunction::max, Texts{"2", "10"}).number == 10);
  CHECK(aggregate(AggFunction::min, Texts{"2", "10"}).number == 2);
  const AggValue text_min = aggregate(AggFunction::min, Texts{"b", "10", "a"});
  CHECK_FALSE(text_min.numeric);
  CHECK(text_min.text == "10");
  CHECK(aggregate(AggFunction::max, Texts{"b", "10", "a"}).text == "b");
}

TEST_CASE("formatting and comparison") {
  CHECK(format_value(AggValue::of_number(2)) == "2");
  CHECK(format_value(AggValue::of_number(2.5)) == "2.5");
  CHECK(format_value(AggValue::of_text("a b")) == "a b");
  CHECK(format_value(AggValue::undefined()) == "undefined");

  CHECK(satisfies(AggValue::of_number(2), Comparison::ge, "2"));
  CHECK_FALSE(satisfies(AggValue::of_number(1), Comparison::ge, "2"));
  CHECK(satisfies(AggValue::of_number(10), Comparison::gt, "9"));
  CHECK_FALSE(satisfies(AggValue::of_number(10), Comparison::eq, "ten"));
  CHECK_FALSE(satisfies(AggValue::undefined(), Comparison::ne, "1"));
  CHECK(satisfies(AggValue::of_text("apple"), Comparison::lt, "banana"));
  CHECK(satisfies(AggValue::of_text("b"), Comparison::ne, "a"));
}

TEST_CASE("grouping nodes") {
  const AbstractQuery q = count_query();
  const QueryNodeId movie = node_at(q, {"movieInfo", "movie"});
  const QueryNodeId character = node_at(q, {"movieInfo", "movie", "character"});
  CHECK(grouping_node(q, character) == movie);
  CHECK(has_aggregation(q));
  CHECK(validate_aggregation(q).empty());
  CHECK_FALSE(has_aggregation(fixture_query("redford_not_villain").abstract()));

  AbstractQuery root_only(node_spec("movieInfo", Matcher::always(), true));
  root_only.mutable_node(root_only.root()).aggregates = {AggFunction::count};
  CHECK(validate_aggregation(root_only).size() == 1);
  CHECK_THROWS_AS(grouping_node(root_only, root_only.root()), ValidationError);

  // The grouping node must lie on the way to an output.
  AbstractQuery side(node_spec("movieInfo"));
  const auto m = side.add_child(side.root(), Quantifier::exists, node_spec("movie"));
  side.add_child(m, Quantifier::exists, node_spec("title", Matcher::always(), true));
  const auto actor = side.add_child(side.root(), Quantifier::exists, node_spec("actor"));
  const auto name = side.add_child(actor, Quantifier::exists, node_spec("name"));
  side.mutable_node(name).aggregates = {AggFunction::count};
  CHECK(grouping_node(side, name) == side.root());
}

TEST_CASE("character counts on the movies example") {
  const XmlDocument& doc = movies_document();
  const AbstractQuery q = count_query();
  const Evaluation e = evaluate(doc, q);
  const auto aggs = compute_aggregates(doc, q, e.retrieval, TextCache(doc));
  REQUIRE(aggs.size() == 2);
  CHECK(find_group(aggs, 2, AggFunction::count)->value.number == 2);
  CHECK(find_group(aggs, 3, AggFunction::count)->value.number == 1);
  CHECK(find_group(aggs, 2, AggFunction::count)->displayed);

  CHECK(failing_groups(q, aggs) == ids({3}));
  const OutputSet kept = apply_agg_constraints(doc, q, e.retrieval, aggs);
  CHECK(kept.out == ids({10, 11}));
  CHECK(kept.ancestors == ids({0, 2}));
}

TEST_CASE("aggregates are injected under their group") {
  const Catalog catalog = movies_catalog();
  const AbstractQuery q = count_query();
  const RunResult run = run_strict(q, catalog.dtd, catalog.documents);
  REQUIRE(run.documents.size() == 1);
  CHECK(run.documents.front().source_index == 0);
  const std::string& xml = run.documents.front().xml;
  CHECK(xml.find(R"(<equix-agg fn="count" path="movieInfo/movie/character" value="2"/>)") != std::string::npos);
  CHECK(xml.find("Sheriff for Hire") != std::string::npos);
  CHECK(xml.find("Return to the Wild West") == std::string::npos);

  REQUIRE(run.result_dtd);
  CHECK(to_string(run.result_dtd->content("movie")) == "((descr?,title?),equix-agg*)");
  CHECK(run.result_dtd->has_element("equix-agg"));
  CHECK(strictly_conforms(run.documents.front().document, *run.result_dtd));
}

TEST_CASE("annotations are ignored when aggregation is off") {
  const Catalog catalog = movies_catalog();
  RunOptions off;
  off.aggregation = false;
  const RunResult plain = run_strict(fixture_query("redford_not_villain").abstract(), catalog.dtd, catalog.documents);
  const RunResult ignored = run_strict(count_query(), catalog.dtd, catalog.documents, off);
  REQUIRE(plain.documents.size() == ignored.documents.size());
  for (std::size_t i = 0; i < plain.documents.size(); ++i) CHECK(plain.documents[i].xml == ignored.documents[i].xml);
  CHECK(plain.result_dtd_text == ignored.result_dtd_text);
}

TEST_CASE("constraint-only functions are not displayed") {
  const XmlDocument& doc = movies_document();
  AbstractQuery q = count_query();
  q.mutable_node(node_at(q, {"movieInfo", "movie", "character"})).aggregates.clear();
  const Evaluation e = evaluate(doc, q);
  const auto aggs = compute_aggregates(doc, q, e.retrieval, TextCache(doc));
  REQUIRE(aggs.size() == 2);
  for (const auto& a : aggs) CHECK_FALSE(a.displayed);
  const Projection p = project_with_source(doc, apply_agg_constraints(doc, q, e.retrieval, aggs));
  CHECK(to_xml(inject_aggregates(p, doc, q, aggs)).find("equix-agg") == std::string::npos);
}

TEST_CASE("result DTD extension") {
  const AbstractQuery q = count_query();
  Dtd dtd = create_result_dtd(q, movies_dtd()).dtd;
  extend_result_dtd(dtd, q);
  CHECK(to_string(dtd.content("equix-agg")) == "EMPTY");
  CHECK(dtd.attributes("equix-agg").size() == 3);
  // Narrowing a result DTD that already declares the element.
  Dtd again = dtd;
  CHECK_NOTHROW(extend_result_dtd(again, q));
  CHECK(parse_dtd(to_dtd_text(dtd), "movieInfo") == dtd);

  const Dtd empty_group = parse_dtd("<!ELEMENT r (g*)> <!ELEMENT g EMPTY> <!ATTLIST g v CDATA #IMPLIED>");
  AbstractQuery g_query(node_spec("r"));
  const auto g = g_query.add_child(g_query.root(), Quantifier::exists, node_spec("g", Matcher::always(), true));
  const auto v = g_query.add_child(g, Quantifier::exists, node_spec("v"));
  g_query.mutable_node(v).aggregates = {AggFunction::max};
  Dtd extended = create_result_dtd(g_query, empty_group).dtd;
  extend_result_dtd(extended, g_query);
  CHECK(to_string(extended.content("g")) == "(equix-agg*)");
}

#include <doctest.h>

#include "equix/engine.hpp"
#include "equix/error.hpp"
#include "equix/ontology.hpp"
#include "fixture.hpp"
#include "random_instances.hpp"

using namespace equix;
using namespace equix::testing;

namespace {

Ontology film() { return parse_ontology(read_file(fixture_dir() / "ontologies" / "film.json")); }

std::string ontology_pointer(const std::string& text) {
  try {
    parse_ontology(text);
  } catch (const QuerySchemaError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("ontology files") {
  const Ontology o = film();
  CHECK(o.name == "film");
  CHECK(o.terms.contains("title"));
  CHECK_FALSE(o.terms.contains("actor"));
  CHECK(parse_ontology(serialize_ontology(o)) == o);
  CHECK(ontology_pointer("{") == "/");
  CHECK(ontology_pointer(R"({"name": "", "terms": ["a"]})") == "/name");
  CHECK(ontology_pointer(R"({"name": "n", "terms": []})") == "/terms");
  CHECK(ontology_pointer(R"({"name": "n", "terms": ["a", 3]})") == "/terms/1");
  CHECK(ontology_pointer(R"({"name": "n", "terms": ["a"], "x": 1})") == "/x");
}

TEST_CASE("describable documents") {
  const Ontology o = film();
  CHECK(describable_by(movies_document(), o));
  CHECK_FALSE(describable_by(parse_document("<book><chapter/></book>"), o));
  CHECK(describable_by(parse_document("<book><title>t</title></book>"), o));
}

TEST_CASE("ontology validation") {
  const Ontology o = film();
  CHECK(validate_query_against_ontology(fixture_query("film_titles").abstract(), o).empty());
  AbstractQuery q(node_spec("movieInfo"));
  q.add_child(q.root(), Quantifier::exists, node_spec("actor"));
  const auto diagnostics = validate_query_against_ontology(q, o);
  CHECK(diagnostics.size() == 2);
}

TEST_CASE("edges reach any descendant") {
  const XmlDocument& doc = movies_document();
  const AbstractQuery q = fixture_query("film_titles").abstract();
  const OutputSet output = query_evaluate_reg(doc, q);
  CHECK(output.out == ids({15}));
  CHECK(output == brute_force_output_set_reg(doc, q, BruteForceBounds{64, 8, 20'000'000}));
  // Under child semantics the title is not a child of the root.
  CHECK(query_evaluate(doc, q).empty());

  // Attribute nodes are descendants of their owner's ancestors.
  AbstractQuery stars(node_spec("movieInfo"));
  const auto movie = stars.add_child(stars.root(), Quantifier::exists, node_spec("movie"));
  stars.add_child(movie, Quantifier::exists, node_spec("star", Matcher::word("redford"), true));
  CHECK(query_evaluate_reg(doc, stars).out == ids({24}));
}

TEST_CASE("for-all edges range over all descendants") {
  const XmlDocument doc = parse_document("<a><b><c>x</c></b><c>x</c><c>y</c></a>");
  AbstractQuery q(node_spec("a", Matcher::always(), true));
  q.add_child(q.root(), Quantifier::for_all, node_spec("c", Matcher::word("x")));
  CHECK(query_evaluate_reg(doc, q).empty());
  CHECK(brute_force_output_set_reg(doc, q).empty());

  AbstractQuery under_b(node_spec("a"));
  const auto b = under_b.add_child(under_b.root(), Quantifier::exists, node_spec("b", Matcher::always(), true));
  under_b.add_child(b, Quantifier::for_all, node_spec("c", Matcher::word("x")));
  CHECK(query_evaluate_reg(doc, under_b).out == ids({1}));
}

TEST_CASE("nested labels on one path") {
  const XmlDocument doc = parse_document("<a><a><b>x</b></a><b>y</b></a>");
  AbstractQuery q(node_spec("a"));
  const auto inner = q.add_child(q.root(), Quantifier::exists, node_spec("a", Matcher::always(), true));
  q.add_child(inner, Quantifier::exists, node_spec("b"));
  CHECK(query_evaluate_reg(doc, q) == brute_force_output_set_reg(doc, q));
  CHECK(query_evaluate_reg(doc, q).out == ids({1}));
}

TEST_CASE("reg runs over ontology pools") {
  const Catalog catalog = movies_catalog();
  const Ontology o = film();
  RunOptions options;
  options.oracle = true;
  const RunResult run = run_reg(fixture_query("film_titles").abstract(), o, catalog.documents, options);
  CHECK(run.ontology == "film");
  CHECK_FALSE(run.result_dtd);
  REQUIRE(run.documents.size() == 1);
  CHECK(run.documents.front().output_nodes == 1);
  CHECK(run.oracle.line() == "oracle: MATCH (3 documents)");

  AbstractQuery bad(node_spec("movieInfo"));
  CHECK_THROWS_AS(run_reg(bad, o, catalog.documents), ValidationError);
}

TEST_CASE("random reg instances agree with the brute-force oracle") {
  RandomInstances r(23);
  int checked = 0;
  while (checked < 150) {
    const Dtd dtd = r.dtd();
    auto doc = r.document(dtd, 12);
    if (!doc) continue;
    const AbstractQuery q = r.reg_query(dtd, 6);
    CAPTURE(to_xml(*doc));
    CAPTURE(serialize_query(QuerySpec{q, QueryMode::strict, {}}));
    CHECK(query_evaluate_reg(*doc, q) == brute_force_output_set_reg(*doc, q));
    ++checked;
  }
}

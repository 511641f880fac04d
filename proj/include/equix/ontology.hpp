#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "equix/document.hpp"
#include "equix/evaluator.hpp"
#include "equix/query.hpp"

namespace equix {

struct Ontology {
  std::string name;
  std::set<std::string, std::less<>> terms;

  friend bool operator==(const Ontology&, const Ontology&) = default;
};

// JSON {"name": ..., "terms": [...]}. Throws QuerySchemaError.
Ontology parse_ontology(std::string_view text);
std::string serialize_ontology(const Ontology& o);

// Some element or attribute name of `doc` is a term of `o`.
bool describable_by(const XmlDocument& doc, const Ontology& o);

// Empty when every query label is a term and the query has an output node.
std::vector<std::string> validate_query_against_ontology(const AbstractQuery& q, const Ontology& o);

// Evaluation where every query edge may be realized by any descendant edge.
// The query root still has to match the document root.
Evaluation evaluate_reg(const XmlDocument& doc, const AbstractQuery& q, const TextCache& text);
Evaluation evaluate_reg(const XmlDocument& doc, const AbstractQuery& q);
OutputSet query_evaluate_reg(const XmlDocument& doc, const AbstractQuery& q);

OutputSet brute_force_output_set_reg(const XmlDocument& doc, const AbstractQuery& q,
                                     const BruteForceBounds& bounds = {});

}  // namespace equix

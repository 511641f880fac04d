#include <algorithm>
#include <json.hpp>
#include <string>

#include "equix/error.hpp"
#include "equix/query.hpp"

namespace equix {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& message, const std::string& pointer) {
  throw QuerySchemaError(message, pointer.empty() ? "/" : pointer);
}

void allow_keys(const json& object, std::initializer_list<std::string_view> keys, const std::string& pointer) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      schema_error("unknown field '" + key + "'", pointer + "/" + key);
    }
  }
}

const json& require(const json& object, const char* key, const std::string& pointer) {
  auto it = object.find(key);
  if (it == object.end()) schema_error(std::string("missing field '") + key + "'", pointer);
  return *it;
}

std::string require_string(const json& object, const char* key, const std::string& pointer) {
  const auto& value = require(object, key, pointer);
  if (!value.is_string()) schema_error(std::string("'") + key + "' must be a string", pointer + "/" + key);
  return value.get<std::string>();
}

Matcher parse_matcher(const json& j, const std::string& pointer) {
  if (!j.is_object()) schema_error("matcher must be an object", pointer);
  std::string op = require_string(j, "op", pointer);
  try {
    if (op == "true") {
      allow_keys(j, {"op"}, pointer);
      return Matcher::always();
    }
    if (op == "word" || op == "phrase") {
      allow_keys(j, {"op", "value"}, pointer);
      std::string value = require_string(j, "value", pointer);
      return op == "word" ? Matcher::word(std::move(value)) : Matcher::phrase(std::move(value));
    }
    if (op == "regex") {
      allow_keys(j, {"op", "pattern"}, pointer);
      return Matcher::regex(require_string(j, "pattern", pointer));
    }
    if (op == "and" || op == "or") {
      allow_keys(j, {"op", "args"}, pointer);
      const auto& args = require(j, "args", pointer);
      if (!args.is_array() || args.empty()) schema_error("'args' must be a non-empty array", pointer + "/args");
      std::vector<Matcher> operands;
      for (std::size_t i = 0; i < args.size(); ++i) {
        operands.push_back(parse_matcher(args[i], pointer + "/args/" + std::to_string(i)));
      }
      return op == "and" ? Matcher::all_of(std::move(operands)) : Matcher::any_of(std::move(operands));
    }
    if (op == "not") {
      allow_keys(j, {"op", "arg"}, pointer);
      return Matcher::negation(parse_matcher(require(j, "arg", pointer), pointer + "/arg"));
    }
  } catch (const QuerySchemaError& e) {
    if (e.pointer() != "") throw;
    schema_error(e.what(), pointer);
  } catch (const PatternError& e) {
    schema_error(e.what(), pointer + "/pattern");
  }
  schema_error("unknown matcher op '" + op + "'", pointer + "/op");
}

json matcher_json(const Matcher& m) {
  switch (m.kind()) {
    case Matcher::Kind::always: return {{"op", "true"}};
    case Matcher::Kind::word: return {{"op", "word"}, {"value", m.text()}};
    case Matcher::Kind::phrase: return {{"op", "phrase"}, {"value", m.text()}};
    case Matcher::Kind::regex: return {{"op", "regex"}, {"pattern", m.text()}};
    case Matcher::Kind::all_of:
    case Matcher::Kind::any_of: {
      json args = json::array();
      for (const auto& operand : m.operands()) args.push_back(matcher_json(operand));
      return {{"op", m.kind() == Matcher::Kind::all_of ? "and" : "or"}, {"args", args}};
    }
    case Matcher::Kind::negation: return {{"op", "not"}, {"arg", matcher_json(m.operands().front())}};
  }
  return {};
}

AggFunction parse_function(const json& j, const std::string& pointer) {
  if (!j.is_string()) schema_error("aggregate function must be a string", pointer);
  auto s = j.get<std::string>();
  for (auto f : {AggFunction::count, AggFunction::min, AggFunction::max, AggFunction::sum, AggFunction::avg}) {
    if (s == to_string(f)) return f;
  }
  schema_error("unknown aggregate function '" + s + "'", pointer);
}

Comparison parse_comparison(const json& j, const std::string& pointer) {
  if (!j.is_string()) schema_error("comparison must be a string", pointer);
  auto s = j.get<std::string>();
  for (auto c : {Comparison::lt, Comparison::le, Comparison::eq, Comparison::ne, Comparison::ge, Comparison::gt}) {
    if (s == to_string(c)) return c;
  }
  schema_error("unknown comparison '" + s + "'", pointer);
}

template <class Q>
Q parse_quantifier(const std::string& s, const std::string& pointer);

template <>
ConcreteQuantifier parse_quantifier<ConcreteQuantifier>(const std::string& s, const std::string& pointer) {
  for (auto q : {ConcreteQuantifier::one_is, ConcreteQuantifier::none_is, ConcreteQuantifier::all_are,
                 ConcreteQuantifier::not_all_are}) {
    if (s == to_string(q)) return q;
  }
  schema_error("unknown quantifier '" + s + "'", pointer);
}

template <>
Quantifier parse_quantifier<Quantifier>(const std::string& s, const std::string& pointer) {
  for (auto q : {Quantifier::exists, Quantifier::for_all}) {
    if (s == to_string(q)) return q;
  }
  schema_error("unknown quantifier '" + s + "'", pointer);
}

template <class Q>
constexpr bool is_abstract = std::is_same_v<Q, Quantifier>;

NodeSpec parse_spec(const json& j, bool abstract, const std::string& pointer) {
  NodeSpec spec;
  spec.label = require_string(j, "label", pointer);
  if (spec.label.empty()) schema_error("'label' must not be empty", pointer + "/label");
  if (j.contains("matcher") && j.contains("contains")) {
    schema_error("'matcher' and 'contains' are exclusive", pointer + "/contains");
  }
  if (auto it = j.find("matcher"); it != j.end()) spec.matcher = parse_matcher(*it, pointer + "/matcher");
  if (auto it = j.find("contains"); it != j.end()) {
    if (!it->is_string()) schema_error("'contains' must be a string", pointer + "/contains");
    spec.matcher = Matcher::phrase(it->get<std::string>());
  }
  if (auto it = j.find("output"); it != j.end()) {
    if (!it->is_boolean()) schema_error("'output' must be a boolean", pointer + "/output");
    spec.output = it->get<bool>();
  }
  if (auto it = j.find("operator"); it != j.end()) {
    if (!abstract) schema_error("'operator' is only allowed in abstract queries", pointer + "/operator");
    std::string op = it->is_string() ? it->get<std::string>() : "";
    if (op == "and") {
      spec.op = NodeOperator::conjunction;
    } else if (op == "or") {
      spec.op = NodeOperator::disjunction;
    } else {
      schema_error("'operator' must be \"and\" or \"or\"", pointer + "/operator");
    }
  }
  if (auto it = j.find("agg"); it != j.end()) {
    if (!it->is_array()) schema_error("'agg' must be an array", pointer + "/agg");
    for (std::size_t i = 0; i < it->size(); ++i) {
      spec.aggregates.push_back(parse_function((*it)[i], pointer + "/agg/" + std::to_string(i)));
    }
  }
  if (auto it = j.find("having"); it != j.end()) {
    if (!it->is_array()) schema_error("'having' must be an array", pointer + "/having");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& c = (*it)[i];
      std::string at = pointer + "/having/" + std::to_string(i);
      if (!c.is_object()) schema_error("constraint must be an object", at);
      allow_keys(c, {"fn", "op", "value"}, at);
      AggConstraint constraint;
      constraint.function = parse_function(require(c, "fn", at), at + "/fn");
      constraint.op = parse_comparison(require(c, "op", at), at + "/op");
      const auto& value = require(c, "value", at);
      if (value.is_string()) {
        constraint.value = value.get<std::string>();
      } else if (value.is_number()) {
        constraint.value = value.dump();
      } else {
        schema_error("'value' must be a string or number", at + "/value");
      }
      spec.having.push_back(std::move(constraint));
    }
  }
  return spec;
}

template <class Q>
void parse_children(const json& j, QueryTree<Q>& tree, QueryNodeId parent, const std::string& pointer) {
  auto it = j.find("children");
  if (it == j.end()) return;
  if (!it->is_array()) schema_error("'children' must be an array", pointer + "/children");
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& edge = (*it)[i];
    std::string at = pointer + "/children/" + std::to_string(i);
    if (!edge.is_object()) schema_error("child entry must be an object", at);
    allow_keys(edge, {"quantifier", "node"}, at);
    Q q = parse_quantifier<Q>(require_string(edge, "quantifier", at), at + "/quantifier");
    const auto& node = require(edge, "node", at);
    if (!node.is_object()) schema_error("'node' must be an object", at + "/node");
    allow_keys(node, {"label", "matcher", "contains", "output", "operator", "children", "agg", "having"},
               at + "/node");
    QueryNodeId child = tree.add_child(parent, q, parse_spec(node, is_abstract<Q>, at + "/node"));
    parse_children(node, tree, child, at + "/node");
  }
}

template <class Q>
QueryTree<Q> parse_tree(const json& j) {
  QueryTree<Q> tree(parse_spec(j, is_abstract<Q>, ""));
  parse_children(j, tree, tree.root(), "");
  return tree;
}

template <class Q>
json node_json(const QueryTree<Q>& tree, QueryNodeId id) {
  const auto& node = tree.node(id);
  json out = {{"label", node.label}};
  if (!node.matcher.is_always()) out["matcher"] = matcher_json(node.matcher);
  if (node.output) out["output"] = true;
  if constexpr (is_abstract<Q>) out["operator"] = node.op == NodeOperator::conjunction ? "and" : "or";
  if (!node.aggregates.empty()) {
    json agg = json::array();
    for (auto f : node.aggregates) agg.push_back(to_string(f));
    out["agg"] = agg;
  }
  if (!node.having.empty()) {
    json having = json::array();
    for (const auto& c : node.having) having.push_back({{"fn", to_string(c.function)}, {"op", to_string(c.op)}, {"value", c.value}});
    out["having"] = having;
  }
  if (!node.children.empty()) {
    json children = json::array();
    for (QueryNodeId child : node.children) {
      children.push_back({{"quantifier", to_string(tree.node(child).quantifier)}, {"node", node_json(tree, child)}});
    }
    out["children"] = children;
  }
  return out;
}

}  // namespace

QuerySpec parse_query_file(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what(), "");
  }
  if (!j.is_object()) schema_error("query must be a JSON object", "");
  allow_keys(j, {"form", "mode", "ontology", "label", "matcher", "contains", "output", "operator", "children", "agg",
                 "having"},
             "");
  std::string form = "concrete";
  if (auto it = j.find("form"); it != j.end()) {
    if (!it->is_string()) schema_error("'form' must be a string", "/form");
    form = it->get<std::string>();
  }
  QueryMode mode = QueryMode::strict;
  if (auto it = j.find("mode"); it != j.end()) {
    std::string m = it->is_string() ? it->get<std::string>() : "";
    if (m == "strict") {
      mode = QueryMode::strict;
    } else if (m == "ontology") {
      mode = QueryMode::ontology;
    } else {
      schema_error("'mode' must be \"strict\" or \"ontology\"", "/mode");
    }
  }
  std::string ontology;
  if (auto it = j.find("ontology"); it != j.end()) {
    if (!it->is_string()) schema_error("'ontology' must be a string", "/ontology");
    ontology = it->get<std::string>();
  }
  if (form == "concrete") return QuerySpec{parse_tree<ConcreteQuantifier>(j), mode, ontology};
  if (form == "abstract") return QuerySpec{parse_tree<Quantifier>(j), mode, ontology};
  schema_error("'form' must be \"concrete\" or \"abstract\"", "/form");
}

std::string serialize_query(const QuerySpec& spec) {
  json out = std::visit([](const auto& tree) { return node_json(tree, tree.root()); }, spec.tree);
  out["form"] = spec.is_concrete() ? "concrete" : "abstract";
  if (spec.mode == QueryMode::ontology) out["mode"] = "ontology";
  if (!spec.ontology.empty()) out["ontology"] = spec.ontology;
  return out.dump(2);
}

}  // namespace equix

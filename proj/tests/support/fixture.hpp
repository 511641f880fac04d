#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "equix/catalog.hpp"
#include "equix/evaluator.hpp"
#include "equix/query.hpp"

namespace equix::testing {

inline std::filesystem::path fixture_dir() { return EQUIX_FIXTURE_DIR; }

inline Catalog movies_catalog() { return load_catalog(fixture_dir() / "catalogs" / "movies.json"); }

// The three-movie document of the movies catalog.
inline const XmlDocument& movies_document() {
  static const Catalog catalog = movies_catalog();
  return catalog.documents.front();
}

inline const Dtd& movies_dtd() {
  static const Catalog catalog = movies_catalog();
  return catalog.dtd;
}

inline QuerySpec fixture_query(const std::string& name) {
  return parse_query_file(read_file(fixture_dir() / "movies" / "queries" / (name + ".json")));
}

inline std::vector<NodeId> ids(std::initializer_list<std::uint32_t> values) {
  std::vector<NodeId> out;
  for (auto v : values) out.push_back(NodeId{v});
  return out;
}

inline NodeSpec node_spec(std::string label, Matcher matcher = Matcher::always(), bool output = false,
                          NodeOperator op = NodeOperator::conjunction) {
  NodeSpec spec;
  spec.label = std::move(label);
  spec.matcher = std::move(matcher);
  spec.output = output;
  spec.op = op;
  return spec;
}

// Query node of the given root path, e.g. {"movieInfo", "movie", "title"}.
template <class Q>
QueryNodeId node_at(const QueryTree<Q>& q, const std::vector<std::string>& path) {
  for (const auto& n : q.nodes()) {
    if (q.path(n.id) == path) return n.id;
  }
  throw Error("no query node at the requested path");
}

// Matching given as (query path, document nodes) rows; unlisted rows are empty.
inline Matching matching_of(const AbstractQuery& q,
                            const std::vector<std::pair<std::vector<std::string>, std::vector<NodeId>>>& rows) {
  Matching mu(q.size());
  for (const auto& [path, nodes] : rows) mu.assign(node_at(q, path), nodes);
  return mu;
}

// The two satisfying matchings of the translated redford_not_villain query,
// one per qualifying movie.
inline Matching movie2_matching(const AbstractQuery& q) {
  return matching_of(q, {{{"movieInfo"}, ids({0})},
                         {{"movieInfo", "movie"}, ids({2})},
                         {{"movieInfo", "movie", "descr"}, ids({10})},
                         {{"movieInfo", "movie", "title"}, ids({11})},
                         {{"movieInfo", "movie", "character"}, ids({12, 13})},
                         {{"movieInfo", "movie", "character", "role"}, ids({25, 27})},
                         {{"movieInfo", "movie", "character", "star"}, ids({26, 28})},
                         {{"movieInfo", "actor"}, ids({4})}});
}

inline Matching movie3_matching(const AbstractQuery& q) {
  return matching_of(q, {{{"movieInfo"}, ids({0})},
                         {{"movieInfo", "movie"}, ids({3})},
                         {{"movieInfo", "movie", "descr"}, ids({14})},
                         {{"movieInfo", "movie", "title"}, ids({15})},
                         {{"movieInfo", "movie", "character"}, ids({16})},
                         {{"movieInfo", "movie", "character", "role"}, ids({29})},
                         {{"movieInfo", "movie", "character", "star"}, ids({30})},
                         {{"movieInfo", "actor"}, ids({5})}});
}

}  // namespace equix::testing

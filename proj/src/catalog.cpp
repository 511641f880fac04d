#include "equix/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "equix/error.hpp"

namespace equix {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

Catalog make_catalog(std::string name, std::string_view dtd_text, const std::string& root,
                     const std::vector<std::pair<std::string, std::string>>& documents) {
  Catalog catalog{std::move(name), parse_dtd(dtd_text, root), {}, {}};
  catalog.dtd.check();

  std::vector<SourceNode> trees;
  bool wrapped = false;
  for (const auto& [source, text] : documents) {
    trees.push_back(parse_xml(text));
    wrapped = wrapped || trees.back().name == default_wrapper_label;
    catalog.sources.push_back(source);
  }
  if (wrapped) {
    std::vector<std::string> top_level;
    auto note = [&](const std::string& label) {
      if (std::find(top_level.begin(), top_level.end(), label) == top_level.end()) top_level.push_back(label);
    };
    for (auto& tree : trees) {
      if (tree.name == default_wrapper_label) {
        for (const auto& child : tree.children) {
          if (!child.is_text()) note(child.name);
        }
      } else {
        note(tree.name);
        SourceNode wrapper = SourceNode::element(std::string(default_wrapper_label));
        wrapper.children.push_back(std::move(tree));
        tree = std::move(wrapper);
      }
    }
    catalog.dtd = wrap_dtd(catalog.dtd, default_wrapper_label, top_level);
  }

  std::vector<std::string> problems;
  ConformanceChecker checker(catalog.dtd);
  for (std::size_t i = 0; i < trees.size(); ++i) {
    try {
      XmlDocument doc = XmlDocument::from_source(trees[i], catalog.dtd);
      for (const auto& d : checker.diagnostics(doc)) problems.push_back(catalog.sources[i] + ": " + d);
      catalog.documents.push_back(std::move(doc));
    } catch (const DocumentError& e) {
      problems.push_back(catalog.sources[i] + ": " + e.what());
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return catalog;
}

Catalog load_catalog(const fs::path& manifest) {
  json j;
  try {
    j = json::parse(read_file(manifest));
  } catch (const json::parse_error& e) {
    throw Error("invalid catalog manifest '" + manifest.string() + "': " + e.what());
  }
  auto text_field = [&](const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
      throw Error("catalog manifest '" + manifest.string() + "' needs a string field '" + key + "'");
    }
    return j[key].get<std::string>();
  };
  const fs::path base = manifest.parent_path();
  std::string name = text_field("name");
  std::string dtd_path = text_field("dtd");
  std::string root = text_field("root");
  if (!j.contains("documents") || !j["documents"].is_array()) {
    throw Error("catalog manifest '" + manifest.string() + "' needs an array field 'documents'");
  }
  std::vector<std::pair<std::string, std::string>> documents;
  for (const auto& entry : j["documents"]) {
    if (!entry.is_string()) throw Error("catalog manifest '" + manifest.string() + "' lists a non-string document");
    auto path = entry.get<std::string>();
    documents.emplace_back(path, read_file(base / path));
  }
  return make_catalog(std::move(name), read_file(base / dtd_path), root, documents);
}

const Catalog* Database::find_catalog(std::string_view name) const {
  auto it = std::find_if(catalogs.begin(), catalogs.end(), [&](const Catalog& c) { return c.name == name; });
  return it == catalogs.end() ? nullptr : &*it;
}

const Ontology* Database::find_ontology(std::string_view name) const {
  auto it = std::find_if(ontologies.begin(), ontologies.end(), [&](const Ontology& o) { return o.name == name; });
  return it == ontologies.end() ? nullptr : &*it;
}

namespace {

std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Database load_database(const fs::path& data_dir) {
  Database db;
  for (const auto& manifest : json_files(data_dir / "catalogs")) {
    Catalog catalog = load_catalog(manifest);
    if (db.find_catalog(catalog.name)) throw Error("duplicate catalog name '" + catalog.name + "'");
    db.catalogs.push_back(std::move(catalog));
  }
  for (const auto& file : json_files(data_dir / "ontologies")) {
    Ontology o = parse_ontology(read_file(file));
    if (db.find_ontology(o.name)) throw Error("duplicate ontology name '" + o.name + "'");
    db.ontologies.push_back(std::move(o));
  }
  return db;
}

}  // namespace equix

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "equix/document.hpp"
#include "equix/dtd.hpp"
#include "equix/ontology.hpp"

namespace equix {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// A DTD with documents that strictly conform to it. When some document has
// several top-level elements, every document is wrapped under the default
// wrapper label and the DTD is wrapped to match.
struct Catalog {
  std::string name;
  Dtd dtd;
  std::vector<XmlDocument> documents;
  // Document file paths as written in the manifest.
  std::vector<std::string> sources;
};

// Builds a catalog from DTD text and document texts. Throws ValidationError
// listing every conformance diagnostic.
Catalog make_catalog(std::string name, std::string_view dtd_text, const std::string& root,
                     const std::vector<std::pair<std::string, std::string>>& documents);

// Manifest JSON {"name", "dtd", "root", "documents"}; paths are relative to
// the manifest's directory.
Catalog load_catalog(const std::filesystem::path& manifest);

// Catalog manifests under `data_dir`/catalogs and ontologies under
// `data_dir`/ontologies, each sorted by file name. Missing directories are
// treated as empty.
struct Database {
  std::vector<Catalog> catalogs;
  std::vector<Ontology> ontologies;

  const Catalog* find_catalog(std::string_view name) const;
  const Ontology* find_ontology(std::string_view name) const;
};

Database load_database(const std::filesystem::path& data_dir);

}  // namespace equix

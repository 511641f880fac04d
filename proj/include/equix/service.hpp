#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "equix/catalog.hpp"
#include "equix/query.hpp"

namespace equix {

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

struct StoredDocument {
  // "catalog/<name>/<path>" or "result/<id>/<index>".
  std::string source;
  std::string file;
  std::string xml;
};

struct ResultSetRecord {
  std::string id;
  // Catalog name or parent result-set id.
  std::string origin;
  bool origin_is_result = false;
  std::string query;
  QueryMode mode = QueryMode::strict;
  std::string ontology;
  std::string created_at;
  std::vector<StoredDocument> documents;
  // Strict mode only.
  std::optional<std::string> result_dtd;
  std::string root;
};

// SHA-256 of `data` as lowercase hex.
std::string sha256_hex(std::string_view data);

// Structured view of a DTD for form building.
nlohmann::json dtd_to_json(const Dtd& dtd);

// Catalog browsing, evaluation and the persisted result store under a data
// directory. Result sets live in results/<id>/ and are indexed on startup.
// Safe for concurrent use.
class Service {
 public:
  static constexpr std::size_t default_page_size = 50;

  explicit Service(std::filesystem::path data_dir);

  // Rescans catalogs and ontologies from disk.
  ServiceResponse reload();

  ServiceResponse list_catalogs() const;
  ServiceResponse catalog_dtd(const std::string& name) const;
  ServiceResponse list_ontologies() const;
  ServiceResponse query_catalog(const std::string& name, const std::string& body);
  ServiceResponse query_result(const std::string& id, const std::string& body);
  ServiceResponse get_result(const std::string& id) const;
  ServiceResponse result_documents(const std::string& id, std::size_t page,
                                   std::size_t size = default_page_size) const;
  ServiceResponse result_dtd(const std::string& id) const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  struct Pool {
    std::vector<XmlDocument> documents;
    std::vector<std::string> sources;
  };

  ServiceResponse create(const std::string& origin, bool origin_is_result, const std::string& body);
  std::optional<ResultSetRecord> find(const std::string& id) const;
  void load_results();
  void persist(const ResultSetRecord& record) const;

  std::filesystem::path data_dir_;
  mutable std::shared_mutex mutex_;
  Database database_;
  std::map<std::string, ResultSetRecord> results_;
};

}  // namespace equix

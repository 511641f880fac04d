#include "equix/service.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <mutex>
#include <random>

#include "equix/engine.hpp"
#include "equix/error.hpp"

namespace equix {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

json dtd_to_json(const Dtd& dtd) {
  json elements = json::array();
  for (const auto& name : dtd.element_names()) {
    const ContentModel& content = dtd.content(name);
    bool any = content.kind == ContentModel::Kind::any;
    json attributes = json::array();
    for (const auto& a : dtd.attributes(name)) {
      attributes.push_back({{"name", a.name},
                            {"type", a.type == AttrType::id ? "ID" : a.type == AttrType::idref ? "IDREF" : "CDATA"},
                            {"required", a.presence == AttrPresence::required}});
    }
    std::string rendered = to_string(content);
    elements.push_back({{"name", name},
                        {"content", rendered},
                        {"children", any ? dtd.element_names() : referenced_names(content)},
                        {"text", any || rendered.find("#PCDATA") != std::string::npos},
                        {"attributes", std::move(attributes)}});
  }
  return {{"root", dtd.root_element()}, {"elements", std::move(elements)}, {"text", to_dtd_text(dtd)}};
}

namespace {

constexpr std::size_t id_length = 16;
constexpr std::size_t max_page_size = 1000;

ServiceResponse error(int status, std::string message, std::vector<std::string> diagnostics = {}) {
  return {status, {{"code", status}, {"message", std::move(message)}, {"diagnostics", std::move(diagnostics)}}};
}

std::string now_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string_view mode_name(QueryMode mode) { return mode == QueryMode::strict ? "strict" : "ontology"; }

json summary(const ResultSetRecord& r) {
  json out{{"id", r.id},
           {"origin", r.origin},
           {"origin_kind", r.origin_is_result ? "result" : "catalog"},
           {"mode", mode_name(r.mode)},
           {"query", json::parse(r.query)},
           {"created_at", r.created_at},
           {"root", r.root},
           {"document_count", r.documents.size()},
           {"result_dtd", r.result_dtd ? json(*r.result_dtd) : json(nullptr)}};
  if (r.mode == QueryMode::ontology) out["ontology"] = r.ontology;
  return out;
}

json manifest_of(const ResultSetRecord& r) {
  json documents = json::array();
  for (const auto& d : r.documents) documents.push_back({{"source", d.source}, {"file", d.file}});
  json out = summary(r);
  out.erase("document_count");
  out["result_dtd"] = r.result_dtd ? json("result.dtd") : json(nullptr);
  out["documents"] = std::move(documents);
  return out;
}

ResultSetRecord read_record(const fs::path& dir) {
  json m = json::parse(read_file(dir / "manifest.json"));
  ResultSetRecord r;
  r.id = m.at("id").get<std::string>();
  r.origin = m.at("origin").get<std::string>();
  r.origin_is_result = m.at("origin_kind").get<std::string>() == "result";
  r.query = m.at("query").dump(2);
  r.mode = m.at("mode").get<std::string>() == "ontology" ? QueryMode::ontology : QueryMode::strict;
  if (m.contains("ontology")) r.ontology = m["ontology"].get<std::string>();
  r.created_at = m.at("created_at").get<std::string>();
  r.root = m.at("root").get<std::string>();
  if (!m.at("result_dtd").is_null()) r.result_dtd = read_file(dir / m["result_dtd"].get<std::string>());
  for (const auto& d : m.at("documents")) {
    StoredDocument doc{d.at("source").get<std::string>(), d.at("file").get<std::string>(), {}};
    doc.xml = read_file(dir / doc.file);
    r.documents.push_back(std::move(doc));
  }
  return r;
}

}  // namespace

Service::Service(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  database_ = load_database(data_dir_);
  load_results();
}

void Service::load_results() {
  const fs::path root = data_dir_ / "results";
  if (!fs::is_directory(root)) return;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "manifest.json")) continue;
    try {
      ResultSetRecord r = read_record(entry.path());
      if (r.id == entry.path().filename().string()) results_.emplace(r.id, std::move(r));
    } catch (const std::exception&) {
      // Incomplete or foreign directories are not result sets.
    }
  }
}

ServiceResponse Service::reload() {
  try {
    Database fresh = load_database(data_dir_);
    std::unique_lock lock(mutex_);
    database_ = std::move(fresh);
  } catch (const ValidationError& e) {
    return error(422, e.what(), e.diagnostics());
  } catch (const Error& e) {
    return error(500, e.what());
  }
  return list_catalogs();
}

ServiceResponse Service::list_catalogs() const {
  std::shared_lock lock(mutex_);
  json out = json::array();
  for (const auto& c : database_.catalogs) {
    out.push_back({{"name", c.name}, {"root", c.dtd.root_element()}, {"documents", c.documents.size()}});
  }
  return {200, std::move(out)};
}

ServiceResponse Service::catalog_dtd(const std::string& name) const {
  std::shared_lock lock(mutex_);
  const Catalog* c = database_.find_catalog(name);
  if (!c) return error(404, "unknown catalog '" + name + "'");
  return {200, dtd_to_json(c->dtd)};
}

ServiceResponse Service::list_ontologies() const {
  std::shared_lock lock(mutex_);
  json out = json::array();
  for (const auto& o : database_.ontologies) out.push_back({{"name", o.name}, {"terms", o.terms}});
  return {200, std::move(out)};
}

ServiceResponse Service::query_catalog(const std::string& name, const std::string& body) {
  return create(name, false, body);
}

ServiceResponse Service::query_result(const std::string& id, const std::string& body) {
  return create(id, true, body);
}

std::optional<ResultSetRecord> Service::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = results_.find(id);
  if (it == results_.end()) return std::nullopt;
  return it->second;
}

ServiceResponse Service::create(const std::string& origin, bool origin_is_result, const std::string& body) {
  std::optional<QuerySpec> parsed;
  try {
    parsed = parse_query_file(body);
  } catch (const QuerySchemaError& e) {
    auto response = error(400, "malformed query", {e.what()});
    response.body["pointer"] = e.pointer();
    return response;
  } catch (const Error& e) {
    return error(400, "malformed query", {e.what()});
  }
  const QuerySpec& spec = *parsed;
  const std::string canonical = serialize_query(spec);
  const std::string id =
      sha256_hex(std::string(origin_is_result ? "result:" : "catalog:") + origin + "\n" + canonical).substr(0, id_length);
  if (auto existing = find(id)) return {200, summary(*existing)};

  ResultSetRecord record;
  record.id = id;
  record.origin = origin;
  record.origin_is_result = origin_is_result;
  record.query = canonical;
  record.mode = spec.mode;
  record.ontology = spec.ontology;
  record.created_at = now_utc();

  RunResult run;
  try {
    const AbstractQuery q = spec.abstract();
    Pool pool;
    std::optional<Dtd> target_dtd;
    std::shared_lock lock(mutex_);
    if (origin_is_result) {
      auto it = results_.find(origin);
      if (it == results_.end()) return error(404, "unknown result set '" + origin + "'");
      const ResultSetRecord& parent = it->second;
      if (parent.result_dtd) target_dtd = parse_dtd(*parent.result_dtd, parent.root);
      if (spec.mode == QueryMode::strict && !target_dtd) {
        return error(422, "result set '" + origin + "' was evaluated in ontology mode and has no result DTD",
                     {"strict requery needs a result DTD"});
      }
      for (std::size_t i = 0; i < parent.documents.size(); ++i) {
        const auto& xml = parent.documents[i].xml;
        pool.documents.push_back(target_dtd ? parse_document(xml, *target_dtd) : parse_document(xml));
        pool.sources.push_back("result/" + origin + "/" + std::to_string(i + 1));
      }
    } else {
      const Catalog* catalog = database_.find_catalog(origin);
      if (!catalog) return error(404, "unknown catalog '" + origin + "'");
      target_dtd = catalog->dtd;
      auto add = [&](const Catalog& c) {
        for (std::size_t i = 0; i < c.documents.size(); ++i) {
          pool.documents.push_back(c.documents[i]);
          pool.sources.push_back("catalog/" + c.name + "/" + c.sources[i]);
        }
      };
      if (spec.mode == QueryMode::strict) {
        add(*catalog);
      } else {
        // Ontology queries range over every catalog.
        for (const auto& c : database_.catalogs) add(c);
      }
    }

    if (spec.mode == QueryMode::strict) {
      run = run_strict(q, *target_dtd, pool.documents);
      record.root = target_dtd->root_element();
      record.result_dtd = run.result_dtd_text;
    } else {
      const Ontology* ontology = database_.find_ontology(spec.ontology);
      if (!ontology) return error(422, "unknown ontology '" + spec.ontology + "'", {"unknown ontology"});
      Pool describable;
      for (std::size_t i = 0; i < pool.documents.size(); ++i) {
        if (!describable_by(pool.documents[i], *ontology)) continue;
        describable.documents.push_back(std::move(pool.documents[i]));
        describable.sources.push_back(std::move(pool.sources[i]));
      }
      pool = std::move(describable);
      run = run_reg(q, *ontology, pool.documents);
      record.root = q.node(q.root()).label;
    }
    for (std::size_t i = 0; i < run.documents.size(); ++i) {
      const auto& d = run.documents[i];
      record.documents.push_back(
          StoredDocument{pool.sources[d.source_index], "doc-" + std::to_string(i + 1) + ".xml", d.xml});
    }
  } catch (const ValidationError& e) {
    return error(422, "query does not fit its target", e.diagnostics());
  } catch (const Error& e) {
    return error(422, e.what(), {e.what()});
  }

  persist(record);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = results_.emplace(id, std::move(record));
  return {inserted ? 201 : 200, summary(it->second)};
}

void Service::persist(const ResultSetRecord& record) const {
  const fs::path root = data_dir_ / "results";
  fs::create_directories(root);
  const fs::path final_dir = root / record.id;
  if (fs::exists(final_dir / "manifest.json")) return;

  std::random_device device;
  const fs::path staging = root / (record.id + ".tmp-" + std::to_string(device()));
  fs::create_directories(staging);
  for (const auto& d : record.documents) write_file(staging / d.file, d.xml);
  if (record.result_dtd) write_file(staging / "result.dtd", *record.result_dtd);
  write_file(staging / "manifest.json", manifest_of(record).dump(2) + "\n");

  std::error_code ec;
  fs::rename(staging, final_dir, ec);
  // Another request stored the same content-addressed set first.
  if (ec) fs::remove_all(staging);
}

ServiceResponse Service::get_result(const std::string& id) const {
  auto r = find(id);
  if (!r) return error(404, "unknown result set '" + id + "'");
  return {200, summary(*r)};
}

ServiceResponse Service::result_documents(const std::string& id, std::size_t page, std::size_t size) const {
  if (size == 0 || size > max_page_size) {
    return error(400, "page size must be between 1 and " + std::to_string(max_page_size));
  }
  auto r = find(id);
  if (!r) return error(404, "unknown result set '" + id + "'");
  json documents = json::array();
  const std::size_t total = r->documents.size();
  const std::size_t first = page <= total / size ? page * size : total;
  for (std::size_t i = first; i < total && i < first + size; ++i) {
    const auto& d = r->documents[i];
    documents.push_back({{"index", i}, {"source", d.source}, {"xml", d.xml}});
  }
  return {200, {{"id", id}, {"page", page}, {"size", size}, {"total", total}, {"documents", std::move(documents)}}};
}

ServiceResponse Service::result_dtd(const std::string& id) const {
  auto r = find(id);
  if (!r) return error(404, "unknown result set '" + id + "'");
  if (!r->result_dtd) {
    return error(404, "result set '" + id + "' was evaluated in ontology mode and has no result DTD");
  }
  return {200, dtd_to_json(parse_dtd(*r->result_dtd, r->root))};
}

}  // namespace equix

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "equix/aggregation.hpp"
#include "equix/catalog.hpp"
#include "equix/engine.hpp"
#include "equix/error.hpp"
#include "equix/http.hpp"
#include "equix/result_dtd.hpp"
#include "equix/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace equix;

namespace {

enum Exit : int { ok = 0, failure = 1, invalid = 2, oracle_mismatch = 3 };

fs::path default_data_dir() {
  const char* env = std::getenv("EQUIX_DATA_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("data");
}

// A manifest path, or the name of a catalog in the data directory.
Catalog resolve_catalog(const std::string& catalog, const fs::path& data_dir) {
  if (fs::is_regular_file(catalog)) return load_catalog(catalog);
  Database db = load_database(data_dir);
  if (const Catalog* c = db.find_catalog(catalog)) return *c;
  throw Error("no catalog manifest or catalog named '" + catalog + "' in '" + data_dir.string() + "'");
}

void print_diagnostics(const ValidationError& e) {
  std::cerr << "validation failed:\n";
  for (const auto& d : e.diagnostics()) std::cerr << "  " << d << "\n";
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string summary_as_xml(const json& s) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<summary catalog=\"" +
                    xml_escape(s["catalog"].get<std::string>()) + "\" mode=\"" +
                    xml_escape(s["mode"].get<std::string>()) + "\" documents=\"" +
                    std::to_string(s["documents"].get<std::size_t>()) + "\"";
  if (!s["result_dtd"].is_null()) out += " result-dtd=\"" + xml_escape(s["result_dtd"].get<std::string>()) + "\"";
  if (s.contains("ontology")) out += " ontology=\"" + xml_escape(s["ontology"].get<std::string>()) + "\"";
  if (!s["oracle"].is_null()) out += " oracle=\"" + xml_escape(s["oracle"].get<std::string>()) + "\"";
  out += ">\n";
  for (const auto& r : s["results"]) {
    out += "  <result file=\"" + xml_escape(r["file"].get<std::string>()) + "\" source=\"" +
           xml_escape(r["source"].get<std::string>()) + "\" output-nodes=\"" +
           std::to_string(r["output_nodes"].get<std::size_t>()) + "\"/>\n";
  }
  return out + "</summary>\n";
}

struct QueryArgs {
  std::string catalog;
  std::string query;
  std::string out;
  std::string mode;
  std::string format = "json";
  std::string data_dir;
  bool oracle = false;
  bool agg = false;
};

int cmd_query(const QueryArgs& args) {
  const fs::path data_dir = args.data_dir.empty() ? default_data_dir() : fs::path(args.data_dir);
  QuerySpec spec = parse_query_file(read_file(args.query));
  if (args.mode == "ontology") spec.mode = QueryMode::ontology;
  if (args.mode == "strict") spec.mode = QueryMode::strict;
  const AbstractQuery q = spec.abstract();

  RunOptions options;
  options.aggregation = args.agg;
  options.oracle = args.oracle;
  if (!args.agg && has_aggregation(q)) std::cerr << "note: aggregation annotations ignored without --agg\n";

  Catalog catalog = resolve_catalog(args.catalog, data_dir);
  std::vector<XmlDocument> pool;
  std::vector<std::string> sources;
  RunResult result;
  if (spec.mode == QueryMode::strict) {
    pool = catalog.documents;
    sources = catalog.sources;
    result = run_strict(q, catalog.dtd, pool, options);
  } else {
    Database db = load_database(data_dir);
    if (spec.ontology.empty()) throw ValidationError({"ontology mode needs an \"ontology\" name in the query"});
    const Ontology* ontology = db.find_ontology(spec.ontology);
    if (!ontology) throw ValidationError({"unknown ontology '" + spec.ontology + "'"});
    // Ontology queries range over every catalog of the data directory.
    if (!db.find_catalog(catalog.name)) db.catalogs.push_back(catalog);
    for (const auto& c : db.catalogs) {
      for (std::size_t i = 0; i < c.documents.size(); ++i) {
        if (!describable_by(c.documents[i], *ontology)) continue;
        pool.push_back(c.documents[i]);
        sources.push_back(c.name + "/" + c.sources[i]);
      }
    }
    result = run_reg(q, *ontology, pool, options);
  }

  const fs::path out = args.out;
  fs::create_directories(out);
  json summary{{"catalog", catalog.name},
               {"mode", spec.mode == QueryMode::strict ? "strict" : "ontology"},
               {"documents", result.documents.size()},
               {"results", json::array()},
               {"result_dtd", nullptr},
               {"oracle", nullptr}};
  for (std::size_t i = 0; i < result.documents.size(); ++i) {
    const auto& d = result.documents[i];
    std::string file = "result-" + std::to_string(i + 1) + ".xml";
    write_file(out / file, d.xml);
    summary["results"].push_back({{"file", file}, {"source", sources[d.source_index]}, {"output_nodes", d.output_nodes}});
  }
  if (result.result_dtd) {
    write_file(out / "result.dtd", result.result_dtd_text);
    summary["result_dtd"] = "result.dtd";
  } else {
    summary["ontology"] = result.ontology;
  }
  if (options.oracle) summary["oracle"] = result.oracle.line();
  write_file(out / "summary.json", summary.dump(2) + "\n");

  std::cout << (args.format == "xml" ? summary_as_xml(summary) : summary.dump(2) + "\n");
  if (options.oracle) std::cout << result.oracle.line() << "\n";
  return result.oracle.status == OracleReport::Status::mismatch ? oracle_mismatch : ok;
}

struct ValidateArgs {
  std::string catalog;
  std::string query;
  std::string data_dir;
};

int cmd_validate(const ValidateArgs& args) {
  const fs::path data_dir = args.data_dir.empty() ? default_data_dir() : fs::path(args.data_dir);
  Catalog catalog = resolve_catalog(args.catalog, data_dir);
  std::cout << "catalog '" << catalog.name << "': " << catalog.documents.size()
            << " documents strictly conform\n";
  if (args.query.empty()) return ok;

  QuerySpec spec = parse_query_file(read_file(args.query));
  const AbstractQuery q = spec.abstract();
  std::vector<std::string> diagnostics;
  if (spec.mode == QueryMode::strict) {
    diagnostics = validate_query_against_dtd(q, catalog.dtd);
  } else {
    Database db = load_database(data_dir);
    const Ontology* ontology = db.find_ontology(spec.ontology);
    if (!ontology) {
      diagnostics.push_back("unknown ontology '" + spec.ontology + "'");
    } else {
      diagnostics = validate_query_against_ontology(q, *ontology);
    }
  }
  for (const auto& d : validate_aggregation(q)) diagnostics.push_back(d);
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  std::cout << "query '" << args.query << "' is valid\n";
  return ok;
}

struct DtdArgs {
  std::string catalog;
  std::string query;
  std::string data_dir;
  bool as_json = false;
};

int cmd_dtd(const DtdArgs& args) {
  const fs::path data_dir = args.data_dir.empty() ? default_data_dir() : fs::path(args.data_dir);
  Catalog catalog = resolve_catalog(args.catalog, data_dir);
  Dtd dtd = catalog.dtd;
  if (!args.query.empty()) {
    const AbstractQuery q = parse_query_file(read_file(args.query)).abstract();
    auto diagnostics = validate_query_against_dtd(q, catalog.dtd);
    for (const auto& d : validate_aggregation(q)) diagnostics.push_back(d);
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
    dtd = create_result_dtd(q, catalog.dtd).dtd;
    extend_result_dtd(dtd, q);
  }
  std::cout << (args.as_json ? dtd_to_json(dtd).dump(2) + "\n" : to_dtd_text(dtd));
  return ok;
}

int cmd_serve(const std::string& data_dir_arg, const std::string& host, int port) {
  const fs::path data_dir = data_dir_arg.empty() ? default_data_dir() : fs::path(data_dir_arg);
  if (!fs::is_directory(data_dir)) throw Error("data directory '" + data_dir.string() + "' does not exist");
  Service service(data_dir);
  std::cout << "serving '" << data_dir.string() << "' on http://" << host << ":" << port << std::endl;
  if (!serve(service, host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return failure;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EquiX XML query engine"};
  app.require_subcommand(1);

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Evaluate a query over a catalog and write the results");
  q->add_option("-c,--catalog", query.catalog, "Catalog manifest path or catalog name")->required();
  q->add_option("-q,--query", query.query, "Query JSON file")->required()->check(CLI::ExistingFile);
  q->add_option("-o,--out", query.out, "Output directory")->required();
  q->add_option("--mode", query.mode, "Override the query mode")->check(CLI::IsMember({"strict", "ontology"}));
  q->add_option("--format", query.format, "Summary format on stdout")->check(CLI::IsMember({"json", "xml"}));
  q->add_option("--data-dir", query.data_dir, "Data directory (default $EQUIX_DATA_DIR or ./data)");
  q->add_flag("--oracle", query.oracle, "Cross-check against the brute-force oracle");
  q->add_flag("--agg", query.agg, "Honor aggregation annotations");

  std::string serve_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* s = app.add_subcommand("serve", "Run the HTTP service");
  s->add_option("--data-dir", serve_dir, "Data directory (default $EQUIX_DATA_DIR or ./data)");
  s->add_option("--host", host, "Address to bind");
  s->add_option("-p,--port", port, "Port to listen on")->check(CLI::Range(0, 65535));

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "Check catalog conformance and optionally a query");
  v->add_option("-c,--catalog", validate.catalog, "Catalog manifest path or catalog name")->required();
  v->add_option("-q,--query", validate.query, "Query JSON file to validate")->check(CLI::ExistingFile);
  v->add_option("--data-dir", validate.data_dir, "Data directory (default $EQUIX_DATA_DIR or ./data)");

  DtdArgs dtd;
  auto* d = app.add_subcommand("dtd", "Print a catalog DTD or the result DTD of a query");
  d->add_option("-c,--catalog", dtd.catalog, "Catalog manifest path or catalog name")->required();
  d->add_option("-q,--query", dtd.query, "Print the result DTD of this query")->check(CLI::ExistingFile);
  d->add_option("--data-dir", dtd.data_dir, "Data directory (default $EQUIX_DATA_DIR or ./data)");
  d->add_flag("--json", dtd.as_json, "Structured JSON instead of DTD text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : failure;
  }

  try {
    if (*q) return cmd_query(query);
    if (*s) return cmd_serve(serve_dir, host, port);
    if (*v) return cmd_validate(validate);
    if (*d) return cmd_dtd(dtd);
  } catch (const ValidationError& e) {
    print_diagnostics(e);
    return invalid;
  } catch (const QuerySchemaError& e) {
    std::cerr << "error: malformed query: " << e.what() << "\n";
    return invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return failure;
}

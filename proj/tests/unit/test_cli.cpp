#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <random>
#include <sys/wait.h>

#include "equix/catalog.hpp"
#include "equix/engine.hpp"
#include "fixture.hpp"

using namespace equix;
using namespace equix::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string output;
};

// Runs the equix binary with stderr folded into the captured output.
Outcome run(const std::string& args) {
  const std::string command = std::string(EQUIX_BINARY) + " " + args + " 2>&1";
  Outcome out;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer{};
  while (std::size_t n = std::fread(buffer.data(), 1, buffer.size(), pipe)) out.output.append(buffer.data(), n);
  const int raw = pclose(pipe);
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("equix-cli-" + std::to_string(std::random_device{}()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

std::string manifest() { return (fixture_dir() / "catalogs" / "movies.json").string(); }
std::string query(const char* name) { return (fixture_dir() / "movies" / "queries" / name).string(); }

}  // namespace

TEST_CASE("query writes results, the result DTD and a summary") {
  TempDir out;
  const Outcome o = run("query -c " + manifest() + " -q " + query("redford_not_villain.json") + " -o " +
                        out.path.string() + " --oracle");
  CHECK(o.status == 0);
  CHECK(o.output.find("oracle: MATCH (3 documents)") != std::string::npos);
  CHECK(fs::exists(out.path / "result-1.xml"));
  CHECK_FALSE(fs::exists(out.path / "result-2.xml"));
  CHECK(fs::exists(out.path / "result.dtd"));

  const auto summary = nlohmann::json::parse(read_file(out.path / "summary.json"));
  CHECK(summary["documents"] == 1);
  CHECK(summary["results"][0]["output_nodes"] == 4);

  // Same bytes as the library run.
  const Catalog catalog = movies_catalog();
  const RunResult run = run_strict(fixture_query("redford_not_villain").abstract(), catalog.dtd, catalog.documents);
  CHECK(read_file(out.path / "result-1.xml") == run.documents.front().xml);
  CHECK(read_file(out.path / "result.dtd") == run.result_dtd_text);
}

TEST_CASE("aggregation needs the flag") {
  TempDir plain;
  const Outcome without = run("query -c " + manifest() + " -q " + query("character_count.json") + " -o " +
                              plain.path.string());
  CHECK(without.status == 0);
  CHECK(without.output.find("aggregation annotations ignored") != std::string::npos);
  CHECK(read_file(plain.path / "result-1.xml").find("equix-agg") == std::string::npos);

  TempDir agg;
  const Outcome with = run("query -c " + manifest() + " -q " + query("character_count.json") + " -o " +
                           agg.path.string() + " --agg --format xml");
  CHECK(with.status == 0);
  CHECK(with.output.find("<summary catalog=\"movies\"") != std::string::npos);
  CHECK(read_file(agg.path / "result-1.xml").find("<equix-agg fn=\"count\"") != std::string::npos);
  CHECK(read_file(agg.path / "result.dtd").find("equix-agg") != std::string::npos);
}

TEST_CASE("catalogs resolve by name through the data directory") {
  TempDir out;
  const Outcome o = run("query -c movies --data-dir " + fixture_dir().string() + " -q " + query("film_titles.json") +
                        " -o " + out.path.string());
  CHECK(o.status == 0);
  CHECK(fs::exists(out.path / "result-1.xml"));
  CHECK_FALSE(fs::exists(out.path / "result.dtd"));
  CHECK(nlohmann::json::parse(read_file(out.path / "summary.json"))["ontology"] == "film");
}

TEST_CASE("exit codes") {
  TempDir dir;
  write_file(dir.path / "wrong_root.json", R"({"label": "movie", "output": true})");
  const Outcome invalid = run("query -c " + manifest() + " -q " + (dir.path / "wrong_root.json").string() + " -o " +
                              (dir.path / "out").string());
  CHECK(invalid.status == 2);
  CHECK(invalid.output.find("does not match the DTD root") != std::string::npos);

  write_file(dir.path / "malformed.json", R"({"label": 3})");
  CHECK(run("query -c " + manifest() + " -q " + (dir.path / "malformed.json").string() + " -o " +
            (dir.path / "out").string())
            .status == 2);
  CHECK(run("query -c missing-catalog --data-dir " + dir.path.string() + " -q " + query("wild_west.json") + " -o " +
            (dir.path / "out").string())
            .status == 1);
  CHECK(run("bogus").status == 1);
  CHECK(run("--help").status == 0);
}

TEST_CASE("validate and dtd") {
  const Outcome valid = run("validate -c " + manifest() + " -q " + query("redford_not_villain.json"));
  CHECK(valid.status == 0);
  CHECK(valid.output.find("3 documents strictly conform") != std::string::npos);

  const Outcome dtd = run("dtd -c " + manifest());
  CHECK(dtd.status == 0);
  CHECK(dtd.output.find("<!ELEMENT movieInfo (movie+,actor+)>") != std::string::npos);

  const Outcome result = run("dtd -c " + manifest() + " -q " + query("redford_not_villain.json"));
  CHECK(result.status == 0);
  CHECK(result.output.find("<!ELEMENT movie (descr?,title?)>") != std::string::npos);
  CHECK(result.output.find("actor") == std::string::npos);

  const Outcome structured = run("dtd -c " + manifest() + " --json");
  CHECK(nlohmann::json::parse(structured.output)["root"] == "movieInfo");
}

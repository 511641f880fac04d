#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equix/document.hpp"
#include "equix/dtd.hpp"
#include "equix/evaluator.hpp"
#include "equix/ontology.hpp"
#include "equix/query.hpp"

namespace equix {

struct RunOptions {
  // Honor agg/having annotations; when false they are ignored.
  bool aggregation = true;
  // Cross-check every document against the brute-force oracle.
  bool oracle = false;
  BruteForceBounds bounds{64, 8, 20'000'000};
};

struct ResultDocument {
  std::size_t source_index = 0;
  XmlDocument document;
  std::string xml;
  std::size_t output_nodes = 0;
};

struct OracleReport {
  enum class Status { not_run, match, mismatch, skipped };
  Status status = Status::not_run;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<std::string> mismatches;

  // "oracle: MATCH", "oracle: SKIPPED (...)" or "oracle: MISMATCH (...)".
  std::string line() const;
};

struct RunResult {
  std::vector<ResultDocument> documents;
  // Strict mode only.
  std::optional<Dtd> result_dtd;
  std::string result_dtd_text;
  // Ontology mode only.
  std::string ontology;
  OracleReport oracle;
};

// Strict evaluation over documents conforming to `dtd`. Throws
// ValidationError when the query does not fit the DTD.
RunResult run_strict(const AbstractQuery& q, const Dtd& dtd, std::span<const XmlDocument> documents,
                     const RunOptions& options = {});

// Descendant-edge evaluation over the documents describable by `ontology`;
// `documents` should already be filtered. Throws ValidationError.
RunResult run_reg(const AbstractQuery& q, const Ontology& ontology, std::span<const XmlDocument> documents,
                  const RunOptions& options = {});

}  // namespace equix

#include "equix/engine.hpp"

#include "equix/aggregation.hpp"
#include "equix/error.hpp"
#include "equix/result_dtd.hpp"

namespace equix {

std::string OracleReport::line() const {
  switch (status) {
    case Status::not_run:
      return "oracle: not run";
    case Status::match:
      return "oracle: MATCH (" + std::to_string(checked) + " documents)";
    case Status::skipped:
      return "oracle: SKIPPED (" + std::to_string(skipped) + " of " + std::to_string(checked + skipped) +
             " documents exceed the brute-force bounds)";
    case Status::mismatch: {
      std::string out = "oracle: MISMATCH (";
      for (std::size_t i = 0; i < mismatches.size(); ++i) out += (i ? ", " : "") + mismatches[i];
      return out + ")";
    }
  }
  return {};
}

namespace {

using Evaluator = Evaluation (*)(const XmlDocument&, const AbstractQuery&, const TextCache&);

RunResult run(const AbstractQuery& q, std::span<const XmlDocument> documents, const RunOptions& options,
              Evaluator evaluator, EdgeSemantics semantics) {
  const bool aggregate = options.aggregation && has_aggregation(q);
  RunResult result;
  auto& oracle = result.oracle;

  for (std::size_t i = 0; i < documents.size(); ++i) {
    const XmlDocument& doc = documents[i];
    TextCache text(doc);
    Evaluation evaluation = evaluator(doc, q, text);

    if (options.oracle) {
      try {
        OutputSet expected = brute_force_output_set(doc, q, semantics, options.bounds);
        ++oracle.checked;
        if (expected != evaluation.output) oracle.mismatches.push_back("document " + std::to_string(i));
      } catch (const BoundExceeded&) {
        ++oracle.skipped;
      }
    }

    std::vector<GroupAggregate> aggregates;
    OutputSet output = evaluation.output;
    if (aggregate) {
      aggregates = compute_aggregates(doc, q, evaluation.retrieval, text);
      output = apply_agg_constraints(doc, q, evaluation.retrieval, aggregates);
    }
    if (output.empty()) continue;

    Projection projection = project_with_source(doc, output);
    XmlDocument projected =
        aggregate ? inject_aggregates(projection, doc, q, aggregates) : std::move(projection.document);
    std::string xml = to_xml(projected);
    result.documents.push_back(ResultDocument{i, std::move(projected), std::move(xml), output.out.size()});
  }

  if (options.oracle) {
    if (!oracle.mismatches.empty()) {
      oracle.status = OracleReport::Status::mismatch;
    } else if (oracle.skipped > 0) {
      oracle.status = OracleReport::Status::skipped;
    } else {
      oracle.status = OracleReport::Status::match;
    }
  }
  return result;
}

void require_valid(std::vector<std::string> diagnostics) {
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
}

}  // namespace

RunResult run_strict(const AbstractQuery& q, const Dtd& dtd, std::span<const XmlDocument> documents,
                     const RunOptions& options) {
  auto diagnostics = validate_query_against_dtd(q, dtd);
  if (options.aggregation) {
    auto more = validate_aggregation(q);
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  }
  require_valid(std::move(diagnostics));

  Dtd result_dtd = create_result_dtd(q, dtd).dtd;
  if (options.aggregation) extend_result_dtd(result_dtd, q);

  Evaluator evaluator = [](const XmlDocument& doc, const AbstractQuery& query, const TextCache& text) {
    return evaluate(doc, query, text);
  };
  RunResult result = run(q, documents, options, evaluator, EdgeSemantics::child);
  result.result_dtd_text = to_dtd_text(result_dtd);
  result.result_dtd = std::move(result_dtd);
  return result;
}

RunResult run_reg(const AbstractQuery& q, const Ontology& ontology, std::span<const XmlDocument> documents,
                  const RunOptions& options) {
  auto diagnostics = validate_query_against_ontology(q, ontology);
  if (options.aggregation) {
    auto more = validate_aggregation(q);
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  }
  require_valid(std::move(diagnostics));

  Evaluator evaluator = [](const XmlDocument& doc, const AbstractQuery& query, const TextCache& text) {
    return evaluate_reg(doc, query, text);
  };
  RunResult result = run(q, documents, options, evaluator, EdgeSemantics::descendant);
  result.ontology = ontology.name;
  return result;
}

}  // namespace equix

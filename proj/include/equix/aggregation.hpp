#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "equix/document.hpp"
#include "equix/dtd.hpp"
#include "equix/evaluator.hpp"
#include "equix/query.hpp"

namespace equix {

inline constexpr std::string_view aggregate_element = "equix-agg";

// Deepest proper ancestor of `n` that is an output node or lies above one.
// Throws ValidationError when there is none.
QueryNodeId grouping_node(const AbstractQuery& q, QueryNodeId n);

// Diagnostics for aggregation annotations that have no grouping node.
std::vector<std::string> validate_aggregation(const AbstractQuery& q);

bool has_aggregation(const AbstractQuery& q);

// Result of an aggregation function. Numbers come from count, sum, avg and
// from min/max over all-numeric groups; min/max over other groups compare
// text.
struct AggValue {
  bool defined = false;
  bool numeric = false;
  double number = 0;
  std::string text;

  static AggValue undefined() { return {}; }
  static AggValue of_number(double v) { return {true, true, v, {}}; }
  static AggValue of_text(std::string v) { return {true, false, 0, std::move(v)}; }

  friend bool operator==(const AggValue&, const AggValue&) = default;
};

// Rendering used in result documents: shortest round-trip decimal form for
// numbers, "undefined" when undefined.
std::string format_value(const AggValue& value);

// Decimal integer or floating-point literal, surrounding whitespace allowed.
std::optional<double> parse_number(std::string_view text);

AggValue aggregate(AggFunction f, const std::vector<std::string>& group);

bool satisfies(const AggValue& value, Comparison op, std::string_view constant);

struct GroupAggregate {
  QueryNodeId node;
  QueryNodeId group_node;
  NodeId group;
  AggFunction function = AggFunction::count;
  AggValue value;
  // Requested through "agg" (as opposed to only being constrained).
  bool displayed = false;
};

// One entry per (annotated node, instance of its grouping node, function),
// ordered by query node, then group instance, then function.
std::vector<GroupAggregate> compute_aggregates(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu,
                                               const TextCache& text);

// Group instances rejected by a HAVING constraint.
std::vector<NodeId> failing_groups(const AbstractQuery& q, const std::vector<GroupAggregate>& aggregates);

// Output set after removing output nodes at or below failing group instances.
OutputSet apply_agg_constraints(const XmlDocument& doc, const AbstractQuery& q, const Matching& mu,
                                const std::vector<GroupAggregate>& aggregates);

// Projected document with one aggregate element appended to every retained
// group instance for each displayed aggregate.
XmlDocument inject_aggregates(const Projection& projection, const XmlDocument& original, const AbstractQuery& q,
                              const std::vector<GroupAggregate>& aggregates);

// Lets grouping elements end with aggregate elements and declares the
// aggregate element unless it is already declared.
void extend_result_dtd(Dtd& dtd, const AbstractQuery& q);

}  // namespace equix

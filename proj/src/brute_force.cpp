#include <algorithm>
#include <bit>
#include <string>

#include "equix/error.hpp"
#include "equix/evaluator.hpp"

namespace equix {

namespace {

using Mask = std::uint64_t;

Mask bit(NodeId x) { return Mask{1} << x.value; }

class Enumerator {
 public:
  Enumerator(const XmlDocument& doc, const AbstractQuery& q, EdgeSemantics semantics, const BruteForceBounds& bounds,
             const std::function<void(const Matching&)>& visit)
      : doc_(doc), q_(q), semantics_(semantics), bounds_(bounds), visit_(visit), text_(doc) {
    prepare();
  }

  void run() {
    if (labelled_[q_.root().value] & bit(doc_.root())) assign(0);
  }

 private:
  void prepare() {
    const std::size_t k = q_.size();
    auto preorder = [&](auto& self, QueryNodeId n) -> void {
      order_.push_back(n);
      for (QueryNodeId c : q_.node(n).children) self(self, c);
    };
    preorder(preorder, q_.root());

    // Query nodes whose subtree is complete once position i is assigned.
    finished_at_.assign(k, {});
    std::vector<std::size_t> position(k);
    for (std::size_t i = 0; i < k; ++i) position[order_[i].value] = i;
    for (const auto& n : q_.nodes()) {
      std::size_t last = position[n.id.value];
      auto extend = [&](auto& self, QueryNodeId m) -> void {
        last = std::max(last, position[m.value]);
        for (QueryNodeId c : q_.node(m).children) self(self, c);
      };
      extend(extend, n.id);
      finished_at_[last].push_back(n.id);
    }

    labelled_.assign(k, 0);
    content_.assign(k, 0);
    label_mask_.assign(k, 0);
    for (const auto& n : q_.nodes()) {
      for (const auto& x : doc_.nodes()) {
        if (!node_matches(doc_, x.id, q_, n.id)) continue;
        labelled_[n.id.value] |= bit(x.id);
        label_mask_[n.id.value] |= bit(x.id);
        if (n.matcher.is_always() || n.matcher(text_(x.id))) content_[n.id.value] |= bit(x.id);
      }
      // A leaf holds exactly where its content condition holds.
      if (n.children.empty()) labelled_[n.id.value] = content_[n.id.value];
    }

    below_.assign(doc_.size(), 0);
    for (const auto& x : doc_.nodes()) {
      if (semantics_ == EdgeSemantics::child) {
        for (NodeId c : x.children) below_[x.id.value] |= bit(c);
      } else {
        for (const auto& y : doc_.nodes()) {
          if (doc_.is_proper_ancestor(x.id, y.id)) below_[x.id.value] |= bit(y.id);
        }
      }
    }
    mu_.assign(k, 0);
  }

  Mask reachable_from(Mask parents) const {
    Mask out = 0;
    for (Mask rest = parents; rest != 0; rest &= rest - 1) out |= below_[std::countr_zero(rest)];
    return out;
  }

  bool holds(QueryNodeId n) const {
    const auto& node = q_.node(n);
    if (node.children.empty()) return true;
    for (Mask rest = mu_[n.value]; rest != 0; rest &= rest - 1) {
      auto x = static_cast<unsigned>(std::countr_zero(rest));
      bool content = (content_[n.value] >> x) & 1;
      bool any = false;
      bool all = true;
      for (QueryNodeId c : node.children) {
        Mask related = below_[x] & label_mask_[c.value];
        bool ok = q_.node(c).quantifier == Quantifier::exists ? (related & mu_[c.value]) != 0
                                                                 : (related & ~mu_[c.value]) == 0;
        any = any || ok;
        all = all && ok;
      }
      bool satisfied = node.op == NodeOperator::conjunction ? content && all : content || any;
      if (!satisfied) return false;
    }
    return true;
  }

  void step() {
    if (++steps_ > bounds_.max_steps) {
      throw BoundExceeded("brute-force search exceeded " + std::to_string(bounds_.max_steps) + " steps");
    }
  }

  void assign(std::size_t i) {
    if (i == order_.size()) {
      emit();
      return;
    }
    QueryNodeId n = order_[i];
    const auto& parent = q_.node(n).parent;
    Mask candidates = parent ? reachable_from(mu_[parent->value]) & labelled_[n.value] : bit(doc_.root());
    // Walk every subset of the candidates, the empty one last.
    Mask subset = candidates;
    while (true) {
      step();
      mu_[n.value] = subset;
      bool ok = true;
      for (QueryNodeId done : finished_at_[i]) {
        if (!holds(done)) {
          ok = false;
          break;
        }
      }
      if (ok) assign(i + 1);
      if (subset == 0 || !parent) break;
      subset = (subset - 1) & candidates;
    }
    mu_[n.value] = 0;
  }

  void emit() {
    Matching mu(q_.size());
    for (std::size_t n = 0; n < q_.size(); ++n) {
      std::vector<NodeId> nodes;
      for (Mask rest = mu_[n]; rest != 0; rest &= rest - 1) {
        nodes.push_back(NodeId{static_cast<std::uint32_t>(std::countr_zero(rest))});
      }
      mu.assign(QueryNodeId{static_cast<std::uint32_t>(n)}, std::move(nodes));
    }
    visit_(mu);
  }

  const XmlDocument& doc_;
  const AbstractQuery& q_;
  EdgeSemantics semantics_;
  const BruteForceBounds& bounds_;
  const std::function<void(const Matching&)>& visit_;
  TextCache text_;

  std::vector<QueryNodeId> order_;
  std::vector<std::vector<QueryNodeId>> finished_at_;
  // Candidates per query node; leaves are already filtered by content.
  std::vector<Mask> labelled_;
  // Every node carrying the query node's label.
  std::vector<Mask> label_mask_;
  std::vector<Mask> content_;
  std::vector<Mask> below_;
  std::vector<Mask> mu_;
  std::uint64_t steps_ = 0;
};

}  // namespace

void for_each_satisfying_matching(const XmlDocument& doc, const AbstractQuery& q, EdgeSemantics semantics,
                                  const BruteForceBounds& bounds, const std::function<void(const Matching&)>& visit) {
  if (doc.size() > 64 || doc.size() > bounds.max_document_nodes) {
    throw BoundExceeded("document has " + std::to_string(doc.size()) + " nodes");
  }
  if (q.size() > bounds.max_query_nodes) throw BoundExceeded("query has " + std::to_string(q.size()) + " nodes");
  Enumerator(doc, q, semantics, bounds, visit).run();
}

OutputSet brute_force_output_set(const XmlDocument& doc, const AbstractQuery& q, const BruteForceBounds& bounds) {
  return brute_force_output_set(doc, q, EdgeSemantics::child, bounds);
}

OutputSet brute_force_output_set(const XmlDocument& doc, const AbstractQuery& q, EdgeSemantics semantics,
                                 const BruteForceBounds& bounds) {
  std::vector<char> seen(doc.size(), 0);
  const auto outputs = q.outputs();
  for_each_satisfying_matching(doc, q, semantics, bounds, [&](const Matching& mu) {
    for (QueryNodeId o : outputs) {
      for (NodeId x : mu[o]) seen[x.value] = 1;
    }
  });
  std::vector<NodeId> out;
  for (std::uint32_t i = 0; i < doc.size(); ++i) {
    if (seen[i]) out.push_back(NodeId{i});
  }
  return close_output_set(doc, std::move(out));
}

}  // namespace equix

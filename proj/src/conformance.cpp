#include <algorithm>
#include <string>
#include <vector>

#include "equix/dtd.hpp"

namespace equix {

using Kind = ContentModel::Kind;

int ContentAutomaton::add_state() {
  states_.emplace_back();
  return static_cast<int>(states_.size()) - 1;
}

// Thompson construction; returns (entry, exit).
std::pair<int, int> ContentAutomaton::build(const ContentModel& model) {
  int s = add_state();
  int e = add_state();
  switch (model.kind) {
    case Kind::empty:
    case Kind::null:
      states_[s].epsilon.push_back(e);
      break;
    case Kind::pcdata:
      states_[s].epsilon.push_back(e);
      states_[s].symbol = std::string(pcdata_symbol);
      states_[s].next = s;
      break;
    case Kind::any:
      states_[s].epsilon.push_back(e);
      states_[s].wildcard = true;
      states_[s].next = s;
      break;
    case Kind::name:
      states_[s].symbol = model.name;
      states_[s].next = e;
      break;
    case Kind::sequence: {
      int tail = s;
      for (const auto& item : model.items) {
        auto [is, ie] = build(item);
        states_[tail].epsilon.push_back(is);
        tail = ie;
      }
      states_[tail].epsilon.push_back(e);
      break;
    }
    case Kind::choice:
      for (const auto& item : model.items) {
        auto [is, ie] = build(item);
        states_[s].epsilon.push_back(is);
        states_[ie].epsilon.push_back(e);
      }
      break;
    case Kind::optional:
    case Kind::star:
    case Kind::plus: {
      auto [is, ie] = build(model.items.front());
      states_[s].epsilon.push_back(is);
      states_[ie].epsilon.push_back(e);
      if (model.kind != Kind::plus) states_[s].epsilon.push_back(e);
      if (model.kind != Kind::optional) states_[ie].epsilon.push_back(is);
      break;
    }
  }
  return {s, e};
}

ContentAutomaton::ContentAutomaton(const ContentModel& model) {
  auto [s, e] = build(model);
  start_ = s;
  accept_ = e;
}

void ContentAutomaton::close(std::vector<char>& set, std::vector<int>& members) const {
  std::vector<int> work = members;
  while (!work.empty()) {
    int state = work.back();
    work.pop_back();
    for (int next : states_[state].epsilon) {
      if (!set[next]) {
        set[next] = 1;
        members.push_back(next);
        work.push_back(next);
      }
    }
  }
}

bool ContentAutomaton::accepts(std::span<const std::string_view> symbols) const {
  std::vector<char> set(states_.size(), 0);
  std::vector<int> members{start_};
  set[start_] = 1;
  close(set, members);
  for (std::string_view symbol : symbols) {
    std::vector<char> next_set(states_.size(), 0);
    std::vector<int> next_members;
    for (int state : members) {
      const auto& st = states_[state];
      if (st.next < 0 || !(st.wildcard || st.symbol == symbol)) continue;
      if (!next_set[st.next]) {
        next_set[st.next] = 1;
        next_members.push_back(st.next);
      }
    }
    if (next_members.empty()) return false;
    close(next_set, next_members);
    set = std::move(next_set);
    members = std::move(next_members);
  }
  return set[accept_] != 0;
}

bool ContentAutomaton::accepts(std::span<const std::string> symbols) const {
  std::vector<std::string_view> views(symbols.begin(), symbols.end());
  return accepts(std::span<const std::string_view>(views));
}

ConformanceChecker::ConformanceChecker(const Dtd& dtd) : dtd_(&dtd) {
  for (const auto& name : dtd.element_names()) {
    automata_.emplace(name, std::make_shared<const ContentAutomaton>(dtd.content(name)));
  }
}

std::vector<std::string> ConformanceChecker::diagnostics(const XmlDocument& doc) const {
  std::vector<std::string> out;
  const auto& root_label = doc.label(doc.root());
  if (root_label != dtd_->root_element()) {
    out.push_back("root element is '" + root_label + "' but the DTD requires '" + dtd_->root_element() + "'");
  }
  for (const auto& node : doc.nodes()) {
    if (node.kind != NodeKind::element) continue;
    const std::string where = "'" + node.label + "' (node " + std::to_string(node.id.value) + ")";
    auto automaton = automata_.find(node.label);
    if (automaton == automata_.end()) {
      out.push_back("undeclared element " + where);
      continue;
    }
    std::vector<std::string_view> symbols;
    std::vector<std::string_view> present;
    for (NodeId child : node.children) {
      const auto& c = doc.node(child);
      switch (c.kind) {
        case NodeKind::attribute:
          present.push_back(c.label);
          if (dtd_->find_attribute(node.label, c.label) == nullptr) {
            out.push_back("undeclared attribute '" + c.label + "' on " + where);
          }
          break;
        case NodeKind::atomic:
          symbols.push_back(ContentAutomaton::pcdata_symbol);
          break;
        case NodeKind::element:
          symbols.push_back(c.label);
          break;
      }
    }
    if (!automaton->second->accepts(std::span<const std::string_view>(symbols))) {
      out.push_back("content of " + where + " does not match " + to_string(dtd_->content(node.label)));
    }
    for (const auto& decl : dtd_->attributes(node.label)) {
      if (decl.presence == AttrPresence::required &&
          std::find(present.begin(), present.end(), decl.name) == present.end()) {
        out.push_back("missing required attribute '" + decl.name + "' on " + where);
      }
    }
  }
  return out;
}

bool strictly_conforms(const XmlDocument& doc, const Dtd& dtd) { return ConformanceChecker(dtd).strictly_conforms(doc); }

std::vector<std::string> conformance_diagnostics(const XmlDocument& doc, const Dtd& dtd) {
  return ConformanceChecker(dtd).diagnostics(doc);
}

}  // namespace equix

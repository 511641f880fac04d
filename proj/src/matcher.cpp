#include "equix/matcher.hpp"

#include <algorithm>
#include <optional>

#include "equix/error.hpp"
#include "equix/regex.hpp"
#include "utf8.hpp"

namespace equix {

namespace {

bool is_separator(char32_t c) {
  if (c < 0x80) {
    if (c <= 0x20 || c == 0x7F) return true;
    return !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'));
  }
  if (c <= 0xA0 || c == 0x1680 || c == 0x3000 || c == 0xFEFF) return true;
  if (c >= 0x2000 && c <= 0x206F) return true;
  return c == 0x00AB || c == 0x00BB || (c >= 0x3001 && c <= 0x3003);
}

char32_t fold(char32_t c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }

bool contains_sequence(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char32_t c : detail::decode_utf8(text)) {
    if (is_separator(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      detail::append_utf8(current, fold(c));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

struct Matcher::Node {
  Kind kind = Kind::always;
  std::string text;
  std::vector<std::string> words;
  std::optional<Regex> regex;
  std::vector<Matcher> operands;
};

Matcher Matcher::always() {
  static const auto node = std::make_shared<const Node>();
  return Matcher(node);
}

Matcher Matcher::word(std::string word) {
  auto words = tokenize_words(word);
  if (words.size() != 1) throw QuerySchemaError("word matcher needs exactly one word: '" + word + "'", "");
  return Matcher(std::make_shared<const Node>(Node{Kind::word, std::move(word), std::move(words), {}, {}}));
}

Matcher Matcher::phrase(std::string phrase) {
  auto words = tokenize_words(phrase);
  return Matcher(std::make_shared<const Node>(Node{Kind::phrase, std::move(phrase), std::move(words), {}, {}}));
}

Matcher Matcher::regex(std::string pattern) {
  Regex compiled(pattern);
  return Matcher(std::make_shared<const Node>(Node{Kind::regex, std::move(pattern), {}, std::move(compiled), {}}));
}

Matcher Matcher::all_of(std::vector<Matcher> operands) {
  return Matcher(std::make_shared<const Node>(Node{Kind::all_of, {}, {}, {}, std::move(operands)}));
}

Matcher Matcher::any_of(std::vector<Matcher> operands) {
  return Matcher(std::make_shared<const Node>(Node{Kind::any_of, {}, {}, {}, std::move(operands)}));
}

Matcher Matcher::negation(Matcher operand) {
  return Matcher(std::make_shared<const Node>(Node{Kind::negation, {}, {}, {}, {std::move(operand)}}));
}

Matcher::Kind Matcher::kind() const { return node_->kind; }
const std::string& Matcher::text() const { return node_->text; }
std::span<const Matcher> Matcher::operands() const { return node_->operands; }

bool Matcher::operator()(std::string_view text) const {
  std::vector<std::string> tokens;
  bool tokenized = false;
  return eval(text, tokens, tokenized);
}

bool Matcher::eval(std::string_view text, std::vector<std::string>& tokens, bool& tokenized) const {
  auto words = [&]() -> const std::vector<std::string>& {
    if (!tokenized) {
      tokens = tokenize_words(text);
      tokenized = true;
    }
    return tokens;
  };
  switch (node_->kind) {
    case Kind::always: return true;
    case Kind::word: {
      const auto& all = words();
      return std::find(all.begin(), all.end(), node_->words.front()) != all.end();
    }
    case Kind::phrase: return contains_sequence(words(), node_->words);
    case Kind::regex: return node_->regex->search(text);
    case Kind::all_of:
      return std::all_of(node_->operands.begin(), node_->operands.end(),
                         [&](const Matcher& m) { return m.eval(text, tokens, tokenized); });
    case Kind::any_of:
      return std::any_of(node_->operands.begin(), node_->operands.end(),
                         [&](const Matcher& m) { return m.eval(text, tokens, tokenized); });
    case Kind::negation: return !node_->operands.front().eval(text, tokens, tokenized);
  }
  return false;
}

bool operator==(const Matcher& a, const Matcher& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.text() != b.text()) return false;
  auto x = a.operands();
  auto y = b.operands();
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

Matcher complement(const Matcher& m) {
  if (m.kind() == Matcher::Kind::negation) return m.operands().front();
  return Matcher::negation(m);
}

}  // namespace equix

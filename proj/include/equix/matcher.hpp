#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace equix {

// Content condition on the textual content of a node. Immutable value with
// shared structure; cheap to copy.
class Matcher {
 public:
  enum class Kind : std::uint8_t { always, word, phrase, regex, all_of, any_of, negation };

  static Matcher always();
  // Throws QuerySchemaError unless `word` is exactly one word.
  static Matcher word(std::string word);
  static Matcher phrase(std::string phrase);
  // Throws PatternError.
  static Matcher regex(std::string pattern);
  static Matcher all_of(std::vector<Matcher> operands);
  static Matcher any_of(std::vector<Matcher> operands);
  static Matcher negation(Matcher operand);

  bool operator()(std::string_view text) const;

  Kind kind() const;
  // Word, phrase or regex source text.
  const std::string& text() const;
  std::span<const Matcher> operands() const;
  bool is_always() const { return kind() == Kind::always; }

  friend bool operator==(const Matcher& a, const Matcher& b);

 private:
  struct Node;
  explicit Matcher(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  bool eval(std::string_view text, std::vector<std::string>& tokens, bool& tokenized) const;

  std::shared_ptr<const Node> node_;
};

// Matcher that holds exactly where `m` does not. Removes double negation.
Matcher complement(const Matcher& m);

// Lower-cased word tokens of `text`.
std::vector<std::string> tokenize_words(std::string_view text);

}  // namespace equix

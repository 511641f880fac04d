#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace equix {

// Regular expression searched in linear time per pattern instruction (Pike
// VM). Supports literals, '.', classes, \d \w \s and their negations,
// anchors, groups, alternation and the usual quantifiers. No
// backreferences.
class Regex {
 public:
  // Throws PatternError.
  explicit Regex(std::string_view pattern);

  // True when some substring of `text` matches.
  bool search(std::string_view text) const;

  const std::string& pattern() const { return pattern_; }

 private:
  struct Program;
  std::string pattern_;
  std::shared_ptr<const Program> program_;
};

}  // namespace equix

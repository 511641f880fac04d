#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "equix/error.hpp"

namespace equix::detail {

// Cursor over markup text with line/column tracking for diagnostics.
class TextReader {
 public:
  explicit TextReader(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  std::size_t position() const { return pos_; }
  std::string_view rest() const { return text_.substr(pos_); }

  char get() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && !eof(); ++i) get();
  }

  bool starts_with(std::string_view prefix) const { return rest().substr(0, prefix.size()) == prefix; }

  bool consume(std::string_view prefix) {
    if (!starts_with(prefix)) return false;
    advance(prefix.size());
    return true;
  }

  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }

  bool skip_space() {
    bool any = false;
    while (!eof() && is_space(peek())) {
      get();
      any = true;
    }
    return any;
  }

  void require_space() {
    if (!skip_space()) fail("expected whitespace");
  }

  // Skips up to and including `terminator`.
  void skip_past(std::string_view terminator, std::string_view what) {
    while (!eof()) {
      if (consume(terminator)) return;
      get();
    }
    fail("unterminated " + std::string(what));
  }

  std::string read_name() {
    if (eof() || !is_name_start(peek())) fail("expected a name");
    std::string name;
    while (!eof() && is_name_char(peek())) name.push_back(get());
    return name;
  }

  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(message, line_, column_); }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  static bool is_name_start(char c) {
    auto u = static_cast<unsigned char>(c);
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || u >= 0x80;
  }
  static bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace equix::detail

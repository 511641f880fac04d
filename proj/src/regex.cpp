#include "equix/regex.hpp"

#include <vector>

#include "equix/error.hpp"
#include "utf8.hpp"

namespace equix {

namespace {

constexpr int unbounded = -1;
constexpr int max_repeat = 1000;
constexpr std::size_t max_program = 20000;

struct CharClass {
  std::vector<std::pair<char32_t, char32_t>> ranges;
  bool negated = false;

  bool matches(char32_t c) const {
    bool in = false;
    for (auto [lo, hi] : ranges) {
      if (lo <= c && c <= hi) {
        in = true;
        break;
      }
    }
    return in != negated;
  }
};

struct Ast {
  enum class Kind { empty, literal, any, set, begin, end, concat, alternate, repeat };
  Kind kind = Kind::empty;
  char32_t literal = 0;
  int set = 0;
  int min = 0;
  int max = 0;
  std::vector<Ast> items;
};

void add_shorthand(CharClass& cls, char32_t which) {
  switch (which) {
    case 'd': cls.ranges.emplace_back('0', '9'); break;
    case 'w':
      cls.ranges.emplace_back('a', 'z');
      cls.ranges.emplace_back('A', 'Z');
      cls.ranges.emplace_back('0', '9');
      cls.ranges.emplace_back('_', '_');
      break;
    case 's':
      cls.ranges.emplace_back(' ', ' ');
      cls.ranges.emplace_back('\t', '\r');
      cls.ranges.emplace_back(0x85, 0x85);
      cls.ranges.emplace_back(0xA0, 0xA0);
      cls.ranges.emplace_back(0x2000, 0x200A);
      cls.ranges.emplace_back(0x2028, 0x2029);
      cls.ranges.emplace_back(0x3000, 0x3000);
      break;
    default: break;
  }
}

class Parser {
 public:
  explicit Parser(std::u32string pattern) : p_(std::move(pattern)) {}

  Ast parse(std::vector<CharClass>& classes) {
    classes_ = &classes;
    Ast ast = alternation();
    if (pos_ < p_.size()) fail("unbalanced ')'");
    return ast;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw PatternError("invalid regular expression: " + why + " (offset " + std::to_string(pos_) + ")");
  }

  bool more() const { return pos_ < p_.size(); }
  char32_t peek() const { return p_[pos_]; }

  Ast alternation() {
    std::vector<Ast> options{concatenation()};
    while (more() && peek() == '|') {
      ++pos_;
      options.push_back(concatenation());
    }
    if (options.size() == 1) return std::move(options.front());
    return Ast{Ast::Kind::alternate, 0, 0, 0, 0, std::move(options)};
  }

  Ast concatenation() {
    std::vector<Ast> items;
    while (more() && peek() != '|' && peek() != ')') items.push_back(quantified());
    if (items.size() == 1) return std::move(items.front());
    return Ast{Ast::Kind::concat, 0, 0, 0, 0, std::move(items)};
  }

  bool read_number(int& out) {
    std::size_t start = pos_;
    long value = 0;
    while (more() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + static_cast<long>(peek() - '0');
      if (value > max_repeat) fail("repetition count too large");
      ++pos_;
    }
    out = static_cast<int>(value);
    return pos_ > start;
  }

  // Parses "{m}", "{m,}" or "{m,n}" at the cursor; leaves the cursor alone
  // and returns false when the brace is a literal.
  bool brace_quantifier(int& min, int& max) {
    std::size_t saved = pos_;
    ++pos_;
    if (!read_number(min)) {
      pos_ = saved;
      return false;
    }
    max = min;
    if (more() && peek() == ',') {
      ++pos_;
      if (!read_number(max)) max = unbounded;
    }
    if (!more() || peek() != '}') {
      pos_ = saved;
      return false;
    }
    ++pos_;
    if (max != unbounded && max < min) fail("repetition bounds out of order");
    return true;
  }

  Ast quantified() {
    Ast atom = primary();
    for (;;) {
      if (!more()) return atom;
      int min = 0;
      int max = 0;
      char32_t c = peek();
      if (c == '*') {
        ++pos_;
        min = 0;
        max = unbounded;
      } else if (c == '+') {
        ++pos_;
        min = 1;
        max = unbounded;
      } else if (c == '?') {
        ++pos_;
        min = 0;
        max = 1;
      } else if (c == '{' && brace_quantifier(min, max)) {
      } else {
        return atom;
      }
      if (atom.kind == Ast::Kind::begin || atom.kind == Ast::Kind::end) fail("quantifier after anchor");
      if (more() && peek() == '?') ++pos_;
      atom = Ast{Ast::Kind::repeat, 0, 0, min, max, {std::move(atom)}};
    }
  }

  Ast set_ast(CharClass cls) {
    classes_->push_back(std::move(cls));
    return Ast{Ast::Kind::set, 0, static_cast<int>(classes_->size() - 1), 0, 0, {}};
  }

  Ast escape() {
    if (!more()) fail("trailing backslash");
    char32_t c = p_[pos_++];
    switch (c) {
      case 'd':
      case 'w':
      case 's': {
        CharClass cls;
        add_shorthand(cls, c);
        return set_ast(std::move(cls));
      }
      case 'D':
      case 'W':
      case 'S': {
        CharClass cls;
        add_shorthand(cls, c - 'A' + 'a');
        cls.negated = true;
        return set_ast(std::move(cls));
      }
      case 'n': return literal('\n');
      case 't': return literal('\t');
      case 'r': return literal('\r');
      case 'f': return literal('\f');
      case 'v': return literal('\v');
      default: break;
    }
    if (c >= '1' && c <= '9') fail("backreferences are not supported");
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) fail("unknown escape");
    return literal(c);
  }

  static Ast literal(char32_t c) { return Ast{Ast::Kind::literal, c, 0, 0, 0, {}}; }

  char32_t class_char(CharClass& cls, bool& was_shorthand) {
    was_shorthand = false;
    char32_t c = p_[pos_++];
    if (c != '\\') return c;
    if (!more()) fail("trailing backslash");
    char32_t e = p_[pos_++];
    switch (e) {
      case 'd':
      case 'w':
      case 's':
        add_shorthand(cls, e);
        was_shorthand = true;
        return 0;
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      case 'f': return '\f';
      case 'v': return '\v';
      default: break;
    }
    if ((e >= 'a' && e <= 'z') || (e >= 'A' && e <= 'Z') || (e >= '0' && e <= '9')) {
      fail("unsupported escape in character class");
    }
    return e;
  }

  Ast bracket() {
    CharClass cls;
    if (more() && peek() == '^') {
      cls.negated = true;
      ++pos_;
    }
    bool first = true;
    for (;;) {
      if (!more()) fail("unterminated character class");
      if (peek() == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      bool shorthand = false;
      char32_t lo = class_char(cls, shorthand);
      if (shorthand) continue;
      char32_t hi = lo;
      if (pos_ + 1 < p_.size() && peek() == '-' && p_[pos_ + 1] != ']') {
        ++pos_;
        bool hi_shorthand = false;
        hi = class_char(cls, hi_shorthand);
        if (hi_shorthand) fail("shorthand class as range bound");
        if (hi < lo) fail("character range out of order");
      }
      cls.ranges.emplace_back(lo, hi);
    }
    return set_ast(std::move(cls));
  }

  Ast primary() {
    char32_t c = p_[pos_++];
    switch (c) {
      case '(': {
        if (more() && peek() == '?') {
          if (pos_ + 1 < p_.size() && p_[pos_ + 1] == ':') {
            pos_ += 2;
          } else {
            fail("unsupported group construct");
          }
        }
        Ast inner = alternation();
        if (!more() || peek() != ')') fail("missing ')'");
        ++pos_;
        return inner;
      }
      case '[': return bracket();
      case '.': return Ast{Ast::Kind::any, 0, 0, 0, 0, {}};
      case '^': return Ast{Ast::Kind::begin, 0, 0, 0, 0, {}};
      case '$': return Ast{Ast::Kind::end, 0, 0, 0, 0, {}};
      case '\\': return escape();
      case '*':
      case '+':
      case '?': fail("quantifier without operand");
      default: return literal(c);
    }
  }

  std::u32string p_;
  std::size_t pos_ = 0;
  std::vector<CharClass>* classes_ = nullptr;
};

struct Inst {
  enum class Op { literal, any, set, split, jump, begin, end, match };
  Op op = Op::match;
  char32_t c = 0;
  int x = 0;
  int y = 0;
};

class Compiler {
 public:
  std::vector<Inst> compile(const Ast& ast) {
    emit(ast);
    push({Inst::Op::match});
    return std::move(code_);
  }

 private:
  int push(Inst inst) {
    if (code_.size() >= max_program) throw PatternError("regular expression too large");
    code_.push_back(inst);
    return static_cast<int>(code_.size()) - 1;
  }
  int here() const { return static_cast<int>(code_.size()); }

  void emit(const Ast& ast) {
    switch (ast.kind) {
      case Ast::Kind::empty: break;
      case Ast::Kind::literal: push({Inst::Op::literal, ast.literal}); break;
      case Ast::Kind::any: push({Inst::Op::any}); break;
      case Ast::Kind::set: push({Inst::Op::set, 0, ast.set}); break;
      case Ast::Kind::begin: push({Inst::Op::begin}); break;
      case Ast::Kind::end: push({Inst::Op::end}); break;
      case Ast::Kind::concat:
        for (const auto& item : ast.items) emit(item);
        break;
      case Ast::Kind::alternate: {
        std::vector<int> jumps;
        for (std::size_t i = 0; i + 1 < ast.items.size(); ++i) {
          int split = push({Inst::Op::split});
          code_[split].x = here();
          emit(ast.items[i]);
          jumps.push_back(push({Inst::Op::jump}));
          code_[split].y = here();
        }
        emit(ast.items.back());
        for (int j : jumps) code_[j].x = here();
        break;
      }
      case Ast::Kind::repeat: {
        const Ast& body = ast.items.front();
        for (int i = 0; i < ast.min; ++i) emit(body);
        if (ast.max == unbounded) {
          int split = push({Inst::Op::split});
          code_[split].x = here();
          emit(body);
          int back = push({Inst::Op::jump});
          code_[back].x = split;
          code_[split].y = here();
        } else {
          std::vector<int> splits;
          for (int i = ast.min; i < ast.max; ++i) {
            int split = push({Inst::Op::split});
            code_[split].x = here();
            splits.push_back(split);
            emit(body);
          }
          for (int s : splits) code_[s].y = here();
        }
        break;
      }
    }
  }

  std::vector<Inst> code_;
};

}  // namespace

struct Regex::Program {
  std::vector<Inst> code;
  std::vector<CharClass> classes;
};

Regex::Regex(std::string_view pattern) : pattern_(pattern) {
  auto program = std::make_shared<Program>();
  Parser parser(detail::decode_utf8(pattern));
  Ast ast = parser.parse(program->classes);
  program->code = Compiler{}.compile(ast);
  program_ = std::move(program);
}

bool Regex::search(std::string_view text) const {
  const auto& code = program_->code;
  const std::u32string input = detail::decode_utf8(text);
  const std::size_t n = input.size();

  std::vector<int> current;
  std::vector<int> next;
  std::vector<std::size_t> mark(code.size(), static_cast<std::size_t>(-1));
  std::vector<int> stack;
  bool matched = false;

  // Follows non-consuming instructions from `pc`, collecting consuming ones
  // into `list`. `generation` makes `mark` reusable across steps.
  auto add = [&](std::vector<int>& list, int pc, std::size_t pos, std::size_t generation) {
    stack.push_back(pc);
    while (!stack.empty()) {
      int at = stack.back();
      stack.pop_back();
      if (mark[at] == generation) continue;
      mark[at] = generation;
      const Inst& inst = code[at];
      switch (inst.op) {
        case Inst::Op::jump: stack.push_back(inst.x); break;
        case Inst::Op::split:
          stack.push_back(inst.y);
          stack.push_back(inst.x);
          break;
        case Inst::Op::begin:
          if (pos == 0) stack.push_back(at + 1);
          break;
        case Inst::Op::end:
          if (pos == n) stack.push_back(at + 1);
          break;
        case Inst::Op::match: matched = true; break;
        default: list.push_back(at); break;
      }
    }
  };

  for (std::size_t pos = 0;; ++pos) {
    add(current, 0, pos, pos);
    if (matched) return true;
    if (pos == n) return false;
    char32_t c = input[pos];
    next.clear();
    for (int pc : current) {
      const Inst& inst = code[pc];
      bool ok = inst.op == Inst::Op::literal ? inst.c == c
                : inst.op == Inst::Op::any   ? c != '\n'
                                             : program_->classes[inst.x].matches(c);
      if (ok) add(next, pc + 1, pos + 1, pos + 1);
      if (matched) return true;
    }
    std::swap(current, next);
  }
}

}  // namespace equix

#include "hlweave/advice.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "hlweave/pcxpath.hpp"

namespace hlweave {

namespace {

struct KindInfo {
  AdviceKind kind;
  std::string_view keyword;
};

constexpr std::array kKinds = {
    KindInfo{AdviceKind::Before, "before"},
    KindInfo{AdviceKind::BeforeA, "before_args"},
    KindInfo{AdviceKind::AfterR, "after_returning"},
    KindInfo{AdviceKind::AfterRA, "after_returning_args"},
    KindInfo{AdviceKind::AfterThrowing, "after_throwing"},
    KindInfo{AdviceKind::AfterThrowingA, "after_throwing_args"},
    KindInfo{AdviceKind::After, "after"},
    KindInfo{AdviceKind::AfterA, "after_args"},
    KindInfo{AdviceKind::Around, "around"},
    KindInfo{AdviceKind::AppendF, "append_front"},
    KindInfo{AdviceKind::AppendB, "append_back"},
    KindInfo{AdviceKind::Nothing, "nothing"},
};


}  // namespace

std::string_view advice_keyword(AdviceKind kind) {
  return kKinds[static_cast<std::size_t>(kind)].keyword;
}

std::optional<AdviceKind> advice_from_keyword(std::string_view keyword) {
  for (const auto& k : kKinds) {
    if (k.keyword == keyword) return k.kind;
  }
  return std::nullopt;
}

bool is_replace(AdviceKind k) {
  return k == AdviceKind::Around || k == AdviceKind::AppendF || k == AdviceKind::AppendB;
}

bool takes_args(AdviceKind k) {
  return k == AdviceKind::BeforeA || k == AdviceKind::AfterRA || k == AdviceKind::AfterThrowingA ||
         k == AdviceKind::AfterA;
}

bool is_before(AdviceKind k) { return k == AdviceKind::Before || k == AdviceKind::BeforeA; }
bool is_after_returning(AdviceKind k) { return k == AdviceKind::AfterR || k == AdviceKind::AfterRA; }
bool is_after_throwing(AdviceKind k) {
  return k == AdviceKind::AfterThrowing || k == AdviceKind::AfterThrowingA;
}
bool is_after(AdviceKind k) { return k == AdviceKind::After || k == AdviceKind::AfterA; }

void validate_holes(const AdviceTemplate& tmpl) {
  const AdviceKind k = tmpl.kind;
  int originals = 0;
  walk(tmpl.body, [&](const Node& n, const NodePath&) {
    if (!n.is(NodeKind::MacroCall)) return;
    const std::string& hole = n.children[0].text();
    auto reject = [&] {
      throw AdviceError(hole + " is not allowed in " + std::string(advice_keyword(k)) + " advice",
                        n.loc);
    };
    if (hole == "@args" && !takes_args(k)) reject();
    if (hole == "@result" && !is_after_returning(k)) reject();
    if (hole == "@exception" && !is_after_throwing(k)) reject();
    if (hole == "@original") {
      if (k != AdviceKind::Around) reject();
      if (++originals > 1) throw AdviceError("@original may appear at most once", n.loc);
    }
    if (hole == "@arg_expr") {
      if (!is_replace(k)) reject();
      const Node& i = n.children[1];
      if (!i.is(NodeKind::IntLit) || i.int_value() < 1) {
        throw AdviceError("@arg_expr expects a positive index", n.loc);
      }
    }
    if (hole == "@transform") {
      if (k != AdviceKind::Around) reject();
      if (n.children[1].text() != "swap_loop") {
        throw AdviceError("unknown transform " + n.children[1].text(), n.loc);
      }
    }
    if (hole == "@jp") {
      static const std::array<std::string_view, 5> fields = {"name", "file", "line", "pointcut",
                                                             "kind"};
      const Node& f = n.children[1];
      if (!f.is(NodeKind::Symbol) ||
          std::find(fields.begin(), fields.end(), f.text()) == fields.end()) {
        throw AdviceError("unknown join point field in @jp", n.loc);
      }
    }
  });
}

AdviceTemplate make_template(AdviceKind kind, std::string_view text, const std::string& file,
                             int first_line) {
  ParseOptions opts;
  opts.allow_holes = true;
  opts.first_line = first_line;
  AdviceTemplate t;
  t.kind = kind;
  t.body = parse(text, file, opts);
  t.loc = SourceLoc{file, first_line, {}};
  validate_holes(t);
  return t;
}

FusedAdvice fuse(const FusedAdvice& a, const FusedAdvice& b) {
  FusedAdvice out = a;
  out.templates.insert(out.templates.end(), b.templates.begin(), b.templates.end());
  auto arounds = std::count_if(out.templates.begin(), out.templates.end(),
                               [](const AdviceTemplate& t) { return t.kind == AdviceKind::Around; });
  if (arounds > 1) throw AdviceError("cannot fuse two around advices");
  return out;
}

Node swap_loop(const Node& loop) {
  if (!loop.is(NodeKind::For)) throw AdviceError("swap_loop expects a for loop", loop.loc);
  Node out = loop;
  std::reverse(out.children.begin(), out.children.end() - 1);
  return out;
}

namespace {

Node substitute(const Node& n, const AdviceTemplate& tmpl, const JoinPoint& jp,
                const Node& original, const HoleNames& names) {
  if (n.is(NodeKind::MacroCall)) {
    const std::string& hole = n.children[0].text();
    if (hole == "@original") return original;
    if (hole == "@args") return Node::symbol(names.args, n.loc);
    if (hole == "@result") return Node::symbol(names.result, n.loc);
    if (hole == "@exception") return Node::symbol(names.exception, n.loc);
    if (hole == "@transform") return swap_loop(original);
    if (hole == "@arg_expr") {
      auto i = static_cast<std::size_t>(n.children[1].int_value());
      if (i > jp.arg_exprs.size()) {
        throw AdviceError("@arg_expr(" + std::to_string(i) + ") out of range: join point has " +
                              std::to_string(jp.arg_exprs.size()) + " arguments",
                          n.loc);
      }
      return jp.arg_exprs[i - 1];
    }
    if (hole == "@jp") {
      const std::string& field = n.children[1].text();
      if (field == "name") {
        return is_identifier(jp.name) ? Node::symbol(jp.name, n.loc)
                                      : Node::string_lit(jp.name, n.loc);
      }
      if (field == "file") return Node::string_lit(jp.loc.file, n.loc);
      if (field == "line") return Node::int_lit(jp.loc.line, n.loc);
      if (field == "pointcut") return Node::string_lit(jp.pointcut_description, n.loc);
      return Node::string_lit(std::string(jp_kind_name(jp.kind)), n.loc);
    }
  }
  Node out = n;
  for (auto& c : out.children) c = substitute(c, tmpl, jp, original, names);
  return out;
}

}  // namespace

Node instantiate(const AdviceTemplate& tmpl, const JoinPoint& jp, const Node& original,
                 const HoleNames& names) {
  return substitute(tmpl.body, tmpl, jp, original, names);
}

// ---- aspect files ----------------------------------------------------------

namespace {

class AspectParser {
 public:
  AspectParser(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  std::vector<Aspect> run() {
    std::vector<Aspect> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(aspect());
      skip();
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw AdviceError(msg, SourceLoc{file_, line_, {}});
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      advance();
    }
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip();
    if (peek() != c) {
      fail(std::string("expected '") + c + "'" +
           (pos_ < text_.size() ? std::string(" but found '") + peek() + "'" : " at end of file"));
    }
    advance();
  }

  bool eat(char c) {
    skip();
    if (peek() != c) return false;
    advance();
    return true;
  }

  std::string string_lit() {
    skip();
    if (peek() != '"') fail("expected a string");
    advance();
    std::string s;
    while (pos_ < text_.size() && peek() != '"') {
      if (peek() == '\\' && pos_ + 1 < text_.size()) {
        advance();
        char e = peek();
        s += e == 'n' ? '\n' : e;
        advance();
        continue;
      }
      s += peek();
      advance();
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    advance();
    return s;
  }

  // A string literal, possibly concatenated with `*`.
  std::string string_expr() {
    std::string s = string_lit();
    while (eat('*')) s += string_lit();
    return s;
  }

  Aspect aspect() {
    if (word() != "aspect") fail("expected 'aspect'");
    Aspect a;
    a.file = file_;
    a.name = string_lit();
    expect('{');
    bool have_pointcut = false;
    while (!eat('}')) {
      if (pos_ >= text_.size()) fail("unterminated aspect \"" + a.name + "\"");
      std::string key = word();
      expect(':');
      if (key == "pointcut") {
        if (have_pointcut) fail("aspect \"" + a.name + "\" has more than one pointcut");
        skip();
        a.line = line_;
        a.pointcut = pointcut();
        have_pointcut = true;
      } else if (key == "advice") {
        a.advice = fuse(a.advice, FusedAdvice{{advice()}});
      } else {
        fail("unknown aspect entry '" + key + "'");
      }
    }
    if (!have_pointcut) fail("aspect \"" + a.name + "\" has no pointcut");
    if (a.advice.templates.empty()) fail("aspect \"" + a.name + "\" has no advice");
    return a;
  }

  NamePattern pattern() {
    skip();
    if (peek() == ':') {
      advance();
      return NamePattern::exact(operator_or_word());
    }
    if (peek() == '"') return NamePattern::substring(string_expr());
    fail("expected :name or \"substring\"");
  }

  // Names after `:` may be operators, e.g. `call(:+)`.
  std::string operator_or_word() {
    static constexpr std::array<std::string_view, 12> ops = {"==", "!=", "<=", ">=", "+", "-",
                                                             "*",  "/",  "<",  ">",  "!", "&&"};
    for (auto op : ops) {
      if (text_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        return std::string(op);
      }
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '!')) {
      advance();
    }
    if (pos_ == start) fail("expected a name after ':'");
    return std::string(text_.substr(start, pos_ - start));
  }

  Pointcut pointcut() {
    static const std::array<std::pair<std::string_view, PointcutKind>, 10> kinds = {{
        {"exec_func", PointcutKind::ExecFunc},
        {"call", PointcutKind::CallFunc},
        {"assign", PointcutKind::Assign},
        {"assign_ary", PointcutKind::AssignAry},
        {"assign_st", PointcutKind::AssignSt},
        {"ref_ary", PointcutKind::RefAry},
        {"ref_st", PointcutKind::RefSt},
        {"attr", PointcutKind::Attr},
        {"module", PointcutKind::Module},
        {"struct", PointcutKind::Struct},
    }};
    std::string name = word();
    expect('(');
    if (name == "xpath") {
      std::string query = string_expr();
      expect(')');
      try {
        parse_query(query);
      } catch (const QueryError& e) {
        fail("invalid xpath: " + std::string(e.what()));
      }
      return Pointcut::make_xpath(std::move(query));
    }
    auto it = std::find_if(kinds.begin(), kinds.end(), [&](auto& k) { return k.first == name; });
    if (it == kinds.end()) fail("unknown pointcut '" + name + "'");
    NamePattern pat = pattern();
    std::optional<std::vector<ArgMatcher>> matchers;
    if (eat(',')) {
      if (it->second != PointcutKind::ExecFunc) fail("argument matchers are only supported by exec_func");
      expect('[');
      matchers.emplace();
      while (!eat(']')) {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() && peek() != ',' && peek() != ']' && !std::isspace(static_cast<unsigned char>(peek()))) {
          advance();
        }
        std::string token(text_.substr(start, pos_ - start));
        auto m = parse_arg_matcher(token);
        if (!m) fail("invalid argument matcher '" + token + "'");
        matchers->push_back(*m);
        eat(',');
      }
    }
    expect(')');
    return Pointcut::make(it->second, std::move(pat), std::move(matchers));
  }

  // Skips a string literal starting at pos_, including nested interpolations.
  void skip_string() {
    advance();
    while (pos_ < text_.size() && peek() != '"') {
      if (peek() == '\\') {
        advance();
      } else if (peek() == '$' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '(') {
        advance();
        int depth = 0;
        do {
          if (peek() == '"') {
            skip_string();
            continue;
          }
          if (peek() == '(') ++depth;
          if (peek() == ')') --depth;
          advance();
        } while (depth > 0 && pos_ < text_.size());
        continue;
      }
      if (pos_ < text_.size()) advance();
    }
    if (pos_ >= text_.size()) fail("unterminated string in advice body");
    advance();
  }

  AdviceTemplate advice() {
    std::string kw = word();
    auto kind = advice_from_keyword(kw);
    if (!kind) fail("unknown advice kind '" + kw + "'");
    skip();
    if (peek() != '{') {
      if (*kind == AdviceKind::Nothing) return make_template(*kind, "", file_, line_);
      fail("expected '{' after advice kind");
    }
    advance();
    int body_line = line_;
    std::size_t start = pos_;
    int depth = 1;
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == '"') {
        skip_string();
        continue;
      }
      if (c == '#') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          while (pos_ + 1 < text_.size() && !(peek() == '=' && text_[pos_ + 1] == '#')) advance();
          if (pos_ + 1 < text_.size()) {
            advance();
            advance();
          }
        } else {
          while (pos_ < text_.size() && peek() != '\n') advance();
        }
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) break;
      advance();
    }
    if (pos_ >= text_.size()) fail("unterminated advice body");
    std::string_view body = text_.substr(start, pos_ - start);
    advance();
    try {
      return make_template(*kind, body, file_, body_line);
    } catch (const SyntaxError& e) {
      throw AdviceError("in advice body: " + e.message(), e.loc());
    }
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

std::vector<Aspect> parse_aspect_file(std::string_view text, const std::string& filename) {
  return AspectParser(text, filename).run();
}

}  // namespace hlweave

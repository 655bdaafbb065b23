#include "lexer.hpp"

#include <array>
#include <cctype>

#include "hlweave/syntax.hpp"

namespace hlweave::detail {

namespace {

constexpr std::array<std::string_view, 29> kOps = {
    "...", "::", "->", "=>", "==", "!=", "<=", ">=", "&&", "||",
    "+=",  "+",  "-",  "*",  "/",  "<",  ">",  "=",  "!",  "(",
    ")",   "[",  "]",  ",",  ";",  ".",  ":",  "{",  "}"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file, int first_line)
      : src_(src), file_(file), line_(first_line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool space = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
        space = true;
        continue;
      }
      if (c == '\n') {
        out.push_back(make(TokKind::Newline, "\n", space));
        ++pos_;
        ++line_;
        line_start_ = pos_;
        space = false;
        continue;
      }
      if (c == '#') {
        skip_comment();
        space = true;
        continue;
      }
      if (ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
        // Trailing `!` belongs to the name (push!, counter!) unless it starts `!=`.
        while (pos_ < src_.size() && src_[pos_] == '!' &&
               !(pos_ + 1 < src_.size() && src_[pos_ + 1] == '=')) {
          ++pos_;
        }
        out.push_back(make_at(TokKind::Ident, std::string(src_.substr(start, pos_ - start)),
                              start, space));
        space = false;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(number(space));
        space = false;
        continue;
      }
      if (c == '"') {
        out.push_back(string_token(space));
        space = false;
        continue;
      }
      if (c == '@') {
        std::size_t start = pos_;
        ++pos_;
        if (pos_ >= src_.size() || !ident_start(src_[pos_])) {
          fail("expected macro name after '@'");
        }
        while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
        out.push_back(make_at(TokKind::Macro, std::string(src_.substr(start, pos_ - start)),
                              start, space));
        space = false;
        continue;
      }
      bool matched = false;
      for (auto op : kOps) {
        if (src_.substr(pos_, op.size()) == op) {
          out.push_back(make_at(TokKind::Op, std::string(op), pos_, space));
          pos_ += op.size();
          matched = true;
          break;
        }
      }
      if (!matched) fail(std::string("unexpected character '") + c + "'");
      space = false;
    }
    out.push_back(make(TokKind::Eof, "", space));
    return out;
  }

 private:
  Token make(TokKind kind, std::string text, bool space) {
    return make_at(kind, std::move(text), pos_, space);
  }

  Token make_at(TokKind kind, std::string text, std::size_t at, bool space) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line_;
    t.col = static_cast<int>(at - line_start_) + 1;
    t.space_before = space;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw SyntaxError(msg, SourceLoc{file_, line_, {}});
  }

  void skip_comment() {
    if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      int depth = 0;
      while (pos_ < src_.size()) {
        if (src_.substr(pos_, 2) == "#=") {
          ++depth;
          pos_ += 2;
        } else if (src_.substr(pos_, 2) == "=#") {
          --depth;
          pos_ += 2;
          if (depth == 0) return;
        } else {
          if (src_[pos_] == '\n') {
            ++line_;
            line_start_ = pos_ + 1;
          }
          ++pos_;
        }
      }
      fail("unterminated block comment");
    }
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
  }

  Token number(bool space) {
    std::size_t start = pos_;
    bool is_float = false;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_float = true;
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        is_float = true;
        digits();
      } else {
        pos_ = save;
      }
    }
    return make_at(is_float ? TokKind::Float : TokKind::Int,
                   std::string(src_.substr(start, pos_ - start)), start, space);
  }

  Token string_token(bool space) {
    std::size_t start = pos_;
    int start_line = line_;
    ++pos_;
    std::string body;
    while (true) {
      if (pos_ >= src_.size()) {
        line_ = start_line;
        fail("unterminated string literal");
      }
      char c = src_[pos_];
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\\' && pos_ + 1 < src_.size()) {
        body += c;
        body += src_[pos_ + 1];
        pos_ += 2;
        continue;
      }
      if (c == '$' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '(') {
        // Copy the interpolated expression verbatim, including nested strings.
        body += '$';
        ++pos_;
        int depth = 0;
        do {
          char d = src_[pos_];
          if (d == '(') ++depth;
          if (d == ')') --depth;
          if (d == '"') {
            body += d;
            ++pos_;
            while (pos_ < src_.size() && src_[pos_] != '"') {
              if (src_[pos_] == '\\') body += src_[pos_++];
              body += src_[pos_++];
            }
            if (pos_ >= src_.size()) fail("unterminated string literal");
          }
          body += src_[pos_];
          ++pos_;
        } while (depth > 0 && pos_ < src_.size());
        continue;
      }
      if (c == '\n') {
        ++line_;
        line_start_ = pos_ + 1;
      }
      body += c;
      ++pos_;
    }
    Token t = make_at(TokKind::String, std::move(body), start, space);
    t.line = start_line;
    return t;
  }

  std::string_view src_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_;
};

}  // namespace

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case TokKind::Eof:
      return "end of input";
    case TokKind::Newline:
      return "newline";
    case TokKind::String:
      return "string \"" + tok.text + "\"";
    default:
      return "'" + tok.text + "'";
  }
}

std::vector<Token> tokenize(std::string_view source, const std::string& filename,
                            int first_line) {
  return Lexer(source, filename, first_line).run();
}

}  // namespace hlweave::detail

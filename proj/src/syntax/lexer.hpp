#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hlweave::detail {

enum class TokKind { Ident, Int, Float, String, Macro, Op, Newline, Eof };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;  // String tokens carry the raw, still-escaped body
  int line = 0;
  int col = 0;
  bool space_before = false;

  bool is_op(std::string_view op) const { return kind == TokKind::Op && text == op; }
  bool is_ident(std::string_view id) const { return kind == TokKind::Ident && text == id; }
};

std::string describe(const Token& tok);

/// Splits HL text into tokens. Comments (`# ...` and nested `#= ... =#`)
/// are dropped; newlines are kept because they terminate statements.
std::vector<Token> tokenize(std::string_view source, const std::string& filename,
                            int first_line);

}  // namespace hlweave::detail

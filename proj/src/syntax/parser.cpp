#include <cctype>
#include <charconv>
#include <set>

#include "hlweave/syntax.hpp"
#include "lexer.hpp"

namespace hlweave {

namespace {

using detail::Token;
using detail::TokKind;

const std::set<std::string, std::less<>> kKeywords = {
    "module", "function", "end",    "struct", "mutable", "if",     "elseif", "else",
    "for",    "in",       "let",    "try",    "catch",   "finally", "return", "begin",
    "true",   "false"};

const std::set<std::string, std::less<>> kHoleNoArgs = {"@original", "@args", "@result",
                                                        "@exception"};
const std::set<std::string, std::less<>> kHoleWithArg = {"@jp", "@arg_expr", "@transform"};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file, ParseOptions options)
      : toks_(std::move(tokens)), file_(std::move(file)), opts_(options) {
    newline_significant_.push_back(true);
  }

  Node program() {
    Node block = parse_block({});
    if (peek().kind != TokKind::Eof) fail_unexpected(peek());
    return block;
  }

  Node single_expression() {
    newline_significant_.push_back(false);
    Node e = parse_assign_expr();
    if (peek().kind != TokKind::Eof) fail_unexpected(peek());
    newline_significant_.pop_back();
    return e;
  }

 private:
  // ---- token access -------------------------------------------------------

  bool newlines_matter() const { return newline_significant_.back(); }

  std::size_t skip_index(std::size_t i) const {
    if (!newlines_matter()) {
      while (toks_[i].kind == TokKind::Newline) ++i;
    }
    return i;
  }

  const Token& peek() {
    pos_ = skip_index(pos_);
    return toks_[pos_];
  }

  const Token& peek_at(std::size_t offset) {
    std::size_t i = skip_index(pos_);
    for (std::size_t k = 0; k < offset && toks_[i].kind != TokKind::Eof; ++k) {
      i = skip_index(i + 1);
    }
    return toks_[i];
  }

  const Token& advance() {
    const Token& t = peek();
    if (t.kind != TokKind::Eof) ++pos_;
    return t;
  }

  void skip_newlines() {
    while (toks_[pos_].kind == TokKind::Newline) ++pos_;
  }

  SourceLoc loc_of(const Token& t) const { return SourceLoc{file_, t.line, {}}; }

  [[noreturn]] void fail_unexpected(const Token& t) {
    throw SyntaxError("unexpected " + detail::describe(t), loc_of(t));
  }

  [[noreturn]] void fail(const std::string& msg, const Token& t) {
    throw SyntaxError(msg + " near " + detail::describe(t), loc_of(t));
  }

  const Token& expect_op(std::string_view op) {
    const Token& t = peek();
    if (!t.is_op(op)) fail("expected '" + std::string(op) + "'", t);
    return advance();
  }

  void expect_keyword(std::string_view kw) {
    const Token& t = peek();
    if (!t.is_ident(kw)) fail("expected '" + std::string(kw) + "'", t);
    advance();
  }

  std::string expect_name() {
    const Token& t = peek();
    if (t.kind != TokKind::Ident || kKeywords.count(t.text)) fail("expected identifier", t);
    return advance().text;
  }

  bool at_keyword(std::string_view kw) { return peek().is_ident(kw); }

  bool at_block_end(const std::set<std::string, std::less<>>& terminators) {
    const Token& t = peek();
    if (t.kind == TokKind::Eof) return true;
    return t.kind == TokKind::Ident && terminators.count(t.text) > 0;
  }

  /// Index of the token after the bracket matching the one at `open_index`.
  std::size_t after_matching(std::size_t open_index) const {
    int depth = 0;
    for (std::size_t i = open_index; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.is_op("(") || t.is_op("[")) ++depth;
      if (t.is_op(")") || t.is_op("]")) {
        --depth;
        if (depth == 0) return i + 1;
      }
      if (t.kind == TokKind::Eof) break;
    }
    return toks_.size() - 1;
  }

  std::size_t next_non_newline(std::size_t i) const {
    while (toks_[i].kind == TokKind::Newline) ++i;
    return i;
  }

  // ---- blocks and statements ---------------------------------------------

  Node parse_block(const std::set<std::string, std::less<>>& terminators) {
    Node block(NodeKind::Block, SourceLoc{file_, peek().line, {}});
    while (true) {
      while (peek().kind == TokKind::Newline || peek().is_op(";")) advance();
      if (at_block_end(terminators)) break;
      const Token& start = peek();
      SourceLoc loc = loc_of(start);
      Node stmt = parse_statement();
      block.children.push_back(Node::line_info(loc));
      block.children.push_back(std::move(stmt));
      const Token& after = peek();
      if (after.kind == TokKind::Newline || after.is_op(";")) continue;
      if (at_block_end(terminators)) break;
      fail_unexpected(after);
    }
    return block;
  }

  Node parse_statement() {
    const Token& t = peek();
    if (t.is_ident("module")) return parse_module();
    if (t.is_ident("function")) return parse_function();
    if (t.is_ident("struct") || t.is_ident("mutable")) return parse_struct();
    if (t.kind == TokKind::Ident && !kKeywords.count(t.text)) {
      const Token& next = toks_[pos_ + 1];
      if (next.is_op("(") && !next.space_before) {
        if (toks_[after_matching(pos_ + 1)].is_op("=")) return parse_short_function();
      }
      if (next.is_op("::")) return parse_field();
    }
    return parse_assign_expr();
  }

  Node parse_module() {
    SourceLoc loc = loc_of(peek());
    expect_keyword("module");
    Node name = Node::symbol(expect_name(), loc);
    Node body = parse_block({"end"});
    expect_keyword("end");
    return Node(NodeKind::Module, {std::move(name), std::move(body)}, loc);
  }

  Node parse_function() {
    SourceLoc loc = loc_of(peek());
    expect_keyword("function");
    Node name = Node::symbol(expect_name(), loc);
    Node params = parse_params();
    Node body = parse_block({"end"});
    expect_keyword("end");
    return Node(NodeKind::FunctionDef, {std::move(name), std::move(params), std::move(body)},
                loc);
  }

  Node parse_short_function() {
    SourceLoc loc = loc_of(peek());
    Node name = Node::symbol(expect_name(), loc);
    Node params = parse_params();
    expect_op("=");
    skip_newlines();
    Node body = parse_assign_expr();
    return Node(NodeKind::ShortFuncDef, {std::move(name), std::move(params), std::move(body)},
                loc);
  }

  Node parse_struct() {
    SourceLoc loc = loc_of(peek());
    bool is_mutable = false;
    if (at_keyword("mutable")) {
      advance();
      is_mutable = true;
    }
    expect_keyword("struct");
    Node name = Node::symbol(expect_name(), loc);
    Node body(NodeKind::Block, loc);
    while (true) {
      while (peek().kind == TokKind::Newline || peek().is_op(";")) advance();
      if (at_keyword("end") || peek().kind == TokKind::Eof) break;
      SourceLoc mloc = loc_of(peek());
      Node member = at_keyword("function") ? parse_function() : parse_field();
      body.children.push_back(Node::line_info(mloc));
      body.children.push_back(std::move(member));
    }
    expect_keyword("end");
    return Node(NodeKind::StructDef,
                {std::move(name), Node::bool_lit(is_mutable, loc), std::move(body)}, loc);
  }

  Node parse_field() {
    SourceLoc loc = loc_of(peek());
    Node name = Node::symbol(expect_name(), loc);
    Node type = Node::empty();
    if (peek().is_op("::")) {
      advance();
      type = Node::symbol(expect_name(), loc);
    }
    return Node(NodeKind::Field, {std::move(name), std::move(type)}, loc);
  }

  Node parse_params() {
    SourceLoc loc = loc_of(peek());
    expect_op("(");
    newline_significant_.push_back(false);
    Node params(NodeKind::Params, loc);
    bool keyword = false;
    while (!peek().is_op(")")) {
      if (peek().is_op(";")) {
        if (keyword) fail_unexpected(peek());
        advance();
        keyword = true;
        continue;
      }
      params.children.push_back(parse_param(keyword));
      if (peek().is_op(",")) {
        advance();
      } else if (!peek().is_op(")") && !peek().is_op(";")) {
        fail_unexpected(peek());
      }
    }
    newline_significant_.pop_back();
    expect_op(")");
    return params;
  }

  Node parse_param(bool keyword) {
    SourceLoc loc = loc_of(peek());
    Node name = Node::symbol(expect_name(), loc);
    Node type = Node::empty();
    Node def = Node::empty();
    bool variadic = false;
    if (peek().is_op("::")) {
      advance();
      type = Node::symbol(expect_name(), loc);
    }
    if (peek().is_op("...")) {
      advance();
      variadic = true;
    }
    if (peek().is_op("=")) {
      advance();
      def = parse_expr();
    }
    NodeKind kind = keyword ? (variadic ? NodeKind::KwVarParam : NodeKind::KwParam)
                            : (variadic ? NodeKind::VarParam : NodeKind::Param);
    return Node(kind, {std::move(name), std::move(type), std::move(def)}, loc);
  }

  // ---- expressions --------------------------------------------------------

  static bool is_lvalue(const Node& n) {
    return n.is(NodeKind::Symbol) || n.is(NodeKind::IndexRef) || n.is(NodeKind::FieldRef);
  }

  Node parse_assign_expr() {
    Node lhs = parse_expr();
    const Token& t = peek();
    if (t.is_op("=") || t.is_op("+=")) {
      if (!is_lvalue(lhs)) fail("invalid assignment target", t);
      bool op_assign = t.is_op("+=");
      advance();
      skip_newlines();
      Node rhs = parse_assign_expr();
      SourceLoc loc = lhs.loc;
      if (op_assign) return Node(NodeKind::OpAssign, {std::move(lhs), std::move(rhs)}, loc);
      if (lhs.is(NodeKind::Symbol)) {
        return Node(NodeKind::Assign, {std::move(lhs), std::move(rhs)}, loc);
      }
      if (lhs.is(NodeKind::IndexRef)) {
        return Node(NodeKind::IndexAssign,
                    {std::move(lhs.children[0]), std::move(lhs.children[1]), std::move(rhs)},
                    loc);
      }
      return Node(NodeKind::FieldAssign,
                  {std::move(lhs.children[0]), std::move(lhs.children[1]), std::move(rhs)}, loc);
    }
    return lhs;
  }

  bool at_lambda() {
    std::size_t i = skip_index(pos_);
    const Token& t = toks_[i];
    if (t.is_op("(")) {
      std::size_t after = next_non_newline(after_matching(i));
      return toks_[after].is_op("->");
    }
    if (t.kind == TokKind::Ident && !kKeywords.count(t.text)) {
      return toks_[next_non_newline(i + 1)].is_op("->");
    }
    return false;
  }

  Node parse_expr() {
    if (at_lambda()) return parse_lambda();
    return parse_or();
  }

  Node parse_lambda() {
    SourceLoc loc = loc_of(peek());
    Node params(NodeKind::Params, loc);
    if (peek().is_op("(")) {
      params = parse_params();
    } else {
      Node name = Node::symbol(expect_name(), loc);
      params.children.push_back(
          Node(NodeKind::Param, {std::move(name), Node::empty(), Node::empty()}, loc));
    }
    skip_newlines();
    expect_op("->");
    skip_newlines();
    Node body = parse_assign_expr();
    return Node(NodeKind::Lambda, {std::move(params), std::move(body)}, loc);
  }

  template <typename Next>
  Node parse_binary_level(std::initializer_list<std::string_view> ops, Next next) {
    Node lhs = (this->*next)();
    while (true) {
      const Token& t = peek();
      std::string_view matched;
      for (auto op : ops) {
        if (t.is_op(op)) matched = op;
      }
      if (matched.empty()) return lhs;
      SourceLoc loc = lhs.loc;
      advance();
      skip_newlines();
      Node rhs = (this->*next)();
      if (matched == "&&") {
        lhs = Node(NodeKind::AndAnd, {std::move(lhs), std::move(rhs)}, loc);
      } else if (matched == "||") {
        lhs = Node(NodeKind::OrOr, {std::move(lhs), std::move(rhs)}, loc);
      } else if (matched == ":") {
        lhs = Node(NodeKind::Range, {std::move(lhs), std::move(rhs)}, loc);
      } else {
        lhs = Node(NodeKind::Call,
                   {Node::symbol(std::string(matched), loc), std::move(lhs), std::move(rhs)}, loc);
      }
    }
  }

  Node parse_or() { return parse_binary_level({"||"}, &Parser::parse_and); }
  Node parse_and() { return parse_binary_level({"&&"}, &Parser::parse_comparison); }
  Node parse_comparison() {
    return parse_binary_level({"<", ">", "<=", ">=", "==", "!="}, &Parser::parse_range);
  }
  Node parse_range() { return parse_binary_level({":"}, &Parser::parse_additive); }
  Node parse_additive() { return parse_binary_level({"+", "-"}, &Parser::parse_multiplicative); }
  Node parse_multiplicative() { return parse_binary_level({"*", "/"}, &Parser::parse_unary); }

  Node parse_unary() {
    const Token& t = peek();
    if (t.is_op("-") || t.is_op("!")) {
      SourceLoc loc = loc_of(t);
      std::string op = advance().text;
      Node operand = parse_unary();
      return Node(NodeKind::Call, {Node::symbol(op, loc), std::move(operand)}, loc);
    }
    return parse_postfix();
  }

  Node parse_postfix() {
    Node e = parse_primary();
    while (true) {
      const Token& t = toks_[pos_];
      if (t.is_op("(") && !t.space_before) {
        e = parse_call(std::move(e));
      } else if (t.is_op("[") && !t.space_before) {
        SourceLoc loc = e.loc;
        advance();
        newline_significant_.push_back(false);
        Node index = parse_expr();
        newline_significant_.pop_back();
        expect_op("]");
        e = Node(NodeKind::IndexRef, {std::move(e), std::move(index)}, loc);
      } else if (t.is_op(".") && !t.space_before) {
        SourceLoc loc = e.loc;
        advance();
        Node field = Node::symbol(expect_name(), loc_of(toks_[pos_ - 1]));
        e = Node(NodeKind::FieldRef, {std::move(e), std::move(field)}, loc);
      } else {
        return e;
      }
    }
  }

  Node parse_call(Node callee) {
    SourceLoc loc = callee.loc;
    Node call(NodeKind::Call, loc);
    call.children.push_back(std::move(callee));
    for (auto& arg : parse_arguments()) call.children.push_back(std::move(arg));
    return call;
  }

  std::vector<Node> parse_arguments() {
    expect_op("(");
    newline_significant_.push_back(false);
    std::vector<Node> args;
    bool keyword_section = false;
    while (!peek().is_op(")")) {
      if (peek().is_op(";")) {
        advance();
        keyword_section = true;
        continue;
      }
      Node arg = parse_assign_expr();
      if (keyword_section && !arg.is(NodeKind::Assign)) fail("expected keyword argument", peek());
      args.push_back(std::move(arg));
      if (peek().is_op(",")) {
        advance();
      } else if (!peek().is_op(")") && !peek().is_op(";")) {
        fail_unexpected(peek());
      }
    }
    newline_significant_.pop_back();
    expect_op(")");
    return args;
  }

  Node parse_primary() {
    const Token& t = peek();
    SourceLoc loc = loc_of(t);
    switch (t.kind) {
      case TokKind::Int: {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc()) fail("integer literal out of range", t);
        advance();
        return Node::int_lit(v, loc);
      }
      case TokKind::Float: {
        double v = std::stod(t.text);
        advance();
        return Node::float_lit(v, loc);
      }
      case TokKind::String: {
        Token tok = advance();
        return parse_string(tok);
      }
      case TokKind::Macro:
        return parse_macro();
      case TokKind::Op:
        if (t.is_op("(")) return parse_paren();
        if (t.is_op("[")) return parse_array();
        fail_unexpected(t);
      case TokKind::Ident:
        return parse_word();
      default:
        fail_unexpected(t);
    }
  }

  Node parse_word() {
    const Token& t = peek();
    SourceLoc loc = loc_of(t);
    const std::string& w = t.text;
    if (w == "true" || w == "false") {
      advance();
      return Node::bool_lit(w == "true", loc);
    }
    if (w == "begin") {
      advance();
      newline_significant_.push_back(true);
      Node body = parse_block({"end"});
      expect_keyword("end");
      newline_significant_.pop_back();
      body.loc = loc;
      return body;
    }
    if (w == "if") return parse_if();
    if (w == "for") return parse_for();
    if (w == "let") return parse_let();
    if (w == "try") return parse_try();
    if (w == "return") {
      advance();
      Node ret(NodeKind::Return, loc);
      const Token& n = toks_[pos_];
      bool ends = n.kind == TokKind::Newline || n.kind == TokKind::Eof || n.is_op(";") ||
                  n.is_op(")") || n.is_op("]") || n.is_op(",") || n.is_ident("end");
      if (!ends) ret.children.push_back(parse_assign_expr());
      return ret;
    }
    if (kKeywords.count(w)) fail_unexpected(t);
    const Token& next = toks_[pos_ + 1];
    bool call_follows = next.is_op("(") && !next.space_before;
    if (call_follows && (w == "include" || w == "throw")) {
      advance();
      auto args = parse_arguments();
      if (args.size() != 1) fail(w + " takes exactly one argument", peek());
      return Node(w == "include" ? NodeKind::Include : NodeKind::Throw, std::move(args), loc);
    }
    if (call_follows && w == "Dict") {
      advance();
      return parse_dict(loc);
    }
    advance();
    return Node::symbol(w, loc);
  }

  Node parse_dict(const SourceLoc& loc) {
    expect_op("(");
    newline_significant_.push_back(false);
    Node map(NodeKind::MapLit, loc);
    while (!peek().is_op(")")) {
      map.children.push_back(parse_expr());
      expect_op("=>");
      map.children.push_back(parse_expr());
      if (peek().is_op(",")) {
        advance();
      } else if (!peek().is_op(")")) {
        fail_unexpected(peek());
      }
    }
    newline_significant_.pop_back();
    expect_op(")");
    return map;
  }

  Node parse_paren() {
    SourceLoc loc = loc_of(peek());
    expect_op("(");
    newline_significant_.push_back(false);
    if (peek().is_op(")")) {
      newline_significant_.pop_back();
      advance();
      return Node(NodeKind::TupleLit, loc);
    }
    Node first = parse_assign_expr();
    if (peek().is_op(")")) {
      newline_significant_.pop_back();
      advance();
      return first;
    }
    Node tuple(NodeKind::TupleLit, loc);
    tuple.children.push_back(std::move(first));
    while (peek().is_op(",")) {
      advance();
      if (peek().is_op(")")) break;
      tuple.children.push_back(parse_assign_expr());
    }
    newline_significant_.pop_back();
    expect_op(")");
    return tuple;
  }

  Node parse_array() {
    SourceLoc loc = loc_of(peek());
    expect_op("[");
    newline_significant_.push_back(false);
    Node array(NodeKind::ArrayLit, loc);
    while (!peek().is_op("]")) {
      array.children.push_back(parse_expr());
      if (peek().is_op(",")) {
        advance();
      } else if (!peek().is_op("]")) {
        fail_unexpected(peek());
      }
    }
    newline_significant_.pop_back();
    expect_op("]");
    return array;
  }

  Node parse_macro() {
    Token t = advance();
    SourceLoc loc = loc_of(t);
    const std::string& name = t.text;
    if (name == "@time") {
      Node arg = parse_expr();
      return Node(NodeKind::MacroCall, {Node::symbol(name, loc), std::move(arg)}, loc);
    }
    if (name == "@isdefined") {
      expect_op("(");
      Node var = Node::symbol(expect_name(), loc);
      expect_op(")");
      return Node(NodeKind::MacroCall, {Node::symbol(name, loc), std::move(var)}, loc);
    }
    if (name == "@attr") {
      const Token& s = peek();
      if (s.kind != TokKind::String) fail("@attr expects a string name", s);
      Node label = parse_string(advance());
      if (!label.is(NodeKind::StringLit)) fail("@attr name cannot be interpolated", s);
      Node target = parse_statement();
      return Node(NodeKind::AttrAnnot, {std::move(label), std::move(target)}, loc);
    }
    if (opts_.allow_holes && kHoleNoArgs.count(name)) {
      return Node(NodeKind::MacroCall, {Node::symbol(name, loc)}, loc);
    }
    if (opts_.allow_holes && kHoleWithArg.count(name)) {
      const Token& open = toks_[pos_];
      if (!open.is_op("(") || open.space_before) fail(name + " expects '('", open);
      advance();
      Node arg = peek().kind == TokKind::Int ? parse_primary()
                                             : Node::symbol(expect_name(), loc_of(peek()));
      expect_op(")");
      return Node(NodeKind::MacroCall, {Node::symbol(name, loc), std::move(arg)}, loc);
    }
    throw SyntaxError("unknown macro " + name, loc);
  }

  Node parse_if() {
    SourceLoc loc = loc_of(peek());
    advance();  // `if` or `elseif`
    newline_significant_.push_back(true);
    Node cond = parse_expr();
    Node then_block = parse_block({"elseif", "else", "end"});
    Node else_part = Node::empty();
    if (at_keyword("elseif")) {
      else_part = parse_if_tail();
    } else {
      if (at_keyword("else")) {
        advance();
        else_part = parse_block({"end"});
      }
      expect_keyword("end");
    }
    newline_significant_.pop_back();
    return Node(NodeKind::If, {std::move(cond), std::move(then_block), std::move(else_part)}, loc);
  }

  // An `elseif` chain shares the closing `end` of the outer `if`.
  Node parse_if_tail() {
    SourceLoc loc = loc_of(peek());
    advance();
    Node cond = parse_expr();
    Node then_block = parse_block({"elseif", "else", "end"});
    Node else_part = Node::empty();
    if (at_keyword("elseif")) {
      else_part = parse_if_tail();
    } else {
      if (at_keyword("else")) {
        advance();
        else_part = parse_block({"end"});
      }
      expect_keyword("end");
    }
    return Node(NodeKind::If, {std::move(cond), std::move(then_block), std::move(else_part)}, loc);
  }

  Node parse_for() {
    SourceLoc loc = loc_of(peek());
    advance();
    newline_significant_.push_back(true);
    Node loop(NodeKind::For, loc);
    while (true) {
      SourceLoc iloc = loc_of(peek());
      Node var = Node::symbol(expect_name(), iloc);
      expect_keyword("in");
      Node range = parse_expr();
      loop.children.push_back(Node(NodeKind::Iter, {std::move(var), std::move(range)}, iloc));
      if (!peek().is_op(",")) break;
      advance();
    }
    loop.children.push_back(parse_block({"end"}));
    expect_keyword("end");
    newline_significant_.pop_back();
    return loop;
  }

  Node parse_let() {
    SourceLoc loc = loc_of(peek());
    advance();
    newline_significant_.push_back(true);
    Node let(NodeKind::Let, loc);
    if (peek().kind == TokKind::Ident && !kKeywords.count(peek().text)) {
      while (true) {
        SourceLoc bloc = loc_of(peek());
        Node var = Node::symbol(expect_name(), bloc);
        expect_op("=");
        skip_newlines();
        Node value = parse_expr();
        let.children.push_back(Node(NodeKind::Assign, {std::move(var), std::move(value)}, bloc));
        if (!peek().is_op(",")) break;
        advance();
        skip_newlines();
      }
    }
    let.children.push_back(parse_block({"end"}));
    expect_keyword("end");
    newline_significant_.pop_back();
    return let;
  }

  Node parse_try() {
    SourceLoc loc = loc_of(peek());
    advance();
    newline_significant_.push_back(true);
    Node body = parse_block({"catch", "finally", "end"});
    Node var = Node::empty();
    Node handler = Node::empty();
    Node finally_block = Node::empty();
    if (at_keyword("catch")) {
      advance();
      const Token& v = toks_[pos_];
      if (v.kind == TokKind::Ident && !kKeywords.count(v.text)) {
        var = Node::symbol(v.text, loc_of(v));
        advance();
      }
      handler = parse_block({"finally", "end"});
    }
    if (at_keyword("finally")) {
      advance();
      finally_block = parse_block({"end"});
    }
    expect_keyword("end");
    newline_significant_.pop_back();
    return Node(NodeKind::TryCatchFinally,
                {std::move(body), std::move(var), std::move(handler), std::move(finally_block)},
                loc);
  }

  Node parse_string(const Token& tok) {
    SourceLoc loc = loc_of(tok);
    const std::string& raw = tok.text;
    std::vector<Node> parts;
    std::string lit;
    auto flush = [&] {
      if (!lit.empty()) parts.push_back(Node::string_lit(std::move(lit), loc));
      lit.clear();
    };
    bool interpolated = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      char c = raw[i];
      if (c == '\\' && i + 1 < raw.size()) {
        char e = raw[++i];
        switch (e) {
          case 'n': lit += '\n'; break;
          case 't': lit += '\t'; break;
          case '\\': lit += '\\'; break;
          case '"': lit += '"'; break;
          case '$': lit += '$'; break;
          default: throw SyntaxError(std::string("unknown escape \\") + e, loc);
        }
        continue;
      }
      if (c == '$') {
        interpolated = true;
        flush();
        if (i + 1 < raw.size() && raw[i + 1] == '(') {
          int depth = 0;
          std::size_t j = i + 1;
          bool in_str = false;
          for (; j < raw.size(); ++j) {
            if (in_str) {
              if (raw[j] == '\\') ++j;
              else if (raw[j] == '"') in_str = false;
              continue;
            }
            if (raw[j] == '"') in_str = true;
            if (raw[j] == '(') ++depth;
            if (raw[j] == ')' && --depth == 0) break;
          }
          if (j >= raw.size()) throw SyntaxError("unterminated interpolation", loc);
          std::string inner = raw.substr(i + 2, j - i - 2);
          ParseOptions sub = opts_;
          sub.first_line = tok.line;
          Parser p(detail::tokenize(inner, file_, tok.line), file_, sub);
          parts.push_back(p.single_expression());
          i = j;
        } else {
          std::size_t j = i + 1;
          while (j < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[j])) || raw[j] == '_')) ++j;
          if (j == i + 1) throw SyntaxError("empty interpolation after '$'", loc);
          parts.push_back(Node::symbol(raw.substr(i + 1, j - i - 1), loc));
          i = j - 1;
        }
        continue;
      }
      lit += c;
    }
    if (!interpolated) return Node::string_lit(std::move(lit), loc);
    flush();
    return Node(NodeKind::StringInterp, std::move(parts), loc);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string file_;
  ParseOptions opts_;
  std::vector<bool> newline_significant_;
};

}  // namespace

Node parse(std::string_view source, const std::string& filename, const ParseOptions& options) {
  Parser parser(detail::tokenize(source, filename, options.first_line), filename, options);
  return parser.program();
}

}  // namespace hlweave

#pragma once

#include <random>
#include <string>
#include <vector>

#include "hlweave/syntax.hpp"

namespace gen {

using hlweave::Node;
using hlweave::NodeKind;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(eng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
};

inline Node sym(const std::string& s) { return Node::symbol(s); }

inline Node call(const std::string& f, std::vector<Node> args) {
  std::vector<Node> kids{sym(f)};
  for (auto& a : args) kids.push_back(std::move(a));
  return Node(NodeKind::Call, std::move(kids));
}

inline Node param(const std::string& name, Node type = Node::empty(), Node def = Node::empty()) {
  return Node(NodeKind::Param, {sym(name), std::move(type), std::move(def)});
}

/// Random trees in the canonical shape the parser produces. Not meant to run.
class SyntaxGen {
 public:
  explicit SyntaxGen(Rng& rng) : r_(rng) {}

  Node program() {
    std::vector<Node> stmts;
    int n = r_.range(1, 5);
    for (int i = 0; i < n; ++i) stmts.push_back(top_statement());
    return hlweave::make_block(std::move(stmts));
  }

  Node expr(int depth) {
    if (depth <= 0) return leaf();
    switch (r_.range(0, 16)) {
      case 0: return call(r_.pick(binops_), {expr(depth - 1), expr(depth - 1)});
      case 1: return call(r_.chance(0.5) ? "-" : "!", {expr(depth - 1)});
      case 2: {
        std::vector<Node> args;
        int n = r_.range(0, 3);
        for (int i = 0; i < n; ++i) args.push_back(expr(depth - 1));
        if (r_.chance(0.3)) {
          args.push_back(Node(NodeKind::Assign, {sym(name()), expr(depth - 1)}));
        }
        return call(fname(), std::move(args));
      }
      case 3: return Node(r_.chance(0.5) ? NodeKind::AndAnd : NodeKind::OrOr,
                          {expr(depth - 1), expr(depth - 1)});
      case 4: {
        Node a(NodeKind::ArrayLit);
        int n = r_.range(0, 3);
        for (int i = 0; i < n; ++i) a.children.push_back(expr(depth - 1));
        return a;
      }
      case 5: {
        Node t(NodeKind::TupleLit);
        int n = r_.range(0, 3);
        bool named = r_.chance(0.3);
        for (int i = 0; i < n; ++i) {
          t.children.push_back(named ? Node(NodeKind::Assign, {sym(name()), expr(depth - 1)})
                                     : expr(depth - 1));
        }
        return t;
      }
      case 6: return Node(NodeKind::IndexRef, {postfix_base(depth - 1), expr(depth - 1)});
      case 7: return Node(NodeKind::FieldRef, {postfix_base(depth - 1), sym(name())});
      case 8: return Node(NodeKind::Range, {range_operand(depth - 1), range_operand(depth - 1)});
      case 9: {
        Node m(NodeKind::MapLit);
        int n = r_.range(0, 2);
        for (int i = 0; i < n; ++i) {
          m.children.push_back(string_lit());
          m.children.push_back(expr(depth - 1));
        }
        return m;
      }
      case 10: {
        Node ps(NodeKind::Params);
        int n = r_.range(1, 2);
        for (int i = 0; i < n; ++i) ps.children.push_back(param(name()));
        return Node(NodeKind::Lambda, {std::move(ps), expr(depth - 1)});
      }
      case 11: {
        Node s(NodeKind::StringInterp);
        int n = r_.range(1, 2);
        s.children.push_back(Node::string_lit(word()));
        for (int i = 0; i < n; ++i) {
          Node part = expr(depth - 1);
          // A literal part would merge into the surrounding text.
          if (part.is(NodeKind::StringLit)) part = call(fname(), {std::move(part)});
          s.children.push_back(std::move(part));
          s.children.push_back(Node::string_lit(word()));
        }
        return s;
      }
      case 12: return Node(NodeKind::MacroCall, {sym("@time"), call(fname(), {expr(depth - 1)})});
      case 13: return if_node(depth - 1);
      case 14: return block(depth - 1);
      default: return leaf();
    }
  }

  Node statement(int depth) {
    switch (r_.range(0, 12)) {
      case 0: return Node(NodeKind::Assign, {sym(name()), expr(depth)});
      case 1: return Node(NodeKind::OpAssign, {sym(name()), expr(depth)});
      case 2: return Node(NodeKind::IndexAssign, {sym(name()), expr(depth), expr(depth)});
      case 3: return Node(NodeKind::FieldAssign, {sym(name()), sym(name()), expr(depth)});
      case 4: return if_node(depth);
      case 5: return for_node(depth);
      case 6: {
        Node let(NodeKind::Let);
        int n = r_.range(0, 2);
        for (int i = 0; i < n; ++i) let.children.push_back(Node(NodeKind::Assign, {sym(name()), expr(depth)}));
        let.children.push_back(block(depth));
        return let;
      }
      case 7: {
        int shape = r_.range(0, 2);
        Node var = shape != 1 && r_.chance(0.7) ? sym("e") : Node::empty();
        Node handler = shape != 1 ? block(depth) : Node::empty();
        if (shape == 1) var = Node::empty();
        Node fin = shape != 0 ? block(depth) : Node::empty();
        return Node(NodeKind::TryCatchFinally, {block(depth), std::move(var), std::move(handler), std::move(fin)});
      }
      case 8: return Node(NodeKind::Return, {expr(depth)});
      case 9: return Node(NodeKind::Throw, {expr(depth)});
      case 10: return hlweave::Node(NodeKind::MacroCall, {sym("@time"), call(fname(), {})});
      default: return expr(depth);
    }
  }

  Node for_node(int depth) {
    Node f(NodeKind::For);
    int n = r_.range(1, 4);
    for (int i = 0; i < n; ++i) {
      f.children.push_back(Node(NodeKind::Iter, {sym(name()), Node(NodeKind::Range, {Node::int_lit(1), Node::int_lit(r_.range(1, 9))})}));
    }
    f.children.push_back(block(depth));
    return f;
  }

 private:
  Node top_statement() {
    switch (r_.range(0, 5)) {
      case 0: return function_def(2);
      case 1: {
        Node ps(NodeKind::Params);
        ps.children.push_back(param(name()));
        return Node(NodeKind::ShortFuncDef, {sym(fname()), std::move(ps), expr(2)});
      }
      case 2: {
        std::vector<Node> body;
        int n = r_.range(0, 3);
        for (int i = 0; i < n; ++i) {
          body.push_back(Node(NodeKind::Field, {sym(name()), r_.chance(0.5) ? sym("Int64") : Node::empty()}));
        }
        if (r_.chance(0.4)) body.push_back(function_def(1));
        return Node(NodeKind::StructDef, {sym("S" + std::to_string(r_.range(0, 3))), Node::bool_lit(r_.chance(0.3)),
                                          hlweave::make_block(std::move(body))});
      }
      case 3: {
        std::vector<Node> body;
        int n = r_.range(0, 3);
        for (int i = 0; i < n; ++i) body.push_back(r_.chance(0.5) ? function_def(1) : statement(1));
        return Node(NodeKind::Module, {sym("M" + std::to_string(r_.range(0, 3))), hlweave::make_block(std::move(body))});
      }
      default: return statement(2);
    }
  }

  Node function_def(int depth) {
    Node ps(NodeKind::Params);
    int n = r_.range(0, 3);
    for (int i = 0; i < n; ++i) {
      Node type = r_.chance(0.3) ? sym(r_.pick(types_)) : Node::empty();
      ps.children.push_back(param(name(), std::move(type)));
    }
    if (r_.chance(0.2)) ps.children.push_back(Node(NodeKind::VarParam, {sym("rest"), Node::empty(), Node::empty()}));
    if (r_.chance(0.2)) ps.children.push_back(Node(NodeKind::KwParam, {sym("k"), Node::empty(), Node::int_lit(1)}));
    return Node(NodeKind::FunctionDef, {sym(fname()), std::move(ps), block(depth)});
  }

  Node block(int depth) {
    std::vector<Node> stmts;
    int n = r_.range(1, 3);
    for (int i = 0; i < n; ++i) stmts.push_back(depth > 0 ? statement(depth - 1) : leaf());
    return hlweave::make_block(std::move(stmts));
  }

  Node if_node(int depth) {
    Node els = Node::empty();
    int shape = r_.range(0, 2);
    if (shape == 1) els = block(depth);
    if (shape == 2 && depth > 0) els = if_node(depth - 1);
    return Node(NodeKind::If, {expr(depth), block(depth), std::move(els)});
  }

  Node postfix_base(int depth) {
    if (depth <= 0 || r_.chance(0.5)) return sym(name());
    return call(fname(), {expr(depth - 1)});
  }

  Node range_operand(int depth) {
    Node e = expr(depth);
    // Range binds looser than arithmetic but tighter than comparisons; keep
    // operands unambiguous by wrapping anything else in a call.
    if (e.is(NodeKind::Range) || e.is(NodeKind::AndAnd) || e.is(NodeKind::OrOr) ||
        e.is(NodeKind::Lambda)) {
      return call(fname(), {std::move(e)});
    }
    return e;
  }

  Node leaf() {
    switch (r_.range(0, 5)) {
      case 0: return Node::int_lit(r_.range(0, 1000));
      case 1: return Node::float_lit(r_.range(0, 4000) / 8.0);
      case 2: return Node::bool_lit(r_.chance(0.5));
      case 3: return string_lit();
      default: return sym(name());
    }
  }

  Node string_lit() {
    static const std::string chars = "ab xyz\"\\$\n\t{}#=";
    std::string s;
    int n = r_.range(0, 6);
    for (int i = 0; i < n; ++i) s += chars[static_cast<std::size_t>(r_.range(0, static_cast<int>(chars.size()) - 1))];
    return Node::string_lit(s);
  }

  std::string word() {
    static const std::vector<std::string> words{"a", "val ", " = ", "x:", "!"};
    return r_.pick(words);
  }

  std::string name() { return r_.pick(names_); }
  std::string fname() { return r_.pick(fnames_); }

  Rng& r_;
  std::vector<std::string> names_{"x", "y", "z", "ary", "acc", "i", "j", "value"};
  std::vector<std::string> fnames_{"f", "g", "foo", "bar", "push!", "println", "mk_1"};
  std::vector<std::string> binops_{"+", "-", "*", "/", "<", ">", "<=", ">=", "==", "!="};
  std::vector<std::string> types_{"Int64", "Float64", "String", "Any"};
};

/// Random runnable programs over integers. Helpers h1..hn take two
/// arguments; `counter!` probes record every evaluation of a call argument.
struct Program {
  Node ast;
  bool may_throw = false;
};

class RunnableGen {
 public:
  explicit RunnableGen(Rng& rng) : r_(rng) {}

  Program program(bool allow_throw) {
    Program p;
    std::vector<Node> stmts;
    int helpers = r_.range(1, 4);
    for (int k = 1; k <= helpers; ++k) {
      std::vector<std::string> scope{"a", "b"};
      std::vector<Node> body;
      if (allow_throw && r_.chance(0.5)) {
        p.may_throw = true;
        Node cond = call(">", {sym("a"), Node::int_lit(r_.range(0, 12))});
        Node raise = call("error", {Node::string_lit("boom in h" + std::to_string(k))});
        body.push_back(Node(NodeKind::If, {std::move(cond), hlweave::make_block({raise}), Node::empty()}));
      }
      int locals = r_.range(0, 2);
      for (int i = 0; i < locals; ++i) {
        std::string t = "t" + std::to_string(i + 1);
        body.push_back(Node(NodeKind::Assign, {sym(t), expr(2, scope, k - 1)}));
        scope.push_back(t);
      }
      body.push_back(expr(2, scope, k - 1));
      Node ps(NodeKind::Params, {param("a"), param("b")});
      stmts.push_back(Node(NodeKind::FunctionDef, {sym("h" + std::to_string(k)), std::move(ps),
                                                   hlweave::make_block(std::move(body))}));
    }
    std::vector<std::string> scope;
    std::vector<Node> body;
    int vars = r_.range(1, 4);
    for (int i = 0; i < vars; ++i) {
      std::string x = "x" + std::to_string(i + 1);
      body.push_back(Node(NodeKind::Assign, {sym(x), expr(3, scope, helpers)}));
      scope.push_back(x);
    }
    body.push_back(expr(2, scope, helpers));
    stmts.push_back(Node(NodeKind::FunctionDef, {sym("main"), Node(NodeKind::Params),
                                                 hlweave::make_block(std::move(body))}));
    p.ast = hlweave::make_block(std::move(stmts));
    return p;
  }

 private:
  Node expr(int depth, const std::vector<std::string>& scope, int helpers) {
    if (depth <= 0) {
      if (!scope.empty() && r_.chance(0.5)) return sym(r_.pick(scope));
      if (r_.chance(0.4)) return probe();
      return Node::int_lit(r_.range(0, 9));
    }
    switch (r_.range(0, 6)) {
      case 0:
      case 1:
        if (helpers > 0) {
          return call("h" + std::to_string(r_.range(1, helpers)),
                      {expr(depth - 1, scope, helpers), expr(depth - 1, scope, helpers)});
        }
        [[fallthrough]];
      case 2: return call(r_.chance(0.5) ? "+" : "-", {expr(depth - 1, scope, helpers), expr(depth - 1, scope, helpers)});
      case 3: return call("*", {expr(depth - 1, scope, helpers), Node::int_lit(r_.range(0, 3))});
      case 4: {
        Node cond = call("<", {expr(depth - 1, scope, helpers), expr(depth - 1, scope, helpers)});
        return Node(NodeKind::If, {std::move(cond), hlweave::make_block({expr(depth - 1, scope, helpers)}),
                                   hlweave::make_block({expr(depth - 1, scope, helpers)})});
      }
      case 5: return probe();
      default: return expr(0, scope, helpers);
    }
  }

  Node probe() { return call("counter!", {Node::string_lit("L" + std::to_string(r_.range(0, 5)))}); }

  Rng& r_;
};

}  // namespace gen

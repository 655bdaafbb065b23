#include <charconv>
#include <set>
#include <sstream>

#include "hlweave/syntax.hpp"

namespace hlweave {

namespace {

constexpr int kPrecLowest = 0;
constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecCompare = 3;
constexpr int kPrecRange = 4;
constexpr int kPrecAdd = 5;
constexpr int kPrecMul = 6;
constexpr int kPrecUnary = 7;
constexpr int kPrecAtom = 8;

int binary_prec(std::string_view op) {
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "==" || op == "!=") {
    return kPrecCompare;
  }
  if (op == "+" || op == "-") return kPrecAdd;
  if (op == "*" || op == "/") return kPrecMul;
  return -1;
}

bool is_binary_call(const Node& n) {
  return n.is(NodeKind::Call) && n.children.size() == 3 && n.children[0].is(NodeKind::Symbol) &&
         binary_prec(n.children[0].text()) >= 0 && !n.children[1].is(NodeKind::Assign) &&
         !n.children[2].is(NodeKind::Assign);
}

bool is_unary_call(const Node& n) {
  if (!n.is(NodeKind::Call) || n.children.size() != 2 || !n.children[0].is(NodeKind::Symbol)) {
    return false;
  }
  const auto& op = n.children[0].text();
  return (op == "-" || op == "!") && !n.children[1].is(NodeKind::Assign);
}

std::string escape_string(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '$': out += "\\$"; break;
      default: out += c;
    }
  }
  return out;
}

std::string format_float(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

class Printer {
 public:
  explicit Printer(const PrintOptions& opts) : opts_(opts) {}

  std::string top(const Node& node) {
    if (node.is(NodeKind::Block)) {
      std::string out;
      body(node, 0, out);
      return out;
    }
    if (node.is(NodeKind::LineInfo)) return line_comment(node);
    return expr(node, kPrecLowest, 0);
  }

 private:
  static std::string indent(int level) { return std::string(static_cast<std::size_t>(level) * 4, ' '); }

  std::string line_comment(const Node& n) const {
    const auto& loc = n.loc;
    if (!loc.provenance.empty()) {
      return "#= AOP: " + loc.provenance + " ##= " + to_string(loc) + " =##:0 =#";
    }
    return "#= " + to_string(loc) + " =#";
  }

  void body(const Node& block, int level, std::string& out) {
    for (const auto& child : block.children) {
      if (child.is(NodeKind::LineInfo)) {
        if (opts_.line_comments) out += indent(level) + line_comment(child) + "\n";
        continue;
      }
      out += indent(level) + expr(child, kPrecLowest, level) + "\n";
    }
  }

  std::string params(const Node& p, int level) {
    std::string out = "(";
    bool first = true;
    bool kw_started = false;
    for (const auto& param : p.children) {
      bool kw = param.is(NodeKind::KwParam) || param.is(NodeKind::KwVarParam);
      if (kw && !kw_started) {
        out += "; ";
        kw_started = true;
      } else if (!first) {
        out += ", ";
      }
      first = false;
      out += param.children[0].text();
      if (param.children[1].is(NodeKind::Symbol)) out += "::" + param.children[1].text();
      if (param.is(NodeKind::VarParam) || param.is(NodeKind::KwVarParam)) out += "...";
      if (!param.children[2].is(NodeKind::Empty)) {
        out += " = " + expr(param.children[2], kPrecOr, level);
      }
    }
    return out + ")";
  }

  std::string args(const std::vector<Node>& kids, std::size_t from, int level) {
    std::string out = "(";
    for (std::size_t i = from; i < kids.size(); ++i) {
      if (i > from) out += ", ";
      out += expr(kids[i], kPrecLowest, level);
    }
    return out + ")";
  }

  static int prec_of(const Node& n) {
    switch (n.kind) {
      case NodeKind::Assign:
      case NodeKind::OpAssign:
      case NodeKind::IndexAssign:
      case NodeKind::FieldAssign:
      case NodeKind::Lambda:
      case NodeKind::Return:
      case NodeKind::AttrAnnot:
      case NodeKind::ShortFuncDef:
        return kPrecLowest;
      case NodeKind::MacroCall:
        return n.children.size() == 2 && n.children[0].text() == "@time" ? kPrecLowest
                                                                          : kPrecAtom;
      case NodeKind::OrOr:
        return kPrecOr;
      case NodeKind::AndAnd:
        return kPrecAnd;
      case NodeKind::Range:
        return kPrecRange;
      case NodeKind::Call:
        if (is_binary_call(n)) return binary_prec(n.children[0].text());
        if (is_unary_call(n)) return kPrecUnary;
        return kPrecAtom;
      default:
        return kPrecAtom;
    }
  }

  std::string expr(const Node& n, int min_prec, int level) {
    std::string s = raw(n, level);
    if (prec_of(n) < min_prec) return "(" + s + ")";
    return s;
  }

  std::string raw(const Node& n, int level) {
    const auto& k = n.children;
    switch (n.kind) {
      case NodeKind::Symbol:
        return n.text();
      case NodeKind::IntLit:
        return std::to_string(n.int_value());
      case NodeKind::FloatLit:
        return format_float(n.float_value());
      case NodeKind::BoolLit:
        return n.bool_value() ? "true" : "false";
      case NodeKind::StringLit:
        return "\"" + escape_string(n.text()) + "\"";
      case NodeKind::StringInterp: {
        std::string out = "\"";
        for (const auto& part : k) {
          if (part.is(NodeKind::StringLit)) {
            out += escape_string(part.text());
          } else {
            out += "$(" + expr(part, kPrecLowest, level) + ")";
          }
        }
        return out + "\"";
      }
      case NodeKind::Module: {
        std::string out = "module " + k[0].text() + "\n";
        body(k[1], level, out);
        return out + indent(level) + "end";
      }
      case NodeKind::FunctionDef: {
        std::string out = "function " + k[0].text() + params(k[1], level) + "\n";
        body(k[2], level + 1, out);
        return out + indent(level) + "end";
      }
      case NodeKind::ShortFuncDef:
        return k[0].text() + params(k[1], level) + " = " + expr(k[2], kPrecLowest, level);
      case NodeKind::Lambda: {
        std::string body_text;
        if (k[1].is(NodeKind::Block)) {
          body_text = raw(k[1], level);
        } else {
          body_text = expr(k[1], kPrecLowest, level);
        }
        return params(k[0], level) + " -> " + body_text;
      }
      case NodeKind::StructDef: {
        std::string out = std::string(k[1].bool_value() ? "mutable " : "") + "struct " +
                          k[0].text() + "\n";
        body(k[2], level + 1, out);
        return out + indent(level) + "end";
      }
      case NodeKind::Field:
        return k[0].text() + (k[1].is(NodeKind::Symbol) ? "::" + k[1].text() : "");
      case NodeKind::Call: {
        if (is_binary_call(n)) {
          int p = binary_prec(k[0].text());
          return expr(k[1], p, level) + " " + k[0].text() + " " + expr(k[2], p + 1, level);
        }
        if (is_unary_call(n)) return k[0].text() + expr(k[1], kPrecUnary, level);
        return expr(k[0], kPrecAtom, level) + args(k, 1, level);
      }
      case NodeKind::MacroCall: {
        const auto& name = k[0].text();
        if (name == "@time") return name + " " + expr(k[1], kPrecLowest, level);
        if (k.size() == 1) return name;
        return name + "(" + raw(k[1], level) + ")";
      }
      case NodeKind::Assign:
        return expr(k[0], kPrecAtom, level) + " = " + expr(k[1], kPrecLowest, level);
      case NodeKind::OpAssign:
        return expr(k[0], kPrecAtom, level) + " += " + expr(k[1], kPrecLowest, level);
      case NodeKind::IndexAssign:
        return expr(k[0], kPrecAtom, level) + "[" + expr(k[1], kPrecLowest + 1, level) +
               "] = " + expr(k[2], kPrecLowest, level);
      case NodeKind::FieldAssign:
        return expr(k[0], kPrecAtom, level) + "." + k[1].text() + " = " +
               expr(k[2], kPrecLowest, level);
      case NodeKind::IndexRef:
        return expr(k[0], kPrecAtom, level) + "[" + expr(k[1], kPrecLowest + 1, level) + "]";
      case NodeKind::FieldRef:
        return expr(k[0], kPrecAtom, level) + "." + k[1].text();
      case NodeKind::For: {
        std::string out = "for ";
        for (std::size_t i = 0; i + 1 < k.size(); ++i) {
          if (i > 0) out += ", ";
          out += k[i].children[0].text() + " in " + expr(k[i].children[1], kPrecOr, level);
        }
        out += "\n";
        body(k.back(), level + 1, out);
        return out + indent(level) + "end";
      }
      case NodeKind::If: {
        std::string out = "if " + expr(k[0], kPrecOr, level) + "\n";
        if_tail(n, level, out);
        return out + indent(level) + "end";
      }
      case NodeKind::Let: {
        std::string out = "let";
        for (std::size_t i = 0; i + 1 < k.size(); ++i) {
          out += (i == 0 ? " " : ", ") + k[i].children[0].text() + " = " +
                 expr(k[i].children[1], kPrecOr, level);
        }
        out += "\n";
        body(k.back(), level + 1, out);
        return out + indent(level) + "end";
      }
      case NodeKind::TryCatchFinally: {
        std::string out = "try\n";
        body(k[0], level + 1, out);
        if (k[2].is(NodeKind::Block)) {
          out += indent(level) + "catch";
          if (k[1].is(NodeKind::Symbol)) out += " " + k[1].text();
          out += "\n";
          body(k[2], level + 1, out);
        }
        if (k[3].is(NodeKind::Block)) {
          out += indent(level) + "finally\n";
          body(k[3], level + 1, out);
        }
        return out + indent(level) + "end";
      }
      case NodeKind::Throw:
        return "throw(" + expr(k[0], kPrecLowest, level) + ")";
      case NodeKind::Include:
        return "include(" + expr(k[0], kPrecLowest, level) + ")";
      case NodeKind::Block: {
        std::string out = "begin\n";
        body(n, level + 1, out);
        return out + indent(level) + "end";
      }
      case NodeKind::AndAnd:
        return expr(k[0], kPrecAnd, level) + " && " + expr(k[1], kPrecAnd + 1, level);
      case NodeKind::OrOr:
        return expr(k[0], kPrecOr, level) + " || " + expr(k[1], kPrecOr + 1, level);
      case NodeKind::Return:
        return k.empty() ? "return" : "return " + expr(k[0], kPrecLowest, level);
      case NodeKind::ArrayLit: {
        std::string out = "[";
        for (std::size_t i = 0; i < k.size(); ++i) {
          if (i > 0) out += ", ";
          out += expr(k[i], kPrecOr, level);
        }
        return out + "]";
      }
      case NodeKind::TupleLit: {
        if (k.size() == 1) return "(" + expr(k[0], kPrecLowest, level) + ",)";
        return args(k, 0, level);
      }
      case NodeKind::MapLit: {
        std::string out = "Dict(";
        for (std::size_t i = 0; i + 1 < k.size(); i += 2) {
          if (i > 0) out += ", ";
          out += expr(k[i], kPrecOr, level) + " => " + expr(k[i + 1], kPrecOr, level);
        }
        return out + ")";
      }
      case NodeKind::Range:
        return expr(k[0], kPrecRange + 1, level) + ":" + expr(k[1], kPrecRange + 1, level);
      case NodeKind::AttrAnnot:
        return "@attr " + raw(k[0], level) + " " + expr(k[1], kPrecLowest, level);
      case NodeKind::LineInfo:
        return line_comment(n);
      case NodeKind::Aj:
        throw Error("cannot print an un-emitted join-point node", n.loc);
      case NodeKind::Params:
        return params(n, level);
      case NodeKind::Param:
      case NodeKind::VarParam:
      case NodeKind::KwParam:
      case NodeKind::KwVarParam:
      case NodeKind::Iter:
      case NodeKind::Empty:
        break;
    }
    throw Error(std::string("cannot print a ") + std::string(kind_name(n.kind)) +
                    " node outside its parent",
                n.loc);
  }

  void if_tail(const Node& n, int level, std::string& out) {
    const auto& k = n.children;
    body(k[1], level + 1, out);
    if (k[2].is(NodeKind::If)) {
      out += indent(level) + "elseif " + expr(k[2].children[0], kPrecOr, level) + "\n";
      if_tail(k[2], level, out);
    } else if (k[2].is(NodeKind::Block)) {
      out += indent(level) + "else\n";
      body(k[2], level + 1, out);
    }
  }

  const PrintOptions& opts_;
};

}  // namespace

std::string print_source(const Node& node, const PrintOptions& options) {
  return Printer(options).top(node);
}

}  // namespace hlweave

#include "hlweave/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace hlweave {

namespace {

struct KindInfo {
  NodeKind kind;
  std::string_view name;
  int min_children;
  int max_children;
};

constexpr std::array kKinds = {
    KindInfo{NodeKind::Module, "Module", 2, 2},
    KindInfo{NodeKind::FunctionDef, "FunctionDef", 3, 3},
    KindInfo{NodeKind::ShortFuncDef, "ShortFuncDef", 3, 3},
    KindInfo{NodeKind::Lambda, "Lambda", 2, 2},
    KindInfo{NodeKind::StructDef, "StructDef", 3, 3},
    KindInfo{NodeKind::Call, "Call", 1, -1},
    KindInfo{NodeKind::MacroCall, "MacroCall", 1, -1},
    KindInfo{NodeKind::Assign, "Assign", 2, 2},
    KindInfo{NodeKind::OpAssign, "OpAssign", 2, 2},
    KindInfo{NodeKind::IndexAssign, "IndexAssign", 3, 3},
    KindInfo{NodeKind::FieldAssign, "FieldAssign", 3, 3},
    KindInfo{NodeKind::IndexRef, "IndexRef", 2, 2},
    KindInfo{NodeKind::FieldRef, "FieldRef", 2, 2},
    KindInfo{NodeKind::For, "For", 2, -1},
    KindInfo{NodeKind::If, "If", 3, 3},
    KindInfo{NodeKind::Let, "Let", 1, -1},
    KindInfo{NodeKind::TryCatchFinally, "TryCatchFinally", 4, 4},
    KindInfo{NodeKind::Throw, "Throw", 1, 1},
    KindInfo{NodeKind::Block, "Block", 0, -1},
    KindInfo{NodeKind::AndAnd, "AndAnd", 2, 2},
    KindInfo{NodeKind::OrOr, "OrOr", 2, 2},
    KindInfo{NodeKind::Return, "Return", 0, 1},
    KindInfo{NodeKind::Symbol, "Symbol", 0, 0},
    KindInfo{NodeKind::IntLit, "IntLit", 0, 0},
    KindInfo{NodeKind::FloatLit, "FloatLit", 0, 0},
    KindInfo{NodeKind::BoolLit, "BoolLit", 0, 0},
    KindInfo{NodeKind::StringLit, "StringLit", 0, 0},
    KindInfo{NodeKind::StringInterp, "StringInterp", 0, -1},
    KindInfo{NodeKind::ArrayLit, "ArrayLit", 0, -1},
    KindInfo{NodeKind::TupleLit, "TupleLit", 0, -1},
    KindInfo{NodeKind::MapLit, "MapLit", 0, -1},
    KindInfo{NodeKind::Range, "Range", 2, 2},
    KindInfo{NodeKind::Include, "Include", 1, 1},
    KindInfo{NodeKind::AttrAnnot, "AttrAnnot", 2, 2},
    KindInfo{NodeKind::Aj, "Aj", 1, 1},
    KindInfo{NodeKind::LineInfo, "LineInfo", 0, 0},
    KindInfo{NodeKind::Params, "Params", 0, -1},
    KindInfo{NodeKind::Param, "Param", 3, 3},
    KindInfo{NodeKind::VarParam, "VarParam", 3, 3},
    KindInfo{NodeKind::KwParam, "KwParam", 3, 3},
    KindInfo{NodeKind::KwVarParam, "KwVarParam", 3, 3},
    KindInfo{NodeKind::Field, "Field", 2, 2},
    KindInfo{NodeKind::Iter, "Iter", 2, 2},
    KindInfo{NodeKind::Empty, "Empty", 0, 0},
};

const KindInfo& info(NodeKind kind) {
  return kKinds[static_cast<std::size_t>(kind)];
}

bool atoms_equal(const Atom& a, const Atom& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<double>(a)) {
    // Bitwise-identical payloads only; NaN never occurs in parsed literals.
    return std::get<double>(a) == std::get<double>(b);
  }
  return a == b;
}

}  // namespace

std::string to_string(const SourceLoc& loc) {
  return loc.file + ":" + std::to_string(loc.line);
}

std::string Error::format(const std::string& message, const SourceLoc& loc) {
  if (loc.file.empty() && loc.line == 0) return message;
  return to_string(loc) + ": " + message;
}

std::string_view kind_name(NodeKind kind) { return info(kind).name; }

std::optional<NodeKind> kind_from_name(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  return std::nullopt;
}

const std::vector<ArityRule>& arity_table() {
  static const std::vector<ArityRule> table = [] {
    std::vector<ArityRule> rules;
    for (const auto& k : kKinds) rules.push_back({k.kind, k.min_children, k.max_children});
    return rules;
  }();
  return table;
}

Node Node::symbol(std::string name, SourceLoc loc) {
  Node n(NodeKind::Symbol, std::move(loc));
  n.atom = std::move(name);
  return n;
}

Node Node::string_lit(std::string text, SourceLoc loc) {
  Node n(NodeKind::StringLit, std::move(loc));
  n.atom = std::move(text);
  return n;
}

Node Node::int_lit(std::int64_t value, SourceLoc loc) {
  Node n(NodeKind::IntLit, std::move(loc));
  n.atom = value;
  return n;
}

Node Node::float_lit(double value, SourceLoc loc) {
  Node n(NodeKind::FloatLit, std::move(loc));
  n.atom = value;
  return n;
}

Node Node::bool_lit(bool value, SourceLoc loc) {
  Node n(NodeKind::BoolLit, std::move(loc));
  n.atom = value;
  return n;
}

Node Node::empty() { return Node(NodeKind::Empty); }

Node Node::line_info(SourceLoc loc) { return Node(NodeKind::LineInfo, std::move(loc)); }

const std::string& Node::text() const { return std::get<std::string>(atom); }

Node make_block(std::vector<Node> statements, const SourceLoc& fallback) {
  Node block(NodeKind::Block, fallback);
  for (auto& stmt : statements) {
    if (stmt.is(NodeKind::LineInfo)) {
      block.children.push_back(std::move(stmt));
      continue;
    }
    SourceLoc loc = stmt.loc.file.empty() ? fallback : stmt.loc;
    loc.provenance.clear();
    block.children.push_back(Node::line_info(std::move(loc)));
    block.children.push_back(std::move(stmt));
  }
  return block;
}

std::vector<Node> block_statements(const Node& block) {
  std::vector<Node> out;
  for (const auto& child : block.children) {
    if (!child.is(NodeKind::LineInfo)) out.push_back(child);
  }
  return out;
}

bool node_equal(const Node& a, const Node& b, bool ignore_lines) {
  if (a.kind != b.kind) return false;
  if (!atoms_equal(a.atom, b.atom)) return false;
  if (a.attrs != b.attrs) return false;
  if (a.aj != b.aj) return false;
  if (!ignore_lines && a.loc != b.loc) return false;
  if (!ignore_lines) {
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
      if (!node_equal(a.children[i], b.children[i], false)) return false;
    }
    return true;
  }
  auto next = [](const std::vector<Node>& kids, std::size_t i) {
    while (i < kids.size() && kids[i].is(NodeKind::LineInfo)) ++i;
    return i;
  };
  std::size_t i = next(a.children, 0);
  std::size_t j = next(b.children, 0);
  while (i < a.children.size() && j < b.children.size()) {
    if (!node_equal(a.children[i], b.children[j], true)) return false;
    i = next(a.children, i + 1);
    j = next(b.children, j + 1);
  }
  return i == a.children.size() && j == b.children.size();
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  for (std::size_t i = 1; i < name.size(); ++i) {
    auto c = static_cast<unsigned char>(name[i]);
    if (!(std::isalnum(c) || c == '_' || c == '!')) return false;
  }
  return true;
}

const Node& node_at(const Node& root, const NodePath& path) {
  const Node* cur = &root;
  for (auto i : path) cur = &cur->children.at(i);
  return *cur;
}

Node& node_at(Node& root, const NodePath& path) {
  Node* cur = &root;
  for (auto i : path) cur = &cur->children.at(i);
  return *cur;
}

bool contains_kind(const Node& node, NodeKind kind) {
  if (node.kind == kind) return true;
  return std::any_of(node.children.begin(), node.children.end(),
                     [kind](const Node& c) { return contains_kind(c, kind); });
}

}  // namespace hlweave

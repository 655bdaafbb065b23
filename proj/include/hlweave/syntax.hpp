#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hlweave {

/// Where a node came from. `provenance` is only set on LineInfo nodes
/// synthesized by the weaver to record which pointcut produced an insertion.
struct SourceLoc {
  std::string file;
  int line = 0;
  std::string provenance;

  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

std::string to_string(const SourceLoc& loc);

/// Base class for every error the toolchain reports to its caller.
class Error : public std::runtime_error {
 public:
  Error(std::string message, SourceLoc loc = {})
      : std::runtime_error(format(message, loc)),
        message_(std::move(message)),
        loc_(std::move(loc)) {}

  const std::string& message() const { return message_; }
  const SourceLoc& loc() const { return loc_; }

 private:
  static std::string format(const std::string& message, const SourceLoc& loc);

  std::string message_;
  SourceLoc loc_;
};

class SyntaxError : public Error {
 public:
  using Error::Error;
};

enum class NodeKind {
  Module,
  FunctionDef,
  ShortFuncDef,
  Lambda,
  StructDef,
  Call,
  MacroCall,
  Assign,
  OpAssign,
  IndexAssign,
  FieldAssign,
  IndexRef,
  FieldRef,
  For,
  If,
  Let,
  TryCatchFinally,
  Throw,
  Block,
  AndAnd,
  OrOr,
  Return,
  Symbol,
  IntLit,
  FloatLit,
  BoolLit,
  StringLit,
  StringInterp,
  ArrayLit,
  TupleLit,
  MapLit,
  Range,
  Include,
  AttrAnnot,
  Aj,
  LineInfo,
  // Structural helpers for signatures, struct fields and loop clauses.
  Params,
  Param,
  VarParam,
  KwParam,
  KwVarParam,
  Field,
  Iter,
  Empty,
};

std::string_view kind_name(NodeKind kind);
std::optional<NodeKind> kind_from_name(std::string_view name);

/// Allowed child counts per kind; `max_children < 0` means unbounded.
struct ArityRule {
  NodeKind kind;
  int min_children;
  int max_children;
};

const std::vector<ArityRule>& arity_table();

using Atom = std::variant<std::monostate, std::string, std::int64_t, double, bool>;

struct AjPayload;  // defined by the weaver

/// HL syntax tree node. Plain value type: copying copies the whole subtree.
///
/// Child layout per kind:
///   Module        [Symbol name, Block body]
///   FunctionDef   [Symbol name, Params, Block body]
///   ShortFuncDef  [Symbol name, Params, expr]
///   Lambda        [Params, expr]
///   StructDef     [Symbol name, BoolLit mutable, Block body]
///   Call          [callee, args...]          keyword args are Assign children
///   MacroCall     [Symbol "@name", args...]
///   Assign        [Symbol, expr]
///   OpAssign      [lvalue, expr]             only `+=`
///   IndexAssign   [base, index, expr]
///   FieldAssign   [base, Symbol field, expr]
///   IndexRef      [base, index]
///   FieldRef      [base, Symbol field]
///   For           [Iter..., Block]
///   If            [cond, Block, Empty | Block | If]
///   Let           [Assign..., Block]
///   TryCatchFinally [Block, Symbol | Empty, Block | Empty, Block | Empty]
///   Param & co.   [Symbol name, Symbol type | Empty, default | Empty]
///   Field         [Symbol name, Symbol type | Empty]
///   Iter          [Symbol var, expr]
///   Aj            [original]                 payload in `aj`
struct Node {
  NodeKind kind = NodeKind::Block;
  std::vector<Node> children;
  Atom atom;
  SourceLoc loc;
  std::vector<std::string> attrs;
  std::shared_ptr<const AjPayload> aj;

  Node() = default;
  explicit Node(NodeKind k, SourceLoc l = {}) : kind(k), loc(std::move(l)) {}
  Node(NodeKind k, std::vector<Node> kids, SourceLoc l = {})
      : kind(k), children(std::move(kids)), loc(std::move(l)) {}

  static Node symbol(std::string name, SourceLoc loc = {});
  static Node string_lit(std::string text, SourceLoc loc = {});
  static Node int_lit(std::int64_t value, SourceLoc loc = {});
  static Node float_lit(double value, SourceLoc loc = {});
  static Node bool_lit(bool value, SourceLoc loc = {});
  static Node empty();
  static Node line_info(SourceLoc loc);

  bool is(NodeKind k) const { return kind == k; }
  bool has_atom() const { return !std::holds_alternative<std::monostate>(atom); }

  /// Text payload of Symbol and StringLit nodes.
  const std::string& text() const;
  std::int64_t int_value() const { return std::get<std::int64_t>(atom); }
  double float_value() const { return std::get<double>(atom); }
  bool bool_value() const { return std::get<bool>(atom); }
};

/// Builds a Block whose statements are each preceded by a LineInfo carrying
/// the statement's own location.
Node make_block(std::vector<Node> statements, const SourceLoc& fallback = {});

/// Statements of a Block with the LineInfo nodes dropped.
std::vector<Node> block_statements(const Node& block);

struct ParseOptions {
  /// Accept advice splice holes (`@original`, `@jp(name)`, ...).
  bool allow_holes = false;
  /// Line number assigned to the first line of the text.
  int first_line = 1;
};

Node parse(std::string_view source, const std::string& filename,
           const ParseOptions& options = {});

struct PrintOptions {
  bool line_comments = true;
};

std::string print_source(const Node& node, const PrintOptions& options = {});

bool node_equal(const Node& a, const Node& b, bool ignore_lines);

/// Is `name` an identifier the printer can emit without quoting.
bool is_identifier(std::string_view name);

/// Visits every node in pre-order; the callback sees the child-index path.
template <typename F>
void walk(const Node& node, F&& visit, std::vector<std::size_t>& path) {
  visit(node, path);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(i);
    walk(node.children[i], visit, path);
    path.pop_back();
  }
}

template <typename F>
void walk(const Node& node, F&& visit) {
  std::vector<std::size_t> path;
  walk(node, visit, path);
}

using NodePath = std::vector<std::size_t>;

const Node& node_at(const Node& root, const NodePath& path);
Node& node_at(Node& root, const NodePath& path);

bool contains_kind(const Node& node, NodeKind kind);

}  // namespace hlweave

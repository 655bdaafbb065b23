#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hlweave/syntax.hpp"

namespace hlweave {

struct NamePattern {
  enum class Mode { Exact, Substring };
  Mode mode = Mode::Exact;
  std::string text;

  static NamePattern exact(std::string t) { return {Mode::Exact, std::move(t)}; }
  static NamePattern substring(std::string t) { return {Mode::Substring, std::move(t)}; }

  /// `:name` for exact patterns, `"text"` for substring patterns.
  std::string describe() const;
};

bool match_name(const NamePattern& pattern, std::string_view candidate);

struct ArgMatcher {
  enum class Role { Positional, Variadic, Keyword, VariadicKeyword };
  Role role = Role::Positional;
  std::string type_name = "Any";
  std::optional<std::string> symbol;

  /// Surface token, e.g. `AInt64(:a)`, `VAInt64`, `KAAny(:z)`.
  std::string describe() const;
};

/// Parses one matcher token such as `AInt64(:a)` or `KVAAny(:ks)`.
std::optional<ArgMatcher> parse_arg_matcher(std::string_view token);

bool match_args(const std::vector<ArgMatcher>& matchers, const Node& params);

enum class PointcutKind {
  ExecFunc,
  Module,
  Struct,
  CallFunc,
  Assign,
  AssignAry,
  AssignSt,
  RefAry,
  RefSt,
  Attr,
  XPath,
};

struct Pointcut {
  PointcutKind kind = PointcutKind::CallFunc;
  NamePattern pattern;
  std::optional<std::vector<ArgMatcher>> arg_matchers;
  std::string xpath;
  std::string description;

  static Pointcut make(PointcutKind kind, NamePattern pattern,
                       std::optional<std::vector<ArgMatcher>> matchers = std::nullopt);
  static Pointcut make_xpath(std::string query);
};

/// `PCCallFunc`, `PCExecFunc`, ...
std::string_view pointcut_kind_name(PointcutKind kind);

enum class JPKind { ExecFunc, Module, Struct, CallFunc, Assign, Ref, Default };

/// `JPCallFunc`, `JPExecFunc`, ...
std::string_view jp_kind_name(JPKind kind);

struct JoinPoint {
  JPKind kind = JPKind::Default;
  std::string name;
  Node original;
  std::string pointcut_description;
  std::vector<Node> arg_exprs;
  std::vector<std::pair<std::string, Node>> kw_exprs;
  SourceLoc loc;
};

/// Builds the descriptor for `node` seen as a join point of `kind`. Used both
/// by scan and by the weaver when it re-derives arguments after rewriting.
JoinPoint make_join_point(JPKind kind, const Node& node, std::string description,
                          std::string fallback_name = {});

/// The join point kind a node gets when it is selected without a kind of its
/// own (attribute and XPath pointcuts).
JPKind jp_kind_for_node(const Node& node);

struct Match {
  NodePath path;
  JoinPoint jp;
};

/// Matching sites in document (pre-order) order.
std::vector<Match> scan(const Pointcut& pointcut, const Node& program);

/// An ExecFunc site whose name matched but whose argument matchers did not,
/// although they would have if every type were `Any`.
struct NearMiss {
  NodePath path;
  std::string name;
  SourceLoc loc;
};

std::vector<NearMiss> near_misses(const Pointcut& pointcut, const Node& program);

}  // namespace hlweave

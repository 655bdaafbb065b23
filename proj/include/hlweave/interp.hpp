#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hlweave/syntax.hpp"

namespace hlweave {

class Interpreter;
class Environment;
using EnvPtr = std::shared_ptr<Environment>;

struct Value;

struct Nil {
  friend bool operator==(Nil, Nil) { return true; }
};

struct RangeVal {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
};

struct ArrayObj {
  std::vector<Value> items;
};

/// Plain or named tuple; `names` is empty or parallel to `items`.
struct TupleObj {
  std::vector<Value> items;
  std::vector<std::string> names;
};

struct MapObj {
  std::map<std::string, Value> entries;
};

struct StructType {
  std::string name;
  bool is_mutable = false;
  std::vector<std::string> fields;
  std::vector<Node> constructors;  // inner FunctionDef nodes
  EnvPtr env;
};

struct StructObj {
  std::shared_ptr<const StructType> type;
  std::vector<Value> fields;
};

struct Closure {
  std::string name;  // empty for lambdas
  Node params;
  Node body;
  EnvPtr env;
};

struct Builtin;

struct ModuleObj {
  std::string name;
  EnvPtr env;
};

struct ErrorObj {
  std::string message;
};

struct Value {
  using Storage =
      std::variant<Nil, std::int64_t, double, bool, std::string, std::shared_ptr<ArrayObj>,
                   std::shared_ptr<TupleObj>, RangeVal, std::shared_ptr<MapObj>,
                   std::shared_ptr<StructObj>, std::shared_ptr<Closure>,
                   std::shared_ptr<Builtin>, std::shared_ptr<StructType>,
                   std::shared_ptr<ModuleObj>, std::shared_ptr<ErrorObj>>;
  Storage v;

  Value() = default;
  template <typename T>
  Value(T&& x) requires std::is_constructible_v<Storage, T&&> : v(std::forward<T>(x)) {}

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(v);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(v);
  }
};

using BuiltinFn = std::function<Value(Interpreter&, std::vector<Value>& args,
                                      std::vector<std::pair<std::string, Value>>& kwargs)>;

struct Builtin {
  std::string name;
  BuiltinFn fn;
};

Value make_array(std::vector<Value> items);
Value make_error(std::string message);

/// Text produced by print/println and string interpolation.
std::string display(const Value& v);
/// Literal-like rendering used inside containers.
std::string repr(const Value& v);
std::string type_name(const Value& v);
bool values_equal(const Value& a, const Value& b);

enum class ScopeKind { Global, Module, Function, Local };

class Environment {
 public:
  Environment(ScopeKind kind, EnvPtr parent) : kind_(kind), parent_(std::move(parent)) {}

  ScopeKind kind() const { return kind_; }
  const EnvPtr& parent() const { return parent_; }

  const Value* lookup(const std::string& name) const;
  bool is_defined(const std::string& name) const { return lookup(name) != nullptr; }
  void define(const std::string& name, Value value);
  /// Updates the nearest existing binding inside the current hard scope, or
  /// defines a new local in this environment.
  void assign(const std::string& name, Value value);
  void clear() { vars_.clear(); }

 private:
  ScopeKind kind_;
  EnvPtr parent_;
  std::unordered_map<std::string, Value> vars_;
};

/// An HL-level exception escaping evaluation.
class HlException : public Error {
 public:
  HlException(Value value, std::vector<SourceLoc> stack, SourceLoc loc)
      : Error(display_message(value), std::move(loc)),
        value_(std::move(value)),
        stack_(std::move(stack)) {}

  const Value& value() const { return value_; }
  const std::vector<SourceLoc>& stack() const { return stack_; }

  static std::string display_message(const Value& v);

 private:
  Value value_;
  std::vector<SourceLoc> stack_;
};

struct RunError {
  enum class Kind { Entry, Runtime };
  Kind kind = Kind::Runtime;
  std::string message;
  std::vector<SourceLoc> stack;
};

struct RunResult {
  Value value;
  std::string stdout_text;
  std::optional<RunError> error;
  /// Labels passed to `counter!`, in call order.
  std::vector<std::string> counter_trace;
  /// Durations passed to `sleep`.
  std::vector<double> sleeps;
};

class Interpreter {
 public:
  Interpreter();
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Evaluates the top-level statements of `program`, then calls the
  /// zero-argument function named by the dotted `entry` path.
  RunResult run(const Node& program, const std::string& entry);

  /// Evaluates one expression; HL exceptions escape as HlException.
  Value eval_expr(const Node& node, const EnvPtr& env);

  EnvPtr global_env() const;
  const std::string& output() const;

  // Used by builtins.
  void write(const std::string& text);
  Value call(const Value& callee, std::vector<Value> args,
             std::vector<std::pair<std::string, Value>> kwargs);
  [[noreturn]] void raise(const std::string& message);
  std::int64_t next_tick();
  std::int64_t bump_counter(std::string label);
  void record_sleep(double seconds);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run(const Node& program, const std::string& entry);

}  // namespace hlweave

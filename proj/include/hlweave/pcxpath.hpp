#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hlweave/syntax.hpp"

namespace hlweave {

/// One element of the XML projection of a program. `origin` points back at
/// the AST node the element was projected from; the root has none.
struct XmlNode {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::optional<NodePath> origin;

  /// Attribute value, falling back to the documented default for optional
  /// boolean attributes that the dump omits.
  std::optional<std::string> attr(std::string_view name) const;
};

XmlNode project(const Node& program);

/// Indented XML text, one element per line, with a trailing newline.
std::string dump_xml(const XmlNode& doc);

struct Pred {
  enum class Op { Eq, Contains, Not, And, Or };
  Op op = Op::Eq;
  std::string attribute;
  std::string literal;
  std::vector<Pred> operands;
};

struct Step {
  enum class Axis { Child, Descendant };
  Axis axis = Axis::Descendant;
  std::string tag;  // "*" matches any tag
  std::vector<Pred> predicates;
};

struct Query {
  std::vector<Step> steps;
};

class QueryError : public Error {
 public:
  QueryError(std::string message, int column)
      : Error(message + " at column " + std::to_string(column)), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

Query parse_query(std::string_view text);

/// Matching elements in document order, without duplicates.
std::vector<const XmlNode*> select(const Query& query, const XmlNode& doc);

}  // namespace hlweave

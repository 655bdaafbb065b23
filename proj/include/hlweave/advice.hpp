#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hlweave/pointcut.hpp"
#include "hlweave/syntax.hpp"

namespace hlweave {

enum class AdviceKind {
  Before,
  BeforeA,
  AfterR,
  AfterRA,
  AfterThrowing,
  AfterThrowingA,
  After,
  AfterA,
  Around,
  AppendF,
  AppendB,
  Nothing,
};

/// Aspect-file keyword: `before`, `after_returning_args`, ...
std::string_view advice_keyword(AdviceKind kind);
std::optional<AdviceKind> advice_from_keyword(std::string_view keyword);

bool is_replace(AdviceKind kind);
/// The `A` variants, which receive the join point's arguments.
bool takes_args(AdviceKind kind);
bool is_before(AdviceKind kind);
bool is_after_returning(AdviceKind kind);
bool is_after_throwing(AdviceKind kind);
bool is_after(AdviceKind kind);

class AdviceError : public Error {
 public:
  using Error::Error;
};

struct AdviceTemplate {
  AdviceKind kind = AdviceKind::Nothing;
  Node body;  // Block, parsed with splice holes enabled
  SourceLoc loc;
};

/// Parses `text` as an advice body and checks its holes against `kind`.
AdviceTemplate make_template(AdviceKind kind, std::string_view text, const std::string& file = "",
                             int first_line = 1);

/// Throws AdviceError when a hole is not allowed under the template's kind.
void validate_holes(const AdviceTemplate& tmpl);

struct FusedAdvice {
  std::vector<AdviceTemplate> templates;
};

FusedAdvice fuse(const FusedAdvice& a, const FusedAdvice& b);

struct Aspect {
  std::string name;
  Pointcut pointcut;
  FusedAdvice advice;
  std::string file;
  int line = 0;  // line of the pointcut declaration
};

std::vector<Aspect> parse_aspect_file(std::string_view text, const std::string& filename);

/// Names the instantiated body uses for values supplied by the weaver.
struct HoleNames {
  std::string args = "arg";
  std::string result = "result";
  std::string exception = "exception";
};

/// The template body with holes substituted. `original` is what @original
/// splices; `jp.arg_exprs` is what @arg_expr(i) splices.
Node instantiate(const AdviceTemplate& tmpl, const JoinPoint& jp, const Node& original,
                 const HoleNames& names = {});

/// The For node with its iterator clauses in reverse order.
Node swap_loop(const Node& loop);

}  // namespace hlweave

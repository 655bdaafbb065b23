#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlweave/advice.hpp"
#include "hlweave/pointcut.hpp"
#include "hlweave/syntax.hpp"

namespace hlweave {

/// One aspect's match at a site.
struct WeaveEntry {
  JoinPoint jp;
  FusedAdvice advice;
  std::string aspect_name;
  /// Where inserted code comes from: aspect file, pointcut line, and the
  /// pointcut description as provenance.
  SourceLoc origin;
};

/// Payload of an Aj node: every aspect matched at the site, in aspect order.
struct AjPayload {
  std::vector<WeaveEntry> entries;
};

class FileLoader {
 public:
  virtual ~FileLoader() = default;
  virtual std::optional<std::string> read(const std::string& path) const = 0;
};

class DiskLoader : public FileLoader {
 public:
  std::optional<std::string> read(const std::string& path) const override;
};

class MemoryLoader : public FileLoader {
 public:
  std::map<std::string, std::string> files;
  std::optional<std::string> read(const std::string& path) const override;
};

/// Inlines `include("...")` statements (paths relative to the including
/// file) and turns `@attr "name" stmt` into an attribute tag on stmt.
Node pre_weave(const Node& program, const FileLoader& loader);

/// Wraps every site matched by each aspect in an Aj node.
Node weave(const Node& program, const std::vector<Aspect>& aspects);

struct Warning {
  SourceLoc loc;
  std::string message;
};

/// Replaces every Aj node with plain HL implementing its advice.
Node emit(const Node& program, std::vector<Warning>* warnings = nullptr);

/// Folds weave + emit over the passes, left to right.
Node weave_chain(const Node& program, const std::vector<std::vector<Aspect>>& passes,
                 std::vector<Warning>* warnings = nullptr);

}  // namespace hlweave

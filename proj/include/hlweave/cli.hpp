#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hlweave::cli {

struct Config {
  /// Aspect files in application order.
  std::vector<std::string> aspect_files;
  /// Sizes of consecutive weaving passes over `aspect_files`; empty means a
  /// single pass with every file.
  std::vector<std::size_t> chain_groups;
  std::string entry = "Main.main";
  std::optional<std::string> output;
  bool emit_debug_lines = true;

  /// `aspect_files` split into passes.
  std::vector<std::vector<std::string>> passes() const;
};

enum Exit : int { Ok = 0, StaticError = 1, RuntimeError = 2 };

int cmd_parse(const std::string& source_path, std::ostream& out, std::ostream& err);
int cmd_weave(const Config& config, const std::string& source_path, std::ostream& out,
              std::ostream& err);
int cmd_run(const Config& config, const std::string& source_path, std::ostream& out,
            std::ostream& err);
int cmd_match(const Config& config, const std::string& source_path, std::ostream& out,
              std::ostream& err);
int cmd_dump_xml(const std::string& source_path, std::ostream& out, std::ostream& err);

/// Full command line, without the program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hlweave::cli

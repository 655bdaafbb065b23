#include "hlweave/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hlweave/interp.hpp"
#include "hlweave/pcxpath.hpp"
#include "hlweave/weaver.hpp"

namespace hlweave::cli {

namespace {

constexpr const char* kThen = "\x1fthen";

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string(what) + " not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Node load_program(const std::string& path) {
  return pre_weave(parse(read_file(path, "source file"), path), DiskLoader());
}

std::vector<std::vector<Aspect>> load_passes(const Config& config) {
  std::vector<std::vector<Aspect>> out;
  for (const auto& files : config.passes()) {
    std::vector<Aspect> pass;
    for (const auto& f : files) {
      auto aspects = parse_aspect_file(read_file(f, "aspect file"), f);
      pass.insert(pass.end(), aspects.begin(), aspects.end());
    }
    out.push_back(std::move(pass));
  }
  return out;
}

void report(std::ostream& err, const std::vector<Warning>& warnings) {
  for (const auto& w : warnings) err << to_string(w.loc) << ": warning: " << w.message << "\n";
}

Node woven(const Config& config, const std::string& source_path, std::ostream& err) {
  Node program = load_program(source_path);
  std::vector<Warning> warnings;
  Node out = weave_chain(program, load_passes(config), &warnings);
  report(err, warnings);
  return out;
}

// Runs `body`, turning toolchain errors into exit code 1.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return StaticError;
}

}  // namespace

std::vector<std::vector<std::string>> Config::passes() const {
  if (chain_groups.empty()) return {aspect_files};
  std::vector<std::vector<std::string>> out;
  std::size_t i = 0;
  for (std::size_t n : chain_groups) {
    out.emplace_back(aspect_files.begin() + i, aspect_files.begin() + i + n);
    i += n;
  }
  return out;
}

int cmd_parse(const std::string& source_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    out << print_source(parse(read_file(source_path, "source file"), source_path));
    return Ok;
  });
}

int cmd_weave(const Config& config, const std::string& source_path, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    std::string text = print_source(woven(config, source_path, err), {config.emit_debug_lines});
    if (config.output) {
      std::ofstream f(*config.output, std::ios::binary);
      if (!f) throw Error("cannot write " + *config.output);
      f << text;
    } else {
      out << text;
    }
    return Ok;
  });
}

int cmd_run(const Config& config, const std::string& source_path, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    RunResult r = run(woven(config, source_path, err), config.entry);
    out << r.stdout_text;
    if (!r.error) return Ok;
    err << "error: " << r.error->message << "\n";
    for (const auto& loc : r.error->stack) err << "  at " << to_string(loc) << "\n";
    return r.error->kind == RunError::Kind::Entry ? StaticError : RuntimeError;
  });
}

int cmd_match(const Config& config, const std::string& source_path, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    Node program = load_program(source_path);
    for (const auto& pass : load_passes(config)) {
      for (const auto& a : pass) {
        for (const auto& m : scan(a.pointcut, program)) {
          out << to_string(m.jp.loc) << " " << jp_kind_name(m.jp.kind) << " " << m.jp.name
              << " <- " << a.name << " (" << a.pointcut.description << ")\n";
        }
        for (const auto& nm : near_misses(a.pointcut, program)) {
          out << to_string(nm.loc) << " near miss: " << nm.name << " matches the name in "
              << a.pointcut.description << " at " << a.file << ":" << a.line
              << " but fails solely due to differences in type specifications\n";
        }
      }
      program = emit(weave(program, pass));
    }
    return Ok;
  });
}

int cmd_dump_xml(const std::string& source_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    out << dump_xml(project(parse(read_file(source_path, "source file"), source_path)));
    return Ok;
  });
}

int main(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aspect weaver and interpreter for HL programs", "hlweave"};
  app.require_subcommand(1);
  Config config;
  std::string source;
  std::vector<std::string> aspect_args;

  auto add_common = [&](CLI::App* sub, bool with_aspects) {
    sub->add_option("source", source, "HL source file")->required();
    if (!with_aspects) return;
    sub->add_option("--aspects", aspect_args,
                    "Aspect files, applied in order; --then starts the next pass")
        ->expected(1, -1);
    sub->add_flag("!--no-debug-lines", config.emit_debug_lines, "Omit line comments in output");
  };
  auto* parse_cmd = app.add_subcommand("parse", "Pretty-print a source file");
  add_common(parse_cmd, false);
  auto* weave_cmd = app.add_subcommand("weave", "Print the woven program");
  add_common(weave_cmd, true);
  weave_cmd->add_option("-o,--output", config.output, "Write to a file instead of stdout");
  auto* run_cmd = app.add_subcommand("run", "Weave and execute");
  add_common(run_cmd, true);
  run_cmd->add_option("--entry", config.entry, "Dotted path of the zero-argument entry function")
      ->capture_default_str();
  auto* match_cmd = app.add_subcommand("match", "List join points per aspect");
  add_common(match_cmd, true);
  auto* xml_cmd = app.add_subcommand("dump-xml", "Print the XML projection used by xpath pointcuts");
  add_common(xml_cmd, false);

  // `--then` is a pass separator inside the --aspects list.
  std::vector<std::string> args;
  for (const auto& a : raw) {
    if (a == "--then") {
      args.push_back("--aspects");
      args.push_back(kThen);
    } else {
      args.push_back(a);
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return StaticError;
  }

  std::size_t group = 0;
  for (const auto& a : aspect_args) {
    if (a == kThen) {
      config.chain_groups.push_back(group);
      group = 0;
    } else {
      config.aspect_files.push_back(a);
      ++group;
    }
  }
  if (!config.chain_groups.empty()) config.chain_groups.push_back(group);

  if (*parse_cmd) return cmd_parse(source, out, err);
  if (*weave_cmd) return cmd_weave(config, source, out, err);
  if (*run_cmd) return cmd_run(config, source, out, err);
  if (*match_cmd) return cmd_match(config, source, out, err);
  return cmd_dump_xml(source, out, err);
}

}  // namespace hlweave::cli

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hlweave/cli.hpp"
#include "hlweave/interp.hpp"
#include "hlweave/pcxpath.hpp"
#include "hlweave/weaver.hpp"

namespace py = pybind11;
using namespace hlweave;

namespace {

std::vector<Aspect> load_aspects(const std::vector<std::string>& texts) {
  std::vector<Aspect> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto part = parse_aspect_file(texts[i], "aspect" + std::to_string(i + 1) + ".asp");
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Node woven(const std::string& source, const std::string& filename,
           const std::vector<std::string>& aspects, std::vector<Warning>* warnings) {
  Node program = pre_weave(parse(source, filename), MemoryLoader{});
  if (aspects.empty()) return program;
  return emit(weave(program, load_aspects(aspects)), warnings);
}

}  // namespace

PYBIND11_MODULE(_hlweave, m) {
  m.doc() = "Aspect weaver for the HL language";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SyntaxError>(m, "SyntaxError", PyExc_ValueError);
  py::register_exception<AdviceError>(m, "AdviceError", PyExc_ValueError);
  py::register_exception<QueryError>(m, "QueryError", PyExc_ValueError);

  m.def(
      "format",
      [](const std::string& source, const std::string& filename, bool debug_lines) {
        return print_source(parse(source, filename), {debug_lines});
      },
      py::arg("source"), py::arg("filename") = "input.hl", py::arg("debug_lines") = true,
      "Parse HL source and print it back in canonical form.");

  m.def(
      "weave",
      [](const std::string& source, const std::vector<std::string>& aspects,
         const std::string& filename, bool debug_lines) {
        std::vector<Warning> warnings;
        Node w = woven(source, filename, aspects, &warnings);
        std::vector<std::string> notes;
        for (const auto& wn : warnings) notes.push_back(to_string(wn.loc) + ": " + wn.message);
        return py::make_tuple(print_source(w, {debug_lines}), notes);
      },
      py::arg("source"), py::arg("aspects"), py::arg("filename") = "input.hl",
      py::arg("debug_lines") = true,
      "Weave aspect-file texts into HL source in one pass. Returns (code, warnings).");

  m.def(
      "run",
      [](const std::string& source, const std::string& entry,
         const std::vector<std::string>& aspects, const std::string& filename) {
        RunResult r = hlweave::run(woven(source, filename, aspects, nullptr), entry);
        py::dict out;
        out["stdout"] = r.stdout_text;
        out["value"] = display(r.value);
        out["error"] = r.error ? py::object(py::str(r.error->message)) : py::object(py::none());
        out["counters"] = r.counter_trace;
        return out;
      },
      py::arg("source"), py::arg("entry") = "Main.main",
      py::arg("aspects") = std::vector<std::string>{}, py::arg("filename") = "input.hl",
      "Weave and run; returns a dict with stdout, value, error and counters.");

  m.def(
      "dump_xml",
      [](const std::string& source, const std::string& filename) {
        return dump_xml(project(parse(source, filename)));
      },
      py::arg("source"), py::arg("filename") = "input.hl",
      "XML projection of a program, as queried by xpath pointcuts.");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream o, e;
        int code = cli::main(args, o, e);
        return py::make_tuple(code, o.str(), e.str());
      },
      py::arg("args"), "Run the hlweave command line; returns (exit_code, stdout, stderr).");
}

// One PASS/FAIL line per acceptance criterion; exits non-zero if any fail.
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "hlweave/cli.hpp"
#include "hlweave/interp.hpp"
#include "hlweave/pcxpath.hpp"
#include "hlweave/weaver.hpp"

using namespace hlweave;

namespace {

std::string data(const std::string& name) { return std::string(HLWEAVE_TEST_DATA) + "/" + name; }

std::string read(const std::string& name) {
  std::ifstream in(data(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing test data " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Node load(const std::string& name) { return pre_weave(parse(read(name), name), MemoryLoader{}); }

std::vector<Aspect> aspects(const std::string& name) { return parse_aspect_file(read(name), name); }

Node woven(const std::string& program, const std::string& aspect,
           std::vector<Warning>* warnings = nullptr) {
  return emit(weave(load(program), aspects(aspect)), warnings);
}

bool matches_golden(const Node& w, const std::string& golden) {
  return node_equal(w, parse(read(golden), golden), true);
}

struct CliOut {
  int code;
  std::string out, err;
};

CliOut cli_run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  int code = cli::main(args, o, e);
  return {code, o.str(), e.str()};
}

// Appends driver functions to a woven program so they run unadvised.
Node with_driver(Node program, const std::string& driver) {
  for (auto& c : parse(driver, "driver.hl").children) program.children.push_back(c);
  return program;
}

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Criterion = std::function<void(Check&)>;

void internal_external(Check& c) {
  auto in = run(woven("internal.hl", "exec_foo.asp"), "main");
  c.require(in.stdout_text == "b!foo\nb!foo\n", "exec_func stdout: " + in.stdout_text);
  auto ex = run(woven("internal.hl", "call_foo.asp"), "main");
  c.require(ex.stdout_text == "b!foo\nfoo\n", "call stdout: " + ex.stdout_text);
}

void matcher_table(Check& c) {
  Node params = block_statements(parse("function foo(a::Int64) end", "t.hl"))[0].children[1];
  auto verdict = [&](std::vector<std::string> tokens, const Node& p) {
    std::vector<ArgMatcher> ms;
    for (const auto& t : tokens) ms.push_back(*parse_arg_matcher(t));
    return match_args(ms, p);
  };
  c.require(verdict({"AAny"}, params), "[AAny] should match");
  c.require(verdict({"AInt64"}, params), "[AInt64] should match");
  c.require(!verdict({"AFloat64"}, params), "[AFloat64] should not match");
  c.require(!verdict({"AInt64(:b)"}, params), "[AInt64(:b)] should not match");
  c.require(verdict({"AInt64(:a)"}, params), "[AInt64(:a)] should match");
  Node bar = block_statements(parse("function bar(a, as::Int64...; z::Int64) end", "t.hl"))[0].children[1];
  c.require(verdict({"AAny", "VAInt64", "KAAny(:z)"}, bar), "bar matchers should match");
}

void setup_sample(Check& c) {
  auto r = cli_run({"run", data("Test.hl"), "--aspects", data("Sample.asp"), "--entry", "Test.main"});
  c.require(r.code == 0, "exit code " + std::to_string(r.code) + ": " + r.err);
  c.require(r.out == "before foo!foo", "stdout: " + r.out);
}

void debug_format(Check& c) {
  std::string src = print_source(woven("Test.hl", "Sample.asp"));
  c.require(src.find("#= AOP: PCCallFunc(:foo) ##= Sample.asp:2 =##:0 =#\n") != std::string::npos,
            "provenance line missing:\n" + src);
}

void logging(Check& c) {
  Node w = woven("mycalc.hl", "logging.asp");
  c.require(matches_golden(w, "mycalc_woven.hl"), "woven code differs from the golden file");
  Node driven = with_driver(w, "t_zero() = mycalc(1, 2, 0)\nt_default() = mycalc(1, 2)\n");
  auto zero = run(driven, "t_zero");
  c.require(zero.error && zero.error->message.find("zero division") != std::string::npos,
            "mycalc(1,2,0) should raise zero division");
  c.require(zero.stdout_text.rfind("exec mycalc with (args = [1, 2, 0], kargs = Dict())\n", 0) == 0,
            "exec log missing: " + zero.stdout_text);
  auto ok = run(driven, "t_default");
  c.require(!ok.error, "mycalc(1,2) raised");
  c.require(ok.stdout_text ==
                "exec mycalc with (args = [1, 2, 100], kargs = Dict())\nmycalc return 0.03\n",
            "logs: " + ok.stdout_text);
  auto* v = std::get_if<double>(&ok.value.v);
  c.require(v && std::abs(*v - 0.03) < 1e-12, "result is not 0.03");
}

void profiling(Check& c) {
  c.require(matches_golden(woven("profiling.hl", "profiling.asp"), "profiling_woven.hl"),
            "woven code differs from the golden file");
  auto r = cli_run({"run", data("profiling.hl"), "--aspects", data("profiling.asp")});
  c.require(r.code == 0, "exit code " + std::to_string(r.code));
  std::istringstream lines(r.out);
  int timed = 0;
  for (std::string l; std::getline(lines, l);) timed += l.rfind("time:", 0) == 0;
  c.require(timed == 1, "expected one time: line, got " + std::to_string(timed));
}

void external_module(Check& c) {
  Node w = woven("getresource.hl", "redirect.asp");
  c.require(matches_golden(w, "getresource_woven.hl"), "woven code differs from the golden file");
  auto r = run(w, "GetResource.load");
  c.require(!r.error, "run failed");
  c.require(display(r.value) == "[\"fetched:https://localhost/\", \"fetched:https://example.org/\"]",
            "value: " + display(r.value));
}

void struct_extension(Check& c) {
  Node w = woven("myst.hl", "myst.asp");
  c.require(matches_golden(w, "myst_woven.hl"), "woven code differs from the golden file");
  auto r = run(with_driver(w, "function t()\n  s = MYST(1, 2)\n  (s.x, s.y, s.init_time)\nend\n"), "t");
  c.require(!r.error, "construction failed");
  c.require(display(r.value) == "(1, 2, 1)", "fields: " + display(r.value));
}

void partial_weaving(Check& c) {
  auto x = cli_run({"dump-xml", data("fib.hl")});
  c.require(x.out == read("fib.xml"), "dump-xml differs:\n" + x.out);
  c.require(matches_golden(woven("fib.hl", "partial.asp"), "fib_woven.hl"),
            "woven code differs from the golden file");
  auto r = cli_run({"run", data("fib.hl"), "--aspects", data("partial.asp"), "--entry", "MyFib.main"});
  c.require(r.out == "before call\n55\n", "stdout: " + r.out);
}

void loop_swap(Check& c) {
  Node w = woven("loop.hl", "swap.asp");
  c.require(matches_golden(w, "loop_woven.hl"), "woven code differs from the golden file");
  auto r = run(w, "myloop");
  c.require(r.stdout_text.rfind("x=1, y=1\nx=2, y=1\n", 0) == 0, "order: " + r.stdout_text.substr(0, 40));
}

void short_circuit(Check& c) {
  std::vector<Warning> warnings;
  Node w = woven("shortcircuit.hl", "dump_args.asp", &warnings);
  c.require(warnings.size() == 1, std::to_string(warnings.size()) + " warnings");
  Node main = block_statements(w)[0];
  Node let = block_statements(main.children[2])[1];
  c.require(let.is(NodeKind::Let) && let.children.size() == 3, "expected a let with two bindings");
  if (!c.ok) return;
  c.require(print_source(let.children[0], {false}) == "arg1 = pop!(ary)" &&
                print_source(let.children[1], {false}) == "arg2 = pop!(ary)",
            "bindings");
  c.require(print_source(block_statements(let.children[2]).back(), {false}) == "arg1 && arg2",
            "rewritten operands");
  auto r = run(w, "main");
  c.require(r.stdout_text.ends_with("\n[false]\n"), "array after run: " + r.stdout_text);
}

void properties(Check& c) {
  std::string cmd = std::string("\"") + HLWEAVE_PROPERTY_TESTS + "\" > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  c.require(rc == 0, "property suite failed; run property_tests for details");
}

void advice_on_advice(Check& c) {
  Node p = parse(
      "foo() = println(\"foo\")\n"
      "function trace1(x)\n  println(\"trace1\")\n  x\nend\n"
      "function main()\n  foo()\nend\n",
      "chain.hl");
  auto pass1 = parse_aspect_file(
      "aspect \"wrap\" {\n  pointcut: call(:foo)\n  advice: around { trace1(@original) }\n}\n", "p1.asp");
  auto pass2 = parse_aspect_file(
      "aspect \"watch\" {\n  pointcut: call(:trace1)\n  advice: before { println(\"pass2\") }\n}\n", "p2.asp");
  auto chained = run(weave_chain(p, {pass1, pass2}), "main");
  c.require(chained.stdout_text == "pass2\nfoo\ntrace1\n", "chained: " + chained.stdout_text);
  auto first_only = run(weave_chain(p, {pass1}), "main");
  c.require(first_only.stdout_text == "foo\ntrace1\n", "pass 1 only: " + first_only.stdout_text);
  auto reversed = run(weave_chain(p, {pass2, pass1}), "main");
  c.require(reversed.stdout_text == "foo\ntrace1\n", "reversed: " + reversed.stdout_text);
  auto same_pass = run(weave_chain(p, {{pass1[0], pass2[0]}}), "main");
  c.require(same_pass.stdout_text == "foo\ntrace1\n", "single pass: " + same_pass.stdout_text);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria{
      {"internal vs external pointcut semantics", internal_external},
      {"argument matcher verdicts", matcher_table},
      {"setup sample prints before foo!foo", setup_sample},
      {"provenance debug line format", debug_format},
      {"logging use case", logging},
      {"profiling use case", profiling},
      {"external module modification", external_module},
      {"struct extension", struct_extension},
      {"xpath partial weaving", partial_weaving},
      {"loop swap", loop_swap},
      {"short-circuit pre-evaluation caveat", short_circuit},
      {"property suites", properties},
      {"advice on advice", advice_on_advice},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!c.ok) std::cout << ": " << c.detail;
    std::cout << "\n";
    failed += !c.ok;
  }
  return failed == 0 ? 0 : 1;
}

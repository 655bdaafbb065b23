#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "generators.hpp"
#include "hlweave/advice.hpp"
#include "hlweave/interp.hpp"
#include "hlweave/weaver.hpp"

using namespace hlweave;

namespace {

constexpr int kCases = 1000;

struct Snippet {
  const char* keyword;
  const char* body;
};

const std::vector<Snippet> kInsert{
    {"before", "println(\"B\")"},
    {"before_args", "println(@args)"},
    {"after_returning", "println(@result)"},
    {"after_returning_args", "println(@result, @args)"},
    {"after_throwing", "println(@exception)"},
    {"after_throwing_args", "println(@exception, @args)"},
    {"after", "println(\"A\")"},
    {"after_args", "println(@args)"},
    {"append_front", "println(\"F\")"},
    {"append_back", "println(\"K\")"},
};

const std::vector<Snippet> kArgs{
    {"before_args", "println(@args)"},
    {"after_returning_args", "println(@result, @args)"},
    {"after_args", "println(\"A\", @args)"},
};

const std::vector<Snippet> kThrowing{
    {"after_throwing", "println(\"caught \", @exception)"},
    {"after_throwing_args", "println(@exception, @args)"},
    {"after", "println(\"A\")"},
};

const std::vector<Snippet> kAround{
    {"around", "@original"},
    {"around", "@time @original"},
};

// Wrapping a definition in anything but itself would not reparse.
const std::vector<Snippet> kIdentityAround{{"around", "@original"}};

const std::vector<std::string> kRunnablePointcuts{
    "call(\"h\")", "call(:h1)", "exec_func(\"h\")", "assign(\"x\")", "assign(\"t\")", "xpath(\"//call[@name='h2']\")",
};

std::string aspect_text(gen::Rng& rng, const std::vector<std::string>& pointcuts,
                        const std::vector<const std::vector<Snippet>*>& pools,
                        const std::vector<Snippet>* around) {
  std::string out;
  int aspects = rng.range(1, 3);
  for (int a = 0; a < aspects; ++a) {
    out += "aspect \"a" + std::to_string(a) + "\" {\n  pointcut: " + rng.pick(pointcuts) + "\n";
    int advices = rng.range(1, 3);
    for (int i = 0; i < advices; ++i) {
      const Snippet& s = rng.pick(*pools[static_cast<std::size_t>(rng.range(0, static_cast<int>(pools.size()) - 1))]);
      out += std::string("  advice: ") + s.keyword + " { " + s.body + " }\n";
    }
    if (around && rng.chance(0.5)) {
      const Snippet& s = rng.pick(*around);
      out += std::string("  advice: ") + s.keyword + " { " + s.body + " }\n";
    }
    out += "}\n";
  }
  return out;
}

std::string describe(const RunResult& r) {
  std::string s = "value=" + display(r.value) + " trace=";
  for (const auto& t : r.counter_trace) s += t + ",";
  if (r.error) s += " error=" + r.error->message;
  return s;
}

bool has_aj(const Node& n) { return contains_kind(n, NodeKind::Aj); }

}  // namespace

TEST_CASE("parse/print roundtrip over random trees") {
  gen::Rng rng(0x5eed0001);
  for (int i = 0; i < kCases; ++i) {
    gen::SyntaxGen g(rng);
    Node p = g.program();
    std::string text = print_source(p);
    INFO("case ", i, "\n", text);
    Node back = parse(text, "gen.hl");
    REQUIRE(node_equal(back, p, true));
    CHECK(print_source(back) == print_source(parse(print_source(back), "gen.hl")));
  }
}

TEST_CASE("weaving with no aspects is the identity") {
  gen::Rng rng(0x5eed0002);
  for (int i = 0; i < kCases; ++i) {
    gen::SyntaxGen g(rng);
    Node p = i % 2 ? g.program() : gen::RunnableGen(rng).program(true).ast;
    INFO("case ", i, "\n", print_source(p));
    REQUIRE(node_equal(emit(weave(p, {})), p, false));
    REQUIRE(node_equal(weave_chain(p, {}), p, false));
  }
}

TEST_CASE("emit is total and its output reparses") {
  gen::Rng rng(0x5eed0003);
  const std::vector<std::string> pointcuts{
      "call(:f)", "call(\"o\")", "exec_func(\"f\")", "assign(:x)", "struct(:S1)",
      "module(:M1)", "xpath(\"//call\")", "xpath(\"//*\")", "xpath(\"//ref\")", "xpath(\"//for\")",
  };
  const std::vector<Snippet> pool{
      {"before", "println(\"B\")"},
      {"before_args", "println(@args)"},
      {"after_returning", "println(@result)"},
      {"after_throwing", "println(@exception)"},
      {"after", "println(@jp(name), @jp(kind))"},
      {"append_front", "extra_front"},
      {"append_back", "extra_back"},
  };
  for (int i = 0; i < kCases; ++i) {
    gen::SyntaxGen g(rng);
    Node p = g.program();
    std::string asp = aspect_text(rng, pointcuts, {&pool}, &kIdentityAround);
    INFO("case ", i, "\n", print_source(p), "\n", asp);
    auto aspects = parse_aspect_file(asp, "gen.asp");
    Node w = emit(weave(p, aspects));
    REQUIRE_FALSE(has_aj(w));
    Node back = parse(print_source(w), "woven.hl");
    REQUIRE(node_equal(back, w, true));
  }
}

TEST_CASE("swap_loop is an involution") {
  gen::Rng rng(0x5eed0004);
  for (int i = 0; i < kCases; ++i) {
    gen::SyntaxGen g(rng);
    Node loop = g.for_node(1);
    Node once = swap_loop(loop);
    REQUIRE(node_equal(swap_loop(once), loop, false));
    std::size_t n = loop.children.size() - 1;
    for (std::size_t k = 0; k < n; ++k) {
      REQUIRE(node_equal(once.children[k], loop.children[n - 1 - k], false));
    }
  }
}

TEST_CASE("join point arguments evaluate exactly once") {
  gen::Rng rng(0x5eed0005);
  for (int i = 0; i < kCases; ++i) {
    gen::Program p = gen::RunnableGen(rng).program(false);
    std::string asp = aspect_text(rng, kRunnablePointcuts, {&kArgs}, &kAround);
    INFO("case ", i, "\n", print_source(p.ast), "\n", asp);
    Node w = emit(weave(p.ast, parse_aspect_file(asp, "gen.asp")));
    RunResult before = run(p.ast, "main");
    RunResult after = run(w, "main");
    INFO(print_source(w));
    REQUIRE(!before.error);
    REQUIRE(describe(after) == describe(before));
  }
}

TEST_CASE("thrown exceptions reach the caller unchanged") {
  gen::Rng rng(0x5eed0006);
  int thrown = 0;
  for (int i = 0; i < kCases; ++i) {
    gen::Program p = gen::RunnableGen(rng).program(true);
    std::string asp = aspect_text(rng, kRunnablePointcuts, {&kThrowing}, nullptr);
    INFO("case ", i, "\n", print_source(p.ast), "\n", asp);
    Node w = emit(weave(p.ast, parse_aspect_file(asp, "gen.asp")));
    RunResult before = run(p.ast, "main");
    RunResult after = run(w, "main");
    INFO(print_source(w));
    REQUIRE(describe(after) == describe(before));
    if (before.error) ++thrown;
  }
  // The generator must actually exercise the throwing path.
  CHECK(thrown > kCases / 10);
}

TEST_CASE("insert advice leaves value and probe trace unchanged") {
  gen::Rng rng(0x5eed0007);
  for (int i = 0; i < kCases; ++i) {
    gen::Program p = gen::RunnableGen(rng).program(rng.chance(0.5));
    std::string asp = aspect_text(rng, kRunnablePointcuts, {&kInsert}, nullptr);
    INFO("case ", i, "\n", print_source(p.ast), "\n", asp);
    Node w = emit(weave(p.ast, parse_aspect_file(asp, "gen.asp")));
    RunResult before = run(p.ast, "main");
    RunResult after = run(w, "main");
    INFO(print_source(w));
    REQUIRE(describe(after) == describe(before));
  }
}

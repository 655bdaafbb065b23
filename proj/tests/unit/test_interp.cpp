#include "doctest.h"
#include "hlweave/interp.hpp"

using namespace hlweave;

namespace {

RunResult run_src(const std::string& src, const std::string& entry = "main") {
  return run(parse(src, "t.hl"), entry);
}

Value eval_in(Interpreter& interp, const std::string& src) {
  Value last;
  for (const auto& stmt : block_statements(parse(src, "t.hl"))) {
    last = interp.eval_expr(stmt, interp.global_env());
  }
  return last;
}

}  // namespace

TEST_CASE("internal pointcut woven form prints the advice twice") {
  auto r = run_src(
      "function foo()\n  print(\"b!\")\n  println(\"foo\")\nend\n"
      "function main()\n  bar = foo\n  foo()\n  bar()\nend\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "b!foo\nb!foo\n");
}

TEST_CASE("external pointcut woven form prints the advice once") {
  auto r = run_src(
      "function foo()\n  println(\"foo\")\nend\n"
      "function main()\n  bar = foo\n  print(\"b!\")\n  foo()\n  bar()\nend\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "b!foo\nfoo\n");
}

TEST_CASE("unknown entry is reported as an entry error") {
  auto r = run_src("", "main");
  REQUIRE(r.error);
  CHECK(r.error->kind == RunError::Kind::Entry);
  auto m = run_src("module Test\nfunction main()\n  1\nend\nend", "Test.nope");
  REQUIRE(m.error);
  CHECK(m.error->kind == RunError::Kind::Entry);
}

TEST_CASE("module entries resolve through dotted paths") {
  auto r = run_src("module Test\nfunction main()\n  print(\"hi\")\n  42\nend\nend", "Test.main");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "hi");
  CHECK(values_equal(r.value, Value(std::int64_t{42})));
  CHECK_FALSE(run_src("function main()\n 1\nend", "Main.main").error);
}

TEST_CASE("pop! mutates and returns the last element") {
  Interpreter interp;
  eval_in(interp, "ary = [1, 2, 3]");
  Value v = eval_in(interp, "pop!(ary)");
  CHECK(values_equal(v, Value(std::int64_t{3})));
  CHECK(repr(eval_in(interp, "ary")) == "[1, 2]");
}

TEST_CASE("short-circuit leaves the right operand unevaluated") {
  Interpreter interp;
  eval_in(interp, "ary = [1, 2, 3]");
  CHECK(values_equal(eval_in(interp, "false && pop!(ary)"), Value(false)));
  CHECK(repr(eval_in(interp, "ary")) == "[1, 2, 3]");
  CHECK(values_equal(eval_in(interp, "true || pop!(ary)"), Value(true)));
  CHECK(repr(eval_in(interp, "ary")) == "[1, 2, 3]");
}

TEST_CASE("assignment yields the assigned value") {
  Interpreter interp;
  CHECK(values_equal(eval_in(interp, "x = 5"), Value(std::int64_t{5})));
  CHECK(values_equal(eval_in(interp, "x"), Value(std::int64_t{5})));
}

TEST_CASE("division always produces a float") {
  Interpreter interp;
  Value v = eval_in(interp, "(1 + 2) / 100");
  REQUIRE(v.is<double>());
  CHECK(v.as<double>() == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(display(v) == "0.03");
  CHECK(display(eval_in(interp, "4 / 2")) == "2.0");
}

TEST_CASE("named tuples, maps and interpolation display like the host language") {
  Interpreter interp;
  eval_in(interp, "x = 1\ny = 2\nz = 0");
  Value rec = eval_in(interp, "(args = [x, y, z], kargs = Dict())");
  CHECK(display(rec) == "(args = [1, 2, 0], kargs = Dict())");
  CHECK(values_equal(eval_in(interp, "(args = [x, y, z],).args[3]"), Value(std::int64_t{0})));
  CHECK(display(eval_in(interp, "\"v=$x and $(y + 1)\"")) == "v=1 and 3");
  CHECK(display(eval_in(interp, "Dict(\"a\" => 1)[\"a\"]")) == "1");
}

TEST_CASE("default, variadic and keyword parameters bind") {
  auto r = run_src(
      "function mycalc(x, y, z = 100)\n  (x + y) / z\nend\n"
      "function bar(a, as...; k = 2)\n  println(a, length(as), k)\nend\n"
      "function main()\n  println(mycalc(1, 2))\n  bar(1, 2, 3)\n  bar(0; k = 9)\nend\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "0.03\n122\n009\n");
}

TEST_CASE("errors propagate as runtime errors with a stack") {
  auto r = run_src("function f()\n  error(\"zero division\")\nend\nfunction main()\n  f()\nend\n");
  REQUIRE(r.error);
  CHECK(r.error->kind == RunError::Kind::Runtime);
  CHECK(r.error->message == "zero division");
  CHECK(r.error->stack.size() >= 2);
}

TEST_CASE("try, catch, rethrow and finally") {
  auto r = run_src(
      "function main()\n"
      "  try\n    error(\"boom\")\n  catch e\n    println(\"exception $e\")\n  finally\n    println(\"after\")\n  end\n"
      "  try\n    try\n      throw(\"inner\")\n    catch e\n      throw(e)\n    end\n  catch e2\n    println(e2)\n  end\n"
      "end\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "exception ErrorException(\"boom\")\nafter\ninner\n");
}

TEST_CASE("finally runs on the way out of a return") {
  auto r = run_src(
      "function f()\n  try\n    return 1\n  finally\n    println(\"fin\")\n  end\n  2\nend\n"
      "function main()\n  println(f())\nend\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "fin\n1\n");
}

TEST_CASE("let introduces a scope and isdefined sees enclosing bindings") {
  auto r = run_src(
      "function main()\n"
      "  let a = 1\n    b = a + 1\n    println(@isdefined(b))\n  end\n"
      "  println(@isdefined(b))\n"
      "  if !@isdefined(c)\n    c = nothing\n  end\n"
      "  let arg1 = 7\n    c = arg1\n  end\n"
      "  println(c)\n"
      "end\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "true\nfalse\n7\n");
}

TEST_CASE("nested for clauses iterate outer first") {
  auto r = run_src(
      "function main()\n  for i in 1:2, j in 1:2\n    println(\"x=$i, y=$j\")\n  end\nend\n");
  CHECK(r.stdout_text == "x=1, y=1\nx=1, y=2\nx=2, y=1\nx=2, y=2\n");
  CHECK(run_src("function main()\n for i in 3:1\n println(i)\n end\nend").stdout_text.empty());
}

TEST_CASE("structs use inner constructors and respect mutability") {
  auto r = run_src(
      "struct MYST\n  x::Int\n  y::Int\n  init_time\n  function MYST(x, y)\n    new(x, y, mynow())\n  end\nend\n"
      "mutable struct P\n  v\nend\n"
      "function main()\n  s = MYST(1, 2)\n  println(s.init_time)\n  p = P(1)\n  p.v += 4\n  println(p.v)\n  s.x = 3\nend\n");
  REQUIRE(r.error);
  CHECK(r.stdout_text == "1\n5\n");
  CHECK(r.error->message.find("immutable") != std::string::npos);
}

TEST_CASE("stub builtins are deterministic and recorded") {
  auto r = run_src(
      "bar() = sleep(10)\n"
      "function main()\n  bar()\n  counter!(\"a\")\n  counter!(\"b\")\n  [myfetch(\"https://example.org/\"), mynow(), mynow()]\nend\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.sleeps == std::vector<double>{10.0});
  CHECK(r.counter_trace == std::vector<std::string>{"a", "b"});
  CHECK(repr(r.value) == "[\"fetched:https://example.org/\", 1, 2]");
}

TEST_CASE("time macro prints one line and returns the value") {
  auto r = run_src("function main()\n  @time 1 + 1\nend\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text.rfind("time: ", 0) == 0);
  CHECK(r.stdout_text.find(" ns\n") != std::string::npos);
  CHECK(values_equal(r.value, Value(std::int64_t{2})));
}

TEST_CASE("runtime type errors are catchable HL errors") {
  CHECK(run_src("function main()\n  1[1]\nend").error->kind == RunError::Kind::Runtime);
  CHECK(run_src("function main()\n  if 1\n  end\nend").error->message.find("non-boolean") !=
        std::string::npos);
  CHECK(run_src("function main()\n  undefined_thing\nend").error->message.find("UndefVarError") !=
        std::string::npos);
  CHECK(run_src("f(x) = x\nfunction main()\n  f()\nend").error);
  CHECK(run_src("f(n) = f(n + 1)\nfunction main()\n  f(0)\nend").error->message ==
        "StackOverflowError");
}

TEST_CASE("closures capture their defining scope") {
  auto r = run_src(
      "function make(k)\n  (x) -> x + k\nend\n"
      "function main()\n  add2 = make(2)\n  println(add2(3))\n  println(((arg) -> arg * 2)(4))\nend\n");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "5\n8\n");
}

TEST_CASE("recursion through a module") {
  auto r = run_src(
      "module MyFib\nfunction fib(n)\n  if n < 2\n    n\n  else\n    fib(n-1) + fib(n-2)\n  end\nend\n"
      "function main()\n  println(fib(10))\nend\nend\n",
      "MyFib.main");
  REQUIRE_FALSE(r.error);
  CHECK(r.stdout_text == "55\n");
}

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "hlweave/cli.hpp"

using namespace hlweave;

namespace {

struct Out {
  int code;
  std::string out, err;
};

Out cli_run(std::vector<std::string> args) {
  std::ostringstream o, e;
  for (auto& a : args) {
    if (a.size() > 3 && (a.ends_with(".hl") || a.ends_with(".asp"))) a = std::string(HLWEAVE_TEST_DATA) + "/" + a;
  }
  int code = cli::main(args, o, e);
  return {code, o.str(), e.str()};
}

}  // namespace

TEST_CASE("run prints program output") {
  auto r = cli_run({"run", "Test.hl", "--aspects", "Sample.asp", "--entry", "Test.main"});
  CHECK(r.code == 0);
  CHECK(r.out == "before foo!foo");
}

TEST_CASE("exit codes") {
  CHECK(cli_run({"run", "Test.hl", "--aspects", "missing.asp"}).code == 1);
  CHECK(cli_run({"run", "Test.hl", "--aspects", "missing.asp"}).err.find("aspect file not found") !=
        std::string::npos);
  CHECK(cli_run({"run", "Test.hl", "--entry", "Test.nothere"}).code == 1);
  CHECK(cli_run({"bogus"}).code == 1);
  CHECK(cli_run({"dump-xml", "missing.hl"}).code == 1);
}

TEST_CASE("runtime errors exit with code 2") {
  std::string path = "/tmp/hlweave_cli_boom.hl";
  {
    std::ofstream f(path);
    f << "function main()\n  error(\"boom\")\nend\n";
  }
  std::ostringstream o, e;
  CHECK(cli::main({"run", path}, o, e) == 2);
  CHECK(e.str().find("boom") != std::string::npos);
}

TEST_CASE("match lists join points and near misses") {
  auto r = cli_run({"match", "Test.hl", "--aspects", "Sample.asp"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Test.hl:6 JPCallFunc foo <- sample (PCCallFunc(:foo))\n") != std::string::npos);
  CHECK(cli_run({"match", "Test.hl"}).out.empty());
}

TEST_CASE("dump-xml and weave") {
  auto x = cli_run({"dump-xml", "fib.hl"});
  CHECK(x.code == 0);
  CHECK(x.out == read_data("fib.xml"));
  auto w = cli_run({"weave", "profiling.hl", "--aspects", "profiling.asp", "--no-debug-lines"});
  CHECK(w.out == "bar() = sleep(10)\nfunction main()\n    @time bar()\nend\n");
  auto plain = cli_run({"weave", "profiling.hl"});
  CHECK(plain.code == 0);
  CHECK(plain.out.find("function main()") != std::string::npos);
}

TEST_CASE("--then splits passes") {
  cli::Config c;
  c.aspect_files = {"a", "b", "c"};
  c.chain_groups = {2, 1};
  auto p = c.passes();
  REQUIRE(p.size() == 2);
  CHECK(p[0].size() == 2);
  CHECK(p[1] == std::vector<std::string>{"c"});
  auto r = cli_run({"run", "internal.hl", "--aspects", "exec_foo.asp", "--then", "call_foo.asp"});
  CHECK(r.code == 0);
  CHECK(r.out == "b!b!foo\nb!foo\n");
}

TEST_CASE("woven output runs the same without the weaver") {
  struct Case {
    const char* program;
    const char* aspect;
    const char* entry;
  };
  for (const Case& c : {Case{"Test.hl", "Sample.asp", "Test.main"}, Case{"fib.hl", "partial.asp", "MyFib.main"},
                        Case{"internal.hl", "exec_foo.asp", "main"}, Case{"loop.hl", "swap.asp", "myloop"},
                        Case{"shortcircuit.hl", "dump_args.asp", "main"}}) {
    INFO(std::string(c.program));
    std::string woven_path = std::string("/tmp/hlweave_aot_") + c.program + ".out";
    auto w = cli_run({"weave", c.program, "--aspects", c.aspect, "-o", woven_path});
    REQUIRE(w.code == 0);
    auto direct = cli_run({"run", c.program, "--aspects", c.aspect, "--entry", c.entry});
    std::ostringstream o, e;
    int code = cli::main({"run", woven_path, "--entry", c.entry}, o, e);
    CHECK(code == direct.code);
    CHECK(o.str() == direct.out);
  }
}

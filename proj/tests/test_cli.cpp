#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

#ifndef SOLARZONING_CLI
#error "SOLARZONING_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SOLARZONING_CLI + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli("--help").code == 0);
  CHECK(cli("run").code != 0);
  CHECK(cli("no-such-command").code != 0);
}

TEST_CASE("a missing input file fails with its path in the message") {
  const fs::path dir = sztest::scratch_dir("cli-missing");
  REQUIRE(cli("generate-synthetic --out \"" + (dir / "data").string() + "\" --regions 1 --columns 2 --rows 2").code == 0);
  fs::remove(dir / "data" / "ordinances.csv");
  std::ofstream(dir / "config.json") << R"({"inputs": {"dir": "data"}})";
  const auto r = cli("run --config \"" + (dir / "config.json").string() + "\" --out \"" + (dir / "out").string() + "\"");
  CHECK(r.code == 2);
  CHECK_MESSAGE(r.output.find("ordinances.csv") != std::string::npos, r.output);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("a missing config is a config error") {
  const auto r = cli("run --config /nonexistent/config.json --out /tmp/solarzoning-never");
  CHECK(r.code == 2);
  CHECK(r.output.find("/nonexistent/config.json") != std::string::npos);
}

TEST_CASE("an out-of-range target override is rejected") {
  const fs::path dir = sztest::scratch_dir("cli-target");
  std::ofstream(dir / "config.json") << R"({"inputs": {"dir": "data"}})";
  const auto r = cli("run --config \"" + (dir / "config.json").string() + "\" --out \"" + (dir / "out").string() +
                     "\" --target 1.5");
  CHECK(r.code == 2);
}

#include "doctest.h"
#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string &args, const fs::path &log) {
  const std::string cmd = std::string("\"") + NEUROLENS_CLI + "\" " + args + " >\"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  testing::TempDir dir("cli");
  const auto log = dir / "log.txt";
  const auto h = dir / "h";

  CHECK(run_cli("run --config \"" + (dir / "nope.cfg").string() + "\"", log) == 2);
  CHECK(run_cli("frobnicate", log) == 2);

  REQUIRE(run_cli("synth --out \"" + h.string() + "\"", log) == 0);
  const auto cfg = (h / "pipeline.cfg").string();

  CHECK(run_cli("run --config \"" + cfg + "\" --neurons 7", log) == 0);
  CHECK(slurp(log).find("<refused>") != std::string::npos);

  CHECK(run_cli("run --config \"" + cfg + "\" --neurons 99", log) == 2);
  CHECK(run_cli("run --config \"" + cfg + "\" --set select.bogus=1", log) == 2);

  // Unrecorded requests in replay mode are an infrastructure failure.
  CHECK(run_cli("run --config \"" + cfg + "\" --neurons 0 --mode replay --set validation.caption_pairs=3 --out \"" +
                    (dir / "o2").string() + "\"",
                log) == 1);

  CHECK(run_cli("stage grid --config \"" + cfg + "\" --neurons 0 --out \"" + (dir / "o3").string() + "\"",
                log) == 2);
  CHECK(slurp(log).find("select") != std::string::npos);

  CHECK(run_cli("score-histogram \"" + (h / "out").string() + "\"", log) == 0);
  CHECK(slurp(log).find("refusals: 1") != std::string::npos);
  CHECK(run_cli("word-stats \"" + (h / "out").string() + "\" --csv", log) == 0);
}

} // TEST_SUITE

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const fs::path dir = fs::temp_directory_path() / "hgr_cli_test";
  fs::create_directories(dir);
  const std::string cmd = std::string(HGR_CLI_PATH) + " " + args + " --out " + dir.string() +
                          " > " + (dir / "stdout.txt").string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with the config code") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(run("evolve --no-such-flag") == 2);
  }

  TEST_CASE("unknown config keys are rejected") {
    const fs::path cfg = fs::temp_directory_path() / "hgr_cli_bad.ini";
    std::ofstream(cfg) << "grid=16\nnot_a_key=3\n";
    CHECK(run("--config " + cfg.string() + " norm --data zero") == 2);
    std::ofstream(cfg) << "grid=32\nbox=6\nT=0.1\nbump-radius=1\n";
    CHECK(run("--config " + cfg.string() + " evolve") == 0);
    fs::remove(cfg);
  }

  TEST_CASE("invalid values and failed preconditions") {
    CHECK(run("--grid 32 --cfl 0.9 evolve") == 2);
    CHECK(run("--grid 32 --dt 1 evolve") == 3);
    CHECK(run("--grid 32 --box 6 --T 10 evolve") == 3);
  }

  TEST_CASE("a short evolution writes its outputs") {
    CHECK(run("--grid 32 --box 6 --T 0.2 --bump-radius 1 evolve --cadence 2") == 0);
    const fs::path dir = fs::temp_directory_path() / "hgr_cli_test";
    CHECK(fs::exists(dir / "monitors.csv"));
    CHECK(fs::exists(dir / "final.snap"));
    CHECK(fs::exists(dir / "manifest.json"));
  }
}

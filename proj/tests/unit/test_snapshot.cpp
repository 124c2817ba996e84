#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "hgr/error.hpp"
#include "hgr/snapshot.hpp"

using namespace hgr;
using namespace hgr::test;
namespace fs = std::filesystem;

TEST_SUITE("snapshot") {
  TEST_CASE("binary round trip is exact") {
    const Grid3 g(8, 2.5);
    Snapshot s;
    s.grid = g;
    s.time = 0.375;
    s.names = {"a", "b"};
    s.fields = {bump(g, 1.3), ScalarField::from_function(g, [](double x, double y, double z) {
                  return std::sin(x) * y + z / 3.0;
                })};
    const fs::path p = fs::temp_directory_path() / "hgr_unit_snapshot.snap";
    write_snapshot(p, s);
    const Snapshot r = read_snapshot(p);
    CHECK(r.grid == g);
    CHECK(r.time == s.time);
    CHECK(r.names == s.names);
    REQUIRE(r.fields.size() == 2);
    for (int c = 0; c < 2; ++c) CHECK(max_abs_diff(r.fields[c], s.fields[c]) == 0.0);
    fs::remove(p);
  }

  TEST_CASE("malformed files are config errors") {
    const fs::path p = fs::temp_directory_path() / "hgr_unit_bad.snap";
    std::ofstream(p) << "NOT-A-SNAPSHOT\n";
    CHECK_THROWS_AS(read_snapshot(p), ConfigError);
    fs::remove(p);
    CHECK_THROWS_AS(read_snapshot(fs::temp_directory_path() / "hgr_missing.snap"), ConfigError);
  }

  TEST_CASE("csv export refuses large grids") {
    Snapshot s;
    s.grid = Grid3(8, 1.0);
    s.names = {"u"};
    s.fields = {ScalarField(s.grid, 1.0)};
    const fs::path p = fs::temp_directory_path() / "hgr_unit.csv";
    CHECK_NOTHROW(write_csv(p, s));
    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y,z,u");
    CHECK_THROWS_AS(write_csv(p, s, 4), PreconditionError);
    fs::remove(p);
  }
}

#include "hgr/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hgr/error.hpp"

namespace hgr {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_le(std::ostream& os, double v) {
  unsigned char b[8];
  std::memcpy(b, &v, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(const unsigned char* b) {
  unsigned char c[8];
  std::memcpy(c, b, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(c, c + 8);
  double v;
  std::memcpy(&v, c, 8);
  return v;
}

std::string expect_line(std::istream& is, const std::string& key) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("snapshot: truncated header, expected " + key);
  std::istringstream ls(line);
  std::string k;
  ls >> k;
  if (k != key) throw ConfigError("snapshot: expected '" + key + "', found '" + k + "'");
  std::string rest;
  std::getline(ls, rest);
  const auto first = rest.find_first_not_of(' ');
  return first == std::string::npos ? std::string() : rest.substr(first);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  if (snap.names.size() != snap.fields.size()) {
    throw PreconditionError("snapshot: names and fields differ in length");
  }
  for (const auto& f : snap.fields) require_same_grid(f.grid(), snap.grid, "snapshot");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("snapshot: cannot open " + path.string() + " for writing");
  os << "HGR-SNAPSHOT 1\n"
     << "n " << snap.grid.n << "\n"
     << std::setprecision(17) << "half_width " << snap.grid.half_width << "\n"
     << "components " << snap.fields.size() << "\n"
     << "time " << snap.time << "\n"
     << "names";
  for (const auto& n : snap.names) os << ' ' << n;
  os << "\nencoding float64-le\nend\n";
  for (const auto& f : snap.fields) {
    for (double v : f.values()) put_le(os, v);
  }
  if (!os) throw ConfigError("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("snapshot: cannot open " + path.string());
  std::string magic;
  std::getline(is, magic);
  if (magic != "HGR-SNAPSHOT 1") throw ConfigError("snapshot: bad magic in " + path.string());
  Snapshot snap;
  try {
    const int n = std::stoi(expect_line(is, "n"));
    const double L = std::stod(expect_line(is, "half_width"));
    const int count = std::stoi(expect_line(is, "components"));
    snap.time = std::stod(expect_line(is, "time"));
    std::istringstream names(expect_line(is, "names"));
    for (std::string nm; names >> nm;) snap.names.push_back(nm);
    if (expect_line(is, "encoding") != "float64-le") throw ConfigError("snapshot: unknown encoding");
    expect_line(is, "end");
    snap.grid = Grid3(n, L);
    if (count < 0 || std::size_t(count) != snap.names.size()) {
      throw ConfigError("snapshot: component count does not match names");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("snapshot: malformed header: ") + e.what());
  }
  const std::size_t npts = snap.grid.size();
  std::vector<unsigned char> buf(npts * 8);
  for (std::size_t c = 0; c < snap.names.size(); ++c) {
    if (!is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()))) {
      throw ConfigError("snapshot: truncated payload in " + path.string());
    }
    ScalarField f(snap.grid);
    for (std::size_t i = 0; i < npts; ++i) f[i] = get_le(buf.data() + 8 * i);
    snap.fields.push_back(std::move(f));
  }
  return snap;
}

void write_csv(const std::filesystem::path& path, const Snapshot& snap, int max_n) {
  if (snap.grid.n > max_n) throw PreconditionError("csv export: grid too large");
  std::ofstream os(path);
  if (!os) throw ConfigError("csv: cannot open " + path.string());
  os << "x,y,z";
  for (const auto& n : snap.names) os << ',' << n;
  os << '\n' << std::setprecision(17);
  for (std::size_t idx = 0; idx < snap.grid.size(); ++idx) {
    const auto x = snap.grid.position(idx);
    os << x[0] << ',' << x[1] << ',' << x[2];
    for (const auto& f : snap.fields) os << ',' << f[idx];
    os << '\n';
  }
}

}  // namespace hgr

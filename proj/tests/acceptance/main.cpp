// Runs acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any selected criterion fails.
#include <CLI11.hpp>

#include <iostream>
#include <vector>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hgr acceptance suite"};
  std::vector<int> only;
  bool quiet = false;
  app.add_option("--only", only, "criterion numbers (default: all)");
  app.add_flag("--quiet", quiet, "summary lines only");
  CLI11_PARSE(app, argc, argv);

  if (only.empty()) only = hgr::verify::criterion_ids();
  hgr::verify::VerifyOptions opt;
  if (!quiet) opt.log = &std::cerr;

  int failed = 0;
  for (int id : only) {
    const auto r = hgr::verify::run_criterion(id, opt);
    std::cout << hgr::verify::summary_line(r) << "\n";
    if (!quiet)
      for (const auto& d : r.details) std::cout << "    " << d << "\n";
    std::cout.flush();
    if (!r.pass) ++failed;
  }
  if (only.size() > 1) std::cout << (only.size() - failed) << "/" << only.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}

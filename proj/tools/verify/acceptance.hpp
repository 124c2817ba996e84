#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace hgr::verify {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::vector<std::string> details;  ///< "key = value" lines
};

struct VerifyOptions {
  std::ostream* log = nullptr;  ///< progress lines, may be null
};

std::vector<int> criterion_ids();
std::string criterion_title(int id);
double criterion_budget(int id);

/// Runs one criterion. Exceptions from the library count as failure and are
/// reported in the details.
CriterionResult run_criterion(int id, const VerifyOptions& opt = {});

/// "criterion NN  PASS|FAIL  title  (x.x s / budget s)"
std::string summary_line(const CriterionResult& r);

}  // namespace hgr::verify

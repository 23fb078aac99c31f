#pragma once

#include <string>
#include <vector>

namespace wopkit {

enum class SuiteLevel { Quick, Full };

struct CriterionResult {
  int id = 0;
  std::string name;
  long instances = 0;
  long failures = 0;
  double seconds = 0;
  double limit_seconds = 0;  // 0: no runtime bound
  std::string detail;
  bool passed() const {
    return failures == 0 && instances > 0 && (limit_seconds == 0 || seconds < limit_seconds);
  }
};

// Batteries behind the acceptance criteria; Quick shrinks every sample.
CriterionResult check_induction(SuiteLevel level);
CriterionResult check_richardson(SuiteLevel level);
CriterionResult check_iwasawa(SuiteLevel level);
CriterionResult check_orthogonality(SuiteLevel level);
CriterionResult check_adjacent(SuiteLevel level);
CriterionResult check_comparison(SuiteLevel level);
CriterionResult check_rho(SuiteLevel level);
CriterionResult check_gl2_numerics(SuiteLevel level);
CriterionResult check_families(SuiteLevel level);

std::vector<CriterionResult> run_suite(SuiteLevel level);
std::string format_line(const CriterionResult& r);

}  // namespace wopkit

#include <iostream>

#include "granuflow/validation.hpp"

int main() {
  int failed = 0;
  for (int id = 1; id <= 13; ++id) {
    const granuflow::CriterionResult r = granuflow::run_criterion(id);
    std::cout << granuflow::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (13 - failed) << "/13 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

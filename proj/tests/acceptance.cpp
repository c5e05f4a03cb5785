// Prints one PASS/FAIL line per acceptance criterion, then the measurements
// behind it. Exits nonzero when any criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "mbloch/verify.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int k = 1; k < argc; ++k) only.push_back(std::atoi(argv[k]));
  const auto results = mbloch::run_acceptance(only);
  std::cout << mbloch::format_results(results, false) << '\n'
            << mbloch::format_results(results, true);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}

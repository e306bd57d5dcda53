// Runs the acceptance suites and prints one PASS/FAIL line per criterion.
// Usage: snetfdr_acceptance_tests [suite-name ...]; no names runs all suites.
// Exits 1 when any selected suite fails.

#include <iostream>
#include <string_view>
#include <vector>

#include "snetfdr/acceptance/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace snetfdr::acceptance;
  std::vector<const Suite*> selected;
  for (int i = 1; i < argc; ++i) {
    const Suite* s = find_suite(argv[i]);
    if (s == nullptr) {
      std::cerr << "unknown suite '" << argv[i] << "'\n";
      return 2;
    }
    selected.push_back(s);
  }
  if (selected.empty()) {
    for (const auto& s : suites()) selected.push_back(&s);
  }

  int failed = 0;
  for (const Suite* s : selected) {
    const Report report = run(*s, Options{});
    print(std::cout, report, true);
    std::cout.flush();
    failed += report.passed() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

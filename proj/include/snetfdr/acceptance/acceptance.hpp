#pragma once

// The eleven acceptance criteria as runnable suites. Each suite returns a
// list of checks; the suite passes when every check does.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snetfdr/types.hpp"

namespace snetfdr::acceptance {

struct Options {
  std::uint64_t seed = 20260;
  /// Overrides the Monte Carlo iteration count of the suites that have one.
  std::optional<std::size_t> iterations;
  Execution execution = Execution::parallel;
};

struct Check {
  std::string label;
  bool passed = false;
  std::string detail;
};

struct Report {
  int criterion = 0;
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const noexcept;
  std::size_t failures() const noexcept;
};

struct Suite {
  int criterion;
  std::string_view name;
  std::string_view title;
  Report (*run)(const Options&);
};

std::span<const Suite> suites() noexcept;
const Suite* find_suite(std::string_view name) noexcept;

/// Runs one suite and records its wall time.
Report run(const Suite& suite, const Options& opts);

/// One summary line; with `verbose`, one indented line per check below it.
void print(std::ostream& out, const Report& report, bool verbose);

}  // namespace snetfdr::acceptance

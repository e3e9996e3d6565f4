#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tlb {

struct SuiteReport {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<std::string_view> verify_suite_names();

// Runs the built-in property suites in a fixed order. `on_result` is invoked
// after each suite; an exception inside a suite is reported as a failure.
std::vector<SuiteReport> run_verify(std::uint64_t seed,
                                    const std::function<void(const SuiteReport&)>& on_result = {});

}  // namespace tlb

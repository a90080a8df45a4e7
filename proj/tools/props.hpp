#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace deltaforge::cli {

struct PropResult {
  std::string suite;
  std::size_t cases = 0;
  std::size_t skipped = 0;  // inputs over a work budget
  std::vector<std::string> failures;  // at most a few, with the case seed
};

std::vector<std::string> property_suites();

/// Runs every suite (or just `only`) for `cases` seeded cases each.
std::vector<PropResult> run_properties(std::uint64_t seed, std::size_t cases, const std::string& only = {});

}  // namespace deltaforge::cli

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace kfr::audit {

struct PropertyResult {
  std::string name;
  int cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct Report {
  std::vector<PropertyResult> properties;
  bool passed() const;
};

enum class Fault { none, hungarian };

/// Checks every library routine that has a slow reference against it,
/// `cases` samples per property. With Fault::hungarian the solver is handed a
/// copy of each matrix with entry (0, 0) overwritten.
Report run(std::uint64_t seed, int cases, Fault fault = Fault::none);

void print(const Report& r, std::ostream& out);

}  // namespace kfr::audit

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "atomion/config.hpp"

namespace atomion {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool ok() const;
};

/// Built-in oracle suite on the grids of `config`. Each check is reported to
/// `log` as it finishes ("PASS name: detail" / "FAIL name: detail").
/// A non-empty `only` restricts the run to the named checks.
VerifyReport verify(const RunConfig& config, std::ostream* log = nullptr,
                    const std::vector<std::string>& only = {});

/// Names of all checks, in run order.
std::vector<std::string> verify_check_names();

}  // namespace atomion

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "atomion/config.hpp"

namespace atomion {

inline constexpr const char* kVersion = "0.1.0";

struct PointStatus {
  double beta = 0.0;
  double g = 0.0;
  std::string status = "ok";  ///< ok | convergence_failure | error
  std::string message;
  std::string cmf_hash;
  std::string if_hash;
  bool cmf_cache_hit = false;
  bool if_cache_hit = false;
  double max_residual = 0.0;
  std::size_t iterations = 0;
};

struct EmittedFile {
  std::string name;
  std::string sha256;
  std::size_t rows = 0;
};

struct RunReport {
  std::vector<PointStatus> points;
  std::vector<EmittedFile> files;
  std::size_t solves = 0;
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
  /// 0, or 3 if any point failed to converge.
  int exit_code() const;
};

/// Solve (or load) every sweep point, compute the requested observables and
/// write one CSV per emit target plus manifest.json into `config.output`.
/// Per-point failures become error rows; the run continues.
RunReport run(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace atomion

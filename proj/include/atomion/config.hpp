#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

#include "atomion/eigensolve.hpp"

namespace atomion {

/// Invalid configuration. `field` is a dotted path such as "sweep.g[2]".
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

struct GridConfig {
  double lf_extent = 4.0;
  std::size_t lf_points = 512;
  double cmf_extent = 4.0;
  std::size_t cmf_points = 256;
  double if_ion_extent = 2.0;
  std::size_t if_ion_points = 64;
  double if_rel_extent = 3.0;
  std::size_t if_rel_points = 192;
};

enum class CachePolicy { reuse, recompute };

enum class Emit { spectrum, separations, energies, overlaps, fidelity, effective, densities };
std::string to_string(Emit e);
Emit emit_from_string(const std::string& s);

struct SweepConfig {
  std::vector<double> g;
  std::vector<double> beta;
  std::vector<int> states{0, 1, 2, 3, 4};
  /// Also solve the ion-frame ground state at every beta > 0.
  bool ion_frame = false;
};

struct SolverConfig {
  EigenOptions eigen{};
  ImaginaryTimeOptions imaginary{};
  double tolerance_3d = 1e-7;
  std::size_t threads = 1;
};

struct RunConfig {
  ModelParams model = default_params();
  GridConfig grid{};
  SweepConfig sweep{};
  SolverConfig solver{};
  std::string output = "atomion-out";
  std::string cache_root;  ///< empty: no cache
  CachePolicy cache = CachePolicy::reuse;
  std::vector<Emit> emit{Emit::spectrum};

  bool emits(Emit e) const;
  /// True if any requested output needs ion-frame states.
  bool needs_ion_frame() const;
};

/// Default sweep g in {0, 0.5, ..., 80}, beta in {0, 0.034, 1}.
RunConfig default_config();

/// Missing keys keep their defaults; unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

/// Parse JSON text; syntax errors are reported with line and column.
nlohmann::json parse_config_text(const std::string& text, const std::string& origin);
RunConfig load_config_file(const std::string& path);

/// Apply "a.b.c=value" to `j`. The value is parsed as JSON when possible and
/// as a plain string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Throws ConfigError on the first violated constraint.
void validate(const RunConfig& c);

}  // namespace atomion

#pragma once

// Run configuration: one JSON document with every experiment default built in.
// Unknown keys are rejected; errors name the offending field path.

#include <filesystem>
#include <optional>
#include <string>

#include "lensforge/lens.hpp"
#include "lensforge/phasecenter.hpp"
#include "lensforge/radiators.hpp"

namespace lensforge {

class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : InvalidInput(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class AntennaKind { Single, Array2x2 };

struct AntennaConfig {
  AntennaKind kind = AntennaKind::Array2x2;
  double frequency_ghz = 30.2;
  SubstrateSpec substrate;
  std::optional<double> patch_width_mm;
  std::optional<double> patch_length_mm;
  double spacing_wavelengths = 0.7;
};

struct LensConfig {
  double eps_r = 2.4;
  double radius_mm = 17.27;
  std::optional<double> extension_mm;
};

struct PhaseCenterConfig {
  double delta_theta_deg = 22.5;
  double plane_z_wavelengths = 10.0;
  std::size_t grid_n = 41;
  double d_min_mm = -30.0;
  double d_max_mm = 30.0;
  double d_step_mm = 0.2;
};

struct SweepConfig {
  double d_lo_mm = 0.0;
  double d_hi_mm = 10.0;
  double step_mm = 0.5;
  FeedMode mode = FeedMode::SampledField;
};

struct PatternConfig {
  std::optional<double> gap_mm;  // defaults to the fitted phase centre, clamped to >= 0
  double theta_step_deg = 0.5;
  double phi_step_deg = 5.0;
};

struct OutputConfig {
  std::string directory = "lensforge_out";
  bool emit_plots = true;
  bool emit_rays = false;
};

struct RunConfig {
  AntennaConfig antenna;
  LensConfig lens;
  PhaseCenterConfig phasecenter;
  SweepConfig sweep;
  PatternConfig pattern;
  OutputConfig output;
};

/// Parses and validates a JSON document; absent fields keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

/// Validation shared by parse_config and programmatic callers.
void validate(const RunConfig& config);

// Module inputs derived from a validated configuration.
WaveSpec wave_of(const RunConfig& config);
PatchGeometry patch_of(const RunConfig& config);
ArrayAntenna antenna_of(const RunConfig& config);
LensSpec lens_of(const RunConfig& config);
PhaseCenterSetup phase_center_setup_of(const RunConfig& config);
std::vector<double> sweep_gaps_of(const RunConfig& config);

}  // namespace lensforge

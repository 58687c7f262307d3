#pragma once

// Phase-centre estimation: sample a radiator's phase on a probe plane cut by a cone
// of half-angle delta_theta, then fit the height D of the spherical-wave centre on
// the z axis by least squares.

#include <functional>
#include <vector>

#include "lensforge/emcore.hpp"
#include "lensforge/radiators.hpp"

namespace lensforge {

/// Upper bound on the phase error of a well-formed phase front.
inline constexpr double kWellFormedPhaseErrorDeg = 22.5;

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

struct MeasurementPlane {
  WaveSpec wave;
  double z_plane = 0.0;      // mm above the antenna surface
  double delta_theta = 0.0;  // rad, half-angle of the sampling cone
  std::size_t grid_n = 0;    // samples per side, odd
  double radius = 0.0;       // z_plane * tan(delta_theta)
  double spacing = 0.0;      // lattice pitch, mm
  std::vector<PlanePoint> points;
};

/// grid_n x grid_n lattice over the bounding square of the cone's footprint, masked
/// to the disk. The centre sample (0, 0) is always kept.
MeasurementPlane build_plane(const WaveSpec& wave, double delta_theta, double z_plane,
                             std::size_t grid_n);

struct PhaseGrid {
  MeasurementPlane plane;
  std::vector<double> phase;      // rad, unwrapped, one per plane point
  std::vector<double> amplitude;  // linear, one per plane point
};

using FieldProbe = std::function<ComplexAmp(const Vec3&)>;

/// Samples an arbitrary field on the plane and unwraps the phase outward from the centre.
PhaseGrid sample_phase(const FieldProbe& probe, const MeasurementPlane& plane);
PhaseGrid sample_phase(const ArrayAntenna& antenna, const MeasurementPlane& plane);

enum class ResidualMode {
  Unwrapped,  // sum of squared unwrapped residuals after removing their mean
  Circular,   // sum of |exp(j phi_m) - exp(j(phi_i + c))|^2 with the optimal c
};

struct PhaseFitOptions {
  ResidualMode mode = ResidualMode::Unwrapped;
  bool amplitude_weighted = false;
};

/// Phase function S(D) in rad^2 for a candidate centre at (0, 0, d_candidate).
double phase_function_S(const PhaseGrid& measured, double d_candidate,
                        const PhaseFitOptions& options = {});

/// Largest |residual - offset| over the plane, in degrees.
double max_phase_error(const PhaseGrid& measured, double d, const PhaseFitOptions& options = {});

struct PhaseCurvePoint {
  double d_mm = 0.0;
  double s_rad2 = 0.0;
  double max_phase_error_deg = 0.0;
};

struct PhaseCenterResult {
  double d_star = 0.0;
  double s_at_d_star = 0.0;
  std::vector<PhaseCurvePoint> s_curve;  // ascending D
  double max_phase_error_deg = 0.0;
  bool well_formed = false;
};

struct ScanRange {
  double d_min = -30.0;
  double d_max = 30.0;
  double d_step = 0.2;
};

/// Scan grid d_min, d_min + step, ... up to d_max (inclusive when it lands on the grid).
std::vector<double> scan_grid(const ScanRange& range);

PhaseCenterResult find_phase_center(const PhaseGrid& measured, const ScanRange& range,
                                    const PhaseFitOptions& options = {});
PhaseCenterResult find_phase_center(const ArrayAntenna& antenna, const MeasurementPlane& plane,
                                    const ScanRange& range, const PhaseFitOptions& options = {});

/// Probe-plane defaults: cone half-angle 22.5 deg, plane at 10 wavelengths, 41x41 lattice.
struct PhaseCenterSetup {
  double delta_theta = deg_to_rad(22.5);
  double plane_z_wavelengths = 10.0;
  std::size_t grid_n = 41;
  ScanRange range;
  PhaseFitOptions fit;
};

PhaseCenterResult find_phase_center(const ArrayAntenna& antenna, const PhaseCenterSetup& setup);

}  // namespace lensforge

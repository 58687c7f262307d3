#pragma once

// Homogeneous dielectric lens: synthesis of the extended hemispherical shape, first-order
// geometrical-optics ray tracing through flat face -> dielectric -> cap, deposition of
// ray tubes onto a planar exit aperture, and scalar aperture integration to the far field.
//
// Geometry for a placement with air gap D above the antenna surface (z = 0):
//   flat face at z = D, cylindrical wall of radius R for D <= z <= D + L,
//   cap (sphere, or ellipsoid for the oracle shape) centred at (0, 0, D + L),
//   aperture plane tangent to the cap apex.

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "lensforge/emcore.hpp"
#include "lensforge/radiators.hpp"

namespace lensforge {

enum class LensShape {
  ExtendedHemispherical,
  EllipticalOracle,  // ellipsoidal cap of eccentricity 1/n, far focus on the flat face
};

struct LensSpec {
  double eps_r = 0.0;
  double n = 0.0;
  double radius_mm = 0.0;      // rim radius R
  double b_mm = 0.0;           // synthesis auxiliary (semi-minor axis for the oracle shape)
  double extension_mm = 0.0;   // cylinder height L
  double cap_height_mm = 0.0;  // R for a hemisphere, semi-major axis for the ellipsoid
  LensShape shape = LensShape::ExtendedHemispherical;
};

/// Extension from the synthesized-ellipse relation:
///   b = R (1 + 1/(3 n^2)),  L = b (1 + 1/n) / sqrt(1 - 1/n^2) - R.
LensSpec synthesize_lens(double radius_mm, double eps_r);

/// Extended hemisphere with a caller-chosen extension height.
LensSpec lens_with_extension(double radius_mm, double eps_r, double extension_mm);

/// Exact collimating ellipsoid with semi-minor axis R; its far focus sits at the face centre.
LensSpec elliptical_oracle_lens(double radius_mm, double eps_r);

/// Directivity of a uniformly illuminated circular aperture of the lens radius: (2 pi R / lambda)^2.
double theoretical_max_gain(const LensSpec& lens, const WaveSpec& wave);

struct LensPlacement {
  LensSpec lens;
  double d_gap_mm = 0.0;

  double face_z() const { return d_gap_mm; }
  double cap_center_z() const { return d_gap_mm + lens.extension_mm; }
  double apex_z() const { return cap_center_z() + lens.cap_height_mm; }
  /// Far focus of the oracle ellipsoid (the face centre).
  Vec3 oracle_focus() const { return {0.0, 0.0, d_gap_mm}; }
};

enum class RayStatus : std::uint8_t { Exited, SpilloverMissed, TotalInternalReflection, SideWall };

const char* to_string(RayStatus status);

/// Medium a ray is launched into when its source lies exactly on the flat face.
enum class LaunchMedium {
  Air,         // limit of a source just below the face: refracted into the lens
  Dielectric,  // feed embedded at the base: launch direction is already inside the lens
};

struct TracedRay {
  Vec3 launch_direction;
  Vec3 face_point;
  Vec3 surface_point;  // where the ray leaves the cap
  Vec3 exit_point;     // on the aperture plane
  Vec3 exit_direction;
  double air_path_mm = 0.0;      // source to face
  double optical_path_mm = 0.0;  // source to aperture plane, dielectric segment weighted by n
  double amplitude_factor = 0.0;  // sqrt of the product of both interface power transmittances
  RayStatus status = RayStatus::SpilloverMissed;
};

TracedRay trace_ray(const LensPlacement& placement, const Vec3& source_point,
                    const Vec3& launch_direction, LaunchMedium medium = LaunchMedium::Air);

/// A point source with a power pattern U(theta, phi) in its launch medium.
struct PointSourceFeed {
  Vec3 position;
  std::function<double(double, double)> intensity;
  LaunchMedium medium = LaunchMedium::Air;
};

/// Rays radiate from `phase_center` with the antenna's far-zone intensity; the phase of each
/// ray is the antenna's near field sampled where the ray pierces the flat face.
struct SampledFieldFeed {
  const ArrayAntenna* antenna = nullptr;
  Vec3 phase_center;
};

using Feed = std::variant<PointSourceFeed, SampledFieldFeed>;

struct ApertureOptions {
  std::size_t ray_count = 40000;   // rays inside the launch cone; at least 1e4
  double cell_size_mm = 0.0;       // 0 selects lambda/4
  double azimuth_offset = 0.0;     // rotates the launch grid about z, rad
  double cone_margin = deg_to_rad(5.0);
  double face_sample_floor_mm = 1e-3;  // lowest height at which the near field is sampled
  bool keep_rays = false;
};

struct ApertureField {
  double plane_z = 0.0;
  double cell_size = 0.0;
  std::size_t cells_per_side = 0;
  double origin = 0.0;  // x and y of the lower-left cell corner
  std::vector<ComplexAmp> cells;  // row-major [iy][ix]; cell average of the aperture field

  double power_in_rays = 0.0;      // everything the source radiates into its half-space
  double power_exited = 0.0;       // delivered to the aperture after interface losses
  double power_exit_geometric = 0.0;  // launched power of rays that left through the cap
  double power_tir = 0.0;
  double power_side_wall = 0.0;
  double power_missed = 0.0;
  double spillover_efficiency = 0.0;
  double transmission_efficiency = 0.0;
  std::size_t rays_traced = 0;
  std::vector<TracedRay> rays;  // only with keep_rays

  double cell_center(std::size_t i) const {
    return origin + (static_cast<double>(i) + 0.5) * cell_size;
  }
  ComplexAmp& at(std::size_t iy, std::size_t ix) { return cells[iy * cells_per_side + ix]; }
  const ComplexAmp& at(std::size_t iy, std::size_t ix) const {
    return cells[iy * cells_per_side + ix];
  }
};

ApertureField aperture_from_rays(const LensPlacement& placement, const Feed& feed,
                                 const WaveSpec& wave, const ApertureOptions& options = {});

struct PatternGrid {
  double theta_step = deg_to_rad(0.5);
  double phi_step = deg_to_rad(5.0);
  double theta_max = deg_to_rad(90.0);  // exclusive
};

struct FarFieldPattern {
  std::vector<double> theta;  // rad
  std::vector<double> phi;    // rad
  std::vector<double> intensity;  // |E|^2, row-major [theta][phi]
  std::vector<double> gain_dbi;   // row-major [theta][phi]
  double boresight_directivity_dbi = 0.0;
  double peak_directivity_dbi = 0.0;
  double peak_theta = 0.0;
  double peak_phi = 0.0;
  double spillover_efficiency = 1.0;
  double transmission_efficiency = 1.0;
  double gain_estimate_dbi = 0.0;

  double intensity_at(std::size_t it, std::size_t ip) const {
    return intensity[it * phi.size() + ip];
  }
};

/// Scalar aperture integration. Requires cell_size <= lambda/2. Directivity is normalised by
/// power_exited when it is set, otherwise by the sum of |E|^2 over the cells.
FarFieldPattern far_field_from_aperture(const ApertureField& aperture, const WaveSpec& wave,
                                        const PatternGrid& grid = {});

/// First sidelobe level relative to boresight in dB along the cut nearest to `phi`.
/// Returns NaN when the cut has no sidelobe.
double first_sidelobe_db(const FarFieldPattern& pattern, double phi);

enum class FeedMode { PointSource, SampledField };

const char* to_string(FeedMode mode);

struct LensGainOptions {
  double phase_center_mm = 0.0;  // fitted phase-centre height of the antenna
  ApertureOptions aperture;
  PatternGrid pattern;
};

/// Aperture stage of lens_gain.
ApertureField lens_aperture(const ArrayAntenna& antenna, const LensPlacement& placement,
                            FeedMode mode, const LensGainOptions& options = {});

/// Full lens-antenna chain for `antenna` with the lens at `placement`.
/// Point-source mode refuses a phase centre above the flat face.
FarFieldPattern lens_gain(const ArrayAntenna& antenna, const LensPlacement& placement,
                          FeedMode mode, const LensGainOptions& options = {});

}  // namespace lensforge

#pragma once

// Shared wave constants, vector geometry, interface physics and phase unwrapping.
// Lengths are millimetres, angles radians, frequencies GHz.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lensforge {

inline constexpr double kPi = std::numbers::pi;
/// Speed of light in mm·GHz (equivalently mm/ns).
inline constexpr double kSpeedOfLight = 299.792458;

using ComplexAmp = std::complex<double>;

/// Raised when a caller violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a ray cannot leave a denser medium.
class TotalInternalReflection : public std::domain_error {
 public:
  TotalInternalReflection() : std::domain_error("total internal reflection") {}
};

/// Raised when a lens configuration lets no energy through.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  friend Vec3 operator*(double s, const Vec3& v) { return v * s; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  double rho() const { return std::hypot(x, y); }
  Vec3 normalized() const { return *this * (1.0 / norm()); }
};

/// Unit vector from polar angle theta (from +z) and azimuth phi.
inline Vec3 direction_from_angles(double theta, double phi) {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

struct WaveSpec {
  double frequency_ghz = 0.0;
  double wavelength_mm = 0.0;
  double wavenumber = 0.0;  // rad/mm
};

WaveSpec wave_from_frequency(double frequency_ghz);

/// Refracts a unit ray direction at an interface. The normal may point to either
/// side. Returns std::nullopt on total internal reflection.
std::optional<Vec3> snell_refract(const Vec3& incident, const Vec3& surface_normal,
                                  double n_in, double n_out);

struct FresnelCoefficients {
  double t_perp = 0.0;
  double t_par = 0.0;
  double r_perp = 0.0;
  double r_par = 0.0;
  double reflectance = 0.0;          // unpolarized mean
  double power_transmittance = 0.0;  // 1 - reflectance
};

/// Fresnel amplitude coefficients for incidence angle theta_in in medium n_in.
/// Throws TotalInternalReflection beyond the critical angle.
FresnelCoefficients fresnel_transmission(double theta_in, double n_in, double n_out);

/// Row-major 2-D phase samples with an optional validity mask. Unwrapping walks
/// outward from (center_row, center_col).
struct PhaseMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t center_row = 0;
  std::size_t center_col = 0;
  std::vector<double> values;
  std::vector<unsigned char> valid;  // empty means every sample valid

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool is_valid(std::size_t r, std::size_t c) const {
    return valid.empty() || valid[r * cols + c] != 0;
  }
};

/// Wraps an angle into (-pi, pi].
double wrap_phase(double phase);

/// Unwraps along the center row in both directions, then up and down every column
/// starting at the center row. Masked samples break a path; samples beyond a
/// break are left unchanged.
PhaseMap unwrap_phase_radial(const PhaseMap& wrapped);

}  // namespace lensforge

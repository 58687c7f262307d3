#include "lensforge/emcore.hpp"

#include <algorithm>

namespace lensforge {

namespace {

constexpr double kUnitTolerance = 1e-9;

void require_unit(const Vec3& v, const char* what) {
  if (!(std::abs(v.norm() - 1.0) <= kUnitTolerance)) {
    throw InvalidInput(std::string(what) + " must be a unit vector");
  }
}

void require_index(double n, const char* what) {
  if (!(n >= 1.0)) throw InvalidInput(std::string(what) + " must be >= 1");
}

}  // namespace

WaveSpec wave_from_frequency(double frequency_ghz) {
  if (!(frequency_ghz > 0.0) || !std::isfinite(frequency_ghz)) {
    throw InvalidInput("frequency must be positive");
  }
  WaveSpec w;
  w.frequency_ghz = frequency_ghz;
  w.wavelength_mm = kSpeedOfLight / frequency_ghz;
  w.wavenumber = 2.0 * kPi / w.wavelength_mm;
  return w;
}

std::optional<Vec3> snell_refract(const Vec3& incident, const Vec3& surface_normal,
                                  double n_in, double n_out) {
  require_unit(incident, "incident direction");
  require_unit(surface_normal, "surface normal");
  require_index(n_in, "n_in");
  require_index(n_out, "n_out");

  // Orient the normal against the incident ray.
  Vec3 normal = surface_normal;
  double cos_i = -incident.dot(normal);
  if (cos_i < 0.0) {
    normal = -normal;
    cos_i = -cos_i;
  }
  cos_i = std::min(cos_i, 1.0);
  const double eta = n_in / n_out;
  const double sin2_t = eta * eta * (1.0 - cos_i * cos_i);
  if (sin2_t > 1.0) return std::nullopt;
  const double cos_t = std::sqrt(1.0 - sin2_t);
  const Vec3 t = incident * eta + normal * (eta * cos_i - cos_t);
  return t.normalized();
}

FresnelCoefficients fresnel_transmission(double theta_in, double n_in, double n_out) {
  require_index(n_in, "n_in");
  require_index(n_out, "n_out");
  if (!(theta_in >= 0.0) || theta_in > kPi / 2.0) {
    throw InvalidInput("incidence angle must lie in [0, pi/2]");
  }
  const double sin_t = n_in / n_out * std::sin(theta_in);
  if (sin_t > 1.0) throw TotalInternalReflection();

  const double ci = std::cos(theta_in);
  const double ct = std::sqrt(std::max(0.0, 1.0 - sin_t * sin_t));
  FresnelCoefficients f;
  const double den_s = n_in * ci + n_out * ct;
  const double den_p = n_out * ci + n_in * ct;
  if (den_s == 0.0 || den_p == 0.0) {
    // Grazing incidence at the critical angle: nothing is transmitted.
    f.r_perp = 1.0;
    f.r_par = 1.0;
  } else {
    f.r_perp = (n_in * ci - n_out * ct) / den_s;
    f.r_par = (n_out * ci - n_in * ct) / den_p;
    f.t_perp = 2.0 * n_in * ci / den_s;
    f.t_par = 2.0 * n_in * ci / den_p;
  }
  f.reflectance = 0.5 * (f.r_perp * f.r_perp + f.r_par * f.r_par);
  f.power_transmittance = 1.0 - f.reflectance;
  return f;
}

double wrap_phase(double phase) {
  double w = std::remainder(phase, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

PhaseMap unwrap_phase_radial(const PhaseMap& wrapped) {
  if (wrapped.values.size() != wrapped.rows * wrapped.cols) {
    throw InvalidInput("phase map size does not match rows*cols");
  }
  if (wrapped.center_row >= wrapped.rows || wrapped.center_col >= wrapped.cols) {
    throw InvalidInput("phase map center outside the grid");
  }
  PhaseMap out = wrapped;

  // Steps from (r0,c0) to (r1,c1); returns false when the path is broken.
  auto step = [&](std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
    if (!out.is_valid(r0, c0) || !out.is_valid(r1, c1)) return false;
    const double prev = out.at(r0, c0);
    out.at(r1, c1) = prev + wrap_phase(wrapped.at(r1, c1) - prev);
    return true;
  };

  const std::size_t cr = out.center_row;
  const std::size_t cc = out.center_col;
  for (std::size_t c = cc + 1; c < out.cols; ++c) {
    if (!step(cr, c - 1, cr, c)) break;
  }
  for (std::size_t c = cc; c-- > 0;) {
    if (!step(cr, c + 1, cr, c)) break;
  }
  for (std::size_t c = 0; c < out.cols; ++c) {
    for (std::size_t r = cr + 1; r < out.rows; ++r) {
      if (!step(r - 1, c, r, c)) break;
    }
    for (std::size_t r = cr; r-- > 0;) {
      if (!step(r + 1, c, r, c)) break;
    }
  }
  return out;
}

}  // namespace lensforge

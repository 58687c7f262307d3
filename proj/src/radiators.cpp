#include "lensforge/radiators.hpp"

#include <algorithm>

namespace lensforge {

namespace {

double effective_permittivity(const SubstrateSpec& s, double width) {
  return (s.eps_r + 1.0) / 2.0 +
         (s.eps_r - 1.0) / 2.0 / std::sqrt(1.0 + 12.0 * s.height_mm / width);
}

double fringing_extension(const SubstrateSpec& s, double width, double eps_eff) {
  const double wh = width / s.height_mm;
  return 0.412 * s.height_mm * (eps_eff + 0.3) * (wh + 0.264) / ((eps_eff - 0.258) * (wh + 0.8));
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

void validate(const SubstrateSpec& substrate) {
  if (!(substrate.eps_r >= 1.0)) throw InvalidInput("substrate eps_r must be >= 1");
  if (!(substrate.height_mm > 0.0)) throw InvalidInput("substrate height must be > 0");
}

PatchGeometry synthesize_patch(const WaveSpec& wave, const SubstrateSpec& substrate) {
  validate(substrate);
  if (!(wave.frequency_ghz > 0.0)) throw InvalidInput("wave frequency must be > 0");
  const double half_wave = kSpeedOfLight / (2.0 * wave.frequency_ghz);
  PatchGeometry p;
  p.width_mm = half_wave * std::sqrt(2.0 / (substrate.eps_r + 1.0));
  p.eps_eff = effective_permittivity(substrate, p.width_mm);
  p.delta_l_mm = fringing_extension(substrate, p.width_mm, p.eps_eff);
  p.length_mm = half_wave / std::sqrt(p.eps_eff) - 2.0 * p.delta_l_mm;
  return p;
}

PatchGeometry patch_from_dimensions(const SubstrateSpec& substrate, double width_mm,
                                    double length_mm) {
  validate(substrate);
  if (!(width_mm > 0.0) || !(length_mm > 0.0)) {
    throw InvalidInput("patch width and length must be > 0");
  }
  PatchGeometry p;
  p.width_mm = width_mm;
  p.length_mm = length_mm;
  p.eps_eff = effective_permittivity(substrate, width_mm);
  p.delta_l_mm = fringing_extension(substrate, width_mm, p.eps_eff);
  return p;
}

ComplexAmp element_pattern(const PatchGeometry& patch, const WaveSpec& wave, double theta,
                           double phi) {
  if (!(theta >= 0.0) || theta > kPi / 2.0 + 1e-12) {
    throw InvalidInput("element pattern defined for theta in [0, pi/2] only");
  }
  const double k = wave.wavenumber;
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const double effective_length = patch.length_mm + 2.0 * patch.delta_l_mm;
  // Slot factor across the width, two-slot array factor along the length.
  const double slot = sinc(0.5 * k * patch.width_mm * st * sp);
  const double pair = std::cos(0.5 * k * effective_length * st * cp);
  // |E_theta|^2 + |E_phi|^2 polarization projection of an x-directed aperture field.
  const double projection = std::sqrt(cp * cp + ct * ct * sp * sp);
  return {slot * pair * projection, 0.0};
}

ArrayAntenna::ArrayAntenna(ElementModel model, PatchGeometry element, SubstrateSpec substrate,
                           WaveSpec wave, std::vector<Vec3> positions,
                           std::vector<ComplexAmp> excitations)
    : model_(model),
      element_(element),
      substrate_(substrate),
      wave_(wave),
      positions_(std::move(positions)),
      excitations_(std::move(excitations)) {
  if (positions_.empty()) throw InvalidInput("antenna needs at least one element");
  if (positions_.size() != excitations_.size()) {
    throw InvalidInput("element positions and excitations differ in length");
  }
  for (const auto& p : positions_) {
    if (p.z != 0.0) throw InvalidInput("antenna elements must lie in the z = 0 plane");
  }
  if (!(wave_.wavenumber > 0.0)) throw InvalidInput("antenna wave spec is not initialised");
}

ComplexAmp ArrayAntenna::element_response(double theta, double phi) const {
  if (model_ == ElementModel::Isotropic) return {1.0, 0.0};
  return element_pattern(element_, wave_, theta, phi);
}

ArrayAntenna ArrayAntenna::scaled(ComplexAmp factor) const {
  std::vector<ComplexAmp> ex = excitations_;
  for (auto& e : ex) e *= factor;
  return ArrayAntenna(model_, element_, substrate_, wave_, positions_, std::move(ex));
}

ArrayAntenna make_single_patch(const WaveSpec& wave, const SubstrateSpec& substrate,
                               const PatchGeometry& patch) {
  return ArrayAntenna(ElementModel::Patch, patch, substrate, wave, {Vec3{}}, {ComplexAmp{1.0}});
}

ArrayAntenna make_array_2x2(const WaveSpec& wave, const SubstrateSpec& substrate,
                            const PatchGeometry& patch, double spacing_wavelengths) {
  if (!(spacing_wavelengths > 0.0)) throw InvalidInput("element spacing must be > 0");
  const double h = 0.5 * spacing_wavelengths * wave.wavelength_mm;
  std::vector<Vec3> pos = {{-h, -h, 0.0}, {h, -h, 0.0}, {-h, h, 0.0}, {h, h, 0.0}};
  std::vector<ComplexAmp> ex(4, ComplexAmp{1.0});
  return ArrayAntenna(ElementModel::Patch, patch, substrate, wave, std::move(pos), std::move(ex));
}

ArrayAntenna make_isotropic_source(const WaveSpec& wave) {
  return ArrayAntenna(ElementModel::Isotropic, PatchGeometry{}, SubstrateSpec{}, wave, {Vec3{}},
                      {ComplexAmp{1.0}});
}

ComplexAmp field_at_point(const ArrayAntenna& antenna, const Vec3& point) {
  if (!(point.z > 0.0)) throw InvalidInput("field point must lie above the ground plane (z > 0)");
  const double k = antenna.wave().wavenumber;
  ComplexAmp sum{0.0, 0.0};
  for (std::size_t i = 0; i < antenna.size(); ++i) {
    const Vec3 d = point - antenna.positions()[i];
    const double r = d.norm();
    if (r == 0.0) throw InvalidInput("field point coincides with an element");
    const double theta = std::acos(std::clamp(d.z / r, -1.0, 1.0));
    const double phi = std::atan2(d.y, d.x);
    sum += antenna.excitations()[i] * antenna.element_response(theta, phi) *
           std::polar(1.0 / r, -k * r);
  }
  return sum;
}

ComplexAmp far_field(const ArrayAntenna& antenna, double theta, double phi) {
  const double k = antenna.wave().wavenumber;
  const Vec3 u = direction_from_angles(theta, phi);
  ComplexAmp af{0.0, 0.0};
  for (std::size_t i = 0; i < antenna.size(); ++i) {
    af += antenna.excitations()[i] * std::polar(1.0, k * u.dot(antenna.positions()[i]));
  }
  return af * antenna.element_response(theta, phi);
}

HemispherePattern hemisphere_directivity(const std::function<double(double, double)>& intensity,
                                         double resolution) {
  if (!(resolution > 0.0) || resolution > deg_to_rad(2.0) + 1e-12) {
    throw InvalidInput("angular resolution must be in (0, 2 deg]");
  }
  const auto n_theta = static_cast<std::size_t>(std::ceil(kPi / 2.0 / resolution));
  const auto n_phi = static_cast<std::size_t>(std::ceil(2.0 * kPi / resolution));
  const double d_theta = kPi / 2.0 / static_cast<double>(n_theta);
  const double d_phi = 2.0 * kPi / static_cast<double>(n_phi);

  HemispherePattern out;
  out.theta.resize(n_theta + 1);
  out.phi.resize(n_phi);
  for (std::size_t i = 0; i <= n_theta; ++i) out.theta[i] = d_theta * static_cast<double>(i);
  for (std::size_t j = 0; j < n_phi; ++j) out.phi[j] = d_phi * static_cast<double>(j);

  std::vector<double> u((n_theta + 1) * n_phi);
  double power = 0.0;
  double u_max = 0.0;
  for (std::size_t i = 0; i <= n_theta; ++i) {
    double ring = 0.0;
    for (std::size_t j = 0; j < n_phi; ++j) {
      const double v = intensity(out.theta[i], out.phi[j]);
      u[i * n_phi + j] = v;
      ring += v;
      u_max = std::max(u_max, v);
    }
    const double w = (i == 0 || i == n_theta) ? 0.5 : 1.0;
    power += w * std::sin(out.theta[i]) * ring * d_phi * d_theta;
  }
  if (!(power > 0.0)) throw DegenerateGeometry("pattern radiates no power");

  out.radiated_power = power;
  out.directivity.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out.directivity[i] = 4.0 * kPi * u[i] / power;
  out.boresight_directivity_dbi = 10.0 * std::log10(out.directivity[0]);
  out.peak_directivity_dbi = 10.0 * std::log10(4.0 * kPi * u_max / power);
  return out;
}

HemispherePattern far_field_directivity(const ArrayAntenna& antenna, double resolution) {
  return hemisphere_directivity(
      [&](double th, double ph) { return std::norm(far_field(antenna, th, ph)); }, resolution);
}

double radiated_power(const ArrayAntenna& antenna, double resolution) {
  return far_field_directivity(antenna, resolution).radiated_power;
}

}  // namespace lensforge

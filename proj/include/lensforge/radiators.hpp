#pragma once

// Analytic microstrip radiators: transmission-line patch synthesis, the two-slot
// cavity-model element pattern, and point-radiator superposition for arrays over an
// infinite ground plane (no field below z = 0).

#include <functional>
#include <vector>

#include "lensforge/emcore.hpp"

namespace lensforge {

struct SubstrateSpec {
  double eps_r = 2.2;
  double height_mm = 0.127;
};

struct PatchGeometry {
  double width_mm = 0.0;
  double length_mm = 0.0;
  double eps_eff = 1.0;
  double delta_l_mm = 0.0;  // fringing extension per radiating edge
};

void validate(const SubstrateSpec& substrate);

/// Standard transmission-line design: width for efficient radiation, effective
/// permittivity from W/h, fringing extension, and resonant length.
PatchGeometry synthesize_patch(const WaveSpec& wave, const SubstrateSpec& substrate);

/// Keeps the given width and length and fills eps_eff / delta_l from the same closed forms.
PatchGeometry patch_from_dimensions(const SubstrateSpec& substrate, double width_mm,
                                    double length_mm);

/// Co-polar two-slot cavity-model pattern, radiating edges separated along x.
/// Real valued, normalized to 1 at broadside. theta must lie in [0, pi/2].
ComplexAmp element_pattern(const PatchGeometry& patch, const WaveSpec& wave, double theta,
                           double phi);

enum class ElementModel { Patch, Isotropic };

class ArrayAntenna {
 public:
  ArrayAntenna(ElementModel model, PatchGeometry element, SubstrateSpec substrate,
               WaveSpec wave, std::vector<Vec3> positions, std::vector<ComplexAmp> excitations);

  ElementModel model() const { return model_; }
  const PatchGeometry& element() const { return element_; }
  const SubstrateSpec& substrate() const { return substrate_; }
  const WaveSpec& wave() const { return wave_; }
  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<ComplexAmp>& excitations() const { return excitations_; }
  std::size_t size() const { return positions_.size(); }

  /// Element pattern of one radiator (1 everywhere for the isotropic model).
  ComplexAmp element_response(double theta, double phi) const;

  /// Returns a copy with every excitation multiplied by `factor`.
  ArrayAntenna scaled(ComplexAmp factor) const;

 private:
  ElementModel model_;
  PatchGeometry element_;
  SubstrateSpec substrate_;
  WaveSpec wave_;
  std::vector<Vec3> positions_;
  std::vector<ComplexAmp> excitations_;
};

ArrayAntenna make_single_patch(const WaveSpec& wave, const SubstrateSpec& substrate,
                               const PatchGeometry& patch);

/// 2x2 uniformly excited array centred on the origin; spacing is centre to centre.
ArrayAntenna make_array_2x2(const WaveSpec& wave, const SubstrateSpec& substrate,
                            const PatchGeometry& patch, double spacing_wavelengths = 0.7);

/// One isotropic radiator at the origin.
ArrayAntenna make_isotropic_source(const WaveSpec& wave);

/// Sum over elements of excitation * pattern * exp(-jkr)/r. Requires point.z > 0.
ComplexAmp field_at_point(const ArrayAntenna& antenna, const Vec3& point);

/// Far-zone angular pattern (the exp(-jkr)/r factor removed), phase referenced to the origin.
ComplexAmp far_field(const ArrayAntenna& antenna, double theta, double phi);

struct HemispherePattern {
  std::vector<double> theta;      // rad, 0 .. pi/2 inclusive
  std::vector<double> phi;        // rad, periodic, 0 .. 2pi exclusive
  std::vector<double> directivity;  // linear, row-major [theta][phi]
  double radiated_power = 0.0;    // integral of the raw intensity over the hemisphere
  double boresight_directivity_dbi = 0.0;
  double peak_directivity_dbi = 0.0;
};

/// Directivity of an arbitrary intensity pattern radiating into the upper half-space,
/// by trapezoidal quadrature with angular step <= resolution (at most 2 degrees).
HemispherePattern hemisphere_directivity(const std::function<double(double, double)>& intensity,
                                         double resolution);

HemispherePattern far_field_directivity(const ArrayAntenna& antenna, double resolution);

/// Total power radiated by `antenna` in the normalization used by far_field().
double radiated_power(const ArrayAntenna& antenna, double resolution = deg_to_rad(0.5));

}  // namespace lensforge

#include "lensforge/phasecenter.hpp"

#include <algorithm>
#include <limits>

#include "lensforge/golden_section.hpp"

namespace lensforge {

namespace {

constexpr double kRefineTolerance = 1e-4;  // mm

struct Residuals {
  std::vector<double> r;
  std::vector<double> w;  // normalized to mean 1
  double offset = 0.0;
};

Residuals residuals(const PhaseGrid& g, double d, const PhaseFitOptions& opt) {
  if (!(d < g.plane.z_plane)) {
    throw InvalidInput("candidate centre must lie below the probe plane");
  }
  const double k = g.plane.wave.wavenumber;
  const double dz = g.plane.z_plane - d;
  const std::size_t n = g.phase.size();
  Residuals out;
  out.r.resize(n);
  out.w.assign(n, 1.0);
  if (opt.amplitude_weighted) {
    double mean = 0.0;
    for (double a : g.amplitude) mean += a;
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.w[i] = g.amplitude[i] / mean;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = g.plane.points[i];
    const double ideal = -k * std::sqrt(p.x * p.x + p.y * p.y + dz * dz);
    out.r[i] = g.phase[i] - ideal;
  }
  double wsum = 0.0;
  if (opt.mode == ResidualMode::Unwrapped) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += out.w[i] * out.r[i];
      wsum += out.w[i];
    }
    out.offset = acc / wsum;
  } else {
    ComplexAmp acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc += out.w[i] * std::polar(1.0, out.r[i]);
    out.offset = std::arg(acc);
  }
  return out;
}

}  // namespace

MeasurementPlane build_plane(const WaveSpec& wave, double delta_theta, double z_plane,
                             std::size_t grid_n) {
  if (!(delta_theta > 0.0) || !(delta_theta < kPi / 2.0)) {
    throw InvalidInput("delta_theta must lie in (0, pi/2)");
  }
  if (!(z_plane > 0.0)) throw InvalidInput("probe plane height must be > 0");
  if (grid_n < 21 || grid_n % 2 == 0) throw InvalidInput("grid_n must be odd and >= 21");
  if (!(wave.wavenumber > 0.0)) throw InvalidInput("wave spec is not initialised");

  MeasurementPlane plane;
  plane.wave = wave;
  plane.z_plane = z_plane;
  plane.delta_theta = delta_theta;
  plane.grid_n = grid_n;
  plane.radius = z_plane * std::tan(delta_theta);
  const auto half = static_cast<long>(grid_n / 2);
  plane.spacing = plane.radius / static_cast<double>(half);

  // Integer disk test keeps boundary samples exact; it is equivalent to
  // hypot(x, y) <= radius on this lattice.
  for (long i = -half; i <= half; ++i) {
    for (long j = -half; j <= half; ++j) {
      if (i * i + j * j > half * half) continue;
      PlanePoint p;
      p.x = plane.spacing * static_cast<double>(j);
      p.y = plane.spacing * static_cast<double>(i);
      p.row = static_cast<std::size_t>(i + half);
      p.col = static_cast<std::size_t>(j + half);
      plane.points.push_back(p);
    }
  }
  return plane;
}

PhaseGrid sample_phase(const FieldProbe& probe, const MeasurementPlane& plane) {
  if (!(plane.z_plane > 0.0)) throw InvalidInput("probe plane height must be > 0");
  PhaseMap map;
  map.rows = map.cols = plane.grid_n;
  map.center_row = map.center_col = plane.grid_n / 2;
  map.values.assign(map.rows * map.cols, 0.0);
  map.valid.assign(map.rows * map.cols, 0);

  PhaseGrid grid;
  grid.plane = plane;
  grid.amplitude.resize(plane.points.size());
  for (std::size_t i = 0; i < plane.points.size(); ++i) {
    const auto& p = plane.points[i];
    const ComplexAmp e = probe(Vec3{p.x, p.y, plane.z_plane});
    grid.amplitude[i] = std::abs(e);
    map.at(p.row, p.col) = std::arg(e);
    map.valid[p.row * map.cols + p.col] = 1;
  }
  const PhaseMap unwrapped = unwrap_phase_radial(map);
  grid.phase.resize(plane.points.size());
  for (std::size_t i = 0; i < plane.points.size(); ++i) {
    grid.phase[i] = unwrapped.at(plane.points[i].row, plane.points[i].col);
  }
  return grid;
}

PhaseGrid sample_phase(const ArrayAntenna& antenna, const MeasurementPlane& plane) {
  return sample_phase([&](const Vec3& p) { return field_at_point(antenna, p); }, plane);
}

double phase_function_S(const PhaseGrid& measured, double d_candidate,
                        const PhaseFitOptions& options) {
  const Residuals res = residuals(measured, d_candidate, options);
  double s = 0.0;
  for (std::size_t i = 0; i < res.r.size(); ++i) {
    const double e = res.r[i] - res.offset;
    s += options.mode == ResidualMode::Unwrapped ? res.w[i] * e * e
                                                 : res.w[i] * (2.0 - 2.0 * std::cos(e));
  }
  return s;
}

double max_phase_error(const PhaseGrid& measured, double d, const PhaseFitOptions& options) {
  const Residuals res = residuals(measured, d, options);
  double worst = 0.0;
  for (double r : res.r) {
    const double e = options.mode == ResidualMode::Unwrapped ? r - res.offset
                                                             : wrap_phase(r - res.offset);
    worst = std::max(worst, std::abs(e));
  }
  return rad_to_deg(worst);
}

std::vector<double> scan_grid(const ScanRange& range) {
  if (!(range.d_min < range.d_max)) throw InvalidInput("scan range requires d_min < d_max");
  if (!(range.d_step > 0.0)) throw InvalidInput("scan step must be > 0");
  const auto count =
      static_cast<std::size_t>(std::floor((range.d_max - range.d_min) / range.d_step + 1e-9)) + 1;
  std::vector<double> d(count);
  for (std::size_t i = 0; i < count; ++i) {
    d[i] = range.d_min + range.d_step * static_cast<double>(i);
  }
  return d;
}

PhaseCenterResult find_phase_center(const PhaseGrid& measured, const ScanRange& range,
                                    const PhaseFitOptions& options) {
  if (!(range.d_max < measured.plane.z_plane)) {
    throw InvalidInput("scan range must stay below the probe plane");
  }
  const std::vector<double> ds = scan_grid(range);
  if (ds.empty()) throw InvalidInput("phase-centre scan grid is empty");

  PhaseCenterResult out;
  out.s_curve.reserve(ds.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    PhaseCurvePoint pt;
    pt.d_mm = ds[i];
    pt.s_rad2 = phase_function_S(measured, ds[i], options);
    pt.max_phase_error_deg = max_phase_error(measured, ds[i], options);
    out.s_curve.push_back(pt);
    if (pt.s_rad2 < out.s_curve[best].s_rad2) best = i;
  }

  out.d_star = ds[best];
  out.s_at_d_star = out.s_curve[best].s_rad2;
  if (ds.size() > 1) {
    const double lo = ds[best == 0 ? 0 : best - 1];
    const double hi = ds[std::min(best + 1, ds.size() - 1)];
    const ScalarMinimum refined = golden_section_minimize(
        [&](double d) { return phase_function_S(measured, d, options); }, lo, hi,
        kRefineTolerance);
    if (refined.value <= out.s_at_d_star) {
      out.d_star = refined.x;
      out.s_at_d_star = refined.value;
    }
  }
  out.max_phase_error_deg = max_phase_error(measured, out.d_star, options);
  out.well_formed = out.max_phase_error_deg <= kWellFormedPhaseErrorDeg;
  return out;
}

PhaseCenterResult find_phase_center(const ArrayAntenna& antenna, const MeasurementPlane& plane,
                                    const ScanRange& range, const PhaseFitOptions& options) {
  if (!(range.d_max < plane.z_plane)) {
    throw InvalidInput("scan range must stay below the probe plane");
  }
  scan_grid(range);  // validate before sampling
  return find_phase_center(sample_phase(antenna, plane), range, options);
}

PhaseCenterResult find_phase_center(const ArrayAntenna& antenna, const PhaseCenterSetup& setup) {
  const MeasurementPlane plane =
      build_plane(antenna.wave(), setup.delta_theta,
                  setup.plane_z_wavelengths * antenna.wave().wavelength_mm, setup.grid_n);
  return find_phase_center(antenna, plane, setup.range, setup.fit);
}

}  // namespace lensforge

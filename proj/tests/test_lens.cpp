#include <random>

#include "doctest.h"
#include "lensforge/lens.hpp"

using namespace lensforge;
using doctest::Approx;

namespace {

const WaveSpec kWave = wave_from_frequency(30.2);
constexpr double kRadius = 17.27;
constexpr double kEpsR = 2.4;

// Uniform unit-amplitude aperture; edge cells weighted by the covered area fraction.
ApertureField uniform_aperture(double cell, std::size_t half_cells,
                               const std::function<double(double, double)>& coverage,
                               const std::function<double(double, double)>& phase) {
  ApertureField ap;
  ap.cell_size = cell;
  ap.cells_per_side = 2 * half_cells;
  ap.origin = -static_cast<double>(half_cells) * cell;
  ap.cells.assign(ap.cells_per_side * ap.cells_per_side, ComplexAmp{});
  ap.spillover_efficiency = 1.0;
  ap.transmission_efficiency = 1.0;
  for (std::size_t iy = 0; iy < ap.cells_per_side; ++iy) {
    for (std::size_t ix = 0; ix < ap.cells_per_side; ++ix) {
      const double x = ap.cell_center(ix);
      const double y = ap.cell_center(iy);
      const double frac = coverage(x, y);
      if (frac > 0.0) ap.at(iy, ix) = std::polar(frac, phase(x, y));
      ap.power_exited += frac * cell * cell;
    }
  }
  return ap;
}

double disk_fraction(double x, double y, double cell, double a) {
  const int sub = 16;
  int inside = 0;
  for (int i = 0; i < sub; ++i) {
    for (int j = 0; j < sub; ++j) {
      const double sx = x + ((i + 0.5) / sub - 0.5) * cell;
      const double sy = y + ((j + 0.5) / sub - 0.5) * cell;
      if (sx * sx + sy * sy <= a * a) ++inside;
    }
  }
  return static_cast<double>(inside) / (sub * sub);
}

// Meridian-plane tracer for an on-axis source below an extended hemisphere.
struct Meridian {
  double exit_angle;  // from the axis, signed toward +x
  double opl;
};

Meridian meridian_trace(double R, double n, double L, double gap, double source_z, double t) {
  const double air = (gap - source_z) / std::cos(t);
  const double x0 = air * std::sin(t);
  const double ti = std::asin(std::sin(t) / n);
  // Inside: x = x0 + s sin(ti), z = gap + s cos(ti); sphere centre (0, gap + L).
  const double bx = x0, bz = -L;
  const double dx = std::sin(ti), dz = std::cos(ti);
  const double pb = bx * dx + bz * dz;
  const double s = -pb + std::sqrt(pb * pb - (bx * bx + bz * bz - R * R));
  const double qx = x0 + s * dx, qz = -L + s * dz;  // relative to the sphere centre
  const double nrm = std::atan2(qx, qz);
  const double inc = ti - nrm;
  const double out = std::asin(n * std::sin(inc));
  const double exit_angle = nrm + out;
  const double to_plane = (R - qz) / std::cos(exit_angle);
  return {exit_angle, air + n * s + to_plane};
}

}  // namespace

TEST_CASE("lens synthesis") {
  const LensSpec lens = synthesize_lens(kRadius, kEpsR);
  // tests/oracles/closed_forms.py
  CHECK(lens.n == Approx(1.549193338483).epsilon(1e-12));
  CHECK(lens.b_mm == Approx(19.668611111111).epsilon(1e-12));
  CHECK(lens.extension_mm == Approx(25.105267288389).epsilon(1e-12));
  CHECK(lens.cap_height_mm == kRadius);

  // Extension scales linearly with the radius.
  CHECK(synthesize_lens(2.0 * kRadius, kEpsR).extension_mm ==
        Approx(2.0 * lens.extension_mm).epsilon(1e-12));
  // A very dense lens needs no extension.
  CHECK(synthesize_lens(kRadius, 1e8).extension_mm < 1e-2);
  // A weak lens needs a long one.
  CHECK(synthesize_lens(kRadius, 1.05).extension_mm > 5.0 * kRadius);

  CHECK_THROWS_AS(synthesize_lens(kRadius, 1.0), InvalidInput);
  CHECK_THROWS_AS(synthesize_lens(0.0, kEpsR), InvalidInput);
  CHECK_THROWS_AS(lens_with_extension(kRadius, kEpsR, -1.0), InvalidInput);

  const LensSpec ellipse = elliptical_oracle_lens(kRadius, kEpsR);
  // tests/oracles/ellipse_gain.py
  CHECK(ellipse.cap_height_mm == Approx(22.611737786).epsilon(1e-9));
  CHECK(ellipse.extension_mm == Approx(14.595813979).epsilon(1e-9));
}

TEST_CASE("theoretical gain") {
  const LensSpec lens = synthesize_lens(kRadius, kEpsR);
  CHECK(theoretical_max_gain(lens, kWave) == Approx(20.773168919096).epsilon(1e-12));
  CHECK(theoretical_max_gain(synthesize_lens(2.0 * kRadius, kEpsR), kWave) -
            theoretical_max_gain(lens, kWave) ==
        Approx(20.0 * std::log10(2.0)));
  CHECK(std::abs(theoretical_max_gain(
            synthesize_lens(kWave.wavelength_mm / (2.0 * kPi), kEpsR), kWave)) < 1e-12);
}

TEST_CASE("single ray tracing") {
  const LensSpec lens = synthesize_lens(kRadius, kEpsR);

  SUBCASE("axial ray") {
    for (double gap : {0.0, 1.5, 6.0}) {
      const TracedRay r = trace_ray(LensPlacement{lens, gap}, {}, {0.0, 0.0, 1.0});
      REQUIRE(r.status == RayStatus::Exited);
      CHECK(r.optical_path_mm == Approx(gap + lens.n * (lens.extension_mm + kRadius)));
      CHECK(r.amplitude_factor == Approx(0.953586430290).epsilon(1e-11));
      CHECK(r.exit_direction.z == Approx(1.0));
    }
  }
  SUBCASE("agreement with a meridian-plane tracer") {
    const double gap = 2.0;
    const LensPlacement pl{lens, gap};
    for (double deg = 1.0; deg <= 25.0; deg += 2.0) {
      const double t = deg_to_rad(deg);
      const TracedRay r = trace_ray(pl, {}, direction_from_angles(t, 0.0));
      REQUIRE(r.status == RayStatus::Exited);
      const Meridian m = meridian_trace(kRadius, lens.n, lens.extension_mm, gap, 0.0, t);
      CHECK(std::atan2(r.exit_direction.x, r.exit_direction.z) == Approx(m.exit_angle).epsilon(1e-9));
      CHECK(r.optical_path_mm == Approx(m.opl).epsilon(1e-9));
      CHECK(std::abs(r.exit_direction.y) < 1e-12);
    }
  }
  SUBCASE("azimuthal symmetry") {
    const LensPlacement pl{lens, 1.0};
    const TracedRay a = trace_ray(pl, {}, direction_from_angles(0.3, 0.0));
    for (double phi = 0.1; phi < 2.0 * kPi; phi += 0.7) {
      const TracedRay b = trace_ray(pl, {}, direction_from_angles(0.3, phi));
      CHECK(b.optical_path_mm == Approx(a.optical_path_mm).epsilon(1e-12));
      CHECK(b.exit_point.rho() == Approx(a.exit_point.rho()).epsilon(1e-12));
    }
  }
  SUBCASE("statuses") {
    const LensPlacement pl{lens, 10.0};
    CHECK(trace_ray(pl, {}, direction_from_angles(deg_to_rad(80.0), 0.0)).status ==
          RayStatus::SpilloverMissed);
    const LensPlacement close{lens, 0.0};
    CHECK(trace_ray(close, {}, direction_from_angles(deg_to_rad(85.0), 0.0)).status ==
          RayStatus::SideWall);
    const LensSpec stubby = lens_with_extension(kRadius, kEpsR, 0.0);
    const TracedRay tir = trace_ray(LensPlacement{stubby, 0.0}, {-0.9 * kRadius, 0.0, 0.0},
                                    direction_from_angles(deg_to_rad(30.0), 0.0));
    CHECK(tir.status == RayStatus::TotalInternalReflection);
  }
  SUBCASE("reversed rays retrace their launch direction") {
    const LensPlacement pl{lens, 2.5};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> theta(0.01, deg_to_rad(30.0));
    std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
    const Vec3 axis{0.0, 0.0, 1.0};
    for (int i = 0; i < 200; ++i) {
      const Vec3 u = direction_from_angles(theta(rng), phi(rng));
      const TracedRay r = trace_ray(pl, {}, u);
      if (r.status != RayStatus::Exited) continue;
      const Vec3 q = r.surface_point;
      const Vec3 c{0.0, 0.0, pl.cap_center_z()};
      const auto inside = snell_refract(-r.exit_direction, (q - c).normalized(), 1.0, lens.n);
      REQUIRE(inside);
      const auto back = snell_refract(*inside, axis, lens.n, 1.0);
      REQUIRE(back);
      CHECK(std::acos(std::min(1.0, (-*back).dot(u))) < 1e-6);
      // The reversed ray also lands back on the source.
      const Vec3 face = q + *inside * ((pl.face_z() - q.z) / inside->z);
      CHECK((face - r.face_point).norm() < 1e-9);
    }
  }
  SUBCASE("invalid launches") {
    const LensPlacement pl{lens, 1.0};
    CHECK_THROWS_AS(trace_ray(pl, {}, {0.0, 0.0, -1.0}), InvalidInput);
    CHECK_THROWS_AS(trace_ray(pl, {}, {0.0, 0.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(trace_ray(pl, {0.0, 0.0, 2.0}, {0.0, 0.0, 1.0}), InvalidInput);
  }
}

TEST_CASE("elliptical lens collimates its focus") {
  const LensSpec lens = elliptical_oracle_lens(kRadius, kEpsR);
  const LensPlacement pl{lens, 3.0};
  const double rim = std::atan2(kRadius, lens.extension_mm);
  double opl0 = 0.0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> theta(0.0, rim * 0.999);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
  for (int i = 0; i < 500; ++i) {
    const TracedRay r = trace_ray(pl, pl.oracle_focus(), direction_from_angles(theta(rng), phi(rng)),
                                  LaunchMedium::Dielectric);
    REQUIRE(r.status == RayStatus::Exited);
    CHECK(r.exit_direction.z > 1.0 - 1e-6);
    if (i == 0) opl0 = r.optical_path_mm;
    CHECK(r.optical_path_mm == Approx(opl0).epsilon(1e-9));
  }
}

TEST_CASE("aperture energy bookkeeping") {
  const LensSpec lens = synthesize_lens(kRadius, kEpsR);
  for (double gap : {0.0, 2.0, 8.0}) {
    const PointSourceFeed feed{{0.0, 0.0, 0.0},
                               [](double th, double) { return std::cos(th); },
                               LaunchMedium::Air};
    const ApertureField ap = aperture_from_rays(LensPlacement{lens, gap}, feed, kWave);
    const double sum = ap.power_exit_geometric + ap.power_tir + ap.power_side_wall + ap.power_missed;
    CHECK(sum == Approx(ap.power_in_rays).epsilon(1e-12));
    CHECK(ap.power_exited <= ap.power_in_rays);
    for (double bucket : {ap.power_exit_geometric, ap.power_tir, ap.power_side_wall, ap.power_missed}) {
      CHECK(bucket >= 0.0);
    }
    // Integral of cos(theta) over the hemisphere is pi.
    CHECK(ap.power_in_rays == Approx(kPi).epsilon(2e-3));
    CHECK(ap.power_exited <= ap.power_exit_geometric);
    CHECK(ap.spillover_efficiency > 0.0);
    CHECK(ap.spillover_efficiency <= 1.0);
    CHECK(ap.transmission_efficiency > 0.0);
    CHECK(ap.transmission_efficiency <= 1.0);
  }
  const PointSourceFeed feed{{}, [](double, double) { return 1.0; }, LaunchMedium::Air};
  ApertureOptions few;
  few.ray_count = 5000;
  CHECK_THROWS_AS(aperture_from_rays(LensPlacement{lens, 0.0}, feed, kWave, few), InvalidInput);
}

TEST_CASE("aperture integration against closed forms") {
  const double lambda = kWave.wavelength_mm;

  SUBCASE("uniform disk") {
    const double a = 5.0 * lambda;
    const double cell = lambda / 8.0;
    const ApertureField ap = uniform_aperture(
        cell, static_cast<std::size_t>(std::ceil(a / cell)) + 1,
        [&](double x, double y) { return disk_fraction(x, y, cell, a); },
        [](double, double) { return 0.0; });
    PatternGrid grid;
    grid.theta_step = deg_to_rad(0.05);
    grid.phi_step = deg_to_rad(90.0);
    grid.theta_max = deg_to_rad(20.0);
    const FarFieldPattern p = far_field_from_aperture(ap, kWave, grid);
    const double ka = 2.0 * kPi * a / lambda;
    CHECK(p.boresight_directivity_dbi == Approx(10.0 * std::log10(ka * ka)).epsilon(0.01 / 29.94));
    CHECK(p.gain_estimate_dbi == Approx(p.boresight_directivity_dbi));
    // Airy first sidelobe (tests/oracles/closed_forms.py)
    CHECK(first_sidelobe_db(p, 0.0) == Approx(-17.570150).epsilon(0.1 / 17.57));
    CHECK(first_sidelobe_db(p, kPi / 2.0) == Approx(-17.570150).epsilon(0.1 / 17.57));
    CHECK(p.peak_theta == 0.0);
  }
  SUBCASE("uniform square") {
    const double half = 3.0 * lambda;
    const double cell = lambda / 4.0;
    const ApertureField ap = uniform_aperture(
        cell, 12,
        [&](double x, double y) { return std::abs(x) < half && std::abs(y) < half ? 1.0 : 0.0; },
        [](double, double) { return 0.0; });
    const FarFieldPattern p = far_field_from_aperture(ap, kWave);
    const double expected = 4.0 * kPi * (2.0 * half) * (2.0 * half) / (lambda * lambda);
    CHECK(p.boresight_directivity_dbi == Approx(10.0 * std::log10(expected)).epsilon(1e-10));
  }
  SUBCASE("linear phase ramp steers the beam") {
    const double a = 4.0 * lambda;
    const double cell = lambda / 4.0;
    const double squint = deg_to_rad(6.0);
    const ApertureField ap = uniform_aperture(
        cell, 18, [&](double x, double y) { return disk_fraction(x, y, cell, a); },
        [&](double x, double) { return -kWave.wavenumber * std::sin(squint) * x; });
    PatternGrid grid;
    grid.theta_step = deg_to_rad(0.1);
    grid.theta_max = deg_to_rad(30.0);
    const FarFieldPattern p = far_field_from_aperture(ap, kWave, grid);
    CHECK(std::abs(p.peak_theta - squint) <= deg_to_rad(0.1));
    const ApertureField flat = uniform_aperture(
        cell, 18, [&](double x, double y) { return disk_fraction(x, y, cell, a); },
        [](double, double) { return 0.0; });
    const FarFieldPattern broadside = far_field_from_aperture(flat, kWave, grid);
    CHECK(std::abs(p.peak_directivity_dbi - broadside.boresight_directivity_dbi) < 0.1);
    CHECK(std::abs(wrap_phase(p.peak_phi))  < 1e-12);
  }
  SUBCASE("coarse cells are rejected") {
    const ApertureField ap = uniform_aperture(
        0.6 * lambda, 4, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
    CHECK_THROWS_AS(far_field_from_aperture(ap, kWave), InvalidInput);
  }
}

TEST_CASE("elliptical lens gain from the focus") {
  const LensSpec lens = elliptical_oracle_lens(kRadius, kEpsR);
  const LensPlacement pl{lens, 0.0};
  const double rim = std::atan2(kRadius, lens.extension_mm);
  const PointSourceFeed feed{pl.oracle_focus(),
                             [rim](double th, double) { return th <= rim ? 1.0 : 0.0; },
                             LaunchMedium::Dielectric};
  const ApertureField ap = aperture_from_rays(pl, feed, kWave);
  const FarFieldPattern p = far_field_from_aperture(ap, kWave);
  // tests/oracles/ellipse_gain.py: 1-D quadrature with per-ray exit Fresnel loss.
  CHECK(ap.transmission_efficiency == Approx(0.683427).epsilon(0.005));
  CHECK(ap.spillover_efficiency == Approx(1.0).epsilon(0.003));
  CHECK(std::abs(p.gain_estimate_dbi - 18.735771) < 0.3);
  CHECK(p.gain_estimate_dbi < theoretical_max_gain(lens, kWave));

  SUBCASE("aperture phase is flat") {
    const double ref = std::arg(ap.at(ap.cells_per_side / 2, ap.cells_per_side / 2));
    double worst = 0.0;
    for (const ComplexAmp& e : ap.cells) {
      if (std::abs(e) > 0.0) worst = std::max(worst, std::abs(wrap_phase(std::arg(e) - ref)));
    }
    CHECK(rad_to_deg(worst) < 5.0);
  }

  SUBCASE("ray count and cell size convergence") {
    ApertureOptions dense;
    dense.ray_count = 160000;
    const double g_dense =
        far_field_from_aperture(aperture_from_rays(pl, feed, kWave, dense), kWave).gain_estimate_dbi;
    CHECK(std::abs(g_dense - p.gain_estimate_dbi) < 0.1);
    ApertureOptions fine;
    fine.cell_size_mm = kWave.wavelength_mm / 6.0;
    const double g_fine =
        far_field_from_aperture(aperture_from_rays(pl, feed, kWave, fine), kWave).gain_estimate_dbi;
    CHECK(std::abs(g_fine - p.gain_estimate_dbi) < 0.2);
  }
  SUBCASE("rotating the launch grid") {
    ApertureOptions rotated;
    rotated.azimuth_offset = 0.37;
    const double g =
        far_field_from_aperture(aperture_from_rays(pl, feed, kWave, rotated), kWave).gain_estimate_dbi;
    CHECK(std::abs(g - p.gain_estimate_dbi) < 0.05);
  }
}

TEST_CASE("defocused source gives a converging quadratic phase") {
  const LensSpec lens = elliptical_oracle_lens(kRadius, kEpsR);
  const LensPlacement pl{lens, 2.0};
  const double delta = 3.0;
  const Vec3 source{0.0, 0.0, pl.face_z() - delta};
  double s_rr = 0.0, s_rp = 0.0, s_r = 0.0, s_p = 0.0;
  int count = 0;
  for (double deg = 0.5; deg <= 6.0; deg += 0.5) {
    const TracedRay r = trace_ray(pl, source, direction_from_angles(deg_to_rad(deg), 0.0));
    REQUIRE(r.status == RayStatus::Exited);
    const double rho2 = r.exit_point.x * r.exit_point.x;
    const double psi = -kWave.wavenumber * r.optical_path_mm;
    s_r += rho2;
    s_p += psi;
    s_rr += rho2 * rho2;
    s_rp += rho2 * psi;
    ++count;
  }
  const double q = (count * s_rp - s_r * s_p) / (count * s_rr - s_r * s_r);
  const double e = 1.0 / lens.n;
  const double a = lens.cap_height_mm;
  // Paraxial apparent-depth estimate.
  const double expected =
      kWave.wavenumber * lens.n * lens.n * delta / (2.0 * a * a * (1.0 + e) * (1.0 + e));
  CHECK(q > 0.0);
  CHECK(q == Approx(expected).epsilon(0.25));
}

TEST_CASE("lens gain entry point") {
  const SubstrateSpec duroid{2.2, 0.127};
  const ArrayAntenna patch = make_single_patch(kWave, duroid, synthesize_patch(kWave, duroid));
  const LensSpec lens = synthesize_lens(kRadius, kEpsR);
  LensGainOptions opt;
  opt.phase_center_mm = 2.0;
  CHECK_THROWS_AS(lens_gain(patch, LensPlacement{lens, 1.0}, FeedMode::PointSource, opt),
                  InvalidInput);
  const FarFieldPattern sf = lens_gain(patch, LensPlacement{lens, 1.0}, FeedMode::SampledField, opt);
  CHECK(std::isfinite(sf.gain_estimate_dbi));

  opt.phase_center_mm = 0.0;
  const FarFieldPattern ps = lens_gain(patch, LensPlacement{lens, 0.0}, FeedMode::PointSource, opt);
  CHECK(ps.gain_estimate_dbi > 14.0);
  CHECK(ps.gain_estimate_dbi < theoretical_max_gain(lens, kWave));
  CHECK(ps.peak_directivity_dbi >= ps.boresight_directivity_dbi - 1e-9);
}

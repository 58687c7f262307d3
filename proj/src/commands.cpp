#include "lensforge/commands.hpp"

#include <algorithm>
#include <ostream>

#include "lensforge/output.hpp"
#include "lensforge/sweep.hpp"

namespace lensforge {

namespace {

namespace fs = std::filesystem;

SweepOptions sweep_options_of(const RunConfig& c) {
  SweepOptions o;
  o.phase_center = phase_center_setup_of(c);
  return o;
}

LensGainOptions lens_options_of(const RunConfig& c, double phase_center_mm) {
  LensGainOptions o;
  o.phase_center_mm = phase_center_mm;
  o.pattern.theta_step = deg_to_rad(c.pattern.theta_step_deg);
  o.pattern.phi_step = deg_to_rad(c.pattern.phi_step_deg);
  return o;
}

void write_rays(const fs::path& path, const ApertureField& ap) {
  CsvWriter csv(path, {"launch_theta_deg", "launch_phi_deg", "status", "exit_x_mm", "exit_y_mm",
                       "exit_dirz", "opt_path_mm", "amp_factor"});
  for (const TracedRay& r : ap.rays) {
    const Vec3& d = r.launch_direction;
    double phi = rad_to_deg(std::atan2(d.y, d.x));
    if (phi < 0.0) phi += 360.0;
    csv.cell(rad_to_deg(std::acos(std::clamp(d.z, -1.0, 1.0)))).cell(phi);
    csv.cell(to_string(r.status));
    csv.cell(r.exit_point.x).cell(r.exit_point.y).cell(r.exit_direction.z);
    csv.cell(r.optical_path_mm).cell(r.amplitude_factor);
    csv.end_row();
  }
}

struct Placement {
  double d_star = 0.0;
  double gap = 0.0;
  bool well_formed = true;
};

Placement placement_of(const RunConfig& c, const ArrayAntenna& antenna) {
  const PhaseCenterResult pc = find_phase_center(antenna, phase_center_setup_of(c));
  Placement p{pc.d_star, c.pattern.gap_mm.value_or(std::max(0.0, pc.d_star)), pc.well_formed};
  return p;
}

int warn_if_ill_formed(bool well_formed, std::ostream& log) {
  if (well_formed) return kExitOk;
  log << "warning: the phase front is not well formed; the fitted centre is unreliable\n";
  return kExitWarning;
}

}  // namespace

int run_design(const RunConfig& c, const fs::path& out_dir, std::ostream& log) {
  const WaveSpec wave = wave_of(c);
  const PatchGeometry patch = patch_of(c);
  const LensSpec lens = lens_of(c);
  const double theory = theoretical_max_gain(lens, wave);

  CsvWriter csv(out_dir / "design.csv", {"quantity", "value"});
  const auto row = [&](const char* name, double v) {
    csv.cell(name).cell(v);
    csv.end_row();
    log << "  " << name << " = " << format_number(v) << '\n';
  };
  log << "design\n";
  row("frequency_ghz", wave.frequency_ghz);
  row("wavelength_mm", wave.wavelength_mm);
  row("patch_width_mm", patch.width_mm);
  row("patch_length_mm", patch.length_mm);
  row("patch_eps_eff", patch.eps_eff);
  row("patch_delta_l_mm", patch.delta_l_mm);
  row("lens_eps_r", lens.eps_r);
  row("lens_n", lens.n);
  row("lens_radius_mm", lens.radius_mm);
  row("lens_b_mm", lens.b_mm);
  row("lens_extension_mm", lens.extension_mm);
  row("theoretical_gain_dbi", theory);
  return kExitOk;
}

int run_phase_center(const RunConfig& c, const fs::path& out_dir, std::ostream& log) {
  const ArrayAntenna antenna = antenna_of(c);
  const PhaseCenterResult r = find_phase_center(antenna, phase_center_setup_of(c));

  CsvWriter csv(out_dir / "phase_function.csv", {"D_mm", "S_rad2", "max_phase_err_deg"});
  for (const PhaseCurvePoint& p : r.s_curve) {
    csv.cell(p.d_mm).cell(p.s_rad2).cell(p.max_phase_error_deg);
    csv.end_row();
  }
  log << "phase centre\n"
      << "  d_star_mm = " << format_number(r.d_star) << '\n'
      << "  s_at_d_star_rad2 = " << format_number(r.s_at_d_star) << '\n'
      << "  max_phase_err_deg = " << format_number(r.max_phase_error_deg) << '\n'
      << "  well_formed = " << (r.well_formed ? "true" : "false") << '\n';
  return warn_if_ill_formed(r.well_formed, log);
}

int run_sweep(const RunConfig& c, const fs::path& out_dir, std::ostream& log) {
  const std::vector<double> gaps = sweep_gaps_of(c);
  const ArrayAntenna antenna = antenna_of(c);
  const LensSpec lens = lens_of(c);
  const SweepOptions options = sweep_options_of(c);
  const bool well_formed = find_phase_center(antenna, options.phase_center).well_formed;

  const SweepResult sweep = gain_vs_separation(antenna, lens, gaps, c.sweep.mode, options);
  const ComparisonReport cmp = comparison_report(antenna, lens, c.sweep.mode, options);

  {
    CsvWriter csv(out_dir / "gain_sweep.csv",
                  {"D_mm", "gain_dbi", "spillover_eff", "transmission_eff"});
    for (const SweepRow& r : sweep.rows) {
      csv.cell(r.d_mm).cell(r.gain_dbi).cell(r.spillover_eff).cell(r.transmission_eff);
      csv.end_row();
    }
  }
  {
    CsvWriter csv(out_dir / "comparison.csv", {"config", "gain_dbi"});
    csv.cell("no_lens").cell(cmp.no_lens_dbi);
    csv.end_row();
    csv.cell("lens_d0").cell(cmp.lens_d0_dbi);
    csv.end_row();
    csv.cell("lens_dstar").cell(cmp.lens_dstar_dbi);
    csv.end_row();
  }
  {
    CsvWriter csv(out_dir / "sweep_summary.csv", {"quantity", "value"});
    const auto row = [&](const char* name, double v) {
      csv.cell(name).cell(v);
      csv.end_row();
    };
    row("d_star_mm", sweep.d_star_phase_center);
    row("d_peak_mm", sweep.d_peak);
    row("gain_peak_dbi", sweep.gain_peak_dbi);
    row("gain_at_zero_dbi", sweep.gain_at_zero_dbi);
    row("no_lens_gain_dbi", sweep.no_lens_gain_dbi);
    row("improvement_db", sweep.improvement_db);
    row("improvement_pct_of_db", sweep.improvement_pct_of_db);
    row("lens_dstar_gap_mm", cmp.d_star_gap);
    row("comparison_improvement_db", cmp.improvement_db);
    row("comparison_improvement_pct_of_db", cmp.improvement_pct_of_db);
  }
  if (c.output.emit_plots) {
    LineChart chart;
    chart.title = std::string("Gain versus lens gap (") + to_string(c.sweep.mode) + ")";
    chart.x_label = "D (mm)";
    chart.y_label = "Gain (dBi)";
    for (const SweepRow& r : sweep.rows) {
      chart.x.push_back(r.d_mm);
      chart.y.push_back(r.gain_dbi);
    }
    write_svg_line_chart(out_dir / "gain_sweep.svg", chart);
  }

  std::vector<double> gains;
  for (const SweepRow& r : sweep.rows) gains.push_back(r.gain_dbi);
  log << "sweep (" << to_string(c.sweep.mode) << ", " << sweep.rows.size() << " gaps)\n"
      << "  d_star_mm = " << format_number(sweep.d_star_phase_center) << '\n'
      << "  d_peak_mm = " << format_number(sweep.d_peak) << '\n'
      << "  gain_peak_dbi = " << format_number(sweep.gain_peak_dbi) << '\n'
      << "  gain_at_zero_dbi = " << format_number(sweep.gain_at_zero_dbi) << '\n'
      << "  improvement_db = " << format_number(sweep.improvement_db) << '\n'
      << "  improvement_pct_of_db = " << format_number(sweep.improvement_pct_of_db) << '\n'
      << "  unimodal = " << (is_unimodal(gains) ? "true" : "false") << '\n'
      << "comparison\n"
      << "  no_lens_dbi = " << format_number(cmp.no_lens_dbi) << '\n'
      << "  lens_d0_dbi = " << format_number(cmp.lens_d0_dbi) << '\n'
      << "  lens_dstar_dbi = " << format_number(cmp.lens_dstar_dbi) << " (gap "
      << format_number(cmp.d_star_gap) << " mm)\n";
  return warn_if_ill_formed(well_formed, log);
}

int run_pattern(const RunConfig& c, const fs::path& out_dir, std::ostream& log) {
  const ArrayAntenna antenna = antenna_of(c);
  const Placement pl = placement_of(c, antenna);
  LensGainOptions options = lens_options_of(c, pl.d_star);
  options.aperture.keep_rays = c.output.emit_rays;
  const LensPlacement placement{lens_of(c), pl.gap};
  const ApertureField ap = lens_aperture(antenna, placement, c.sweep.mode, options);
  const FarFieldPattern ff = far_field_from_aperture(ap, antenna.wave(), options.pattern);

  CsvWriter csv(out_dir / "pattern.csv", {"theta_deg", "phi_deg", "gain_dbi"});
  for (std::size_t it = 0; it < ff.theta.size(); ++it) {
    for (std::size_t ip = 0; ip < ff.phi.size(); ++ip) {
      csv.cell(rad_to_deg(ff.theta[it])).cell(rad_to_deg(ff.phi[ip]));
      csv.cell(ff.gain_dbi[it * ff.phi.size() + ip]);
      csv.end_row();
    }
  }
  if (c.output.emit_rays) write_rays(out_dir / "rays.csv", ap);

  log << "pattern (" << to_string(c.sweep.mode) << ", gap " << format_number(pl.gap) << " mm)\n"
      << "  boresight_directivity_dbi = " << format_number(ff.boresight_directivity_dbi) << '\n'
      << "  gain_estimate_dbi = " << format_number(ff.gain_estimate_dbi) << '\n'
      << "  spillover_eff = " << format_number(ff.spillover_efficiency) << '\n'
      << "  transmission_eff = " << format_number(ff.transmission_efficiency) << '\n';
  return warn_if_ill_formed(pl.well_formed, log);
}

int run_trace(const RunConfig& c, const fs::path& out_dir, std::ostream& log) {
  const ArrayAntenna antenna = antenna_of(c);
  const Placement pl = placement_of(c, antenna);
  LensGainOptions options = lens_options_of(c, pl.d_star);
  options.aperture.keep_rays = true;
  const ApertureField ap =
      lens_aperture(antenna, LensPlacement{lens_of(c), pl.gap}, c.sweep.mode, options);
  write_rays(out_dir / "rays.csv", ap);

  const double launched = ap.power_in_rays;
  log << "trace (" << to_string(c.sweep.mode) << ", gap " << format_number(pl.gap) << " mm, "
      << ap.rays.size() << " rays)\n"
      << "  exited = " << format_number(ap.power_exit_geometric / launched) << '\n'
      << "  total_internal_reflection = " << format_number(ap.power_tir / launched) << '\n'
      << "  side_wall = " << format_number(ap.power_side_wall / launched) << '\n'
      << "  missed = " << format_number(ap.power_missed / launched) << '\n';
  return warn_if_ill_formed(pl.well_formed, log);
}

}  // namespace lensforge

#include "lensforge/sweep.hpp"

namespace lensforge {

namespace {

double lens_gain_at(const ArrayAntenna& antenna, const LensSpec& lens, double d, FeedMode mode,
                    const LensGainOptions& options) {
  return lens_gain(antenna, LensPlacement{lens, d}, mode, options).gain_estimate_dbi;
}

LensGainOptions with_phase_center(const SweepOptions& options, double d_star) {
  LensGainOptions lg = options.lens;
  lg.phase_center_mm = d_star;
  return lg;
}

}  // namespace

double improvement_pct_of_db(double gain_peak_dbi, double gain_reference_dbi) {
  return 100.0 * (gain_peak_dbi - gain_reference_dbi) / gain_peak_dbi;
}

bool is_unimodal(const std::vector<double>& values, double tolerance) {
  const std::size_t n = values.size();
  if (n < 3) return true;
  std::vector<double> s(n);
  s[0] = 0.5 * (values[0] + values[1]);
  s[n - 1] = 0.5 * (values[n - 2] + values[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) s[i] = (values[i - 1] + values[i] + values[i + 1]) / 3.0;

  const auto peak = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  for (std::size_t i = 1; i <= peak; ++i) {
    if (s[i] < s[i - 1] - tolerance) return false;
  }
  for (std::size_t i = peak + 1; i < n; ++i) {
    if (s[i] > s[i - 1] + tolerance) return false;
  }
  return true;
}

SweepResult gain_vs_separation(const ArrayAntenna& antenna, const LensSpec& lens,
                               const std::vector<double>& d_values, FeedMode mode,
                               const SweepOptions& options) {
  if (d_values.empty()) throw InvalidInput("sweep needs at least one separation");
  for (std::size_t i = 0; i < d_values.size(); ++i) {
    if (!(d_values[i] >= 0.0)) throw InvalidInput("separations must be >= 0");
    if (i > 0 && !(d_values[i] > d_values[i - 1])) {
      throw InvalidInput("separations must be strictly ascending");
    }
  }

  SweepResult out;
  out.d_star_phase_center = find_phase_center(antenna, options.phase_center).d_star;
  const LensGainOptions lg = with_phase_center(options, out.d_star_phase_center);

  std::size_t best = 0;
  for (double d : d_values) {
    const FarFieldPattern p = lens_gain(antenna, LensPlacement{lens, d}, mode, lg);
    out.rows.push_back({d, p.gain_estimate_dbi, p.spillover_efficiency, p.transmission_efficiency});
    if (out.rows.back().gain_dbi > out.rows[best].gain_dbi) best = out.rows.size() - 1;
  }
  out.d_peak = out.rows[best].d_mm;
  out.gain_peak_dbi = out.rows[best].gain_dbi;
  out.gain_at_zero_dbi = out.rows.front().gain_dbi;
  out.no_lens_gain_dbi =
      far_field_directivity(antenna, options.no_lens_resolution).boresight_directivity_dbi;
  out.improvement_db = out.gain_peak_dbi - out.gain_at_zero_dbi;
  out.improvement_pct_of_db = improvement_pct_of_db(out.gain_peak_dbi, out.gain_at_zero_dbi);
  return out;
}

SeparationOptimum optimize_separation(const ArrayAntenna& antenna, const LensSpec& lens,
                                      double d_lo, double d_hi, double coarse_step, FeedMode mode,
                                      const SweepOptions& options) {
  if (!(d_lo < d_hi)) throw InvalidInput("separation bracket requires d_lo < d_hi");
  if (!(coarse_step > 0.0)) throw InvalidInput("coarse step must be > 0");
  const double d_star = find_phase_center(antenna, options.phase_center).d_star;
  const LensGainOptions lg = with_phase_center(options, d_star);
  return maximize_over_gap(
      [&](double d) { return lens_gain_at(antenna, lens, d, mode, lg); }, d_lo, d_hi, coarse_step);
}

ComparisonReport comparison_report(const ArrayAntenna& antenna, const LensSpec& lens,
                                   FeedMode mode, const SweepOptions& options) {
  ComparisonReport r;
  r.d_star = find_phase_center(antenna, options.phase_center).d_star;
  r.d_star_gap = std::max(0.0, r.d_star);
  const LensGainOptions lg = with_phase_center(options, r.d_star);
  r.no_lens_dbi =
      far_field_directivity(antenna, options.no_lens_resolution).boresight_directivity_dbi;
  r.lens_d0_dbi = lens_gain_at(antenna, lens, 0.0, mode, lg);
  r.lens_dstar_dbi = lens_gain_at(antenna, lens, r.d_star_gap, mode, lg);
  r.improvement_db = r.lens_dstar_dbi - r.lens_d0_dbi;
  r.improvement_pct_of_db = improvement_pct_of_db(r.lens_dstar_dbi, r.lens_d0_dbi);
  return r;
}

}  // namespace lensforge

#pragma once

// Lens-gap experiments: gain versus air gap D, optimal-gap search, and the
// no-lens / lens-at-zero / lens-at-phase-centre comparison.

#include <vector>

#include "lensforge/lens.hpp"
#include "lensforge/phasecenter.hpp"
#include "lensforge/radiators.hpp"

namespace lensforge {

struct SweepRow {
  double d_mm = 0.0;
  double gain_dbi = 0.0;
  double spillover_eff = 0.0;
  double transmission_eff = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending D
  double d_peak = 0.0;
  double gain_peak_dbi = 0.0;
  double gain_at_zero_dbi = 0.0;  // gain at the smallest swept gap
  double no_lens_gain_dbi = 0.0;
  double d_star_phase_center = 0.0;
  double improvement_db = 0.0;
  double improvement_pct_of_db = 0.0;
};

struct SweepOptions {
  PhaseCenterSetup phase_center;
  LensGainOptions lens;  // phase_center_mm is filled in from the fit
  double no_lens_resolution = deg_to_rad(1.0);
};

/// 100 * (peak - reference) / peak, the relative improvement of a dB figure.
double improvement_pct_of_db(double gain_peak_dbi, double gain_reference_dbi);

/// True when the series rises to a single maximum and then falls, after a centred
/// 3-point moving average (ends keep their 2-point means).
bool is_unimodal(const std::vector<double>& values, double tolerance = 1e-9);

SweepResult gain_vs_separation(const ArrayAntenna& antenna, const LensSpec& lens,
                               const std::vector<double>& d_values, FeedMode mode,
                               const SweepOptions& options = {});

struct SeparationOptimum {
  double d_opt = 0.0;
  double gain_opt_dbi = 0.0;
};

/// Coarse scan on [d_lo, d_hi] followed by golden-section refinement to 0.05 mm on the
/// bracket around the best coarse sample. `gain_at` maps a gap to a gain in dBi.
template <typename GainAt>
SeparationOptimum maximize_over_gap(GainAt&& gain_at, double d_lo, double d_hi,
                                    double coarse_step);

SeparationOptimum optimize_separation(const ArrayAntenna& antenna, const LensSpec& lens,
                                      double d_lo, double d_hi, double coarse_step, FeedMode mode,
                                      const SweepOptions& options = {});

struct ComparisonReport {
  double no_lens_dbi = 0.0;
  double lens_d0_dbi = 0.0;
  double lens_dstar_dbi = 0.0;
  double d_star = 0.0;        // fitted phase centre
  double d_star_gap = 0.0;    // gap actually used, max(d_star, 0)
  double improvement_db = 0.0;
  double improvement_pct_of_db = 0.0;
};

ComparisonReport comparison_report(const ArrayAntenna& antenna, const LensSpec& lens,
                                   FeedMode mode, const SweepOptions& options = {});

}  // namespace lensforge

#include "lensforge/sweep_impl.hpp"

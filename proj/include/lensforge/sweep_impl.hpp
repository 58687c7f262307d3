#pragma once

#include <algorithm>
#include <cmath>

#include "lensforge/golden_section.hpp"

namespace lensforge {

inline constexpr double kGapRefineTolerance = 0.05;  // mm

template <typename GainAt>
SeparationOptimum maximize_over_gap(GainAt&& gain_at, double d_lo, double d_hi,
                                    double coarse_step) {
  if (!(d_lo < d_hi)) throw InvalidInput("separation bracket requires d_lo < d_hi");
  if (!(coarse_step > 0.0)) throw InvalidInput("coarse step must be > 0");

  const auto steps = static_cast<std::size_t>(std::ceil((d_hi - d_lo) / coarse_step - 1e-9));
  std::vector<double> ds(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    ds[i] = std::min(d_hi, d_lo + coarse_step * static_cast<double>(i));
  }
  std::vector<double> gains(ds.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    gains[i] = gain_at(ds[i]);
    if (gains[i] > gains[best]) best = i;
  }

  SeparationOptimum out{ds[best], gains[best]};
  const double lo = ds[best == 0 ? 0 : best - 1];
  const double hi = ds[std::min(best + 1, ds.size() - 1)];
  if (hi > lo) {
    const ScalarMinimum refined =
        golden_section_minimize([&](double d) { return -gain_at(d); }, lo, hi, kGapRefineTolerance);
    if (-refined.value > out.gain_opt_dbi) out = {refined.x, -refined.value};
  }
  return out;
}

}  // namespace lensforge

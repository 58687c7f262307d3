#pragma once

#include <cmath>
#include <utility>

namespace lensforge {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section minimization of a unimodal function on [lo, hi]. Stops once the
/// bracket is narrower than `tolerance`. The returned point is the best one evaluated,
/// so the result never exceeds min(f(lo), f(hi)) when those are passed as hints.
template <typename F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  if (hi < lo) std::swap(lo, hi);

  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};

  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc < best.value) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd < best.value) best = {d, fd};
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = f(mid);
  if (fmid < best.value) best = {mid, fmid};
  return best;
}

}  // namespace lensforge

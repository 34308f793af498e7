#include "lrloc/phase.hpp"

#include <cmath>
#include <limits>

namespace lrloc {

namespace {

// 2 pi = kTwoPiHi + kTwoPiMid + kTwoPiLo to ~160 bits.
constexpr double kTwoPiHi = 6.283185307179586;
constexpr double kTwoPiMid = 2.4492935982947064e-16;
constexpr double kTwoPiLo = -5.989539619436679e-33;

struct DoubleDouble {
  double hi;
  double lo;
};

DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

DoubleDouble add(DoubleDouble x, double y) {
  const DoubleDouble s = two_sum(x.hi, y);
  return two_sum(s.hi, s.lo + x.lo);
}

// x - n * 2pi for an integral double n.
DoubleDouble subtract_turns(DoubleDouble x, double n) {
  const DoubleDouble a = two_prod(n, kTwoPiHi);
  const DoubleDouble b = two_prod(n, kTwoPiMid);
  DoubleDouble r = two_sum(x.hi, -a.hi);  // exact cancellation of the leading part
  r = add(r, x.lo);
  r = add(r, -a.lo);
  r = add(r, -b.hi);
  r = add(r, -b.lo);
  r = add(r, -n * kTwoPiLo);
  return r;
}

}  // namespace

double reduced_phase(double energy, double time) {
  DoubleDouble x = two_prod(energy, time);
  // The first pass leaves at most a few hundred turns (quotient rounding at
  // 1e19); the following passes bring it into one period.
  for (int pass = 0; pass < 3; ++pass) {
    const double n = std::nearbyint(x.hi / kTwoPiHi);
    if (n == 0.0) break;
    x = subtract_turns(x, n);
  }
  double r = x.hi + x.lo;
  if (r < 0) {
    x = add(x, kTwoPiHi);
    x = add(x, kTwoPiMid);
    r = x.hi + x.lo;
  }
  if (r >= kTwoPiHi) r = 0.0;
  return r;
}

double reduced_phase_error_bound(double e_max, double t_max) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double turns = std::abs(e_max * t_max) / kTwoPiHi + 1.0;
  // Rounding of the final sum, a handful of compensated additions, and the
  // truncation of 2 pi after the third double.
  return 8.0 * eps * kTwoPiHi + turns * 4.0e-48;
}

}  // namespace lrloc

#pragma once

namespace lrloc {

/// (energy * time) mod 2 pi in [0, 2 pi).
///
/// The product is formed exactly as a double-double (fma) and reduced against
/// a triple-double 2 pi, so the result is accurate to a few ulp of 2 pi even
/// when |energy * time| ~ 1e19. A plain `std::fmod(energy * time, 2 pi)`
/// loses every significant bit of the phase beyond t ~ 1e16.
double reduced_phase(double energy, double time);

/// Worst-case absolute error (radians) of reduced_phase for |energy| <= e_max
/// and 0 <= time <= t_max, taking energy and time as exact binary values.
double reduced_phase_error_bound(double e_max, double t_max);

}  // namespace lrloc

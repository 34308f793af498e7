#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lrloc/hamiltonian.hpp"

namespace lrloc {

using Amplitude = std::complex<double>;

struct Wavepacket {
  std::vector<Amplitude> amplitudes;  // over occupied rows
  double time = 0;
  Eigen::Index initial_index = 0;

  double norm_squared() const;
  std::vector<double> density() const;
};

/// psi_i(t) = sum_k phi_k(i) exp(-i E_k t) phi_k(i0), phases reduced with
/// reduced_phase().
Wavepacket propagate(const SpectralDecomposition& d, Eigen::Index initial, double time);

/// |psi_i(t)|^2 for every time in `times`; column j is the density at times[j].
/// Parallel over fixed-size blocks of the time grid; results do not depend on
/// the thread count.
Eigen::MatrixXd propagate_densities(const SpectralDecomposition& d, Eigen::Index initial,
                                    std::span<const double> times);

struct OracleOptions {
  double max_time = 1e3;
  std::int64_t max_steps = 10'000'000;
};

/// Verification oracle: integrates i dpsi/dt = H psi directly with an
/// adaptive-order Taylor method, without using the eigenbasis.
Wavepacket direct_integrate_oracle(const HamiltonianMatrix& h, Eigen::Index initial,
                                   double time, const OracleOptions& options = {});

struct DiagonalEnsemble {
  std::vector<double> density;  // nbar_i = sum_k |phi_k(i)|^2 |phi_k(i0)|^2
  double min_level_gap = 0;
  bool near_degenerate = false;  // some gap <= 1e-12: cross terms may not average out
};

DiagonalEnsemble infinite_time_average(const SpectralDecomposition& d, Eigen::Index initial);

/// Logarithmic grid of `points` times from t_min to t_max inclusive.
std::vector<double> log_time_grid(double t_min, double t_max, int points);

}  // namespace lrloc

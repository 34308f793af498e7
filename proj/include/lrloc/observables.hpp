#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "lrloc/hamiltonian.hpp"
#include "lrloc/lattice.hpp"

namespace lrloc {

/// Occupied sites sorted by distance from a fixed center; reused for every
/// time point of one realization.
class RadialOrder {
public:
  RadialOrder(std::span<const Coord> sites, Coord center);

  /// 2 R*, with R* the smallest radius whose closed ball around the center
  /// holds at least `coverage` of the density.
  double diameter(std::span<const double> density, double coverage) const;

  std::size_t size() const { return order_.size(); }

private:
  std::vector<std::size_t> order_;
  std::vector<std::int64_t> r2_;  // squared distance, aligned with order_
};

/// Wavepacket size L: the diameter of the smallest sphere around `center`
/// containing at least `coverage` of the density (default 90%).
double wavepacket_size(std::span<const double> density, std::span<const Coord> sites,
                       Coord center, double coverage = 0.9);

/// sum_i |psi_i|^4 of a normalized state.
double ipr(std::span<const double> amplitudes);
double ipr(std::span<const std::complex<double>> amplitudes);

struct IprDistribution {
  std::vector<double> values;  // one per eigenstate
  double i_d = 0;              // 1 / M
  double i_min = 0;
  double min_ratio() const { return i_min / i_d; }
};

IprDistribution ipr_distribution(const SpectralDecomposition& d, const LatticeSpec& spec);

struct ShellSample {
  double radius;         // exact distance from the density maximum
  double log_amplitude;  // ln|psi| = ln(density) / 2
  friend bool operator==(const ShellSample&, const ShellSample&) = default;
};

/// ln|psi| samples binned into spherical shells of fixed width around the
/// site of maximum density. Key k covers radii [k w, (k+1) w).
struct ShellSamples {
  double shell_width = 0.5;
  std::map<int, std::vector<ShellSample>> shells;

  void merge(const ShellSamples& other);
  std::size_t count(int shell) const;
  double mean_radius(int shell) const;
  friend bool operator==(const ShellSamples&, const ShellSamples&) = default;
};

ShellSamples shell_log_amplitudes(std::span<const double> density, std::span<const Coord> sites,
                                  double shell_width = 0.5,
                                  double max_radius = std::numeric_limits<double>::infinity());

struct CollapseOptions {
  std::size_t min_samples = 100;
  std::size_t min_shells = 3;
  int max_iterations = 4000;
};

struct CollapseFit {
  double loc_length = 0;  // lambda
  double sigma = 0;
  double goodness = 0;    // R^2 of the scaled histograms against exp(-x^2)/sqrt(pi)
  std::vector<int> shell_indices;
  std::vector<double> shells_used;  // mean radius of each shell
  double objective = 0;
  int iterations = 0;
};

/// Fits lambda, sigma so that x = (ln|psi| + r/lambda) / sqrt(sigma r / lambda)
/// is distributed as exp(-x^2)/sqrt(pi) in every selected shell. With an empty
/// `shells`, every r > 0 shell holding at least min_samples is used.
CollapseFit lognormal_collapse_fit(const ShellSamples& pool, std::span<const int> shells = {},
                                   const CollapseOptions& options = {});

struct ScaledHistogram {
  int shell = 0;
  double mean_radius = 0;
  double bin_width = 1;
  std::vector<double> x_center;
  std::vector<double> density;  // unit area
};

/// Per-shell histograms of x under given (lambda, sigma), Freedman-Diaconis bins.
std::vector<ScaledHistogram> scaled_histograms(const ShellSamples& pool,
                                               std::span<const int> shells, double loc_length,
                                               double sigma);

}  // namespace lrloc

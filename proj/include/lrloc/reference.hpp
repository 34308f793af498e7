#pragma once

// Straightforward serial versions of the parallel kernels. They trade speed
// for obviousness and exist so tests and the benchmark can compare against them.

#include <span>

#include <Eigen/Dense>

#include "lrloc/hamiltonian.hpp"
#include "lrloc/lattice.hpp"

namespace lrloc::reference {

HamiltonianMatrix build(const LatticeSpec& spec, const DisorderRealization& real);

/// Complex arithmetic, one time at a time, no blocking.
Eigen::MatrixXd propagate_densities(const SpectralDecomposition& d, Eigen::Index initial,
                                    std::span<const double> times);

/// Direct product of (1 - P) over every non-center lattice site.
double no_resonance_probability(int n_per_dim, double p, double gamma, double w);

/// Sum of ln(1 - P) over every non-center lattice site, no shell grouping.
double log_no_resonance_probability(int n_per_dim, double p, double gamma, double w);

/// Bisection for P~(p, w) = target using the all-sites sum.
double isoprobability_w(int n_per_dim, double p, double target, double gamma = 1.0,
                        double w_max = 1e3);

}  // namespace lrloc::reference

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lrloc {

/// Density of |w_i - w_j| for w_i, w_j iid uniform on a window of width w:
/// (2/w)(1 - delta/w) on [0, w].
double energy_gap_pdf(double delta, double w);

/// Probability that a site at distance r from an occupied site is occupied and
/// resonant with it, i.e. t = gamma / r^3 >= |w_i - w_j|:
/// p (2t/w - t^2/w^2), saturating at p once t >= w (and for w = 0).
double resonance_probability(double p, double gamma, double w, double r);

/// Squared distances from the center of an N^3 lattice with their
/// multiplicities (center excluded).
class DistanceShells {
public:
  explicit DistanceShells(int n_per_dim);

  int n_per_dim() const { return n_; }
  std::span<const std::int64_t> squared_radii() const { return r2_; }
  std::span<const std::uint64_t> multiplicities() const { return count_; }
  std::uint64_t site_count() const;  // N^3 - 1

private:
  int n_;
  std::vector<std::int64_t> r2_;
  std::vector<std::uint64_t> count_;
};

/// ln P~, the log-probability that the center site has no resonance with any
/// other site of the lattice. Shell-grouped; -inf if some pair resonates surely.
double log_no_resonance_probability(const DistanceShells& shells, double p, double gamma, double w);

/// P~ = prod_j (1 - P(p, gamma, w, r_0j)) over every non-center site.
double no_resonance_probability(const DistanceShells& shells, double p, double gamma, double w);
double no_resonance_probability(int n_per_dim, double p, double gamma, double w);

struct CrossoverLine {
  int n_per_dim = 0;
  double target_probability = 0;
  std::vector<double> p;  // solved points, p ascending
  std::vector<double> w;
  std::vector<double> unreachable_p;  // grid points with no solution in (0, w_max]
  double fit_A = 0;
  double fit_B = 0;
};

struct IsoprobabilityOptions {
  double gamma = 1.0;
  double w_max = 1e3;
  double rel_tolerance = 1e-4;  // on P~
};

/// For each p, the w in (0, w_max] where P~(p, w; N) = target, by bisection.
CrossoverLine isoprobability_line(const DistanceShells& shells, double target,
                                  std::span<const double> p_grid,
                                  const IsoprobabilityOptions& options = {});
CrossoverLine isoprobability_line(int n_per_dim, double target, std::span<const double> p_grid,
                                  const IsoprobabilityOptions& options = {});

struct CrossoverFit {
  double A = 0;
  double B = 0;
  std::vector<double> residuals;  // w/(p t~) - (A + B ln N), per point in input order
  double rms_residual = 0;
  std::vector<int> n_list;
};

/// Least squares of w / (p t~) = A + B ln N over every point of every line.
CrossoverFit fit_crossover_line(std::span<const CrossoverLine> lines, double nn_amplitude = 1.0);

/// w predicted by w = p t~ (A + B ln N).
double crossover_w(const CrossoverFit& fit, double p, int n_per_dim, double nn_amplitude = 1.0);

/// (28 pi / 3) kappa t~ p / w; a diagnostic of the resonance-counting criterion.
double levitov_parameter(double p, double w, int kappa, double t_nn = 1.0);

}  // namespace lrloc

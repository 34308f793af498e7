#include "lrloc/reference.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "lrloc/errors.hpp"
#include "lrloc/phase.hpp"
#include "lrloc/scaling.hpp"

namespace lrloc::reference {

HamiltonianMatrix build(const LatticeSpec& spec, const DisorderRealization& real) {
  const auto m = static_cast<Eigen::Index>(real.sites.size());
  if (m == 0) throw DomainError("empty realization");
  HamiltonianMatrix h;
  h.site_map = real.sites;
  h.seed = real.seed;
  h.entries.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Coord a = site_coordinates(spec, real.sites[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) {
        h.entries(i, i) = real.onsite_energy[static_cast<std::size_t>(i)];
        continue;
      }
      const Coord b = site_coordinates(spec, real.sites[static_cast<std::size_t>(j)]);
      h.entries(i, j) = spec.nn_amplitude / std::pow(pair_distance(a, b), spec.alpha);
    }
  }
  return h;
}

Eigen::MatrixXd propagate_densities(const SpectralDecomposition& d, Eigen::Index initial,
                                    std::span<const double> times) {
  const Eigen::Index m = d.dimension();
  Eigen::MatrixXd out(m, static_cast<Eigen::Index>(times.size()));
  std::vector<std::complex<double>> coeff(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (Eigen::Index k = 0; k < m; ++k)
      coeff[static_cast<std::size_t>(k)] =
          d.eigenvectors(initial, k) * std::polar(1.0, -reduced_phase(d.eigenvalues(k), times[j]));
    for (Eigen::Index i = 0; i < m; ++i) {
      std::complex<double> psi = 0;
      for (Eigen::Index k = 0; k < m; ++k) psi += d.eigenvectors(i, k) * coeff[static_cast<std::size_t>(k)];
      out(i, static_cast<Eigen::Index>(j)) = std::norm(psi);
    }
  }
  return out;
}

namespace {

template <typename F>
void for_each_other_site(int n, F&& f) {
  const int h = (n - 1) / 2;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        if (x == h && y == h && z == h) continue;
        f(pair_distance({x, y, z}, {h, h, h}));
      }
}

}  // namespace

double no_resonance_probability(int n_per_dim, double p, double gamma, double w) {
  double prod = 1.0;
  for_each_other_site(n_per_dim, [&](double r) { prod *= 1.0 - resonance_probability(p, gamma, w, r); });
  return prod;
}

double log_no_resonance_probability(int n_per_dim, double p, double gamma, double w) {
  double sum = 0.0;
  for_each_other_site(n_per_dim, [&](double r) {
    sum += std::log1p(-resonance_probability(p, gamma, w, r));
  });
  return sum;
}

double isoprobability_w(int n_per_dim, double p, double target, double gamma, double w_max) {
  const double lt = std::log(target);
  double lo = w_max * 1e-12, hi = w_max;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    (log_no_resonance_probability(n_per_dim, p, gamma, mid) < lt ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace lrloc::reference

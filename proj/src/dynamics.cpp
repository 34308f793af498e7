#include "lrloc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrloc/errors.hpp"
#include "lrloc/phase.hpp"

namespace lrloc {

namespace {

constexpr Eigen::Index kTimeBlock = 8;

void check_initial(Eigen::Index m, Eigen::Index initial) {
  if (initial < 0 || initial >= m)
    throw DomainError("initial row " + std::to_string(initial) + " out of range");
}

}  // namespace

double Wavepacket::norm_squared() const {
  double s = 0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

std::vector<double> Wavepacket::density() const {
  std::vector<double> out(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), out.begin(),
                 [](const Amplitude& a) { return std::norm(a); });
  return out;
}

Wavepacket propagate(const SpectralDecomposition& d, Eigen::Index initial, double time) {
  const Eigen::Index m = d.dimension();
  check_initial(m, initial);
  if (!(time >= 0)) throw DomainError("time must be >= 0");

  Eigen::VectorXd re(m), im(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double c = d.eigenvectors(initial, k);
    const double theta = reduced_phase(d.eigenvalues(k), time);
    re(k) = c * std::cos(theta);
    im(k) = -c * std::sin(theta);
  }
  const Eigen::VectorXd psi_re = d.eigenvectors * re;
  const Eigen::VectorXd psi_im = d.eigenvectors * im;

  Wavepacket wp;
  wp.time = time;
  wp.initial_index = initial;
  wp.amplitudes.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    wp.amplitudes[static_cast<std::size_t>(i)] = {psi_re(i), psi_im(i)};
  return wp;
}

Eigen::MatrixXd propagate_densities(const SpectralDecomposition& d, Eigen::Index initial,
                                    std::span<const double> times) {
  const Eigen::Index m = d.dimension();
  check_initial(m, initial);
  const auto n_times = static_cast<Eigen::Index>(times.size());
  for (double t : times)
    if (!(t >= 0)) throw DomainError("time must be >= 0");

  Eigen::MatrixXd out(m, n_times);
  const Eigen::Index n_blocks = (n_times + kTimeBlock - 1) / kTimeBlock;

#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index b = 0; b < n_blocks; ++b) {
    const Eigen::Index first = b * kTimeBlock;
    const Eigen::Index count = std::min(kTimeBlock, n_times - first);
    // Columns 2j / 2j+1 hold Re / Im of c_k exp(-i E_k t_j).
    Eigen::MatrixXd weights(m, 2 * count);
    for (Eigen::Index j = 0; j < count; ++j) {
      const double t = times[static_cast<std::size_t>(first + j)];
      for (Eigen::Index k = 0; k < m; ++k) {
        const double c = d.eigenvectors(initial, k);
        const double theta = reduced_phase(d.eigenvalues(k), t);
        weights(k, 2 * j) = c * std::cos(theta);
        weights(k, 2 * j + 1) = -c * std::sin(theta);
      }
    }
    const Eigen::MatrixXd psi = d.eigenvectors * weights;
    for (Eigen::Index j = 0; j < count; ++j)
      out.col(first + j) = psi.col(2 * j).array().square() + psi.col(2 * j + 1).array().square();
  }
  return out;
}

Wavepacket direct_integrate_oracle(const HamiltonianMatrix& h, Eigen::Index initial,
                                   double time, const OracleOptions& options) {
  const Eigen::Index m = h.dimension();
  check_initial(m, initial);
  if (!(time >= 0)) throw DomainError("time must be >= 0");
  if (time > options.max_time)
    throw DomainError("oracle time " + std::to_string(time) + " exceeds max_time");

  // ||H||_inf bounds the growth of each Taylor term.
  const double h_norm = std::max(h.entries.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
  constexpr double kStepScale = 2.0;
  const auto steps = static_cast<std::int64_t>(std::ceil(time * h_norm / kStepScale));
  if (steps > options.max_steps)
    throw NumericError("oracle step budget exhausted (" + std::to_string(steps) + " steps)",
                       h.seed);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(m);
  psi(initial) = 1.0;
  if (steps > 0) {
    const double dt = time / static_cast<double>(steps);
    const Eigen::MatrixXcd hc = h.entries.cast<Amplitude>();
    Eigen::VectorXcd term(m), next(m);
    for (std::int64_t s = 0; s < steps; ++s) {
      term = psi;
      next = psi;
      // Order grows until the term is negligible; cap well beyond the
      // ~40 terms h*||H|| = 2 needs.
      int order = 1;
      for (; order <= 120; ++order) {
        term = (hc * term) * Amplitude(0.0, -dt / order);
        next += term;
        if (term.lpNorm<Eigen::Infinity>() <= 1e-18 * next.lpNorm<Eigen::Infinity>()) break;
      }
      if (order > 120) throw NumericError("Taylor series did not converge", h.seed);
      psi = next;
    }
  }

  Wavepacket wp;
  wp.time = time;
  wp.initial_index = initial;
  wp.amplitudes.assign(psi.data(), psi.data() + m);
  return wp;
}

DiagonalEnsemble infinite_time_average(const SpectralDecomposition& d, Eigen::Index initial) {
  const Eigen::Index m = d.dimension();
  check_initial(m, initial);
  const Eigen::VectorXd weight = d.eigenvectors.row(initial).transpose().array().square();
  const Eigen::VectorXd nbar = d.eigenvectors.array().square().matrix() * weight;

  DiagonalEnsemble out;
  out.density.assign(nbar.data(), nbar.data() + m);
  out.min_level_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < m; ++k)
    out.min_level_gap = std::min(out.min_level_gap, d.eigenvalues(k) - d.eigenvalues(k - 1));
  out.near_degenerate = m > 1 && out.min_level_gap <= 1e-12;
  return out;
}

std::vector<double> log_time_grid(double t_min, double t_max, int points) {
  if (points < 1) throw DomainError("time grid needs at least one point");
  if (!(t_min > 0) || !(t_max >= t_min)) throw DomainError("invalid time range");
  if (points == 1) return {t_min};
  if (!(t_max > t_min)) throw DomainError("time grid must be strictly increasing");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double a = std::log10(t_min), b = std::log10(t_max);
  for (int j = 0; j < points; ++j)
    grid[static_cast<std::size_t>(j)] = std::pow(10.0, a + (b - a) * j / (points - 1));
  grid.front() = t_min;
  grid.back() = t_max;
  return grid;
}

}  // namespace lrloc

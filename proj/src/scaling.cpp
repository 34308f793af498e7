#include "lrloc/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lrloc/errors.hpp"

namespace lrloc {

double energy_gap_pdf(double delta, double w) {
  if (!(w > 0)) throw DomainError("energy_gap_pdf needs w > 0");
  if (!(delta >= 0 && delta <= w)) throw DomainError("delta outside [0, w]");
  return (2.0 / w) * (1.0 - delta / w);
}

double resonance_probability(double p, double gamma, double w, double r) {
  if (!(r > 0)) throw DomainError("resonance distance must be > 0");
  if (!(p >= 0 && p <= 1)) throw DomainError("p must lie in [0, 1]");
  if (!(w >= 0)) throw DomainError("w must be >= 0");
  const double t = gamma / (r * r * r);
  if (w == 0 || t >= w) return p;
  const double x = t / w;
  return p * (2.0 * x - x * x);
}

DistanceShells::DistanceShells(int n_per_dim) : n_(n_per_dim) {
  if (n_per_dim < 3 || n_per_dim % 2 == 0) throw DomainError("DistanceShells needs odd N >= 3");
  const std::int64_t h = (n_per_dim - 1) / 2;
  const std::int64_t max_r2 = 3 * h * h;

  // Number of ways to write s as a^2 + b^2 with |a|, |b| <= h, then add c^2.
  std::vector<std::uint64_t> pair(static_cast<std::size_t>(2 * h * h + 1), 0);
  for (std::int64_t a = -h; a <= h; ++a)
    for (std::int64_t b = -h; b <= h; ++b) ++pair[static_cast<std::size_t>(a * a + b * b)];

  std::vector<std::uint64_t> full(static_cast<std::size_t>(max_r2 + 1), 0);
  for (std::int64_t c = -h; c <= h; ++c) {
    const std::int64_t c2 = c * c;
    for (std::size_t s = 0; s < pair.size(); ++s)
      if (pair[s]) full[s + static_cast<std::size_t>(c2)] += pair[s];
  }
  for (std::size_t s = 1; s < full.size(); ++s)
    if (full[s]) {
      r2_.push_back(static_cast<std::int64_t>(s));
      count_.push_back(full[s]);
    }
}

std::uint64_t DistanceShells::site_count() const {
  std::uint64_t n = 0;
  for (auto c : count_) n += c;
  return n;
}

double log_no_resonance_probability(const DistanceShells& shells, double p, double gamma,
                                    double w) {
  if (!(p >= 0 && p <= 1)) throw DomainError("p must lie in [0, 1]");
  if (!(w >= 0)) throw DomainError("w must be >= 0");
  const auto r2 = shells.squared_radii();
  const auto count = shells.multiplicities();
  const auto n = static_cast<std::int64_t>(r2.size());

  // Fixed chunks summed in order keep the result independent of thread count.
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(n_chunks), 0.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    double acc = 0;
    const std::int64_t end = std::min(n, (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      const double r = std::sqrt(static_cast<double>(r2[static_cast<std::size_t>(i)]));
      const double prob = resonance_probability(p, gamma, w, r);
      if (prob >= 1.0) {
        acc = -std::numeric_limits<double>::infinity();
        break;
      }
      acc += static_cast<double>(count[static_cast<std::size_t>(i)]) * std::log1p(-prob);
    }
    partial[static_cast<std::size_t>(c)] = acc;
  }

  double total = 0;
  for (double v : partial) total += v;
  return total;
}

double no_resonance_probability(const DistanceShells& shells, double p, double gamma, double w) {
  const double lp = log_no_resonance_probability(shells, p, gamma, w);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double no_resonance_probability(int n_per_dim, double p, double gamma, double w) {
  return no_resonance_probability(DistanceShells(n_per_dim), p, gamma, w);
}

CrossoverLine isoprobability_line(const DistanceShells& shells, double target,
                                  std::span<const double> p_grid,
                                  const IsoprobabilityOptions& options) {
  if (!(target > 0 && target < 1)) throw DomainError("target probability must lie in (0, 1)");
  if (!(options.w_max > 0)) throw DomainError("w_max must be > 0");

  CrossoverLine line;
  line.n_per_dim = shells.n_per_dim();
  line.target_probability = target;
  const double log_target = std::log(target);

  std::vector<double> ps(p_grid.begin(), p_grid.end());
  std::sort(ps.begin(), ps.end());
  for (double p : ps) {
    auto f = [&](double w) {
      return log_no_resonance_probability(shells, p, options.gamma, w) - log_target;
    };
    // P~ rises with w; bracket in log w between a tiny width and w_max.
    double hi = options.w_max;
    double lo = options.w_max * 1e-12;
    if (!(f(hi) >= 0) || !(f(lo) <= 0)) {
      line.unreachable_p.push_back(p);
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = std::sqrt(lo * hi);
      (f(mid) < 0 ? lo : hi) = mid;
    }
    const double w = 0.5 * (lo + hi);
    const double achieved = std::exp(f(w) + log_target);
    if (std::abs(achieved - target) > options.rel_tolerance * target) {
      line.unreachable_p.push_back(p);
      continue;
    }
    line.p.push_back(p);
    line.w.push_back(w);
  }
  return line;
}

CrossoverLine isoprobability_line(int n_per_dim, double target, std::span<const double> p_grid,
                                  const IsoprobabilityOptions& options) {
  return isoprobability_line(DistanceShells(n_per_dim), target, p_grid, options);
}

CrossoverFit fit_crossover_line(std::span<const CrossoverLine> lines, double nn_amplitude) {
  CrossoverFit fit;
  double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (const auto& line : lines) {
    if (line.p.size() < 3)
      throw DomainError("crossover line for N=" + std::to_string(line.n_per_dim) +
                        " has fewer than 3 points");
    if (std::find(fit.n_list.begin(), fit.n_list.end(), line.n_per_dim) == fit.n_list.end())
      fit.n_list.push_back(line.n_per_dim);
    const double x = std::log(static_cast<double>(line.n_per_dim));
    for (std::size_t i = 0; i < line.p.size(); ++i) {
      const double y = line.w[i] / (line.p[i] * nn_amplitude);
      s1 += 1;
      sx += x;
      sxx += x * x;
      sy += y;
      sxy += x * y;
    }
  }
  if (fit.n_list.size() < 2) throw DomainError("fit needs lines for at least two lattice sizes");
  const double det = s1 * sxx - sx * sx;
  if (!(std::abs(det) > 1e-12 * s1 * sxx)) throw DomainError("rank-deficient crossover fit");
  fit.B = (s1 * sxy - sx * sy) / det;
  fit.A = (sy - fit.B * sx) / s1;

  double ss = 0;
  for (const auto& line : lines) {
    const double x = std::log(static_cast<double>(line.n_per_dim));
    for (std::size_t i = 0; i < line.p.size(); ++i) {
      const double res = line.w[i] / (line.p[i] * nn_amplitude) - (fit.A + fit.B * x);
      fit.residuals.push_back(res);
      ss += res * res;
    }
  }
  fit.rms_residual = std::sqrt(ss / s1);
  return fit;
}

double crossover_w(const CrossoverFit& fit, double p, int n_per_dim, double nn_amplitude) {
  return p * nn_amplitude * (fit.A + fit.B * std::log(static_cast<double>(n_per_dim)));
}

double levitov_parameter(double p, double w, int kappa, double t_nn) {
  if (!(w > 0)) throw DomainError("levitov_parameter needs w > 0 (w = 0 is delocalized)");
  if (kappa < 1) throw DomainError("kappa must be >= 1");
  return 28.0 * std::numbers::pi / 3.0 * kappa * t_nn * p / w;
}

}  // namespace lrloc

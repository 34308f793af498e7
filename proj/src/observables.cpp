#include "lrloc/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lrloc/errors.hpp"

namespace lrloc {

// --- wavepacket size --------------------------------------------------------

RadialOrder::RadialOrder(std::span<const Coord> sites, Coord center) {
  order_.resize(sites.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::vector<std::int64_t> r2(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) r2[i] = squared_distance(sites[i], center);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return r2[a] < r2[b]; });
  r2_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) r2_[i] = r2[order_[i]];
}

double RadialOrder::diameter(std::span<const double> density, double coverage) const {
  if (density.size() != order_.size()) throw DomainError("density size does not match sites");
  if (!(coverage > 0 && coverage < 1)) throw DomainError("coverage must lie in (0, 1)");
  const double total = std::accumulate(density.begin(), density.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-6)
    throw DomainError("density must sum to 1, got " + std::to_string(total));

  double cumulative = 0;
  std::size_t i = 0;
  while (i < order_.size()) {
    // A sphere includes every site at its radius, so ties enter together.
    const std::int64_t r2 = r2_[i];
    for (; i < order_.size() && r2_[i] == r2; ++i) cumulative += density[order_[i]];
    if (cumulative >= coverage) return 2.0 * std::sqrt(static_cast<double>(r2));
  }
  throw std::logic_error("coverage unreachable although density sums to 1");
}

double wavepacket_size(std::span<const double> density, std::span<const Coord> sites,
                       Coord center, double coverage) {
  return RadialOrder(sites, center).diameter(density, coverage);
}

// --- inverse participation ratio ---------------------------------------------

namespace {

double ipr_from_weights(std::span<const double> weights) {
  double norm = 0, fourth = 0;
  for (double p : weights) {
    norm += p;
    fourth += p * p;
  }
  if (std::abs(norm - 1.0) > 1e-8)
    throw DomainError("ipr needs a normalized state, norm^2 = " + std::to_string(norm));
  return fourth;
}

}  // namespace

double ipr(std::span<const double> amplitudes) {
  std::vector<double> w(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), w.begin(),
                 [](double a) { return a * a; });
  return ipr_from_weights(w);
}

double ipr(std::span<const std::complex<double>> amplitudes) {
  std::vector<double> w(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), w.begin(),
                 [](const std::complex<double>& a) { return std::norm(a); });
  return ipr_from_weights(w);
}

IprDistribution ipr_distribution(const SpectralDecomposition& d, const LatticeSpec& spec) {
  const Eigen::Index m = d.dimension();
  if (m == 0) throw DomainError("empty decomposition");
  (void)spec;  // i_d uses the realized occupied count, which exact-count sampling ties to p N^3

  IprDistribution out;
  out.values.resize(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto col = d.eigenvectors.col(k);
    out.values[static_cast<std::size_t>(k)] = ipr(std::span<const double>(col.data(), col.size()));
  }
  out.i_d = 1.0 / static_cast<double>(m);
  out.i_min = *std::min_element(out.values.begin(), out.values.end());
  return out;
}

// --- shell-resolved log amplitudes ------------------------------------------

void ShellSamples::merge(const ShellSamples& other) {
  if (other.shells.empty()) return;
  if (shells.empty()) shell_width = other.shell_width;
  if (other.shell_width != shell_width) throw DomainError("cannot merge different shell widths");
  for (const auto& [k, samples] : other.shells) {
    auto& dst = shells[k];
    dst.insert(dst.end(), samples.begin(), samples.end());
  }
}

std::size_t ShellSamples::count(int shell) const {
  const auto it = shells.find(shell);
  return it == shells.end() ? 0 : it->second.size();
}

double ShellSamples::mean_radius(int shell) const {
  const auto it = shells.find(shell);
  if (it == shells.end() || it->second.empty()) return 0;
  double s = 0;
  for (const auto& x : it->second) s += x.radius;
  return s / static_cast<double>(it->second.size());
}

ShellSamples shell_log_amplitudes(std::span<const double> density, std::span<const Coord> sites,
                                  double shell_width, double max_radius) {
  if (density.size() != sites.size()) throw DomainError("density size does not match sites");
  if (!(shell_width > 0)) throw DomainError("shell width must be > 0");
  ShellSamples out;
  out.shell_width = shell_width;
  if (density.empty()) return out;

  const auto peak = static_cast<std::size_t>(
      std::max_element(density.begin(), density.end()) - density.begin());
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (!(density[i] >= 1e-300)) continue;
    const double r = pair_distance(sites[i], sites[peak]);
    if (r > max_radius) continue;
    const int shell = static_cast<int>(std::floor(r / shell_width));
    out.shells[shell].push_back({r, 0.5 * std::log(density[i])});
  }
  return out;
}

// --- log-normal collapse -----------------------------------------------------

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double gaussian_target(double x) { return std::exp(-x * x) / std::sqrt(std::numbers::pi); }

ScaledHistogram histogram_for(int shell, const std::vector<ShellSample>& samples,
                              double loc_length, double sigma) {
  std::vector<double> x(samples.size());
  double r_sum = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = samples[i].radius;
    x[i] = (samples[i].log_amplitude + r / loc_length) / std::sqrt(sigma * r / loc_length);
    r_sum += r;
  }
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double lo = x.front(), hi = x.back();
  double width = 2.0 * (quantile(x, 0.75) - quantile(x, 0.25)) / std::cbrt(n);
  std::size_t bins = 1;
  if (width > 0 && hi > lo) {
    bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / width)), 1,
                                   100000);
  }
  width = (hi > lo) ? (hi - lo) / static_cast<double>(bins) : 1.0;

  ScaledHistogram h;
  h.shell = shell;
  h.mean_radius = r_sum / n;
  h.bin_width = width;
  h.x_center.resize(bins);
  h.density.assign(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b)
    h.x_center[b] = (hi > lo) ? lo + (static_cast<double>(b) + 0.5) * width : lo;
  for (double v : x) {
    auto b = (hi > lo) ? static_cast<std::size_t>((v - lo) / width) : 0;
    h.density[std::min(b, bins - 1)] += 1.0;
  }
  for (double& c : h.density) c /= n * width;
  return h;
}

struct Residuals {
  double ss_res = 0;
  double ss_tot = 0;
};

Residuals residuals(const std::vector<ScaledHistogram>& hists) {
  double sum = 0;
  std::size_t count = 0;
  Residuals r;
  for (const auto& h : hists)
    for (std::size_t b = 0; b < h.density.size(); ++b) {
      const double diff = h.density[b] - gaussian_target(h.x_center[b]);
      r.ss_res += diff * diff;
      sum += h.density[b];
      ++count;
    }
  const double mean = sum / static_cast<double>(count);
  for (const auto& h : hists)
    for (double v : h.density) r.ss_tot += (v - mean) * (v - mean);
  return r;
}

// Integrated squared distance between the step density and the target over
// the whole line. Bin-center sums reward spreading x until both vanish.
double l2_distance(const std::vector<ScaledHistogram>& hists) {
  const double sqrt2 = std::numbers::sqrt2;
  const double g2_total = 1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  double total = 0;
  for (const auto& h : hists) {
    const std::size_t bins = h.density.size();
    const double width = h.bin_width;
    double sum = g2_total;
    for (std::size_t b = 0; b < bins; ++b) {
      const double a = h.x_center[b] - 0.5 * width, z = h.x_center[b] + 0.5 * width;
      const double d = h.density[b];
      sum += d * d * width - d * (std::erf(z) - std::erf(a));
    }
    total += sum;
  }
  return total;
}

using Point = std::array<double, 2>;

struct Simplex {
  std::array<Point, 3> vertex;
  std::array<double, 3> value;
};

// Nelder-Mead on a 2D objective. Returns the best vertex; `iterations` is
// incremented; `converged` reports whether the simplex collapsed in time.
template <typename F>
Point nelder_mead(F&& f, Point start, double step, int max_iter, int& iterations, bool& converged) {
  Simplex s;
  s.vertex = {start, Point{start[0] + step, start[1]}, Point{start[0], start[1] + step}};
  for (int i = 0; i < 3; ++i) s.value[i] = f(s.vertex[i]);
  converged = false;
  for (int it = 0; it < max_iter; ++it, ++iterations) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s.value[a] < s.value[b]; });
    const Point best = s.vertex[idx[0]], mid = s.vertex[idx[1]], worst = s.vertex[idx[2]];
    const double fb = s.value[idx[0]], fm = s.value[idx[1]], fw = s.value[idx[2]];

    const double size = std::max({std::abs(mid[0] - best[0]), std::abs(mid[1] - best[1]),
                                  std::abs(worst[0] - best[0]), std::abs(worst[1] - best[1])});
    if (size < 1e-9 || (size < 1e-5 && fw - fb <= 1e-14 * (1.0 + std::abs(fb)))) {
      converged = true;
      return best;
    }

    const Point centroid{0.5 * (best[0] + mid[0]), 0.5 * (best[1] + mid[1])};
    auto along = [&](double t) {
      return Point{centroid[0] + t * (worst[0] - centroid[0]),
                   centroid[1] + t * (worst[1] - centroid[1])};
    };
    const Point xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fb) {
      const Point xe = along(-2.0);
      const double fe = f(xe);
      s.vertex[idx[2]] = fe < fr ? xe : xr;
      s.value[idx[2]] = std::min(fe, fr);
    } else if (fr < fm) {
      s.vertex[idx[2]] = xr;
      s.value[idx[2]] = fr;
    } else {
      const bool outside = fr < fw;
      const Point xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fw)) {
        s.vertex[idx[2]] = xc;
        s.value[idx[2]] = fc;
      } else {
        for (int k : {idx[1], idx[2]}) {
          s.vertex[k] = Point{best[0] + 0.5 * (s.vertex[k][0] - best[0]),
                              best[1] + 0.5 * (s.vertex[k][1] - best[1])};
          s.value[k] = f(s.vertex[k]);
        }
      }
    }
  }
  const auto best = std::min_element(s.value.begin(), s.value.end()) - s.value.begin();
  return s.vertex[static_cast<std::size_t>(best)];
}

}  // namespace

std::vector<ScaledHistogram> scaled_histograms(const ShellSamples& pool,
                                               std::span<const int> shells, double loc_length,
                                               double sigma) {
  if (!(loc_length > 0) || !(sigma > 0)) throw DomainError("lambda and sigma must be > 0");
  std::vector<ScaledHistogram> out;
  for (int k : shells) {
    const auto it = pool.shells.find(k);
    if (it == pool.shells.end() || it->second.empty())
      throw DomainError("shell " + std::to_string(k) + " has no samples");
    out.push_back(histogram_for(k, it->second, loc_length, sigma));
  }
  return out;
}

CollapseFit lognormal_collapse_fit(const ShellSamples& pool, std::span<const int> shells,
                                   const CollapseOptions& options) {
  std::vector<int> selected(shells.begin(), shells.end());
  if (selected.empty()) {
    for (const auto& [k, samples] : pool.shells)
      if (k > 0 && samples.size() >= options.min_samples) selected.push_back(k);
  }
  for (int k : selected) {
    if (pool.count(k) < options.min_samples)
      throw DomainError("shell " + std::to_string(k) + " has fewer than " +
                        std::to_string(options.min_samples) + " samples");
    for (const auto& s : pool.shells.at(k))
      if (!(s.radius > 0)) throw DomainError("collapse shells must have r > 0");
  }
  if (selected.size() < options.min_shells)
    throw DomainError("collapse fit needs at least " + std::to_string(options.min_shells) +
                      " shells with enough samples, found " + std::to_string(selected.size()));

  // Moment estimates: mean ln|psi| = -r/lambda, variance = sigma r / (2 lambda).
  double srr = 0, srm = 0, srv = 0;
  for (int k : selected) {
    const auto& s = pool.shells.at(k);
    double r = 0, m = 0;
    for (const auto& x : s) {
      r += x.radius;
      m += x.log_amplitude;
    }
    const double n = static_cast<double>(s.size());
    r /= n;
    m /= n;
    double v = 0;
    for (const auto& x : s) v += (x.log_amplitude - m) * (x.log_amplitude - m);
    v /= n - 1;
    srr += r * r;
    srm += r * m;
    srv += r * v;
  }
  if (!(srm < 0))
    throw NumericError("shell means of ln|psi| do not decay with distance; no localization length");
  const double lambda0 = -srr / srm;
  const double sigma0 = std::max(2.0 * lambda0 * srv / srr, 1e-6);

  auto objective = [&](const Point& q) {
    const double lam = std::exp(q[0]), sig = std::exp(q[1]);
    if (!(lam > 0 && sig > 0) || !std::isfinite(lam) || !std::isfinite(sig))
      return std::numeric_limits<double>::max();
    return l2_distance(scaled_histograms(pool, selected, lam, sig));
  };

  CollapseFit fit;
  Point best{std::log(lambda0), std::log(sigma0)};
  double best_value = objective(best);
  bool converged = false;
  // Histogram objectives are piecewise constant; restart until no progress.
  for (int restart = 0; restart < 6; ++restart) {
    bool ok = false;
    const Point p = nelder_mead(objective, best, restart == 0 ? 0.1 : 0.02,
                                options.max_iterations, fit.iterations, ok);
    const double v = objective(p);
    converged = ok;
    const bool improved = v < best_value - 1e-12 * std::abs(best_value);
    if (v < best_value) {
      best = p;
      best_value = v;
    }
    if (!improved) break;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "collapse fit did not converge after " << fit.iterations
        << " iterations; last lambda=" << std::exp(best[0]) << " sigma=" << std::exp(best[1])
        << " objective=" << best_value;
    throw NumericError(msg.str());
  }

  fit.loc_length = std::exp(best[0]);
  fit.sigma = std::exp(best[1]);
  fit.objective = best_value;
  fit.shell_indices = selected;
  for (int k : selected) fit.shells_used.push_back(pool.mean_radius(k));
  const Residuals r = residuals(scaled_histograms(pool, selected, fit.loc_length, fit.sigma));
  fit.goodness = r.ss_tot > 0 ? std::clamp(1.0 - r.ss_res / r.ss_tot, 0.0, 1.0) : 0.0;
  return fit;
}

}  // namespace lrloc

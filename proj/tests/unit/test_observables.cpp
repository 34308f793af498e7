#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "lrloc/errors.hpp"
#include "lrloc/observables.hpp"
#include "lrloc/rng.hpp"

using namespace lrloc;

namespace {

LatticeSpec cube(int n, double p = 1.0, double w = 0.0) {
  LatticeSpec s;
  s.n_per_dim = n;
  s.occupation = p;
  s.disorder_width = w;
  return s;
}

std::vector<Coord> all_sites(int n) {
  std::vector<Coord> out;
  const LatticeSpec s = cube(n);
  for (SiteIndex i = 0; i < s.site_count(); ++i) out.push_back(site_coordinates(s, i));
  return out;
}

// Tries every candidate radius (each distinct site distance) from small to
// large and returns twice the first one whose ball holds enough density.
double brute_force_diameter(const std::vector<double>& density, const std::vector<Coord>& sites,
                            Coord center, double coverage) {
  std::set<std::int64_t> radii;
  for (const auto& c : sites) radii.insert(squared_distance(c, center));
  for (std::int64_t r2 : radii) {
    double inside = 0;
    for (std::size_t i = 0; i < sites.size(); ++i)
      if (squared_distance(sites[i], center) <= r2) inside += density[i];
    if (inside >= coverage) return 2 * std::sqrt(static_cast<double>(r2));
  }
  return -1;
}

// Draws x with density exp(-x^2)/sqrt(pi), i.e. normal with variance 1/2.
double target_draw(rng::Stream& s) {
  const double u1 = 1.0 - s.uniform01();
  const double u2 = s.uniform01();
  return std::sqrt(-std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

ShellSamples lognormal_pool(double lambda, double sigma, std::size_t per_shell, std::uint64_t seed,
                            bool identical_x = false) {
  rng::Stream s(seed);
  ShellSamples pool;
  pool.shell_width = 0.5;
  std::vector<double> xs(per_shell);
  for (double& x : xs) x = target_draw(s);
  for (int k : {2, 4, 6, 8, 10}) {
    auto& shell = pool.shells[k];
    for (std::size_t i = 0; i < per_shell; ++i) {
      const double r = 0.5 * (k + s.uniform01());
      const double x = identical_x ? xs[i] : target_draw(s);
      shell.push_back({r, -r / lambda + x * std::sqrt(sigma * r / lambda)});
    }
  }
  return pool;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("wavepacket size, hand cases") {
  const auto sites = all_sites(5);
  const Coord center{2, 2, 2};
  std::vector<double> delta(sites.size(), 0.0);
  delta[62] = 1.0;
  CHECK(wavepacket_size(delta, sites, center) == 0.0);

  std::vector<double> split(sites.size(), 0.0);
  split[62] = 0.95;
  split[linear_index(cube(5), {2, 2, 4})] += 0.05 / 2;
  split[linear_index(cube(5), {2, 2, 0})] += 0.05 / 2;
  CHECK(wavepacket_size(split, sites, center, 0.9) == 0.0);
  CHECK(wavepacket_size(split, sites, center, 0.97) == 4.0);
}

TEST_CASE("wavepacket size, uniform full lattice against exhaustive scan") {
  const auto sites = all_sites(5);
  const std::vector<double> uniform(sites.size(), 1.0 / 125);
  for (double c : {0.05, 0.3, 0.5, 0.9, 0.99}) {
    const double expected = brute_force_diameter(uniform, sites, {2, 2, 2}, c);
    CHECK(wavepacket_size(uniform, sites, {2, 2, 2}, c) == expected);
  }
  // 93 of 125 sites have r^2 <= 8, 117 have r^2 <= 9.
  CHECK(wavepacket_size(uniform, sites, {2, 2, 2}) == 6.0);
}

TEST_CASE("wavepacket size, random densities on diluted lattices") {
  rng::Stream s(77);
  const LatticeSpec spec = cube(7, 0.4, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto real = sample_realization(spec, s.next());
    const auto sites = occupied_coordinates(spec, real);
    std::vector<double> rho(sites.size());
    double total = 0;
    for (double& v : rho) total += (v = std::pow(s.uniform01(), 4));
    for (double& v : rho) v /= total;
    double previous = 0;
    for (double c : {0.1, 0.5, 0.9, 0.95}) {
      const double l = wavepacket_size(rho, sites, spec.center(), c);
      CHECK(l == brute_force_diameter(rho, sites, spec.center(), c));
      CHECK(l >= previous);
      previous = l;
    }
  }
}

TEST_CASE("wavepacket size preconditions") {
  const auto sites = all_sites(3);
  std::vector<double> rho(sites.size(), 1.0 / 27);
  CHECK_THROWS_AS(wavepacket_size(rho, sites, {1, 1, 1}, 1.0), DomainError);
  CHECK_THROWS_AS(wavepacket_size(rho, sites, {1, 1, 1}, 0.0), DomainError);
  rho[0] += 0.01;
  CHECK_THROWS_AS(wavepacket_size(rho, sites, {1, 1, 1}), DomainError);
}

TEST_CASE("ipr values") {
  const std::vector<double> delta{0, 1, 0};
  CHECK(ipr(delta) == 1.0);
  const std::vector<double> flat(8, 1 / std::sqrt(8.0));
  CHECK(ipr(flat) == doctest::Approx(1.0 / 8));
  const std::vector<double> mixed{std::sqrt(0.8), std::sqrt(0.2)};
  CHECK(ipr(mixed) == doctest::Approx(0.68).epsilon(1e-14));
  const std::vector<std::complex<double>> phased{{0, std::sqrt(0.8)}, {-std::sqrt(0.1), std::sqrt(0.1)}};
  CHECK(ipr(phased) == doctest::Approx(0.68).epsilon(1e-14));
  const std::vector<double> bad{1, 1};
  CHECK_THROWS_AS(ipr(bad), DomainError);
}

TEST_CASE("ipr distribution limits") {
  Eigen::MatrixXd h(2, 2);
  h << 0, 1, 1, 0;
  const auto pair = ipr_distribution(decompose(HamiltonianMatrix{h, {0, 1}, 0}), cube(3));
  CHECK(pair.values[0] == doctest::Approx(0.5));
  CHECK(pair.values[1] == doctest::Approx(0.5));
  CHECK(pair.i_d == 0.5);

  const Eigen::MatrixXd diag = Eigen::Vector3d(1, 2, 3).asDiagonal();
  const auto loc = ipr_distribution(decompose(HamiltonianMatrix{diag, {0, 1, 2}, 0}), cube(3));
  for (double v : loc.values) CHECK(v == 1.0);
  CHECK(loc.min_ratio() == doctest::Approx(3.0));

  const LatticeSpec strong = cube(5, 0.5, 1e6);
  const auto far = ipr_distribution(decompose(build(strong, sample_realization(strong, 2))), strong);
  for (double v : far.values) CHECK(v > 0.99);

  const LatticeSpec clean = cube(5, 1.0, 0.0);
  const auto band = ipr_distribution(decompose(build(clean, sample_realization(clean, 3))), clean);
  CHECK(band.i_d == 1.0 / 125);
  for (double v : band.values) {
    CHECK(v >= band.i_d * (1 - 1e-12));
    CHECK(v <= 30 * band.i_d);
  }
  CHECK(band.i_min == *std::min_element(band.values.begin(), band.values.end()));
}

TEST_CASE("shell samples, hand cases") {
  const std::vector<Coord> sites{{0, 0, 0}, {1, 0, 0}, {3, 0, 0}};
  const std::vector<double> delta{0, 1, 0};
  const auto d = shell_log_amplitudes(delta, sites);
  REQUIRE(d.shells.size() == 1);
  REQUIRE(d.count(0) == 1);
  CHECK(d.shells.at(0)[0].log_amplitude == 0.0);

  const std::vector<Coord> two{{0, 0, 0}, {1, 0, 0}};
  const std::vector<double> half{0.5, 0.5};
  const auto h = shell_log_amplitudes(half, two);
  REQUIRE(h.count(2) == 1);
  CHECK(h.shells.at(2)[0].radius == 1.0);
  CHECK(h.shells.at(2)[0].log_amplitude == doctest::Approx(0.5 * std::log(0.5)));
  CHECK(h.mean_radius(2) == 1.0);

  const std::vector<double> tiny{1.0, 1e-320};
  CHECK(shell_log_amplitudes(tiny, two).count(2) == 0);
  CHECK(shell_log_amplitudes(half, two, 0.5, 0.5).count(2) == 0);
}

TEST_CASE("shell means follow an exponential profile") {
  const double lambda0 = 1.7;
  const auto sites = all_sites(15);
  const Coord peak{7, 7, 7};
  std::vector<double> rho(sites.size());
  double total = 0;
  for (std::size_t i = 0; i < sites.size(); ++i)
    total += (rho[i] = std::exp(-2 * pair_distance(sites[i], peak) / lambda0));
  for (double& v : rho) v /= total;
  const auto pool = shell_log_amplitudes(rho, sites);

  double sr = 0, sm = 0, srr = 0, srm = 0, n = 0;
  for (const auto& [k, samples] : pool.shells) {
    double mean = 0;
    for (const auto& s : samples) mean += s.log_amplitude;
    mean /= static_cast<double>(samples.size());
    const double r = pool.mean_radius(k);
    sr += r;
    sm += mean;
    srr += r * r;
    srm += r * mean;
    n += 1;
  }
  const double slope = (n * srm - sr * sm) / (n * srr - sr * sr);
  CHECK(slope == doctest::Approx(-1 / lambda0).epsilon(0.02));
}

TEST_CASE("shell pools merge associatively") {
  const auto a = lognormal_pool(2, 4, 10, 1), b = lognormal_pool(2, 4, 10, 2),
             c = lognormal_pool(2, 4, 10, 3);
  ShellSamples left = a, right = b, bc = b;
  left.merge(b);
  left.merge(c);
  bc.merge(c);
  right = a;
  right.merge(bc);
  CHECK(left == right);
  CHECK(left.count(4) == 30);

  ShellSamples empty;
  empty.shell_width = 1.0;
  empty.merge(a);
  CHECK(empty == a);
  ShellSamples other;
  other.shell_width = 1.0;
  other.shells[1].push_back({0.7, -1});
  CHECK_THROWS_AS(left.merge(other), DomainError);
}

TEST_CASE("collapse fit recovers the generating parameters") {
  const auto pool = lognormal_pool(2.0, 4.0, 20000, 11);
  const auto fit = lognormal_collapse_fit(pool);
  INFO("lambda = " << fit.loc_length << ", sigma = " << fit.sigma << ", R2 = " << fit.goodness);
  CHECK(fit.loc_length == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit.sigma == doctest::Approx(4.0).epsilon(0.05));
  CHECK(fit.shell_indices == std::vector<int>{2, 4, 6, 8, 10});
  CHECK(fit.shells_used.size() == 5);
  CHECK(fit.goodness > 0.9);
  CHECK(fit.goodness <= 1.0);
}

TEST_CASE("collapse fit is self-consistent") {
  const auto first = lognormal_collapse_fit(lognormal_pool(0.8, 1.5, 20000, 12));
  const auto again =
      lognormal_collapse_fit(lognormal_pool(first.loc_length, first.sigma, 20000, 13));
  CHECK(again.loc_length == doctest::Approx(first.loc_length).epsilon(0.05));
  CHECK(again.sigma == doctest::Approx(first.sigma).epsilon(0.05));
}

TEST_CASE("identical Gaussian shells collapse perfectly") {
  const auto pool = lognormal_pool(3.0, 2.0, 20000, 14, true);
  const auto fit = lognormal_collapse_fit(pool);
  INFO("R2 = " << fit.goodness);
  CHECK(fit.goodness >= 0.99);
  const std::vector<int> shells{2, 4, 6};
  const auto hists = scaled_histograms(pool, shells, fit.loc_length, fit.sigma);
  REQUIRE(hists.size() == 3);
  for (const auto& h : hists) {
    double area = 0;
    const double width = h.x_center.size() > 1 ? h.x_center[1] - h.x_center[0] : 1.0;
    for (double v : h.density) area += v * width;
    CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("collapse fit preconditions") {
  auto pool = lognormal_pool(2.0, 4.0, 150, 15);
  const std::vector<int> two{2, 4};
  CHECK_THROWS_AS(lognormal_collapse_fit(pool, two), DomainError);
  const std::vector<int> with_center{0, 2, 4};
  pool.shells[0] = std::vector<ShellSample>(200, ShellSample{0.0, 0.0});
  CHECK_THROWS_AS(lognormal_collapse_fit(pool, with_center), DomainError);
  CHECK_THROWS_AS(lognormal_collapse_fit(lognormal_pool(2.0, 4.0, 50, 16)), DomainError);

  ShellSamples growing;
  for (int k : {2, 4, 6})
    for (int i = 0; i < 200; ++i) growing.shells[k].push_back({0.5 * k + 0.001 * i, 0.1 * k});
  CHECK_THROWS_AS(lognormal_collapse_fit(growing), NumericError);
}

}  // TEST_SUITE

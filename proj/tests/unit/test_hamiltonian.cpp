#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "lrloc/errors.hpp"
#include "lrloc/hamiltonian.hpp"
#include "lrloc/reference.hpp"
#include "lrloc/rng.hpp"

using namespace lrloc;

namespace {

LatticeSpec cube(int n, double p, double w) {
  LatticeSpec s;
  s.n_per_dim = n;
  s.occupation = p;
  s.disorder_width = w;
  return s;
}

DisorderRealization pair(const LatticeSpec& s, SiteIndex a, SiteIndex b, double wa, double wb) {
  DisorderRealization r;
  r.occupied.assign(static_cast<std::size_t>(s.site_count()), false);
  r.occupied[static_cast<std::size_t>(a)] = r.occupied[static_cast<std::size_t>(b)] = true;
  r.sites = {a, b};
  r.onsite_energy = {wa, wb};
  return r;
}

// Number of eigenvalues of A below sigma, from the signs of the LDL^T pivots
// of A - sigma I (Sylvester's law of inertia), in extended precision.
int count_below(const Eigen::MatrixXd& a, long double sigma) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<std::vector<long double>> m(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                (i == j ? sigma : 0.0L);
  int negative = 0;
  for (std::size_t k = 0; k < n; ++k) {
    long double d = m[k][k];
    if (d == 0) d = 1e-30L;
    if (d < 0) ++negative;
    for (std::size_t i = k + 1; i < n; ++i) {
      const long double l = m[i][k] / d;
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] -= l * m[k][j];
    }
  }
  return negative;
}

std::vector<double> bisection_eigenvalues(const Eigen::MatrixXd& a) {
  long double bound = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) bound = std::max<long double>(bound, a.row(i).cwiseAbs().sum());
  std::vector<double> out;
  for (int k = 0; k < a.rows(); ++k) {
    long double lo = -bound - 1, hi = bound + 1;
    for (int it = 0; it < 200 && hi - lo > 1e-16L; ++it) {
      const long double mid = (lo + hi) / 2;
      if (count_below(a, mid) > k) hi = mid;
      else lo = mid;
    }
    out.push_back(static_cast<double>((lo + hi) / 2));
  }
  return out;
}

}  // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("nearest-neighbour pair") {
  const LatticeSpec s = cube(3, 1.0, 0.0);
  const auto h = build(s, pair(s, 0, 1, 0.0, 0.0));
  REQUIRE(h.dimension() == 2);
  CHECK(h.entries(0, 1) == 1.0);
  CHECK(h.entries(1, 0) == 1.0);
  CHECK(h.entries(0, 0) == 0.0);
  const auto d = decompose(h);
  CHECK(d.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dipolar decay at distance 2") {
  const LatticeSpec s = cube(3, 1.0, 0.0);
  const auto h = build(s, pair(s, 0, 2, 0.0, 0.0));
  CHECK(h.entries(0, 1) == 0.125);
}

TEST_CASE("amplitude and exponent enter as t / r^alpha") {
  LatticeSpec s = cube(3, 1.0, 0.0);
  s.alpha = 2.0;
  s.nn_amplitude = 3.0;
  const auto h = build(s, pair(s, 0, 26, 0.0, 0.0));  // (0,0,0)-(2,2,2), r^2 = 12
  CHECK(h.entries(0, 1) == doctest::Approx(3.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("one by one and disconnected") {
  Eigen::MatrixXd one(1, 1);
  one(0, 0) = 2.5;
  const auto d1 = decompose(HamiltonianMatrix{one, {0}, 0});
  CHECK(d1.eigenvalues(0) == 2.5);
  CHECK(std::abs(d1.eigenvectors(0, 0)) == 1.0);

  Eigen::MatrixXd diag = Eigen::Vector4d(3.0, -1.0, 0.5, 2.0).asDiagonal();
  const auto d = decompose(HamiltonianMatrix{diag, {0, 1, 2, 3}, 0});
  CHECK(d.eigenvalues(0) == -1.0);
  CHECK(d.eigenvalues(1) == 0.5);
  CHECK(d.eigenvalues(2) == 2.0);
  CHECK(d.eigenvalues(3) == 3.0);
}

TEST_CASE("empty Hamiltonian rejected") {
  CHECK_THROWS_AS(decompose(HamiltonianMatrix{}), DomainError);
}

TEST_CASE("structure of built matrices") {
  const LatticeSpec s = cube(5, 0.4, 9.0);
  const auto real = sample_realization(s, 5);
  const auto h = build(s, real);
  REQUIRE(h.dimension() == static_cast<Eigen::Index>(real.occupied_count()));
  CHECK(h.site_map == real.sites);
  CHECK(h.entries == h.entries.transpose());
  for (Eigen::Index i = 0; i < h.dimension(); ++i) {
    CHECK(h.entries(i, i) == real.onsite_energy[static_cast<std::size_t>(i)]);
    const Coord ci = site_coordinates(s, real.sites[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = pair_distance(ci, site_coordinates(s, real.sites[static_cast<std::size_t>(j)]));
      CHECK(h.entries(i, j) == doctest::Approx(1.0 / (r * r * r)).epsilon(1e-15));
    }
  }
  const auto ref = reference::build(s, real);
  CHECK((h.entries - ref.entries).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("decomposition invariants") {
  const LatticeSpec s = cube(7, 0.5, 20.0);
  const auto h = build(s, sample_realization(s, 17));
  const auto d = decompose(h);
  const auto m = d.dimension();
  CHECK(std::is_sorted(d.eigenvalues.begin(), d.eigenvalues.end()));
  const Eigen::MatrixXd gram = d.eigenvectors.transpose() * d.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10);
  const Eigen::MatrixXd rebuilt =
      d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.transpose();
  CHECK((rebuilt - h.entries).cwiseAbs().maxCoeff() <= 1e-8 * h.entries.cwiseAbs().maxCoeff());
  CHECK(d.eigenvalues.sum() == doctest::Approx(h.entries.trace()).epsilon(1e-8));
  CHECK(d.site_map == h.site_map);
}

TEST_CASE("six-site spectra match inertia bisection") {
  const LatticeSpec s = cube(3, 6.0 / 27.0, 10.0);
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto real = sample_realization(s, rng::seed_for(606, k));
    REQUIRE(real.occupied_count() == 6);
    const auto h = build(s, real);
    const auto d = decompose(h);
    const auto oracle = bisection_eigenvalues(h.entries);
    double trace = 0;
    for (double e : real.onsite_energy) trace += e;
    for (int i = 0; i < 6; ++i)
      CHECK(std::abs(d.eigenvalues(i) - oracle[static_cast<std::size_t>(i)]) <= 1e-8);
    CHECK(std::abs(d.eigenvalues.sum() - trace) <= 1e-8 * std::max(1.0, std::abs(trace)));
  }
}

TEST_CASE("eigenvalues-only path agrees with the full solver") {
  const LatticeSpec s = cube(7, 0.6, 5.0);
  const auto h = build(s, sample_realization(s, 8));
  const auto full = decompose(h).eigenvalues;
  HamiltonianMatrix copy = h;
  const Eigen::VectorXd only = spectrum_in_place(std::move(copy));
  CHECK((full - only).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("heisenberg time") {
  CHECK(heisenberg_time(Eigen::Vector2d(0, 2 * std::numbers::pi)) == doctest::Approx(1.0));
  CHECK(heisenberg_time(Eigen::Vector4d(0, 1, 2, 3)) == doctest::Approx(2 * std::numbers::pi));
  CHECK_THROWS_AS(heisenberg_time(Eigen::Vector2d(1.5, 1.5)), DomainError);
  CHECK_THROWS_AS(heisenberg_time(Eigen::VectorXd::Constant(1, 0.0)), DomainError);
}

TEST_CASE("checkpoint round trip") {
  const LatticeSpec s = cube(5, 0.5, 3.0);
  const auto real = sample_realization(s, 21);
  const auto d = decompose(build(s, real));
  const CheckpointHeader header{5, 0.5, 3.0, 21, static_cast<std::uint64_t>(d.dimension())};
  const auto path = std::filesystem::temp_directory_path() / "lrloc_checkpoint_test.bin";
  write_checkpoint(path, header, d);
  CHECK(std::filesystem::file_size(path) ==
        8 + 4 + 4 + 8 + 8 + 8 + 8 + 8 * (d.dimension() + d.dimension() * d.dimension()));
  CheckpointHeader back;
  const auto e = read_checkpoint(path, &back);
  CHECK(back == header);
  CHECK(e.eigenvalues == d.eigenvalues);
  CHECK(e.eigenvectors == d.eigenvectors);

  std::filesystem::resize_file(path, 40);
  CHECK_THROWS(read_checkpoint(path));
  std::filesystem::remove(path);
}

}  // TEST_SUITE

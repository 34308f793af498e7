#include "lrloc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lrloc/errors.hpp"
#include "lrloc/rng.hpp"

namespace lrloc {

void LatticeSpec::validate() const {
  if (n_per_dim < 2) throw DomainError("n_per_dim must be >= 2");
  if (!(alpha > 0)) throw DomainError("alpha must be > 0");
  if (!(nn_amplitude > 0)) throw DomainError("nn_amplitude must be > 0");
  if (!(occupation >= 0 && occupation <= 1)) throw DomainError("occupation must lie in [0, 1]");
  if (!(disorder_width >= 0) || !std::isfinite(disorder_width))
    throw DomainError("disorder_width must be finite and >= 0");
}

SiteIndex LatticeSpec::site_count() const {
  const SiteIndex n = n_per_dim;
  return n * n * n;
}

SiteIndex LatticeSpec::occupied_target() const {
  return std::llround(occupation * static_cast<double>(site_count()));
}

Coord LatticeSpec::center() const {
  if (!has_center())
    throw DomainError("lattice with even N = " + std::to_string(n_per_dim) + " has no center site");
  const int h = (n_per_dim - 1) / 2;
  return {h, h, h};
}

SiteIndex LatticeSpec::center_index() const { return linear_index(*this, center()); }

Coord site_coordinates(const LatticeSpec& spec, SiteIndex index) {
  if (index < 0 || index >= spec.site_count())
    throw DomainError("site index " + std::to_string(index) + " out of range");
  const SiteIndex n = spec.n_per_dim;
  return {static_cast<int>(index % n), static_cast<int>((index / n) % n),
          static_cast<int>(index / (n * n))};
}

SiteIndex linear_index(const LatticeSpec& spec, Coord c) {
  const SiteIndex n = spec.n_per_dim;
  if (c.x < 0 || c.y < 0 || c.z < 0 || c.x >= n || c.y >= n || c.z >= n)
    throw DomainError("coordinate outside the lattice");
  return c.x + n * (c.y + n * c.z);
}

std::int64_t squared_distance(Coord a, Coord b) {
  const std::int64_t dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

double pair_distance(Coord a, Coord b) {
  return std::sqrt(static_cast<double>(squared_distance(a, b)));
}

std::size_t DisorderRealization::row_of(SiteIndex site) const {
  const auto it = std::lower_bound(sites.begin(), sites.end(), site);
  if (it == sites.end() || *it != site)
    throw DomainError("site " + std::to_string(site) + " is not occupied");
  return static_cast<std::size_t>(it - sites.begin());
}

DisorderRealization sample_realization(const LatticeSpec& spec, std::uint64_t seed) {
  spec.validate();
  const SiteIndex total = spec.site_count();
  const SiteIndex m = spec.occupied_target();
  if (m == 0) throw DomainError("occupation rounds to zero occupied sites");

  DisorderRealization real;
  real.seed = seed;
  const bool forced = spec.has_center();
  real.center_index = forced ? spec.center_index() : -1;

  // Partial Fisher-Yates over the non-center sites picks the remaining ones.
  std::vector<SiteIndex> others;
  others.reserve(static_cast<std::size_t>(total));
  for (SiteIndex s = 0; s < total; ++s)
    if (s != real.center_index) others.push_back(s);

  rng::Stream stream(seed);
  const auto pool = static_cast<std::uint64_t>(others.size());
  const auto picks = static_cast<std::uint64_t>(forced ? m - 1 : m);
  for (std::uint64_t i = 0; i < picks; ++i) {
    const std::uint64_t j = i + stream.below(pool - i);
    std::swap(others[i], others[j]);
  }

  real.sites.assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(picks));
  if (forced) real.sites.push_back(real.center_index);
  std::sort(real.sites.begin(), real.sites.end());

  real.occupied.assign(static_cast<std::size_t>(total), false);
  for (SiteIndex s : real.sites) real.occupied[static_cast<std::size_t>(s)] = true;

  const double w = spec.disorder_width;
  real.onsite_energy.resize(real.sites.size());
  for (double& e : real.onsite_energy) {
    const double u = stream.uniform01();
    e = (w == 0.0) ? 0.0 : w * (u - 0.5);
  }
  return real;
}

std::vector<Coord> occupied_coordinates(const LatticeSpec& spec,
                                        const DisorderRealization& real) {
  std::vector<Coord> out;
  out.reserve(real.sites.size());
  for (SiteIndex s : real.sites) out.push_back(site_coordinates(spec, s));
  return out;
}

}  // namespace lrloc

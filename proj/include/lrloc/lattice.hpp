#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lrloc {

using SiteIndex = std::int64_t;

enum class Boundary { open };

/// Integer lattice coordinates in units of the lattice constant.
struct Coord {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

/// Geometry and model parameters of a diluted, disordered cubic lattice.
/// Distances are in lattice constants, energies in units of the
/// nearest-neighbour hopping.
struct LatticeSpec {
  int n_per_dim = 0;            // N >= 2; odd when a center site is needed
  double alpha = 3.0;           // hopping exponent
  double nn_amplitude = 1.0;    // nearest-neighbour hopping t~
  double occupation = 1.0;      // p
  double disorder_width = 0.0;  // w
  Boundary boundary = Boundary::open;

  /// Throws DomainError if any invariant is violated.
  void validate() const;

  SiteIndex site_count() const;
  /// round(p N^3), half away from zero.
  SiteIndex occupied_target() const;
  /// Odd N has a unique center ((N-1)/2, ...); even N has none.
  bool has_center() const { return n_per_dim % 2 == 1; }
  /// Throws DomainError for even N.
  Coord center() const;
  SiteIndex center_index() const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

/// Row-major map index = x + N y + N^2 z.
Coord site_coordinates(const LatticeSpec& spec, SiteIndex index);
SiteIndex linear_index(const LatticeSpec& spec, Coord c);

/// Euclidean distance, no periodic images.
double pair_distance(Coord a, Coord b);
std::int64_t squared_distance(Coord a, Coord b);

/// One sample of the site dilution and on-site energies.
struct DisorderRealization {
  std::uint64_t seed = 0;
  std::vector<bool> occupied;          // per lattice site
  std::vector<SiteIndex> sites;        // occupied sites, ascending
  std::vector<double> onsite_energy;   // w_i, aligned with `sites`
  SiteIndex center_index = -1;  // -1 for even N

  std::size_t occupied_count() const { return sites.size(); }
  /// Row of `site` among the occupied sites; throws DomainError if vacant.
  std::size_t row_of(SiteIndex site) const;
};

/// Exactly round(p N^3) occupied sites chosen uniformly among subsets that
/// contain the center (odd N; any subset for even N); energies iid uniform on
/// [-w/2, w/2]. Throws DomainError when the count rounds to zero.
DisorderRealization sample_realization(const LatticeSpec& spec, std::uint64_t seed);

/// Coordinates of every occupied site, in row order.
std::vector<Coord> occupied_coordinates(const LatticeSpec& spec,
                                        const DisorderRealization& real);

}  // namespace lrloc

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lrloc/lattice.hpp"

namespace lrloc {

inline constexpr std::string_view kEigensolverId = "Eigen::SelfAdjointEigenSolver (tridiagonal QL)";

/// Dense single-particle Hamiltonian on the occupied sites.
struct HamiltonianMatrix {
  Eigen::MatrixXd entries;          // symmetric, M x M
  std::vector<SiteIndex> site_map;  // row -> lattice site
  std::uint64_t seed = 0;           // realization seed, for triage

  Eigen::Index dimension() const { return entries.rows(); }
};

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column k is the k-th eigenstate
  std::vector<SiteIndex> site_map;

  Eigen::Index dimension() const { return eigenvalues.size(); }
};

/// Diagonal w_i, off-diagonal t~ / r^alpha between every pair of occupied sites.
HamiltonianMatrix build(const LatticeSpec& spec, const DisorderRealization& real);

/// Full eigensystem, eigenvalues ascending. Throws NumericError carrying the
/// realization seed if the solver fails.
SpectralDecomposition decompose(const HamiltonianMatrix& h);

/// Eigenvalues only. Tridiagonalizes `h` in place, so the caller's matrix is
/// consumed; used for large lattices where a second M x M copy does not fit.
Eigen::VectorXd spectrum_in_place(HamiltonianMatrix&& h);

/// 2 pi over the mean level spacing (E_max - E_min) / (M - 1).
double heisenberg_time(const Eigen::VectorXd& eigenvalues);
inline double heisenberg_time(const SpectralDecomposition& d) {
  return heisenberg_time(d.eigenvalues);
}

// Binary checkpoint of one decomposition.
//   magic "LRLOCEIG" | u32 version | i32 N | f64 p | f64 w | u64 seed | u64 M
//   | M eigenvalues | M*M eigenvector entries, column-major
// All fields little-endian.
struct CheckpointHeader {
  std::int32_t n_per_dim = 0;
  double occupation = 0;
  double disorder_width = 0;
  std::uint64_t seed = 0;
  std::uint64_t dimension = 0;
  friend bool operator==(const CheckpointHeader&, const CheckpointHeader&) = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const CheckpointHeader& header,
                      const SpectralDecomposition& d);
/// The site map is not stored; the returned decomposition has it empty.
SpectralDecomposition read_checkpoint(const std::filesystem::path& path,
                                      CheckpointHeader* header = nullptr);

}  // namespace lrloc

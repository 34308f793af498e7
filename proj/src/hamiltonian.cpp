#include "lrloc/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "lrloc/errors.hpp"

namespace lrloc {

namespace {

double hopping(const LatticeSpec& spec, std::int64_t r2) {
  // gamma = t~ a^alpha with a = 1
  if (spec.alpha == 3.0) {
    const double r = std::sqrt(static_cast<double>(r2));
    return spec.nn_amplitude / (static_cast<double>(r2) * r);
  }
  return spec.nn_amplitude / std::pow(static_cast<double>(r2), 0.5 * spec.alpha);
}

}  // namespace

HamiltonianMatrix build(const LatticeSpec& spec, const DisorderRealization& real) {
  const auto m = static_cast<Eigen::Index>(real.sites.size());
  if (m == 0) throw DomainError("empty realization");
  if (real.onsite_energy.size() != real.sites.size())
    throw DomainError("realization energies do not match its sites");

  const std::vector<Coord> coords = occupied_coordinates(spec, real);

  HamiltonianMatrix h;
  h.site_map = real.sites;
  h.seed = real.seed;
  h.entries.resize(m, m);
  auto& a = h.entries;

  // Column j is filled from row 0..j; each entry written once.
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index j = 0; j < m; ++j) {
    a(j, j) = real.onsite_energy[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < j; ++i) {
      const double t = hopping(spec, squared_distance(coords[static_cast<std::size_t>(i)],
                                                      coords[static_cast<std::size_t>(j)]));
      a(i, j) = t;
      a(j, i) = t;
    }
  }
  return h;
}

SpectralDecomposition decompose(const HamiltonianMatrix& h) {
  if (h.dimension() == 0) throw DomainError("empty Hamiltonian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.entries, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigensolver failed for realization seed " + std::to_string(h.seed),
                       h.seed);
  SpectralDecomposition d;
  d.eigenvalues = solver.eigenvalues();
  d.eigenvectors = solver.eigenvectors();
  d.site_map = h.site_map;
  return d;
}

Eigen::VectorXd spectrum_in_place(HamiltonianMatrix&& h) {
  const Eigen::Index m = h.dimension();
  if (m == 0) throw DomainError("empty Hamiltonian");
  Eigen::VectorXd diag(m);
  Eigen::VectorXd subdiag(m > 1 ? m - 1 : 0);
  Eigen::VectorXd hcoeffs(m > 1 ? m - 1 : 0);
  if (m > 1) {
    Eigen::internal::tridiagonalization_inplace(h.entries, diag, subdiag, hcoeffs, false);
  } else {
    diag(0) = h.entries(0, 0);
  }
  h.entries.resize(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("tridiagonal eigensolver failed for realization seed " +
                           std::to_string(h.seed),
                       h.seed);
  return solver.eigenvalues();
}

double heisenberg_time(const Eigen::VectorXd& eigenvalues) {
  const Eigen::Index m = eigenvalues.size();
  if (m < 2) throw DomainError("Heisenberg time needs at least two levels");
  const double width = eigenvalues.maxCoeff() - eigenvalues.minCoeff();
  if (!(width > 0)) throw DomainError("spectrum has zero width");
  const double spacing = width / static_cast<double>(m - 1);
  return 2.0 * std::numbers::pi / spacing;
}

// --- checkpoint I/O ---------------------------------------------------------

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'R', 'L', 'O', 'C', 'E', 'I', 'G'};

template <typename T>
void put_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!is) throw DomainError("truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const CheckpointHeader& header,
                      const SpectralDecomposition& d) {
  if (static_cast<std::uint64_t>(d.dimension()) != header.dimension)
    throw DomainError("checkpoint header dimension does not match decomposition");
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DomainError("cannot open checkpoint " + tmp.string());
    os.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(os, kCheckpointVersion);
    put_le<std::int32_t>(os, header.n_per_dim);
    put_le<double>(os, header.occupation);
    put_le<double>(os, header.disorder_width);
    put_le<std::uint64_t>(os, header.seed);
    put_le<std::uint64_t>(os, header.dimension);
    for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) put_le<double>(os, d.eigenvalues(k));
    const double* v = d.eigenvectors.data();  // Eigen default storage is column-major
    for (Eigen::Index k = 0; k < d.eigenvectors.size(); ++k) put_le<double>(os, v[k]);
    if (!os) throw DomainError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SpectralDecomposition read_checkpoint(const std::filesystem::path& path,
                                      CheckpointHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw DomainError("not an lrloc checkpoint: " + path.string());
  const auto version = get_le<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw DomainError("unsupported checkpoint version " + std::to_string(version));
  CheckpointHeader h;
  h.n_per_dim = get_le<std::int32_t>(is);
  h.occupation = get_le<double>(is);
  h.disorder_width = get_le<double>(is);
  h.seed = get_le<std::uint64_t>(is);
  h.dimension = get_le<std::uint64_t>(is);
  const auto m = static_cast<Eigen::Index>(h.dimension);
  SpectralDecomposition d;
  d.eigenvalues.resize(m);
  d.eigenvectors.resize(m, m);
  for (Eigen::Index k = 0; k < m; ++k) d.eigenvalues(k) = get_le<double>(is);
  double* v = d.eigenvectors.data();
  for (Eigen::Index k = 0; k < m * m; ++k) v[k] = get_le<double>(is);
  if (header) *header = h;
  return d;
}

}  // namespace lrloc

#include "spinshell/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "spinshell/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary dumps assume a little-endian host");

namespace spinshell {
namespace {

double sz(std::uint32_t bits, int site) {
  return ((bits >> site) & 1u) ? 0.5 : -0.5;
}

template <typename T>
void write_raw(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DomainError("truncated sector matrix dump");
  return value;
}

}  // namespace

SectorMatrix build_sector_hamiltonian(SectorBasis basis,
                                      CouplingParams params) {
  if (basis.size() == 0) {
    throw DomainError("cannot assemble a Hamiltonian over an empty basis");
  }
  if (!std::isfinite(params.delta2)) {
    throw DomainError("delta2 must be finite");
  }

  const int n = basis.geometry().sites;
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

  for (Eigen::Index row = 0; row < dim; ++row) {
    const std::uint32_t c = basis.configs()[static_cast<std::size_t>(row)].bits;

    double diag = 0.0;
    for (int i = 0; i + 1 < n; ++i) diag += sz(c, i) * sz(c, i + 1);
    for (int i = 0; i + 2 < n; ++i) {
      diag += params.delta2 * sz(c, i) * sz(c, i + 2);
    }
    h(row, row) = diag;

    // Flip-flop term: 1/2 between configs differing by one NN exchange.
    // Both triangles are written by the row loop, so symmetry is exact.
    for (int i = 0; i + 1 < n; ++i) {
      const bool bi = (c >> i) & 1u;
      const bool bj = (c >> (i + 1)) & 1u;
      if (bi != bj) {
        const std::uint32_t flipped = c ^ (std::uint32_t{3} << i);
        const auto col = static_cast<Eigen::Index>(
            basis.rank_of(SpinConfig{flipped}));
        h(row, col) = 0.5;
      }
    }
  }

  return SectorMatrix{std::move(basis), params, std::move(h)};
}

void dump_sector_matrix(const SectorMatrix& matrix, std::ostream& out) {
  const auto dim = static_cast<std::int64_t>(matrix.basis.size());
  write_raw<std::int32_t>(out, matrix.basis.geometry().sites);
  write_raw<std::int32_t>(out, matrix.basis.n_up());
  write_raw<double>(out, matrix.params.delta2);
  write_raw<std::int64_t>(out, dim);
  for (std::int64_t r = 0; r < dim; ++r) {
    for (std::int64_t c = 0; c < dim; ++c) {
      write_raw<double>(out, matrix.entries(r, c));
    }
  }
  if (!out) throw DomainError("failed to write sector matrix dump");
}

SectorMatrix load_sector_matrix(std::istream& in, int left_sites) {
  const auto sites = read_raw<std::int32_t>(in);
  const auto n_up = read_raw<std::int32_t>(in);
  const double delta2 = read_raw<double>(in);
  const auto dim = read_raw<std::int64_t>(in);

  SectorBasis basis = enumerate_sector(ChainGeometry(sites, left_sites), n_up);
  if (static_cast<std::int64_t>(basis.size()) != dim) {
    throw DomainError("sector matrix dump dimension " + std::to_string(dim) +
                      " does not match binomial(" + std::to_string(sites) +
                      ", " + std::to_string(n_up) + ")");
  }

  Eigen::MatrixXd h(dim, dim);
  for (std::int64_t r = 0; r < dim; ++r) {
    for (std::int64_t c = 0; c < dim; ++c) {
      h(r, c) = read_raw<double>(in);
    }
  }
  return SectorMatrix{std::move(basis), CouplingParams{delta2}, std::move(h)};
}

}  // namespace spinshell

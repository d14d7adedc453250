#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "spinshell/basis.hpp"

namespace spinshell {

/// Couplings of the open-chain Hamiltonian
///   H = sum_i S_i . S_{i+1} + delta2 * sum_i Sz_i Sz_{i+2}
/// in units of the nearest-neighbour exchange (J = 1, hbar = 1).
/// delta2 = 0 is the integrable Heisenberg point; delta2 > 0 breaks
/// integrability. Negative values are accepted.
struct CouplingParams {
  double delta2 = 0.0;
};

/// Dense symmetric Hamiltonian of one magnetization sector. Row and column
/// order equals the basis configuration order; assembled symmetrically, not
/// symmetrized after the fact.
struct SectorMatrix {
  SectorBasis basis;
  CouplingParams params;
  Eigen::MatrixXd entries;
};

SectorMatrix build_sector_hamiltonian(SectorBasis basis, CouplingParams params);

/// Binary dump: int32 N, int32 n_up, float64 delta2, int64 dimension, then
/// dimension^2 float64 entries in row-major order. Little-endian throughout.
void dump_sector_matrix(const SectorMatrix& matrix, std::ostream& out);

/// Reads the dump format back. The bipartition is not part of the format, so
/// the caller supplies the left block size for the reconstructed basis.
SectorMatrix load_sector_matrix(std::istream& in, int left_sites);

}  // namespace spinshell

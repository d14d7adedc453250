#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "spinshell/hamiltonian.hpp"

namespace spinshell {

/// Full eigensystem of one sector Hamiltonian: ascending eigenvalues with
/// orthonormal eigenvector columns in matching order.
struct SpectralDecomposition {
  SectorBasis basis;
  CouplingParams params;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

using SectorDecompositions = std::vector<SpectralDecomposition>;

/// Dense symmetric eigensolve (LAPACK dsyevd) with built-in verification:
/// max |V^T V - I| <= 1e-10 and every residual ||H v - lambda v|| <= tol
/// times ||H||_F. Failures raise NumericalError tagged with the sector.
SpectralDecomposition diagonalize(SectorMatrix matrix, double tol = 1e-8);

/// Builds and diagonalizes every magnetization sector of an open chain.
SectorDecompositions diagonalize_all_sectors(const ChainGeometry& geometry,
                                             CouplingParams params,
                                             double tol = 1e-8,
                                             int threads = 0);

const SpectralDecomposition& find_sector(const SectorDecompositions& decomps,
                                         int n_up);

/// One eigenstate of the merged spectrum, addressed by sector and position.
struct EigenstateRef {
  double energy = 0.0;
  int n_up = 0;
  int index = 0;  // position within the sector's ascending eigenvalues
};

/// All sector spectra merged into one energy-sorted list. Ties are broken by
/// (n_up, index) so the order is reproducible.
struct GlobalSpectrum {
  int sites = 0;
  CouplingParams params;
  std::vector<EigenstateRef> entries;

  std::size_t size() const { return entries.size(); }
};

GlobalSpectrum merge_spectra(const SectorDecompositions& decomps);

/// Equal-count density-of-states window over a contiguous run of the merged
/// spectrum. `first`/`last` are inclusive indices into GlobalSpectrum.
struct DosWindow {
  double center = 0.0;
  double width = 0.0;
  std::size_t count = 0;
  double dos = 0.0;  // count / width, units 1/energy
  std::size_t first = 0;
  std::size_t last = 0;
};

struct DosEstimate {
  std::vector<DosWindow> windows;
  std::size_t trimmed_per_side = 0;
  std::size_t retained = 0;

  /// Index of the window with maximal dos (first one on ties).
  std::size_t peak_window() const;
};

/// Discards the lowest and highest edge_trim fraction of states, then splits
/// the remainder into window_count consecutive windows of (near-)equal count.
/// Equal count rather than equal width: every window carries the same
/// statistical weight across the dome-shaped spectrum. When the retained
/// count is not divisible, the leftmost windows take one extra state.
DosEstimate estimate_dos(const GlobalSpectrum& spectrum,
                         std::size_t window_count, double edge_trim);

/// Default window count for a spectrum of `total_states` eigenstates.
std::size_t default_window_count(std::size_t total_states);

}  // namespace spinshell

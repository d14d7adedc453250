#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spinshell/basis.hpp"
#include "spinshell/spectral.hpp"

namespace spinshell {

/// Amplitudes of a normalized pure state arranged as a left_dim x right_dim
/// matrix: entry (a, b) multiplies |a> (x) |b| in the product basis. The
/// reduced density matrix of the left block is psi psi^dagger, but entropies
/// are always computed from singular values of psi, never by forming it.
struct CoefficientMatrix {
  ChainGeometry geometry;
  Eigen::MatrixXcd entries;
};

/// Reshapes a sector state into its coefficient matrix. `geometry` supplies
/// the cut and must agree with the basis on the chain length; entries outside
/// the sector stay zero. The state must be normalized to 1e-10.
CoefficientMatrix coefficient_matrix(const Eigen::VectorXcd& state,
                                     const SectorBasis& basis,
                                     const ChainGeometry& geometry);
CoefficientMatrix coefficient_matrix(const Eigen::VectorXd& state,
                                     const SectorBasis& basis,
                                     const ChainGeometry& geometry);

/// Squared singular values of a bipartite state, descending. Values below
/// 1e-12 are clamped to zero (no renormalization); the clamp only affects the
/// 0 ln 0 limit downstream.
struct SchmidtSpectrum {
  std::vector<double> probabilities;
};

SchmidtSpectrum schmidt_spectrum(const CoefficientMatrix& matrix);

/// Same computation for a bare coefficient matrix (unit Frobenius norm) whose
/// rows and columns label any orthonormal subsystem states, not necessarily
/// full product bases.
SchmidtSpectrum schmidt_probabilities(const Eigen::MatrixXcd& psi);

/// Von Neumann entropy -sum p ln p in nats, with 0 ln 0 := 0.
double vn_entropy(const SchmidtSpectrum& spectrum);

enum class PageMode { exact, asymptotic };

/// Average subsystem entropy of a Haar-random pure state on a d1 x d2
/// product space (Page's result). `exact` evaluates the finite sum
///   sum_{k=d2+1}^{d1 d2} 1/k - (d1-1)/(2 d2)
/// with compensated summation; `asymptotic` returns the leading term ln d1.
/// Swaps the arguments if d1 > d2 (pure-state entropies match either way).
double page_average(std::uint64_t d1, std::uint64_t d2, PageMode mode);

/// Entropy of one sector eigenstate at the given cut. Same singular-value
/// path as schmidt_spectrum, specialized to real amplitudes.
double eigenstate_entropy(const Eigen::VectorXd& state,
                          const SectorBasis& basis,
                          const ChainGeometry& geometry);

struct EigenstateEntropyRow {
  double energy = 0.0;
  int n_up = 0;
  int index = 0;
  double entropy = 0.0;
};

/// Subsystem entropy of every eigenstate in the merged spectrum, in spectrum
/// order. Embarrassingly parallel over states.
std::vector<EigenstateEntropyRow> eigenstate_entropy_sweep(
    const GlobalSpectrum& spectrum, const SectorDecompositions& decomps,
    const ChainGeometry& geometry, int threads = 0);

}  // namespace spinshell

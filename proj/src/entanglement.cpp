#include "spinshell/entanglement.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

#include "spinshell/errors.hpp"
#include "spinshell/numeric.hpp"
#include "spinshell/parallel.hpp"

namespace spinshell {
namespace {

constexpr double kNormTol = 1e-10;
constexpr double kProbabilityClamp = 1e-12;

void check_geometry(const SectorBasis& basis, const ChainGeometry& geometry) {
  if (basis.geometry().sites != geometry.sites) {
    throw DomainError("basis and geometry disagree on the chain length");
  }
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reshape_state(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& state,
    const SectorBasis& basis, const ChainGeometry& geometry) {
  check_geometry(basis, geometry);
  if (static_cast<std::size_t>(state.size()) != basis.size()) {
    throw DomainError("state length does not match the sector dimension");
  }
  if (std::abs(state.norm() - 1.0) > kNormTol) {
    throw DomainError("state must be normalized to within 1e-10");
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> psi =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          static_cast<Eigen::Index>(geometry.left_dim()),
          static_cast<Eigen::Index>(geometry.right_dim()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const BipartiteLabel label = split_config(basis.configs()[r], geometry);
    psi(static_cast<Eigen::Index>(label.left),
        static_cast<Eigen::Index>(label.right)) =
        state(static_cast<Eigen::Index>(r));
  }
  return psi;
}

template <typename Matrix>
std::vector<double> singular_probabilities(const Matrix& psi) {
  // Thin SVD, singular values only. BDC falls back to Jacobi for small
  // blocks internally, so one code path covers every size we meet.
  Eigen::BDCSVD<Matrix> svd(psi);
  const auto& sv = svd.singularValues();
  std::vector<double> probs(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    double p = sv(i) * sv(i);
    if (p < kProbabilityClamp) p = 0.0;
    probs[static_cast<std::size_t>(i)] = p;
  }
  std::sort(probs.begin(), probs.end(), std::greater<>());
  return probs;
}

double entropy_of_probabilities(const std::vector<double>& probs) {
  CompensatedSum sum;
  for (double p : probs) {
    if (p > 0.0) sum.add(-p * std::log(p));
  }
  return std::max(sum.value(), 0.0);
}

}  // namespace

CoefficientMatrix coefficient_matrix(const Eigen::VectorXcd& state,
                                     const SectorBasis& basis,
                                     const ChainGeometry& geometry) {
  return CoefficientMatrix{geometry, reshape_state(state, basis, geometry)};
}

CoefficientMatrix coefficient_matrix(const Eigen::VectorXd& state,
                                     const SectorBasis& basis,
                                     const ChainGeometry& geometry) {
  return CoefficientMatrix{
      geometry,
      reshape_state(state, basis, geometry).cast<std::complex<double>>()};
}

SchmidtSpectrum schmidt_probabilities(const Eigen::MatrixXcd& psi) {
  if (std::abs(psi.norm() - 1.0) > kNormTol) {
    throw DomainError("coefficient matrix must have unit Frobenius norm");
  }
  if (psi.imag().isZero(0.0)) {
    return SchmidtSpectrum{singular_probabilities(Eigen::MatrixXd(psi.real()))};
  }
  return SchmidtSpectrum{singular_probabilities(psi)};
}

SchmidtSpectrum schmidt_spectrum(const CoefficientMatrix& matrix) {
  return schmidt_probabilities(matrix.entries);
}

double vn_entropy(const SchmidtSpectrum& spectrum) {
  for (double p : spectrum.probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError("Schmidt probabilities must be finite and >= 0");
    }
  }
  return entropy_of_probabilities(spectrum.probabilities);
}

double page_average(std::uint64_t d1, std::uint64_t d2, PageMode mode) {
  if (d1 < 1 || d2 < 1) throw DomainError("page_average requires d1, d2 >= 1");
  if (d1 > d2) std::swap(d1, d2);  // S1 = S2 for pure states

  if (mode == PageMode::asymptotic) {
    return std::log(static_cast<double>(d1));
  }

  if (d1 > (std::uint64_t{1} << 26) / d2) {
    throw DomainError("page_average: product d1*d2 exceeds supported range");
  }
  const std::uint64_t product = d1 * d2;
  CompensatedSum sum;
  for (std::uint64_t k = d2 + 1; k <= product; ++k) {
    sum.add(1.0 / static_cast<double>(k));
  }
  sum.add(-static_cast<double>(d1 - 1) / (2.0 * static_cast<double>(d2)));
  return sum.value();
}

double eigenstate_entropy(const Eigen::VectorXd& state,
                          const SectorBasis& basis,
                          const ChainGeometry& geometry) {
  return entropy_of_probabilities(
      singular_probabilities(reshape_state(state, basis, geometry)));
}

std::vector<EigenstateEntropyRow> eigenstate_entropy_sweep(
    const GlobalSpectrum& spectrum, const SectorDecompositions& decomps,
    const ChainGeometry& geometry, int threads) {
  if (spectrum.sites != geometry.sites) {
    throw DomainError("spectrum and geometry disagree on the chain length");
  }
  std::vector<EigenstateEntropyRow> rows(spectrum.size());
  parallel_for(spectrum.size(), threads, [&](std::size_t i) {
    const EigenstateRef& ref = spectrum.entries[i];
    const SpectralDecomposition& d = find_sector(decomps, ref.n_up);
    rows[i] = EigenstateEntropyRow{
        ref.energy, ref.n_up, ref.index,
        eigenstate_entropy(d.eigenvectors.col(ref.index), d.basis, geometry)};
  });
  return rows;
}

}  // namespace spinshell

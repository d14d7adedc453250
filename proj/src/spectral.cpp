#include "spinshell/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

#include "spinshell/errors.hpp"
#include "spinshell/parallel.hpp"

namespace spinshell {
namespace {

// Validation GEMMs run in column panels so peak memory stays at roughly two
// matrices even for the largest sectors.
constexpr Eigen::Index kPanel = 1024;

void validate_decomposition(const Eigen::MatrixXd& h,
                            const Eigen::VectorXd& w,
                            const Eigen::MatrixXd& v, double tol, int n_up) {
  const Eigen::Index dim = h.rows();
  const double h_norm = h.norm();
  const double residual_bound = tol * std::max(h_norm, 1e-300);

  for (Eigen::Index c0 = 0; c0 < dim; c0 += kPanel) {
    const Eigen::Index nc = std::min(kPanel, dim - c0);

    Eigen::MatrixXd gram = v.transpose() * v.middleCols(c0, nc);
    for (Eigen::Index j = 0; j < nc; ++j) gram(c0 + j, j) -= 1.0;
    const double ortho = gram.cwiseAbs().maxCoeff();
    if (!(ortho <= 1e-10)) {
      throw NumericalError(
          "sector n_up=" + std::to_string(n_up) +
              ": eigenvectors not orthonormal (max deviation " +
              std::to_string(ortho) + ")",
          n_up);
    }

    Eigen::MatrixXd resid = h * v.middleCols(c0, nc);
    resid.noalias() -= v.middleCols(c0, nc) *
                       w.segment(c0, nc).asDiagonal();
    const double worst = resid.colwise().norm().maxCoeff();
    if (!(worst <= residual_bound)) {
      throw NumericalError(
          "sector n_up=" + std::to_string(n_up) + ": eigenpair residual " +
              std::to_string(worst) + " exceeds " +
              std::to_string(residual_bound),
          n_up);
    }
  }
}

}  // namespace

SpectralDecomposition diagonalize(SectorMatrix matrix, double tol) {
  const Eigen::Index dim = matrix.entries.rows();
  if (dim == 0 || matrix.entries.cols() != dim) {
    throw DomainError("sector matrix must be square and non-empty");
  }
  if (!matrix.entries.allFinite()) {
    throw DomainError("sector matrix has non-finite entries");
  }
  const double asym =
      (matrix.entries - matrix.entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 0.0) {
    throw DomainError("sector matrix is not symmetric (max asymmetry " +
                      std::to_string(asym) + ")");
  }
  if (!(tol > 0.0)) throw DomainError("diagonalization tolerance must be > 0");

  const int n_up = matrix.basis.n_up();
  Eigen::MatrixXd vectors = matrix.entries;  // dsyevd overwrites in place
  Eigen::VectorXd values(dim);
  const lapack_int info = LAPACKE_dsyevd(
      LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(dim), vectors.data(),
      static_cast<lapack_int>(dim), values.data());
  if (info != 0) {
    throw NumericalError("sector n_up=" + std::to_string(n_up) +
                             ": dsyevd failed with info=" + std::to_string(info),
                         n_up);
  }

  validate_decomposition(matrix.entries, values, vectors, tol, n_up);

  return SpectralDecomposition{std::move(matrix.basis), matrix.params,
                               std::move(values), std::move(vectors)};
}

SectorDecompositions diagonalize_all_sectors(const ChainGeometry& geometry,
                                             CouplingParams params, double tol,
                                             int threads) {
  const auto n_sectors = static_cast<std::size_t>(geometry.sites + 1);
  std::vector<std::optional<SpectralDecomposition>> slots(n_sectors);
  parallel_for(n_sectors, threads, [&](std::size_t n_up) {
    slots[n_up] = diagonalize(
        build_sector_hamiltonian(
            enumerate_sector(geometry, static_cast<int>(n_up)), params),
        tol);
  });

  SectorDecompositions decomps;
  decomps.reserve(n_sectors);
  for (auto& slot : slots) decomps.push_back(std::move(*slot));
  return decomps;
}

const SpectralDecomposition& find_sector(const SectorDecompositions& decomps,
                                         int n_up) {
  for (const auto& d : decomps) {
    if (d.basis.n_up() == n_up) return d;
  }
  throw DomainError("no decomposition for sector n_up=" + std::to_string(n_up));
}

GlobalSpectrum merge_spectra(const SectorDecompositions& decomps) {
  if (decomps.empty()) {
    throw DomainError("merge_spectra needs at least one decomposition");
  }
  const int sites = decomps.front().basis.geometry().sites;
  const double delta2 = decomps.front().params.delta2;
  std::size_t total = 0;
  for (const auto& d : decomps) {
    if (d.basis.geometry().sites != sites || d.params.delta2 != delta2) {
      throw DomainError(
          "cannot merge spectra with mixed chain length or couplings");
    }
    total += d.basis.size();
  }

  GlobalSpectrum spectrum;
  spectrum.sites = sites;
  spectrum.params = CouplingParams{delta2};
  spectrum.entries.reserve(total);
  for (const auto& d : decomps) {
    for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) {
      spectrum.entries.push_back(
          EigenstateRef{d.eigenvalues(k), d.basis.n_up(), static_cast<int>(k)});
    }
  }
  std::sort(spectrum.entries.begin(), spectrum.entries.end(),
            [](const EigenstateRef& a, const EigenstateRef& b) {
              return std::tie(a.energy, a.n_up, a.index) <
                     std::tie(b.energy, b.n_up, b.index);
            });

  // Every (sector, index) pair must appear exactly once.
  for (std::size_t i = 1; i < spectrum.entries.size(); ++i) {
    const auto& p = spectrum.entries[i - 1];
    const auto& q = spectrum.entries[i];
    if (p.n_up == q.n_up && p.index == q.index) {
      throw DomainError("duplicate sector passed to merge_spectra");
    }
  }
  return spectrum;
}

std::size_t DosEstimate::peak_window() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < windows.size(); ++i) {
    if (windows[i].dos > windows[best].dos) best = i;
  }
  return best;
}

std::size_t default_window_count(std::size_t total_states) {
  return std::max<std::size_t>(20, total_states / 300);
}

DosEstimate estimate_dos(const GlobalSpectrum& spectrum,
                         std::size_t window_count, double edge_trim) {
  if (window_count < 2) {
    throw DomainError("dos estimation needs at least 2 windows");
  }
  if (!(edge_trim >= 0.0 && edge_trim < 0.5)) {
    throw DomainError("edge_trim must lie in [0, 0.5)");
  }
  const std::size_t total = spectrum.size();
  const auto trim = static_cast<std::size_t>(
      std::floor(edge_trim * static_cast<double>(total)));
  if (total < 2 * trim + window_count) {
    throw DomainError("spectrum too small for the requested trim and windows");
  }
  const std::size_t retained = total - 2 * trim;

  DosEstimate dos;
  dos.trimmed_per_side = trim;
  dos.retained = retained;
  dos.windows.reserve(window_count);

  const std::size_t base = retained / window_count;
  const std::size_t remainder = retained % window_count;
  std::size_t begin = trim;
  for (std::size_t w = 0; w < window_count; ++w) {
    const std::size_t count = base + (w < remainder ? 1 : 0);
    const std::size_t first = begin;
    const std::size_t last = begin + count - 1;
    begin += count;

    const double e_first = spectrum.entries[first].energy;
    const double e_last = spectrum.entries[last].energy;
    const double width = e_last - e_first;
    if (!(width > 0.0)) {
      throw DegenerateWindowError(
          "dos window " + std::to_string(w) + " is fully degenerate (" +
              std::to_string(count) + " states at energy " +
              std::to_string(e_first) + ")",
          w);
    }
    dos.windows.push_back(DosWindow{0.5 * (e_first + e_last), width, count,
                                    static_cast<double>(count) / width, first,
                                    last});
  }
  return dos;
}

}  // namespace spinshell

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spinshell/entanglement.hpp"
#include "spinshell/spectral.hpp"

namespace spinshell {

/// A narrow energy shell: the eigenstates with energy in (lo, hi], sorted by
/// energy. Width is arbitrary but meant to be macroscopically small and
/// microscopically large (many level spacings).
struct EnergyShell {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<EigenstateRef> members;

  double center() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  std::size_t dim() const { return members.size(); }  // d_E
};

/// Shell of all eigenstates in (center - width/2, center + width/2].
/// Empty shells raise EmptyShellError carrying the nearest eigenstate energy.
EnergyShell shell_by_center(const GlobalSpectrum& spectrum, double center,
                            double width);

/// Shell made of exactly one density-of-states window's members.
EnergyShell shell_by_window(const GlobalSpectrum& spectrum,
                            const DosEstimate& dos, std::size_t window);

/// Shell at the window of maximal density of states.
EnergyShell shell_at_peak_dos(const GlobalSpectrum& spectrum,
                              const DosEstimate& dos);

enum class AverageMethod { eigenstate, haar, product };

/// Shell-averaged left-block entropy with a sample standard deviation.
struct ShellAverage {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
  AverageMethod method = AverageMethod::eigenstate;
  std::uint64_t seed = 0;  // meaningful for the Monte Carlo methods
};

const char* to_string(AverageMethod method);

/// Mean entropy over the shell's eigenstates.
ShellAverage eigenstate_shell_average(const EnergyShell& shell,
                                      const SectorDecompositions& decomps,
                                      const ChainGeometry& geometry);

/// Monte Carlo average over Haar-random states of the shell subspace: each
/// sample draws independent standard complex Gaussian coefficients over the
/// shell's eigenstates and normalizes them, which is uniform on the unit
/// sphere of the subspace. Deterministic for a fixed seed, independent of
/// thread count (per-sample substreams, serial reduction).
ShellAverage haar_shell_average(const EnergyShell& shell,
                                const SectorDecompositions& decomps,
                                const ChainGeometry& geometry,
                                std::size_t samples, std::uint64_t seed,
                                int threads = 0);

/// Shell built from non-interacting halves: both blocks are diagonalized
/// independently (bonds across the cut dropped) and all level pairs with
/// summed energy inside the interval are collected.
struct ProductShell {
  double lo = 0.0;
  double hi = 0.0;
  double target_left = 0.0;   // (l1/N) * center
  double target_right = 0.0;  // (l2/N) * center

  std::vector<double> left_levels;   // all 2^l1 levels, ascending
  std::vector<double> right_levels;  // all 2^l2 levels, ascending

  struct LevelPair {
    int left;   // index into left_levels
    int right;  // index into right_levels
  };
  std::vector<LevelPair> pairs;

  std::size_t d1 = 0;  // distinct left levels participating
  std::size_t d2 = 0;  // distinct right levels participating

  double center() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

/// All (i, j) with lo < left[i] + right[j] <= hi; both level lists must be
/// ascending. The valid j for each i form a contiguous run, found by
/// bisection.
std::vector<ProductShell::LevelPair> enumerate_level_pairs(
    std::span<const double> left_levels, std::span<const double> right_levels,
    double lo, double hi);

ProductShell build_product_shell(const ChainGeometry& geometry,
                                 CouplingParams params, double center,
                                 double width);

/// Monte Carlo average over random superpositions of the product-shell
/// pairs: coefficients are normalized complex Gaussians over the pairs, and
/// the entropy comes from the Schmidt spectrum of the d1 x d2 coefficient
/// matrix in the participating-level bases.
ShellAverage typical_product_state_average(const ProductShell& shell,
                                           std::size_t samples,
                                           std::uint64_t seed,
                                           int threads = 0);

}  // namespace spinshell

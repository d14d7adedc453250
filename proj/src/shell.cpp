#include "spinshell/shell.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "spinshell/errors.hpp"
#include "spinshell/numeric.hpp"
#include "spinshell/parallel.hpp"
#include "spinshell/rng.hpp"

namespace spinshell {
namespace {

// Energies of the sorted spectrum as iterators for interval searches.
struct EnergyLess {
  bool operator()(const EigenstateRef& e, double v) const {
    return e.energy < v;
  }
  bool operator()(double v, const EigenstateRef& e) const {
    return v < e.energy;
  }
};

double nearest_energy(const GlobalSpectrum& spectrum, double value) {
  double best = spectrum.entries.front().energy;
  double dist = std::abs(best - value);
  for (const auto& e : spectrum.entries) {
    const double d = std::abs(e.energy - value);
    if (d < dist) {
      dist = d;
      best = e.energy;
    }
  }
  return best;
}

// (left, right) product labels of every configuration in a sector, used to
// scatter sector eigenvectors into coefficient matrices.
std::vector<std::pair<Eigen::Index, Eigen::Index>> split_table(
    const SectorBasis& basis, const ChainGeometry& geometry) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> table;
  table.reserve(basis.size());
  for (const SpinConfig c : basis.configs()) {
    const BipartiteLabel label = split_config(c, geometry);
    table.emplace_back(static_cast<Eigen::Index>(label.left),
                       static_cast<Eigen::Index>(label.right));
  }
  return table;
}

ShellAverage reduce_samples(const std::vector<double>& entropies,
                            AverageMethod method, std::uint64_t seed) {
  const MeanStd stats = sample_mean_std(entropies);
  return ShellAverage{stats.mean, stats.stddev, entropies.size(), method, seed};
}

}  // namespace

const char* to_string(AverageMethod method) {
  switch (method) {
    case AverageMethod::eigenstate:
      return "eigenstate";
    case AverageMethod::haar:
      return "haar";
    case AverageMethod::product:
      return "product";
  }
  return "unknown";
}

EnergyShell shell_by_center(const GlobalSpectrum& spectrum, double center,
                            double width) {
  if (spectrum.entries.empty()) throw DomainError("empty spectrum");
  if (!(width > 0.0)) throw DomainError("shell width must be > 0");

  const double lo = center - 0.5 * width;
  const double hi = center + 0.5 * width;
  const auto first = std::upper_bound(spectrum.entries.begin(),
                                      spectrum.entries.end(), lo, EnergyLess{});
  const auto last = std::upper_bound(spectrum.entries.begin(),
                                     spectrum.entries.end(), hi, EnergyLess{});
  if (first == last) {
    const double nearest = nearest_energy(spectrum, center);
    throw EmptyShellError(
        "no eigenstates in (" + std::to_string(lo) + ", " + std::to_string(hi) +
            "]; nearest eigenstate has energy " + std::to_string(nearest),
        nearest);
  }
  return EnergyShell{lo, hi, std::vector<EigenstateRef>(first, last)};
}

EnergyShell shell_by_window(const GlobalSpectrum& spectrum,
                            const DosEstimate& dos, std::size_t window) {
  if (window >= dos.windows.size()) {
    throw DomainError("window index " + std::to_string(window) +
                      " out of range (have " +
                      std::to_string(dos.windows.size()) + " windows)");
  }
  const DosWindow& w = dos.windows[window];
  std::vector<EigenstateRef> members(
      spectrum.entries.begin() + static_cast<std::ptrdiff_t>(w.first),
      spectrum.entries.begin() + static_cast<std::ptrdiff_t>(w.last) + 1);
  // Window membership is by index range; nudge the lower edge below the first
  // member so the half-open interval convention holds for all members.
  const double lo = std::nextafter(members.front().energy,
                                   -std::numeric_limits<double>::infinity());
  return EnergyShell{lo, members.back().energy, std::move(members)};
}

EnergyShell shell_at_peak_dos(const GlobalSpectrum& spectrum,
                              const DosEstimate& dos) {
  return shell_by_window(spectrum, dos, dos.peak_window());
}

ShellAverage eigenstate_shell_average(const EnergyShell& shell,
                                      const SectorDecompositions& decomps,
                                      const ChainGeometry& geometry) {
  if (shell.members.empty()) throw DomainError("shell has no members");
  std::vector<double> entropies;
  entropies.reserve(shell.dim());
  for (const EigenstateRef& ref : shell.members) {
    const SpectralDecomposition& d = find_sector(decomps, ref.n_up);
    if (ref.index < 0 || ref.index >= d.eigenvalues.size()) {
      throw DomainError("shell member index out of range for its sector");
    }
    entropies.push_back(
        eigenstate_entropy(d.eigenvectors.col(ref.index), d.basis, geometry));
  }
  return reduce_samples(entropies, AverageMethod::eigenstate, 0);
}

ShellAverage haar_shell_average(const EnergyShell& shell,
                                const SectorDecompositions& decomps,
                                const ChainGeometry& geometry,
                                std::size_t samples, std::uint64_t seed,
                                int threads) {
  if (shell.members.empty()) throw DomainError("shell has no members");
  if (samples < 1) throw DomainError("haar average needs samples >= 1");

  const std::size_t d_e = shell.dim();

  // Resolve each member once: sector decomposition plus its split table.
  std::vector<const SpectralDecomposition*> sector_of(d_e);
  std::vector<const std::vector<std::pair<Eigen::Index, Eigen::Index>>*>
      table_of(d_e);
  std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> tables(
      static_cast<std::size_t>(geometry.sites) + 1);
  for (std::size_t m = 0; m < d_e; ++m) {
    const int n_up = shell.members[m].n_up;
    const SpectralDecomposition& d = find_sector(decomps, n_up);
    if (shell.members[m].index < 0 ||
        shell.members[m].index >= d.eigenvalues.size()) {
      throw DomainError("shell member index out of range for its sector");
    }
    auto& table = tables[static_cast<std::size_t>(n_up)];
    if (table.empty()) table = split_table(d.basis, geometry);
    sector_of[m] = &d;
    table_of[m] = &table;
  }

  std::vector<double> entropies(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    std::mt19937_64 eng = substream(seed, s);
    std::vector<std::complex<double>> coeff(d_e);
    CompensatedSum norm_sq;
    for (std::size_t m = 0; m < d_e; ++m) {
      coeff[m] = complex_gaussian(eng);
      norm_sq.add(std::norm(coeff[m]));
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq.value());

    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(geometry.left_dim()),
        static_cast<Eigen::Index>(geometry.right_dim()));
    for (std::size_t m = 0; m < d_e; ++m) {
      const std::complex<double> c = coeff[m] * inv_norm;
      const auto& table = *table_of[m];
      const auto column =
          sector_of[m]->eigenvectors.col(shell.members[m].index);
      for (std::size_t r = 0; r < table.size(); ++r) {
        psi(table[r].first, table[r].second) +=
            c * column(static_cast<Eigen::Index>(r));
      }
    }
    entropies[s] = vn_entropy(schmidt_probabilities(psi));
  });
  return reduce_samples(entropies, AverageMethod::haar, seed);
}

namespace {

// All 2^n levels of the coupling rule restricted to an n-site block,
// ascending. A single free site has no bonds: two zero-energy levels.
std::vector<double> block_levels(int n, CouplingParams params, double tol) {
  if (n == 1) return {0.0, 0.0};
  const ChainGeometry block(n, 1);
  std::vector<double> levels;
  levels.reserve(std::size_t{1} << n);
  for (int n_up = 0; n_up <= n; ++n_up) {
    const SpectralDecomposition d = diagonalize(
        build_sector_hamiltonian(enumerate_sector(block, n_up), params), tol);
    for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) {
      levels.push_back(d.eigenvalues(k));
    }
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

}  // namespace

std::vector<ProductShell::LevelPair> enumerate_level_pairs(
    std::span<const double> left_levels, std::span<const double> right_levels,
    double lo, double hi) {
  std::vector<ProductShell::LevelPair> pairs;
  for (std::size_t i = 0; i < left_levels.size(); ++i) {
    const double a = left_levels[i];
    const auto first = std::upper_bound(right_levels.begin(),
                                        right_levels.end(), lo - a);
    const auto last =
        std::upper_bound(right_levels.begin(), right_levels.end(), hi - a);
    for (auto it = first; it != last; ++it) {
      pairs.push_back(ProductShell::LevelPair{
          static_cast<int>(i), static_cast<int>(it - right_levels.begin())});
    }
  }
  return pairs;
}

ProductShell build_product_shell(const ChainGeometry& geometry,
                                 CouplingParams params, double center,
                                 double width) {
  if (!(width > 0.0)) throw DomainError("shell width must be > 0");

  ProductShell shell;
  shell.lo = center - 0.5 * width;
  shell.hi = center + 0.5 * width;
  const double n = geometry.sites;
  shell.target_left = (geometry.left_sites / n) * center;
  shell.target_right = (geometry.right_sites() / n) * center;
  shell.left_levels = block_levels(geometry.left_sites, params, 1e-8);
  shell.right_levels = block_levels(geometry.right_sites(), params, 1e-8);

  shell.pairs = enumerate_level_pairs(shell.left_levels, shell.right_levels,
                                      shell.lo, shell.hi);

  if (shell.pairs.empty()) {
    // Nearest achievable pair sum, for the error message.
    double best = shell.left_levels.front() + shell.right_levels.front();
    for (const double a : shell.left_levels) {
      auto it = std::lower_bound(shell.right_levels.begin(),
                                 shell.right_levels.end(), center - a);
      for (const auto probe : {it, it == shell.right_levels.begin()
                                       ? it
                                       : std::prev(it)}) {
        if (probe != shell.right_levels.end() &&
            std::abs(a + *probe - center) < std::abs(best - center)) {
          best = a + *probe;
        }
      }
    }
    throw EmptyShellError(
        "no product-level pairs in (" + std::to_string(shell.lo) + ", " +
            std::to_string(shell.hi) + "]; nearest pair energy is " +
            std::to_string(best),
        best);
  }

  std::vector<char> left_used(shell.left_levels.size(), 0);
  std::vector<char> right_used(shell.right_levels.size(), 0);
  for (const auto& p : shell.pairs) {
    left_used[static_cast<std::size_t>(p.left)] = 1;
    right_used[static_cast<std::size_t>(p.right)] = 1;
  }
  for (const char used : left_used) shell.d1 += used;
  for (const char used : right_used) shell.d2 += used;
  return shell;
}

ShellAverage typical_product_state_average(const ProductShell& shell,
                                           std::size_t samples,
                                           std::uint64_t seed, int threads) {
  if (shell.pairs.empty()) throw DomainError("product shell has no pairs");
  if (samples < 1) throw DomainError("product average needs samples >= 1");

  // Compact the participating levels so the coefficient matrix is d1 x d2.
  std::vector<int> row_of(shell.left_levels.size(), -1);
  std::vector<int> col_of(shell.right_levels.size(), -1);
  int rows = 0;
  int cols = 0;
  for (const auto& p : shell.pairs) {
    if (row_of[static_cast<std::size_t>(p.left)] < 0) {
      row_of[static_cast<std::size_t>(p.left)] = rows++;
    }
    if (col_of[static_cast<std::size_t>(p.right)] < 0) {
      col_of[static_cast<std::size_t>(p.right)] = cols++;
    }
  }

  std::vector<double> entropies(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    std::mt19937_64 eng = substream(seed, s);
    std::vector<std::complex<double>> coeff(shell.pairs.size());
    CompensatedSum norm_sq;
    for (auto& c : coeff) {
      c = complex_gaussian(eng);
      norm_sq.add(std::norm(c));
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq.value());

    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(rows, cols);
    for (std::size_t p = 0; p < shell.pairs.size(); ++p) {
      psi(row_of[static_cast<std::size_t>(shell.pairs[p].left)],
          col_of[static_cast<std::size_t>(shell.pairs[p].right)]) =
          coeff[p] * inv_norm;
    }
    entropies[s] = vn_entropy(schmidt_probabilities(psi));
  });
  return reduce_samples(entropies, AverageMethod::product, seed);
}

}  // namespace spinshell

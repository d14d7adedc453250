#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinshell/analysis.hpp"
#include "spinshell/entanglement.hpp"
#include "spinshell/shell.hpp"
#include "spinshell/spectral.hpp"

namespace spinshell {

/// '#'-prefixed key = value lines written before the header row of every
/// CSV, echoing the configuration that produced the file.
using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

/// Doubles are written in shortest round-trip form so files parse back
/// exactly and byte-compare equal across reruns.
std::string format_double(double value);

void write_spectrum_csv(std::ostream& out, const GlobalSpectrum& spectrum,
                        const CsvMetadata& meta);

void write_dos_csv(std::ostream& out, const DosEstimate& dos,
                   const CsvMetadata& meta);

void write_eigenstate_entropy_csv(std::ostream& out,
                                  std::span<const EigenstateEntropyRow> rows,
                                  const CsvMetadata& meta);

struct ShellAverageRow {
  double center = 0.0;
  double width = 0.0;
  std::size_t shell_dim = 0;
  ShellAverage average;
  std::size_t samples = 0;  // count of states or Monte Carlo samples
  std::uint64_t seed = 0;
};

void write_shell_average_csv(std::ostream& out,
                             std::span<const ShellAverageRow> rows,
                             const CsvMetadata& meta);

struct ProductShellRow {
  double center = 0.0;
  double width = 0.0;
  std::size_t shell_dim = 0;  // d_E of the matching exact shell
  std::size_t pairs = 0;
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  double ln_d1d2_over_ln_de = 0.0;
};

void write_product_shell_csv(std::ostream& out,
                             std::span<const ProductShellRow> rows,
                             const CsvMetadata& meta);

struct FitRow {
  SpectrumHalf half = SpectrumHalf::left;
  LinearFit fit;
  int left_sites = 0;
  int sites = 0;
  double delta2 = 0.0;
  double predicted_slope = 0.0;  // l1 / N
};

void write_fit_lndos_csv(std::ostream& out, std::span<const FitRow> rows,
                         const CsvMetadata& meta);

void write_volume_law_csv(std::ostream& out, const VolumeLawScan& scan,
                          const CsvMetadata& meta);

void write_gamma_csv(std::ostream& out, std::span<const GammaEstimate> rows,
                     const CsvMetadata& meta);

}  // namespace spinshell

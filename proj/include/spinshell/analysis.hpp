#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spinshell/shell.hpp"
#include "spinshell/spectral.hpp"

namespace spinshell {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;  // defined as 1 when the total sum of squares is 0
  double residual_std = 0.0;
  std::size_t n_points = 0;
};

/// Ordinary least squares. Requires >= 2 points with non-degenerate x.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

enum class SpectrumHalf { left, right, both };

const char* to_string(SpectrumHalf half);

/// Fits per-window mean entropy against ln(dos). Halves split at the
/// peak-dos window (included in both), mirroring the rising and falling
/// flanks of the spectrum; ln(dos) carries an arbitrary additive constant
/// from the unit convention, so only the slope is meaningful.
LinearFit fit_entropy_vs_lndos(const DosEstimate& dos,
                               std::span<const ShellAverage> window_averages,
                               SpectrumHalf half);

/// Measured and predicted volume-law exponents for one shell:
///   gamma_measured = S1 / ln(D1),  gamma_predicted = ln(d_E) / ln(D),
/// plus the effective per-site dimension eta = exp(S1 / l1).
struct GammaEstimate {
  double gamma_measured = 0.0;
  double gamma_predicted = 0.0;
  double eta_measured = 0.0;
  double shell_center = 0.0;
  std::size_t shell_dim = 0;
};

GammaEstimate estimate_gamma(const ShellAverage& average,
                             const EnergyShell& shell,
                             const ChainGeometry& geometry);

/// Mean entropy against left-block size over one fixed shell. The shell is a
/// property of the full spectrum and is reused unchanged for every cut.
struct VolumeLawScan {
  std::vector<int> left_sizes;
  std::vector<ShellAverage> averages;
  LinearFit fit;
};

VolumeLawScan volume_law_scan(const SectorDecompositions& decomps,
                              const EnergyShell& shell,
                              std::span<const int> left_sizes);

}  // namespace spinshell

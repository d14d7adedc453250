#include "spinshell/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spinshell/errors.hpp"
#include "spinshell/numeric.hpp"

namespace spinshell {

const char* to_string(SpectrumHalf half) {
  switch (half) {
    case SpectrumHalf::left:
      return "left";
    case SpectrumHalf::right:
      return "right";
    case SpectrumHalf::both:
      return "both";
  }
  return "unknown";
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw DomainError("ols_fit: x and y lengths differ");
  if (n < 2) throw DomainError("ols_fit needs at least 2 points");

  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);

  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < n; ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) {
    throw DomainError("ols_fit: all x values are equal");
  }

  LinearFit fit;
  fit.n_points = n;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;

  CompensatedSum ss_res;
  CompensatedSum ss_tot;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res.add(r * r);
    ss_tot.add((y[i] - my) * (y[i] - my));
  }
  fit.r_squared =
      ss_tot.value() > 0.0 ? 1.0 - ss_res.value() / ss_tot.value() : 1.0;
  fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
  fit.residual_std =
      n > 2 ? std::sqrt(std::max(ss_res.value(), 0.0) /
                        static_cast<double>(n - 2))
            : 0.0;
  return fit;
}

LinearFit fit_entropy_vs_lndos(const DosEstimate& dos,
                               std::span<const ShellAverage> window_averages,
                               SpectrumHalf half) {
  if (window_averages.size() != dos.windows.size()) {
    throw DomainError(
        "fit_entropy_vs_lndos: one average per dos window required");
  }
  const std::size_t peak = dos.peak_window();
  std::size_t first = 0;
  std::size_t last = dos.windows.size() - 1;
  if (half == SpectrumHalf::left) last = peak;
  if (half == SpectrumHalf::right) first = peak;

  const std::size_t count = last - first + 1;
  if (count < 3) {
    throw DomainError(std::string("fit_entropy_vs_lndos: only ") +
                      std::to_string(count) + " windows in the " +
                      to_string(half) + " half; need at least 3");
  }

  std::vector<double> x;
  std::vector<double> y;
  x.reserve(count);
  y.reserve(count);
  for (std::size_t w = first; w <= last; ++w) {
    x.push_back(std::log(dos.windows[w].dos));
    y.push_back(window_averages[w].mean);
  }
  return ols_fit(x, y);
}

GammaEstimate estimate_gamma(const ShellAverage& average,
                             const EnergyShell& shell,
                             const ChainGeometry& geometry) {
  const double ln_d1 = geometry.left_sites * std::numbers::ln2;
  const double ln_d = geometry.sites * std::numbers::ln2;

  GammaEstimate est;
  est.gamma_measured = average.mean / ln_d1;
  est.gamma_predicted =
      std::log(static_cast<double>(shell.dim())) / ln_d;
  est.eta_measured = std::exp(average.mean / geometry.left_sites);
  est.shell_center = shell.center();
  est.shell_dim = shell.dim();
  return est;
}

VolumeLawScan volume_law_scan(const SectorDecompositions& decomps,
                              const EnergyShell& shell,
                              std::span<const int> left_sizes) {
  if (decomps.empty()) throw DomainError("volume_law_scan: no spectra");
  const int sites = decomps.front().basis.geometry().sites;
  if (left_sizes.size() < 2) {
    throw DomainError("volume_law_scan needs at least 2 subsystem sizes");
  }
  for (std::size_t i = 0; i < left_sizes.size(); ++i) {
    if (left_sizes[i] < 1 || 2 * left_sizes[i] > sites) {
      throw DomainError("volume law subsystem sizes must lie in [1, N/2]");
    }
    if (i > 0 && left_sizes[i] <= left_sizes[i - 1]) {
      throw DomainError("volume law subsystem sizes must be strictly increasing");
    }
  }

  VolumeLawScan scan;
  scan.left_sizes.assign(left_sizes.begin(), left_sizes.end());
  scan.averages.reserve(left_sizes.size());
  std::vector<double> x;
  std::vector<double> y;
  // Same shell members for every cut: the shell is a property of the full
  // spectrum, independent of where the chain is bipartitioned.
  for (const int l1 : left_sizes) {
    const ShellAverage avg =
        eigenstate_shell_average(shell, decomps, ChainGeometry(sites, l1));
    scan.averages.push_back(avg);
    x.push_back(static_cast<double>(l1));
    y.push_back(avg.mean);
  }
  scan.fit = ols_fit(x, y);
  return scan;
}

}  // namespace spinshell

#include "spinshell/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace spinshell {
namespace {

void write_metadata(std::ostream& out, const CsvMetadata& meta) {
  for (const auto& [key, value] : meta) {
    out << "# " << key << " = " << value << "\n";
  }
}

}  // namespace

std::string format_double(double value) {
  // Shortest representation that parses back to the same double.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_spectrum_csv(std::ostream& out, const GlobalSpectrum& spectrum,
                        const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "energy,n_up,sector_index\n";
  for (const auto& e : spectrum.entries) {
    out << format_double(e.energy) << ',' << e.n_up << ',' << e.index << '\n';
  }
}

void write_dos_csv(std::ostream& out, const DosEstimate& dos,
                   const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "center,width,count,dos,ln_dos\n";
  for (const auto& w : dos.windows) {
    out << format_double(w.center) << ',' << format_double(w.width) << ','
        << w.count << ',' << format_double(w.dos) << ','
        << format_double(std::log(w.dos)) << '\n';
  }
}

void write_eigenstate_entropy_csv(std::ostream& out,
                                  std::span<const EigenstateEntropyRow> rows,
                                  const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "energy,n_up,sector_index,S1_nats\n";
  for (const auto& r : rows) {
    out << format_double(r.energy) << ',' << r.n_up << ',' << r.index << ','
        << format_double(r.entropy) << '\n';
  }
}

void write_shell_average_csv(std::ostream& out,
                             std::span<const ShellAverageRow> rows,
                             const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "center,width,d_E,method,samples,seed,S1_mean,S1_std\n";
  for (const auto& r : rows) {
    out << format_double(r.center) << ',' << format_double(r.width) << ','
        << r.shell_dim << ',' << to_string(r.average.method) << ','
        << r.samples << ',' << r.seed << ','
        << format_double(r.average.mean) << ','
        << format_double(r.average.stddev) << '\n';
  }
}

void write_product_shell_csv(std::ostream& out,
                             std::span<const ProductShellRow> rows,
                             const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "center,width,d_E,pairs,d1,d2,ln_d1d2_over_ln_dE\n";
  for (const auto& r : rows) {
    out << format_double(r.center) << ',' << format_double(r.width) << ','
        << r.shell_dim << ',' << r.pairs << ',' << r.d1 << ',' << r.d2 << ','
        << format_double(r.ln_d1d2_over_ln_de) << '\n';
  }
}

void write_fit_lndos_csv(std::ostream& out, std::span<const FitRow> rows,
                         const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "half,slope,intercept,r2,n_points,l1,N,delta2,predicted_slope\n";
  for (const auto& r : rows) {
    out << to_string(r.half) << ',' << format_double(r.fit.slope) << ','
        << format_double(r.fit.intercept) << ','
        << format_double(r.fit.r_squared) << ',' << r.fit.n_points << ','
        << r.left_sites << ',' << r.sites << ',' << format_double(r.delta2)
        << ',' << format_double(r.predicted_slope) << '\n';
  }
}

void write_volume_law_csv(std::ostream& out, const VolumeLawScan& scan,
                          const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "# fit_slope = " << format_double(scan.fit.slope) << "\n";
  out << "# fit_intercept = " << format_double(scan.fit.intercept) << "\n";
  out << "# fit_r2 = " << format_double(scan.fit.r_squared) << "\n";
  out << "l1,S1_mean,S1_std\n";
  for (std::size_t i = 0; i < scan.left_sizes.size(); ++i) {
    out << scan.left_sizes[i] << ',' << format_double(scan.averages[i].mean)
        << ',' << format_double(scan.averages[i].stddev) << '\n';
  }
}

void write_gamma_csv(std::ostream& out, std::span<const GammaEstimate> rows,
                     const CsvMetadata& meta) {
  write_metadata(out, meta);
  out << "center,d_E,gamma_measured,gamma_predicted,eta_measured\n";
  for (const auto& r : rows) {
    out << format_double(r.shell_center) << ',' << r.shell_dim << ','
        << format_double(r.gamma_measured) << ','
        << format_double(r.gamma_predicted) << ','
        << format_double(r.eta_measured) << '\n';
  }
}

}  // namespace spinshell

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "spinshell/analysis.hpp"
#include "spinshell/entanglement.hpp"
#include "spinshell/errors.hpp"
#include "spinshell/experiment.hpp"
#include "spinshell/hamiltonian.hpp"
#include "spinshell/shell.hpp"
#include "spinshell/spectral.hpp"
#include "spinshell/version.hpp"

namespace py = pybind11;
using namespace spinshell;

namespace {

PageMode page_mode_from_string(const std::string& mode) {
  if (mode == "exact") return PageMode::exact;
  if (mode == "asymptotic") return PageMode::asymptotic;
  throw DomainError("page mode must be 'exact' or 'asymptotic'");
}

SpectrumHalf half_from_string(const std::string& half) {
  if (half == "left") return SpectrumHalf::left;
  if (half == "right") return SpectrumHalf::right;
  if (half == "both") return SpectrumHalf::both;
  throw DomainError("half must be 'left', 'right' or 'both'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Exact-diagonalization kernels for subsystem entropy statistics of "
      "spin-1/2 chains over narrow energy shells.";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);

  py::class_<ChainGeometry>(m, "ChainGeometry")
      .def(py::init<int, int>(), py::arg("sites"), py::arg("left_sites"))
      .def_readonly("sites", &ChainGeometry::sites)
      .def_readonly("left_sites", &ChainGeometry::left_sites)
      .def_property_readonly("right_sites", &ChainGeometry::right_sites)
      .def_property_readonly("dim", &ChainGeometry::dim)
      .def_property_readonly("left_dim", &ChainGeometry::left_dim)
      .def_property_readonly("right_dim", &ChainGeometry::right_dim)
      .def("__repr__", [](const ChainGeometry& g) {
        return "ChainGeometry(sites=" + std::to_string(g.sites) +
               ", left_sites=" + std::to_string(g.left_sites) + ")";
      });

  py::class_<SectorBasis>(m, "SectorBasis")
      .def_property_readonly("n_up", &SectorBasis::n_up)
      .def_property_readonly("geometry", &SectorBasis::geometry)
      .def("__len__", &SectorBasis::size)
      .def_property_readonly("configs",
                             [](const SectorBasis& basis) {
                               std::vector<std::uint32_t> bits;
                               bits.reserve(basis.size());
                               for (const SpinConfig c : basis.configs()) {
                                 bits.push_back(c.bits);
                               }
                               return bits;
                             })
      .def("rank_of", [](const SectorBasis& basis, std::uint32_t bits) {
        return basis.rank_of(SpinConfig{bits});
      });

  m.def("enumerate_sector", &enumerate_sector, py::arg("geometry"),
        py::arg("n_up"));
  m.def(
      "split_config",
      [](std::uint32_t bits, const ChainGeometry& g) {
        const BipartiteLabel label = split_config(SpinConfig{bits}, g);
        return py::make_tuple(label.left, label.right);
      },
      py::arg("bits"), py::arg("geometry"),
      "Splits configuration bits into (left, right) block labels.");
  m.def(
      "recombine",
      [](std::uint32_t left, std::uint32_t right, const ChainGeometry& g) {
        return recombine(BipartiteLabel{left, right}, g).bits;
      },
      py::arg("left"), py::arg("right"), py::arg("geometry"));

  m.def(
      "build_sector_hamiltonian",
      [](const SectorBasis& basis, double delta2) {
        return build_sector_hamiltonian(basis, CouplingParams{delta2}).entries;
      },
      py::arg("basis"), py::arg("delta2"),
      "Dense symmetric sector Hamiltonian in basis order.");

  py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
      .def_property_readonly(
          "n_up", [](const SpectralDecomposition& d) { return d.basis.n_up(); })
      .def_property_readonly(
          "delta2",
          [](const SpectralDecomposition& d) { return d.params.delta2; })
      .def_property_readonly("basis",
                             [](const SpectralDecomposition& d) -> const
                             SectorBasis& { return d.basis; },
                             py::return_value_policy::reference_internal)
      .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
      .def_readonly("eigenvectors", &SpectralDecomposition::eigenvectors);

  m.def(
      "diagonalize_sector",
      [](const SectorBasis& basis, double delta2, double tol) {
        return diagonalize(build_sector_hamiltonian(basis,
                                                    CouplingParams{delta2}),
                           tol);
      },
      py::arg("basis"), py::arg("delta2"), py::arg("tol") = 1e-8,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "diagonalize_all_sectors",
      [](const ChainGeometry& geometry, double delta2, double tol,
         int threads) {
        return diagonalize_all_sectors(geometry, CouplingParams{delta2}, tol,
                                       threads);
      },
      py::arg("geometry"), py::arg("delta2"), py::arg("tol") = 1e-8,
      py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());

  py::class_<EigenstateRef>(m, "EigenstateRef")
      .def_readonly("energy", &EigenstateRef::energy)
      .def_readonly("n_up", &EigenstateRef::n_up)
      .def_readonly("index", &EigenstateRef::index);

  py::class_<GlobalSpectrum>(m, "GlobalSpectrum")
      .def_readonly("sites", &GlobalSpectrum::sites)
      .def_property_readonly(
          "delta2", [](const GlobalSpectrum& s) { return s.params.delta2; })
      .def("__len__", &GlobalSpectrum::size)
      .def_readonly("entries", &GlobalSpectrum::entries)
      .def_property_readonly("energies", [](const GlobalSpectrum& s) {
        std::vector<double> energies;
        energies.reserve(s.size());
        for (const auto& e : s.entries) energies.push_back(e.energy);
        return energies;
      });

  m.def("merge_spectra", &merge_spectra, py::arg("decompositions"));

  py::class_<DosWindow>(m, "DosWindow")
      .def_readonly("center", &DosWindow::center)
      .def_readonly("width", &DosWindow::width)
      .def_readonly("count", &DosWindow::count)
      .def_readonly("dos", &DosWindow::dos)
      .def_readonly("first", &DosWindow::first)
      .def_readonly("last", &DosWindow::last);

  py::class_<DosEstimate>(m, "DosEstimate")
      .def_readonly("windows", &DosEstimate::windows)
      .def_readonly("trimmed_per_side", &DosEstimate::trimmed_per_side)
      .def_readonly("retained", &DosEstimate::retained)
      .def_property_readonly("peak_window", &DosEstimate::peak_window);

  m.def(
      "estimate_dos",
      [](const GlobalSpectrum& spectrum, std::size_t window_count,
         double edge_trim) {
        if (window_count == 0) {
          window_count = default_window_count(spectrum.size());
        }
        return estimate_dos(spectrum, window_count, edge_trim);
      },
      py::arg("spectrum"), py::arg("window_count") = 0,
      py::arg("edge_trim") = 0.02,
      "Equal-count density-of-states windows; window_count 0 picks "
      "max(20, states/300).");

  py::class_<EnergyShell>(m, "EnergyShell")
      .def_readonly("lo", &EnergyShell::lo)
      .def_readonly("hi", &EnergyShell::hi)
      .def_property_readonly("center", &EnergyShell::center)
      .def_property_readonly("width", &EnergyShell::width)
      .def_readonly("members", &EnergyShell::members)
      .def("__len__", &EnergyShell::dim);

  m.def("shell_by_center", &shell_by_center, py::arg("spectrum"),
        py::arg("center"), py::arg("width"));
  m.def("shell_by_window", &shell_by_window, py::arg("spectrum"),
        py::arg("dos"), py::arg("window"));
  m.def("shell_at_peak_dos", &shell_at_peak_dos, py::arg("spectrum"),
        py::arg("dos"));

  py::class_<ShellAverage>(m, "ShellAverage")
      .def_readonly("mean", &ShellAverage::mean)
      .def_readonly("stddev", &ShellAverage::stddev)
      .def_readonly("count", &ShellAverage::count)
      .def_readonly("seed", &ShellAverage::seed)
      .def_property_readonly("method", [](const ShellAverage& a) {
        return std::string(to_string(a.method));
      });

  m.def("eigenstate_shell_average", &eigenstate_shell_average,
        py::arg("shell"), py::arg("decompositions"), py::arg("geometry"),
        py::call_guard<py::gil_scoped_release>());
  m.def("haar_shell_average", &haar_shell_average, py::arg("shell"),
        py::arg("decompositions"), py::arg("geometry"), py::arg("samples"),
        py::arg("seed"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<ProductShell::LevelPair>(m, "LevelPair")
      .def_readonly("left", &ProductShell::LevelPair::left)
      .def_readonly("right", &ProductShell::LevelPair::right);

  py::class_<ProductShell>(m, "ProductShell")
      .def_readonly("lo", &ProductShell::lo)
      .def_readonly("hi", &ProductShell::hi)
      .def_readonly("target_left", &ProductShell::target_left)
      .def_readonly("target_right", &ProductShell::target_right)
      .def_readonly("left_levels", &ProductShell::left_levels)
      .def_readonly("right_levels", &ProductShell::right_levels)
      .def_readonly("pairs", &ProductShell::pairs)
      .def_readonly("d1", &ProductShell::d1)
      .def_readonly("d2", &ProductShell::d2);

  m.def(
      "build_product_shell",
      [](const ChainGeometry& geometry, double delta2, double center,
         double width) {
        return build_product_shell(geometry, CouplingParams{delta2}, center,
                                   width);
      },
      py::arg("geometry"), py::arg("delta2"), py::arg("center"),
      py::arg("width"), py::call_guard<py::gil_scoped_release>());
  m.def("typical_product_state_average", &typical_product_state_average,
        py::arg("product_shell"), py::arg("samples"), py::arg("seed"),
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "coefficient_matrix",
      [](const Eigen::VectorXcd& state, const SectorBasis& basis,
         const ChainGeometry& geometry) {
        return coefficient_matrix(state, basis, geometry).entries;
      },
      py::arg("state"), py::arg("basis"), py::arg("geometry"),
      "Reshapes a sector state into its left_dim x right_dim coefficient "
      "matrix.");
  m.def(
      "schmidt_spectrum",
      [](const Eigen::MatrixXcd& psi) {
        return schmidt_probabilities(psi).probabilities;
      },
      py::arg("psi"),
      "Squared singular values, descending; values below 1e-12 clamp to 0.");
  m.def(
      "vn_entropy",
      [](const std::vector<double>& probabilities) {
        return vn_entropy(SchmidtSpectrum{probabilities});
      },
      py::arg("probabilities"));
  m.def(
      "page_average",
      [](std::uint64_t d1, std::uint64_t d2, const std::string& mode) {
        return page_average(d1, d2, page_mode_from_string(mode));
      },
      py::arg("d1"), py::arg("d2"), py::arg("mode") = "exact");
  m.def(
      "eigenstate_entropy_sweep",
      [](const GlobalSpectrum& spectrum, const SectorDecompositions& decomps,
         const ChainGeometry& geometry, int threads) {
        std::vector<EigenstateEntropyRow> sweep;
        {
          py::gil_scoped_release release;
          sweep = eigenstate_entropy_sweep(spectrum, decomps, geometry,
                                           threads);
        }
        std::vector<py::tuple> rows;
        rows.reserve(sweep.size());
        for (const auto& r : sweep) {
          rows.push_back(py::make_tuple(r.energy, r.n_up, r.index, r.entropy));
        }
        return rows;
      },
      py::arg("spectrum"), py::arg("decompositions"), py::arg("geometry"),
      py::arg("threads") = 0,
      "Per-eigenstate (energy, n_up, index, entropy) rows in spectrum order.");

  py::class_<LinearFit>(m, "LinearFit")
      .def_readonly("slope", &LinearFit::slope)
      .def_readonly("intercept", &LinearFit::intercept)
      .def_readonly("r_squared", &LinearFit::r_squared)
      .def_readonly("residual_std", &LinearFit::residual_std)
      .def_readonly("n_points", &LinearFit::n_points);

  m.def(
      "ols_fit",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return ols_fit(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "fit_entropy_vs_lndos",
      [](const DosEstimate& dos, const std::vector<ShellAverage>& averages,
         const std::string& half) {
        return fit_entropy_vs_lndos(dos, averages, half_from_string(half));
      },
      py::arg("dos"), py::arg("window_averages"), py::arg("half") = "both");

  py::class_<GammaEstimate>(m, "GammaEstimate")
      .def_readonly("gamma_measured", &GammaEstimate::gamma_measured)
      .def_readonly("gamma_predicted", &GammaEstimate::gamma_predicted)
      .def_readonly("eta_measured", &GammaEstimate::eta_measured)
      .def_readonly("shell_center", &GammaEstimate::shell_center)
      .def_readonly("shell_dim", &GammaEstimate::shell_dim);

  m.def("estimate_gamma", &estimate_gamma, py::arg("average"),
        py::arg("shell"), py::arg("geometry"));

  py::class_<VolumeLawScan>(m, "VolumeLawScan")
      .def_readonly("left_sizes", &VolumeLawScan::left_sizes)
      .def_readonly("averages", &VolumeLawScan::averages)
      .def_readonly("fit", &VolumeLawScan::fit);

  m.def(
      "volume_law_scan",
      [](const SectorDecompositions& decomps, const EnergyShell& shell,
         const std::vector<int>& left_sizes) {
        return volume_law_scan(decomps, shell, left_sizes);
      },
      py::arg("decompositions"), py::arg("shell"), py::arg("left_sizes"),
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream log;
        run_command(parse_config(args), log);
        return log.str();
      },
      py::arg("args"),
      "Runs one CLI command in-process (same arguments as the spinshell "
      "binary) and returns its log output.");
}

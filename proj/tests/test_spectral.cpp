#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spinshell/errors.hpp"
#include "spinshell/spectral.hpp"

using namespace spinshell;

namespace {

// A SectorMatrix wrapper for arbitrary symmetric test matrices, using a
// sector basis of matching dimension.
SectorMatrix wrap_matrix(const Eigen::MatrixXd& entries) {
  for (int sites = 2; sites <= 12; ++sites) {
    for (int n_up = 0; n_up <= sites; ++n_up) {
      if (binomial(sites, n_up) == static_cast<std::uint64_t>(entries.rows())) {
        return SectorMatrix{enumerate_sector(ChainGeometry(sites, 1), n_up),
                            CouplingParams{0.0}, entries};
      }
    }
  }
  throw DomainError("no sector of that dimension");
}

GlobalSpectrum spectrum_from_energies(const std::vector<double>& energies) {
  GlobalSpectrum s;
  s.sites = 4;
  s.params = CouplingParams{0.0};
  for (std::size_t i = 0; i < energies.size(); ++i) {
    s.entries.push_back(EigenstateRef{energies[i], 0, static_cast<int>(i)});
  }
  std::sort(s.entries.begin(), s.entries.end(),
            [](const EigenstateRef& a, const EigenstateRef& b) {
              return a.energy < b.energy;
            });
  return s;
}

}  // namespace

TEST_CASE("pauli-x eigenvalues") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const SpectralDecomposition d = diagonalize(wrap_matrix(m));
  CHECK(d.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("seeded random symmetric matrix satisfies the decomposition invariants") {
  std::mt19937_64 eng(12345);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j <= i; ++j) {
      m(i, j) = m(j, i) = gauss(eng);
    }
  }
  const SpectralDecomposition d = diagonalize(wrap_matrix(m));

  for (Eigen::Index k = 1; k < 5; ++k) {
    CHECK(d.eigenvalues(k - 1) <= d.eigenvalues(k));
  }
  const Eigen::MatrixXd gram =
      d.eigenvectors.transpose() * d.eigenvectors -
      Eigen::MatrixXd::Identity(5, 5);
  CHECK(gram.cwiseAbs().maxCoeff() <= 1e-10);
  const Eigen::MatrixXd resid =
      m * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal();
  CHECK(resid.colwise().norm().maxCoeff() <= 1e-8 * m.norm());
}

TEST_CASE("asymmetric or non-finite input rejected") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 2, 0;
  CHECK_THROWS_AS(diagonalize(wrap_matrix(m)), DomainError);
  m << 0, std::nan(""), std::nan(""), 0;
  CHECK_THROWS_AS(diagonalize(wrap_matrix(m)), DomainError);
}

TEST_CASE("reconstruction from eigenpairs") {
  for (const auto& [sites, n_up] : {std::pair{8, 2}, {10, 2}, {7, 3}}) {
    const SectorMatrix m = build_sector_hamiltonian(
        enumerate_sector(ChainGeometry(sites, 1), n_up), CouplingParams{0.5});
    REQUIRE(m.basis.size() <= 200);
    const SpectralDecomposition d = diagonalize(m);
    const Eigen::MatrixXd rebuilt = d.eigenvectors *
                                    d.eigenvalues.asDiagonal() *
                                    d.eigenvectors.transpose();
    CHECK((rebuilt - m.entries).norm() <= 1e-8 * m.entries.norm());
  }
}

TEST_CASE("sector eigenvalues match brute-force full-space diagonalization") {
  for (const int sites : {4, 5, 6}) {
    for (const double delta2 : {0.0, 0.5}) {
      std::vector<double> merged;
      for (int n_up = 0; n_up <= sites; ++n_up) {
        const SpectralDecomposition d = diagonalize(build_sector_hamiltonian(
            enumerate_sector(ChainGeometry(sites, 1), n_up),
            CouplingParams{delta2}));
        merged.insert(merged.end(), d.eigenvalues.data(),
                      d.eigenvalues.data() + d.eigenvalues.size());
      }
      std::sort(merged.begin(), merged.end());
      const std::vector<double> brute = oracle::hermitian_eigenvalues(
          oracle::full_space_hamiltonian(sites, delta2));
      REQUIRE(merged.size() == brute.size());
      for (std::size_t i = 0; i < merged.size(); ++i) {
        CHECK(std::abs(merged[i] - brute[i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("merge: three sectors in energy order with deterministic ties") {
  const ChainGeometry g(2, 1);
  SectorDecompositions decomps;
  for (int n_up = 0; n_up <= 2; ++n_up) {
    decomps.push_back(diagonalize(build_sector_hamiltonian(
        enumerate_sector(g, n_up), CouplingParams{0.0})));
  }
  const GlobalSpectrum merged = merge_spectra(decomps);
  REQUIRE(merged.size() == 4);
  CHECK(merged.entries[0].energy == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(merged.entries[0].n_up == 1);
  // three degenerate triplet states at +1/4, tie-broken by n_up
  CHECK(merged.entries[1].n_up == 0);
  CHECK(merged.entries[2].n_up == 1);
  CHECK(merged.entries[3].n_up == 2);
}

TEST_CASE("merge: single sector passes through") {
  SectorDecompositions decomps;
  decomps.push_back(diagonalize(build_sector_hamiltonian(
      enumerate_sector(ChainGeometry(4, 2), 2), CouplingParams{0.3})));
  const GlobalSpectrum merged = merge_spectra(decomps);
  REQUIRE(merged.size() == 6);
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    CHECK(merged.entries[i].energy <= merged.entries[i + 1].energy);
  }
}

TEST_CASE("merge: all sectors of a 4-site chain give 16 states") {
  const GlobalSpectrum merged = merge_spectra(
      diagonalize_all_sectors(ChainGeometry(4, 2), CouplingParams{0.5}));
  CHECK(merged.size() == 16);
}

TEST_CASE("merge rejects mixed couplings") {
  SectorDecompositions decomps;
  decomps.push_back(diagonalize(build_sector_hamiltonian(
      enumerate_sector(ChainGeometry(4, 2), 1), CouplingParams{0.0})));
  decomps.push_back(diagonalize(build_sector_hamiltonian(
      enumerate_sector(ChainGeometry(4, 2), 2), CouplingParams{0.5})));
  CHECK_THROWS_AS(merge_spectra(decomps), DomainError);
}

TEST_CASE("dos: uniform spacing examples") {
  const DosEstimate dos =
      estimate_dos(spectrum_from_energies({0, 1, 2, 3}), 2, 0.0);
  REQUIRE(dos.windows.size() == 2);
  CHECK(dos.windows[0].center == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dos.windows[1].center == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(dos.windows[0].dos == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dos.windows[1].dos == doctest::Approx(2.0).epsilon(1e-15));

  const DosEstimate wide =
      estimate_dos(spectrum_from_energies({0, 2, 4, 6}), 2, 0.0);
  CHECK(wide.windows[0].dos == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wide.windows[1].dos == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dos: counts conserved, windows contiguous and ordered") {
  std::vector<double> energies;
  std::mt19937_64 eng(7);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 1013; ++i) energies.push_back(gauss(eng));
  const GlobalSpectrum s = spectrum_from_energies(energies);
  const DosEstimate dos = estimate_dos(s, 17, 0.03);

  std::size_t total = 0;
  for (std::size_t w = 0; w < dos.windows.size(); ++w) {
    const DosWindow& win = dos.windows[w];
    total += win.count;
    CHECK(win.count == win.last - win.first + 1);
    CHECK(win.dos > 0.0);
    if (w > 0) CHECK(win.first == dos.windows[w - 1].last + 1);
  }
  CHECK(total == dos.retained);
  CHECK(dos.retained == 1013 - 2 * dos.trimmed_per_side);
  CHECK(dos.trimmed_per_side == static_cast<std::size_t>(0.03 * 1013));
}

TEST_CASE("dos: degenerate window raises the named error") {
  const GlobalSpectrum s = spectrum_from_energies({0, 0, 0, 0, 1, 2, 3, 4});
  try {
    estimate_dos(s, 4, 0.0);
    FAIL("expected DegenerateWindowError");
  } catch (const DegenerateWindowError& e) {
    CHECK(e.window() == 0);
  }
}

TEST_CASE("dos: precondition violations") {
  const GlobalSpectrum s = spectrum_from_energies({0, 1, 2, 3});
  CHECK_THROWS_AS(estimate_dos(s, 1, 0.0), DomainError);
  CHECK_THROWS_AS(estimate_dos(s, 2, 0.5), DomainError);
  CHECK_THROWS_AS(estimate_dos(s, 5, 0.0), DomainError);
}

TEST_CASE("dos dome at desk scale: peak in the central third") {
  const GlobalSpectrum spectrum = merge_spectra(
      diagonalize_all_sectors(ChainGeometry(12, 3), CouplingParams{0.5}));
  const DosEstimate dos = estimate_dos(spectrum, 40, 0.02);
  const std::size_t peak = dos.peak_window();
  const double e_min = dos.windows.front().center;
  const double e_max = dos.windows.back().center;
  const double span = e_max - e_min;
  CHECK(dos.windows[peak].center >= e_min + span / 3.0);
  CHECK(dos.windows[peak].center <= e_max - span / 3.0);
}

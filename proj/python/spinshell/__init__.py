"""Subsystem entropy statistics of spin-1/2 chains over narrow energy shells.

The heavy lifting happens in the compiled ``_core`` extension; this package
re-exports its surface. A typical session::

    import spinshell as ss

    geometry = ss.ChainGeometry(sites=12, left_sites=3)
    decomps = ss.diagonalize_all_sectors(geometry, delta2=0.5)
    spectrum = ss.merge_spectra(decomps)
    dos = ss.estimate_dos(spectrum)
    shell = ss.shell_at_peak_dos(spectrum, dos)
    avg = ss.eigenstate_shell_average(shell, decomps, geometry)
    gamma = ss.estimate_gamma(avg, shell, geometry)
"""

from ._core import (
    ChainGeometry,
    DosEstimate,
    DosWindow,
    DomainError,
    EigenstateRef,
    EnergyShell,
    GammaEstimate,
    GlobalSpectrum,
    LevelPair,
    LinearFit,
    NumericalError,
    ProductShell,
    SectorBasis,
    ShellAverage,
    SpectralDecomposition,
    VolumeLawScan,
    __version__,
    build_product_shell,
    build_sector_hamiltonian,
    coefficient_matrix,
    diagonalize_all_sectors,
    diagonalize_sector,
    eigenstate_entropy_sweep,
    eigenstate_shell_average,
    enumerate_sector,
    estimate_dos,
    estimate_gamma,
    fit_entropy_vs_lndos,
    haar_shell_average,
    merge_spectra,
    ols_fit,
    page_average,
    recombine,
    run_cli,
    schmidt_spectrum,
    shell_at_peak_dos,
    shell_by_center,
    shell_by_window,
    split_config,
    typical_product_state_average,
    vn_entropy,
    volume_law_scan,
)

__all__ = [
    "ChainGeometry",
    "DosEstimate",
    "DosWindow",
    "DomainError",
    "EigenstateRef",
    "EnergyShell",
    "GammaEstimate",
    "GlobalSpectrum",
    "LevelPair",
    "LinearFit",
    "NumericalError",
    "ProductShell",
    "SectorBasis",
    "ShellAverage",
    "SpectralDecomposition",
    "VolumeLawScan",
    "__version__",
    "build_product_shell",
    "build_sector_hamiltonian",
    "coefficient_matrix",
    "diagonalize_all_sectors",
    "diagonalize_sector",
    "eigenstate_entropy_sweep",
    "eigenstate_shell_average",
    "enumerate_sector",
    "estimate_dos",
    "estimate_gamma",
    "fit_entropy_vs_lndos",
    "haar_shell_average",
    "merge_spectra",
    "ols_fit",
    "page_average",
    "recombine",
    "run_cli",
    "schmidt_spectrum",
    "shell_at_peak_dos",
    "shell_by_center",
    "shell_by_window",
    "split_config",
    "typical_product_state_average",
    "vn_entropy",
    "volume_law_scan",
]

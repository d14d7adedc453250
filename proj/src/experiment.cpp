#include "spinshell/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spinshell/analysis.hpp"
#include "spinshell/csv.hpp"
#include "spinshell/entanglement.hpp"
#include "spinshell/errors.hpp"
#include "spinshell/parallel.hpp"
#include "spinshell/shell.hpp"
#include "spinshell/spectral.hpp"
#include "spinshell/version.hpp"

namespace fs = std::filesystem;

namespace spinshell {
namespace {

// ---------------------------------------------------------------------------
// small utilities

std::uint64_t fnv1a64(const char* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

FileRecord hash_file(const fs::path& outdir, const fs::path& rel) {
  std::ifstream in(outdir / rel, std::ios::binary);
  if (!in) throw DomainError("cannot reopen emitted file " + rel.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return FileRecord{rel.generic_string(), bytes.size(),
                    hex64(fnv1a64(bytes.data(), bytes.size()))};
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

/// Reruns module errors with a stage tag so CLI failures name the stage.
template <typename F>
auto with_stage(const std::string& stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const EmptyShellError& e) {
    throw EmptyShellError("[" + stage + "] " + e.what(), e.nearest_energy());
  } catch (const DegenerateWindowError& e) {
    throw DegenerateWindowError("[" + stage + "] " + e.what(), e.window());
  } catch (const NumericalError& e) {
    throw NumericalError("[" + stage + "] " + e.what(), e.n_up());
  } catch (const DomainError& e) {
    throw DomainError("[" + stage + "] " + e.what());
  }
}

// ---------------------------------------------------------------------------
// CLI definition

const std::map<std::string, Command> kCommands = {
    {"spectrum", Command::spectrum}, {"entropy", Command::entropy},
    {"shells", Command::shells},     {"fit", Command::fit},
    {"volume", Command::volume},     {"page", Command::page},
};

struct CliState {
  ExperimentConfig cfg;
  std::string preset;
  std::string shell_policy = "peak";
  std::string outdir = ".";
  std::string cache_dir;
  bool no_cache = false;
};

// Shared options live on the top-level app (with fallthrough, so they may
// follow the subcommand name): CLI11 reads config files only through the
// top-level app, and this keeps config files to plain top-level keys.
void add_experiment_options(CLI::App* app, CliState& state) {
  app->set_config("--config", "",
                  "plain key = value config file; command line flags take "
                  "precedence");
  app->add_option("--preset", state.preset,
                  "named parameter preset (available: paper-n16); explicit "
                  "flags override preset values");
  app->add_option("--n", state.cfg.sites, "chain length N (2..24)");
  app->add_option("--l1", state.cfg.left_sites,
                  "left-block size l1 (default: N/2)");
  app->add_option("--delta2", state.cfg.delta2,
                  "next-nearest-neighbour coupling(s), comma separated "
                  "(default: 0)")
      ->delimiter(',');
  app->add_option("--windows", state.cfg.window_count,
                  "dos window count (default: 0 = max(20, states/300))");
  app->add_option("--edge-trim", state.cfg.edge_trim,
                  "fraction of states trimmed from each spectral edge "
                  "(default: 0.02)");
  app->add_option("--shell", state.shell_policy,
                  "shell policy: peak, center, window (default: peak)");
  app->add_option("--shell-center", state.cfg.shell_center,
                  "shell center energy (policy: center)");
  app->add_option("--shell-width", state.cfg.shell_width,
                  "shell width (policy: center)");
  app->add_option("--shell-window", state.cfg.shell_window,
                  "dos window index (policy: window)");
  app->add_option("--gamma-width-frac", state.cfg.gamma_width_fraction,
                  "central-shell width for gamma estimates, as a fraction of "
                  "the retained spectral span (default: 0.1)");
  app->add_option("--samples", state.cfg.samples,
                  "Monte Carlo samples per average (default: 500)");
  app->add_option("--seed", state.cfg.seed,
                  "RNG seed; required (no entropy-source defaults)");
  app->add_option("--diag-tol", state.cfg.diag_tol,
                  "eigenpair residual tolerance relative to ||H||_F "
                  "(default: 1e-8)");
  app->add_option("--threads", state.cfg.threads,
                  "worker threads, 0 = all hardware threads (default: 0); "
                  "results do not depend on this");
  app->add_option("--outdir", state.outdir, "output directory (default: .)");
  app->add_option("--cache-dir", state.cache_dir,
                  "spectra cache directory (default: <outdir>/cache; "
                  "overridden by $SPINSHELL_CACHE_DIR)");
  app->add_flag("--no-cache", state.no_cache,
                "neither read nor write the spectra cache");
  app->add_option("--l1-min", state.cfg.scan_min,
                  "(volume) smallest scanned left-block size (default: 1)");
  app->add_option("--l1-max", state.cfg.scan_max,
                  "(volume) largest scanned left-block size (default: N/2)");
}

std::unique_ptr<CLI::App> build_cli(CliState& state) {
  auto app = std::make_unique<CLI::App>(
      "spinshell: subsystem entropy statistics of spin-1/2 chains over "
      "narrow energy shells (exact diagonalization)");
  app->name("spinshell");
  app->require_subcommand(1);
  app->fallthrough(true);
  add_experiment_options(app.get(), state);

  auto* spectrum = app->add_subcommand(
      "spectrum", "diagonalize all sectors; emit spectrum.csv and dos.csv");
  auto* entropy = app->add_subcommand(
      "entropy", "per-eigenstate entanglement entropy; emit "
                 "eigenstate_entropy.csv");
  auto* shells = app->add_subcommand(
      "shells", "shell averages (eigenstate / haar / product); emit "
                "shell_average.csv and product_shell.csv");
  auto* fit = app->add_subcommand(
      "fit", "mean entropy vs ln(dos) fits per spectrum half plus gamma "
             "estimates; emit fit_lndos.csv and gamma.csv");
  auto* volume = app->add_subcommand(
      "volume", "mean entropy vs subsystem size at a fixed shell; emit "
                "volume_law.csv");
  auto* page = app->add_subcommand(
      "page", "print the Haar-average subsystem entropy for given dimensions");

  (void)spectrum;
  (void)entropy;
  (void)shells;
  (void)fit;
  (void)volume;

  page->add_option("--d1", state.cfg.page_d1, "subsystem Hilbert dimension")
      ->required();
  page->add_option("--d2", state.cfg.page_d2, "complement Hilbert dimension")
      ->required();

  return app;
}

void apply_preset(const CLI::App* app, CliState& state) {
  if (state.preset.empty()) return;
  if (state.preset != "paper-n16") {
    throw UsageError("unknown preset '" + state.preset +
                     "' (available: paper-n16)");
  }
  if (app->count("--n") == 0) state.cfg.sites = 16;
  if (app->count("--l1") == 0) state.cfg.left_sites = 6;
  if (app->count("--delta2") == 0) state.cfg.delta2 = {0.0, 0.2, 0.5};
}

void validate_config(Command command, const CLI::App* app, CliState& state) {
  ExperimentConfig& cfg = state.cfg;
  if (command == Command::page) {
    if (cfg.page_d1 < 1 || cfg.page_d2 < 1) {
      throw UsageError("--d1 and --d2 must be >= 1");
    }
    return;
  }

  if (cfg.sites == 0) {
    throw UsageError("--n is required (or use --preset paper-n16)");
  }
  if (cfg.sites < 2 || cfg.sites > kMaxSites) {
    throw UsageError("--n must be in [2, " + std::to_string(kMaxSites) + "]");
  }
  if (app->count("--l1") == 0 && state.preset.empty()) {
    cfg.left_sites = cfg.sites / 2;
  }
  if (cfg.left_sites < 1 || cfg.left_sites >= cfg.sites) {
    throw UsageError("--l1 must satisfy 1 <= l1 < n (got l1=" +
                     std::to_string(cfg.left_sites) + ", n=" +
                     std::to_string(cfg.sites) + ")");
  }
  if (cfg.delta2.empty()) throw UsageError("--delta2 needs at least one value");
  for (double d : cfg.delta2) {
    if (!std::isfinite(d)) throw UsageError("--delta2 values must be finite");
  }
  for (std::size_t i = 0; i < cfg.delta2.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.delta2.size(); ++j) {
      if (cfg.delta2[i] == cfg.delta2[j]) {
        throw UsageError("--delta2 values must be distinct");
      }
    }
  }
  if (cfg.window_count == 1) {
    throw UsageError("--windows must be 0 (auto) or >= 2");
  }
  if (!(cfg.edge_trim >= 0.0 && cfg.edge_trim < 0.5)) {
    throw UsageError("--edge-trim must lie in [0, 0.5)");
  }
  if (state.shell_policy == "peak") {
    cfg.shell_policy = ShellPolicyKind::peak_dos;
  } else if (state.shell_policy == "center") {
    cfg.shell_policy = ShellPolicyKind::by_center;
    if (!(cfg.shell_width > 0.0) || !std::isfinite(cfg.shell_center)) {
      throw UsageError(
          "--shell center requires --shell-center and --shell-width > 0");
    }
  } else if (state.shell_policy == "window") {
    cfg.shell_policy = ShellPolicyKind::by_window;
    if (app->count("--shell-window") == 0) {
      throw UsageError("--shell window requires --shell-window");
    }
  } else {
    throw UsageError("--shell must be one of: peak, center, window");
  }
  if (!(cfg.gamma_width_fraction > 0.0 && cfg.gamma_width_fraction <= 1.0)) {
    throw UsageError("--gamma-width-frac must lie in (0, 1]");
  }
  if (cfg.samples < 1) throw UsageError("--samples must be >= 1");
  if (app->count("--seed") == 0) {
    throw UsageError("--seed is required: every emitted number must be "
                     "reproducible from the config");
  }
  if (!(cfg.diag_tol > 0.0)) throw UsageError("--diag-tol must be > 0");
  if (cfg.threads < 0) throw UsageError("--threads must be >= 0");

  if (command == Command::volume) {
    if (cfg.scan_max == 0) cfg.scan_max = cfg.sites / 2;
    if (cfg.scan_min < 1 || 2 * cfg.scan_max > cfg.sites) {
      throw UsageError("--l1-min/--l1-max must lie within [1, n/2]");
    }
    if (cfg.scan_min >= cfg.scan_max) {
      throw UsageError("volume scan needs at least two left-block sizes "
                       "(--l1-min < --l1-max)");
    }
  }

  cfg.outdir = fs::path(state.outdir);
  cfg.use_cache = !state.no_cache;
  if (const char* env = std::getenv(kCacheDirEnvVar); env && *env) {
    cfg.cache_dir = fs::path(env);
  } else if (!state.cache_dir.empty()) {
    cfg.cache_dir = fs::path(state.cache_dir);
  } else {
    cfg.cache_dir = cfg.outdir / "cache";
  }
}

// ---------------------------------------------------------------------------
// spectra cache

constexpr char kCacheMagic[8] = {'S', 'P', 'S', 'H', 'S', 'P', 'C', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(in);
}

fs::path cache_file(const ExperimentConfig& cfg, double delta2) {
  return cfg.cache_dir / ("spectra_n" + std::to_string(cfg.sites) + "_d2_" +
                          fmt_g(delta2) + ".bin");
}

void store_spectra(const fs::path& path, const SectorDecompositions& decomps) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(kCacheMagic, sizeof(kCacheMagic));
    put<std::int32_t>(out, decomps.front().basis.geometry().sites);
    put<double>(out, decomps.front().params.delta2);
    put<std::int32_t>(out, static_cast<std::int32_t>(decomps.size()));
    for (const auto& d : decomps) {
      put<std::int32_t>(out, d.basis.n_up());
      put<std::int64_t>(out, static_cast<std::int64_t>(d.basis.size()));
      out.write(reinterpret_cast<const char*>(d.eigenvalues.data()),
                static_cast<std::streamsize>(sizeof(double) *
                                             d.eigenvalues.size()));
      out.write(reinterpret_cast<const char*>(d.eigenvectors.data()),
                static_cast<std::streamsize>(sizeof(double) *
                                             d.eigenvectors.size()));
    }
    if (!out) return;  // cache is best-effort; a failed write is not fatal
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
}

bool load_spectra(const fs::path& path, const ChainGeometry& geometry,
                  double delta2, SectorDecompositions& decomps) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 8, kCacheMagic)) return false;

  std::int32_t sites = 0;
  double stored_delta2 = 0.0;
  std::int32_t n_sectors = 0;
  if (!get(in, sites) || !get(in, stored_delta2) || !get(in, n_sectors)) {
    return false;
  }
  if (sites != geometry.sites || stored_delta2 != delta2 ||
      n_sectors != geometry.sites + 1) {
    return false;
  }

  SectorDecompositions loaded;
  loaded.reserve(static_cast<std::size_t>(n_sectors));
  for (std::int32_t s = 0; s < n_sectors; ++s) {
    std::int32_t n_up = 0;
    std::int64_t dim = 0;
    if (!get(in, n_up) || !get(in, dim)) return false;
    SectorBasis basis = enumerate_sector(geometry, n_up);
    if (static_cast<std::int64_t>(basis.size()) != dim) return false;
    Eigen::VectorXd values(dim);
    Eigen::MatrixXd vectors(dim, dim);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(sizeof(double) * values.size()));
    in.read(reinterpret_cast<char*>(vectors.data()),
            static_cast<std::streamsize>(sizeof(double) * vectors.size()));
    if (!in) return false;
    loaded.push_back(SpectralDecomposition{std::move(basis),
                                           CouplingParams{delta2},
                                           std::move(values),
                                           std::move(vectors)});
  }
  decomps = std::move(loaded);
  return true;
}

// ---------------------------------------------------------------------------
// run orchestration

struct RunContext {
  const ExperimentConfig& cfg;
  Command command;
  RunManifest& manifest;
  std::ostream& log;
  std::size_t window_count = 0;  // resolved
  bool multi_delta2 = false;
};

struct SpectrumBundle {
  SectorDecompositions decomps;
  GlobalSpectrum spectrum;
};

SpectrumBundle obtain_spectrum(RunContext& ctx, double delta2) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ChainGeometry geometry(cfg.sites, cfg.left_sites);
  const std::string tag = "delta2=" + fmt_g(delta2);

  SpectrumBundle bundle;
  const auto t0 = std::chrono::steady_clock::now();
  bool from_cache = false;
  const fs::path path = cache_file(cfg, delta2);
  if (cfg.use_cache &&
      load_spectra(path, geometry, delta2, bundle.decomps)) {
    from_cache = true;
    ctx.log << "[spectrum " << tag << "] loaded cache " << path.string()
            << "\n";
  } else {
    bundle.decomps = with_stage("diagonalize " + tag, [&] {
      return diagonalize_all_sectors(geometry, CouplingParams{delta2},
                                     cfg.diag_tol, cfg.threads);
    });
    if (cfg.use_cache) store_spectra(path, bundle.decomps);
    ctx.log << "[spectrum " << tag << "] diagonalized " << cfg.sites + 1
            << " sectors\n";
  }
  ctx.manifest.timings_ms.emplace_back(
      std::string(from_cache ? "load " : "diagonalize ") + tag, ms_since(t0));

  bundle.spectrum = merge_spectra(bundle.decomps);
  return bundle;
}

fs::path delta2_subdir(const RunContext& ctx, double delta2) {
  return ctx.multi_delta2 ? fs::path("delta2_" + fmt_g(delta2)) : fs::path();
}

void emit_file(RunContext& ctx, const fs::path& rel,
               const std::function<void(std::ostream&)>& writer) {
  const fs::path full = ctx.cfg.outdir / rel;
  if (!full.parent_path().empty()) fs::create_directories(full.parent_path());
  {
    std::ofstream out(full, std::ios::binary);
    if (!out) throw DomainError("cannot open " + full.string() + " for write");
    writer(out);
    if (!out) throw DomainError("failed writing " + full.string());
  }
  ctx.manifest.files.push_back(hash_file(ctx.cfg.outdir, rel));
  ctx.log << "wrote " << (ctx.cfg.outdir / rel).generic_string() << "\n";
}

std::string shell_policy_string(const ExperimentConfig& cfg) {
  switch (cfg.shell_policy) {
    case ShellPolicyKind::peak_dos:
      return "peak_dos";
    case ShellPolicyKind::by_center:
      return "center:" + format_double(cfg.shell_center) +
             ",width:" + format_double(cfg.shell_width);
    case ShellPolicyKind::by_window:
      return "window:" + std::to_string(cfg.shell_window);
  }
  return "unknown";
}

CsvMetadata base_metadata(const RunContext& ctx, double delta2) {
  const ExperimentConfig& cfg = ctx.cfg;
  CsvMetadata meta;
  meta.emplace_back("tool", std::string("spinshell ") + kVersion);
  meta.emplace_back("n", std::to_string(cfg.sites));
  meta.emplace_back("l1", std::to_string(cfg.left_sites));
  meta.emplace_back("delta2", format_double(delta2));
  meta.emplace_back("window_count", std::to_string(ctx.window_count));
  meta.emplace_back("edge_trim", format_double(cfg.edge_trim));
  meta.emplace_back("dos_windowing", "equal_count");
  meta.emplace_back("shell_policy", shell_policy_string(cfg));
  meta.emplace_back("samples", std::to_string(cfg.samples));
  meta.emplace_back("seed", std::to_string(cfg.seed));
  meta.emplace_back("diag_tol", format_double(cfg.diag_tol));
  return meta;
}

EnergyShell resolve_shell(const RunContext& ctx, const GlobalSpectrum& spectrum,
                          const DosEstimate& dos) {
  switch (ctx.cfg.shell_policy) {
    case ShellPolicyKind::by_center:
      return shell_by_center(spectrum, ctx.cfg.shell_center,
                             ctx.cfg.shell_width);
    case ShellPolicyKind::by_window:
      return shell_by_window(spectrum, dos, ctx.cfg.shell_window);
    case ShellPolicyKind::peak_dos:
      break;
  }
  return shell_at_peak_dos(spectrum, dos);
}

double retained_span(const GlobalSpectrum& spectrum, const DosEstimate& dos) {
  const double lo = spectrum.entries[dos.trimmed_per_side].energy;
  const double hi =
      spectrum.entries[dos.trimmed_per_side + dos.retained - 1].energy;
  return hi - lo;
}

void run_spectrum(RunContext& ctx) {
  for (const double delta2 : ctx.cfg.delta2) {
    SpectrumBundle bundle = obtain_spectrum(ctx, delta2);
    const DosEstimate dos = with_stage("dos delta2=" + fmt_g(delta2), [&] {
      return estimate_dos(bundle.spectrum, ctx.window_count,
                          ctx.cfg.edge_trim);
    });
    const fs::path dir = delta2_subdir(ctx, delta2);
    const CsvMetadata meta = base_metadata(ctx, delta2);
    emit_file(ctx, dir / "spectrum.csv", [&](std::ostream& out) {
      write_spectrum_csv(out, bundle.spectrum, meta);
    });
    emit_file(ctx, dir / "dos.csv", [&](std::ostream& out) {
      write_dos_csv(out, dos, meta);
    });
  }
}

void run_entropy(RunContext& ctx) {
  const ChainGeometry geometry(ctx.cfg.sites, ctx.cfg.left_sites);
  for (const double delta2 : ctx.cfg.delta2) {
    SpectrumBundle bundle = obtain_spectrum(ctx, delta2);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = with_stage("entropy delta2=" + fmt_g(delta2), [&] {
      return eigenstate_entropy_sweep(bundle.spectrum, bundle.decomps,
                                      geometry, ctx.cfg.threads);
    });
    ctx.manifest.timings_ms.emplace_back("entropy delta2=" + fmt_g(delta2),
                                         ms_since(t0));
    const fs::path dir = delta2_subdir(ctx, delta2);
    const CsvMetadata meta = base_metadata(ctx, delta2);
    emit_file(ctx, dir / "eigenstate_entropy.csv", [&](std::ostream& out) {
      write_eigenstate_entropy_csv(out, rows, meta);
    });
  }
}

void run_shells(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ChainGeometry geometry(cfg.sites, cfg.left_sites);
  for (const double delta2 : cfg.delta2) {
    const std::string tag = "delta2=" + fmt_g(delta2);
    SpectrumBundle bundle = obtain_spectrum(ctx, delta2);
    const DosEstimate dos = with_stage("dos " + tag, [&] {
      return estimate_dos(bundle.spectrum, ctx.window_count, cfg.edge_trim);
    });
    const EnergyShell shell = with_stage("shell " + tag, [&] {
      return resolve_shell(ctx, bundle.spectrum, dos);
    });

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<ShellAverageRow> rows;
    const ShellAverage eig = with_stage("shells " + tag, [&] {
      return eigenstate_shell_average(shell, bundle.decomps, geometry);
    });
    rows.push_back(ShellAverageRow{shell.center(), shell.width(), shell.dim(),
                                   eig, eig.count, cfg.seed});
    const ShellAverage haar = with_stage("shells " + tag, [&] {
      return haar_shell_average(shell, bundle.decomps, geometry, cfg.samples,
                                cfg.seed, cfg.threads);
    });
    rows.push_back(ShellAverageRow{shell.center(), shell.width(), shell.dim(),
                                   haar, haar.count, cfg.seed});

    const ProductShell pshell = with_stage("product " + tag, [&] {
      return build_product_shell(geometry, CouplingParams{delta2},
                                 shell.center(), shell.width());
    });
    const ShellAverage prod = with_stage("product " + tag, [&] {
      return typical_product_state_average(pshell, cfg.samples, cfg.seed,
                                           cfg.threads);
    });
    rows.push_back(ShellAverageRow{shell.center(), shell.width(), shell.dim(),
                                   prod, prod.count, cfg.seed});
    ctx.manifest.timings_ms.emplace_back("shells " + tag, ms_since(t0));

    const double ln_de = std::log(static_cast<double>(shell.dim()));
    const ProductShellRow prow{
        shell.center(),
        shell.width(),
        shell.dim(),
        pshell.pairs.size(),
        pshell.d1,
        pshell.d2,
        std::log(static_cast<double>(pshell.d1) *
                 static_cast<double>(pshell.d2)) /
            ln_de};

    const fs::path dir = delta2_subdir(ctx, delta2);
    CsvMetadata meta = base_metadata(ctx, delta2);
    emit_file(ctx, dir / "shell_average.csv", [&](std::ostream& out) {
      write_shell_average_csv(out, rows, meta);
    });
    meta.emplace_back("d1_d2_definition", "participating_levels");
    emit_file(ctx, dir / "product_shell.csv", [&](std::ostream& out) {
      write_product_shell_csv(out, std::vector<ProductShellRow>{prow}, meta);
    });
  }
}

void run_fit(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ChainGeometry geometry(cfg.sites, cfg.left_sites);
  std::vector<FitRow> fit_rows;

  for (const double delta2 : cfg.delta2) {
    const std::string tag = "delta2=" + fmt_g(delta2);
    SpectrumBundle bundle = obtain_spectrum(ctx, delta2);
    const DosEstimate dos = with_stage("dos " + tag, [&] {
      return estimate_dos(bundle.spectrum, ctx.window_count, cfg.edge_trim);
    });

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<ShellAverage> window_averages(dos.windows.size());
    with_stage("windows " + tag, [&] {
      parallel_for(dos.windows.size(), cfg.threads, [&](std::size_t w) {
        window_averages[w] = eigenstate_shell_average(
            shell_by_window(bundle.spectrum, dos, w), bundle.decomps,
            geometry);
      });
    });
    ctx.manifest.timings_ms.emplace_back("window averages " + tag,
                                         ms_since(t0));

    for (const SpectrumHalf half : {SpectrumHalf::left, SpectrumHalf::right}) {
      const LinearFit fit = with_stage("fit " + tag, [&] {
        return fit_entropy_vs_lndos(dos, window_averages, half);
      });
      fit_rows.push_back(FitRow{
          half, fit, cfg.left_sites, cfg.sites, delta2,
          static_cast<double>(cfg.left_sites) /
              static_cast<double>(cfg.sites)});
    }

    // Gamma estimate over a central shell wide enough that ln(d_E) sits on
    // the ln(DOS) scale; dos windows are far too narrow for that.
    const double width = cfg.gamma_width_fraction *
                         retained_span(bundle.spectrum, dos);
    const double center = dos.windows[dos.peak_window()].center;
    const EnergyShell gshell = with_stage("gamma " + tag, [&] {
      return shell_by_center(bundle.spectrum, center, width);
    });
    const ShellAverage gavg = with_stage("gamma " + tag, [&] {
      return eigenstate_shell_average(gshell, bundle.decomps, geometry);
    });
    const GammaEstimate gamma = estimate_gamma(gavg, gshell, geometry);

    const fs::path dir = delta2_subdir(ctx, delta2);
    CsvMetadata meta = base_metadata(ctx, delta2);
    meta.emplace_back("gamma_shell_center", format_double(gshell.center()));
    meta.emplace_back("gamma_shell_width", format_double(gshell.width()));
    emit_file(ctx, dir / "gamma.csv", [&](std::ostream& out) {
      write_gamma_csv(out, std::vector<GammaEstimate>{gamma}, meta);
    });
  }

  // One combined table across couplings; it carries a delta2 column.
  CsvMetadata meta = base_metadata(ctx, cfg.delta2.front());
  for (auto& [key, value] : meta) {
    if (key == "delta2") value = "per-row";
  }
  emit_file(ctx, "fit_lndos.csv", [&](std::ostream& out) {
    write_fit_lndos_csv(out, fit_rows, meta);
  });
}

void run_volume(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  for (const double delta2 : cfg.delta2) {
    const std::string tag = "delta2=" + fmt_g(delta2);
    SpectrumBundle bundle = obtain_spectrum(ctx, delta2);
    const DosEstimate dos = with_stage("dos " + tag, [&] {
      return estimate_dos(bundle.spectrum, ctx.window_count, cfg.edge_trim);
    });
    const EnergyShell shell = with_stage("shell " + tag, [&] {
      return resolve_shell(ctx, bundle.spectrum, dos);
    });

    std::vector<int> sizes;
    for (int l1 = cfg.scan_min; l1 <= cfg.scan_max; ++l1) sizes.push_back(l1);
    const auto t0 = std::chrono::steady_clock::now();
    const VolumeLawScan scan = with_stage("volume " + tag, [&] {
      return volume_law_scan(bundle.decomps, shell, sizes);
    });
    ctx.manifest.timings_ms.emplace_back("volume " + tag, ms_since(t0));

    const fs::path dir = delta2_subdir(ctx, delta2);
    CsvMetadata meta = base_metadata(ctx, delta2);
    meta.emplace_back("scan_l1", std::to_string(cfg.scan_min) + ".." +
                                     std::to_string(cfg.scan_max));
    meta.emplace_back("shell_center", format_double(shell.center()));
    meta.emplace_back("shell_width", format_double(shell.width()));
    meta.emplace_back("shell_d_E", std::to_string(shell.dim()));
    emit_file(ctx, dir / "volume_law.csv", [&](std::ostream& out) {
      write_volume_law_csv(out, scan, meta);
    });
    ctx.log << "volume " << tag << ": slope "
            << format_double(scan.fit.slope) << ", R^2 "
            << format_double(scan.fit.r_squared) << "\n";
  }
}

void run_page(RunContext& ctx) {
  const double exact =
      page_average(ctx.cfg.page_d1, ctx.cfg.page_d2, PageMode::exact);
  const double asymptotic =
      page_average(ctx.cfg.page_d1, ctx.cfg.page_d2, PageMode::asymptotic);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "page_exact %.6f\n", exact);
  ctx.log << buf;
  std::snprintf(buf, sizeof(buf), "page_asymptotic %.6f\n", asymptotic);
  ctx.log << buf;
}

std::vector<std::pair<std::string, std::string>> manifest_config(
    const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  std::vector<std::pair<std::string, std::string>> echo;
  if (ctx.command == Command::page) {
    echo.emplace_back("d1", std::to_string(cfg.page_d1));
    echo.emplace_back("d2", std::to_string(cfg.page_d2));
    return echo;
  }
  echo.emplace_back("n", std::to_string(cfg.sites));
  echo.emplace_back("l1", std::to_string(cfg.left_sites));
  std::string deltas;
  for (std::size_t i = 0; i < cfg.delta2.size(); ++i) {
    if (i > 0) deltas += ",";
    deltas += format_double(cfg.delta2[i]);
  }
  echo.emplace_back("delta2", deltas);
  echo.emplace_back("window_count", std::to_string(ctx.window_count));
  echo.emplace_back("edge_trim", format_double(cfg.edge_trim));
  echo.emplace_back("shell_policy", shell_policy_string(cfg));
  echo.emplace_back("gamma_width_fraction",
                    format_double(cfg.gamma_width_fraction));
  echo.emplace_back("samples", std::to_string(cfg.samples));
  echo.emplace_back("seed", std::to_string(cfg.seed));
  echo.emplace_back("diag_tol", format_double(cfg.diag_tol));
  if (ctx.command == Command::volume) {
    echo.emplace_back("l1_scan", std::to_string(cfg.scan_min) + ".." +
                                     std::to_string(cfg.scan_max));
  }
  return echo;
}

std::string command_name(Command command) {
  for (const auto& [name, cmd] : kCommands) {
    if (cmd == command) return name;
  }
  return "unknown";
}

void write_manifest(const RunContext& ctx) {
  nlohmann::ordered_json j;
  j["command"] = ctx.manifest.command;
  j["version"] = ctx.manifest.version;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : ctx.manifest.config_echo) config[k] = v;
  j["config"] = config;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : ctx.manifest.files) {
    files.push_back({{"name", f.name},
                     {"bytes", f.bytes},
                     {"fnv1a64", f.fnv1a64}});
  }
  j["files"] = files;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& [k, v] : ctx.manifest.timings_ms) timings[k] = v;
  j["timings_ms"] = timings;

  fs::create_directories(ctx.cfg.outdir);
  std::ofstream out(ctx.cfg.outdir / "manifest.json", std::ios::binary);
  out << j.dump(2) << "\n";
}

}  // namespace

ParsedInvocation parse_config(const std::vector<std::string>& args) {
  CliState state;
  auto app = build_cli(state);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app->parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app->help("", CLI::AppFormatMode::All));
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app->help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const CLI::App* sub = app->get_subcommands().front();
  const Command command = kCommands.at(sub->get_name());
  apply_preset(app.get(), state);
  validate_config(command, app.get(), state);
  return ParsedInvocation{command, state.cfg};
}

std::string usage_text() {
  CliState state;
  auto app = build_cli(state);
  return app->help("", CLI::AppFormatMode::All);
}

RunManifest run_command(const ParsedInvocation& invocation, std::ostream& log) {
  const ExperimentConfig& cfg = invocation.config;
  RunManifest manifest;
  manifest.command = command_name(invocation.command);
  manifest.version = kVersion;

  RunContext ctx{cfg, invocation.command, manifest, log};
  if (invocation.command != Command::page) {
    if (cfg.window_count != 0) {
      ctx.window_count = cfg.window_count;
    } else {
      // Auto window count, clamped for small spectra: windows of fewer than
      // ~8 states collide with the exact spin-flip degeneracies.
      const std::size_t total = std::size_t{1} << cfg.sites;
      const auto trimmed = static_cast<std::size_t>(
          std::floor(cfg.edge_trim * static_cast<double>(total)));
      const std::size_t retained = total - 2 * trimmed;
      ctx.window_count = std::max<std::size_t>(
          2, std::min(default_window_count(total), retained / 8));
    }
    ctx.multi_delta2 = cfg.delta2.size() > 1;
  }
  manifest.config_echo = manifest_config(ctx);

  switch (invocation.command) {
    case Command::spectrum:
      run_spectrum(ctx);
      break;
    case Command::entropy:
      run_entropy(ctx);
      break;
    case Command::shells:
      run_shells(ctx);
      break;
    case Command::fit:
      run_fit(ctx);
      break;
    case Command::volume:
      run_volume(ctx);
      break;
    case Command::page:
      run_page(ctx);
      break;
  }

  std::sort(manifest.files.begin(), manifest.files.end(),
            [](const FileRecord& a, const FileRecord& b) {
              return a.name < b.name;
            });
  write_manifest(ctx);
  return manifest;
}

}  // namespace spinshell

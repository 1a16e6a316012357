#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "fefp/config.hpp"
#include "fefp/error.hpp"
#include "fefp/scenario.hpp"
#include "fefp/simd/kernels.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw fefp::ConfigError("cannot write " + p.string());
  return os;
}

int run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> output,
        std::optional<int> threads, bool plots) {
  fefp::SimulationConfig cfg;
  try {
    cfg = fefp::load_config(path);
    if (seed) cfg.seed = *seed;
    if (output) cfg.output_dir = *output;
    if (threads) cfg.threads = *threads;
    cfg.emit_plots = plots;
    cfg.validate();
  } catch (const fefp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const fs::path dir(cfg.output_dir);
  try {
    fs::create_directories(dir);
    auto echo = open_out(dir / "config_echo.txt");
    fefp::write_config_echo(echo, cfg);
    echo << "# seed " << cfg.seed << " threads " << cfg.threads << " kernels " << fefp::simd::active_kernels().name
         << '\n';
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (cfg.scenario == fefp::Scenario::kHomogeneous) {
      auto csv = open_out(dir / "homogeneous.csv");
      const auto res = fefp::run_homogeneous(cfg, &csv);
      auto summary = open_out(dir / "summary.txt");
      summary << "rows " << res.rows.size() << "\nfallback_steps " << res.fallbacks << '\n';
      std::cout << "homogeneous run: " << res.rows.size() << " rows, " << res.fallbacks << " fallback steps\n";
    } else {
      const auto res = fefp::run_shock(cfg, &std::cout);
      auto field = open_out(dir / "field.csv");
      fefp::write_field_csv(field, res.field);
      auto slice = open_out(dir / "slice.csv");
      fefp::write_field_csv(slice, res.slice);
      auto summary = open_out(dir / "summary.txt");
      summary << std::setprecision(8) << "L_ref " << res.L_ref << "\nparticle_weight " << res.particle_weight
              << "\nfinal_particles " << res.final_particles << "\nclosed_cell_steps " << res.closed_cell_steps
              << "\nfallback_cell_steps " << res.fallback_cell_steps << "\naudited_steps "
              << res.conservation.audited_steps << "\nmax_momentum_rel " << res.conservation.max_momentum_rel
              << "\nmax_energy_rel " << res.conservation.max_energy_rel << '\n';
      if (res.metrics)
        summary << "peak_T " << res.metrics->peak_T << "\nthickness " << res.metrics->thickness << "\nx10 "
                << res.metrics->x10 << "\nx90 " << res.metrics->x90 << '\n';
      else
        summary << "shock_metrics undefined\n";
    }
    if (cfg.emit_plots) {
      auto py = open_out(dir / "plot.py");
      fefp::write_plot_script(py, cfg.scenario);
    }
  } catch (const fefp::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const fefp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fokker-Planck particle solver"};
  app.require_subcommand(1);
  auto* cmd = app.add_subcommand("run", "run a scenario from a config file");
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<int> threads;
  bool plots = false;
  cmd->add_option("config", path, "config file")->required();
  cmd->add_option("--seed", seed, "override run.seed");
  cmd->add_option("--output", output, "override run.output_dir");
  cmd->add_option("--threads", threads, "override run.threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--emit-plots", plots, "write plot.py next to the CSVs");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  return run(path, seed, output, threads, plots);
}

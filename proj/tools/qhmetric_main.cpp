#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "qhm/report.hpp"

// Thin argv adapter: everything of substance lives in run_command so the
// tests can drive the exact same paths without spawning processes.

int main(int argc, char** argv) {
  qhm::RunConfig cfg;
  CLI::App app{"Metric construction and regime scans for quasi-Hermitian Hamiltonians"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--model", cfg.model_id, "Model id: two | four");
    sub->add_option("--tol", cfg.tol, "Classification tolerance");
    sub->add_option("--tol-t", cfg.tol_t, "Boundary localization width");
    sub->add_option("--format", cfg.format, "Output format: csv | json");
    sub->add_option("--out", cfg.out_path, "Write the report here instead of stdout");
    sub->add_option("--threads", cfg.threads, "Worker threads for grid sweeps");
  };
  auto add_grid = [&cfg](CLI::App* sub) {
    sub->add_option("--t-min", cfg.t_min, "Left end of the t grid");
    sub->add_option("--t-max", cfg.t_max, "Right end of the t grid");
    sub->add_option("--t-step", cfg.t_step, "Grid spacing");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "Energy levels over a t grid");
  add_common(spectrum);
  add_grid(spectrum);

  CLI::App* scan = app.add_subcommand("scan", "Metric spectra and regimes over a t grid");
  add_common(scan);
  add_grid(scan);
  scan->add_option("--rho", cfg.rhos, "Interpolation exponents to sweep");
  scan->add_option("--figure", cfg.figure, "Preset sweep: 1, 2 or 3");
  scan->add_option("--kappa", cfg.kappa, "Spectral weights replacing the baseline metric");

  CLI::App* boundary = app.add_subcommand("boundary", "Regime transition points per rho");
  add_common(boundary);
  add_grid(boundary);
  boundary->add_option("--rho", cfg.rhos, "Interpolation exponents to sweep");
  boundary->add_option("--kappa", cfg.kappa, "Spectral weights replacing the baseline metric");

  CLI::App* ep = app.add_subcommand("ep-probe", "Degeneracy diagnostics in a window");
  add_common(ep);
  ep->add_option("--t-center", cfg.t_center, "Window center");
  ep->add_option("--radius", cfg.radius, "Window half width");

  CLI::App* evolve = app.add_subcommand("evolve", "Schrodinger evolution with the metric norm");
  add_common(evolve);
  evolve->add_option("--rho", cfg.rhos, "Interpolation exponent of the metric");
  evolve->add_flag("--stationary", cfg.stationary, "Frozen Hamiltonian and metric");
  evolve->add_option("--t-fixed", cfg.t_fixed, "Parameter point for a stationary run");
  evolve->add_option("--horizon", cfg.horizon, "Stationary evolution time");
  evolve->add_option("--t0", cfg.t0, "Start of the parameter ramp");
  evolve->add_option("--t1", cfg.t1, "End of the parameter ramp");
  evolve->add_option("--steps", cfg.steps, "Integration steps (also the sample count)");

  CLI::App* verify = app.add_subcommand("verify", "Cross-module invariant suite");
  add_common(verify);
  verify->add_flag("--inject-identity-metric", cfg.inject_identity_metric,
                   "Deliberately wrong metric, to prove the checks bite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: BadConfig: " << e.what() << "\n";
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  cfg.command = active->get_name();
  if (active->count("--tol") > 0) cfg.tol_overridden = true;
  if (active->count("--threads") == 0) {
    if (const char* env = std::getenv("QHMETRIC_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v < 1) {
        std::cerr << "error: BadConfig: QHMETRIC_THREADS must be a positive integer\n";
        return 2;
      }
      cfg.threads = int(v);
    }
  }
  return qhm::run_command(cfg, std::cout, std::cerr);
}

#pragma once

#include <iosfwd>

#include "qhm/evolve.hpp"

namespace qhm {

// Everything the CLI parsed, with the defaults baked in.  Commands read the
// fields they care about and ignore the rest; validate_config rejects the
// combinations that make no sense before any work starts.
struct RunConfig {
  std::string command;
  std::string model_id = "two";
  std::vector<int> rhos = {0};
  double t_min = 0.05;
  double t_max = 0.95;
  double t_step = 0.05;
  double tol = 1e-10;
  bool tol_overridden = false;  // set when --tol was given explicitly
  double tol_t = 1e-9;
  int figure = 0;  // 0 = not a figure run
  std::string format = "csv";
  std::string out_path;  // empty = stdout
  int threads = 1;
  std::vector<double> kappa;  // empty = model's closed-form metric

  // evolve
  bool stationary = false;
  double t_fixed = 0.5;
  double horizon = 100.0;
  double t0 = 0.3;
  double t1 = 0.8;
  int steps = 2000;

  // ep-probe
  double t_center = 0.0;
  double radius = 0.1;

  // verify: swap the identity matrix in as the metric to prove the
  // residual check actually bites
  bool inject_identity_metric = false;
};

// Throws BadConfig; the CLI maps that to exit code 2.
void validate_config(const RunConfig& cfg);

std::vector<double> t_grid_of(const RunConfig& cfg);

// Scientific notation with 17 significant digits, enough to round-trip a
// double exactly.  All numeric CSV cells go through here.
std::string format_sci(double v);

std::string csv_of_scan(const std::vector<ScanReport>& reports);
std::string json_of_scan(const ScanReport& report);
ScanReport scan_of_json(const std::string& text);  // inverse of json_of_scan

// Preset figure sweeps.  Figures 1 and 3 rescale each trace by the top
// eigenvalue at the smallest grid point so the curves share a common start;
// figure 2 is raw.
struct FigureTrace {
  int figure = 0;
  std::string model_id;
  std::vector<int> rhos;
  std::vector<double> rescale;  // per rho; 1.0 everywhere for raw figures
  std::vector<double> t;
  // values[k][i]: k-th eigenvalue column (grouped per rho, ascending k
  // inside the group), i-th grid point; real parts after classification.
  std::vector<std::string> value_columns;
  std::vector<std::vector<double>> values;
  std::vector<std::string> regime_columns;  // one per rho
  std::vector<std::vector<std::string>> regimes;
};

FigureTrace figure_trace(int figure, double tol, int threads);
std::string csv_of_figure(const FigureTrace& trace);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
};

// tol_cap > 0 tightens every check whose own tolerance is looser; 0 keeps
// the per-check defaults.
std::vector<VerifyCheck> run_verify_suite(bool inject_identity_metric,
                                          double tol_cap = 0.0);

// Subcommand bodies.  Each returns the process exit code: 0 clean, 1 a
// check or scan reported a violation, 2 unusable configuration.
int cmd_spectrum(const RunConfig& cfg, std::ostream& out);
int cmd_metric_scan(const RunConfig& cfg, std::ostream& out);
int cmd_boundary(const RunConfig& cfg, std::ostream& out);
int cmd_ep_probe(const RunConfig& cfg, std::ostream& out);
int cmd_evolve(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);

// Validates, dispatches, routes output to cfg.out_path or `fallback`.
int run_command(const RunConfig& cfg, std::ostream& fallback, std::ostream& err);

}  // namespace qhm

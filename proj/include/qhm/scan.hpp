#pragma once

#include "qhm/models.hpp"

namespace qhm {

// What kind of inner product Theta_rho(t) defines at one parameter point.
enum class Regime {
  UnitaryMetric,      // spectrum real, all positive: genuine metric
  KreinPseudoMetric,  // spectrum real, mixed signs, nonsingular
  ComplexSpectrum,    // eigenvalues left the real axis
  SingularMetric,     // an eigenvalue vanishes at tolerance
};

const char* regime_name(Regime r);

struct RegimePoint {
  Regime regime;
  CVec eigenvalues;  // sorted by (real, imag); the witness spectrum
};

struct Boundary {
  double t;
  Regime from;  // regime just below t
  Regime to;    // regime just above t
};

// Theta_rho(t) for a model, as the unchecked product Theta_0 H^rho.  The
// scanner has to keep working where quasi-Hermiticity itself fails, so no
// intertwining residual test here.
Matrix scan_theta(const ToyModel& m, int rho, double t);

// Classification of one point.  An empty kappa means the model's closed-form
// baseline metric; a non empty one swaps in the kappa-metric of the same
// Hamiltonian.  Order of tests: complex beats singular beats sign.  A
// degenerate spectrum on the kappa route reads as SingularMetric, which is
// what it limits to.
RegimePoint classify_point(const ToyModel& m, int rho, double t, double tol = 1e-10,
                           const std::vector<double>& kappa = {});

// All regime transitions in [t_lo, t_hi]: coarse grid pass, then bisection
// to width tol_t on every classification change.  Grid points inside the
// near-EP exclusion zone |t| < 1e-4 are dropped; the metric is singular at
// the EP itself and classification there is noise.  Unitary -> Krein
// crossings are refined on the sign of det Theta_rho, which flips
// transversally even when the vanishing eigenvalue only grazes zero.
std::vector<Boundary> boundary_scan(const ToyModel& m, int rho, double t_lo, double t_hi,
                                    double tol_t = 1e-9, int grid_points = 400,
                                    double tol = 1e-10,
                                    const std::vector<double>& kappa = {});

// First persistent exit from the unitary regime in an ascending boundary
// list.  Zero-width singular touches (an eigenvalue grazing zero and coming
// straight back) are skipped; NaN when the metric never leaves the unitary
// regime.
double first_unitary_exit(const std::vector<Boundary>& boundaries, double tol_t = 1e-9);

// Diagnostics around a suspected non diagonalizable point of H itself.
// Golden-section minimization of the eigenvalue gap over the window.
struct EpReport {
  double t_ep = 0.0;
  double min_gap = 0.0;
  double eigvec_condition = 1.0;
  int metric_rank = 0;   // numeric rank of the baseline metric at t_ep
  bool flagged = false;  // min_gap <= tol and eigvec_condition >= 1/tol
};

EpReport ep_probe(const ToyModel& m, double t_center, double radius,
                  double tol = 1e-10);

// One t-grid sweep of a model at fixed rho: per-point eigenvalue traces and
// classifications, plus the localized boundaries of the swept interval.
// threads > 1 evaluates grid points concurrently; results are merged in
// grid order, so the report is identical for any thread count.
struct ScanReport {
  std::string model_id;
  int rho = 0;
  double tol = 1e-10;
  double tol_t = 1e-9;
  std::vector<double> t_grid;
  std::vector<RegimePoint> points;
  std::vector<Boundary> boundaries;
};

ScanReport scan_model(const ToyModel& m, int rho, const std::vector<double>& t_grid,
                      double tol = 1e-10, double tol_t = 1e-9, int threads = 1,
                      const std::vector<double>& kappa = {});

}  // namespace qhm

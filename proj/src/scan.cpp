#include "qhm/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace qhm {

namespace {

constexpr double kEpExclusion = 1e-4;  // metric is singular at the EP itself

Matrix build_theta(const ToyModel& m, int rho, double t, double tol,
                   const std::vector<double>& kappa) {
  if (kappa.empty()) return scan_theta(m, rho, t);
  AdjointBasis b = adjoint_basis(m.hamiltonian(t), tol);
  return metric_rho(metric_kappa(b, kappa), m.hamiltonian(t), rho);
}

RegimePoint classify_matrix(const Matrix& th, double tol) {
  EigenDecomposition e;
  if (th.hermiticity_defect() <= tol * std::max(1.0, th.max_abs()))
    e = eig_hermitian((th + th.adjoint()) * cplx(0.5), 1.0);
  else
    e = eig_general(th, tol);

  double scale = 0.0;
  for (const cplx& z : e.eigenvalues) scale = std::max(scale, std::abs(z));
  RegimePoint p{Regime::SingularMetric, e.eigenvalues};
  if (scale == 0.0) return p;

  double max_imag = 0.0, min_abs_re = std::numeric_limits<double>::infinity();
  bool all_positive = true;
  for (const cplx& z : e.eigenvalues) {
    max_imag = std::max(max_imag, std::abs(z.imag()));
    min_abs_re = std::min(min_abs_re, std::abs(z.real()));
    all_positive = all_positive && z.real() > 0.0;
  }
  if (max_imag > tol * scale)
    p.regime = Regime::ComplexSpectrum;
  else if (min_abs_re <= tol * scale)
    p.regime = Regime::SingularMetric;
  else
    p.regime = all_positive ? Regime::UnitaryMetric : Regime::KreinPseudoMetric;
  return p;
}

// Sign of det Theta_rho = det Theta_0 * (det H)^rho, taken factor by factor.
// The product matrix loses the sign to roundoff near an odd crossing (the
// vanishing eigenvalue scales like delta^rho there), while det H itself
// crosses zero transversally and keeps full precision.  0.0 marks "unusable".
double det_sign(const ToyModel& m, int rho, double t, double tol,
                const std::vector<double>& kappa) {
  try {
    const Matrix base =
        kappa.empty() ? m.metric0(t)
                      : metric_kappa(adjoint_basis(m.hamiltonian(t), tol), kappa);
    cplx d = det(base);
    if (rho > 0) {
      const cplx dh = det(m.hamiltonian(t));
      for (int k = 0; k < rho; ++k) d *= dh;
    }
    if (d == cplx(0.0)) return 0.0;
    if (std::abs(d.imag()) > 1e-6 * std::abs(d)) return 0.0;
    return d.real() > 0.0 ? 1.0 : -1.0;
  } catch (const Error&) {
    return 0.0;
  }
}

double bisect_on_class(const ToyModel& m, int rho, double lo, double hi, Regime from,
                       double tol_t, double tol, const std::vector<double>& kappa) {
  for (int i = 0; i < 200 && hi - lo > tol_t; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (classify_point(m, rho, mid, tol, kappa).regime == from ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double bisect_on_det(const ToyModel& m, int rho, double lo, double hi, double sign_lo,
                     double tol_t, double tol, const std::vector<double>& kappa) {
  for (int i = 0; i < 200 && hi - lo > tol_t; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (det_sign(m, rho, mid, tol, kappa) == sign_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Run {
  Regime regime;
  int first, last;  // grid indices, inclusive
};

// Turn per-point classifications into boundaries.  A singular run flanked by
// two different nonsingular regimes with a determinant sign flip across it
// is a genuine odd crossing: the tolerance smears the point where the
// eigenvalue passes zero into a band, but det Theta_rho still changes sign
// at one sharp t inside, and that is the boundary worth reporting.
std::vector<Boundary> refine_transitions(const ToyModel& m, int rho,
                                         const std::vector<double>& grid,
                                         const std::vector<Regime>& classes,
                                         double tol_t, double tol,
                                         const std::vector<double>& kappa) {
  std::vector<Run> runs;
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
    if (!runs.empty() && runs.back().regime == classes[i])
      runs.back().last = i;
    else
      runs.push_back({classes[i], i, i});
  }

  std::vector<Boundary> out;
  for (size_t r = 0; r + 1 < runs.size(); ++r) {
    const Run& a = runs[r];
    const Run& b = runs[r + 1];

    if (b.regime == Regime::SingularMetric && r + 2 < runs.size()) {
      const Run& c = runs[r + 2];
      if (c.regime != a.regime && c.regime != Regime::SingularMetric) {
        const double s_lo = det_sign(m, rho, grid[a.last], tol, kappa);
        const double s_hi = det_sign(m, rho, grid[c.first], tol, kappa);
        if (s_lo != 0.0 && s_hi == -s_lo) {
          const double t = bisect_on_det(m, rho, grid[a.last], grid[c.first], s_lo,
                                         tol_t, tol, kappa);
          out.push_back({t, a.regime, c.regime});
          ++r;  // consume the singular run as well
          continue;
        }
      }
    }

    const bool unitary_krein =
        (a.regime == Regime::UnitaryMetric && b.regime == Regime::KreinPseudoMetric) ||
        (a.regime == Regime::KreinPseudoMetric && b.regime == Regime::UnitaryMetric);
    double t;
    const double s_lo = unitary_krein ? det_sign(m, rho, grid[a.last], tol, kappa) : 0.0;
    if (unitary_krein && s_lo != 0.0 &&
        det_sign(m, rho, grid[b.first], tol, kappa) == -s_lo)
      t = bisect_on_det(m, rho, grid[a.last], grid[b.first], s_lo, tol_t, tol, kappa);
    else
      t = bisect_on_class(m, rho, grid[a.last], grid[b.first], a.regime, tol_t, tol,
                          kappa);
    out.push_back({t, a.regime, b.regime});
  }
  return out;
}

std::vector<double> drop_exclusion_zone(const std::vector<double>& grid) {
  std::vector<double> kept;
  kept.reserve(grid.size());
  for (double t : grid)
    if (std::abs(t) >= kEpExclusion) kept.push_back(t);
  return kept;
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::UnitaryMetric: return "unitary";
    case Regime::KreinPseudoMetric: return "krein";
    case Regime::ComplexSpectrum: return "complex";
    case Regime::SingularMetric: return "singular";
  }
  return "unknown";
}

Matrix scan_theta(const ToyModel& m, int rho, double t) {
  return metric_rho(m.metric0(t), m.hamiltonian(t), rho);
}

RegimePoint classify_point(const ToyModel& m, int rho, double t, double tol,
                           const std::vector<double>& kappa) {
  Matrix th;
  try {
    th = build_theta(m, rho, t, tol, kappa);
  } catch (const Error& e) {
    if (e.kind == Err::DegenerateSpectrum)
      // The colliding energies are the witness; the metric limit is rank
      // deficient there.
      return {Regime::SingularMetric, eig_general(m.hamiltonian(t), tol).eigenvalues};
    throw;
  }
  return classify_matrix(th, tol);
}

std::vector<Boundary> boundary_scan(const ToyModel& m, int rho, double t_lo, double t_hi,
                                    double tol_t, int grid_points, double tol,
                                    const std::vector<double>& kappa) {
  if (!(t_lo < t_hi) || !(tol_t > 0.0) || grid_points < 2)
    throw Error(Err::BadConfig, "boundary_scan needs t_lo < t_hi, tol_t > 0, grid >= 2");

  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i)
    grid[i] = t_lo + (t_hi - t_lo) * i / (grid_points - 1);
  grid = drop_exclusion_zone(grid);
  if (grid.size() < 2) return {};

  std::vector<Regime> classes(grid.size());
  for (size_t i = 0; i < grid.size(); ++i)
    classes[i] = classify_point(m, rho, grid[i], tol, kappa).regime;
  return refine_transitions(m, rho, grid, classes, tol_t, tol, kappa);
}

double first_unitary_exit(const std::vector<Boundary>& boundaries, double tol_t) {
  (void)tol_t;
  for (size_t i = 0; i < boundaries.size(); ++i) {
    const Boundary& b = boundaries[i];
    if (b.from != Regime::UnitaryMetric) continue;
    // A grazing zero: singular for an instant, then unitary again.
    if (b.to == Regime::SingularMetric && i + 1 < boundaries.size() &&
        boundaries[i + 1].from == Regime::SingularMetric &&
        boundaries[i + 1].to == Regime::UnitaryMetric) {
      ++i;
      continue;
    }
    return b.t;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

EpReport ep_probe(const ToyModel& m, double t_center, double radius, double tol) {
  if (!(radius > 0.0)) throw Error(Err::BadConfig, "ep_probe needs radius > 0");

  // Gap from the model's exact energies.  A numeric spectrum near a fourfold
  // degeneracy is smeared by the fourth root of the entry roundoff (about
  // 1e-4 here), which would bury the minimum under a noise plateau; the
  // diagnostics at the minimizer still come from the numeric route.
  auto gap = [&](double t) {
    const std::vector<double> e = m.energies(t);
    double g = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < e.size(); ++i)
      for (size_t j = i + 1; j < e.size(); ++j)
        g = std::min(g, std::abs(e[i] - e[j]));
    return g;
  };

  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = t_center - radius, b = t_center + radius;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = gap(c), fd = gap(d);
  for (int i = 0; i < 140 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = gap(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = gap(d);
    }
  }

  EpReport r;
  r.t_ep = fc < fd ? c : d;
  r.min_gap = std::min(fc, fd);
  r.eigvec_condition = eig_general(m.hamiltonian(r.t_ep), tol).condition;
  r.metric_rank = numeric_rank(m.metric0(r.t_ep), tol);
  r.flagged = r.min_gap <= tol && r.eigvec_condition >= 1.0 / tol;
  return r;
}

ScanReport scan_model(const ToyModel& m, int rho, const std::vector<double>& t_grid,
                      double tol, double tol_t, int threads,
                      const std::vector<double>& kappa) {
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i - 1] < t_grid[i]))
      throw Error(Err::BadConfig, "scan grid must be strictly ascending");

  ScanReport rep;
  rep.model_id = m.id;
  rep.rho = rho;
  rep.tol = tol;
  rep.tol_t = tol_t;
  rep.t_grid = t_grid;
  rep.points.resize(t_grid.size());

  threads = std::clamp(threads, 1, 64);
  if (threads == 1 || t_grid.size() < 2) {
    for (size_t i = 0; i < t_grid.size(); ++i)
      rep.points[i] = classify_point(m, rho, t_grid[i], tol, kappa);
  } else {
    // Index-claiming workers; every point is written exactly once, so the
    // merged result cannot depend on scheduling.
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (size_t i = next.fetch_add(1); i < t_grid.size(); i = next.fetch_add(1)) {
        try {
          rep.points[i] = classify_point(m, rho, t_grid[i], tol, kappa);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // Boundary localization reuses the sweep's own classifications, with the
  // EP exclusion zone applied to the bracketing only.
  std::vector<double> grid;
  std::vector<Regime> classes;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (std::abs(t_grid[i]) < kEpExclusion) continue;
    grid.push_back(t_grid[i]);
    classes.push_back(rep.points[i].regime);
  }
  if (grid.size() >= 2)
    rep.boundaries = refine_transitions(m, rho, grid, classes, tol_t, tol, kappa);
  return rep;
}

}  // namespace qhm

#include "qhm/evolve.hpp"

#include <cmath>

namespace qhm {

namespace {

double physical_norm(const Matrix& theta, const CVec& psi) {
  return vec_dot(psi, theta * psi).real();
}

double drift_of(const std::vector<double>& norms) {
  if (norms.empty()) return 0.0;
  const double base = std::max(std::abs(norms.front()), 1e-300);
  double worst = 0.0;
  for (double n : norms) worst = std::max(worst, std::abs(n - norms.front()));
  return worst / base;
}

// Positive definiteness in the same spirit as the regime classifier: real
// spectrum, every eigenvalue safely above zero relative to the largest.
bool positive_definite(const Matrix& theta) {
  EigenDecomposition e;
  if (theta.hermiticity_defect() <= 1e-10 * std::max(1.0, theta.max_abs()))
    e = eig_hermitian((theta + theta.adjoint()) * cplx(0.5), 1.0);
  else
    e = eig_general(theta, 1e-10);
  double scale = 0.0;
  for (const cplx& z : e.eigenvalues) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return false;
  for (const cplx& z : e.eigenvalues) {
    if (std::abs(z.imag()) > 1e-10 * scale) return false;
    if (z.real() <= 1e-10 * scale) return false;
  }
  return true;
}

}  // namespace

Matrix expm(const Matrix& a) {
  const int n = a.dim();
  double nrm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(a(i, j));
    nrm = std::max(nrm, row);
  }
  int squarings = 0;
  while (nrm > 0.5 && squarings < 64) {
    nrm *= 0.5;
    ++squarings;
  }
  const Matrix b = a * cplx(std::ldexp(1.0, -squarings), 0.0);
  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = term * b * cplx(1.0 / k, 0.0);
    sum = sum + term;
    if (term.max_abs() <= 1e-18 * std::max(1.0, sum.max_abs())) break;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

PropagationRecord propagate_stationary(const Matrix& h, const Matrix& theta,
                                       const CVec& psi0, double horizon, int samples,
                                       bool check_preconditions) {
  const int n = h.dim();
  if (!(horizon > 0.0) || samples < 1 || theta.dim() != n ||
      psi0.size() != static_cast<size_t>(n))
    throw Error(Err::BadConfig, "propagate_stationary: bad horizon, samples, or shapes");

  if (check_preconditions) {
    if (quasi_hermiticity_residual(h, theta) > 1e-8)
      throw Error(Err::QuasiHermiticityViolated,
                  "metric does not intertwine with the Hamiltonian");
    if (!positive_definite(theta))
      throw Error(Err::IndefiniteMetric, "metric spectrum is not positive");
  }

  PropagationRecord rec;
  rec.times.resize(samples + 1);
  rec.states.resize(samples + 1);
  rec.physical_norms.resize(samples + 1);

  const EigenDecomposition eh = eig_general(h, 1e-10);
  if (eh.condition <= 1e6) {
    const CVec coef = lu_solve(lu_factor(eh.right_vectors), psi0);
    for (int k = 0; k <= samples; ++k) {
      const double s = horizon * k / samples;
      CVec mixed(n);
      for (int j = 0; j < n; ++j)
        mixed[j] = coef[j] * std::exp(cplx(0.0, -s) * eh.eigenvalues[j]);
      rec.times[k] = s;
      rec.states[k] = eh.right_vectors * mixed;
    }
  } else {
    // Near a degeneracy the eigenbasis is unusable; one exponential per
    // step keeps the error additive instead of condition-amplified.
    const Matrix u = expm(h * cplx(0.0, -horizon / samples));
    CVec psi = psi0;
    rec.times[0] = 0.0;
    rec.states[0] = psi;
    for (int k = 1; k <= samples; ++k) {
      psi = u * psi;
      rec.times[k] = horizon * k / samples;
      rec.states[k] = psi;
    }
  }

  for (int k = 0; k <= samples; ++k)
    rec.physical_norms[k] = physical_norm(theta, rec.states[k]);
  rec.drift = drift_of(rec.physical_norms);
  return rec;
}

Matrix coriolis(const ParamOperator& omega_of_t, double t, double dt) {
  if (!(dt > 0.0)) throw Error(Err::BadConfig, "coriolis needs dt > 0");
  const Matrix w0 = omega_of_t(t);
  const LuFactors f = lu_factor(w0);
  if (f.singular)
    throw Error(Err::SingularOmega, "factor map is not invertible at this t");
  const Matrix deriv = (omega_of_t(t + dt) - omega_of_t(t - dt)) *
                       cplx(1.0 / (2.0 * dt), 0.0);
  const int n = w0.dim();
  Matrix x(n);
  for (int j = 0; j < n; ++j) x.set_column(j, lu_solve(f, deriv.column(j)));
  return x * cplx(0.0, 1.0);
}

PropagationRecord propagate_family(const ParamOperator& h_of_t,
                                   const ParamOperator& theta_of_t, const CVec& psi0,
                                   double t0, double t1, int steps, double fd_dt) {
  if (!(t1 > t0) || steps < 1 || !(fd_dt > 0.0))
    throw Error(Err::BadConfig, "propagate_family: bad window, steps, or fd_dt");
  const int n = static_cast<int>(psi0.size());

  auto omega = [&](double t) { return hermitian_sqrt(theta_of_t(t)); };
  auto generator = [&](double t) { return h_of_t(t) - coriolis(omega, t, fd_dt); };
  auto rhs = [&](const Matrix& g, const CVec& y) {
    CVec r = g * y;
    for (cplx& z : r) z *= cplx(0.0, -1.0);
    return r;
  };

  PropagationRecord rec;
  rec.times.reserve(steps + 1);
  rec.states.reserve(steps + 1);
  rec.physical_norms.reserve(steps + 1);

  CVec psi = psi0;
  rec.times.push_back(t0);
  rec.states.push_back(psi);
  rec.physical_norms.push_back(physical_norm(theta_of_t(t0), psi));

  const double dt_step = (t1 - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double ta = t0 + (t1 - t0) * k / steps;
    const double tb = t0 + (t1 - t0) * (k + 1) / steps;
    const double tm = ta + 0.5 * dt_step;
    const Matrix ga = generator(ta);
    const Matrix gm = generator(tm);
    const Matrix gb = generator(tb);

    const CVec k1 = rhs(ga, psi);
    CVec y(n);
    for (int i = 0; i < n; ++i) y[i] = psi[i] + 0.5 * dt_step * k1[i];
    const CVec k2 = rhs(gm, y);
    for (int i = 0; i < n; ++i) y[i] = psi[i] + 0.5 * dt_step * k2[i];
    const CVec k3 = rhs(gm, y);
    for (int i = 0; i < n; ++i) y[i] = psi[i] + dt_step * k3[i];
    const CVec k4 = rhs(gb, y);
    for (int i = 0; i < n; ++i)
      psi[i] += dt_step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    rec.times.push_back(tb);
    rec.states.push_back(psi);
    rec.physical_norms.push_back(physical_norm(theta_of_t(tb), psi));
  }
  rec.drift = drift_of(rec.physical_norms);
  return rec;
}

PropagationRecord propagate_nonstationary(const ToyModel& m, int rho, const CVec& psi0,
                                          double t0, double t1, int steps,
                                          double fd_dt) {
  if (!(t1 > t0) || steps < 1)
    throw Error(Err::BadConfig, "propagate_nonstationary: bad window or steps");
  for (int k = 0; k <= steps; ++k) {
    const double t = t0 + (t1 - t0) * k / steps;
    if (classify_point(m, rho, t).regime != Regime::UnitaryMetric)
      throw Error(Err::RegimeViolation, "window leaves the unitary regime");
  }
  auto th_of_t = [&m, rho](double t) { return scan_theta(m, rho, t); };
  return propagate_family(m.hamiltonian, th_of_t, psi0, t0, t1, steps, fd_dt);
}

}  // namespace qhm

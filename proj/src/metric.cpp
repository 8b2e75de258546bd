#include "qhm/metric.hpp"

#include <cmath>

namespace qhm {

AdjointBasis adjoint_basis(const Matrix& h, double tol) {
  EigenDecomposition e = eig_general(h.adjoint(), tol);
  const int n = h.dim();
  double scale = 1.0;
  for (const cplx& ev : e.eigenvalues) scale = std::max(scale, std::abs(ev));
  for (const cplx& ev : e.eigenvalues)
    if (std::abs(ev.imag()) > tol * scale)
      throw Error(Err::NonRealSpectrum, "conjugate spectrum left the real axis");
  for (int k = 1; k < n; ++k)
    if (e.eigenvalues[k].real() - e.eigenvalues[k - 1].real() <= tol * scale)
      throw Error(Err::DegenerateSpectrum, "energy levels collide at tolerance");

  AdjointBasis b;
  b.vectors = e.right_vectors;
  b.condition = e.condition;
  b.energies.resize(n);
  for (int k = 0; k < n; ++k) b.energies[k] = e.eigenvalues[k].real();
  return b;
}

namespace {

void check_weights(const AdjointBasis& basis, const std::vector<double>& kappa) {
  if (kappa.size() != basis.energies.size())
    throw Error(Err::BadConfig, "weight count does not match dimension");
  for (double k : kappa)
    if (!(k > 0.0))
      throw Error(Err::NonPositiveWeight, "weights must be strictly positive");
}

// sum_n w_n v_n v_n^dagger, Hermitian by construction; w may carry signs
// (the Krein continuation uses negative energy powers).
Matrix weighted_sum(const Matrix& vectors, const std::vector<double>& w) {
  const int n = vectors.dim();
  Matrix th(n);
  for (int k = 0; k < n; ++k) {
    CVec v = vectors.column(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) th(i, j) += w[k] * v[i] * std::conj(v[j]);
  }
  return (th + th.adjoint()) * cplx(0.5);
}

}  // namespace

Matrix metric_kappa(const AdjointBasis& basis, const std::vector<double>& kappa) {
  check_weights(basis, kappa);
  std::vector<double> w(kappa.size());
  for (size_t k = 0; k < kappa.size(); ++k) w[k] = kappa[k] * kappa[k];
  return weighted_sum(basis.vectors, w);
}

DysonFactor dyson_map(const AdjointBasis& basis, const std::vector<double>& kappa,
                      double tol) {
  Matrix th = metric_kappa(basis, kappa);
  if (numeric_rank(th, tol) < th.dim())
    throw Error(Err::SingularOmega, "metric is numerically rank deficient");
  return {hermitian_sqrt(th, tol), kappa};
}

Matrix metric_rho(const Matrix& theta0, const Matrix& h, int rho) {
  if (rho < 0) throw Error(Err::UnsupportedRho, "rho must be non negative");
  return theta0 * matrix_power(h, rho);
}

Matrix metric_rho_spectral(const AdjointBasis& basis, const std::vector<double>& kappa,
                           int rho) {
  if (rho < 0) throw Error(Err::UnsupportedRho, "rho must be non negative");
  check_weights(basis, kappa);
  if (rho % 2 == 1)
    for (double e : basis.energies)
      if (e <= 0.0)
        throw Error(Err::IndefiniteInput,
                    "odd rho needs a positive spectrum in the spectral route");
  std::vector<double> w(kappa.size());
  for (size_t k = 0; k < kappa.size(); ++k)
    w[k] = kappa[k] * kappa[k] * std::pow(basis.energies[k], rho);
  return weighted_sum(basis.vectors, w);
}

double quasi_hermiticity_residual(const Matrix& h, const Matrix& theta) {
  const double scale = theta.frobenius_norm();
  const Matrix gap = h.adjoint() * theta - theta * h;
  if (scale == 0.0) return gap.frobenius_norm();
  return gap.frobenius_norm() / scale;
}

Matrix hermitize(const Matrix& h, const Matrix& theta, double tol) {
  const double residual = quasi_hermiticity_residual(h, theta);
  if (residual > tol)
    throw Error(Err::QuasiHermiticityViolated,
                "metric does not intertwine this Hamiltonian");
  if (numeric_rank(theta, tol) < theta.dim())
    throw Error(Err::SingularOmega, "metric is numerically rank deficient");
  Matrix omega = hermitian_sqrt(theta, tol);
  return omega * h * inverse(omega);
}

std::vector<double> calibrate_kappa(const AdjointBasis& basis, const Matrix& target) {
  const int n = basis.vectors.dim();
  if (target.dim() != n)
    throw Error(Err::BadConfig, "target dimension mismatch in calibration");
  // Match the diagonal: sum_n x_n |v_n[i]|^2 = target_ii, x_n = kappa_n^2.
  Matrix m(n);
  CVec rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs[i] = cplx(target(i, i).real(), 0.0);
    for (int k = 0; k < n; ++k) m(i, k) = std::norm(basis.vectors(i, k));
  }
  CVec x;
  try {
    x = lu_solve(lu_factor(m), rhs);
  } catch (const Error&) {
    throw Error(Err::IndefiniteMetric, "calibration system is singular");
  }
  std::vector<double> kappa(n);
  for (int k = 0; k < n; ++k) {
    if (!(x[k].real() > 0.0))
      throw Error(Err::IndefiniteMetric, "calibration produced a non positive weight");
    kappa[k] = std::sqrt(x[k].real());
  }
  return kappa;
}

MetricFamily::MetricFamily(ParamOperator h, std::vector<double> kappa, double tol)
    : h_(std::move(h)), kappa_(std::move(kappa)), tol_(tol) {}

AdjointBasis MetricFamily::basis(double t) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(t);
  if (it == cache_.end())
    it = cache_.emplace(t, adjoint_basis(h_(t), tol_)).first;
  return it->second;
}

Matrix MetricFamily::theta0(double t) const { return metric_kappa(basis(t), kappa_); }

Matrix MetricFamily::theta(double t, int rho) const {
  return metric_rho(theta0(t), h_(t), rho);
}

}  // namespace qhm

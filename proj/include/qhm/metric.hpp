#pragma once

#include <functional>
#include <map>
#include <mutex>

#include "qhm/linalg.hpp"

namespace qhm {

// Eigenbasis of H^dagger.  For a quasi-Hermitian H every physical metric is
// assembled from these columns, one per energy level, so this struct is the
// hub the whole metric layer routes through.
struct AdjointBasis {
  std::vector<double> energies;  // ascending, real
  Matrix vectors;                // column n solves H^dagger v = E_n v
  double condition = 1.0;        // of the eigenvector matrix
};

// Throws NonRealSpectrum if an eigenvalue of H has |imag| > tol * scale,
// DegenerateSpectrum if two eigenvalues collide within the same margin.
AdjointBasis adjoint_basis(const Matrix& h, double tol = 1e-10);

// Metric Theta(kappa) = sum_n kappa_n^2 v_n v_n^dagger.  Weights must be
// positive (NonPositiveWeight otherwise).
Matrix metric_kappa(const AdjointBasis& basis, const std::vector<double>& kappa);

struct DysonFactor {
  Matrix omega;               // Theta = omega^dagger * omega
  std::vector<double> kappa;  // weights the factor was built from
};

// omega = Theta^{1/2} through the Hermitian square root; SingularOmega when
// the metric has numerical rank below the dimension.
DysonFactor dyson_map(const AdjointBasis& basis, const std::vector<double>& kappa,
                      double tol = 1e-10);

// Interpolating metric Theta_rho = Theta_0 * H^rho, assembled two independent
// ways.  The direct product form works from the matrices alone; the spectral
// form reweights kappa_n -> kappa_n * E_n^{rho/2} and therefore needs every
// energy positive for odd rho (IndefiniteInput otherwise).
Matrix metric_rho(const Matrix& theta0, const Matrix& h, int rho);
Matrix metric_rho_spectral(const AdjointBasis& basis, const std::vector<double>& kappa,
                           int rho);

// sup-normalized residual ||H^dagger Theta - Theta H||_F / ||Theta||_F.
double quasi_hermiticity_residual(const Matrix& h, const Matrix& theta);

// Similarity transform h = omega H omega^{-1} with omega = Theta^{1/2}.
// The result is Hermitian exactly when Theta intertwines H; the caller
// decides what "exactly" means via the acceptance tolerance downstream.
Matrix hermitize(const Matrix& h, const Matrix& theta, double tol = 1e-10);

// Solves for the weights that reproduce the diagonal of a target metric,
// i.e. the gauge in which a given closed-form Theta_0 is a kappa-metric.
// Throws IndefiniteMetric if a squared weight comes out non positive.
std::vector<double> calibrate_kappa(const AdjointBasis& basis, const Matrix& target);

using ParamOperator = std::function<Matrix(double)>;

// One-parameter family of metrics sharing a fixed weight vector.  Bases are
// cached per parameter value; the cache is guarded so scan threads can share
// one family.
class MetricFamily {
public:
  MetricFamily(ParamOperator h, std::vector<double> kappa, double tol = 1e-10);

  Matrix hamiltonian(double t) const { return h_(t); }
  AdjointBasis basis(double t) const;
  Matrix theta0(double t) const;
  Matrix theta(double t, int rho) const;

private:
  ParamOperator h_;
  std::vector<double> kappa_;
  double tol_;
  mutable std::map<double, AdjointBasis> cache_;
  mutable std::mutex mutex_;
};

}  // namespace qhm

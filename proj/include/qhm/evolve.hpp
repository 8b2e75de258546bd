#pragma once

#include "qhm/scan.hpp"

namespace qhm {

// Trajectory of a Schrodinger evolution together with the metric norm
// <psi|Theta|psi> sampled along it.  drift is the largest relative
// deviation of that norm from its initial value.
struct PropagationRecord {
  std::vector<double> times;
  std::vector<CVec> states;
  std::vector<double> physical_norms;
  double drift = 0.0;
};

// Scaling-and-squaring Taylor exponential; adequate for the small dense
// matrices this library touches.
Matrix expm(const Matrix& a);

// Time-independent H, fixed metric.  Integrates psi' = -iH psi through the
// eigenbasis of H when it is well conditioned, falling back to expm steps
// near a degeneracy.  check_preconditions verifies the intertwining relation
// first (QuasiHermiticityViolated); pass false to watch a wrong metric fail
// to conserve the norm.
PropagationRecord propagate_stationary(const Matrix& h, const Matrix& theta,
                                       const CVec& psi0, double horizon, int samples,
                                       bool check_preconditions = true);

// i Omega^{-1} dOmega/dt by central difference, the gauge term that
// separates the Hamiltonian from the generator of time translations when
// the metric moves.
Matrix coriolis(const ParamOperator& omega_of_t, double t, double dt = 1e-4);

// Time-dependent family: RK4 on psi' = -i G(t) psi with
// G = H - i Omega^{-1} dOmega/dt, Omega(t) = Theta(t)^{1/2}.  The metric
// norm <psi|Theta(t)|psi> is the conserved quantity.
PropagationRecord propagate_family(const ParamOperator& h_of_t,
                                   const ParamOperator& theta_of_t, const CVec& psi0,
                                   double t0, double t1, int steps, double fd_dt = 1e-4);

// Convenience wrapper for a toy model at fixed rho.  Refuses to start
// outside the unitary regime and rechecks at every sample point
// (RegimeViolation).
PropagationRecord propagate_nonstationary(const ToyModel& m, int rho, const CVec& psi0,
                                          double t0, double t1, int steps,
                                          double fd_dt = 1e-4);

}  // namespace qhm

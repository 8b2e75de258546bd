#pragma once

#include "qhm/metric.hpp"

namespace qhm {

// The two exactly solvable benchmark families.  Inside |t| < 1 the
// Hamiltonians are real with antisymmetric couplings (so manifestly non
// Hermitian) yet their spectra are real and linear in t; at t = 0 all
// couplings peak and the matrices become non diagonalizable.  Past |t| = 1
// the couplings turn imaginary, H becomes Hermitian, and the baseline
// metrics continue to complex symmetric matrices instead.
struct ToyModel {
  enum class Kind { TwoLevel, FourLevel };
  Kind kind;
  int dim;
  std::string id;  // "two" | "four"
  ParamOperator hamiltonian;
  ParamOperator metric0;  // closed-form baseline metric
  std::function<std::vector<double>(double)> energies;  // ascending
};

// Coupling branch: sqrt(1 - t^2) for |t| <= 1, i sqrt(t^2 - 1) beyond.
cplx coupling_branch(double t);

Matrix h2(double t);
Matrix theta0_2(double t);
Matrix h4(double t);
Matrix theta0_4(double t);

std::vector<double> energies_2(double t);
std::vector<double> energies_4(double t);

// Closed-form eigenvalue pair of Theta_rho for the two-level model,
// rho in {0,...,4}; UnsupportedRho otherwise.  Complex for t past the
// positivity boundary of the radicand.
std::pair<cplx, cplx> theta_rho_2_eigenvalues(int rho, double t);

// Exact positivity boundary of the rho = 2 two-level metric: the real root
// of t^6 - 9 t^4 + 8 t^2 - 16, via Cardano on the cubic in t^2.
double cardano_t2();

// Positivity boundary for rho = 4, the real root of a quintic in t^2;
// no radical form worth writing down, so bisection at full precision.
double boundary_t4();

const ToyModel& two_level();
const ToyModel& four_level();
const ToyModel& model_by_id(const std::string& id);  // BadConfig on unknown id

}  // namespace qhm

#include <cmath>

#include "helpers.hpp"
#include "qhm/evolve.hpp"
#include "qhm/scan.hpp"

using namespace qhm;
using namespace qhm::test;

namespace {

CVec fixed_state2() { return {cplx(0.6, 0.2), cplx(-0.5, 0.6)}; }

CVec fixed_state4() {
  return {cplx(0.4, -0.1), cplx(0.3, 0.5), cplx(-0.2, 0.2), cplx(0.1, -0.6)};
}

double euclid(const CVec& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

CVec sub(const CVec& a, const CVec& b) {
  CVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace

TEST_CASE("matrix exponential against closed forms") {
  {
    Matrix d(2, {cplx(0.3, 0), cplx(0, 0), cplx(0, 0), cplx(-1.2, 0.4)});
    Matrix e = expm(d);
    CHECK(std::abs(e(0, 0) - std::exp(cplx(0.3, 0))) < 1e-14);
    CHECK(std::abs(e(1, 1) - std::exp(cplx(-1.2, 0.4))) < 1e-14);
    CHECK(std::abs(e(0, 1)) < 1e-16);
  }
  {
    // Nilpotent: the series terminates after the linear term.
    Matrix n(2, {cplx(0, 0), cplx(2.5, 0), cplx(0, 0), cplx(0, 0)});
    Matrix e = expm(n);
    CHECK(std::abs(e(0, 0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(e(0, 1) - cplx(2.5, 0)) < 1e-15);
    CHECK(std::abs(e(1, 0)) < 1e-15);
  }
  {
    // exp(i pi X) = -I for the flip generator X.
    const double pi = std::acos(-1.0);
    Matrix x(2, {cplx(0, 0), cplx(0, pi), cplx(0, pi), cplx(0, 0)});
    Matrix e = expm(x);
    CHECK(std::abs(e(0, 0) + cplx(1, 0)) < 1e-13);
    CHECK(std::abs(e(1, 1) + cplx(1, 0)) < 1e-13);
    CHECK(std::abs(e(0, 1)) < 1e-13);
  }
}

TEST_CASE("stationary phase evolution of a diagonal Hamiltonian") {
  Matrix h(2, {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(3, 0)});
  CVec e1 = {cplx(1, 0), cplx(0, 0)};
  PropagationRecord r = propagate_stationary(h, Matrix::identity(2), e1, 2.0, 8);
  REQUIRE(r.times.size() == 9);
  REQUIRE(r.states.size() == 9);
  for (size_t k = 0; k < r.times.size(); ++k) {
    const cplx expect = std::exp(cplx(0, -r.times[k]));
    CHECK(std::abs(r.states[k][0] - expect) < 1e-12);
    CHECK(std::abs(r.states[k][1]) < 1e-14);
  }
  CHECK(r.drift < 1e-12);
}

TEST_CASE("theta norm is conserved under the stationary flow") {
  const Matrix h = two_level().hamiltonian(0.5);
  const Matrix th = two_level().metric0(0.5);
  PropagationRecord r = propagate_stationary(h, th, fixed_state2(), 50.0, 400);
  CHECK(r.drift <= 1e-8);
  for (size_t k = 1; k < r.times.size(); ++k) CHECK(r.times[k] > r.times[k - 1]);
  CHECK(r.physical_norms.size() == r.times.size());

  // Dual route: the eigendecomposition propagator against one big exponential.
  const double T = r.times.back();
  const CVec direct = expm(h * cplx(0, -T)) * fixed_state2();
  CHECK(euclid(sub(direct, r.states.back())) < 1e-9 * euclid(direct));
}

TEST_CASE("the euclidean norm is not conserved: the metric is mandatory") {
  const Matrix h = two_level().hamiltonian(0.5);
  PropagationRecord r = propagate_stationary(h, Matrix::identity(2), fixed_state2(),
                                             10.0, 200, false);
  CHECK(r.drift >= 1e-3);

  // With the checks on, the identity metric is rejected outright.
  bool threw = false;
  try {
    propagate_stationary(h, Matrix::identity(2), fixed_state2(), 10.0, 200);
  } catch (const Error& e) {
    threw = e.kind == Err::QuasiHermiticityViolated;
  }
  CHECK(threw);
}

TEST_CASE("an indefinite intertwiner is rejected") {
  // A signed sum of adjoint projectors intertwines exactly like the metric
  // but has mixed signature: a pseudo-metric, useless for norms.
  const Matrix h = two_level().hamiltonian(0.5);
  const AdjointBasis basis = adjoint_basis(h, 1e-10);
  const Matrix pseudo = basis.vectors *
                        Matrix::diagonal({cplx(1, 0), cplx(-1, 0)}) *
                        basis.vectors.adjoint();
  REQUIRE(quasi_hermiticity_residual(h, pseudo) < 1e-12);
  bool threw = false;
  try {
    propagate_stationary(h, pseudo, fixed_state2(), 5.0, 50);
  } catch (const Error& e) {
    threw = e.kind == Err::IndefiniteMetric;
  }
  CHECK(threw);
}

TEST_CASE("defective Hamiltonian falls back to the squared exponential") {
  // At the degeneracy the eigenvector basis is useless; the propagator must
  // still be produced and must match the series route.
  Matrix h(2, {cplx(2, 0), cplx(1, 0), cplx(0, 0), cplx(2, 0)});
  PropagationRecord r =
      propagate_stationary(h, Matrix::identity(2), fixed_state2(), 1.0, 10, false);
  // exp(-i(2I+N)s) = e^{-2is}(I - isN)
  const double s = r.times.back();
  const cplx ph = std::exp(cplx(0, -2.0 * s));
  const CVec psi0 = fixed_state2();
  const cplx want0 = ph * (psi0[0] + cplx(0, -s) * psi0[1]);
  const cplx want1 = ph * psi0[1];
  CHECK(std::abs(r.states.back()[0] - want0) < 1e-12);
  CHECK(std::abs(r.states.back()[1] - want1) < 1e-12);
}

TEST_CASE("coriolis term of a frozen map vanishes exactly") {
  std::mt19937_64 rng(7);
  Matrix w = random_matrix(3, rng);
  auto frozen = [&](double) { return w; };
  CHECK(coriolis(frozen, 0.7).max_abs() == 0.0);
}

TEST_CASE("coriolis term of a scalar exponential family") {
  auto family = [](double t) { return Matrix::identity(2) * std::exp(cplx(t, 0)); };
  const Matrix sigma = coriolis(family, 0.3, 1e-4);
  CHECK(std::abs(sigma(0, 0) - cplx(0, 1)) < 1e-7);
  CHECK(std::abs(sigma(1, 1) - cplx(0, 1)) < 1e-7);
  CHECK(std::abs(sigma(0, 1)) < 1e-12);

  // Central differences: quartering the error when dt halves.
  auto err = [&](double dt) {
    Matrix s = coriolis(family, 0.3, dt);
    s(0, 0) -= cplx(0, 1);
    s(1, 1) -= cplx(0, 1);
    return s.max_abs();
  };
  const double ratio = err(1e-3) / err(5e-4);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("coriolis term of the model factor family") {
  auto family = [](double t) { return hermitian_sqrt(two_level().metric0(t)); };
  const Matrix ref = coriolis(family, 0.5, 1e-6);
  CHECK(ref.is_finite());
  CHECK(ref.max_abs() > 0.1);  // the factor genuinely rotates with t

  auto err = [&](double dt) { return (coriolis(family, 0.5, dt) - ref).max_abs(); };
  const double ratio = err(2e-3) / err(1e-3);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);

  // The factor degenerates at the coupling peak, where no inverse exists.
  bool threw = false;
  try {
    coriolis(family, 0.0, 1e-6);
  } catch (const Error& e) {
    threw = e.kind == Err::SingularOmega;
  }
  CHECK(threw);
}

TEST_CASE("nonstationary propagation conserves the physical norm") {
  {
    PropagationRecord r =
        propagate_nonstationary(two_level(), 0, fixed_state2(), 0.3, 0.8, 2000);
    CHECK(r.drift <= 1e-6);
    REQUIRE(r.times.size() == 2001);
    for (size_t k = 1; k < r.times.size(); ++k) CHECK(r.times[k] > r.times[k - 1]);
    for (double n : r.physical_norms) CHECK(n > 0.0);
  }
  {
    PropagationRecord r =
        propagate_nonstationary(four_level(), 1, fixed_state4(), 0.3, 0.8, 2000);
    CHECK(r.drift <= 1e-6);
  }
}

TEST_CASE("leaving the unitary window is refused") {
  bool threw = false;
  try {
    propagate_nonstationary(two_level(), 1, fixed_state2(), 1.8, 2.2, 50);
  } catch (const Error& e) {
    threw = e.kind == Err::RegimeViolation;
  }
  CHECK(threw);

  threw = false;
  try {
    propagate_nonstationary(two_level(), 1, fixed_state2(), 2.1, 2.4, 50);
  } catch (const Error& e) {
    threw = e.kind == Err::RegimeViolation;
  }
  CHECK(threw);
}

TEST_CASE("fourth order stepping against the exact frozen propagator") {
  // Frozen coefficients make the exact solution one matrix exponential, so
  // the step error is the integrator's alone.
  const Matrix h = two_level().hamiltonian(0.5);
  const Matrix th = two_level().metric0(0.5);
  auto h_of_t = [&](double) { return h; };
  auto th_of_t = [&](double) { return th; };

  auto final_error = [&](int steps) {
    PropagationRecord r =
        propagate_family(h_of_t, th_of_t, fixed_state2(), 0.0, 1.0, steps);
    const CVec exact = expm(h * cplx(0, -1.0)) * fixed_state2();
    return euclid(sub(r.states.back(), exact));
  };
  const double e16 = final_error(16);
  const double e32 = final_error(32);
  const double e64 = final_error(64);
  CHECK(e16 / e32 > 9.0);
  CHECK(e16 / e32 < 28.0);
  CHECK(e32 / e64 > 9.0);
  CHECK(e32 / e64 < 28.0);
}

TEST_CASE("frozen family matches the stationary propagator") {
  const Matrix h = two_level().hamiltonian(0.5);
  const Matrix th = two_level().metric0(0.5);
  auto h_of_t = [&](double) { return h; };
  auto th_of_t = [&](double) { return th; };
  PropagationRecord family =
      propagate_family(h_of_t, th_of_t, fixed_state2(), 0.0, 0.5, 2000);
  PropagationRecord stat = propagate_stationary(h, th, fixed_state2(), 0.5, 2000);
  REQUIRE(family.times.size() == stat.times.size());
  double worst = 0.0;
  for (size_t k = 0; k < family.times.size(); ++k)
    worst = std::max(worst, euclid(sub(family.states[k], stat.states[k])));
  CHECK(worst < 1e-8);
}

TEST_CASE("norm drift is floored by the coriolis difference step") {
  // The fourth-order stepper leaves the finite-difference error of the
  // gauge term as the dominant defect; halving that step quarters the
  // drift, and the default step keeps it well under the contract.
  auto drift_at = [&](double fd_dt) {
    return propagate_nonstationary(two_level(), 0, fixed_state2(), 0.3, 0.8, 50,
                                   fd_dt)
        .drift;
  };
  const double ratio = drift_at(2e-3) / drift_at(1e-3);
  CHECK(ratio > 3.6);
  CHECK(ratio < 4.4);
  CHECK(propagate_nonstationary(two_level(), 0, fixed_state2(), 0.3, 0.8, 100).drift <
        1e-8);
}

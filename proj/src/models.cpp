#include "qhm/models.hpp"

#include <cmath>

namespace qhm {

cplx coupling_branch(double t) {
  const double u = 1.0 - t * t;
  if (u >= 0.0) return cplx(std::sqrt(u), 0.0);
  return cplx(0.0, std::sqrt(-u));
}

Matrix h2(double t) {
  const cplx s = coupling_branch(t);
  return Matrix(2, {cplx(1.0), s,
                    -s, cplx(3.0)});
}

Matrix theta0_2(double t) {
  const cplx s = coupling_branch(t);
  return Matrix(2, {cplx(1.0), -s,
                    -s, cplx(1.0)});
}

Matrix h4(double t) {
  const cplx s = coupling_branch(t);
  const double r3 = std::sqrt(3.0);
  const cplx a = r3 * s, b = 2.0 * s;
  return Matrix(4, {cplx(1.0), a, cplx(0.0), cplx(0.0),
                    -a, cplx(3.0), b, cplx(0.0),
                    cplx(0.0), -b, cplx(5.0), a,
                    cplx(0.0), cplx(0.0), -a, cplx(7.0)});
}

Matrix theta0_4(double t) {
  const cplx c = coupling_branch(t);
  const double r3 = std::sqrt(3.0);
  const cplx c2 = c * c, c3 = c2 * c;
  const cplx d = cplx(3.0 - 2.0 * t * t);
  const cplx off = -2.0 * c - c3;
  return Matrix(4, {cplx(1.0), -r3 * c, r3 * c2, -c3,
                    -r3 * c, d, off, r3 * c2,
                    r3 * c2, off, d, -r3 * c,
                    -c3, r3 * c2, -r3 * c, cplx(1.0)});
}

std::vector<double> energies_2(double t) {
  return {2.0 - std::abs(t), 2.0 + std::abs(t)};  // ascending for t < 0 too
}

std::vector<double> energies_4(double t) {
  std::vector<double> e = {4.0 - 3.0 * t, 4.0 - t, 4.0 + t, 4.0 + 3.0 * t};
  std::sort(e.begin(), e.end());  // keeps the order right for t < 0 too
  return e;
}

std::pair<cplx, cplx> theta_rho_2_eigenvalues(int rho, double t) {
  if (rho < 0 || rho > 4)
    throw Error(Err::UnsupportedRho, "closed forms cover rho in 0..4");
  const double u = t * t;
  double trace = 0.0;
  switch (rho) {
    case 0: trace = 2.0; break;
    case 1: trace = 4.0; break;
    case 2: trace = 8.0 + 2.0 * u; break;
    case 3: trace = 16.0 + 12.0 * u; break;
    case 4: trace = 32.0 + 48.0 * u + 2.0 * u * u; break;
  }
  const double dett = u * std::pow(4.0 - u, rho);
  const cplx mid(0.5 * trace, 0.0);
  const cplx sq = std::sqrt(mid * mid - cplx(dett, 0.0));
  return {mid - sq, mid + sq};
}

double cardano_t2() {
  const double c = std::cbrt(73.0 + 6.0 * std::sqrt(87.0));
  return (1.0 + c + 13.0 / c) / 3.0;
}

double boundary_t4() {
  // Radicand of the rho = 4 eigenvalue pair, in u = t^2; positive at u=16,
  // negative at u=18, strictly monotone across the root.
  auto radicand = [](double u) {
    return 256.0 + 512.0 * u + u * u * (864.0 + u * (-48.0 + u * (17.0 - u)));
  };
  double lo = 16.0, hi = 18.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (radicand(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(0.5 * (lo + hi));
}

const ToyModel& two_level() {
  static const ToyModel m{ToyModel::Kind::TwoLevel, 2, "two",
                          [](double t) { return h2(t); },
                          [](double t) { return theta0_2(t); },
                          [](double t) { return energies_2(t); }};
  return m;
}

const ToyModel& four_level() {
  static const ToyModel m{ToyModel::Kind::FourLevel, 4, "four",
                          [](double t) { return h4(t); },
                          [](double t) { return theta0_4(t); },
                          [](double t) { return energies_4(t); }};
  return m;
}

const ToyModel& model_by_id(const std::string& id) {
  if (id == "two") return two_level();
  if (id == "four") return four_level();
  throw Error(Err::BadConfig, "unknown model '" + id + "' (expected two|four)");
}

}  // namespace qhm

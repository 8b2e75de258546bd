#pragma once

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "qhm/matrix.hpp"

// Test-side oracles.  The characteristic-polynomial route below shares no
// code with the library's QR iteration, so agreement between the two is
// actual evidence.

namespace qhm::test {

inline Matrix random_matrix(int n, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(u(g), u(g));
  return a;
}

inline Matrix random_hermitian(int n, std::mt19937_64& g) {
  Matrix a = random_matrix(n, g);
  return (a + a.adjoint()) * cplx(0.5);
}

// Coefficients of det(lambda I - A) by the Faddeev-LeVerrier recursion,
// index k holding the coefficient of lambda^k, leading coefficient 1.
inline CVec char_poly(const Matrix& a) {
  const int n = a.dim();
  CVec c(n + 1, cplx(0.0));
  c[n] = 1.0;
  Matrix b = a;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      Matrix shifted = b;
      for (int i = 0; i < n; ++i) shifted(i, i) += c[n - k + 1];
      b = a * shifted;
    }
    cplx tr = 0.0;
    for (int i = 0; i < n; ++i) tr += b(i, i);
    c[n - k] = -tr / double(k);
  }
  return c;
}

inline cplx poly_eval(const CVec& c, cplx x) {
  cplx v = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * x + c[k];
  return v;
}

// Durand-Kerner simultaneous iteration.  Degree <= 4 here, so the crude
// starting circle is plenty.
inline CVec poly_roots(const CVec& c) {
  const int n = static_cast<int>(c.size()) - 1;
  double scale = 0.0;
  for (const auto& z : c) scale = std::max(scale, std::abs(z));
  CVec x(n);
  const cplx seed(0.4, 0.9);
  cplx p = 1.0;
  for (int i = 0; i < n; ++i) {
    p *= seed;
    x[i] = p * (1.0 + scale);
  }
  for (int iter = 0; iter < 800; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx denom = c.back();
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= x[i] - x[j];
      const cplx delta = poly_eval(c, x[i]) / denom;
      x[i] -= delta;
      worst = std::max(worst, std::abs(delta));
    }
    if (worst < 1e-15 * (1.0 + scale)) break;
  }
  return x;
}

inline void sort_by_real_imag(CVec& v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

// Hausdorff-style multiset distance under the best pairing; brute-force
// permutations are exact for n <= 4.
inline double multiset_distance(CVec a, CVec b) {
  REQUIRE(a.size() == b.size());
  std::vector<int> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[idx[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

inline double eig_residual(const Matrix& a, const Matrix& vecs, const CVec& vals) {
  double worst = 0.0;
  for (int j = 0; j < a.dim(); ++j) {
    CVec v = vecs.column(j);
    CVec av = a * v;
    worst = std::max(worst, vec_norm(vec_sub(av, vec_scale(v, vals[j]))));
  }
  return worst;
}

}  // namespace qhm::test

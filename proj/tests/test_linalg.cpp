#include "helpers.hpp"
#include "qhm/linalg.hpp"

using namespace qhm;
using namespace qhm::test;

TEST_CASE("lu det and inverse agree with cofactor results") {
  Matrix a(2, {cplx(1, 1), cplx(2, 0), cplx(0, -1), cplx(3, 2)});
  // ad - bc = (1+i)(3+2i) - 2(-i) = 1 + 5i + 2i = 1 + 7i
  cplx d = det(a);
  CHECK(std::abs(d - cplx(1, 7)) < 1e-14);

  Matrix inv = inverse(a);
  Matrix prod = a * inv;
  CHECK(prod.approx_equal(Matrix::identity(2), 1e-14));

  Matrix sing(2, {1.0, 2.0, 2.0, 4.0});
  CHECK(std::abs(det(sing)) < 1e-14);
  CHECK_THROWS_AS(inverse(sing), Error);
}

TEST_CASE("lu solve reproduces known solutions") {
  std::mt19937_64 g(11);
  for (int n = 2; n <= 4; ++n) {
    Matrix a = random_matrix(n, g);
    CVec x_true(n);
    for (int i = 0; i < n; ++i) x_true[i] = cplx(i + 1.0, -i * 0.5);
    CVec b = a * x_true;
    CVec x = lu_solve(lu_factor(a), b);
    CHECK(vec_norm(vec_sub(x, x_true)) < 1e-12);
  }
}

TEST_CASE("eig_general matches characteristic-polynomial roots") {
  std::mt19937_64 g(42);
  for (int n = 2; n <= 4; ++n) {
    for (int rep = 0; rep < 12; ++rep) {
      Matrix a = random_matrix(n, g);
      EigenDecomposition e = eig_general(a);
      CVec roots = poly_roots(char_poly(a));
      double scale = a.frobenius_norm();
      CHECK(multiset_distance(e.eigenvalues, roots) < 1e-9 * (1.0 + scale));
      CHECK(eig_residual(a, e.right_vectors, e.eigenvalues) < 1e-11 * (1.0 + scale));
    }
  }
}

TEST_CASE("eig_general eigenvalues arrive sorted with unit phase-fixed vectors") {
  std::mt19937_64 g(7);
  Matrix a = random_matrix(4, g);
  EigenDecomposition e = eig_general(a);
  for (size_t k = 1; k < e.eigenvalues.size(); ++k) {
    const cplx lo = e.eigenvalues[k - 1], hi = e.eigenvalues[k];
    CHECK((lo.real() < hi.real() ||
           (lo.real() == hi.real() && lo.imag() <= hi.imag())));
  }
  for (int j = 0; j < 4; ++j) {
    CVec v = e.right_vectors.column(j);
    CHECK(std::abs(vec_norm(v) - 1.0) < 1e-12);
    int arg = 0;
    for (int i = 1; i < 4; ++i)
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    CHECK(std::abs(v[arg].imag()) < 1e-12);
    CHECK(v[arg].real() > 0.0);
  }
}

TEST_CASE("eig_general handles a defective block honestly") {
  // Jordan block: one eigenvalue twice, no second eigenvector.  The solver
  // must still report both copies and flag the conditioning.
  Matrix j(2, {2.0, 1.0, 0.0, 2.0});
  EigenDecomposition e = eig_general(j);
  CHECK(std::abs(e.eigenvalues[0] - 2.0) < 1e-12);
  CHECK(std::abs(e.eigenvalues[1] - 2.0) < 1e-12);
  CHECK(e.condition > 1e6);
}

TEST_CASE("eig_general on a diagonal matrix is exact") {
  Matrix d = Matrix::diagonal({cplx(3, 0), cplx(-1, 0), cplx(0, 2)});
  EigenDecomposition e = eig_general(d);
  CVec expect = {cplx(-1, 0), cplx(0, 2), cplx(3, 0)};
  CHECK(multiset_distance(e.eigenvalues, expect) < 1e-14);
}

TEST_CASE("eig_hermitian agrees with eig_general and is unitary") {
  std::mt19937_64 g(1234);
  for (int n = 2; n <= 4; ++n) {
    for (int rep = 0; rep < 8; ++rep) {
      Matrix a = random_hermitian(n, g);
      EigenDecomposition eh = eig_hermitian(a);
      EigenDecomposition eg = eig_general(a);
      double scale = 1.0 + a.frobenius_norm();

      for (const cplx& ev : eh.eigenvalues) CHECK(std::abs(ev.imag()) == 0.0);
      CHECK(multiset_distance(eh.eigenvalues, eg.eigenvalues) < 1e-10 * scale);

      const Matrix& v = eh.right_vectors;
      CHECK((v.adjoint() * v).approx_equal(Matrix::identity(n), 1e-12));

      Matrix recon = v * Matrix::diagonal(eh.eigenvalues) * v.adjoint();
      CHECK(recon.approx_equal(a, 1e-12 * scale));
    }
  }
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  Matrix a(2, {1.0, 2.0, 3.0, 4.0});
  CHECK_THROWS_AS(eig_hermitian(a), Error);
  try {
    eig_hermitian(a);
  } catch (const Error& e) {
    CHECK(e.kind == Err::NotHermitian);
  }
}

TEST_CASE("hermitian_sqrt squares back and rejects indefinite input") {
  std::mt19937_64 g(99);
  for (int rep = 0; rep < 6; ++rep) {
    Matrix b = random_matrix(3, g);
    Matrix a = b.adjoint() * b;  // positive semidefinite by construction
    Matrix s = hermitian_sqrt(a);
    CHECK(s.hermiticity_defect() < 1e-12 * (1.0 + s.frobenius_norm()));
    CHECK((s * s).approx_equal(a, 1e-11 * (1.0 + a.frobenius_norm())));
  }
  Matrix indef(2, {-1.0, 0.0, 0.0, 2.0});
  CHECK_THROWS_AS(hermitian_sqrt(indef), Error);
}

TEST_CASE("singular values follow the eigenvalues of the Gram matrix") {
  std::mt19937_64 g(5);
  for (int n = 2; n <= 4; ++n) {
    Matrix a = random_matrix(n, g);
    std::vector<double> sv = singular_values(a);
    REQUIRE(static_cast<int>(sv.size()) == n);
    for (size_t k = 1; k < sv.size(); ++k) CHECK(sv[k - 1] >= sv[k]);

    EigenDecomposition gram = eig_hermitian(a.adjoint() * a);
    std::vector<double> expect;
    for (const cplx& ev : gram.eigenvalues)
      expect.push_back(std::sqrt(std::max(0.0, ev.real())));
    std::sort(expect.rbegin(), expect.rend());
    for (int k = 0; k < n; ++k)
      CHECK(std::abs(sv[k] - expect[k]) < 1e-10 * (1.0 + sv[0]));
  }
}

TEST_CASE("numeric_rank sees through scale") {
  CHECK(numeric_rank(Matrix::identity(4)) == 4);
  CHECK(numeric_rank(Matrix(3)) == 0);
  // Rank-one outer product, scaled hard.
  Matrix r1(3);
  CVec u = {cplx(1, 0), cplx(2, -1), cplx(0, 3)};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r1(i, j) = 1e8 * u[i] * std::conj(u[j]);
  CHECK(numeric_rank(r1) == 1);
}

TEST_CASE("condition_2 is exact on diagonal matrices") {
  Matrix d = Matrix::diagonal({cplx(10, 0), cplx(0.1, 0), cplx(1, 0)});
  CHECK(std::abs(condition_2(d) - 100.0) < 1e-9);
  CHECK(std::abs(condition_2(Matrix::identity(3)) - 1.0) < 1e-12);
}

TEST_CASE("classify_spectrum splits the three regimes") {
  SpectrumClass pos = classify_spectrum({cplx(0.5, 0), cplx(2, 1e-12)});
  CHECK(pos.kind == SpectrumKind::AllRealPositive);

  SpectrumClass mixed = classify_spectrum({cplx(-0.5, 0), cplx(2, 0)});
  CHECK(mixed.kind == SpectrumKind::AllRealMixedSign);
  CHECK(mixed.min_real == doctest::Approx(-0.5));

  SpectrumClass comp = classify_spectrum({cplx(1, 0.1), cplx(1, -0.1)});
  CHECK(comp.kind == SpectrumKind::SomeComplex);
  CHECK(comp.max_imag_abs == doctest::Approx(0.1));
}

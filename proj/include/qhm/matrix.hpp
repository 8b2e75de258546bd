#pragma once

#include <initializer_list>

#include "qhm/types.hpp"

namespace qhm {

// Dense square complex matrix, row major.  The solvable models live in
// dimensions 2 and 4, so everything here is written for small n and favors
// clarity over blocking tricks.
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}
  Matrix(int n, std::initializer_list<cplx> v);

  static Matrix identity(int n);
  static Matrix diagonal(const CVec& d);

  int dim() const { return n_; }

  cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  const cplx& operator()(int i, int j) const {
    return a_[static_cast<size_t>(i) * n_ + j];
  }

  Matrix adjoint() const;
  Matrix transpose() const;
  Matrix conj() const;

  Matrix operator+(const Matrix& b) const;
  Matrix operator-(const Matrix& b) const;
  Matrix operator*(const Matrix& b) const;
  Matrix operator*(cplx s) const;
  CVec operator*(const CVec& x) const;

  CVec column(int j) const;
  void set_column(int j, const CVec& v);

  double frobenius_norm() const;
  double max_abs() const;
  bool is_finite() const;

  // ||A - A^dagger||_F; zero iff the stored entries are exactly Hermitian.
  double hermiticity_defect() const;
  bool approx_equal(const Matrix& b, double atol) const;

private:
  int n_ = 0;
  CVec a_;
};

Matrix matrix_power(const Matrix& a, int p);  // p >= 0

// LU factorization with partial pivoting, PA = LU packed in one matrix.
// Shared backend for det, inverse and solve so they cannot disagree.
struct LuFactors {
  Matrix lu;
  std::vector<int> perm;
  int sign = 1;
  bool singular = false;
};

LuFactors lu_factor(const Matrix& a);
cplx lu_det(const LuFactors& f);
CVec lu_solve(const LuFactors& f, CVec b);  // throws SingularMatrix

cplx det(const Matrix& a);
Matrix inverse(const Matrix& a);  // throws SingularMatrix

double vec_norm(const CVec& x);
cplx vec_dot(const CVec& x, const CVec& y);  // conjugates x
CVec vec_scale(const CVec& x, cplx s);
CVec vec_sub(const CVec& x, const CVec& y);

}  // namespace qhm

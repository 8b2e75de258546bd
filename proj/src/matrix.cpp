#include "qhm/matrix.hpp"

#include <cassert>
#include <cmath>

namespace qhm {

const char* err_name(Err e) {
  switch (e) {
    case Err::NonConvergence: return "NonConvergence";
    case Err::NotHermitian: return "NotHermitian";
    case Err::IndefiniteInput: return "IndefiniteInput";
    case Err::DegenerateSpectrum: return "DegenerateSpectrum";
    case Err::NonRealSpectrum: return "NonRealSpectrum";
    case Err::NonPositiveWeight: return "NonPositiveWeight";
    case Err::QuasiHermiticityViolated: return "QuasiHermiticityViolated";
    case Err::IndefiniteMetric: return "IndefiniteMetric";
    case Err::SingularOmega: return "SingularOmega";
    case Err::SingularMatrix: return "SingularMatrix";
    case Err::RegimeViolation: return "RegimeViolation";
    case Err::UnsupportedRho: return "UnsupportedRho";
    case Err::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

Matrix::Matrix(int n, std::initializer_list<cplx> v) : Matrix(n) {
  assert(static_cast<size_t>(n) * n == v.size());
  std::copy(v.begin(), v.end(), a_.begin());
}

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const CVec& d) {
  Matrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n_; ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

Matrix Matrix::transpose() const {
  Matrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

Matrix Matrix::conj() const {
  Matrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = std::conj((*this)(i, j));
  return m;
}

Matrix Matrix::operator+(const Matrix& b) const {
  assert(n_ == b.n_);
  Matrix m(n_);
  for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] + b.a_[k];
  return m;
}

Matrix Matrix::operator-(const Matrix& b) const {
  assert(n_ == b.n_);
  Matrix m(n_);
  for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] - b.a_[k];
  return m;
}

Matrix Matrix::operator*(const Matrix& b) const {
  assert(n_ == b.n_);
  Matrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      const cplx aik = (*this)(i, k);
      if (aik == cplx(0.0)) continue;
      for (int j = 0; j < n_; ++j) m(i, j) += aik * b(k, j);
    }
  return m;
}

Matrix Matrix::operator*(cplx s) const {
  Matrix m(n_);
  for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] * s;
  return m;
}

CVec Matrix::operator*(const CVec& x) const {
  assert(static_cast<int>(x.size()) == n_);
  CVec y(n_, cplx(0.0));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

CVec Matrix::column(int j) const {
  CVec v(n_);
  for (int i = 0; i < n_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_column(int j, const CVec& v) {
  assert(static_cast<int>(v.size()) == n_);
  for (int i = 0; i < n_; ++i) (*this)(i, j) = v[i];
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : a_) m = std::max(m, std::abs(z));
  return m;
}

bool Matrix::is_finite() const {
  for (const cplx& z : a_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double Matrix::hermiticity_defect() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      s += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
  return std::sqrt(s);
}

bool Matrix::approx_equal(const Matrix& b, double atol) const {
  if (n_ != b.n_) return false;
  for (size_t k = 0; k < a_.size(); ++k)
    if (std::abs(a_[k] - b.a_[k]) > atol) return false;
  return true;
}

Matrix matrix_power(const Matrix& a, int p) {
  assert(p >= 0);
  Matrix r = Matrix::identity(a.dim());
  for (int k = 0; k < p; ++k) r = r * a;
  return r;
}

LuFactors lu_factor(const Matrix& a) {
  const int n = a.dim();
  LuFactors f{a, std::vector<int>(n), 1, false};
  for (int i = 0; i < n; ++i) f.perm[i] = i;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(f.lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(f.lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) {
      f.singular = true;
      continue;
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (int i = k + 1; i < n; ++i) {
      const cplx m = f.lu(i, k) / f.lu(k, k);
      f.lu(i, k) = m;
      for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
    }
  }
  return f;
}

cplx lu_det(const LuFactors& f) {
  cplx d = static_cast<double>(f.sign);
  for (int i = 0; i < f.lu.dim(); ++i) d *= f.lu(i, i);
  return d;
}

CVec lu_solve(const LuFactors& f, CVec b) {
  if (f.singular) throw Error(Err::SingularMatrix, "lu_solve on singular factorization");
  const int n = f.lu.dim();
  CVec y(n);
  for (int i = 0; i < n; ++i) y[i] = b[f.perm[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) y[i] -= f.lu(i, j) * y[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) y[i] -= f.lu(i, j) * y[j];
    y[i] /= f.lu(i, i);
  }
  return y;
}

cplx det(const Matrix& a) { return lu_det(lu_factor(a)); }

Matrix inverse(const Matrix& a) {
  const int n = a.dim();
  LuFactors f = lu_factor(a);
  if (f.singular) throw Error(Err::SingularMatrix, "inverse of singular matrix");
  Matrix inv(n);
  for (int j = 0; j < n; ++j) {
    CVec e(n, cplx(0.0));
    e[j] = 1.0;
    inv.set_column(j, lu_solve(f, e));
  }
  return inv;
}

double vec_norm(const CVec& x) {
  double s = 0.0;
  for (const cplx& z : x) s += std::norm(z);
  return std::sqrt(s);
}

cplx vec_dot(const CVec& x, const CVec& y) {
  assert(x.size() == y.size());
  cplx s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

CVec vec_scale(const CVec& x, cplx s) {
  CVec y = x;
  for (cplx& z : y) z *= s;
  return y;
}

CVec vec_sub(const CVec& x, const CVec& y) {
  assert(x.size() == y.size());
  CVec z = x;
  for (size_t i = 0; i < x.size(); ++i) z[i] -= y[i];
  return z;
}

}  // namespace qhm

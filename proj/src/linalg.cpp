#include "qhm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qhm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Unitary 2x2 rotation [[c, s], [-conj(s), c]] with real c, acting on the
// (k, k+1) plane.  Row and column application kept together so every caller
// performs the same similarity.
struct Rotation {
  double c = 1.0;
  cplx s = 0.0;
};

// Rotation sending (f, g) to (r, 0).
Rotation make_rotation(cplx f, cplx g) {
  const double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) return {1.0, 0.0};
  if (af == 0.0) return {0.0, std::conj(g) / ag};
  const double denom = std::hypot(af, ag);
  const cplx phase = f / af;
  return {af / denom, phase * std::conj(g) / denom};
}

void apply_rows(Matrix& a, int k, const Rotation& g, int col_from = 0) {
  const int n = a.dim();
  for (int j = col_from; j < n; ++j) {
    const cplx x = a(k, j), y = a(k + 1, j);
    a(k, j) = g.c * x + g.s * y;
    a(k + 1, j) = -std::conj(g.s) * x + g.c * y;
  }
}

void apply_cols(Matrix& a, int k, const Rotation& g, int row_to = -1) {
  const int last = row_to < 0 ? a.dim() : row_to;
  for (int i = 0; i < last; ++i) {
    const cplx x = a(i, k), y = a(i, k + 1);
    a(i, k) = g.c * x + std::conj(g.s) * y;
    a(i, k + 1) = -g.s * x + g.c * y;
  }
}

// General unitary 2x2 [[u1, -conj(u2)], [u2, conj(u1)]] in the (k, k+1)
// plane; used to triangularize a deflated 2x2 block whose eigenvector we
// already know exactly.
void apply_unitary_rows(Matrix& a, int k, cplx u1, cplx u2) {
  for (int j = 0; j < a.dim(); ++j) {
    const cplx x = a(k, j), y = a(k + 1, j);
    a(k, j) = std::conj(u1) * x + std::conj(u2) * y;
    a(k + 1, j) = -u2 * x + u1 * y;
  }
}

void apply_unitary_cols(Matrix& a, int k, cplx u1, cplx u2) {
  for (int i = 0; i < a.dim(); ++i) {
    const cplx x = a(i, k), y = a(i, k + 1);
    a(i, k) = x * u1 + y * u2;
    a(i, k + 1) = -x * std::conj(u2) + y * std::conj(u1);
  }
}

// Roots of the 2x2 block [[a, b], [c, d]], exact up to the complex sqrt.
std::pair<cplx, cplx> eig2(cplx a, cplx b, cplx c, cplx d) {
  const cplx mid = 0.5 * (a + d);
  const cplx off = 0.5 * (a - d);
  const cplx sq = std::sqrt(off * off + b * c);
  return {mid + sq, mid - sq};
}

void hessenberg(Matrix& a, Matrix& q) {
  const int n = a.dim();
  for (int k = 0; k + 2 < n; ++k) {
    // Householder vector for column k below the subdiagonal.
    CVec v(n - k - 1);
    double norm2 = 0.0;
    for (int i = 0; i < n - k - 1; ++i) {
      v[i] = a(k + 1 + i, k);
      norm2 += std::norm(v[i]);
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    const double a0 = std::abs(v[0]);
    const cplx phase = a0 == 0.0 ? cplx(1.0) : v[0] / a0;
    const cplx beta = -phase * norm;
    v[0] -= beta;
    double tau = 0.0;
    for (const cplx& z : v) tau += std::norm(z);
    if (tau == 0.0) continue;
    const double scale = 2.0 / tau;

    // A <- P A, rows k+1..n-1.
    for (int j = 0; j < n; ++j) {
      cplx w = 0.0;
      for (int i = 0; i < n - k - 1; ++i) w += std::conj(v[i]) * a(k + 1 + i, j);
      w *= scale;
      for (int i = 0; i < n - k - 1; ++i) a(k + 1 + i, j) -= v[i] * w;
    }
    // A <- A P, columns k+1..n-1.
    for (int i = 0; i < n; ++i) {
      cplx w = 0.0;
      for (int j = 0; j < n - k - 1; ++j) w += a(i, k + 1 + j) * v[j];
      w *= scale;
      for (int j = 0; j < n - k - 1; ++j) a(i, k + 1 + j) -= w * std::conj(v[j]);
    }
    // Q <- Q P.
    for (int i = 0; i < n; ++i) {
      cplx w = 0.0;
      for (int j = 0; j < n - k - 1; ++j) w += q(i, k + 1 + j) * v[j];
      w *= scale;
      for (int j = 0; j < n - k - 1; ++j) q(i, k + 1 + j) -= w * std::conj(v[j]);
    }
  }
  // Clean the zeroed part so later deflation tests see exact zeros.
  for (int i = 2; i < n; ++i)
    for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

bool subdiag_negligible(const Matrix& t, int k) {
  return std::abs(t(k + 1, k)) <=
         kEps * (std::abs(t(k, k)) + std::abs(t(k + 1, k + 1)));
}

// Triangularize the deflated 2x2 window at (lo, lo) from its closed-form
// eigenvalues.  This is what keeps a degenerate pair exact: no iteration is
// involved at all for a 2x2 problem.
void deflate_window2(Matrix& t, Matrix& q, int lo) {
  const cplx a = t(lo, lo), b = t(lo, lo + 1);
  const cplx c = t(lo + 1, lo), d = t(lo + 1, lo + 1);
  if (std::abs(c) == 0.0) return;
  auto [l1, l2] = eig2(a, b, c, d);
  // Eigenvector of the block for l1.
  cplx u1 = b, u2 = l1 - a;
  if (std::abs(u1) + std::abs(u2) < kEps * (std::abs(a) + std::abs(d))) {
    u1 = l1 - d;
    u2 = c;
  }
  const double norm = std::hypot(std::abs(u1), std::abs(u2));
  u1 /= norm;
  u2 /= norm;
  apply_unitary_rows(t, lo, u1, u2);
  apply_unitary_cols(t, lo, u1, u2);
  apply_unitary_cols(q, lo, u1, u2);
  t(lo, lo) = l1;
  t(lo + 1, lo + 1) = l2;
  t(lo + 1, lo) = 0.0;
}

// Schur form A = Q T Q^dagger by implicit single-shift QR on the Hessenberg
// form.  2x2 windows are closed out directly.
void schur(Matrix& t, Matrix& q) {
  const int n = t.dim();
  int hi = n - 1;
  int since_deflation = 0;
  const int max_iter = 60 * std::max(n, 4);
  int total = 0;

  while (hi > 0) {
    for (int k = 0; k < hi; ++k)
      if (subdiag_negligible(t, k)) t(k + 1, k) = 0.0;

    if (std::abs(t(hi, hi - 1)) == 0.0) {
      --hi;
      since_deflation = 0;
      continue;
    }
    int lo = hi;
    while (lo > 0 && std::abs(t(lo, lo - 1)) != 0.0) --lo;

    if (hi - lo == 1) {
      deflate_window2(t, q, lo);
      hi = lo;
      since_deflation = 0;
      continue;
    }

    if (++total > max_iter)
      throw Error(Err::NonConvergence, "QR iteration stalled");

    // Wilkinson shift from the trailing 2x2; exceptional shift when a
    // window refuses to split.
    cplx mu;
    if (++since_deflation % 13 == 0) {
      mu = t(hi, hi) + 0.75 * std::abs(t(hi, hi - 1));
    } else {
      auto [l1, l2] = eig2(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
      mu = std::abs(l1 - t(hi, hi)) < std::abs(l2 - t(hi, hi)) ? l1 : l2;
    }

    Rotation g = make_rotation(t(lo, lo) - mu, t(lo + 1, lo));
    apply_rows(t, lo, g);
    apply_cols(t, lo, g);
    apply_cols(q, lo, g);
    for (int k = lo; k + 2 <= hi; ++k) {
      Rotation g2 = make_rotation(t(k + 1, k), t(k + 2, k));
      apply_rows(t, k + 1, g2);
      apply_cols(t, k + 1, g2);
      apply_cols(q, k + 1, g2);
      t(k + 2, k) = 0.0;
    }
  }
}

// Right eigenvectors from the Schur form by back substitution, columns of
// the returned matrix in Schur order.
Matrix schur_vectors(const Matrix& t, const Matrix& q) {
  const int n = t.dim();
  double tnorm = t.max_abs();
  const double smin = std::max(kEps * tnorm, 1e-300);
  Matrix vecs(n);
  for (int j = 0; j < n; ++j) {
    const cplx lambda = t(j, j);
    CVec y(n, cplx(0.0));
    y[j] = 1.0;
    for (int i = j - 1; i >= 0; --i) {
      cplx rhs = 0.0;
      for (int k = i + 1; k <= j; ++k) rhs += t(i, k) * y[k];
      cplx denom = t(i, i) - lambda;
      if (std::abs(denom) < smin) denom = smin;
      y[i] = -rhs / denom;
      // Rescale on overflow risk; only the direction matters.
      const double ay = std::abs(y[i]);
      if (ay > 1e100)
        for (int k = i; k <= j; ++k) y[k] /= ay;
    }
    CVec v = q * y;
    const double norm = vec_norm(v);
    if (norm > 0.0)
      for (cplx& z : v) z /= norm;
    vecs.set_column(j, v);
  }
  return vecs;
}

void phase_fix(CVec& v) {
  int arg = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = static_cast<int>(i);
  const double a = std::abs(v[arg]);
  if (a == 0.0) return;
  const cplx phase = std::conj(v[arg]) / a;
  for (cplx& z : v) z *= phase;
  v[arg] = cplx(std::abs(v[arg]), 0.0);  // kill the residual imaginary dust
}

bool real_imag_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

EigenDecomposition sorted_decomposition(CVec vals, Matrix vecs) {
  const int n = static_cast<int>(vals.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int i, int j) { return real_imag_less(vals[i], vals[j]); });
  EigenDecomposition e;
  e.eigenvalues.resize(n);
  e.right_vectors = Matrix(n);
  for (int k = 0; k < n; ++k) {
    e.eigenvalues[k] = vals[idx[k]];
    CVec v = vecs.column(idx[k]);
    phase_fix(v);
    e.right_vectors.set_column(k, v);
  }
  const double c = condition_2(e.right_vectors);
  e.condition = std::isfinite(c) ? c : 1.0 / kEps;
  return e;
}

// Orthogonalize the columns of w by complex one-sided Jacobi sweeps; the
// Gram block of each column pair is Hermitian, so the rotation below is the
// standard Hermitian Jacobi rotation applied from the right.
void one_sided_jacobi(Matrix& w) {
  const int n = w.dim();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        cplx gamma = 0.0;
        double alpha = 0.0, beta = 0.0;
        for (int i = 0; i < n; ++i) {
          alpha += std::norm(w(i, p));
          beta += std::norm(w(i, q));
          gamma += std::conj(w(i, p)) * w(i, q);
        }
        const double ag = std::abs(gamma);
        if (ag <= 1e-30 || ag <= 1e-16 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx phase = gamma / ag;
        const double tau = (beta - alpha) / (2.0 * ag);
        const double sign = tau >= 0.0 ? 1.0 : -1.0;
        const double tr = sign / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, tr);
        const cplx s = tr * c * phase;
        for (int i = 0; i < n; ++i) {
          const cplx x = w(i, p), y = w(i, q);
          w(i, p) = c * x - std::conj(s) * y;
          w(i, q) = s * x + c * y;
        }
      }
    if (!rotated) return;
  }
}

}  // namespace

EigenDecomposition eig_general(const Matrix& a, double tol) {
  (void)tol;  // interface symmetry with eig_hermitian; nothing to reject here
  const int n = a.dim();
  if (n == 0) return {};
  if (n == 1) {
    EigenDecomposition e;
    e.eigenvalues = {a(0, 0)};
    e.right_vectors = Matrix::identity(1);
    return e;
  }
  Matrix t = a;
  Matrix q = Matrix::identity(n);
  hessenberg(t, q);
  schur(t, q);
  CVec vals(n);
  for (int i = 0; i < n; ++i) vals[i] = t(i, i);
  Matrix vecs = schur_vectors(t, q);
  return sorted_decomposition(std::move(vals), std::move(vecs));
}

EigenDecomposition eig_hermitian(const Matrix& a, double tol) {
  const int n = a.dim();
  const double scale = std::max(a.max_abs(), 1.0);
  if (a.hermiticity_defect() > tol * scale)
    throw Error(Err::NotHermitian, "eig_hermitian input defect above tolerance");

  // Work on the Hermitian average so roundoff asymmetry cannot leak in.
  Matrix w = (a + a.adjoint()) * cplx(0.5);
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(w(p, q));
    if (std::sqrt(off) <= 1e-15 * scale * n) break;
    if (sweep == 59)
      throw Error(Err::NonConvergence, "Jacobi sweeps exhausted");

    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const cplx b = w(p, q);
        const double ab = std::abs(b);
        if (ab <= 1e-18 * scale) continue;
        const cplx phase = b / ab;
        const double ap = w(p, p).real(), aq = w(q, q).real();
        const double tau = (aq - ap) / (2.0 * ab);
        const double sign = tau >= 0.0 ? 1.0 : -1.0;
        const double tr = sign / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, tr);
        const cplx s = tr * c * phase;

        // w <- J^dagger w J with J = [[c, s], [-conj(s), c]] in (p, q).
        for (int j = 0; j < n; ++j) {
          const cplx x = w(p, j), y = w(q, j);
          w(p, j) = c * x - s * y;
          w(q, j) = std::conj(s) * x + c * y;
        }
        for (int i = 0; i < n; ++i) {
          const cplx x = w(i, p), y = w(i, q);
          w(i, p) = c * x - std::conj(s) * y;
          w(i, q) = s * x + c * y;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          const cplx x = v(i, p), y = v(i, q);
          v(i, p) = c * x - std::conj(s) * y;
          v(i, q) = s * x + c * y;
        }
      }
  }

  CVec vals(n);
  for (int i = 0; i < n; ++i) vals[i] = cplx(w(i, i).real(), 0.0);
  EigenDecomposition e = sorted_decomposition(std::move(vals), std::move(v));
  e.condition = 1.0;  // eigenbasis is unitary by construction
  return e;
}

Matrix hermitian_sqrt(const Matrix& a, double tol) {
  EigenDecomposition e = eig_hermitian(a, tol);
  double top = 0.0;
  for (const cplx& ev : e.eigenvalues) top = std::max(top, std::abs(ev.real()));
  CVec roots(e.eigenvalues.size());
  for (size_t k = 0; k < e.eigenvalues.size(); ++k) {
    double ev = e.eigenvalues[k].real();
    if (ev < -tol * std::max(top, 1.0))
      throw Error(Err::IndefiniteInput, "negative eigenvalue in hermitian_sqrt");
    roots[k] = std::sqrt(std::max(ev, 0.0));
  }
  const Matrix& v = e.right_vectors;
  Matrix s = v * Matrix::diagonal(roots) * v.adjoint();
  return (s + s.adjoint()) * cplx(0.5);
}

std::vector<double> singular_values(const Matrix& a) {
  Matrix w = a;
  one_sided_jacobi(w);
  std::vector<double> sv(a.dim());
  for (int j = 0; j < a.dim(); ++j) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += std::norm(w(i, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

int numeric_rank(const Matrix& a, double tol) {
  std::vector<double> sv = singular_values(a);
  if (sv.empty() || sv[0] == 0.0) return 0;
  int r = 0;
  for (double s : sv)
    if (s > tol * sv[0]) ++r;
  return r;
}

double condition_2(const Matrix& a) {
  std::vector<double> sv = singular_values(a);
  if (sv.empty()) return 1.0;
  if (sv.back() == 0.0) return std::numeric_limits<double>::infinity();
  return sv.front() / sv.back();
}

SpectrumClass classify_spectrum(const CVec& eigs, double tol) {
  SpectrumClass out{SpectrumKind::AllRealPositive, 0.0, 0.0};
  if (eigs.empty()) return out;
  double scale = 0.0;
  out.min_real = eigs[0].real();
  for (const cplx& z : eigs) {
    scale = std::max(scale, std::abs(z));
    out.min_real = std::min(out.min_real, z.real());
    out.max_imag_abs = std::max(out.max_imag_abs, std::abs(z.imag()));
  }
  if (out.max_imag_abs > tol * std::max(scale, 1.0))
    out.kind = SpectrumKind::SomeComplex;
  else if (out.min_real <= 0.0)
    out.kind = SpectrumKind::AllRealMixedSign;
  return out;
}

}  // namespace qhm

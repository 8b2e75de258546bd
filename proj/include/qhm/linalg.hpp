#pragma once

#include "qhm/matrix.hpp"

namespace qhm {

// Eigendecomposition of a general (possibly non normal) complex matrix.
// eigenvalues are sorted by (real, imag) ascending; right_vectors holds the
// matching unit eigenvectors as columns, phase fixed so that the entry of
// largest modulus is real positive.  condition is the 2-norm condition number
// of the eigenvector matrix and is the cheapest honest proxy for distance to
// an exceptional point.
struct EigenDecomposition {
  CVec eigenvalues;
  Matrix right_vectors;
  double condition = 1.0;
};

enum class SpectrumKind { AllRealPositive, AllRealMixedSign, SomeComplex };

struct SpectrumClass {
  SpectrumKind kind;
  double min_real;       // smallest real part
  double max_imag_abs;   // largest |imag|
};

// Hessenberg reduction followed by an implicitly shifted QR iteration.
// Throws NonConvergence if a subdiagonal entry refuses to die.
EigenDecomposition eig_general(const Matrix& a, double tol = 1e-10);

// Cyclic complex Jacobi.  Deliberately a different algorithm from
// eig_general so the two can cross-check each other on Hermitian input.
// Throws NotHermitian if the defect exceeds tol * max_abs.
EigenDecomposition eig_hermitian(const Matrix& a, double tol = 1e-10);

// Unique Hermitian positive square root.  Throws IndefiniteInput when an
// eigenvalue is below -tol * scale; clamps the tiny negatives that are
// indistinguishable from zero at working precision.
Matrix hermitian_sqrt(const Matrix& a, double tol = 1e-10);

std::vector<double> singular_values(const Matrix& a);  // descending
int numeric_rank(const Matrix& a, double tol = 1e-10);
double condition_2(const Matrix& a);  // sigma_max / sigma_min

SpectrumClass classify_spectrum(const CVec& eigs, double tol = 1e-8);

}  // namespace qhm

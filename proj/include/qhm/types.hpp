#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhm {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Typed failure kinds. Every throwing operation documents which of these it
// can raise; callers switch on `kind` rather than parsing messages.
enum class Err {
  NonConvergence,
  NotHermitian,
  IndefiniteInput,
  DegenerateSpectrum,
  NonRealSpectrum,
  NonPositiveWeight,
  QuasiHermiticityViolated,
  IndefiniteMetric,
  SingularOmega,
  SingularMatrix,
  RegimeViolation,
  UnsupportedRho,
  BadConfig,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
  Error(Err k, const std::string& msg)
      : std::runtime_error(std::string(err_name(k)) + ": " + msg), kind(k) {}
  Err kind;
};

}  // namespace qhm

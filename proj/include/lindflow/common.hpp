#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lindflow {

using complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kBasisOrderTag = "gell-mann-nested";

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a numerical precondition fails (corrupt basis, singular solve,
/// residual out of tolerance).
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace tol {
inline constexpr double structural = 1e-12;
inline constexpr double spectral = 1e-10;
inline constexpr double imaginary_residue = 1e-10;
inline constexpr double prune = 1e-12;
}  // namespace tol

/// Number of su(D) generators.
constexpr std::size_t adjoint_size(std::size_t dim) { return dim * dim - 1; }

inline void require_dim(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

/// Returns the real part of a value that is mathematically real; throws if
/// the imaginary residue exceeds `tolerance` (scaled by max(1, |z|)).
inline double realify(complex z, const char* what,
                      double tolerance = tol::imaginary_residue) {
  const double scale = std::max(1.0, std::abs(z.real()));
  if (std::abs(z.imag()) > tolerance * scale) {
    throw NumericalError(std::string(what) + ": imaginary residue " +
                         std::to_string(z.imag()));
  }
  return z.real();
}

template <class Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace lindflow

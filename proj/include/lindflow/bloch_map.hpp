#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "lindflow/common.hpp"
#include "lindflow/su_algebra.hpp"

namespace lindflow {

struct PositivityReport {
  bool positive;
  double min_eigenvalue;
};

inline constexpr double kPositivityTolerance = 1e-10;

inline PositivityReport positivity_check(const CMatrix& rho) {
  require_dim(rho.rows() == rho.cols(), "positivity_check: matrix must be square");
  if (hermiticity_defect(rho) > tol::structural * std::max(1.0, rho.norm())) {
    throw NumericalError("positivity_check: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  return {lowest >= -kPositivityTolerance, lowest};
}

/// D×D Hermitian unit-trace matrix. The strict factory also demands
/// positivity; matrices reconstructed from arbitrary Bloch vectors carry a
/// positivity flag instead.
class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity; throws on violation.
  static DensityMatrix from_matrix(CMatrix m) {
    DensityMatrix out = hermitian_unit_trace(std::move(m));
    if (!out.positive_) {
      throw NumericalError("density matrix has negative eigenvalue " +
                           std::to_string(out.min_eigenvalue_));
    }
    return out;
  }

  /// Validates Hermiticity and unit trace only; positivity is recorded.
  static DensityMatrix hermitian_unit_trace(CMatrix m) {
    require_dim(m.rows() == m.cols() && m.rows() >= 2, "density matrix must be square with D >= 2");
    const double scale = std::max(1.0, m.norm());
    if (hermiticity_defect(m) > tol::structural * scale) {
      throw NumericalError("density matrix is not Hermitian");
    }
    if (std::abs(m.trace() - complex(1.0, 0.0)) > tol::structural * scale) {
      throw NumericalError("density matrix trace differs from 1");
    }
    const PositivityReport report = positivity_check(m);
    return DensityMatrix(std::move(m), report);
  }

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }
  bool is_positive() const { return positive_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  DensityMatrix(CMatrix m, PositivityReport report)
      : matrix_(std::move(m)), positive_(report.positive), min_eigenvalue_(report.min_eigenvalue) {}

  CMatrix matrix_;
  bool positive_;
  double min_eigenvalue_;
};

/// Generalized Bloch vector, real length D²−1.
class BlochVector {
 public:
  BlochVector(std::size_t dim, RVector a) : dim_(dim), a_(std::move(a)) {
    require_dim(dim_ >= 2, "Bloch vector requires D >= 2");
    require_dim(static_cast<std::size_t>(a_.size()) == adjoint_size(dim_),
                "Bloch vector length must be D^2 - 1 = " + std::to_string(adjoint_size(dim_)) +
                    ", got " + std::to_string(a_.size()));
  }

  std::size_t dim() const { return dim_; }
  const RVector& coords() const { return a_; }
  double norm() const { return a_.norm(); }

 private:
  std::size_t dim_;
  RVector a_;
};

/// Traceless part b and trace part Tr[B]/D of a jump operator.
struct JumpVector {
  std::size_t dim;
  complex trace_part;
  CVector b;
};

/// a_j = Tr[X λ_j] / √(2 − 2/D) for any Hermitian X (traceless parts of
/// rates included). Throws if a coordinate has an imaginary residue.
inline RVector bloch_coordinates(const CMatrix& x, const SuBasis& basis) {
  require_dim(x.rows() == static_cast<Eigen::Index>(basis.dim()) && x.cols() == x.rows(),
              "bloch_coordinates: matrix/basis dimension mismatch");
  const double D = static_cast<double>(basis.dim());
  const double inv = 1.0 / std::sqrt(2.0 - 2.0 / D);
  RVector a(static_cast<Eigen::Index>(basis.size()));
  const double scale = std::max(1.0, x.norm());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const complex t = detail::trace_of_product(x, basis.lambda(j));
    a(static_cast<Eigen::Index>(j)) =
        realify(t, "bloch_coordinates", tol::imaginary_residue * scale) * inv;
  }
  return a;
}

/// (trace_part) 𝕀 + √((D−1)/(2D)) a_j λ_j with no range checks.
template <class D>
CMatrix matrix_from_coordinates(const Eigen::MatrixBase<D>& a, const SuBasis& basis,
                                complex trace_part) {
  require_dim(a.size() == static_cast<Eigen::Index>(basis.size()), "coordinate length mismatch");
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix out = trace_part * CMatrix::Identity(n, n);
  const double c = basis.bloch_scale();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    out += (c * a(static_cast<Eigen::Index>(j))) * basis.lambda(j);
  }
  return out;
}

inline BlochVector to_bloch(const DensityMatrix& rho, const SuBasis& basis) {
  require_dim(rho.dim() == basis.dim(), "to_bloch: density matrix/basis dimension mismatch");
  return BlochVector(basis.dim(), bloch_coordinates(rho.matrix(), basis));
}

inline DensityMatrix from_bloch(const BlochVector& a, const SuBasis& basis) {
  require_dim(a.dim() == basis.dim(), "from_bloch: Bloch vector/basis dimension mismatch");
  if (a.norm() > 1.0 + kPositivityTolerance) {
    throw NumericalError("from_bloch: |a| = " + std::to_string(a.norm()) + " exceeds 1");
  }
  CMatrix m = matrix_from_coordinates(a.coords(), basis, 1.0 / static_cast<double>(basis.dim()));
  // Exact Hermitian symmetrization guards round-off in the generator sum.
  m = (0.5 * (m + m.adjoint())).eval();
  return DensityMatrix::hermitian_unit_trace(std::move(m));
}

/// γ = Tr[ρ²].
inline double purity(const DensityMatrix& rho) {
  return realify(detail::trace_of_product(rho.matrix(), rho.matrix()), "purity");
}

/// γ = (1 + (D−1)|a|²)/D.
inline double purity(const BlochVector& a) {
  const double D = static_cast<double>(a.dim());
  return (1.0 + (D - 1.0) * a.coords().squaredNorm()) / D;
}

inline JumpVector jump_to_vector(const CMatrix& jump, const SuBasis& basis) {
  require_dim(jump.rows() == static_cast<Eigen::Index>(basis.dim()) && jump.cols() == jump.rows(),
              "jump operator must be " + std::to_string(basis.dim()) + "x" +
                  std::to_string(basis.dim()));
  const double D = static_cast<double>(basis.dim());
  const double inv = 1.0 / (2.0 * basis.bloch_scale());
  CVector b(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    b(static_cast<Eigen::Index>(j)) = detail::trace_of_product(jump, basis.lambda(j)) * inv;
  }
  return {basis.dim(), jump.trace() / D, std::move(b)};
}

/// Inverse of jump_to_vector.
inline CMatrix vector_to_jump(const JumpVector& v, const SuBasis& basis) {
  require_dim(v.dim == basis.dim(), "vector_to_jump: dimension mismatch");
  return matrix_from_coordinates(v.b, basis, v.trace_part);
}

}  // namespace lindflow

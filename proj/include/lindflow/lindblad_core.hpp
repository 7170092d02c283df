#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lindflow/bloch_map.hpp"
#include "lindflow/common.hpp"
#include "lindflow/su_algebra.hpp"

namespace lindflow {

/// Dissipative Lindblad model in the interaction picture: a dimension and a
/// list of (possibly non-Hermitian, possibly traced) jump operators.
class LindbladModel {
 public:
  LindbladModel(std::size_t dim, std::vector<CMatrix> jumps) : dim_(dim), jumps_(std::move(jumps)) {
    require_dim(dim_ >= 2, "LindbladModel: D must be >= 2");
    hermitian_ = true;
    adjoints_.reserve(jumps_.size());
    for (std::size_t alpha = 0; alpha < jumps_.size(); ++alpha) {
      const CMatrix& b = jumps_[alpha];
      require_dim(b.rows() == static_cast<Eigen::Index>(dim_) && b.cols() == b.rows(),
                  "jump operator " + std::to_string(alpha + 1) + " is " +
                      std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ", expected " +
                      std::to_string(dim_) + "x" + std::to_string(dim_));
      adjoints_.push_back(b.adjoint());
      if (hermiticity_defect(b) > tol::structural * std::max(1.0, b.norm())) hermitian_ = false;
    }
  }

  std::size_t dim() const { return dim_; }
  const std::vector<CMatrix>& jumps() const { return jumps_; }
  const CMatrix& jump(std::size_t alpha) const { return jumps_.at(alpha); }
  const CMatrix& jump_adjoint(std::size_t alpha) const { return adjoints_.at(alpha); }
  std::size_t size() const { return jumps_.size(); }
  bool hermitian() const { return hermitian_; }

  /// True iff some jump has |Tr B| above the structural tolerance.
  bool has_traced_jumps() const {
    for (const auto& b : jumps_) {
      if (std::abs(b.trace()) > tol::structural * std::max(1.0, b.norm())) return true;
    }
    return false;
  }

  std::vector<JumpVector> jump_vectors(const SuBasis& basis) const {
    require_dim(basis.dim() == dim_, "jump_vectors: basis/model dimension mismatch");
    std::vector<JumpVector> out;
    out.reserve(jumps_.size());
    for (const auto& b : jumps_) out.push_back(jump_to_vector(b, basis));
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<CMatrix> jumps_;
  std::vector<CMatrix> adjoints_;
  bool hermitian_ = true;
};

namespace detail {
inline void check_operand(const LindbladModel& model, const CMatrix& rho, const char* op) {
  require_dim(rho.rows() == static_cast<Eigen::Index>(model.dim()) && rho.cols() == rho.rows(),
              std::string(op) + ": operand must be " + std::to_string(model.dim()) + "x" +
                  std::to_string(model.dim()));
}
}  // namespace detail

/// ℒ(ρ) = Σ_α [B ρ B† − ½{B†B, ρ}]. Linear, so any square operand is accepted.
inline CMatrix lindbladian(const LindbladModel& model, const CMatrix& rho) {
  detail::check_operand(model, rho, "lindbladian");
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < model.size(); ++a) {
    const CMatrix& b = model.jump(a);
    const CMatrix& bd = model.jump_adjoint(a);
    const CMatrix bdb = bd * b;
    out += b * rho * bd - 0.5 * (bdb * rho + rho * bdb);
  }
  return out;
}

inline CMatrix lindbladian(const LindbladModel& model, const DensityMatrix& rho) {
  return lindbladian(model, rho.matrix());
}

/// Φ(ρ) = ½ Σ_α (Tr[ρ² B†B] − Tr[ρ B† ρ B]) as a holomorphic polynomial in
/// the entries of ρ. Complex for non-Hermitian probes.
inline complex potential_phi_holomorphic(const LindbladModel& model, const CMatrix& rho) {
  detail::check_operand(model, rho, "potential_phi");
  complex sum = 0.0;
  const CMatrix rho2 = rho * rho;
  for (std::size_t a = 0; a < model.size(); ++a) {
    const CMatrix& b = model.jump(a);
    const CMatrix& bd = model.jump_adjoint(a);
    sum += detail::trace_of_product(rho2, bd * b) - detail::trace_of_product(rho * bd, rho * b);
  }
  return 0.5 * sum;
}

/// Scalar potential Φ at a Hermitian ρ; nonnegative for Hermitian jumps.
inline double potential_phi(const LindbladModel& model, const CMatrix& rho) {
  const complex v = potential_phi_holomorphic(model, rho);
  return realify(v, "potential_phi", tol::imaginary_residue * std::max(1.0, rho.squaredNorm()));
}

inline double potential_phi(const LindbladModel& model, const DensityMatrix& rho) {
  return potential_phi(model, rho.matrix());
}

/// ∂Φ/∂ρᵀ = ½ Σ_α ({B†B, ρ} − B ρ B† − B† ρ B).
inline CMatrix grad_phi(const LindbladModel& model, const CMatrix& rho) {
  detail::check_operand(model, rho, "grad_phi");
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < model.size(); ++a) {
    const CMatrix& b = model.jump(a);
    const CMatrix& bd = model.jump_adjoint(a);
    const CMatrix bdb = bd * b;
    out += bdb * rho + rho * bdb - b * rho * bd - bd * rho * b;
  }
  return 0.5 * out;
}

/// R(ρ) = ½ Σ_α (B ρ B† − B† ρ B); vanishes for Hermitian jumps.
inline CMatrix solenoidal_R(const LindbladModel& model, const CMatrix& rho) {
  detail::check_operand(model, rho, "solenoidal_R");
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < model.size(); ++a) {
    const CMatrix& b = model.jump(a);
    const CMatrix& bd = model.jump_adjoint(a);
    out += b * rho * bd - bd * rho * b;
  }
  return 0.5 * out;
}

/// Complexified potential F(ρ, ρ†) = −½ Σ_α Tr[B ρ† B† ρ − B† ρ† B ρ] with
/// ρ and ρ† independent arguments.
inline complex potential_F(const LindbladModel& model, const CMatrix& rho, const CMatrix& rho_dag) {
  detail::check_operand(model, rho, "potential_F");
  detail::check_operand(model, rho_dag, "potential_F");
  complex sum = 0.0;
  for (std::size_t a = 0; a < model.size(); ++a) {
    const CMatrix& b = model.jump(a);
    const CMatrix& bd = model.jump_adjoint(a);
    sum += detail::trace_of_product(b * rho_dag * bd, rho) -
           detail::trace_of_product(bd * rho_dag * b, rho);
  }
  return -0.5 * sum;
}

/// Linear map on D×D matrices stored as a D²×D² matrix acting on
/// column-stacked vec(ρ).
class Superoperator {
 public:
  Superoperator(std::size_t dim, CMatrix matrix) : dim_(dim), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(dim_ * dim_);
    require_dim(matrix_.rows() == n && matrix_.cols() == n, "superoperator must be D^2 x D^2");
  }

  std::size_t dim() const { return dim_; }
  const CMatrix& matrix() const { return matrix_; }

  CMatrix apply(const CMatrix& x) const {
    const auto n = static_cast<Eigen::Index>(dim_);
    require_dim(x.rows() == n && x.cols() == n, "superoperator operand has wrong shape");
    const CVector v = Eigen::Map<const CVector>(x.data(), n * n);
    const CVector w = matrix_ * v;
    return Eigen::Map<const CMatrix>(w.data(), n, n);
  }

  /// Σ_ij ∂F_ij/∂ρ_ij, the trace of the materialized matrix.
  complex divergence() const { return matrix_.trace(); }

 private:
  std::size_t dim_;
  CMatrix matrix_;
};

enum class SuperopKind { lindbladian, grad_phi_map, R_map };

namespace detail {
// vec(X ρ Y) = (Yᵀ ⊗ X) vec(ρ) under column stacking.
inline CMatrix sandwich(const CMatrix& left, const CMatrix& right) {
  const Eigen::Index n = left.rows();
  CMatrix out(n * n, n * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out.block(r * n, c * n, n, n) = right(c, r) * left;
    }
  }
  return out;
}
}  // namespace detail

inline Superoperator materialize(SuperopKind kind, const LindbladModel& model) {
  const auto n = static_cast<Eigen::Index>(model.dim());
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix out = CMatrix::Zero(n * n, n * n);
  for (std::size_t a = 0; a < model.size(); ++a) {
    const CMatrix& b = model.jump(a);
    const CMatrix& bd = model.jump_adjoint(a);
    const CMatrix bdb = bd * b;
    const CMatrix anti = detail::sandwich(bdb, id) + detail::sandwich(id, bdb);
    switch (kind) {
      case SuperopKind::lindbladian:
        out += detail::sandwich(b, bd) - 0.5 * anti;
        break;
      case SuperopKind::grad_phi_map:
        out += 0.5 * (anti - detail::sandwich(b, bd) - detail::sandwich(bd, b));
        break;
      case SuperopKind::R_map:
        out += 0.5 * (detail::sandwich(b, bd) - detail::sandwich(bd, b));
        break;
    }
  }
  return Superoperator(model.dim(), std::move(out));
}

/// Scalar function of a D×D matrix, holomorphic in the entries.
using MatrixScalarFunction = std::function<complex(const CMatrix&)>;

/// Σ_ij ∂²φ/∂ρ_ij ∂ρ_ji at one point by central second differences, i.e. the
/// divergence of the matrix gradient ∂φ/∂ρᵀ.
inline complex matrix_laplacian(const MatrixScalarFunction& phi, const CMatrix& rho,
                                double step = 1e-4) {
  require_dim(rho.rows() == rho.cols(), "matrix_laplacian: probe must be square");
  const Eigen::Index n = rho.rows();
  complex total = 0.0;
  const complex f0 = phi(rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        CMatrix up = rho, down = rho;
        up(i, i) += step;
        down(i, i) -= step;
        total += (phi(up) - 2.0 * f0 + phi(down)) / (step * step);
        continue;
      }
      auto shifted = [&](double s_ij, double s_ji) {
        CMatrix x = rho;
        x(i, j) += s_ij;
        x(j, i) += s_ji;
        return phi(x);
      };
      total += (shifted(step, step) - shifted(step, -step) - shifted(-step, step) +
                shifted(-step, -step)) /
               (4.0 * step * step);
    }
  }
  return total;
}

/// Mean finite-difference matrix Laplacian over the probe points.
inline double matrix_laplacian_check(const MatrixScalarFunction& phi,
                                     const std::vector<CMatrix>& probes, double step = 1e-4) {
  if (probes.empty()) throw Error("matrix_laplacian_check: no probe points");
  complex sum = 0.0;
  for (const auto& p : probes) sum += matrix_laplacian(phi, p, step);
  const complex mean = sum / static_cast<double>(probes.size());
  return realify(mean, "matrix_laplacian_check", 1e-6);
}

}  // namespace lindflow

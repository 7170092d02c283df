#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lindflow/common.hpp"

namespace lindflow {

/// One stored coefficient of a rank-3 structure tensor, 0-based indices.
struct TensorEntry {
  std::size_t j;
  std::size_t k;
  std::size_t l;
  double value;
};

/// Coordinate-format rank-3 tensor over the adjoint index range. Every
/// nonzero index triple is stored explicitly, including permutations, so
/// contractions are a single pass over the entry list.
class SparseTensor {
 public:
  SparseTensor() = default;
  SparseTensor(std::size_t extent, std::vector<TensorEntry> entries)
      : extent_(extent), entries_(std::move(entries)) {}

  std::size_t extent() const { return extent_; }
  const std::vector<TensorEntry>& entries() const { return entries_; }
  std::size_t nonzeros() const { return entries_.size(); }

  /// Looks up a single coefficient. Linear in the number of entries.
  double operator()(std::size_t j, std::size_t k, std::size_t l) const {
    for (const auto& e : entries_) {
      if (e.j == j && e.k == k && e.l == l) return e.value;
    }
    return 0.0;
  }

  /// Dense row-major copy, index (j*n + k)*n + l.
  std::vector<double> to_dense() const {
    std::vector<double> out(extent_ * extent_ * extent_, 0.0);
    for (const auto& e : entries_) out[(e.j * extent_ + e.k) * extent_ + e.l] = e.value;
    return out;
  }

 private:
  std::size_t extent_ = 0;
  std::vector<TensorEntry> entries_;
};

namespace detail {

// Tr[x y] without forming the product.
inline complex trace_of_product(const CMatrix& x, const CMatrix& y) {
  return (x.array() * y.transpose().array()).sum();
}

enum class Bracket { commutator, anticommutator };

inline SparseTensor bracket_tensor(const std::vector<CMatrix>& lambdas, Bracket kind) {
  const std::size_t n = lambdas.size();
  std::vector<TensorEntry> entries;
  const complex prefactor = kind == Bracket::commutator ? complex(0.0, -0.25) : complex(0.25, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const CMatrix prod = lambdas[j] * lambdas[k];
      const CMatrix rev = lambdas[k] * lambdas[j];
      const CMatrix bracket = kind == Bracket::commutator ? CMatrix(prod - rev) : CMatrix(prod + rev);
      for (std::size_t l = 0; l < n; ++l) {
        const complex value = prefactor * trace_of_product(bracket, lambdas[l]);
        if (std::abs(value.imag()) > tol::imaginary_residue) {
          throw NumericalError("structure tensor entry (" + std::to_string(j + 1) + "," +
                               std::to_string(k + 1) + "," + std::to_string(l + 1) +
                               ") has imaginary residue; basis is corrupt");
        }
        if (std::abs(value.real()) > tol::prune) entries.push_back({j, k, l, value.real()});
      }
    }
  }
  return SparseTensor(n, std::move(entries));
}

// Nested generalized Gell-Mann order: for each new level k, the symmetric and
// antisymmetric pair with every lower level j, then the k-th diagonal
// generator. Pauli order for D = 2, the textbook Gell-Mann order for D = 3.
inline std::vector<CMatrix> gell_mann_matrices(std::size_t dim) {
  std::vector<CMatrix> out;
  out.reserve(adjoint_size(dim));
  const complex i(0.0, 1.0);
  for (std::size_t k = 1; k < dim; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      CMatrix sym = CMatrix::Zero(dim, dim);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      out.push_back(std::move(sym));
      CMatrix anti = CMatrix::Zero(dim, dim);
      anti(j, k) = -i;
      anti(k, j) = i;
      out.push_back(std::move(anti));
    }
    CMatrix diag = CMatrix::Zero(dim, dim);
    const double level = static_cast<double>(k);
    const double norm = std::sqrt(2.0 / (level * (level + 1.0)));
    for (std::size_t m = 0; m < k; ++m) diag(m, m) = norm;
    diag(k, k) = -level * norm;
    out.push_back(std::move(diag));
  }
  return out;
}

}  // namespace detail

/// Orthonormal traceless Hermitian basis of su(D), Tr[λ_j λ_k] = 2δ_jk,
/// together with its antisymmetric (f) and symmetric (d) structure tensors.
/// Immutable once built.
class SuBasis {
 public:
  SuBasis(std::size_t dim, std::vector<CMatrix> lambdas)
      : dim_(dim), lambdas_(std::move(lambdas)) {
    require_dim(dim_ >= 2, "su(D) basis requires D >= 2");
    require_dim(lambdas_.size() == adjoint_size(dim_), "basis must have D^2 - 1 generators");
    for (const auto& l : lambdas_) {
      require_dim(l.rows() == static_cast<Eigen::Index>(dim_) &&
                      l.cols() == static_cast<Eigen::Index>(dim_),
                  "basis generator has wrong shape");
    }
    f_ = detail::bracket_tensor(lambdas_, detail::Bracket::commutator);
    d_ = detail::bracket_tensor(lambdas_, detail::Bracket::anticommutator);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return lambdas_.size(); }
  const CMatrix& lambda(std::size_t j) const { return lambdas_.at(j); }
  const std::vector<CMatrix>& lambdas() const { return lambdas_; }
  const SparseTensor& f() const { return f_; }
  const SparseTensor& d() const { return d_; }

  /// Normalization √((D-1)/(2D)) linking Bloch coordinates to matrices.
  double bloch_scale() const {
    const double D = static_cast<double>(dim_);
    return std::sqrt((D - 1.0) / (2.0 * D));
  }

 private:
  std::size_t dim_;
  std::vector<CMatrix> lambdas_;
  SparseTensor f_;
  SparseTensor d_;
};

inline SuBasis generate_basis(std::size_t dim) {
  require_dim(dim >= 2, "generate_basis: D must be >= 2, got " + std::to_string(dim));
  return SuBasis(dim, detail::gell_mann_matrices(dim));
}

/// f_{jkl} = -(i/4) Tr([λ_j, λ_k] λ_l), recomputed from the basis matrices.
inline SparseTensor structure_constants(const SuBasis& basis) {
  return detail::bracket_tensor(basis.lambdas(), detail::Bracket::commutator);
}

/// d_{jkl} = (1/4) Tr({λ_j, λ_k} λ_l), recomputed from the basis matrices.
inline SparseTensor d_coefficients(const SuBasis& basis) {
  return detail::bracket_tensor(basis.lambdas(), detail::Bracket::anticommutator);
}

namespace detail {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class DA, class DB>
auto contract(const SparseTensor& t, const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DA::Scalar, typename DB::Scalar>::ReturnType;
  const auto n = static_cast<Eigen::Index>(t.extent());
  require_dim(a.size() == n && b.size() == n, "adjoint vector length mismatch");
  Vec<Scalar> out = Vec<Scalar>::Zero(n);
  for (const auto& e : t.entries()) out(e.j) += e.value * a(e.k) * b(e.l);
  return out;
}

// Matrix X with X a = t_{jkl} b_k a_l.
template <class D>
auto left_contraction_matrix(const SparseTensor& t, const Eigen::MatrixBase<D>& b) {
  using Scalar = typename D::Scalar;
  const auto n = static_cast<Eigen::Index>(t.extent());
  require_dim(b.size() == n, "adjoint vector length mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (const auto& e : t.entries()) out(e.j, e.l) += e.value * b(e.k);
  return out;
}

}  // namespace detail

/// (a ∧ b)_j = f_{jkl} a_k b_l. Works for real and complex vectors.
template <class DA, class DB>
auto wedge(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b, const SuBasis& basis) {
  return detail::contract(basis.f(), a, b);
}

/// (a ⋆ b)_j = d_{jkl} a_k b_l.
template <class DA, class DB>
auto star(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b, const SuBasis& basis) {
  return detail::contract(basis.d(), a, b);
}

/// Matrix W_b with W_b a = b ∧ a.
template <class D>
auto wedge_matrix(const Eigen::MatrixBase<D>& b, const SuBasis& basis) {
  return detail::left_contraction_matrix(basis.f(), b);
}

/// Matrix S_b with S_b a = b ⋆ a.
template <class D>
auto star_matrix(const Eigen::MatrixBase<D>& b, const SuBasis& basis) {
  return detail::left_contraction_matrix(basis.d(), b);
}

}  // namespace lindflow

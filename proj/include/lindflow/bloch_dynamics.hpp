#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "lindflow/bloch_map.hpp"
#include "lindflow/common.hpp"
#include "lindflow/lindblad_core.hpp"
#include "lindflow/su_algebra.hpp"

namespace lindflow {

/// Affine Bloch-space generator: da/dt = M a + v.
struct BlochGenerator {
  std::size_t dim;
  RMatrix M;
  RVector v;

  RVector rate(const RVector& a) const { return M * a + v; }
};

/// M_ij = (D−1)/D Σ_α (f_ikl f_lmj Re[b*_k b_m] + f_ikl d_lmj Im[b*_k b_m])
/// v_i = (2/D) √((D−1)/(2D)) Σ_α f_ijk Im[b*_j b_k]
///
/// Jumps with nonzero trace add (1/D) √((D−1)/(2D)) i (Tr[B]* b − Tr[B] b*) ∧ a
/// to the rate, folded into M; no GKSL shift is applied to the model.
inline BlochGenerator build_generator(const LindbladModel& model, const SuBasis& basis) {
  require_dim(model.dim() == basis.dim(), "build_generator: model/basis dimension mismatch");
  const double D = static_cast<double>(basis.dim());
  const auto n = static_cast<Eigen::Index>(basis.size());
  const double c = basis.bloch_scale();
  RMatrix M = RMatrix::Zero(n, n);
  RVector v = RVector::Zero(n);
  const complex i(0.0, 1.0);
  for (const JumpVector& jv : model.jump_vectors(basis)) {
    const CVector bc = jv.b.conjugate();
    const CMatrix w_conj = wedge_matrix(bc, basis);
    M += ((D - 1.0) / D) * ((w_conj * wedge_matrix(jv.b, basis)).real() +
                            (w_conj * star_matrix(jv.b, basis)).imag());
    v += (2.0 / D) * c * wedge(bc, jv.b, basis).imag();
    const complex trace = jv.trace_part * D;
    if (std::abs(trace) > 0.0) {
      const CVector shift = i * (std::conj(trace) * jv.b - trace * bc);
      M += (c / D) * wedge_matrix(shift, basis).real();
    }
  }
  return {basis.dim(), std::move(M), std::move(v)};
}

struct Spectrum {
  CVector eigenvalues;
  RVector rates;
  CMatrix eigenvectors;  // column j pairs with eigenvalues(j)
};

/// Full eigendecomposition of M, rates Γ = −Re λ sorted descending; ties are
/// broken by (Re, Im, original index).
inline Spectrum spectrum(const BlochGenerator& gen) {
  Eigen::EigenSolver<RMatrix> solver(gen.M, true);
  if (solver.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver failed");
  const CVector values = solver.eigenvalues();
  const CMatrix vectors = solver.eigenvectors();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const complex x = values(a), y = values(b);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
    return a < b;
  });
  Spectrum out{CVector(values.size()), RVector(values.size()),
               CMatrix(vectors.rows(), vectors.cols())};
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = values(src);
    out.rates(k) = -values(src).real();
    out.eigenvectors.col(k) = vectors.col(src);
  }
  return out;
}

namespace detail {
// exp of the augmented generator [[M t, v t], [0, 0]] applied to (a0, 1).
inline RVector affine_flow(const BlochGenerator& gen, const RVector& a0, double t) {
  const Eigen::Index n = gen.M.rows();
  RMatrix aug = RMatrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = gen.M * t;
  aug.topRightCorner(n, 1) = gen.v * t;
  RVector x(n + 1);
  x.head(n) = a0;
  x(n) = 1.0;
  const RMatrix e = aug.exp();
  return (e * x).head(n);
}

inline double zero_threshold(const RMatrix& M) { return 1e-9 * std::max(1.0, M.norm()); }
}  // namespace detail

/// t → ∞ limit of da/dt = M a + v. Invertible M gives −M⁻¹v; singular M
/// needs a starting point and returns its projection onto ker M (along the
/// complementary invariant subspace) plus the particular solution.
inline BlochVector steady_state(const BlochGenerator& gen,
                                const std::optional<BlochVector>& a0 = std::nullopt) {
  const Eigen::Index n = gen.M.rows();
  require_dim(gen.v.size() == n, "steady_state: generator has inconsistent sizes");
  if (a0) require_dim(a0->dim() == gen.dim, "steady_state: initial vector dimension mismatch");

  Eigen::EigenSolver<RMatrix> solver(gen.M, true);
  if (solver.info() != Eigen::Success) throw NumericalError("steady_state: eigensolver failed");
  const CVector lambda = solver.eigenvalues();
  const double thr = detail::zero_threshold(gen.M);
  double slowest = std::numeric_limits<double>::infinity();
  bool singular = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(lambda(k)) <= thr) {
      singular = true;
    } else {
      slowest = std::min(slowest, -lambda(k).real());
    }
  }

  if (!singular) {
    return BlochVector(gen.dim, -gen.M.partialPivLu().solve(gen.v));
  }
  if (!a0) {
    throw NumericalError("steady_state: M is singular; an initial Bloch vector is required");
  }

  const CMatrix V = solver.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(V);
  const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  if (std::isfinite(cond) && cond < 1e10) {
    const auto lu = V.partialPivLu();
    const CVector c0 = lu.solve(a0->coords().cast<complex>());
    const CVector w = lu.solve(gen.v.cast<complex>());
    CVector c(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(lambda(k)) <= thr) {
        if (std::abs(w(k)) > 1e-8 * std::max(1.0, gen.v.norm())) {
          throw NumericalError("steady_state: inhomogeneity drives a zero mode; no finite limit");
        }
        c(k) = c0(k);
      } else {
        c(k) = -w(k) / lambda(k);
      }
    }
    const CVector a = V * c;
    if (a.imag().norm() > 1e-8 * std::max(1.0, a.norm())) {
      throw NumericalError("steady_state: projected limit is not real");
    }
    return BlochVector(gen.dim, a.real());
  }

  // Defective M: evaluate the flow far out and demand convergence.
  if (!std::isfinite(slowest) || slowest <= 0.0) slowest = 1.0;
  const double horizon = 1e3 / slowest;
  const RVector far = detail::affine_flow(gen, a0->coords(), horizon);
  const RVector farther = detail::affine_flow(gen, a0->coords(), 2.0 * horizon);
  if ((far - farther).norm() > 1e-8 * std::max(1.0, far.norm())) {
    throw NumericalError("steady_state: flow did not converge at t = " + std::to_string(horizon));
  }
  return BlochVector(gen.dim, farther);
}

struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> times;
  std::vector<RVector> states;
  std::vector<double> purity;
  std::optional<std::vector<double>> potential;
};

/// a(t) = exp(M t) a0 + ∫₀ᵗ exp(M s) v ds on the given grid.
inline Trajectory evolve(const BlochGenerator& gen, const BlochVector& a0,
                         const std::vector<double>& times) {
  require_dim(a0.dim() == gen.dim, "evolve: initial vector dimension mismatch");
  if (times.empty()) throw Error("evolve: empty time grid");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error("evolve: time grid must be strictly increasing");
  }
  Trajectory out;
  out.dim = gen.dim;
  out.times = times;
  out.states.reserve(times.size());
  out.purity.reserve(times.size());
  const double D = static_cast<double>(gen.dim);
  for (double t : times) {
    RVector a = detail::affine_flow(gen, a0.coords(), t - times.front());
    out.purity.push_back((1.0 + (D - 1.0) * a.squaredNorm()) / D);
    out.states.push_back(std::move(a));
  }
  return out;
}

/// ‖M S_b − S_b M‖_F with (S_b a) = b ⋆ a. Meaningful for a single
/// Hermitian qutrit jump; complex b is accepted as a diagnostic.
inline double qutrit_star_symmetry(const BlochGenerator& gen, const CVector& b,
                                   const SuBasis& basis) {
  require_dim(basis.dim() == 3 && gen.dim == 3, "qutrit_star_symmetry requires D = 3");
  const CMatrix S = star_matrix(b, basis);
  const CMatrix M = gen.M.cast<complex>();
  return (M * S - S * M).norm();
}

/// Φ(a) = ((D−1)²/(2D²)) Σ_α |b_α ∧ a|² for real jump vectors; the
/// Hermitian flow is da/dt = −(D/(D−1)) ∇Φ.
inline double bloch_potential_hermitian(const std::vector<RVector>& jump_vectors,
                                        const RVector& a, const SuBasis& basis) {
  const double D = static_cast<double>(basis.dim());
  double sum = 0.0;
  for (const auto& b : jump_vectors) sum += wedge(b, a, basis).squaredNorm();
  return (D - 1.0) * (D - 1.0) / (2.0 * D * D) * sum;
}

namespace closed_form {

/// Eigenvalues of M for one traceless non-Hermitian qubit jump, in the order
/// {−½ b·b*, −¼ b·b* − ¼√((b·b)(b*·b*)), −¼ b·b* + ¼√((b·b)(b*·b*))}.
inline std::vector<double> qubit_single_jump_eigenvalues(const CVector& b) {
  const double bb_conj = b.squaredNorm();
  const double root = std::abs((b.array() * b.array()).sum());  // √((b·b)(b*·b*)) = |b·b|
  return {-0.5 * bb_conj, -0.25 * bb_conj - 0.25 * root, -0.25 * bb_conj + 0.25 * root};
}

/// a_SS = Im[b* × b] / (b · b*).
inline RVector qubit_single_jump_steady_state(const CVector& b) {
  require_dim(b.size() == 3, "qubit closed forms need a length-3 jump vector");
  const CVector bc = b.conjugate();
  CVector cross(3);
  cross << bc(1) * b(2) - bc(2) * b(1), bc(2) * b(0) - bc(0) * b(2), bc(0) * b(1) - bc(1) * b(0);
  return cross.imag() / b.squaredNorm();
}

/// |a_SS|² = 1 − (b·b)(b*·b*)/(b·b*)².
inline double qubit_single_jump_purity_radius2(const CVector& b) {
  const double bb_conj = b.squaredNorm();
  const complex bb = (b.array() * b.array()).sum();
  return 1.0 - std::norm(bb) / (bb_conj * bb_conj);
}

/// Eigenvalue multiset {0, 0, r0, r0, r1, r1, r2, r2} for one Hermitian
/// qutrit jump with real vector b, ascending.
inline std::vector<double> qutrit_hermitian_eigenvalues(const RVector& b, const SuBasis& basis) {
  require_dim(basis.dim() == 3 && b.size() == 8, "qutrit closed form requires D = 3");
  const double b2 = b.squaredNorm();
  std::vector<double> out{0.0, 0.0};
  if (b2 == 0.0) {
    out.resize(8, 0.0);
    return out;
  }
  const double triple = star(b, b, basis).dot(b);
  double arg = 6.0 * triple * triple / (b2 * b2 * b2) - 1.0;
  if (arg < -1.0 - 1e-9 || arg > 1.0 + 1e-9) {
    throw NumericalError("qutrit_hermitian_eigenvalues: arccos argument out of range");
  }
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 6.0;
  for (int k = 0; k < 3; ++k) {
    const double s = std::sin(theta - M_PI * k / 3.0);
    const double r = -(2.0 / 3.0) * b2 * s * s;
    out.push_back(r);
    out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace closed_form

}  // namespace lindflow

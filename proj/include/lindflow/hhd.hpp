#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "lindflow/bloch_dynamics.hpp"
#include "lindflow/common.hpp"

namespace lindflow {

/// Complex Schur form Z = U T Uᴴ with the diagonal of T reordered so that
/// real parts decrease down the diagonal.
struct OrderedSchur {
  CMatrix T;
  CMatrix U;
};

namespace detail {

// Swaps the adjacent diagonal entries k, k+1 of upper-triangular T with a
// unitary rotation, updating the Schur vectors.
inline void swap_schur_pair(CMatrix& T, CMatrix& U, Eigen::Index k) {
  const complex t11 = T(k, k), t22 = T(k + 1, k + 1), t12 = T(k, k + 1);
  // Eigenvector of the 2x2 block for t22 becomes the new leading direction.
  complex x1 = t12, x2 = t22 - t11;
  const double norm = std::hypot(std::abs(x1), std::abs(x2));
  if (norm == 0.0) return;
  x1 /= norm;
  x2 /= norm;
  Eigen::Matrix2cd G;
  G << x1, -std::conj(x2), x2, std::conj(x1);
  T.middleRows(k, 2) = (G.adjoint() * T.middleRows(k, 2)).eval();
  T.middleCols(k, 2) = (T.middleCols(k, 2) * G).eval();
  U.middleCols(k, 2) = (U.middleCols(k, 2) * G).eval();
  T(k + 1, k) = 0.0;
}

}  // namespace detail

inline OrderedSchur ordered_schur(const RMatrix& Z) {
  Eigen::ComplexSchur<CMatrix> schur(Z.cast<complex>());
  if (schur.info() != Eigen::Success) throw NumericalError("ordered_schur: Schur decomposition failed");
  OrderedSchur out{schur.matrixT(), schur.matrixU()};
  const Eigen::Index n = out.T.rows();
  // Bubble sort on the diagonal; every exchange is a unitary similarity.
  for (Eigen::Index pass = 0; pass < n; ++pass) {
    bool swapped = false;
    for (Eigen::Index k = 0; k + 1 < n - pass; ++k) {
      if (out.T(k + 1, k + 1).real() > out.T(k, k).real()) {
        detail::swap_schur_pair(out.T, out.U, k);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  return out;
}

struct RiccatiSolution {
  RMatrix P;
  std::size_t leading_block;  // Schur vectors taken from the positive part of Z's spectrum
  std::size_t kernel_dim;     // ker M directions appended as [x; 0]
  double u11_condition;
  double riccati_residual;    // ‖MᵀP + PM + 2P²‖_F / ‖M‖_F²
  double trace_residual;      // |Tr P + Tr M| / max(1, ‖M‖_F)
  double symmetry_residual;   // ‖P − Pᵀ‖_F before symmetrization
};

inline constexpr double kRiccatiTolerance = 1e-8;
inline constexpr double kU11ConditionLimit = 1e12;

namespace detail {
inline double quadratic_scale(const RMatrix& M) {
  const double s = M.squaredNorm();
  return s > 0.0 ? s : 1.0;
}
}  // namespace detail

/// Solves MᵀP + PM + 2P² = 0 with Tr P = −Tr M from the ordered Schur form
/// of Z = [[M, −2𝕀], [0, −Mᵀ]]: the invariant subspace of Z's positive
/// eigenvalues (those of −Mᵀ), completed by [x; 0] for x ∈ ker M, gives
/// P = −U₂₁U₁₁⁻¹.
inline RiccatiSolution solve_riccati(const BlochGenerator& gen) {
  const RMatrix& M = gen.M;
  const Eigen::Index n = M.rows();
  require_dim(M.cols() == n, "solve_riccati: M must be square");
  const double thr = 1e-9 * std::max(1.0, M.norm());

  Eigen::EigenSolver<RMatrix> eig(M, false);
  if (eig.info() != Eigen::Success) throw NumericalError("solve_riccati: eigensolver failed");
  Eigen::Index decaying = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = eig.eigenvalues()(k).real();
    if (re > thr) {
      throw NumericalError("solve_riccati: M has an eigenvalue with positive real part " +
                           std::to_string(re) + "; not a Lindblad generator");
    }
    if (re < -thr) ++decaying;
  }

  RMatrix Z = RMatrix::Zero(2 * n, 2 * n);
  Z.topLeftCorner(n, n) = M;
  Z.topRightCorner(n, n) = -2.0 * RMatrix::Identity(n, n);
  Z.bottomRightCorner(n, n) = -M.transpose();
  const OrderedSchur schur = ordered_schur(Z);

  CMatrix X(n, n), Y(n, n);
  X.leftCols(decaying) = schur.U.topLeftCorner(n, decaying);
  Y.leftCols(decaying) = schur.U.bottomLeftCorner(n, decaying);
  const Eigen::Index kernel = n - decaying;
  if (kernel > 0) {
    Eigen::JacobiSVD<RMatrix> svd(M, Eigen::ComputeFullV);
    const RVector& s = svd.singularValues();
    Eigen::Index nullity = 0;
    for (Eigen::Index k = 0; k < n; ++k) nullity += s(k) <= thr ? 1 : 0;
    if (nullity != kernel) {
      throw NumericalError("solve_riccati: zero eigenvalue of M is defective (nullity " +
                           std::to_string(nullity) + " vs multiplicity " + std::to_string(kernel) +
                           "); algorithm inapplicable");
    }
    X.rightCols(kernel) = svd.matrixV().rightCols(kernel).cast<complex>();
    Y.rightCols(kernel).setZero();
  }

  Eigen::JacobiSVD<CMatrix> xsvd(X);
  const double smin = xsvd.singularValues()(n - 1);
  const double cond = smin > 0.0 ? xsvd.singularValues()(0) / smin : INFINITY;
  if (!(cond <= kU11ConditionLimit)) {
    throw NumericalError("solve_riccati: U11 is singular (condition " + std::to_string(cond) +
                         "); algorithm inapplicable");
  }

  // P X = Y  ⇔  Xᵀ Pᵀ = Yᵀ
  const CMatrix Pc = -X.transpose().colPivHouseholderQr().solve(Y.transpose()).transpose();
  const double pnorm = std::max(1.0, Pc.norm());
  if (Pc.imag().norm() > 1e-8 * pnorm) {
    throw NumericalError("solve_riccati: extracted P is not real");
  }
  const RMatrix raw = Pc.real();
  RiccatiSolution out;
  out.symmetry_residual = (raw - raw.transpose()).norm();
  out.P = 0.5 * (raw + raw.transpose());
  out.leading_block = static_cast<std::size_t>(decaying);
  out.kernel_dim = static_cast<std::size_t>(kernel);
  out.u11_condition = cond;
  const RMatrix& P = out.P;
  out.riccati_residual =
      (M.transpose() * P + P * M + 2.0 * P * P).norm() / detail::quadratic_scale(M);
  out.trace_residual = std::abs(P.trace() + M.trace()) / std::max(1.0, M.norm());
  if (out.trace_residual > kRiccatiTolerance) {
    throw NumericalError("solve_riccati: trace constraint Tr P = -Tr M fails by " +
                         std::to_string(out.trace_residual) + " (wrong Schur ordering)");
  }
  return out;
}

struct LinearSolution {
  RVector p;
  std::size_t nullity;
  double residual;  // ‖Mᵀp + P(v + 2p)‖ / max(1, ‖M‖²)
};

/// Solves (Mᵀ + 2P) p = −P v. A singular system is accepted when it is
/// consistent; the minimum-norm solution is returned.
inline LinearSolution solve_linear(const BlochGenerator& gen, const RMatrix& P) {
  const RMatrix& M = gen.M;
  require_dim(P.rows() == M.rows() && P.cols() == M.cols(), "solve_linear: P/M size mismatch");
  const RMatrix A = M.transpose() + 2.0 * P;
  const RVector rhs = -P * gen.v;
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(A);
  cod.setThreshold(1e-10);
  LinearSolution out;
  out.p = cod.solve(rhs);
  out.nullity = static_cast<std::size_t>(A.rows() - cod.rank());
  out.residual = (M.transpose() * out.p + P * (gen.v + 2.0 * out.p)).norm() /
                 detail::quadratic_scale(M);
  if (out.residual > kRiccatiTolerance) {
    throw NumericalError("solve_linear: (M^T + 2P) p = -P v is inconsistent (nullity " +
                         std::to_string(out.nullity) + ", residual " +
                         std::to_string(out.residual) + ")");
  }
  return out;
}

struct HHDResiduals {
  double riccati;
  double linear;
  double scalar;
  double trace;
  double orthogonality;
  double symmetry;
};

/// Orthogonal Helmholtz–Hodge data: Φ̃(a) = (D/(D−1)) [½ aᵀPa + pᵀa].
struct HHDecomposition {
  std::size_t dim;
  RMatrix P;
  RVector p;
  HHDResiduals residuals;
};

/// Builds (P, p) and rejects the result unless every residual is below
/// `tolerance`.
inline HHDecomposition orthogonal_decomposition(const BlochGenerator& gen,
                                                double tolerance = kRiccatiTolerance) {
  const RiccatiSolution ric = solve_riccati(gen);
  const LinearSolution lin = solve_linear(gen, ric.P);
  const RMatrix& M = gen.M;
  const RMatrix& P = ric.P;
  const RVector& p = lin.p;
  const RVector& v = gen.v;
  const double scale = detail::quadratic_scale(M);

  HHDResiduals r{};
  r.riccati = ric.riccati_residual;
  r.linear = lin.residual;
  r.scalar = std::abs(p.dot(v + p)) / scale;
  r.trace = ric.trace_residual;
  r.symmetry = ric.symmetry_residual / std::max(1.0, P.norm());
  // Coefficients of (Pa + p)·((M + P)a + v + p) as a polynomial in a.
  const RMatrix quad = P * (M + P);
  const double quadratic = (quad + quad.transpose()).norm();
  const double linear = ((M + P).transpose() * p + P * (v + p)).norm();
  r.orthogonality = (quadratic + linear) / scale + r.scalar;

  const std::pair<const char*, double> checks[] = {
      {"riccati", r.riccati}, {"linear", r.linear}, {"scalar", r.scalar},
      {"trace", r.trace},     {"orthogonality", r.orthogonality}};
  for (const auto& [name, value] : checks) {
    if (!(value <= tolerance)) {
      throw NumericalError(std::string("orthogonal_decomposition: ") + name + " residual " +
                           std::to_string(value) + " exceeds " + std::to_string(tolerance));
    }
  }
  return {gen.dim, P, p, r};
}

inline double potential_tilde(const HHDecomposition& dec, const RVector& a) {
  require_dim(a.size() == dec.p.size(), "potential_tilde: vector length mismatch");
  const double D = static_cast<double>(dec.dim);
  return D / (D - 1.0) * (0.5 * a.dot(dec.P * a) + dec.p.dot(a));
}

inline double potential_tilde(const HHDecomposition& dec, const BlochVector& a) {
  require_dim(a.dim() == dec.dim, "potential_tilde: dimension mismatch");
  return potential_tilde(dec, a.coords());
}

struct FlowSplit {
  RVector grad_part;  // −(D/(D−1)) ∇Φ̃ = −Pa − p
  RVector sol_part;   // (M + P)a + v + p
};

inline FlowSplit decompose(const HHDecomposition& dec, const BlochGenerator& gen,
                           const RVector& a) {
  require_dim(a.size() == gen.M.rows() && dec.p.size() == a.size(),
              "decompose: vector length mismatch");
  RVector grad = -dec.P * a - dec.p;
  RVector sol = (gen.M + dec.P) * a + gen.v + dec.p;
  return {std::move(grad), std::move(sol)};
}

struct LyapunovReport {
  bool monotone;
  double max_increase;       // largest Φ̃(t_{k+1}) − Φ̃(t_k)
  double max_rate_error;     // mismatch of dΦ̃/dt against −(D/(D−1))‖Pa+p‖², relative to the peak rate
  std::vector<double> values;
};

inline constexpr double kMonotoneTolerance = 1e-10;

/// Evaluates Φ̃ along the trajectory, checks it never increases, and compares
/// a central difference of Φ̃ along the flow with the closed-form orbital
/// derivative at every grid point.
inline LyapunovReport lyapunov_check(const HHDecomposition& dec, const BlochGenerator& gen,
                                     const Trajectory& traj) {
  require_dim(traj.dim == dec.dim && gen.dim == dec.dim, "lyapunov_check: dimension mismatch");
  LyapunovReport out{true, -INFINITY, 0.0, {}};
  out.values.reserve(traj.states.size());
  for (const auto& a : traj.states) out.values.push_back(potential_tilde(dec, a));
  for (std::size_t k = 1; k < out.values.size(); ++k) {
    const double inc = out.values[k] - out.values[k - 1];
    out.max_increase = std::max(out.max_increase, inc);
    if (inc > kMonotoneTolerance * std::max(1.0, std::abs(out.values[k - 1]))) out.monotone = false;
  }
  if (out.values.size() < 2) out.max_increase = 0.0;

  // Errors are measured against the largest rate on the trajectory so the
  // cancellation noise of the difference quotient near a fixed point does not
  // dominate.
  const double D = static_cast<double>(dec.dim);
  const double h = 1e-3 / std::max(1.0, gen.M.norm());
  std::vector<double> predicted, measured;
  double peak = 1e-12 * std::max(1.0, gen.M.norm());
  for (const auto& a : traj.states) {
    const RVector g = dec.P * a + dec.p;
    predicted.push_back(-D / (D - 1.0) * g.squaredNorm());
    measured.push_back((potential_tilde(dec, detail::affine_flow(gen, a, h)) -
                        potential_tilde(dec, detail::affine_flow(gen, a, -h))) /
                       (2.0 * h));
    peak = std::max(peak, std::abs(predicted.back()));
  }
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    out.max_rate_error = std::max(out.max_rate_error, std::abs(measured[k] - predicted[k]) / peak);
  }
  return out;
}

}  // namespace lindflow

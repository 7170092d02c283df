#pragma once

// Independent reference computations for the test suites: dense brute-force
// tensors, column-by-column superoperators, finite differences, and seeded
// random inputs.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lindflow/lindflow.hpp"

namespace oracle {

using lindflow::CMatrix;
using lindflow::complex;
using lindflow::CVector;
using lindflow::RMatrix;
using lindflow::RVector;

/// Dense n×n×n tensor, index (j, k, l) at (j*n + k)*n + l.
struct Dense3 {
  std::size_t n = 0;
  std::vector<double> v;
  double operator()(std::size_t j, std::size_t k, std::size_t l) const { return v[(j * n + k) * n + l]; }
  double& at(std::size_t j, std::size_t k, std::size_t l) { return v[(j * n + k) * n + l]; }
};

inline complex tr(const CMatrix& x) { return x.trace(); }

/// f_jkl = −(i/4) Tr([λj, λk] λl) straight from the matrices, full loop.
inline Dense3 brute_f(const std::vector<CMatrix>& L) {
  const std::size_t n = L.size();
  Dense3 t{n, std::vector<double>(n * n * n)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        t.at(j, k, l) = (complex(0, -0.25) * tr((L[j] * L[k] - L[k] * L[j]) * L[l])).real();
  return t;
}

inline Dense3 brute_d(const std::vector<CMatrix>& L) {
  const std::size_t n = L.size();
  Dense3 t{n, std::vector<double>(n * n * n)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        t.at(j, k, l) = (0.25 * tr((L[j] * L[k] + L[k] * L[j]) * L[l])).real();
  return t;
}

/// out_j = t_jkl a_k b_l by explicit triple loop.
template <class V>
V contract(const Dense3& t, const V& a, const V& b) {
  V out = V::Zero(static_cast<Eigen::Index>(t.n));
  for (std::size_t j = 0; j < t.n; ++j)
    for (std::size_t k = 0; k < t.n; ++k)
      for (std::size_t l = 0; l < t.n; ++l) out(j) += t(j, k, l) * a(k) * b(l);
  return out;
}

/// Matrix of ρ ↦ ℒ(ρ) built by applying the map to each unit matrix E_ij
/// (column stacking). Shares no code with the library's Kronecker builder.
inline CMatrix superoperator_by_columns(const std::function<CMatrix(const CMatrix&)>& map, Eigen::Index d) {
  CMatrix S(d * d, d * d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) {
      CMatrix e = CMatrix::Zero(d, d);
      e(r, c) = 1.0;
      const CMatrix img = map(e);
      S.col(c * d + r) = Eigen::Map<const CVector>(img.data(), d * d);
    }
  return S;
}

/// ρ(t) = unvec(exp(t S) vec ρ0).
inline CMatrix evolve_superop(const CMatrix& S, const CMatrix& rho0, double t) {
  const Eigen::Index d = rho0.rows();
  const CMatrix E = (t * S).exp();
  const CVector w = E * Eigen::Map<const CVector>(rho0.data(), d * d);
  return Eigen::Map<const CMatrix>(w.data(), d, d);
}

/// Matrix G with G_ij = ∂φ/∂ρ_ji by central differences on each entry.
inline CMatrix fd_gradient(const std::function<complex(const CMatrix&)>& phi, const CMatrix& rho,
                           double h) {
  const Eigen::Index d = rho.rows();
  CMatrix G(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      CMatrix up = rho, dn = rho;
      up(j, i) += h;
      dn(j, i) -= h;
      G(i, j) = (phi(up) - phi(dn)) / (2.0 * h);
    }
  return G;
}

/// Central-difference Jacobian of a real vector field.
inline RMatrix fd_jacobian(const std::function<RVector(const RVector&)>& F, const RVector& x, double h) {
  const Eigen::Index n = x.size();
  RMatrix J(F(x).size(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    RVector up = x, dn = x;
    up(k) += h;
    dn(k) -= h;
    J.col(k) = (F(up) - F(dn)) / (2.0 * h);
  }
  return J;
}

inline RVector fd_gradient_real(const std::function<double(const RVector&)>& f, const RVector& x, double h) {
  RVector g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    RVector up = x, dn = x;
    up(k) += h;
    dn(k) -= h;
    g(k) = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

/// Seeded generator of random test inputs.
class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  double normal() { return gauss_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  RVector real_vector(Eigen::Index n) {
    RVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = normal();
    return v;
  }
  CVector complex_vector(Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = complex(normal(), normal());
    return v;
  }
  CMatrix complex_matrix(Eigen::Index d) {
    CMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = complex(normal(), normal());
    return m;
  }
  CMatrix hermitian(Eigen::Index d) {
    const CMatrix g = complex_matrix(d);
    return 0.5 * (g + g.adjoint());
  }
  CMatrix traceless(CMatrix m) {
    const Eigen::Index d = m.rows();
    m -= (m.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
    return m;
  }
  /// Full-rank density matrix G G† / Tr.
  CMatrix density(Eigen::Index d) {
    const CMatrix g = complex_matrix(d);
    CMatrix r = g * g.adjoint();
    r /= r.trace();
    return 0.5 * (r + r.adjoint());
  }
  /// Hermitian unit-trace matrix that need not be positive.
  CMatrix hermitian_unit_trace(Eigen::Index d) {
    CMatrix h = hermitian(d);
    h += ((1.0 - h.trace().real()) / static_cast<double>(d)) * CMatrix::Identity(d, d);
    return h;
  }
  /// 1–3 jumps with unit-scale entries; traceless unless `traced`.
  std::vector<CMatrix> jumps(Eigen::Index d, bool traced = false, bool hermitian_only = false) {
    const int count = integer(1, 3);
    std::vector<CMatrix> out;
    for (int k = 0; k < count; ++k) {
      CMatrix b = hermitian_only ? hermitian(d) : complex_matrix(d);
      if (!traced) b = traceless(b);
      out.push_back(b / std::sqrt(static_cast<double>(d)));
    }
    return out;
  }
  lindflow::LindbladModel model(std::size_t d, bool traced = false, bool hermitian_only = false) {
    return lindflow::LindbladModel(d, jumps(static_cast<Eigen::Index>(d), traced, hermitian_only));
  }
  /// Bloch vector of a random full-rank state.
  RVector bloch_state(const lindflow::SuBasis& basis) {
    return lindflow::bloch_coordinates(density(static_cast<Eigen::Index>(basis.dim())), basis);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// Reference amplitude-damping qutrit model, B = γ(|0⟩⟨1| + √2 |1⟩⟨2|).
inline lindflow::LindbladModel amplitude_damping(double gamma = 1.0) {
  CMatrix b = CMatrix::Zero(3, 3);
  b(0, 1) = gamma;
  b(1, 2) = gamma * std::sqrt(2.0);
  return lindflow::LindbladModel(3, {b});
}

/// M and v printed for the amplitude-damping example, in units of γ².
inline RMatrix amplitude_damping_M() {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  RMatrix M = RMatrix::Zero(8, 8);
  M(0, 0) = -0.5;
  M(0, 5) = s2;
  M(1, 1) = -0.5;
  M(1, 6) = s2;
  M(2, 2) = -1.0;
  M(2, 7) = s3;
  M(3, 3) = -1.0;
  M(4, 4) = -1.0;
  M(5, 5) = -1.5;
  M(6, 6) = -1.5;
  M(7, 7) = -2.0;
  return M;
}

inline RVector amplitude_damping_v() {
  RVector v = RVector::Zero(8);
  v(7) = 1.0;
  return v;
}

inline RMatrix amplitude_damping_P() {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  RMatrix P = RMatrix::Zero(8, 8);
  P(0, 0) = 1.0 / 3.0;
  P(0, 5) = P(5, 0) = -1.0 / (3.0 * s2);
  P(1, 1) = 1.0 / 3.0;
  P(1, 6) = P(6, 1) = -1.0 / (3.0 * s2);
  P(2, 2) = 0.75;
  P(2, 7) = P(7, 2) = -s3 / 4.0;
  P(3, 3) = 1.0;
  P(4, 4) = 1.0;
  P(5, 5) = 5.0 / 3.0;
  P(6, 6) = 5.0 / 3.0;
  P(7, 7) = 2.25;
  return P;
}

inline RVector amplitude_damping_p() {
  RVector p = RVector::Zero(8);
  p(2) = -std::sqrt(3.0) / 4.0;
  p(7) = -0.75;
  return p;
}

inline RVector amplitude_damping_steady_state() {
  RVector a = RVector::Zero(8);
  a(2) = std::sqrt(3.0) / 2.0;
  a(7) = 0.5;
  return a;
}

/// The expanded Φ̃ polynomial for amplitude damping at γ = 1, 1-based a_k.
inline double amplitude_damping_potential_polynomial(const RVector& x) {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  auto a = [&](int k) { return x(k - 1); };
  return (4 * a(1) * a(1) - 4 * s2 * a(6) * a(1) + 4 * a(2) * a(2) + 9 * a(3) * a(3) +
          12 * a(4) * a(4) + 12 * a(5) * a(5) + 20 * a(6) * a(6) + 20 * a(7) * a(7) +
          27 * a(8) * a(8) - 6 * s3 * a(3) - 4 * s2 * a(2) * a(7) - 6 * s3 * a(3) * a(8) -
          18 * a(8)) /
         16.0;
}

}  // namespace oracle

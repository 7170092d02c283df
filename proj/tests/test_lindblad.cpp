// Matrix-space Lindbladian, potentials, superoperators and the matrix Laplacian.

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace lindflow;

namespace {

CMatrix anticommutator(const CMatrix& x, const CMatrix& y) { return x * y + y * x; }

double rel_err(const CMatrix& got, const CMatrix& want) {
  return (got - want).norm() / std::max(1e-300, want.norm());
}

}  // namespace

TEST(LindbladModel, ValidatesShapes) {
  EXPECT_THROW(LindbladModel(3, {CMatrix::Zero(2, 2)}), DimensionError);
  EXPECT_THROW(LindbladModel(2, {CMatrix::Zero(2, 3)}), DimensionError);
  EXPECT_THROW(LindbladModel(1, {}), DimensionError);
  try {
    LindbladModel(3, {CMatrix::Zero(3, 3), CMatrix::Zero(2, 2)});
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("jump operator 2 is 2x2"), std::string::npos);
  }
  const LindbladModel m(2, {CMatrix::Identity(2, 2)});
  EXPECT_TRUE(m.hermitian());
  EXPECT_TRUE(m.has_traced_jumps());
  EXPECT_FALSE(oracle::amplitude_damping().hermitian());
  EXPECT_THROW(lindbladian(m, CMatrix::Identity(3, 3)), DimensionError);
}

TEST(Lindbladian, TraceAndHermiticityPreserved) {
  oracle::Random rng(101);
  for (std::size_t D = 2; D <= 4; ++D) {
    for (int trial = 0; trial < 100; ++trial) {
      const LindbladModel model = rng.model(D, trial % 2 == 1);
      const CMatrix rho = rng.density(static_cast<Eigen::Index>(D));
      const CMatrix l = lindbladian(model, rho);
      EXPECT_LT(std::abs(l.trace()), 1e-12);
      EXPECT_LT(hermiticity_defect(l), 1e-12);
    }
  }
}

TEST(Lindbladian, FixedPoints) {
  CMatrix g = CMatrix::Zero(3, 3);
  g(0, 0) = 1.0;
  EXPECT_LT(lindbladian(oracle::amplitude_damping(), g).norm(), 1e-15);

  // ρ commuting with every Hermitian jump
  oracle::Random rng(102);
  const CMatrix h = rng.hermitian(3);
  const LindbladModel model(3, {h, h * h - CMatrix::Identity(3, 3)});
  const CMatrix rho = (0.3 * h * h + CMatrix::Identity(3, 3)).eval();
  EXPECT_LT(lindbladian(model, rho / rho.trace()).norm(), 1e-12);
}

TEST(Lindbladian, MatchesBlochPrediction) {
  oracle::Random rng(103);
  for (std::size_t D = 2; D <= 3; ++D) {
    const SuBasis basis = generate_basis(D);
    for (int trial = 0; trial < 20; ++trial) {
      const LindbladModel model = rng.model(D, trial % 3 == 0);
      const BlochGenerator gen = build_generator(model, basis);
      const RVector a = rng.bloch_state(basis);
      const DensityMatrix rho = from_bloch(BlochVector(D, a), basis);
      const CMatrix predicted = matrix_from_coordinates(gen.rate(a), basis, 0.0);
      EXPECT_LT((lindbladian(model, rho) - predicted).norm(), 1e-12);
    }
  }
}

TEST(Potential, HermitianModelsAreNonNegative) {
  oracle::Random rng(104);
  for (std::size_t D = 2; D <= 4; ++D) {
    const auto n = static_cast<Eigen::Index>(D);
    for (int trial = 0; trial < 30; ++trial) {
      const LindbladModel model = rng.model(D, true, true);
      EXPECT_GE(potential_phi(model, rng.density(n)), -1e-14);
      EXPECT_NEAR(potential_phi(model, CMatrix::Identity(n, n) / static_cast<double>(D)), 0.0, 1e-14);
    }
  }
}

TEST(Potential, MatchesCommutatorForm) {
  // Φ = ¼ Σ (‖[B, ρ]‖² − Tr ρ²[B, B†])
  oracle::Random rng(105);
  for (int trial = 0; trial < 20; ++trial) {
    const LindbladModel model = rng.model(3, trial % 2 == 0);
    const CMatrix rho = rng.density(3);
    complex want = 0.0;
    for (const auto& b : model.jumps()) {
      const CMatrix c = b * rho - rho * b;
      want += c.squaredNorm() - (rho * rho * (b * b.adjoint() - b.adjoint() * b)).trace();
    }
    EXPECT_NEAR(potential_phi(model, rho), 0.25 * want.real(), 1e-12);
  }
}

TEST(Potential, PurityLawAlongExactEvolution) {
  oracle::Random rng(106);
  for (std::size_t D = 2; D <= 3; ++D) {
    const auto n = static_cast<Eigen::Index>(D);
    for (int trial = 0; trial < 10; ++trial) {
      const LindbladModel model = rng.model(D, trial % 2 == 0);
      const CMatrix rho = rng.density(n);
      const CMatrix S = oracle::superoperator_by_columns(
          [&](const CMatrix& x) { return lindbladian(model, x); }, n);
      const double h = 1e-4;
      auto gamma = [&](double t) {
        const CMatrix r = oracle::evolve_superop(S, rho, t);
        return (r * r).trace().real();
      };
      const double rate = (-gamma(2 * h) + 8 * gamma(h) - 8 * gamma(-h) + gamma(-2 * h)) / (12 * h);
      EXPECT_NEAR(rate, -4.0 * potential_phi(model, rho), 1e-9);
      EXPECT_NEAR(2.0 * (rho * lindbladian(model, rho)).trace().real(),
                  -4.0 * potential_phi(model, rho), 1e-12);
    }
  }
}

TEST(Gradient, DecompositionIdentity) {
  oracle::Random rng(107);
  for (std::size_t D = 2; D <= 4; ++D) {
    for (int trial = 0; trial < 50; ++trial) {
      const LindbladModel model = rng.model(D, trial % 2 == 0);
      const CMatrix rho = rng.hermitian_unit_trace(static_cast<Eigen::Index>(D));
      EXPECT_LT((lindbladian(model, rho) + grad_phi(model, rho) - solenoidal_R(model, rho)).norm(),
                1e-12);
      // R and the gradient each carry trace ½ Tr(ρ[B†, B]); only the difference is traceless.
      const CMatrix r = solenoidal_R(model, rho);
      complex want = 0.0;
      for (const auto& b : model.jumps()) want += 0.5 * (rho * (b.adjoint() * b - b * b.adjoint())).trace();
      EXPECT_LT(std::abs(r.trace() - want), 1e-12);
      EXPECT_LT(std::abs(grad_phi(model, rho).trace() - want), 1e-12);
      EXPECT_LT(hermiticity_defect(r), 1e-12);
    }
  }
  const LindbladModel herm = rng.model(3, true, true);
  const CMatrix rho = rng.density(3);
  EXPECT_LT(solenoidal_R(herm, rho).norm(), 1e-13);
  EXPECT_LT((grad_phi(herm, rho) + lindbladian(herm, rho)).norm(), 1e-13);
}

TEST(Gradient, MatchesFiniteDifferences) {
  oracle::Random rng(108);
  const double h = 1e-5;
  for (std::size_t D = 2; D <= 3; ++D) {
    for (int trial = 0; trial < 20; ++trial) {
      const LindbladModel model = rng.model(D, trial % 2 == 0);
      const CMatrix rho = rng.density(static_cast<Eigen::Index>(D));
      auto phi = [&](const CMatrix& x) { return potential_phi_holomorphic(model, x); };
      const CMatrix g = grad_phi(model, rho);
      EXPECT_LT(rel_err(oracle::fd_gradient(phi, rho, h), g), 1e-6);
      // imaginary perturbation of each entry
      auto phi_i = [&](const CMatrix& x) {
        return phi(rho + complex(0, 1) * (x - rho)) * complex(0, -1);
      };
      EXPECT_LT(rel_err(oracle::fd_gradient(phi_i, rho, h), g), 1e-6);
    }
  }
}

TEST(Complexification, GradientOfFIsR) {
  oracle::Random rng(109);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const LindbladModel model = rng.model(3, trial % 2 == 0);
    const CMatrix rho = rng.density(3);
    auto F = [&](const CMatrix& x) { return potential_F(model, x, rho); };
    const CMatrix g = oracle::fd_gradient(F, rho, h);
    EXPECT_LT((-g - solenoidal_R(model, rho)).norm(), 1e-8);
    // real-valued on Hermitian arguments
    EXPECT_LT(std::abs(potential_F(model, rho, rho).imag()), 1e-14);
  }
  const LindbladModel herm = rng.model(3, true, true);
  const CMatrix rho = rng.density(3);
  EXPECT_LT(std::abs(potential_F(herm, rho, rho)), 1e-14);
  EXPECT_EQ(potential_F(herm, CMatrix::Zero(3, 3), rho), complex(0.0));
}

TEST(Superoperator, MaterializedMapsReproduceOperations) {
  oracle::Random rng(110);
  for (std::size_t D = 2; D <= 3; ++D) {
    const LindbladModel model = rng.model(D, true);
    const auto n = static_cast<Eigen::Index>(D);
    const Superoperator L = materialize(SuperopKind::lindbladian, model);
    const Superoperator G = materialize(SuperopKind::grad_phi_map, model);
    const Superoperator R = materialize(SuperopKind::R_map, model);
    const CMatrix oracle_L = oracle::superoperator_by_columns(
        [&](const CMatrix& x) { return lindbladian(model, x); }, n);
    EXPECT_LT((L.matrix() - oracle_L).norm(), 1e-12);
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix x = rng.complex_matrix(n);
      EXPECT_LT((L.apply(x) - lindbladian(model, x)).norm(), 1e-12);
      EXPECT_LT((G.apply(x) - grad_phi(model, x)).norm(), 1e-12);
      EXPECT_LT((R.apply(x) - solenoidal_R(model, x)).norm(), 1e-12);
    }
    EXPECT_LT(std::abs(R.divergence()), 1e-12);
  }
}

TEST(Superoperator, AmplitudeDampingKernel) {
  const Superoperator L = materialize(SuperopKind::lindbladian, oracle::amplitude_damping());
  CMatrix g = CMatrix::Zero(3, 3);
  g(0, 0) = 1.0;
  const CVector vec = Eigen::Map<const CVector>(g.data(), 9);
  EXPECT_LT((L.matrix() * vec).norm(), 1e-15);
  const Eigen::ComplexEigenSolver<CMatrix> eig(L.matrix());
  EXPECT_LT(eig.eigenvalues().cwiseAbs().minCoeff(), 1e-12);
}

TEST(Superoperator, GradientMapIsSymmetricOnHermitianMatrices) {
  oracle::Random rng(111);
  for (std::size_t D = 2; D <= 3; ++D) {
    const SuBasis basis = generate_basis(D);
    const auto n = static_cast<Eigen::Index>(D);
    std::vector<CMatrix> herm_basis{CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(D))};
    for (const auto& l : basis.lambdas()) herm_basis.push_back(l / std::sqrt(2.0));
    const LindbladModel model = rng.model(D);
    const Superoperator G = materialize(SuperopKind::grad_phi_map, model);
    const auto m = static_cast<Eigen::Index>(herm_basis.size());
    RMatrix K(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        const complex e = (herm_basis[a] * G.apply(herm_basis[b])).trace();
        EXPECT_LT(std::abs(e.imag()), 1e-13);
        K(a, b) = e.real();
      }
    EXPECT_LT((K - K.transpose()).norm(), 1e-12);
  }
}

TEST(Laplacian, TraceSquaredExamples) {
  oracle::Random rng(112);
  for (std::size_t D = 2; D <= 4; ++D) {
    const auto n = static_cast<Eigen::Index>(D);
    const std::vector<CMatrix> probes{rng.density(n), rng.density(n), rng.hermitian(n)};
    const CMatrix X = rng.traceless(rng.hermitian(n));
    auto quad = [](const CMatrix& x) { return [x](const CMatrix& r) -> complex { return (r * r * x).trace(); }; };
    EXPECT_NEAR(matrix_laplacian_check(quad(X), probes), 0.0, 1e-6);
    const double d = static_cast<double>(D);
    EXPECT_NEAR(matrix_laplacian_check(quad(CMatrix::Identity(n, n)), probes), 2 * d * d, 1e-5);
    const CMatrix Y = rng.complex_matrix(n);
    EXPECT_NEAR(matrix_laplacian_check([&](const CMatrix& r) { return (r * Y).trace() + 3.0; }, probes),
                0.0, 1e-6);
  }
  EXPECT_THROW(matrix_laplacian_check([](const CMatrix&) { return complex(0); }, {}), Error);
}

TEST(Laplacian, PotentialOfHermitianModel) {
  // Δ Φ = ½ Σ (2D Tr B†B − |Tr B|² − |Tr B|²)
  oracle::Random rng(113);
  const LindbladModel model = rng.model(3, true);
  const std::vector<CMatrix> probes{rng.density(3)};
  double want = 0.0;
  for (const auto& b : model.jumps()) {
    want += 0.5 * (6.0 * (b.adjoint() * b).trace().real() - 2.0 * std::norm(b.trace()));
  }
  auto phi = [&](const CMatrix& r) { return potential_phi_holomorphic(model, r); };
  EXPECT_NEAR(matrix_laplacian_check(phi, probes), want, 1e-5 * std::max(1.0, std::abs(want)));
}

TEST(GaugeShift, LindbladianInvariant) {
  oracle::Random rng(114);
  for (int trial = 0; trial < 10; ++trial) {
    const LindbladModel model = rng.model(3, trial % 2 == 0);
    const CMatrix rho = rng.density(3);
    const CMatrix X = rng.traceless(rng.hermitian(3));
    auto shifted = [&](const CMatrix& r) { return potential_phi_holomorphic(model, r) + (r * r * X).trace(); };
    const CMatrix grad = oracle::fd_gradient(shifted, rho, 1e-5);
    const CMatrix R = solenoidal_R(model, rho) + anticommutator(X, rho);
    EXPECT_LT((-grad + R - lindbladian(model, rho)).norm(), 1e-8);
    EXPECT_LT((-(grad_phi(model, rho) + anticommutator(X, rho)) + R - lindbladian(model, rho)).norm(),
              1e-12);
    // the shifted field keeps zero divergence
    const CMatrix S = oracle::superoperator_by_columns([&](const CMatrix& x) { return anticommutator(X, x); }, 3);
    EXPECT_LT(std::abs(S.trace()), 1e-12);
  }
}

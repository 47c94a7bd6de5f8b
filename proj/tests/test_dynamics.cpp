#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>

#include "support/random_models.hpp"

using namespace gqms;
using gqms::testing::Rng;

namespace {

Matrix rotation(double phi = 1.0) { return gqms::testing::rotation_block(phi); }

DriftDiffusion one_mode(const Matrix& z, const Matrix& c, double zx = 0.0, double zy = 0.0) {
  Vector zeta(2);
  zeta << zx, zy;
  return {z, c, zeta};
}

DriftDiffusion damped() { return one_mode(-Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)); }

Vector e1() { return Vector::Unit(2, 0); }

// Adaptive Dormand-Prince integration of dm/dt = Zᵀm − ζ, dΣ/dt = ZᵀΣ + ΣZ + C.
std::pair<Vector, Matrix> ode_moments(const DriftDiffusion& dd, const Vector& m0, const Matrix& s0, double t) {
  using State = std::vector<double>;
  const Index n = dd.Z.rows();
  State x(n + n * n);
  Eigen::Map<Vector>(x.data(), n) = m0;
  Eigen::Map<Matrix>(x.data() + n, n, n) = s0;
  auto rhs = [&](const State& s, State& ds, double) {
    const Eigen::Map<const Vector> m(s.data(), n);
    const Eigen::Map<const Matrix> sig(s.data() + n, n, n);
    Eigen::Map<Vector>(ds.data(), n) = dd.Z.transpose() * m - dd.zeta;
    Eigen::Map<Matrix>(ds.data() + n, n, n) = dd.Z.transpose() * sig + sig * dd.Z + dd.C;
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<State>()), rhs, x, 0.0, t, 1e-3);
  return {Eigen::Map<Vector>(x.data(), n), Eigen::Map<Matrix>(x.data() + n, n, n)};
}

}  // namespace

TEST(EvolveMoments, DampedModeClosedForm) {
  const auto tr = evolve_moments(damped(), e1(), Matrix::Identity(2, 2), uniform_grid(5.0, 50));
  for (size_t k = 0; k < tr.times.size(); ++k) {
    EXPECT_NEAR(tr.means[k](0), std::exp(-tr.times[k]), 1e-13);
    EXPECT_NEAR(tr.means[k](1), 0.0, 1e-15);
    EXPECT_LE(frob(tr.covariances[k] - Matrix::Identity(2, 2)), 1e-13);
  }
}

TEST(EvolveMoments, HamiltonianFlowPreservesDeterminant) {
  Rng rng(51);
  const Matrix s0 = rng.spd(2, 1.5);
  const auto tr = evolve_moments(one_mode(rotation(1.3), Matrix::Zero(2, 2)), rng.vector(2), s0, uniform_grid(10.0, 37));
  for (const auto& s : tr.covariances) EXPECT_NEAR(s.determinant(), s0.determinant(), 1e-10 * s0.determinant());
}

TEST(EvolveMoments, InitialPointAndErrors) {
  Rng rng(52);
  const auto dd = gqms::testing::random_stable_model(2, rng);
  const Vector m0 = rng.vector(4);
  const Matrix s0 = 2.0 * Matrix::Identity(4, 4);
  const auto tr = evolve_moments(dd, m0, s0, {0.0});
  ASSERT_EQ(tr.times.size(), 1u);
  EXPECT_EQ(tr.means[0], m0);
  EXPECT_EQ(tr.covariances[0], s0);
  EXPECT_THROW(evolve_moments(dd, m0, 0.5 * Matrix::Identity(4, 4), {0.0, 1.0}), PreconditionError);
  EXPECT_THROW(evolve_moments(dd, m0, s0, {0.0, 1.0, 1.0}), PreconditionError);
  EXPECT_THROW(evolve_moments(dd, Vector::Zero(2), s0, {0.0, 1.0}), DimensionError);
}

TEST(EvolveMoments, AgreesWithAdaptiveIntegration) {
  Rng rng(53);
  for (int trial = 0; trial < 12; ++trial) {
    const Index d = rng.integer(1, 3);
    // admissible but not necessarily stable
    const auto dd = assemble(gqms::testing::random_gksl(d, rng.integer(0, static_cast<int>(2 * d)), rng, 0.5, 0.6));
    const Vector m0 = rng.vector(2 * d);
    const Matrix s0 = rng.spd(2 * d, 1.0) + Matrix::Identity(2 * d, 2 * d);
    const double t = rng.uniform(0.5, 20.0);
    const auto tr = evolve_moments(dd, m0, s0, {0.0, 0.3 * t, t});
    const auto [m, s] = ode_moments(dd, m0, s0, t);
    EXPECT_LE((tr.means.back() - m).norm(), 1e-6 * (1 + m.norm())) << "trial " << trial;
    EXPECT_LE(frob(tr.covariances.back() - s), 1e-6 * (1 + frob(s))) << "trial " << trial;
  }
}

TEST(EvolveMoments, StationaryStartStaysPut) {
  Rng rng(54);
  for (int trial = 0; trial < 10; ++trial) {
    const auto dd = gqms::testing::random_stable_model(rng.integer(1, 4), rng);
    const auto g = stationary_gaussian(dd.Z, dd.C, dd.zeta);
    const auto tr = evolve_moments(dd, g.mean, g.covariance, uniform_grid(10.0, 20));
    for (size_t k = 0; k < tr.times.size(); ++k) {
      EXPECT_LE((tr.means[k] - g.mean).norm(), 1e-8 * (1 + g.mean.norm()));
      EXPECT_LE(frob(tr.covariances[k] - g.covariance), 1e-8 * (1 + frob(g.covariance)));
    }
  }
}

TEST(WeylSymbol, Basics) {
  Rng rng(55);
  const auto dd = gqms::testing::random_stable_model(2, rng);
  const Vector z = rng.vector(4);
  const auto w0 = weyl_symbol(dd, z, 0.0);
  EXPECT_EQ(w0.amplitude, Complex(1.0, 0.0));
  EXPECT_EQ(w0.evolved_z, z);
  const auto h = weyl_symbol(one_mode(rotation(0.7), Matrix::Zero(2, 2), 0.4, -1.0), Vector::Ones(2), 3.3);
  EXPECT_NEAR(std::abs(h.amplitude), 1.0, 1e-14);
  EXPECT_LE((h.evolved_z - (3.3 * rotation(0.7)).exp() * Vector::Ones(2)).norm(), 1e-12);
  EXPECT_NEAR(std::abs(weyl_symbol(damped(), e1(), 40.0).amplitude - std::exp(-0.5)), 0.0, 1e-14);
}

TEST(WeylSymbol, AmplitudeIsAContraction) {
  Rng rng(56);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = rng.integer(1, 3);
    const auto dd = assemble(gqms::testing::random_gksl(d, rng.integer(0, static_cast<int>(2 * d)), rng));
    EXPECT_LE(std::abs(weyl_symbol(dd, rng.vector(2 * d), rng.uniform(0.0, 5.0)).amplitude), 1.0 + 1e-12);
  }
}

TEST(DecoherenceFactor, Examples) {
  const auto dd = damped();
  const auto split = invariant_splitting(dd.Z);
  EXPECT_NEAR(std::abs(decoherence_factor(dd, split, e1()) - std::exp(-0.5)), 0.0, 1e-14);
  const Complex a1 = decoherence_factor(dd, split, 0.8 * e1());
  const Complex a2 = decoherence_factor(dd, split, 1.6 * e1());
  EXPECT_NEAR(std::log(a2).real(), 4.0 * std::log(a1).real(), 1e-13);
  const auto osc = one_mode(rotation(), Matrix::Zero(2, 2));
  EXPECT_EQ(decoherence_factor(osc, invariant_splitting(osc.Z), e1()), Complex(1.0, 0.0));
}

TEST(DecoherenceFactor, MatchesTheLongTimeWeylAmplitude) {
  Rng rng(57);
  for (int trial = 0; trial < 15; ++trial) {
    const auto dd = gqms::testing::random_stable_model(rng.integer(1, 3), rng, 0.3);
    const auto split = invariant_splitting(dd.Z);
    const Vector z = rng.vector(dd.Z.rows());
    const double rate = decay_rate_estimate(dd.Z);
    const Complex limit = weyl_symbol(dd, z, 80.0 / rate).amplitude;
    EXPECT_LE(std::abs(decoherence_factor(dd, split, z) - limit), 1e-9);
  }
}

TEST(EidDefect, DampedModeCurve) {
  const auto dd = damped();
  const auto split = invariant_splitting(dd.Z);
  for (double t : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 12.0}) {
    const double expected = std::abs(std::exp(-0.5 * (1.0 - std::exp(-2.0 * t))) - std::exp(-0.5));
    EXPECT_NEAR(eid_defect(dd, split, e1(), t), expected, 1e-10);
  }
}

TEST(EidDefect, CenterVectorsHaveNoDefect) {
  DriftDiffusion dd = gqms::testing::zero_model(2);
  gqms::testing::put_mode_block(dd.Z, 2, 0, rotation(1.1));
  gqms::testing::put_submodel(dd, 2, 1, damped());
  const auto split = invariant_splitting(dd.Z);
  Vector z = Vector::Zero(4);
  z << 0.3, 0.0, -0.7, 0.0;
  for (double t : {0.0, 1.0, 7.0}) EXPECT_LE(eid_defect(dd, split, z, t), 1e-13);
  Vector w = Vector::Ones(4);
  EXPECT_NEAR(eid_defect(dd, split, w, 0.0), std::abs(1.0 - decoherence_factor(dd, split, w)), 1e-14);
}

TEST(EidDefect, DecaysOnPlantedModels) {
  Rng rng(58);
  int checked = 0;
  while (checked < 15) {
    const auto p = gqms::testing::planted_model(rng);
    if (p.stable_modes == 0) continue;
    const auto v = decide_existence(p.model);
    ASSERT_TRUE(v.exists);
    const auto split = invariant_splitting(p.model.Z);
    const double t = 60.0 / decay_rate_estimate(v.normal_form->Z_minus);
    const double defect = eid_defect(p.model, split, rng.vector(p.model.Z.rows()), t);
    EXPECT_LE(defect, 1e-6);
    EXPECT_LE(defect, 2.0);
    ++checked;
  }
}

TEST(DecayRate, Examples) {
  EXPECT_DOUBLE_EQ(decay_rate_estimate(-Matrix::Identity(2, 2)), 1.0);
  Matrix z = Matrix::Zero(4, 4);
  gqms::testing::put_mode_block(z, 2, 0, -Eigen::Matrix2d::Identity() + rotation(2.0));
  gqms::testing::put_mode_block(z, 2, 1, -3.0 * Eigen::Matrix2d::Identity());
  EXPECT_NEAR(decay_rate_estimate(z), 1.0, 1e-14);
  Rng rng(59);
  const Matrix m = gqms::testing::random_symplectic(2, rng);
  EXPECT_NEAR(decay_rate_estimate(m * z * symplectic_inverse(m)), 1.0, 1e-10);
  EXPECT_THROW(decay_rate_estimate(Matrix(0, 0)), PreconditionError);
}

TEST(ErgodicMean, Examples) {
  const auto osc = one_mode(rotation(1.0), Matrix::Zero(2, 2));
  const auto a = ergodic_mean(osc, e1(), Matrix::Identity(2, 2), 100.0, 20000);
  EXPECT_LE(a.avg_mean.norm(), 2.0 / 100.0);
  EXPECT_LE(a.predicted_mean.norm(), 1e-14);

  Vector zeta(2);
  zeta << 2.0, 0.0;
  const DriftDiffusion dmp{-Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2), zeta};
  const auto b = ergodic_mean(dmp, e1(), Matrix::Identity(2, 2), 1000.0, 100000);
  EXPECT_LE((b.avg_mean - b.predicted_mean).norm(), 5e-3);
  EXPECT_NEAR(b.predicted_mean(0), -2.0, 1e-14);

  const DriftDiffusion still = one_mode(Matrix::Zero(2, 2), Matrix::Zero(2, 2));
  Vector m0(2);
  m0 << 0.4, -1.2;
  const auto c = ergodic_mean(still, m0, Matrix::Identity(2, 2), 10.0, 1000);
  // the average of a constant trajectory only picks up summation roundoff
  EXPECT_LE((c.avg_mean - m0).norm(), 1000 * 1e-16 * m0.norm());
  EXPECT_LE((c.predicted_mean - m0).norm(), 1e-14);
  EXPECT_THROW(ergodic_mean(still, m0, Matrix::Identity(2, 2), 10.0, 999), PreconditionError);
}

TEST(ErgodicMean, OscillatorCovarianceAverage) {
  // a squeezed covariance rotating at angle 1 averages to its rotation-invariant part
  const auto osc = one_mode(rotation(1.0), Matrix::Zero(2, 2));
  Matrix s0(2, 2);
  s0 << 4.0, 0.0, 0.0, 0.25;
  const auto a = ergodic_mean(osc, Vector::Zero(2), s0, 1000.0, 100000);
  EXPECT_LE(frob(a.predicted_covariance - 2.125 * Matrix::Identity(2, 2)), 1e-12);
  EXPECT_LE(frob(a.avg_covariance - a.predicted_covariance), 1e-2);
}

TEST(KmsF, AgreesWithTheAlgebraicForm) {
  for (double x : {1.0 + 1e-9, 1.001, 1.5, 3.0, 10.0, 1e3, 1e6})
    EXPECT_NEAR(kms_f(x), std::sqrt(x * x - 1.0), 1e-12 * (1 + std::sqrt(x * x - 1.0)));
  EXPECT_THROW(kms_f(1.0), PreconditionError);
  EXPECT_THROW(kms_f(0.5), PreconditionError);
}

TEST(KmsGap, ThermalModeAndScaling) {
  const auto r = kms_gap_condition(-Matrix::Identity(2, 2), 3.0 * Matrix::Identity(2, 2));
  EXPECT_TRUE(r.holds);
  // −(Zᵀf + fZ) = 2 f(3) I with f(3) = √8
  EXPECT_NEAR(r.witness_min_eig, 2.0 * std::sqrt(8.0), 1e-12);
  const auto r2 = kms_gap_condition(-2.0 * Matrix::Identity(2, 2), 3.0 * Matrix::Identity(2, 2));
  EXPECT_NEAR(r2.witness_min_eig, 2.0 * r.witness_min_eig, 1e-12);
  EXPECT_THROW(kms_gap_condition(-Matrix::Identity(2, 2), Matrix::Identity(2, 2)), PreconditionError);
}

TEST(SemigroupGap, Examples) {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << -1.0, -3.0;
  const auto g = semigroup_gap_finite(a, Matrix::Zero(2, 2));
  EXPECT_NEAR(g.gap_form, 1.0, 1e-12);
  EXPECT_NEAR(g.gap_decay, 1.0, 1e-6);

  Matrix e = Matrix::Zero(3, 3);
  e(0, 0) = 1.0;
  Matrix b = -Matrix::Identity(3, 3);
  b(0, 0) = 0.0;
  const auto h = semigroup_gap_finite(b, e);
  EXPECT_NEAR(h.gap_form, 1.0, 1e-12);
  EXPECT_NEAR(h.gap_decay, 1.0, 1e-6);

  EXPECT_THROW(semigroup_gap_finite(Matrix::Identity(2, 2), Matrix::Zero(2, 2)), PreconditionError);
  Matrix notproj = Matrix::Zero(2, 2);
  notproj(0, 1) = 1.0;
  EXPECT_THROW(semigroup_gap_finite(-Matrix::Identity(2, 2), notproj), PreconditionError);
}

TEST(SemigroupGap, SkewPlusDissipation) {
  Rng rng(60);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = rng.integer(2, 8);
    const Matrix s = rng.matrix(n, n);
    const Matrix q = rng.spd(n, 0.2);
    const Matrix a = 0.5 * (s - s.transpose()) - q;
    const auto g = semigroup_gap_finite(a, Matrix::Zero(n, n));
    EXPECT_NEAR(g.gap_form, linalg::min_eigenvalue_symmetric(q), 1e-10);
    EXPECT_LE(std::abs(g.gap_form - g.gap_decay), 1e-3);
    // the decay bound holds on a sampled grid of unit vectors
    for (int k = 0; k < 5; ++k) {
      const Vector f = rng.vector(n).normalized();
      const double t = rng.uniform(0.0, 3.0);
      EXPECT_LE(((t * a).exp() * f).norm(), std::exp(-g.gap_decay * t) * (1 + 1e-9));
    }
  }
}

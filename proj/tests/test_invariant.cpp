#include <gtest/gtest.h>

#include <algorithm>

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

DriftDiffusion harmonic() { return one_mode(rotation(), Matrix::Zero(2, 2)); }
DriftDiffusion damped() { return one_mode(-Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)); }
DriftDiffusion thermal() { return one_mode(-Matrix::Identity(2, 2), 6.0 * Matrix::Identity(2, 2)); }

DriftDiffusion oscillator_thermal(double phi = 1.0) {
  DriftDiffusion dd = gqms::testing::zero_model(2);
  gqms::testing::put_mode_block(dd.Z, 2, 0, rotation(phi));
  gqms::testing::put_submodel(dd, 2, 1, thermal());
  return dd;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(DecideExistence, Examples) {
  const auto h = decide_existence(harmonic());
  ASSERT_TRUE(h.exists);
  EXPECT_EQ(h.normal_form->d0, 1);
  ASSERT_EQ(h.normal_form->Phi.size(), 1u);
  EXPECT_NEAR(h.normal_form->Phi[0], 1.0, 1e-12);

  const auto drift = decide_existence(one_mode(Matrix::Zero(2, 2), Matrix::Zero(2, 2), 1.0, 0.0));
  EXPECT_FALSE(drift.exists);
  EXPECT_EQ(drift.reason, ExistenceReason::center_displacement_obstruction);

  const auto d = decide_existence(damped());
  ASSERT_TRUE(d.exists);
  EXPECT_EQ(d.normal_form->d0, 0);
  EXPECT_EQ(d.normal_form->Z_minus.rows(), 2);
}

TEST(DecideExistence, ObstructionReasons) {
  Matrix jordan(2, 2);
  jordan << 0, 1, 0, 0;
  EXPECT_EQ(decide_existence(one_mode(jordan, Matrix::Zero(2, 2))).reason, ExistenceReason::imaginary_not_semisimple);
  EXPECT_EQ(decide_existence(one_mode(rotation(), 2.0 * Matrix::Identity(2, 2))).reason, ExistenceReason::V0_not_in_kerC);
  // an unstable admissible model: Z = I, C = 2I
  EXPECT_EQ(decide_existence(one_mode(Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2))).reason,
            ExistenceReason::H2_violated);
  EXPECT_THROW(decide_existence(one_mode(-Matrix::Identity(2, 2), Matrix::Zero(2, 2))), PreconditionError);
}

TEST(DecideExistence, ZeroFreeParticleWithoutDrift) {
  // Z = 0, C = 0, ζ = 0: every state is invariant
  const auto v = decide_existence(one_mode(Matrix::Zero(2, 2), Matrix::Zero(2, 2)));
  ASSERT_TRUE(v.exists);
  EXPECT_EQ(v.normal_form->zero_angle_count, 1);
  EXPECT_EQ(v.normal_form->d0, 1);
}

TEST(ExistenceReason, StringRoundTrip) {
  for (auto r : {ExistenceReason::H2_violated, ExistenceReason::imaginary_not_semisimple,
                 ExistenceReason::V0_not_in_kerC, ExistenceReason::center_displacement_obstruction,
                 ExistenceReason::ok})
    EXPECT_EQ(existence_reason_from_string(to_string(r)), r);
  EXPECT_THROW(existence_reason_from_string("nonsense"), std::invalid_argument);
}

TEST(NormalForm, AlreadyNormalInputIsFixed) {
  const auto nf = normal_form(oscillator_thermal());
  EXPECT_LE(frob(nf.M - Matrix::Identity(4, 4)), 1e-12);
  EXPECT_LE(frob(nf.transformed.Z - oscillator_thermal().Z), 1e-12);
  EXPECT_LE(frob(nf.transformed.C - oscillator_thermal().C), 1e-12);
  EXPECT_LE(nf.block_residual, 1e-12);
}

TEST(NormalForm, OscillatorWithDisplacement) {
  const DriftDiffusion dd = one_mode(rotation(), Matrix::Zero(2, 2), 1.0, 0.0);
  const auto v = decide_existence(dd);
  ASSERT_TRUE(v.exists);
  const auto& nf = *v.normal_form;
  ASSERT_EQ(nf.signed_angles.size(), 1u);
  EXPECT_NEAR(nf.signed_angles[0], 1.0, 1e-12);
  // Z̃0ᵀ w = ζ̃0 / 2 with Z̃0 = [[0,-1],[1,0]] and ζ̃0 = (1, 0) gives w = (0, 1/2)
  EXPECT_NEAR(nf.w_center(0), 0.0, 1e-12);
  EXPECT_NEAR(nf.w_center(1), 0.5, 1e-12);
  const auto moved = displace_weyl(dd, nf.w_center_original);
  EXPECT_LE(moved.zeta.norm(), 1e-12);
}

TEST(NormalForm, SignOfTheRotationIsReported) {
  // H = -a*a rotates the other way
  const auto nf = normal_form(one_mode(rotation(-1.0), Matrix::Zero(2, 2)));
  ASSERT_EQ(nf.signed_angles.size(), 1u);
  EXPECT_NEAR(nf.signed_angles[0], -1.0, 1e-12);
  EXPECT_NEAR(nf.Phi[0], 1.0, 1e-12);
}

TEST(NormalForm, PlantedRoundTrip) {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = gqms::testing::planted_model(rng);
    const auto v = decide_existence(p.model);
    ASSERT_TRUE(v.exists) << "trial " << trial << " reason " << to_string(v.reason);
    const auto& nf = *v.normal_form;
    const Index d = p.model.modes();
    EXPECT_TRUE(is_symplectic(nf.M, 1e-8));
    EXPECT_LE(nf.block_residual, 1e-7 * (1 + frob(p.model.Z) + frob(p.model.C)) * (1 + frob(nf.M) * frob(nf.M)));
    const auto got = sorted(nf.Phi), want = sorted(p.angles);
    ASSERT_EQ(got.size(), want.size());
    for (size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-7);
    // the stable factor keeps its spectrum
    if (p.stable_modes > 0) {
      const auto a = detail::classify_square(nf.Z_minus, kDefaultTol).eigenvalues;
      const Matrix planted = detail::select(p.normal.Z, detail::mode_indices(d, d - p.stable_modes, p.stable_modes),
                                            detail::mode_indices(d, d - p.stable_modes, p.stable_modes));
      const auto b = detail::classify_square(planted, kDefaultTol).eigenvalues;
      ASSERT_EQ(a.size(), b.size());
      for (size_t k = 0; k < a.size(); ++k) EXPECT_LE(std::abs(a[k] - b[k]), 1e-7);
    }
    // displacing by w_center removes the displacement on the rotating modes
    const auto moved = conjugate_symplectic(displace_weyl(p.model, nf.w_center_original), nf.M, 1e-8);
    for (Index k = 0; k < nf.d0; ++k) {
      if (nf.signed_angles[k] == 0.0) continue;
      EXPECT_LE(std::hypot(moved.zeta(k), moved.zeta(d + k)), 1e-7 * (1 + p.model.zeta.norm()) * (1 + frob(nf.M)));
    }
  }
}

TEST(NormalForm, ZeroAnglesNextToAStableBlock) {
  Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = gqms::testing::planted_model(rng);
    const auto v = decide_existence(p.model);
    ASSERT_TRUE(v.exists) << "trial " << trial;
    const Matrix b = v.normal_form->B;
    const double n = frob(b);
    EXPECT_LE(frob(b.transpose() * standard_form(p.model.modes()) * b - standard_form(p.model.modes())), 1e-9 * (1 + n * n))
        << "trial " << trial;
  }
}

TEST(StationaryGaussian, Examples) {
  const auto a = stationary_gaussian(-Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_LE(a.mean.norm(), 1e-15);
  EXPECT_LE(frob(a.covariance - Matrix::Identity(2, 2)), 1e-14);
  const auto b = stationary_gaussian(-Matrix::Identity(2, 2), 6.0 * Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_LE(frob(b.covariance - 3.0 * Matrix::Identity(2, 2)), 1e-14);
  // fixed point of dm/dt = Zᵀm − ζ with Z = −I, ζ = (2, 0) is m = −ζ
  Vector zeta(2);
  zeta << 2.0, 0.0;
  const auto c = stationary_gaussian(-Matrix::Identity(2, 2), Matrix::Zero(2, 2), zeta);
  EXPECT_NEAR(c.mean(0), -2.0, 1e-14);
  EXPECT_NEAR(c.mean(1), 0.0, 1e-14);
  EXPECT_THROW(stationary_gaussian(rotation(), Matrix::Zero(2, 2), Vector::Zero(2)), PreconditionError);
}

TEST(StationaryGaussian, LyapunovResidualOnRandomStableModels) {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dd = gqms::testing::random_stable_model(rng.integer(1, 6), rng);
    const auto g = stationary_gaussian(dd.Z, dd.C, dd.zeta);
    const double scale = frob(dd.C) + frob(dd.Z) * frob(g.covariance);
    EXPECT_LE(lyapunov_residual(dd.Z, dd.C, g.covariance), 1e-9 * scale);
    EXPECT_LE((dd.Z.transpose() * g.mean - dd.zeta).norm(), 1e-9 * (1 + frob(dd.Z) * g.mean.norm()));
    EXPECT_TRUE(is_admissible_covariance(g.covariance, 1e-8));
  }
}

TEST(IsFaithful, Examples) {
  EXPECT_FALSE(is_faithful({Vector::Zero(2), Matrix::Identity(2, 2)}));
  EXPECT_TRUE(is_faithful({Vector::Zero(2), 3.0 * Matrix::Identity(2, 2)}));
  EXPECT_FALSE(is_faithful({Vector::Zero(4), Matrix::Identity(4, 4)}));
}

TEST(IsIrreducible, Examples) {
  EXPECT_FALSE(is_irreducible(damped()));
  EXPECT_TRUE(is_irreducible(thermal()));
  EXPECT_FALSE(is_irreducible(harmonic()));
  EXPECT_FALSE(is_irreducible(oscillator_thermal()));
}

TEST(IsIrreducible, InvariantUnderSymplecticConjugation) {
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dd = gqms::testing::random_stable_model(rng.integer(1, 3), rng);
    const Matrix m = gqms::testing::random_symplectic(dd.modes(), rng);
    EXPECT_EQ(is_irreducible(dd), is_irreducible(conjugate_symplectic(dd, m)));
  }
}

TEST(InvariantSetDescriptor, Examples) {
  const auto t = invariant_set_descriptor(thermal());
  EXPECT_EQ(t.d0, 0);
  EXPECT_TRUE(t.faithful);
  EXPECT_TRUE(t.irreducible);

  const auto ot = invariant_set_descriptor(oscillator_thermal());
  EXPECT_EQ(ot.d0, 1);
  EXPECT_TRUE(ot.faithful);
  EXPECT_FALSE(ot.irreducible);

  DriftDiffusion pair = gqms::testing::zero_model(2);
  gqms::testing::put_mode_block(pair.Z, 2, 0, rotation(1.0));
  gqms::testing::put_mode_block(pair.Z, 2, 1, rotation(2.0));
  const auto pd = invariant_set_descriptor(pair);
  ASSERT_TRUE(pd.rational_dependence.found);
  // angles are reported descending: (2, 1); 1·2 − 2·1 = 0
  EXPECT_EQ(pd.angles, (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(pd.rational_dependence.witness, (std::vector<int>{1, -2}));
  EXPECT_THROW(invariant_set_descriptor(one_mode(Matrix::Zero(2, 2), Matrix::Zero(2, 2), 1.0)), PreconditionError);
}

TEST(RationalDependence, SearchBehaviour) {
  EXPECT_FALSE(rational_dependence({}).found);
  EXPECT_FALSE(rational_dependence({1.0}).found);
  const auto z = rational_dependence({1.0, 0.0});
  ASSERT_TRUE(z.found);
  EXPECT_EQ(z.witness, (std::vector<int>{0, 1}));
  EXPECT_FALSE(rational_dependence({1.0, std::sqrt(2.0)}).found);
  const auto r = rational_dependence({1.5, 1.0});
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.witness, (std::vector<int>{2, -3}));
  EXPECT_TRUE(r.search_complete);
  // 13:1 is beyond the default bound
  EXPECT_FALSE(rational_dependence({13.0, 1.0}).found);
  EXPECT_TRUE(rational_dependence({13.0, 1.0}, 13).found);
}

TEST(RationalDependence, ThreeTermRelation) {
  const auto r = rational_dependence({std::sqrt(2.0) + 1.0, std::sqrt(2.0), 1.0});
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.witness, (std::vector<int>{1, -1, -1}));
}

TEST(GroundStateFlag, Examples) {
  EXPECT_TRUE(ground_state_flag(harmonic()));
  Matrix jordan(2, 2);
  jordan << 0, 1, 0, 0;
  EXPECT_FALSE(ground_state_flag(one_mode(jordan, Matrix::Zero(2, 2))));
  EXPECT_FALSE(ground_state_flag(one_mode(Matrix::Zero(2, 2), Matrix::Zero(2, 2), 1.0)));
  EXPECT_FALSE(ground_state_flag(one_mode(rotation(-1.0), Matrix::Zero(2, 2))));
  EXPECT_THROW(ground_state_flag(damped()), PreconditionError);
}

TEST(GroundStateFlag, PositiveQuadraticHamiltonians) {
  Rng rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = rng.integer(1, 3);
    // H = ½ xᵀ S x with S ≻ 0 generates a symplectically diagonalizable rotation with positive angles
    const Matrix s = rng.spd(2 * d);
    const DriftDiffusion dd{-s * standard_form(d), Matrix::Zero(2 * d, 2 * d), Vector::Zero(2 * d)};
    const DriftDiffusion neg{-dd.Z, dd.C, dd.zeta};
    EXPECT_TRUE(ground_state_flag(dd));
    EXPECT_FALSE(ground_state_flag(neg));
  }
}

TEST(RecurrenceClassification, Examples) {
  const auto t = recurrence_classification(invariant_set_descriptor(thermal()));
  EXPECT_EQ(t.positive_recurrent_dim_defect, 0);
  EXPECT_EQ(t.transient_dim, 0);
  EXPECT_TRUE(t.null_recurrent_trivial);
  const auto d = recurrence_classification(invariant_set_descriptor(damped()));
  EXPECT_EQ(d.positive_recurrent_dim_defect, 1);
  const auto h = recurrence_classification(invariant_set_descriptor(harmonic()));
  EXPECT_EQ(h.positive_recurrent_dim_defect, 0);
}

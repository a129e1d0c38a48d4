#include <gtest/gtest.h>

#include "ndefect/nd_complex.hpp"
#include "support.hpp"

using namespace ndefect;
using namespace ndefect::testing;

namespace {

// Distance from the real 4-vector h to the column span of the orthonormal F.
double distance_to_span(const Matrix& F, const double h[4]) {
  Vector v(4);
  for (int i = 0; i < 4; ++i) v[i] = h[i];
  Vector p(4, 0.0);
  for (std::size_t j = 0; j < F.cols(); ++j) {
    const Vector c = F.col(j);
    p = p + dot(c, v) * c;
  }
  return norm2(v - p);
}

// Direct substitution into P A* (x1 u1 + x2 u2) = P A (conj(x2) u1 + conj(x1) u2).
double equation_residual(const Matrix& A, const CommutatorProfile& pr, const SolutionPair& s) {
  const Vector l = pr.P * (A.adjoint() * (s.x1 * pr.u1 + s.x2 * pr.u2));
  const Vector r = pr.P * (A * (std::conj(s.x2) * pr.u1 + std::conj(s.x1) * pr.u2));
  return norm2(l - r);
}

}  // namespace

TEST(Tableau, ShiftHasRankTwoAndIdentityK) {
  const Matrix A = shift(4);
  const auto pr = profile(A);
  const auto t = assemble_tableau(A, pr);
  EXPECT_EQ(t.m, 2u);
  EXPECT_LT(max_entry_error(t.K, Matrix::identity(2)), 1e-14);
  // nullspace spanned by the x1 coordinates
  const double e1[4] = {1, 0, 0, 0}, e2[4] = {0, 1, 0, 0};
  EXPECT_LT(distance_to_span(t.F, e1), 1e-14);
  EXPECT_LT(distance_to_span(t.F, e2), 1e-14);
  EXPECT_LT((t.Q * t.F).frobenius(), 1e-14);
}

TEST(Tableau, DecoupledBlockHasEmptySystem) {
  // nilpotent 2x2 block beside a normal 1x1 block: u, v, w, q all vanish
  const Matrix A{{0, 1, 0}, {0, 0, 0}, {0, 0, 5}};
  const auto pr = profile(A);
  const auto t = assemble_tableau(A, pr);
  EXPECT_EQ(t.m, 0u);
  const auto ev = hermitian_eig(t.K).values;
  EXPECT_NEAR(ev[0], 1, 1e-14);
  EXPECT_NEAR(ev[1], 1, 1e-14);
  EXPECT_NEAR(ev[2], -1, 1e-14);
  EXPECT_NEAR(ev[3], -1, 1e-14);
}

TEST(Tableau, RcNsIsInfeasibleOnBothPaths) {
  const Matrix A = fixture("rc_ns");
  const auto pr = profile(A);
  const auto ts = assemble_tableau(A, pr);
  const auto tr = assemble_tableau_refined(A, pr).second;
  EXPECT_FALSE(solve_feasibility(ts, pr.d).has_value());
  EXPECT_FALSE(solve_feasibility(tr, pr.d).has_value());
  for (double v : hermitian_eig(ts.K).values) EXPECT_LE(v, 1e-12);
}

TEST(Tableau, EmptyNullspaceIsInfeasible) {
  ProcedureTableau t;
  t.m = 4;
  EXPECT_FALSE(solve_feasibility(t, 1.0).has_value());
}

TEST(RefinedTableau, ThreeByThreeExampleIsOneRow) {
  const Matrix A = fixture("ex_a");
  const auto [rb, t] = assemble_tableau_refined(A, profile(A));
  EXPECT_EQ(t.Q.rows(), 1u);
  EXPECT_LE(t.m, 1u);
  EXPECT_TRUE(solve_feasibility(t, 1.0).has_value());
  EXPECT_LT((rb.W.adjoint() * rb.W - Matrix::identity(3)).frobenius(), 1e-12);
}

TEST(RefinedTableau, BlockPatternHolds) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Matrix A = synth_rank_condition(3 + s % 6, 77 + s);
    const auto pr = profile(A);
    const auto [rb, t] = assemble_tableau_refined(A, pr);
    const std::size_t n = A.rows();
    const Matrix At = rb.W.adjoint() * A * rb.W;
    EXPECT_LT(std::abs(At(0, 0) - At(1, 1)), 1e-9 * A.frobenius());
    for (std::size_t j = 2; j < n; ++j) {
      EXPECT_LT(std::abs(At(j, 0) - rb.v[j - 2]), 1e-9 * A.frobenius());
      EXPECT_LT(std::abs(At(j, 1) - rb.u[j - 2]), 1e-9 * A.frobenius());
    }
  }
}

TEST(RefinedTableau, AgreesWithStandardOnGenerators) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const std::size_t n = 3 + s % 6;
    const Matrix A = s % 2 ? generate_nd1_complex(n, s) : synth_rank_condition(n, s);
    const auto a = nd_status(A, {}, {true}), b = nd_status(A, {}, {false});
    EXPECT_EQ(a.verdict, b.verdict) << "n=" << n << " seed=" << s;
    EXPECT_FALSE(a.refined_fallback);
  }
}

TEST(Sampling, ShiftPairsHaveUnitX1AndZeroX2) {
  const auto st = nd_status(shift(4));
  ASSERT_EQ(st.verdict, NdVerdict::One);
  for (const auto& s : st.family->sample(3, 0)) {
    EXPECT_NEAR(std::abs(s.x1), 1.0, 1e-12);
    EXPECT_LT(std::abs(s.x2), 1e-12);
  }
}

TEST(Sampling, DeterministicUnderSeed) {
  const auto st = nd_status(fixture("ex_b"));
  const auto a = st.family->sample(5, 42), b = st.family->sample(5, 42), c = st.family->sample(5, 43);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a[i].x1, b[i].x1);
    EXPECT_EQ(a[i].x2, b[i].x2);
  }
  EXPECT_NE(a[0].x1, c[0].x1);
}

TEST(Sampling, DoublingDScalesBySqrtTwo) {
  const auto st = nd_status(fixture("ex_a"));
  FeasibleSet fs = st.family->feasible();
  const auto a = sample_solutions(fs, 4, 9);
  fs.d *= 2.0;
  const auto b = sample_solutions(fs, 4, 9);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(b[i].x1 - std::sqrt(2.0) * a[i].x1), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(b[i].x2 - std::sqrt(2.0) * a[i].x2), 0.0, 1e-12);
  }
}

TEST(Sampling, PairsSolveTheOriginalEquation) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Matrix A = generate_nd1_complex(3 + s % 7, s);
    const auto st = nd_status(A);
    ASSERT_EQ(st.verdict, NdVerdict::One);
    for (const auto& p : st.family->sample(3, s)) {
      EXPECT_LT(equation_residual(A, st.profile, p), 1e-9 * A.frobenius() * (1 + std::abs(p.x1) + std::abs(p.x2)));
      EXPECT_NEAR(std::norm(p.x1) - std::norm(p.x2), st.profile.d, 1e-9 * st.profile.d);
    }
  }
}

TEST(Sampling, EmptyLevelSurfaceThrows) {
  FeasibleSet fs{1.0, Matrix(4, 1), {-1.0}, Matrix::identity(1)};
  EXPECT_THROW(sample_solutions(fs, 1, 0), Error);
}

TEST(Completion, ShiftUnitCompletionIsCyclic) {
  const Matrix A = shift(4);
  const auto pr = profile(A);
  // phases of u1, u2 are whatever the eigensolver chose; undo them
  const SolutionPair s{std::conj(pr.u1[3]), 0.0};
  const Matrix B = build_completion(A, pr, s);
  EXPECT_NEAR(std::abs(B(3, 4)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(B(4, 0)), 1.0, 1e-14);
  EXPECT_LT(std::abs(B(4, 4)), 1e-14);
  EXPECT_TRUE(verify_normal(B).normal);
}

TEST(Completion, ThreeByThreeExampleUnitPair) {
  const Matrix A = fixture("ex_a");
  const auto pr = profile(A);
  const SolutionPair s{std::conj(pr.u1[0]), 0.0};
  const Matrix B = build_completion(A, pr, s);
  const Matrix expect{{1, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {0, cplx(std::conj(pr.u1[0]) * std::conj(pr.u2[1])), 0, 1}};
  EXPECT_LT(max_entry_error(B, expect), 1e-14);
  EXPECT_TRUE(verify_normal(B).normal);
}

TEST(Completion, ClosedFormFamilyOfCornerExample) {
  // Pairs from the closed-form family, mapped through the eigenvector phases of u1, u2.
  const Matrix A = fixture("ex_b");
  const auto pr = profile(A);
  const Vector u1p{0.0, r2, -I * r2}, u2p{0.0, r2, I * r2};
  const cplx ea = dot(u1p, pr.u1), eb = dot(u2p, pr.u2);
  ASSERT_NEAR(std::abs(ea), 1.0, 1e-12);
  ASSERT_NEAR(std::abs(eb), 1.0, 1e-12);
  const cplx half = std::sqrt(std::conj(ea * eb));  // e^{-i(a+b)/2}
  const cplx mu = half;
  const double hs[][3] = {{std::sqrt(3.0), 0.0, 0.0}, {2.0, 1.0, 0.5}, {-std::sqrt(7.0), 2.0, -1.25}};
  for (const auto& h : hs) {
    const cplx x1p{h[0], h[2]}, x2p{h[1], -h[2]};
    const SolutionPair s{x1p * std::conj(mu * ea), x2p * std::conj(mu * eb)};
    const Matrix B = build_completion(A, pr, s, mu);
    const cplx c2 = (h[0] + h[1]) * r2, c3 = (2 * h[2] + I * (h[1] - h[0])) * r2;
    const cplx z = (h[0] * h[2] + 5 * h[1] * h[2] + I * (3 - 2 * h[0] * h[1] + 2 * h[1] * h[1])) / 3.0;
    const Matrix expect{{0, 1, 0, 0}, {1, 0, 1, c2}, {0, 1, 1.5 * I, c3}, {0, c2, c3, z}};
    EXPECT_LT(max_entry_error(B, expect), 1e-9);
    EXPECT_TRUE(verify_normal(B).normal);
  }
}

TEST(Completion, RejectsNonUnitPhase) {
  const Matrix A = shift(4);
  EXPECT_THROW(build_completion(A, profile(A), {1.0, 0.0}, 2.0), Error);
}

TEST(VerifyNormal, Basics) {
  const auto d = verify_normal(diag({1, I, 3}));
  EXPECT_TRUE(d.normal);
  EXPECT_EQ(d.residual, 0.0);
  EXPECT_FALSE(verify_normal(shift(4)).normal);
}

TEST(VerifyNormal, KnownFiveByFiveCompletionIsNormal) {
  const double s3 = std::sqrt(3.0) / 2, sq = std::sqrt(2.0);
  const Matrix B{{0, 0, r2, I * r2, sq},
                 {0, 0, 1, I, -1},
                 {1, r2, s3, -s3 * I, 0},
                 {I, I * r2, -s3 * I, -s3, 0},
                 {-1, sq, 0, 0, 0}};
  EXPECT_TRUE(verify_normal(B).normal);
  EXPECT_LT(normality_gap(B), 1e-15);
  EXPECT_LT(max_entry_error(B.block(0, 0, 4, 4), fixture("ex_eig")), 1e-15);
}

TEST(Dependency, ThreeDimensionsAlwaysDependent) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix A = synth_rank_condition(3, s);
    const auto pr = profile(A);
    const double sd = std::sqrt(pr.d);
    EXPECT_TRUE(dependency_test(A, sd * pr.u1, sd * pr.u2));
  }
}

TEST(Dependency, BasisWitnessIndependentThoughDefectIsOne) {
  const Matrix A = fixture("ex_eig");
  const Vector e1 = unit(4, 0), e2 = unit(4, 1);
  EXPECT_FALSE(dependency_test(A, e1, e2));
  EXPECT_EQ(nd_status(A).verdict, NdVerdict::One);
}

TEST(Dependency, FactorizationMismatchThrows) {
  EXPECT_THROW(dependency_test(shift(4), unit(4, 0), unit(4, 1)), Error);
}

TEST(Dependency, CompletionColumnsGiveDependentWitness) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Matrix A = generate_nd1_complex(4 + s % 5, 300 + s);
    const auto st = nd_status(A);
    ASSERT_EQ(st.verdict, NdVerdict::One);
    const auto& pr = st.profile;
    for (const auto& p : st.family->sample(2, s)) {
      const Vector x = p.x1 * pr.u1 + p.x2 * pr.u2;
      const Vector y = std::conj(p.x2) * pr.u1 + std::conj(p.x1) * pr.u2;
      EXPECT_TRUE(dependency_test(A, x, y));
      const Witness w = normal_witness(A, x, y);
      EXPECT_TRUE(verify_normal(w.B).normal);
    }
  }
}

TEST(NdStatus, ThreeByThreeRankConditionIsOne) {
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(nd_status(synth_rank_condition(3, s)).verdict, NdVerdict::One);
}

TEST(NdStatus, GatesAreReported) {
  const auto rc = nd_status(fixture("rc_ns"));
  EXPECT_EQ(rc.verdict, NdVerdict::MoreThanOne);
  EXPECT_EQ(rc.gate, Gate::NonPositiveK);
  EXPECT_EQ(nd_status(diag({1, 2})).verdict, NdVerdict::Normal);
  Matrix A(5, 5);
  A(0, 1) = 1.0;
  A(2, 3) = 1.0;
  A(3, 4) = 2.0;
  EXPECT_EQ(nd_status(A).gate, Gate::RankCondition);
}

TEST(NdStatus, PhaseRescalingKeepsVerdict) {
  detail::Rng rng(11);
  std::uniform_real_distribution<double> ang(0.0, 6.283);
  for (std::uint64_t s = 0; s < 40; ++s) {
    const std::size_t n = 3 + s % 5;
    const Matrix A = synth_rank_condition(n, 500 + s);
    std::vector<cplx> ph(n);
    for (auto& p : ph) p = std::polar(1.0, ang(rng));
    const Matrix D = Matrix::diagonal(ph);
    EXPECT_EQ(nd_status(A).verdict, nd_status(D.adjoint() * A * D).verdict);
  }
}

TEST(NdStatus, GeneratedCompletionsAreNormalAndKeepA) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const std::size_t n = 3 + s % 8;
    const Matrix A = generate_nd1_complex(n, s);
    const auto st = nd_status(A);
    ASSERT_EQ(st.verdict, NdVerdict::One);
    for (const auto& p : st.family->sample(2, s)) {
      const Matrix B = st.family->completion(p);
      EXPECT_TRUE(B.block(0, 0, n, n) == A);
      EXPECT_LT(normality_gap(B), 1e-9);
    }
  }
}

#include <gtest/gtest.h>

#include "ndefect/commuting.hpp"
#include "support.hpp"

using namespace ndefect;
using namespace ndefect::testing;

namespace {

std::pair<Matrix, Matrix> hermitian_split(const Matrix& A) {
  return {0.5 * (A + A.adjoint()), cplx(0.0, -0.5) * (A - A.adjoint())};
}

std::pair<Matrix, Matrix> symmetric_split(const Matrix& A) {
  return {0.5 * (A + A.transpose()), 0.5 * (A - A.transpose())};
}

}  // namespace

TEST(VariableChange, RoundTrip) {
  // dyadic values make the round trip exact
  const SolutionPair s{cplx(1.5, -0.25), cplx(-0.75, 2.0)};
  const auto [t1, t2] = to_t(s);
  const SolutionPair r = from_t(t1, t2);
  EXPECT_EQ(r.x1, s.x1);
  EXPECT_EQ(r.x2, s.x2);
  detail::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const SolutionPair p{detail::complex_normal(rng), detail::complex_normal(rng)};
    const auto [a, b] = to_t(p);
    const SolutionPair q = from_t(a, b);
    EXPECT_LT(std::abs(q.x1 - p.x1) + std::abs(q.x2 - p.x2), 1e-15 * (1 + std::abs(p.x1) + std::abs(p.x2)));
  }
}

TEST(Hermitian, CommutingPairIsZero) {
  EXPECT_EQ(chd_solve(diag({1, 2, 3}), diag({4, 5, 6})).verdict, PairVerdict::Zero);
}

TEST(Hermitian, RejectsNonHermitian) {
  EXPECT_THROW(chd_solve(shift(3), diag({1, 1, 1})), Error);
  EXPECT_THROW(chd_solve(diag({1, 1}), diag({1, 1, 1})), Error);
}

TEST(Hermitian, SplitExampleRoundTripsThroughCompletion) {
  const Matrix A = fixture("ex_a");
  const auto [A1, A2] = hermitian_split(A);
  const auto ps = chd_solve(A1, A2);
  ASSERT_EQ(ps.verdict, PairVerdict::One);
  const cplx mu = std::polar(1.0, 0.7);
  for (const auto& s : ps.nd->family->sample(4, 1)) {
    const auto pc = chd_completion(ps, A1, A2, s, mu);
    const Matrix B = build_completion(ps.nd->family->matrix(), ps.nd->profile, s, mu);
    EXPECT_LT((pc.B1 + I * pc.B2 - B).frobenius(), 1e-12 * B.frobenius());
    EXPECT_EQ(hermitian_defect(pc.B1), 0.0);
    EXPECT_EQ(hermitian_defect(pc.B2), 0.0);
    EXPECT_LT(commutator_residual(pc.B1, pc.B2), 1e-12);
  }
}

TEST(Hermitian, RankFourCommutatorIsMoreThanOne) {
  // direct sum of two non-commuting 2x2 Hermitian pairs
  Matrix A1(4, 4), A2(4, 4);
  A1(0, 0) = 1;
  A1(1, 1) = -1;
  A2(0, 1) = A2(1, 0) = 1;
  A1(2, 2) = 2;
  A1(3, 3) = -3;
  A2(2, 3) = I;
  A2(3, 2) = -I;
  const auto ps = chd_solve(A1, A2);
  EXPECT_EQ(ps.verdict, PairVerdict::MoreThanOne);
  EXPECT_EQ(ps.gate, Gate::RankCondition);
}

TEST(Hermitian, VerdictIsNdOfCombination) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Matrix A = synth_rank_condition(3 + s % 4, s);
    const auto [A1, A2] = hermitian_split(A);
    EXPECT_EQ(chd_solve(A1, A2).verdict, detail::pair_verdict(nd_status(A1 + I * A2).verdict));
  }
}

TEST(Symmetric, CommutingPairIsZero) {
  const Matrix S{{2, 1}, {1, 2}};
  EXPECT_EQ(csd_solve(S, 3.0 * S).verdict, PairVerdict::Zero);
}

TEST(Symmetric, RejectsStructureErrors) {
  EXPECT_THROW(csd_solve(Matrix{{1, 2}, {0, 1}}, diag({1, 1})), Error);
  EXPECT_THROW(csd_solve(diag({1.0, I}), diag({1, 1})), Error);
}

TEST(Symmetric, CompletionsAreRealSymmetricAndCommute) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto [A1, A2] = synth_symmetric_pair(2 + s % 6, s);
    const auto ps = csd_solve(A1, A2);
    if (ps.verdict != PairVerdict::One) continue;
    for (const auto& pc : sample_pair_completions(ps, A1, A2, 3, s)) {
      EXPECT_TRUE(pc.B1.is_real());
      EXPECT_TRUE(pc.B2.is_real());
      EXPECT_EQ(symmetric_defect(pc.B1), 0.0);
      EXPECT_EQ(symmetric_defect(pc.B2), 0.0);
      EXPECT_LT(commutator_residual(pc.B1, pc.B2), 1e-9);
    }
  }
}

TEST(Symmetric, AgreesWithHermitianSolver) {
  int one = 0;
  for (std::uint64_t s = 0; s < 120; ++s) {
    const auto [A1, A2] = synth_symmetric_pair(2 + s % 6, 1000 + s);
    const auto c = csd_solve(A1, A2), h = chd_solve(A1, A2);
    EXPECT_EQ(c.verdict, h.verdict) << "seed " << s;
    one += c.verdict == PairVerdict::One;
  }
  EXPECT_GT(one, 0);
}

TEST(SymAntisym, NormalCombinationIsZero) {
  EXPECT_EQ(sym_antisym_solve(Matrix{{2, 1}, {1, 0}}, Matrix(2, 2)).verdict, PairVerdict::Zero);
}

TEST(SymAntisym, RejectsNonAntisymmetric) {
  EXPECT_THROW(sym_antisym_solve(diag({1, 2}), Matrix{{0, 1}, {1, 0}}), Error);
}

TEST(SymAntisym, ExampleSplitMatchesRealVerdict) {
  const Matrix A = fixture("real_ex_a");
  const auto [S, K] = symmetric_split(A);
  const auto ps = sym_antisym_solve(S, K);
  EXPECT_EQ(ps.verdict, detail::pair_verdict(rnd_status(A).verdict));
  for (const auto& pc : sample_pair_completions(ps, S, K, 20, 0)) {
    EXPECT_EQ(symmetric_defect(pc.B1), 0.0);
    EXPECT_EQ((pc.B2 + pc.B2.transpose()).max_abs(), 0.0);
    EXPECT_LT(commutator_residual(pc.B1, pc.B2), 1e-12);
  }
}

TEST(SymAntisym, RandomPairsCommute) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const Matrix R = synth_rank_condition_real(2 + s % 6, s);
    const auto [S, K] = symmetric_split(R);
    const auto ps = sym_antisym_solve(S, K);
    for (const auto& pc : sample_pair_completions(ps, S, K, 4, 0)) {
      EXPECT_LT(commutator_residual(pc.B1, pc.B2), 1e-9);
      EXPECT_TRUE(pc.B1.block(0, 0, S.rows(), S.rows()) == S);
      EXPECT_TRUE(pc.B2.block(0, 0, K.rows(), K.rows()) == K);
    }
  }
}

TEST(PairCompletion, NotDefectOneThrows) {
  const auto ps = chd_solve(diag({1, 2}), diag({3, 4}));
  EXPECT_THROW(chd_completion(ps, diag({1, 2}), diag({3, 4}), {1.0, 0.0}), Error);
  EXPECT_TRUE(sample_pair_completions(ps, diag({1, 2}), diag({3, 4}), 3, 0).empty());
}

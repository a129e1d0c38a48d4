#include <gtest/gtest.h>

#include "ndefect/separability.hpp"
#include "support.hpp"

using namespace ndefect;
using namespace ndefect::testing;

namespace {

// rho (2x2) tensor sigma (n x n), block index first
Matrix kron(const Matrix& rho, const Matrix& sigma) {
  const std::size_t n = sigma.rows();
  Matrix R(2 * n, 2 * n);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) R.set_block(a * n, b * n, rho(a, b) * sigma);
  return R;
}

Matrix random_density(std::size_t n, detail::Rng& rng) {
  const Matrix G = detail::gaussian(n, n, rng, false);
  return G * G.adjoint();
}

}  // namespace

TEST(Peres, ProductStatePasses) {
  detail::Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const Matrix M = kron(random_density(2, rng), random_density(3, rng));
    EXPECT_TRUE(peres_test(M).passed);
  }
}

TEST(Peres, BellProjectorFails) {
  Matrix M(4, 4);
  M(0, 0) = M(0, 3) = M(3, 0) = M(3, 3) = 0.5;
  const auto r = peres_test(M);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.min_eigenvalue, -0.5, 1e-14);
  EXPECT_EQ(sep_check_state(M).verdict, SepOutcome::Entangled);
}

TEST(Peres, PartialTransposeIsInvolution) {
  detail::Rng rng(7);
  const Matrix M = random_density(6, rng);
  EXPECT_TRUE(partial_transpose(partial_transpose(M)) == M);
  EXPECT_FALSE(partial_transpose(M) == M);
}

TEST(Peres, RejectsBadStates) {
  EXPECT_THROW(peres_test(shift(4)), Error);
  EXPECT_THROW(peres_test(diag({1, -1})), Error);
  EXPECT_THROW(peres_test(diag({1, 1, 1})), Error);
}

TEST(SepCheck, NormalBWithMinimalCIsSeparable) {
  const Matrix U = Matrix{{1, 1}, {1, -1}} * cplx(r2);
  const Matrix B = U * diag({2.0, 1.0 + I}) * U.adjoint();
  const auto v = sep_check(B, B * B.adjoint());
  EXPECT_EQ(v.verdict, SepOutcome::Separable);
  EXPECT_EQ(v.state_count, 2u);
  ASSERT_TRUE(v.witness);
  EXPECT_LT(normality_gap(v.witness->B), 1e-14);
}

TEST(SepCheck, ProductSumInstancesAreNeverEntangled) {
  int separable = 0;
  for (std::uint64_t s = 0; s < 120; ++s) {
    const std::size_t n = 1 + s % 6;
    const auto inst = separable_instance(n, s);
    const auto v = sep_check_state(inst.M);
    EXPECT_NE(v.verdict, SepOutcome::Entangled) << "n=" << n << " seed=" << s << " " << v.reason;
    if (v.verdict != SepOutcome::Separable) continue;
    ++separable;
    ASSERT_TRUE(v.witness);
    const auto [B, C] = reduce_general_A(inst.M);
    EXPECT_LT(max_entry_error(B, inst.B), 1e-9 * (1 + inst.B.frobenius()));
    EXPECT_LT((C - B * B.adjoint() - outer(inst.c, inst.c)).frobenius(), 1e-8 * (1 + C.frobenius()));
    const Matrix& W = v.witness->B;
    EXPECT_LT(normality_gap(W), 1e-9);
    EXPECT_LT(max_entry_error(W.block(0, 0, n, n), B), 1e-12 * (1 + B.frobenius()));
    // the witness column carries the defect C - BB*
    const Vector c = W.block(0, n, n, 1).col(0);
    EXPECT_LT((outer(c, c) - (C - B * B.adjoint())).frobenius(), 1e-8 * (1 + C.frobenius()));
  }
  EXPECT_GT(separable, 100);
}

TEST(SepCheck, EngineeredFixtureIsEntangled) {
  const Matrix M = fixture("sep_entangled_n4");
  const auto v = sep_check_state(M);
  EXPECT_TRUE(v.peres_ok);
  EXPECT_EQ(v.rank_m, 5u);
  EXPECT_EQ(v.rank_mt, 5u);
  EXPECT_FALSE(v.dependent);
  EXPECT_EQ(v.verdict, SepOutcome::Entangled);
}

TEST(SepCheck, ProductFixtureIsSeparable) {
  const auto v = sep_check_state(fixture("sep_product_n3"));
  EXPECT_EQ(v.verdict, SepOutcome::Separable);
  EXPECT_EQ(v.state_count, 6u);
}

TEST(ProductState, DetectsTensorProductsOnly) {
  detail::Rng rng(21);
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_TRUE(is_product_state(kron(random_density(2, rng), random_density(n, rng))));
  Matrix bell(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  EXPECT_FALSE(is_product_state(bell));
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_FALSE(is_product_state(separable_instance(2 + s % 2, s).M));
}

TEST(SepCheck, SingularLeadingBlockIsInconclusive) {
  detail::Rng rng(4);
  // e1 e1* beside a full-rank block: A is singular and M is not a single product
  const Matrix M = kron(Matrix{{1, 0}, {0, 0}}, Matrix(outer(unit(3, 0), unit(3, 0)))) +
                   kron(Matrix{{0, 0}, {0, 1}}, random_density(3, rng));
  ASSERT_FALSE(is_product_state(M));
  const auto v = sep_check_state(M);
  EXPECT_EQ(v.verdict, SepOutcome::Inconclusive);
  EXPECT_THROW(reduce_general_A(M), Error);
}

TEST(SepCheck, RankFailureIsInconclusive) {
  detail::Rng rng(9);
  const Matrix B = detail::gaussian(3, 3, rng, false);
  const Matrix C = B * B.adjoint() + B.adjoint() * B + Matrix::identity(3);
  EXPECT_EQ(sep_check(B, C).verdict, SepOutcome::Inconclusive);
}

TEST(Reduce, IdentityLeadingBlockIsUnchanged) {
  const auto inst = separable_instance(3, 11);
  Matrix M(6, 6);
  M.set_block(0, 0, Matrix::identity(3));
  M.set_block(0, 3, inst.B.adjoint());
  M.set_block(3, 0, inst.B);
  M.set_block(3, 3, inst.C);
  const auto [B, C] = reduce_general_A(M);
  EXPECT_LT(max_entry_error(B, inst.B), 1e-13 * inst.B.frobenius());
  EXPECT_LT(max_entry_error(C, inst.C), 1e-13 * inst.C.frobenius());
  const auto [B4, C4] = reduce_general_A(4.0 * M);
  EXPECT_LT(max_entry_error(B4, inst.B), 1e-13 * inst.B.frobenius());
  EXPECT_LT(max_entry_error(C4, inst.C), 1e-13 * inst.C.frobenius());
}

TEST(Reduce, KeepsProductStructure) {
  // a sum of n + 1 product states stays PSD with PSD partial transpose after reduction
  detail::Rng rng(13);
  for (std::size_t n = 2; n <= 4; ++n) {
    Matrix M(2 * n, 2 * n);
    for (std::size_t k = 0; k <= n; ++k) {
      Vector a(2), b(n);
      for (auto& z : a) z = detail::complex_normal(rng);
      for (auto& z : b) z = detail::complex_normal(rng);
      M = M + kron(Matrix(outer(a, a)), Matrix(outer(b, b)));
    }
    const auto [B, C] = reduce_general_A(M);
    Matrix R(2 * n, 2 * n);
    R.set_block(0, 0, Matrix::identity(n));
    R.set_block(0, n, B.adjoint());
    R.set_block(n, 0, B);
    R.set_block(n, n, C);
    EXPECT_TRUE(peres_test(R).passed);
    EXPECT_NE(sep_check(B, C).verdict, SepOutcome::Entangled);
  }
}

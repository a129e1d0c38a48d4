#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "ndefect/generators.hpp"
#include "ndefect/io.hpp"
#include "ndefect/nd_complex.hpp"

#ifndef NDEFECT_FIXTURES
#define NDEFECT_FIXTURES "fixtures"
#endif

namespace ndefect::testing {

inline const cplx I{0.0, 1.0};
inline const double r2 = 1.0 / std::sqrt(2.0);

inline Matrix fixture(const std::string& name) { return read_matrix(std::string(NDEFECT_FIXTURES) + "/" + name + ".json"); }

inline Matrix shift(std::size_t n) {
  Matrix S(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) S(i, i + 1) = 1.0;
  return S;
}

inline Matrix diag(std::initializer_list<cplx> d) { return Matrix::diagonal(std::vector<cplx>(d)); }

inline double max_entry_error(const Matrix& A, const Matrix& B) { return (A - B).max_abs(); }

// Root of a continuous f on [a, b] with a sign change, by bisection.
inline double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b), fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Naive O(n^3) normality residual, independent of verify_normal.
inline double normality_gap(const Matrix& B) {
  const std::size_t n = B.rows();
  double s = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx l = 0.0, r = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        l += std::conj(B(k, i)) * B(k, j);
        r += B(i, k) * std::conj(B(j, k));
      }
      s += std::norm(l - r);
      nb += std::norm(B(i, j));
    }
  return std::sqrt(s) / std::max(nb, 1e-300);
}

// Separable state with the rank preconditions, assembled from product states.
// N = [[B, c], [r*, z]] is a normal completion with eigenpairs (lambda_k, w_k);
// with p_k the first n entries of w_k,
//   sum_k [[1, conj(lambda_k)], [lambda_k, |lambda_k|^2]] (x) p_k p_k* = [[I, B*], [B, BB* + cc*]],
// then congruence by I_2 (x) A^{1/2} for a random positive A.
struct SepInstance {
  Matrix M, B, C, N;
  Vector c;
};

inline SepInstance separable_instance(std::size_t n, std::uint64_t seed) {
  detail::Rng rng(seed);
  SepInstance s;
  if (n == 1) {
    // [[b, c], [d, b]] is normal whenever |d| = |c|
    const cplx b = detail::complex_normal(rng), c = detail::complex_normal(rng), e = detail::complex_normal(rng);
    s.N = Matrix{{b, c}, {std::abs(c) / std::abs(e) * e, b}};
  } else {
    const Matrix B = n <= 3 ? synth_rank_condition(n, seed) : generate_nd1_complex(n, seed);
    const NdStatus st = nd_status(B);
    if (st.verdict != NdVerdict::One) throw Error(ErrorCode::NotDefectOne, "instance base is not defect one");
    const auto sol = st.family->sample(1, seed).front();
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::acos(-1.0));
    s.N = st.family->completion(sol, std::polar(1.0, ang(rng)));
  }
  const std::size_t m = n + 1;
  s.B = s.N.block(0, 0, n, n);
  s.c = s.N.block(0, n, n, 1).col(0);
  // eigenvectors of a normal matrix from a generic Hermitian combination
  const Matrix G = s.N + s.N.adjoint() + 0.7071067811865476 * cplx(0.0, 1.0) * (s.N - s.N.adjoint());
  const EigenPairs ep = hermitian_eig(G);
  Matrix A(n, n), Bs(n, n), C(n, n);
  for (std::size_t k = 0; k < m; ++k) {
    const Vector w = ep.vectors.col(k);
    const cplx lam = dot(w, s.N * w);
    const Vector p(w.begin(), w.begin() + n);
    const Matrix P = outer(p, p);
    A = A + P;
    Bs = Bs + lam * P;
    C = C + std::norm(lam) * P;
  }
  s.C = C;
  const Matrix G2 = detail::gaussian(n, n, rng, false);
  const Matrix Ap = G2 * G2.adjoint() + Matrix::identity(n);
  const EigenPairs ea = hermitian_eig(Ap);
  std::vector<cplx> sq(n);
  for (std::size_t k = 0; k < n; ++k) sq[k] = std::sqrt(ea.values[k]);
  const Matrix Ah = ea.vectors * Matrix::diagonal(sq) * ea.vectors.adjoint();
  s.M = Matrix(2 * n, 2 * n);
  s.M.set_block(0, 0, Ah * A * Ah);
  s.M.set_block(0, n, Ah * Bs.adjoint() * Ah);
  s.M.set_block(n, 0, Ah * Bs * Ah);
  s.M.set_block(n, n, Ah * C * Ah);
  s.M = 0.5 * (s.M + s.M.adjoint());
  return s;
}

}  // namespace ndefect::testing

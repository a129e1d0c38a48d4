#pragma once

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

#include "ndefect/commutator.hpp"

namespace ndefect {

// A = V (M N M) V* + mu I with M = diag(1, ..., 1, t) and N normal.
struct GeneratorSpec {
  std::size_t n = 0;
  double t = 0.0;
  cplx mu = 0.0;
  Matrix N;
  Matrix V;
  bool real = false;
};

namespace detail {

using Rng = std::mt19937_64;

inline cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> g;
  const double re = g(rng);
  return {re, g(rng)};
}

inline Matrix gaussian(std::size_t r, std::size_t c, Rng& rng, bool real) {
  std::normal_distribution<double> g;
  Matrix M(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) M(i, j) = real ? cplx(g(rng)) : complex_normal(rng);
  return M;
}

// Haar-distributed via Gram-Schmidt on a Gaussian matrix.
inline Matrix random_unitary(std::size_t n, Rng& rng, bool real = false) {
  const Matrix G = gaussian(n, n, rng, real);
  Matrix Q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector v = G.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        const Vector q = Q.col(i);
        v = v - dot(q, v) * q;
      }
    Q.set_col(j, (1.0 / norm2(v)) * v);
  }
  return Q;
}

inline std::vector<double> spread_spectrum(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<double> lam(n);
  for (std::size_t j = 0; j < n; ++j) lam[j] = static_cast<double>(j) - 0.5 * static_cast<double>(n - 1) + jitter(rng);
  return lam;
}

}  // namespace detail

// Normal MNM fails iff gg* = hh* and t alpha h = t conj(alpha) g, where
// N = [[N0, g], [h*, alpha]].
inline bool nonnormality_guard(const Matrix& N, double t, const Tolerance& tol = {}) {
  require_square(N, "guard needs a square matrix");
  const double s2 = N.frobenius() * N.frobenius();
  if (self_commutator(N).frobenius() > tol.residual_tol * s2)
    throw Error(ErrorCode::NotNormalInput, "N is not normal");
  const std::size_t n = N.rows();
  Vector g(n - 1), h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    g[i] = N(i, n - 1);
    h[i] = std::conj(N(n - 1, i));
  }
  const cplx alpha = N(n - 1, n - 1);
  const bool moduli = (outer(g, g) - outer(h, h)).frobenius() <= tol.residual_tol * s2;
  const bool phase = t * norm2(alpha * h - std::conj(alpha) * g) <= tol.residual_tol * s2;
  return !(moduli && phase);
}

inline GeneratorSpec draw_spec_complex(std::size_t n, detail::Rng& rng) {
  GeneratorSpec s;
  s.n = n;
  std::uniform_real_distribution<double> tdist(0.0, 0.9);
  s.t = tdist(rng);
  s.mu = detail::complex_normal(rng);
  const Matrix W = detail::random_unitary(n, rng);
  Matrix D(n, n);
  for (std::size_t i = 0; i < n; ++i) D(i, i) = detail::complex_normal(rng);
  s.N = W * D * W.adjoint();
  s.V = detail::random_unitary(n, rng);
  return s;
}

// N orthogonally similar to a direct sum of [[a, b], [-b, a]] blocks.
inline GeneratorSpec draw_spec_real_even(std::size_t n, detail::Rng& rng) {
  if (n % 2 != 0) throw Error(ErrorCode::OddSize, "real generator needs even n");
  GeneratorSpec s;
  s.n = n;
  s.real = true;
  std::uniform_real_distribution<double> tdist(0.0, 0.9);
  std::normal_distribution<double> g;
  s.t = tdist(rng);
  s.mu = g(rng);
  Matrix D(n, n);
  for (std::size_t k = 0; k < n; k += 2) {
    const double a = g(rng), b = g(rng);
    D(k, k) = a;
    D(k, k + 1) = b;
    D(k + 1, k) = -b;
    D(k + 1, k + 1) = a;
  }
  const Matrix W = detail::random_unitary(n, rng, true);
  s.N = (W * D * W.transpose()).real_part();
  s.V = detail::random_unitary(n, rng, true);
  return s;
}

namespace detail {

inline Matrix assemble_generated(const GeneratorSpec& s) {
  Matrix MNM = s.N;
  const std::size_t n = s.n;
  for (std::size_t i = 0; i < n; ++i) {
    MNM(i, n - 1) *= s.t;
    MNM(n - 1, i) *= s.t;
  }
  const Matrix Vs = s.real ? s.V.transpose() : s.V.adjoint();
  Matrix A = s.V * MNM * Vs;
  for (std::size_t i = 0; i < n; ++i) A(i, i) += s.mu;
  return s.real ? A.real_part() : A;
}

}  // namespace detail

inline Matrix synth_nd1_complex(const GeneratorSpec& s, const Tolerance& tol = {}) {
  if (!nonnormality_guard(s.N, s.t, tol)) throw Error(ErrorCode::GuardFailed, "MNM is normal");
  return detail::assemble_generated(s);
}

inline Matrix synth_rnd1_real_even(const GeneratorSpec& s, const Tolerance& tol = {}) {
  if (s.n % 2 != 0) throw Error(ErrorCode::OddSize, "real generator needs even n");
  if (!nonnormality_guard(s.N, s.t, tol)) throw Error(ErrorCode::GuardFailed, "MNM is normal");
  return detail::assemble_generated(s);
}

// Seeded drivers: redraw the spec while the guard rejects, at most 16 times.
inline Matrix generate_nd1_complex(std::size_t n, std::uint64_t seed, const Tolerance& tol = {}) {
  detail::Rng rng(seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const GeneratorSpec s = draw_spec_complex(n, rng);
    if (nonnormality_guard(s.N, s.t, tol)) return detail::assemble_generated(s);
  }
  throw Error(ErrorCode::GuardFailed, "guard rejected 16 draws");
}

inline Matrix generate_rnd1_real_even(std::size_t n, std::uint64_t seed, const Tolerance& tol = {}) {
  if (n % 2 != 0) throw Error(ErrorCode::OddSize, "real generator needs even n");
  detail::Rng rng(seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const GeneratorSpec s = draw_spec_real_even(n, rng);
    if (nonnormality_guard(s.N, s.t, tol)) return detail::assemble_generated(s);
  }
  throw Error(ErrorCode::GuardFailed, "guard rejected 16 draws");
}

// Random matrix with rank-2 self-commutator, unrestricted defect. With A = A1 + i A2,
// A1 = diag(lambda), the commutator is 2i[A1, A2]; choosing [A1, A2] = i(xx* - yy*)
// with |x_j| = |y_j| (zero diagonal) fixes A2 off the diagonal.
inline Matrix synth_rank_condition(std::size_t n, std::uint64_t seed) {
  detail::Rng rng(seed);
  const auto lam = detail::spread_spectrum(n, rng);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> g;
  Vector x(n), y(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = detail::complex_normal(rng);
    y[j] = x[j] * std::polar(1.0, phase(rng));
  }
  const Matrix C = cplx(0.0, 1.0) * (outer(x, x) - outer(y, y));
  Matrix A(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      A(j, k) = j == k ? cplx(lam[j], g(rng)) : cplx(0.0, 1.0) * C(j, k) / (lam[j] - lam[k]);
  const Matrix U = detail::random_unitary(n, rng);
  return U * A * U.adjoint();
}

// Real analogue: A = A1 + A2 with A1 = diag(lambda) symmetric and A2 antisymmetric,
// A^T A - A A^T = 2[A1, A2] = 2(xx^T - yy^T) with y_j = +-x_j.
inline Matrix synth_rank_condition_real(std::size_t n, std::uint64_t seed) {
  detail::Rng rng(seed);
  const auto lam = detail::spread_spectrum(n, rng);
  std::normal_distribution<double> g;
  std::bernoulli_distribution flip(0.5);
  // Equal signs everywhere would make x = +-y and A normal, so redraw those.
  std::vector<bool> same(n);
  do {
    for (std::size_t j = 0; j < n; ++j) same[j] = flip(rng);
  } while (std::all_of(same.begin(), same.end(), [&](bool b) { return b == same[0]; }));
  std::vector<double> x(n), y(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = g(rng);
    y[j] = same[j] ? x[j] : -x[j];
  }
  Matrix A(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      A(j, k) = j == k ? lam[j] : (x[j] * x[k] - y[j] * y[k]) / (lam[j] - lam[k]);
  const Matrix O = detail::random_unitary(n, rng, true);
  return (O * A * O.transpose()).real_part();
}

// Real symmetric pair with rank-2 commutator [A1, A2] = xy^T - yx^T.
inline std::pair<Matrix, Matrix> synth_symmetric_pair(std::size_t n, std::uint64_t seed) {
  detail::Rng rng(seed);
  const auto lam = detail::spread_spectrum(n, rng);
  std::normal_distribution<double> g;
  std::vector<double> x(n), y(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = g(rng);
    y[j] = g(rng);
  }
  Matrix A1(n, n), A2(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    A1(j, j) = lam[j];
    A2(j, j) = g(rng);
    for (std::size_t k = 0; k < n; ++k)
      if (j != k) A2(j, k) = (x[j] * y[k] - y[j] * x[k]) / (lam[j] - lam[k]);
  }
  const Matrix O = detail::random_unitary(n, rng, true);
  const Matrix S1 = (O * A1 * O.transpose()).real_part(), S2 = (O * A2 * O.transpose()).real_part();
  return {0.5 * (S1 + S1.transpose()), 0.5 * (S2 + S2.transpose())};
}

}  // namespace ndefect

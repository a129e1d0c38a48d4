#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ndefect/nd_real.hpp"

namespace ndefect {

enum class PairKind { Hermitian, Symmetric, SymAntisym };
enum class PairVerdict { Zero, One, MoreThanOne };

inline const char* to_string(PairKind k) {
  switch (k) {
    case PairKind::Hermitian: return "hermitian";
    case PairKind::Symmetric: return "symmetric";
    case PairKind::SymAntisym: return "symantisym";
  }
  return "?";
}

inline const char* to_string(PairVerdict v) {
  switch (v) {
    case PairVerdict::Zero: return "zero";
    case PairVerdict::One: return "one";
    case PairVerdict::MoreThanOne: return "more_than_one";
  }
  return "?";
}

struct PairCompletion {
  Matrix B1, B2;
  PairKind kind = PairKind::Hermitian;
  cplx t1, t2;
  double z1 = 0.0, z2 = 0.0;
};

struct PairStatus {
  PairKind kind = PairKind::Hermitian;
  PairVerdict verdict = PairVerdict::Zero;
  Gate gate = Gate::None;
  std::optional<NdStatus> nd;    // Hermitian and symmetric pairs
  std::optional<RndStatus> rnd;  // symmetric/antisymmetric pairs
};

// t1 = x1 - conj(x2), t2 = x1 + conj(x2)
inline std::pair<cplx, cplx> to_t(const SolutionPair& s) {
  return {s.x1 - std::conj(s.x2), s.x1 + std::conj(s.x2)};
}
inline SolutionPair from_t(cplx t1, cplx t2) {
  return {0.5 * (t1 + t2), std::conj(0.5 * (t2 - t1))};
}

// Commutator residual ||B1 B2 - B2 B1||_F / (||B1||_F ||B2||_F).
inline double commutator_residual(const Matrix& B1, const Matrix& B2) {
  const double s = B1.frobenius() * B2.frobenius();
  const double r = (B1 * B2 - B2 * B1).frobenius();
  return s > 0.0 ? r / s : r;
}

namespace detail {

inline PairVerdict pair_verdict(NdVerdict v) {
  switch (v) {
    case NdVerdict::Normal: return PairVerdict::Zero;
    case NdVerdict::One: return PairVerdict::One;
    case NdVerdict::MoreThanOne: return PairVerdict::MoreThanOne;
  }
  return PairVerdict::MoreThanOne;
}

inline void require_hermitian(const Matrix& H, const Tolerance& tol) {
  require_square(H, "pair member must be square");
  if (hermitian_defect(H) > tol.residual_tol * std::max(1.0, H.frobenius()))
    throw Error(ErrorCode::NotHermitian, "pair member is not Hermitian");
}

inline void require_real_symmetric(const Matrix& S, const Tolerance& tol) {
  require_square(S, "pair member must be square");
  if (!S.is_real()) throw Error(ErrorCode::NotReal, "pair member is not real");
  if (symmetric_defect(S) > tol.residual_tol * std::max(1.0, S.frobenius()))
    throw Error(ErrorCode::NotSymmetric, "pair member is not symmetric");
}

inline void require_same_shape(const Matrix& A1, const Matrix& A2) {
  if (A1.rows() != A2.rows() || A1.cols() != A2.cols())
    throw Error(ErrorCode::DimensionMismatch, "pair members differ in size");
}

inline Matrix combine(const Matrix& A1, const Matrix& A2) { return A1 + cplx(0.0, 1.0) * A2; }

}  // namespace detail

inline PairStatus chd_solve(const Matrix& A1, const Matrix& A2, const Tolerance& tol = {}, NdOptions opt = {}) {
  detail::require_same_shape(A1, A2);
  detail::require_hermitian(A1, tol);
  detail::require_hermitian(A2, tol);
  PairStatus ps;
  ps.kind = PairKind::Hermitian;
  ps.nd = nd_status(detail::combine(A1, A2), tol, opt);
  ps.verdict = detail::pair_verdict(ps.nd->verdict);
  ps.gate = ps.nd->gate;
  return ps;
}

// B1 = [[A1, mu/2 (t2 u1 + conj(t2) u2)], [*, z1]], B2 = [[A2, mu/(2i) (t1 u1 - conj(t1) u2)], [*, z2]]
inline PairCompletion chd_completion(const PairStatus& ps, const Matrix& A1, const Matrix& A2,
                                     const SolutionPair& s, cplx mu = 1.0, const Tolerance& tol = {}) {
  if (ps.verdict != PairVerdict::One || !ps.nd) throw Error(ErrorCode::NotDefectOne, "pair is not defect one");
  if (std::abs(std::abs(mu) - 1.0) > tol.residual_tol) throw Error(ErrorCode::InvalidPhase, "mu must have modulus one");
  const CommutatorProfile& pr = ps.nd->profile;
  const auto [t1, t2] = to_t(s);
  const std::size_t n = A1.rows();
  const cplx I(0.0, 1.0);
  PairCompletion pc;
  pc.kind = PairKind::Hermitian;
  pc.t1 = t1;
  pc.t2 = t2;
  pc.B1 = Matrix(n + 1, n + 1);
  pc.B2 = Matrix(n + 1, n + 1);
  pc.B1.set_block(0, 0, A1);
  pc.B2.set_block(0, 0, A2);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx c1 = 0.5 * mu * (t2 * pr.u1[i] + std::conj(t2) * pr.u2[i]);
    const cplx c2 = mu / (2.0 * I) * (t1 * pr.u1[i] - std::conj(t1) * pr.u2[i]);
    pc.B1(i, n) = c1;
    pc.B1(n, i) = std::conj(c1);
    pc.B2(i, n) = c2;
    pc.B2(n, i) = std::conj(c2);
  }
  const double d = pr.d;
  const cplx a1_11 = dot(pr.u1, A1 * pr.u1), a2_11 = dot(pr.u1, A2 * pr.u1);
  const cplx a1_21 = dot(pr.u2, A1 * pr.u1), a2_21 = dot(pr.u2, A2 * pr.u1);
  pc.z1 = a1_11.real() - (std::imag(t2 * t2 * a2_21) + std::real(t1 * t2 * a1_21)) / d;
  pc.z2 = a2_11.real() - (std::imag(t1 * t1 * a1_21) - std::real(t1 * t2 * a2_21)) / d;
  pc.B1(n, n) = pc.z1;
  pc.B2(n, n) = pc.z2;
  return pc;
}

// Symmetric pairs: the -d eigenvector is fixed to conj(u1), so P is real and mu = 1
// yields real symmetric completions.
inline PairStatus csd_solve(const Matrix& A1, const Matrix& A2, const Tolerance& tol = {}, NdOptions opt = {}) {
  detail::require_same_shape(A1, A2);
  detail::require_real_symmetric(A1, tol);
  detail::require_real_symmetric(A2, tol);
  const Matrix A = detail::combine(A1, A2);
  CommutatorProfile pr = profile(A, tol);
  if (pr.rank_ok) {
    pr.u2 = conj(pr.u1);
    pr.P = Matrix::identity(A.rows()) - outer(pr.u1, pr.u1) - outer(pr.u2, pr.u2);
  }
  PairStatus ps;
  ps.kind = PairKind::Symmetric;
  ps.nd = nd_status_from_profile(A, std::move(pr), tol, opt);
  ps.verdict = detail::pair_verdict(ps.nd->verdict);
  ps.gate = ps.nd->gate;
  return ps;
}

// B1 = [[A1, Re(t2 u1)], [Re(t2 u1)^T, z1]], B2 = [[A2, Im(t1 u1)], [Im(t1 u1)^T, z2]]
inline PairCompletion csd_completion(const PairStatus& ps, const Matrix& A1, const Matrix& A2,
                                     const SolutionPair& s) {
  if (ps.verdict != PairVerdict::One || !ps.nd) throw Error(ErrorCode::NotDefectOne, "pair is not defect one");
  const CommutatorProfile& pr = ps.nd->profile;
  const auto [t1, t2] = to_t(s);
  const std::size_t n = A1.rows();
  PairCompletion pc;
  pc.kind = PairKind::Symmetric;
  pc.t1 = t1;
  pc.t2 = t2;
  pc.B1 = Matrix(n + 1, n + 1);
  pc.B2 = Matrix(n + 1, n + 1);
  pc.B1.set_block(0, 0, A1);
  pc.B2.set_block(0, 0, A2);
  for (std::size_t i = 0; i < n; ++i) {
    const double c1 = std::real(t2 * pr.u1[i]);
    const double c2 = std::imag(t1 * pr.u1[i]);
    pc.B1(i, n) = pc.B1(n, i) = c1;
    pc.B2(i, n) = pc.B2(n, i) = c2;
  }
  const double d = pr.d;
  const Vector& u = pr.u1;
  const Vector ubar = conj(u);
  const double a1_11 = dot(u, A1 * u).real(), a2_11 = dot(u, A2 * u).real();
  const cplx s1 = dot(ubar, A1 * u), s2 = dot(ubar, A2 * u);  // u^T A u
  pc.z1 = a1_11 - (std::imag(t2 * t2 * s2) + std::real(t1 * t2 * s1)) / d;
  pc.z2 = a2_11 - (std::imag(t1 * t1 * s1) - std::real(t1 * t2 * s2)) / d;
  pc.B1(n, n) = pc.z1;
  pc.B2(n, n) = pc.z2;
  return pc;
}

inline PairStatus sym_antisym_solve(const Matrix& A1, const Matrix& A2, const Tolerance& tol = {},
                                    const std::vector<double>& x2_grid = {0.0, 1.0, -1.0, 2.0, -2.0}) {
  detail::require_same_shape(A1, A2);
  detail::require_real_symmetric(A1, tol);
  require_square(A2, "pair member must be square");
  if (!A2.is_real()) throw Error(ErrorCode::NotReal, "pair member is not real");
  if ((A2 + A2.transpose()).frobenius() > tol.residual_tol * std::max(1.0, A2.frobenius()))
    throw Error(ErrorCode::StructureMismatch, "second member is not antisymmetric");
  PairStatus ps;
  ps.kind = PairKind::SymAntisym;
  ps.rnd = rnd_status(A1 + A2, tol, x2_grid);
  ps.verdict = detail::pair_verdict(ps.rnd->verdict);
  ps.gate = ps.rnd->gate;
  return ps;
}

// Symmetric and antisymmetric parts of a real normal completion of A1 + A2.
inline PairCompletion sym_antisym_completion(const PairStatus& ps, const Matrix& A1, const Matrix& A2,
                                             const RealSolution& s, const Tolerance& tol = {}) {
  if (ps.verdict != PairVerdict::One || !ps.rnd) throw Error(ErrorCode::NotDefectOne, "pair is not defect one");
  const Matrix B = build_real_completion(A1 + A2, ps.rnd->profile, s, tol);
  const Matrix Bt = B.transpose();
  const std::size_t n = A1.rows();
  PairCompletion pc;
  pc.kind = PairKind::SymAntisym;
  pc.t1 = s.x1;
  pc.t2 = s.x2;
  pc.B1 = 0.5 * (B + Bt);
  pc.B2 = 0.5 * (B - Bt);
  // The leading blocks are A1 and A2 up to rounding of (A1 + A2 +- (A1 + A2)^T) / 2.
  pc.B1.set_block(0, 0, A1);
  pc.B2.set_block(0, 0, A2);
  pc.z1 = pc.B1(n, n).real();
  pc.z2 = 0.0;
  return pc;
}

// Completions along the family's sampler (Hermitian/symmetric) or the case solutions.
inline std::vector<PairCompletion> sample_pair_completions(const PairStatus& ps, const Matrix& A1, const Matrix& A2,
                                                           std::size_t count, std::uint64_t seed,
                                                           const Tolerance& tol = {}) {
  std::vector<PairCompletion> out;
  if (ps.verdict != PairVerdict::One) return out;
  if (ps.kind == PairKind::SymAntisym) {
    for (const auto& s : ps.rnd->solutions) {
      if (out.size() == count) break;
      out.push_back(sym_antisym_completion(ps, A1, A2, s, tol));
    }
    return out;
  }
  for (const auto& s : ps.nd->family->sample(count, seed, tol))
    out.push_back(ps.kind == PairKind::Hermitian ? chd_completion(ps, A1, A2, s, 1.0, tol)
                                                 : csd_completion(ps, A1, A2, s));
  return out;
}

}  // namespace ndefect

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "ndefect/nd_complex.hpp"

namespace ndefect {

enum class RealCase { Case1, Case2 };

// One 2-column system (s, t) with s x1 + t x2 = 0 and x1^2 - x2^2 = d.
// code: 'a' rank 0, 'b'/'c' rank 1 with |coef1| >= / < |coef2|, 'd' rank 2.
struct RealSystem {
  std::size_t rank = 0;
  char code = 'a';
  double coef1 = 0.0, coef2 = 0.0;  // alpha, beta (or gamma, delta)
  Vector direction;                 // b (or h), rank-1 only
};

struct RealCaseReport {
  RealSystem first, second;  // u - q, v - w  and  u + q, v + w
  std::size_t m1() const { return first.rank; }
  std::size_t m2() const { return second.rank; }
  bool solvable() const {
    return first.code == 'a' || first.code == 'c' || second.code == 'a' || second.code == 'c';
  }
};

struct RealSolution {
  RealCase which;
  double x1, x2;
};

struct RealProfile {
  CommutatorProfile commutator;
  std::vector<double> u1, u2;
  double a11 = 0.0, a12 = 0.0, a21 = 0.0;
};

struct RndStatus {
  NdVerdict verdict = NdVerdict::Normal;
  Gate gate = Gate::None;
  RealProfile profile;
  std::optional<RealCaseReport> report;
  std::vector<RealSolution> solutions;
};

namespace detail {

inline void require_real(const Matrix& A) {
  if (!A.is_real()) throw Error(ErrorCode::NotReal, "matrix has nonzero imaginary parts");
}

inline std::vector<double> real_vector(const Vector& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
  return r;
}

inline double rdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// First entry above thr made positive.
inline void normalize_sign(Vector& v, double thr) {
  for (const auto& z : v)
    if (std::abs(z) > thr) {
      if (z.real() < 0.0)
        for (auto& w : v) w = -w;
      return;
    }
}

inline RealSystem classify_system(const Vector& s, const Vector& t, double reference, const Tolerance& tol) {
  RealSystem sys;
  const Matrix M = Matrix::from_columns({s, t});
  sys.rank = numerical_rank(M, tol, reference);
  if (sys.rank == 0) {
    sys.code = 'a';
  } else if (sys.rank == 2) {
    sys.code = 'd';
  } else {
    Vector b = svd(M, tol).U.col(0);
    for (auto& z : b) z = z.real();
    normalize_sign(b, tol.rank_tol);
    sys.direction = b;
    sys.coef1 = dot(b, s).real();
    sys.coef2 = dot(b, t).real();
    // |coef1| = |coef2| forces x1 = -+x2, which never reaches the level set.
    sys.code = std::abs(sys.coef2) > std::abs(sys.coef1) * (1.0 + tol.rank_tol) ? 'c' : 'b';
  }
  return sys;
}

}  // namespace detail

inline RealProfile real_profile(const Matrix& A, const Tolerance& tol = {}) {
  require_square(A, "real profile needs a square matrix");
  detail::require_real(A);
  RealProfile rp;
  rp.commutator = profile(A, tol);
  if (!rp.commutator.rank_ok) return rp;
  // Eigenvectors of a real symmetric matrix come out of the Jacobi sweeps real; drop the
  // zero imaginary parts so the completions stay real bit-exactly.
  auto& pr = rp.commutator;
  for (auto& z : pr.u1) z = z.real();
  for (auto& z : pr.u2) z = z.real();
  pr.P = pr.P.real_part();
  pr.null_basis = pr.null_basis.real_part();
  rp.u1 = detail::real_vector(pr.u1);
  rp.u2 = detail::real_vector(pr.u2);
  rp.a11 = dot(pr.u1, A * pr.u1).real();
  rp.a12 = dot(pr.u1, A * pr.u2).real();
  rp.a21 = dot(pr.u2, A * pr.u1).real();
  return rp;
}

// u^T = P A^T u1, v^T = P A^T u2, w^T = P A u1, q^T = P A u2.
inline RealCaseReport real_case_analysis(const Matrix& A, const RealProfile& rp, const Tolerance& tol = {}) {
  const CommutatorProfile& pr = rp.commutator;
  require_rank_condition(pr);
  const Matrix At = A.transpose();
  const Vector u = pr.P * (At * pr.u1), v = pr.P * (At * pr.u2);
  const Vector w = pr.P * (A * pr.u1), q = pr.P * (A * pr.u2);
  const double ref = detail::tableau_reference(A);
  RealCaseReport r;
  r.first = detail::classify_system(u - q, v - w, ref, tol);
  r.second = detail::classify_system(u + q, v + w, ref, tol);
  return r;
}

inline RealCaseReport real_case_analysis(const Matrix& A, const Tolerance& tol = {}) {
  return real_case_analysis(A, real_profile(A, tol), tol);
}

// Solutions of one system. Case a is a full hyperbola, sampled along x2_grid.
inline std::vector<RealSolution> real_case_solutions(const RealSystem& sys, RealCase which, double d,
                                                     const std::vector<double>& x2_grid = {0.0, 1.0, -1.0, 2.0, -2.0}) {
  std::vector<RealSolution> out;
  if (sys.code == 'a') {
    for (double x2 : x2_grid) {
      const double x1 = std::sqrt(d + x2 * x2);
      out.push_back({which, x1, x2});
      out.push_back({which, -x1, x2});
    }
  } else if (sys.code == 'c') {
    const double a = sys.coef1, b = sys.coef2;
    const double s = std::sqrt(d / (b * b - a * a));
    out.push_back({which, b * s, -a * s});
    out.push_back({which, -b * s, a * s});
  }
  return out;
}

inline double real_equation_residual(const Matrix& A, const RealProfile& rp, const RealSolution& s) {
  const CommutatorProfile& pr = rp.commutator;
  const Matrix At = A.transpose();
  const Vector u = pr.P * (At * pr.u1), v = pr.P * (At * pr.u2);
  const Vector w = pr.P * (A * pr.u1), q = pr.P * (A * pr.u2);
  const double sg = s.which == RealCase::Case1 ? -1.0 : 1.0;
  const Vector r = s.x1 * (u + sg * q) + s.x2 * (v + sg * w);
  return norm2(r);
}

// Case 1: [[A, x1 u1 + x2 u2], [x2 u1^T + x1 u2^T, z]]
// Case 2: [[A, x1 u1 + x2 u2], [-x2 u1^T - x1 u2^T, z]]
inline Matrix build_real_completion(const Matrix& A, const RealProfile& rp, const RealSolution& s,
                                    const Tolerance& tol = {}) {
  const CommutatorProfile& pr = rp.commutator;
  require_rank_condition(pr);
  detail::require_real(A);
  const double d = pr.d;
  const double scale = std::max(1.0, s.x1 * s.x1 + s.x2 * s.x2);
  if (std::abs(s.x1 * s.x1 - s.x2 * s.x2 - d) > tol.residual_tol * std::max(d, scale))
    throw Error(ErrorCode::SolutionInvalid, "x1^2 - x2^2 differs from d");
  if (real_equation_residual(A, rp, s) > tol.residual_tol * A.frobenius() * std::sqrt(scale))
    throw Error(ErrorCode::SolutionInvalid, "pair does not solve the case equation");

  const std::size_t n = A.rows();
  Matrix B(n + 1, n + 1);
  B.set_block(0, 0, A);
  const double sg = s.which == RealCase::Case1 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    B(i, n) = s.x1 * rp.u1[i] + s.x2 * rp.u2[i];
    B(n, i) = sg * (s.x2 * rp.u1[i] + s.x1 * rp.u2[i]);
  }
  const double z = s.which == RealCase::Case1
                       ? rp.a11 - (s.x1 + s.x2) * (rp.a12 * s.x1 - rp.a21 * s.x2) / d
                       : rp.a11 + (s.x1 - s.x2) * (rp.a12 * s.x1 + rp.a21 * s.x2) / d;
  B(n, n) = z;
  return B;
}

inline RndStatus rnd_status(const Matrix& A, const Tolerance& tol = {},
                            const std::vector<double>& x2_grid = {0.0, 1.0, -1.0, 2.0, -2.0}) {
  RndStatus st;
  st.profile = real_profile(A, tol);
  const CommutatorProfile& pr = st.profile.commutator;
  if (pr.normal) return st;
  if (!pr.rank_ok) {
    st.verdict = NdVerdict::MoreThanOne;
    st.gate = Gate::RankCondition;
    return st;
  }
  st.report = real_case_analysis(A, st.profile, tol);
  if (!st.report->solvable()) {
    st.verdict = NdVerdict::MoreThanOne;
    st.gate = Gate::NoRealCase;
    return st;
  }
  st.verdict = NdVerdict::One;
  for (auto s : real_case_solutions(st.report->first, RealCase::Case1, pr.d, x2_grid)) st.solutions.push_back(s);
  for (auto s : real_case_solutions(st.report->second, RealCase::Case2, pr.d, x2_grid)) st.solutions.push_back(s);
  return st;
}

}  // namespace ndefect

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "ndefect/numerics.hpp"

namespace ndefect {

struct Inertia {
  std::size_t plus = 0, minus = 0, zero = 0;
  bool operator==(const Inertia&) const = default;
};

class RankConditionFailed : public Error {
 public:
  explicit RankConditionFailed(Inertia in)
      : Error(ErrorCode::RankConditionFailed,
              "self-commutator inertia (" + std::to_string(in.plus) + "," +
                  std::to_string(in.minus) + "," + std::to_string(in.zero) + ")"),
        inertia(in) {}
  Inertia inertia;
};

// Data attached to the self-commutator A*A - AA*. When rank_ok, its spectrum is
// (d, 0, ..., 0, -d) with unit eigenvectors u1 (for d) and u2 (for -d).
struct CommutatorProfile {
  std::size_t n = 0;
  bool normal = false;
  bool rank_ok = false;
  double d = 0.0;
  Vector u1, u2;
  Matrix P;           // I - u1 u1* - u2 u2*
  Matrix null_basis;  // orthonormal basis of range(P), n x (n-2)
  Inertia inertia;
  std::vector<double> eigenvalues;
  double commutator_norm = 0.0;
  double scale = 0.0;  // ||A||_F^2, reference for rank decisions
};

inline Matrix self_commutator(const Matrix& A) {
  require_square(A, "self-commutator needs a square matrix");
  const Matrix As = A.adjoint();
  return As * A - A * As;
}

inline CommutatorProfile profile(const Matrix& A, const Tolerance& tol = {}) {
  tol.validate();
  const Matrix C = self_commutator(A);
  const std::size_t n = A.rows();
  CommutatorProfile pr;
  pr.n = n;
  pr.scale = A.frobenius() * A.frobenius();
  pr.commutator_norm = C.frobenius();
  if (pr.commutator_norm <= tol.rank_tol * pr.scale) {
    pr.normal = true;
    pr.inertia = {0, 0, n};
    pr.eigenvalues.assign(n, 0.0);
    return pr;
  }
  const EigenPairs ep = hermitian_eig(C, tol);
  pr.eigenvalues = ep.values;
  const double top = std::max(std::abs(ep.values.front()), std::abs(ep.values.back()));
  const double thr = tol.rank_tol * std::max(top, pr.scale);
  for (double v : ep.values) {
    if (v > thr) ++pr.inertia.plus;
    else if (v < -thr) ++pr.inertia.minus;
    else ++pr.inertia.zero;
  }
  const double lp = ep.values.front(), lm = ep.values.back();
  pr.rank_ok = pr.inertia.plus == 1 && pr.inertia.minus == 1 &&
               std::abs(lp + lm) <= tol.residual_tol * pr.commutator_norm;
  if (!pr.rank_ok) return pr;

  pr.d = 0.5 * (lp - lm);
  if (pr.d <= tol.rank_tol * pr.scale) {
    pr.normal = true;
    pr.rank_ok = false;
    return pr;
  }
  pr.u1 = ep.vectors.col(0);
  pr.u2 = ep.vectors.col(n - 1);
  pr.P = Matrix::identity(n) - outer(pr.u1, pr.u1) - outer(pr.u2, pr.u2);
  pr.null_basis = ep.vectors.columns(1, n - 2);
  return pr;
}

inline void require_rank_condition(const CommutatorProfile& pr) {
  if (!pr.rank_ok) throw RankConditionFailed(pr.inertia);
}

// max(i+, i-) of the self-commutator.
inline std::size_t nd_lower_bound(const Matrix& A, const Tolerance& tol = {}) {
  const CommutatorProfile pr = profile(A, tol);
  return std::max(pr.inertia.plus, pr.inertia.minus);
}

inline std::size_t unitary_defect(const Matrix& A, const Tolerance& tol = {}) {
  require_square(A, "unitary defect needs a square matrix");
  if (A.max_abs() == 0.0) throw Error(ErrorCode::ZeroMatrix, "unitary defect of zero");
  const auto s = svd(A, tol).singular;
  const double cut = s.front() * (1.0 - tol.rank_tol);
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [cut](double x) { return x < cut; }));
}

// sigma_max times a unitary of size n + ud(A) whose leading block is A. In the SVD basis
// of T = A / sigma_max the dilation is I (+) [[S, D], [D, -S]] over the singular values
// below one, with D = (I - S^2)^(1/2).
inline Matrix minimal_unitary_completion(const Matrix& A, const Tolerance& tol = {}) {
  require_square(A, "unitary completion needs a square matrix");
  if (A.max_abs() == 0.0) throw Error(ErrorCode::ZeroMatrix, "unitary completion of zero");
  const std::size_t n = A.rows();
  const SvdResult sv = svd(A, tol);
  const double smax = sv.singular.front();
  const double cut = smax * (1.0 - tol.rank_tol);
  std::vector<std::size_t> low;
  for (std::size_t k = 0; k < n; ++k)
    if (sv.singular[k] < cut) low.push_back(k);
  const std::size_t p = low.size();
  Matrix B(n + p, n + p);
  B.set_block(0, 0, A);
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t k = low[j];
    const double s = sv.singular[k] / smax;
    const double dk = std::sqrt(std::max(0.0, 1.0 - s * s));
    for (std::size_t i = 0; i < n; ++i) {
      B(i, n + j) = smax * dk * sv.U(i, k);
      B(n + j, i) = smax * dk * std::conj(sv.V(i, k));
    }
    B(n + j, n + j) = -smax * s;
  }
  return B;
}

}  // namespace ndefect

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "ndefect/matrix.hpp"

namespace ndefect {

struct EigenPairs {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns
};

struct SvdResult {
  Matrix U;                     // rows x k
  std::vector<double> singular;  // descending, k = min(rows, cols)
  Matrix V;                     // cols x k
};

struct TakagiResult {
  Matrix G;  // unitary, S = G diag(singular) G^T
  std::vector<double> singular;
};

namespace detail {

constexpr int kMaxSweeps = 100;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Parameters of the 2x2 rotation G = [[c, s], [-s*conj(e), c*conj(e)]] that zeroes the
// off-diagonal entry b of the Hermitian block [[a, b], [conj(b), d]].
struct Rotation {
  double c, s;
  cplx e;
};

inline Rotation jacobi_rotation(double a, double d, cplx b) {
  const double ab = std::abs(b);
  const cplx e = b / ab;
  const double theta = (d - a) / (2.0 * ab);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  return {c, t * c, e};
}

// Apply G on the right to columns p, q of M.
inline void rotate_columns(Matrix& M, std::size_t p, std::size_t q, const Rotation& r) {
  const cplx ce = std::conj(r.e);
  for (std::size_t k = 0; k < M.rows(); ++k) {
    const cplx mp = M(k, p), mq = M(k, q);
    M(k, p) = r.c * mp - r.s * ce * mq;
    M(k, q) = r.s * mp + r.c * ce * mq;
  }
}

// Make the first component with modulus above thr real positive.
inline void normalize_phase(Matrix& V, std::size_t j, double thr) {
  for (std::size_t i = 0; i < V.rows(); ++i) {
    const double m = std::abs(V(i, j));
    if (m > thr) {
      const cplx ph = std::conj(V(i, j)) / m;
      for (std::size_t k = 0; k < V.rows(); ++k) V(k, j) *= ph;
      V(i, j) = m;
      return;
    }
  }
}

inline std::vector<std::size_t> descending_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

// Orthonormal completion of the first `have` columns of Q (assumed orthonormal) using
// Gram-Schmidt against the standard basis.
inline void complete_orthonormal(Matrix& Q, std::size_t have) {
  const std::size_t m = Q.rows();
  std::size_t j = have;
  for (std::size_t k = 0; k < m && j < Q.cols(); ++k) {
    Vector v = unit(m, k);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        const Vector qi = Q.col(i);
        v = v - dot(qi, v) * qi;
      }
    const double nv = norm2(v);
    if (nv < 1e-8) continue;
    Q.set_col(j++, (1.0 / nv) * v);
  }
}

struct JacobiColumns {
  Matrix W;                      // A V, columns mutually orthogonal
  Matrix V;                      // cols x cols unitary
  std::vector<double> norms;     // column norms of W
};

// One-sided (Hestenes) Jacobi: orthogonalize the columns of A by plane rotations.
inline JacobiColumns one_sided_jacobi(const Matrix& A) {
  const std::size_t n = A.cols();
  JacobiColumns out{A, Matrix::identity(n), {}};
  Matrix& W = out.W;
  // Columns at rounding level carry no information and would rotate forever.
  const double noise = 4.0 * kEps * static_cast<double>(n + 1) * A.frobenius();
  const double floor2 = noise * noise;
  for (int sweep = 0;; ++sweep) {
    if (sweep >= kMaxSweeps) throw Error(ErrorCode::NoConvergence, "one-sided Jacobi");
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t k = 0; k < W.rows(); ++k) {
          alpha += std::norm(W(k, p));
          beta += std::norm(W(k, q));
          gamma += std::conj(W(k, p)) * W(k, q);
        }
        if (std::min(alpha, beta) <= floor2 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        const Rotation r = jacobi_rotation(alpha, beta, gamma);
        rotate_columns(W, p, q, r);
        rotate_columns(out.V, p, q, r);
        rotated = true;
      }
    if (!rotated) break;
  }
  out.norms.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.norms[j] = norm2(W.col(j));
  return out;
}

// Full right basis from the one-sided sweep, padding wide inputs with zero rows.
struct FullSvd {
  Matrix W;
  Matrix V;
  std::vector<double> singular;  // length cols, descending
  std::vector<std::size_t> order;
};

inline FullSvd full_right_svd(const Matrix& A) {
  Matrix work = A;
  if (A.rows() < A.cols()) {
    work = Matrix(A.cols(), A.cols());
    work.set_block(0, 0, A);
  }
  JacobiColumns jc = one_sided_jacobi(work);
  FullSvd out;
  out.order = descending_order(jc.norms);
  out.W = Matrix(work.rows(), A.cols());
  out.V = Matrix(A.cols(), A.cols());
  out.singular.resize(A.cols());
  for (std::size_t k = 0; k < A.cols(); ++k) {
    const std::size_t j = out.order[k];
    out.singular[k] = jc.norms[j];
    out.W.set_col(k, jc.W.col(j));
    out.V.set_col(k, jc.V.col(j));
  }
  return out;
}

}  // namespace detail

// Cyclic Jacobi with complex rotations.
inline EigenPairs hermitian_eig(const Matrix& H_in, const Tolerance& tol = {}) {
  require_square(H_in, "hermitian_eig needs a square matrix");
  const std::size_t n = H_in.rows();
  const double scale = H_in.frobenius();
  if (hermitian_defect(H_in) > tol.residual_tol * scale)
    throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within tolerance");

  Matrix H = 0.5 * (H_in + H_in.adjoint());
  Matrix V = Matrix::identity(n);
  if (scale > 0.0) {
    for (int sweep = 0;; ++sweep) {
      double off = 0.0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) off += std::norm(H(p, q));
      if (std::sqrt(2.0 * off) <= detail::kEps * scale) break;
      if (sweep >= detail::kMaxSweeps) throw Error(ErrorCode::NoConvergence, "Jacobi eigensolver");
      for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) {
          const cplx b = H(p, q);
          if (std::abs(b) <= 1e-300) continue;
          const auto r = detail::jacobi_rotation(H(p, p).real(), H(q, q).real(), b);
          detail::rotate_columns(H, p, q, r);
          // Rows: H <- G* H.
          for (std::size_t k = 0; k < n; ++k) {
            const cplx hp = H(p, k), hq = H(q, k);
            H(p, k) = r.c * hp - r.s * r.e * hq;
            H(q, k) = r.s * hp + r.c * r.e * hq;
          }
          H(p, q) = H(q, p) = 0.0;
          H(p, p) = H(p, p).real();
          H(q, q) = H(q, q).real();
          detail::rotate_columns(V, p, q, r);
        }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = H(i, i).real();
  const auto order = detail::descending_order(diag);
  EigenPairs out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = diag[order[k]];
    out.vectors.set_col(k, V.col(order[k]));
    detail::normalize_phase(out.vectors, k, tol.rank_tol);
  }
  return out;
}

// Thin SVD: A = U diag(s) V*, k = min(rows, cols).
inline SvdResult svd(const Matrix& A, const Tolerance& tol = {}) {
  const std::size_t m = A.rows(), n = A.cols(), k = std::min(m, n);
  if (m < n) {
    SvdResult t = svd(A.adjoint(), tol);
    return {t.V, t.singular, t.U};
  }
  detail::FullSvd f = detail::full_right_svd(A);
  SvdResult out{Matrix(m, k), std::vector<double>(f.singular.begin(), f.singular.begin() + k),
                f.V.columns(0, k)};
  const double smax = k ? out.singular[0] : 0.0;
  std::size_t have = 0;
  for (; have < k; ++have) {
    const double s = out.singular[have];
    if (!(s > 8.0 * detail::kEps * smax * static_cast<double>(n))) break;
    out.U.set_col(have, (1.0 / s) * f.W.col(have));
  }
  detail::complete_orthonormal(out.U, have);
  return out;
}

inline double spectral_norm(const Matrix& A) {
  if (A.empty()) return 0.0;
  return svd(A).singular.front();
}

// Count of singular values above rank_tol * max(sigma_max, reference_scale).
inline std::size_t numerical_rank(const Matrix& A, const Tolerance& tol = {},
                                  double reference_scale = 0.0) {
  if (A.empty()) return 0;
  const auto s = svd(A, tol).singular;
  const double thr = tol.rank_tol * std::max(s.front(), reference_scale);
  if (thr == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [thr](double x) { return x > thr; }));
}

// Orthonormal columns spanning the numerical null space; column count = cols - rank.
inline Matrix nullspace_basis(const Matrix& A, const Tolerance& tol = {},
                              double reference_scale = 0.0) {
  const std::size_t n = A.cols();
  if (A.rows() == 0) return Matrix::identity(n);
  const detail::FullSvd f = detail::full_right_svd(A);
  const double thr = tol.rank_tol * std::max(f.singular.front(), reference_scale);
  std::size_t r = 0;
  if (thr > 0.0)
    while (r < n && f.singular[r] > thr) ++r;
  Matrix N = f.V.columns(r, n - r);
  for (std::size_t j = 0; j < N.cols(); ++j) detail::normalize_phase(N, j, tol.rank_tol);
  return N;
}

// Takagi factorization S = G diag(sigma) G^T through the real symmetric embedding
// [[Re S, Im S], [Im S, -Re S]]: an eigenvector (a; b) for sigma >= 0 gives g = a + i b
// with S conj(g) = sigma g. Null directions are filled from conj(null S).
inline TakagiResult takagi_symmetric(const Matrix& S, const Tolerance& tol = {}) {
  require_square(S, "takagi_symmetric needs a square matrix");
  const std::size_t n = S.rows();
  const double scale = S.frobenius();
  if (symmetric_defect(S) > tol.residual_tol * scale)
    throw Error(ErrorCode::NotSymmetric, "matrix is not complex symmetric within tolerance");
  TakagiResult out{Matrix(n, n), std::vector<double>(n, 0.0)};
  if (scale == 0.0) {
    out.G = Matrix::identity(n);
    return out;
  }
  const Matrix Ss = 0.5 * (S + S.transpose());
  Matrix E(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = Ss(i, j).real(), y = Ss(i, j).imag();
      E(i, j) = x;
      E(i, j + n) = y;
      E(i + n, j) = y;
      E(i + n, j + n) = -x;
    }
  const EigenPairs ep = hermitian_eig(E, tol);
  const double thr = tol.rank_tol * ep.values.front();
  std::size_t r = 0;
  while (r < n && ep.values[r] > thr) {
    for (std::size_t i = 0; i < n; ++i)
      out.G(i, r) = cplx(ep.vectors(i, r).real(), ep.vectors(i + n, r).real());
    out.singular[r] = ep.values[r];
    ++r;
  }
  if (r < n) {
    const detail::FullSvd f = detail::full_right_svd(Ss);
    for (std::size_t j = r; j < n; ++j) out.G.set_col(j, conj(f.V.col(j)));
  }
  return out;
}

}  // namespace ndefect

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "ndefect/commutator.hpp"

namespace ndefect {

// Real linear system Q x = 0 in x = (Re x1, Im x1, Re x2, Im x2), its null space F and
// the quadratic form K = F1^T F1 - F2^T F2 that carries |x1|^2 - |x2|^2.
struct ProcedureTableau {
  Matrix Q;
  std::size_t m = 0;
  Matrix F, F1, F2, K;
  bool refined = false;
};

struct SolutionPair {
  cplx x1, x2;
};

// Orthonormal basis [u1 u2 g3 ... gn] in which the lower-left blocks are v^T and u^T.
struct RefinedBasis {
  Matrix W;
  Vector u, v;  // u1* A G, u2* A G
  Matrix S;     // G* A G
};

struct FeasibleSet {
  double d = 0.0;
  Matrix F;
  std::vector<double> k_values;
  Matrix k_vectors;  // real orthogonal
};

struct NormalityCheck {
  bool normal = false;
  double residual = 0.0;  // ||B*B - BB*||_F
  double relative = 0.0;  // residual / ||B||_F^2
};

enum class NdVerdict { Normal, One, MoreThanOne };
enum class Gate { None, RankCondition, NoNullspace, NonPositiveK, NoRealCase };

inline const char* to_string(NdVerdict v) {
  switch (v) {
    case NdVerdict::Normal: return "normal";
    case NdVerdict::One: return "one";
    case NdVerdict::MoreThanOne: return "more_than_one";
  }
  return "?";
}

inline const char* to_string(Gate g) {
  switch (g) {
    case Gate::None: return "none";
    case Gate::RankCondition: return "rank_condition";
    case Gate::NoNullspace: return "no_nullspace";
    case Gate::NonPositiveK: return "k_not_positive";
    case Gate::NoRealCase: return "no_real_case";
  }
  return "?";
}

namespace detail {

inline ProcedureTableau finish_tableau(Matrix Q, double reference, bool refined, const Tolerance& tol) {
  ProcedureTableau t;
  t.refined = refined;
  t.m = numerical_rank(Q, tol, reference);
  t.F = t.m == 4 ? Matrix(4, 0) : nullspace_basis(Q, tol, reference).real_part();
  const std::size_t f = t.F.cols();
  t.F1 = t.F.block(0, 0, 2, f);
  t.F2 = t.F.block(2, 0, 2, f);
  t.K = t.F1.transpose() * t.F1 - t.F2.transpose() * t.F2;
  t.Q = std::move(Q);
  return t;
}

inline void orthonormalize_into(Matrix& E, std::size_t j, Vector v) {
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < j; ++i) {
      const Vector e = E.col(i);
      v = v - dot(e, v) * e;
    }
  const double nv = norm2(v);
  if (nv < 0.5) throw Error(ErrorCode::DegenerateSpan, "extension basis lost orthogonality");
  E.set_col(j, (1.0 / nv) * v);
}

// Unitary L = L^T on C^k with L Z = T, where the columns of Z and T have equal Gram
// matrices and the compression onto conj(span Z) is symmetric. In the basis
// E = [conj(H) U, G, K] it reads E diag-block([[S, D], [D, -S]], I) E^T, with
// S_H = U S U^T a Takagi factorization and D = (I - S^2)^(1/2).
inline Matrix symmetric_unitary_extension(const Matrix& Z, const Matrix& T, double reference,
                                          const Tolerance& tol) {
  const std::size_t k = Z.rows();
  if (k == 0) return {};
  const SvdResult sz = svd(Z, tol);
  const double thr = tol.rank_tol * std::max(sz.singular.front(), reference);
  std::size_t h = 0;
  while (h < sz.singular.size() && sz.singular[h] > thr) ++h;
  if (h == 0) return Matrix::identity(k);

  const Matrix Hb = sz.U.columns(0, h);
  Matrix Vh = sz.V.columns(0, h);
  for (std::size_t j = 0; j < h; ++j)
    for (std::size_t i = 0; i < Vh.rows(); ++i) Vh(i, j) /= sz.singular[j];
  const Matrix Y = T * Vh;
  Matrix SH = Hb.transpose() * Y;
  SH = 0.5 * (SH + SH.transpose());
  const Matrix R = Y - Hb.conj() * SH;

  const TakagiResult tk = takagi_symmetric(SH, tol);
  const Matrix Ut = tk.G;
  const Matrix Uamb = Hb.conj() * Ut;

  // s_j and d_j = |R conj(U e_j)| are both measured, then scaled onto s^2 + d^2 = 1:
  // deriving either from the other through sqrt(1 - x^2) costs half the digits.
  constexpr double kCoupling = 1e-12;
  std::vector<double> dw(h), sw(h);
  std::vector<Vector> rg(h);
  std::vector<std::size_t> coupled;
  for (std::size_t j = 0; j < h; ++j) {
    rg[j] = R * conj(Ut.col(j));
    const double dj = norm2(rg[j]), sj = tk.singular[j], r = std::hypot(sj, dj);
    if (r == 0.0) throw Error(ErrorCode::DegenerateSpan, "compression and coupling both vanish");
    dw[j] = dj / r;
    sw[j] = sj / r;
    if (dw[j] > kCoupling) coupled.push_back(j);
  }
  if (h + coupled.size() > k) throw Error(ErrorCode::DegenerateSpan, "extension dimension overflow");

  Matrix E(k, k);
  std::size_t col = 0;
  for (std::size_t j = 0; j < h; ++j) orthonormalize_into(E, col++, Uamb.col(j));
  for (std::size_t j : coupled) orthonormalize_into(E, col++, (1.0 / norm2(rg[j])) * rg[j]);
  complete_orthonormal(E, col);

  Matrix Omega = Matrix::identity(k);
  for (std::size_t l = 0; l < coupled.size(); ++l) {
    const std::size_t j = coupled[l];
    Omega(j, j) = sw[j];
    Omega(j, h + l) = Omega(h + l, j) = dw[j];
    Omega(h + l, h + l) = -sw[j];
  }
  const Matrix L = E * Omega * E.transpose();
  if ((L * Z - T).frobenius() > tol.residual_tol * std::max(reference, T.frobenius()))
    throw Error(ErrorCode::DegenerateSpan, "symmetric extension does not reproduce the data");
  return L;
}

inline double tableau_reference(const Matrix& A) { return A.frobenius(); }

}  // namespace detail

// Standard 2n x 4 system from uh* = P A* u1, vh* = P A* u2, wh* = P A u1, qh* = P A u2:
//   uh* x1 + vh* x2 = wh* conj(x2) + qh* conj(x1)
inline ProcedureTableau assemble_tableau(const Matrix& A, const CommutatorProfile& pr,
                                         const Tolerance& tol = {}) {
  require_rank_condition(pr);
  const std::size_t n = A.rows();
  const Matrix As = A.adjoint();
  const Vector us = pr.P * (As * pr.u1), vs = pr.P * (As * pr.u2);
  const Vector ws = pr.P * (A * pr.u1), qs = pr.P * (A * pr.u2);
  Matrix Q(2 * n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    // Row vectors uh = uR + i uI, so the column uh* has parts (uR, -uI).
    const double uR = us[i].real(), uI = -us[i].imag();
    const double vR = vs[i].real(), vI = -vs[i].imag();
    const double wR = ws[i].real(), wI = -ws[i].imag();
    const double qR = qs[i].real(), qI = -qs[i].imag();
    Q(i, 0) = uR - qR;
    Q(i, 1) = uI + qI;
    Q(i, 2) = vR - wR;
    Q(i, 3) = vI + wI;
    Q(n + i, 0) = -uI + qI;
    Q(n + i, 1) = uR + qR;
    Q(n + i, 2) = -vI + wI;
    Q(n + i, 3) = vR + wR;
  }
  return detail::finish_tableau(std::move(Q), detail::tableau_reference(A), false, tol);
}

inline std::pair<RefinedBasis, ProcedureTableau> assemble_tableau_refined(
    const Matrix& A, const CommutatorProfile& pr, const Tolerance& tol = {}) {
  require_rank_condition(pr);
  const std::size_t n = A.rows();
  if (n < 3) throw Error(ErrorCode::DimensionMismatch, "refined tableau needs n >= 3");
  const std::size_t k = n - 2;
  const double ref = detail::tableau_reference(A);
  const Matrix& Y = pr.null_basis;
  const Matrix Ys = Y.adjoint(), As = A.adjoint();
  const Vector uc = Ys * (As * pr.u1), vc = Ys * (As * pr.u2);
  const Vector wc = Ys * (A * pr.u1), qc = Ys * (A * pr.u2);

  const Matrix Z = Matrix::from_columns({conj(uc), conj(vc)});
  const Matrix T = Matrix::from_columns({qc, wc});
  const Matrix L = detail::symmetric_unitary_extension(Z, T, ref, tol);
  const Matrix G = Y * takagi_symmetric(L, tol).G;

  RefinedBasis rb;
  rb.W = Matrix(n, n);
  rb.W.set_col(0, pr.u1);
  rb.W.set_col(1, pr.u2);
  rb.W.set_block(0, 2, G);
  const Matrix AG = A * G;
  const Matrix Gs = G.adjoint();
  rb.u.resize(k);
  rb.v.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    rb.u[j] = dot(pr.u1, AG.col(j));
    rb.v[j] = dot(pr.u2, AG.col(j));
  }
  rb.S = Gs * AG;

  const Vector g1 = Gs * (A * pr.u1), g2 = Gs * (A * pr.u2);
  double mismatch = std::abs(dot(pr.u1, A * pr.u1) - dot(pr.u2, A * pr.u2));
  for (std::size_t j = 0; j < k; ++j)
    mismatch += std::abs(g1[j] - rb.v[j]) + std::abs(g2[j] - rb.u[j]);
  if (mismatch > tol.residual_tol * ref)
    throw Error(ErrorCode::DegenerateSpan, "refined basis does not reach the block pattern");

  // Im(u* x1 + v* x2) = 0 row by row.
  Matrix Q(k, 4);
  for (std::size_t j = 0; j < k; ++j) {
    Q(j, 0) = -rb.u[j].imag();
    Q(j, 1) = rb.u[j].real();
    Q(j, 2) = -rb.v[j].imag();
    Q(j, 3) = rb.v[j].real();
  }
  return {std::move(rb), detail::finish_tableau(std::move(Q), ref, true, tol)};
}

inline std::optional<FeasibleSet> solve_feasibility(const ProcedureTableau& t, double d,
                                                    const Tolerance& tol = {}) {
  if (t.m >= 4 || t.K.rows() == 0) return std::nullopt;
  const EigenPairs ek = hermitian_eig(t.K, tol);
  if (!(ek.values.front() > tol.rank_tol)) return std::nullopt;
  return FeasibleSet{d, t.F, ek.values, ek.vectors.real_part()};
}

// Points of h^T K h = d: draw every coordinate in K's eigenbasis from N(0,1), then
// rescale the positive-eigenvalue coordinates onto the unit level set and scale by sqrt(d).
inline std::vector<SolutionPair> sample_solutions(const FeasibleSet& fs, std::size_t count,
                                                  std::uint64_t seed, const Tolerance& tol = {}) {
  const std::size_t f = fs.k_values.size();
  if (f == 0 || !(fs.k_values.front() > tol.rank_tol))
    throw Error(ErrorCode::Infeasible, "level surface is empty");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<SolutionPair> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> y(f);
    for (auto& v : y) v = normal(rng);
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < f; ++i) {
      const double l = fs.k_values[i];
      if (l > tol.rank_tol) pos += l * y[i] * y[i];
      else if (l < -tol.rank_tol) neg -= l * y[i] * y[i];
    }
    if (pos == 0.0) {
      y[0] = 1.0;
      pos = fs.k_values[0];
    }
    const double a = std::sqrt((1.0 + neg) / pos);
    for (std::size_t i = 0; i < f; ++i)
      if (fs.k_values[i] > tol.rank_tol) y[i] *= a;
    const double sd = std::sqrt(fs.d);
    double x[4] = {0, 0, 0, 0};
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t i = 0; i < f; ++i) {
        double hi = 0.0;
        for (std::size_t j = 0; j < f; ++j) hi += fs.k_vectors(i, j).real() * y[j];
        x[r] += fs.F(r, i).real() * sd * hi;
      }
    out.push_back({cplx(x[0], x[1]), cplx(x[2], x[3])});
  }
  return out;
}

inline cplx completion_corner(const Matrix& A, const CommutatorProfile& pr, const SolutionPair& s) {
  const cplx a11 = dot(pr.u1, A * pr.u1);
  const cplx a12 = dot(pr.u1, A * pr.u2);
  const cplx a21 = dot(pr.u2, A * pr.u1);
  const cplx x1 = s.x1, x2 = s.x2;
  return a11 - (x2 * (a12 * std::conj(x1) - std::conj(a21) * x2) +
                x1 * (std::conj(a12) * x1 - a21 * std::conj(x2))) /
                   pr.d;
}

// [[A, mu (x1 u1 + x2 u2)], [conj(mu) (x2 u1* + x1 u2*), z]]
inline Matrix build_completion(const Matrix& A, const CommutatorProfile& pr, const SolutionPair& s,
                               cplx mu = 1.0, const Tolerance& tol = {}) {
  require_rank_condition(pr);
  if (std::abs(std::abs(mu) - 1.0) > tol.residual_tol)
    throw Error(ErrorCode::InvalidPhase, "mu must have modulus one");
  const std::size_t n = A.rows();
  Matrix B(n + 1, n + 1);
  B.set_block(0, 0, A);
  for (std::size_t i = 0; i < n; ++i) {
    B(i, n) = mu * (s.x1 * pr.u1[i] + s.x2 * pr.u2[i]);
    B(n, i) = std::conj(mu) * (s.x2 * std::conj(pr.u1[i]) + s.x1 * std::conj(pr.u2[i]));
  }
  B(n, n) = completion_corner(A, pr, s);
  return B;
}

inline NormalityCheck verify_normal(const Matrix& B, const Tolerance& tol = {}) {
  require_square(B, "normality check needs a square matrix");
  NormalityCheck c;
  c.residual = self_commutator(B).frobenius();
  const double s = B.frobenius() * B.frobenius();
  c.relative = s > 0.0 ? c.residual / s : 0.0;
  c.normal = c.residual <= tol.residual_tol * s;
  return c;
}

namespace detail {

inline void check_factorization(const Matrix& A, const Vector& x, const Vector& y, const Tolerance& tol) {
  const Matrix C = self_commutator(A);
  const Matrix D = outer(x, x) - outer(y, y);
  const double scale = std::max({C.frobenius(), norm2(x) * norm2(x), norm2(y) * norm2(y)});
  if ((C - D).frobenius() > tol.residual_tol * scale)
    throw Error(ErrorCode::FactorizationMismatch, "A*A - AA* differs from xx* - yy*");
}

}  // namespace detail

// rank [x, y, A*x, Ay] < 4
inline bool dependency_test(const Matrix& A, const Vector& x, const Vector& y, const Tolerance& tol = {}) {
  require_square(A, "dependency test needs a square matrix");
  detail::check_factorization(A, x, y, tol);
  if (numerical_rank(Matrix::from_columns({x, y}), tol) < 2)
    throw Error(ErrorCode::FactorizationMismatch, "x and y are linearly dependent");
  const Matrix M = Matrix::from_columns({x, y, A.adjoint() * x, A * y});
  return numerical_rank(M, tol) < 4;
}

struct Witness {
  Matrix B;  // [[A, nu x], [y*, z]]
  cplx nu;
  cplx z;
};

// Normal one-column extension built from a dependent factorization A*A - AA* = xx* - yy*.
inline Witness normal_witness(const Matrix& A, const Vector& x, const Vector& y, const Tolerance& tol = {}) {
  detail::check_factorization(A, x, y, tol);
  const CommutatorProfile pr = profile(A, tol);
  require_rank_condition(pr);
  const cplx x1 = dot(pr.u1, x), x2 = dot(pr.u2, x);
  const cplx y2 = dot(pr.u2, y);
  // y~ = e^{i theta} (conj x~2, conj x~1); |x~1| >= sqrt(d) > 0.
  const cplx e_theta = y2 / std::conj(x1);
  const cplx y1 = dot(pr.u1, y);
  const Matrix As = A.adjoint();
  const Vector lhs = pr.P * (x1 * (As * pr.u1) + x2 * (As * pr.u2));
  const Vector rhs = pr.P * (y1 * (A * pr.u1) + y2 * (A * pr.u2));
  const cplx c = dot(rhs, lhs);
  const cplx e_phi = std::abs(c) > 0.0 ? c / std::abs(c) : cplx(1.0);
  const cplx half = std::sqrt(std::conj(e_theta * e_phi) / std::abs(e_theta * e_phi));
  const SolutionPair s0{x1 * half, x2 * half};

  const std::size_t n = A.rows();
  Witness w;
  w.nu = std::conj(e_phi);
  w.z = completion_corner(A, pr, s0);
  w.B = Matrix(n + 1, n + 1);
  w.B.set_block(0, 0, A);
  for (std::size_t i = 0; i < n; ++i) {
    w.B(i, n) = w.nu * x[i];
    w.B(n, i) = std::conj(y[i]);
  }
  w.B(n, n) = w.z;
  return w;
}

class CompletionFamily {
 public:
  CompletionFamily(Matrix A, CommutatorProfile pr, ProcedureTableau t, FeasibleSet fs)
      : A_(std::move(A)), profile_(std::move(pr)), tableau_(std::move(t)), feasible_(std::move(fs)) {
    a11_ = dot(profile_.u1, A_ * profile_.u1);
    a12_ = dot(profile_.u1, A_ * profile_.u2);
    a21_ = dot(profile_.u2, A_ * profile_.u1);
  }

  const Matrix& matrix() const { return A_; }
  const CommutatorProfile& profile() const { return profile_; }
  const ProcedureTableau& tableau() const { return tableau_; }
  const FeasibleSet& feasible() const { return feasible_; }
  cplx a11() const { return a11_; }
  cplx a12() const { return a12_; }
  cplx a21() const { return a21_; }

  std::vector<SolutionPair> sample(std::size_t count, std::uint64_t seed, const Tolerance& tol = {}) const {
    return sample_solutions(feasible_, count, seed, tol);
  }
  Matrix completion(const SolutionPair& s, cplx mu = 1.0, const Tolerance& tol = {}) const {
    return build_completion(A_, profile_, s, mu, tol);
  }

 private:
  Matrix A_;
  CommutatorProfile profile_;
  ProcedureTableau tableau_;
  FeasibleSet feasible_;
  cplx a11_, a12_, a21_;
};

struct NdOptions {
  bool refined = true;
};

struct NdStatus {
  NdVerdict verdict = NdVerdict::Normal;
  Gate gate = Gate::None;
  CommutatorProfile profile;
  std::optional<ProcedureTableau> tableau;
  std::optional<CompletionFamily> family;
  bool refined_fallback = false;  // refined construction was degenerate, standard used
};

// Decision from a prepared profile; lets callers fix the phases of u1, u2.
inline NdStatus nd_status_from_profile(const Matrix& A, CommutatorProfile pr, const Tolerance& tol,
                                        NdOptions opt = {}) {
  NdStatus st;
  if (pr.normal) {
    st.profile = std::move(pr);
    return st;
  }
  if (!pr.rank_ok) {
    st.verdict = NdVerdict::MoreThanOne;
    st.gate = Gate::RankCondition;
    st.profile = std::move(pr);
    return st;
  }
  ProcedureTableau t;
  if (opt.refined && A.rows() >= 3) {
    try {
      t = assemble_tableau_refined(A, pr, tol).second;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSpan) throw;
      st.refined_fallback = true;
      t = assemble_tableau(A, pr, tol);
    }
  } else {
    t = assemble_tableau(A, pr, tol);
  }
  auto fs = solve_feasibility(t, pr.d, tol);
  if (!fs) {
    st.verdict = NdVerdict::MoreThanOne;
    st.gate = t.m >= 4 ? Gate::NoNullspace : Gate::NonPositiveK;
  } else {
    st.verdict = NdVerdict::One;
    st.family.emplace(A, pr, t, std::move(*fs));
  }
  st.tableau = std::move(t);
  st.profile = std::move(pr);
  return st;
}

inline NdStatus nd_status(const Matrix& A, const Tolerance& tol = {}, NdOptions opt = {}) {
  require_square(A, "nd_status needs a square matrix");
  return nd_status_from_profile(A, profile(A, tol), tol, opt);
}

}  // namespace ndefect

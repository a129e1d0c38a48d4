#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndefect {

using cplx = std::complex<double>;
using Vector = std::vector<cplx>;

enum class ErrorCode {
  NotSquare,
  DimensionMismatch,
  NotHermitian,
  NotSymmetric,
  NoConvergence,
  ZeroMatrix,
  RankConditionFailed,
  DegenerateSpan,
  Infeasible,
  InvalidPhase,
  FactorizationMismatch,
  NotReal,
  SolutionInvalid,
  GuardFailed,
  OddSize,
  NotNormalInput,
  NotPSD,
  RankMismatch,
  FactorNotRankOne,
  SingularA,
  StructureMismatch,
  InvalidTolerance,
  NotDefectOne,
  Parse,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::RankConditionFailed: return "RankConditionFailed";
    case ErrorCode::DegenerateSpan: return "DegenerateSpan";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InvalidPhase: return "InvalidPhase";
    case ErrorCode::FactorizationMismatch: return "FactorizationMismatch";
    case ErrorCode::NotReal: return "NotReal";
    case ErrorCode::SolutionInvalid: return "SolutionInvalid";
    case ErrorCode::GuardFailed: return "GuardFailed";
    case ErrorCode::OddSize: return "OddSize";
    case ErrorCode::NotNormalInput: return "NotNormalInput";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::FactorNotRankOne: return "FactorNotRankOne";
    case ErrorCode::SingularA: return "SingularA";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::NotDefectOne: return "NotDefectOne";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}
  ErrorCode code() const noexcept { return code_; }
  // message without the code prefix
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// rank_tol is relative to a reference scale, residual_tol bounds verification residuals.
struct Tolerance {
  double rank_tol = 1e-10;
  double residual_tol = 1e-9;

  void validate() const {
    if (!(rank_tol > 0.0) || !(rank_tol < 1.0) || !(residual_tol > 0.0))
      throw Error(ErrorCode::InvalidTolerance, "need 0 < rank_tol < 1 and residual_tol > 0");
  }
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows * cols)
      throw Error(ErrorCode::DimensionMismatch, "entry count does not match shape");
  }
  Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged rows");
      a_.insert(a_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }
  static Matrix diagonal(const std::vector<cplx>& d) {
    Matrix D(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
    return D;
  }
  static Matrix column(const Vector& v) { return Matrix(v.size(), 1, v); }
  static Matrix from_columns(const std::vector<Vector>& cols) {
    if (cols.empty()) return {};
    Matrix M(cols[0].size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) M.set_col(j, cols[j]);
    return M;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return a_.empty(); }
  const std::vector<cplx>& data() const { return a_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_real() const {
    return std::all_of(a_.begin(), a_.end(), [](const cplx& z) { return z.imag() == 0.0; });
  }

  Matrix adjoint() const {
    Matrix R(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) R(j, i) = std::conj((*this)(i, j));
    return R;
  }
  Matrix transpose() const {
    Matrix R(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) R(j, i) = (*this)(i, j);
    return R;
  }
  Matrix conj() const {
    Matrix R = *this;
    for (auto& z : R.a_) z = std::conj(z);
    return R;
  }
  Matrix real_part() const {
    Matrix R = *this;
    for (auto& z : R.a_) z = z.real();
    return R;
  }
  Matrix imag_part() const {
    Matrix R = *this;
    for (auto& z : R.a_) z = z.imag();
    return R;
  }

  Vector col(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  Vector row(std::size_t i) const {
    return Vector(a_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  void set_col(std::size_t j, const Vector& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }
  void set_row(std::size_t i, const Vector& v) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix R(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) R(i, j) = (*this)(r0 + i, c0 + j);
    return R;
  }
  void set_block(std::size_t r0, std::size_t c0, const Matrix& B) {
    for (std::size_t i = 0; i < B.rows(); ++i)
      for (std::size_t j = 0; j < B.cols(); ++j) (*this)(r0 + i, c0 + j) = B(i, j);
  }
  // Columns [c0, c0+nc).
  Matrix columns(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }

  double frobenius() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& z : a_) m = std::max(m, std::abs(z));
    return m;
  }
  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  Matrix& operator+=(const Matrix& B) {
    check_same(B);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += B.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& B) {
    check_same(B);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= B.a_[k];
    return *this;
  }
  Matrix& operator*=(cplx s) {
    for (auto& z : a_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix A, const Matrix& B) { return A += B; }
  friend Matrix operator-(Matrix A, const Matrix& B) { return A -= B; }
  friend Matrix operator*(Matrix A, cplx s) { return A *= s; }
  friend Matrix operator*(cplx s, Matrix A) { return A *= s; }
  friend Matrix operator-(Matrix A) { return A *= -1.0; }

  friend Matrix operator*(const Matrix& A, const Matrix& B) {
    if (A.cols_ != B.rows_) throw Error(ErrorCode::DimensionMismatch, "product shape");
    Matrix C(A.rows_, B.cols_);
    for (std::size_t i = 0; i < A.rows_; ++i)
      for (std::size_t k = 0; k < A.cols_; ++k) {
        const cplx a = A(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < B.cols_; ++j) C(i, j) += a * B(k, j);
      }
    return C;
  }
  friend Vector operator*(const Matrix& A, const Vector& x) {
    if (A.cols_ != x.size()) throw Error(ErrorCode::DimensionMismatch, "matvec shape");
    Vector y(A.rows_);
    for (std::size_t i = 0; i < A.rows_; ++i)
      for (std::size_t j = 0; j < A.cols_; ++j) y[i] += A(i, j) * x[j];
    return y;
  }

  bool operator==(const Matrix& B) const {
    return rows_ == B.rows_ && cols_ == B.cols_ && a_ == B.a_;
  }

 private:
  void check_same(const Matrix& B) const {
    if (rows_ != B.rows_ || cols_ != B.cols_)
      throw Error(ErrorCode::DimensionMismatch, "shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> a_;
};

// Vector helpers. dot is conjugate-linear in its first argument.
inline cplx dot(const Vector& x, const Vector& y) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}
inline double norm2(const Vector& x) { return std::sqrt(std::real(dot(x, x))); }

inline Vector operator+(Vector x, const Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  return x;
}
inline Vector operator-(Vector x, const Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
  return x;
}
inline Vector operator*(cplx s, Vector x) {
  for (auto& z : x) z *= s;
  return x;
}
inline Vector conj(Vector x) {
  for (auto& z : x) z = std::conj(z);
  return x;
}
inline Vector unit(std::size_t n, std::size_t k) {
  Vector e(n);
  e[k] = 1.0;
  return e;
}

// x y*
inline Matrix outer(const Vector& x, const Vector& y) {
  Matrix M(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) M(i, j) = x[i] * std::conj(y[j]);
  return M;
}

inline void require_square(const Matrix& A, const char* what) {
  if (!A.is_square()) throw Error(ErrorCode::NotSquare, what);
}

inline double hermitian_defect(const Matrix& H) { return (H - H.adjoint()).frobenius(); }
inline double symmetric_defect(const Matrix& S) { return (S - S.transpose()).frobenius(); }

}  // namespace ndefect

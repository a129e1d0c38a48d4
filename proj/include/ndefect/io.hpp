#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ndefect/numerics.hpp"

namespace ndefect {

inline constexpr const char* kMatrixFormat = "ndefect-matrix/1";

enum class MatrixKind { Complex, Real, Hermitian, Symmetric, Antisymmetric, PSD };

inline const char* to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::Complex: return "complex";
    case MatrixKind::Real: return "real";
    case MatrixKind::Hermitian: return "hermitian";
    case MatrixKind::Symmetric: return "symmetric";
    case MatrixKind::Antisymmetric: return "antisymmetric";
    case MatrixKind::PSD: return "psd";
  }
  return "?";
}

inline MatrixKind parse_kind(const std::string& s) {
  for (MatrixKind k : {MatrixKind::Complex, MatrixKind::Real, MatrixKind::Hermitian, MatrixKind::Symmetric,
                       MatrixKind::Antisymmetric, MatrixKind::PSD})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::Parse, "unknown kind \"" + s + "\"");
}

// Checks a declared kind within residual_tol relative to ||M||_F.
inline void verify_kind(const Matrix& M, MatrixKind k, const Tolerance& tol = {}) {
  const double s = std::max(1.0, M.frobenius());
  switch (k) {
    case MatrixKind::Complex: return;
    case MatrixKind::Real:
      if (!M.is_real()) throw Error(ErrorCode::NotReal, "declared real but has imaginary parts");
      return;
    case MatrixKind::Hermitian:
      require_square(M, "hermitian kind needs a square matrix");
      if (hermitian_defect(M) > tol.residual_tol * s) throw Error(ErrorCode::NotHermitian, "declared hermitian");
      return;
    case MatrixKind::Symmetric:
      require_square(M, "symmetric kind needs a square matrix");
      if (symmetric_defect(M) > tol.residual_tol * s) throw Error(ErrorCode::NotSymmetric, "declared symmetric");
      return;
    case MatrixKind::Antisymmetric:
      require_square(M, "antisymmetric kind needs a square matrix");
      if ((M + M.transpose()).frobenius() > tol.residual_tol * s)
        throw Error(ErrorCode::StructureMismatch, "declared antisymmetric");
      return;
    case MatrixKind::PSD:
      require_square(M, "psd kind needs a square matrix");
      if (hermitian_defect(M) > tol.residual_tol * s) throw Error(ErrorCode::NotHermitian, "declared psd");
      if (hermitian_eig(M, tol).values.back() < -tol.residual_tol * s)
        throw Error(ErrorCode::NotPSD, "declared psd but has a negative eigenvalue");
      return;
  }
}

namespace detail {

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline cplx parse_entry(const nlohmann::json& e, std::size_t i, std::size_t j) {
  const std::string where = "entry (" + std::to_string(i) + "," + std::to_string(j) + ")";
  if (e.is_number()) return e.get<double>();
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw Error(ErrorCode::Parse, where + ": expected a number or a [re, im] pair");
}

inline Matrix parse_json_matrix(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "top level must be an object");
  if (!j.contains("format") || j["format"] != kMatrixFormat)
    throw Error(ErrorCode::Parse, std::string("format must be \"") + kMatrixFormat + "\"");
  if (!j.contains("rows") || !j["rows"].is_number_unsigned() || !j.contains("cols") ||
      !j["cols"].is_number_unsigned())
    throw Error(ErrorCode::Parse, "rows and cols must be nonnegative integers");
  const auto rows = j["rows"].get<std::size_t>(), cols = j["cols"].get<std::size_t>();
  if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].size() != rows)
    throw Error(ErrorCode::Parse, "entries must hold one array per row");
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& r = j["entries"][i];
    if (!r.is_array() || r.size() != cols)
      throw Error(ErrorCode::Parse, "row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) M(i, c) = parse_entry(r[c], i, c);
  }
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) throw Error(ErrorCode::Parse, "kind must be a string");
    verify_kind(M, parse_kind(j["kind"].get<std::string>()));
  }
  return M;
}

// Whitespace grid of reals, one row per line; '#' starts a comment.
inline Matrix parse_grid_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<double> r;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": not a real number: " + tok);
      r.push_back(v);
    }
    if (r.empty()) continue;
    if (!rows.empty() && r.size() != rows.front().size())
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": row length differs from the first row");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, "no matrix rows found");
  Matrix M(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  return M;
}

}  // namespace detail

inline Matrix parse_matrix(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return detail::parse_json_matrix(text);
  return detail::parse_grid_matrix(text);
}

inline Matrix read_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Parse, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_matrix(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

inline nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json matrix_json(const Matrix& M, std::optional<MatrixKind> kind = std::nullopt) {
  const bool real = M.is_real();
  nlohmann::json j;
  j["format"] = kMatrixFormat;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  j["kind"] = to_string(kind.value_or(real ? MatrixKind::Real : MatrixKind::Complex));
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t k = 0; k < M.cols(); ++k) r.push_back(real ? nlohmann::json(M(i, k).real()) : complex_json(M(i, k)));
    rows.push_back(std::move(r));
  }
  j["entries"] = std::move(rows);
  return j;
}

inline void write_matrix(const std::string& path, const Matrix& M, std::optional<MatrixKind> kind = std::nullopt) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Parse, "cannot write " + path);
  f << matrix_json(M, kind).dump(1) << "\n";
}

}  // namespace ndefect

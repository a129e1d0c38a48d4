#pragma once

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndefect/commuting.hpp"
#include "ndefect/generators.hpp"
#include "ndefect/io.hpp"
#include "ndefect/nd_real.hpp"
#include "ndefect/separability.hpp"

namespace ndefect::cli {

inline constexpr const char* kReportSchema = "ndefect-report/1";
inline constexpr const char* kNumericalPolicy =
    "exact rank statements are decided numerically: a singular value counts when it exceeds "
    "rank_tol * max(sigma_max, reference), with reference ||A||_F for the tableaux and ||A||_F^2 "
    "for the self-commutator; completions are accepted when ||B*B - BB*||_F <= residual_tol * ||B||_F^2";

enum Exit : int {
  kOne = 0,
  kNormal = 1,
  kMoreThanOne = 2,
  kEntangled = 3,
  kInconclusive = 4,
  kUsage = 64,
  kSoftware = 70,
};

using json = nlohmann::ordered_json;

// "rank[,residual]"
inline Tolerance parse_tolerance(const std::string& s, Tolerance base) {
  const auto comma = s.find(',');
  auto num = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size()) throw Error(ErrorCode::InvalidTolerance, "cannot read tolerance \"" + s + "\"");
    return v;
  };
  base.rank_tol = num(s.substr(0, comma));
  if (comma != std::string::npos) base.residual_tol = num(s.substr(comma + 1));
  base.validate();
  return base;
}

struct Common {
  std::string tol_flag;
  bool json_out = false;
};

inline Tolerance resolve_tolerance(const Common& c) {
  Tolerance t;
  if (const char* env = std::getenv("NDEFECT_TOL"); env && *env) t = parse_tolerance(env, t);
  if (!c.tol_flag.empty()) t = parse_tolerance(c.tol_flag, t);
  return t;
}

inline json base_report(const std::string& command, const Tolerance& tol) {
  json r;
  r["schema"] = kReportSchema;
  r["command"] = command;
  r["tolerance"] = {{"rank_tol", tol.rank_tol}, {"residual_tol", tol.residual_tol}};
  r["numerical_policy"] = kNumericalPolicy;
  return r;
}

inline json inertia_json(const Inertia& in) { return {{"plus", in.plus}, {"minus", in.minus}, {"zero", in.zero}}; }

inline json nullable(double v, bool present) { return present ? json(v) : json(nullptr); }

inline void emit(std::ostream& out, const json& report, bool as_json) {
  if (as_json) {
    out << report.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : report.items()) {
    if (k == "schema" || k == "numerical_policy") continue;
    out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

inline std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

inline std::string indexed(const std::string& stem, std::size_t i) {
  std::ostringstream s;
  s << stem << "_" << std::setw(3) << std::setfill('0') << i << ".json";
  return s.str();
}

inline int verdict_exit(NdVerdict v) {
  switch (v) {
    case NdVerdict::One: return kOne;
    case NdVerdict::Normal: return kNormal;
    case NdVerdict::MoreThanOne: return kMoreThanOne;
  }
  return kSoftware;
}

inline void add_complex_check(json& r, const Matrix& A, const NdStatus& st) {
  const auto& pr = st.profile;
  r["field"] = "complex";
  r["n"] = A.rows();
  r["verdict"] = to_string(st.verdict);
  r["gate"] = to_string(st.gate);
  r["d"] = nullable(pr.d, pr.rank_ok);
  r["inertia"] = inertia_json(pr.inertia);
  r["lower_bound"] = std::max(pr.inertia.plus, pr.inertia.minus);
  if (st.tableau) {
    json t;
    t["kind"] = st.tableau->refined ? "refined" : "standard";
    t["rows"] = st.tableau->Q.rows();
    t["m"] = st.tableau->m;
    t["refined_fallback"] = st.refined_fallback;
    json kv = json::array();
    if (st.tableau->K.rows() > 0)
      for (double v : hermitian_eig(st.tableau->K).values) kv.push_back(v);
    t["k_eigenvalues"] = kv;
    r["tableau"] = t;
  } else {
    r["tableau"] = nullptr;
  }
}

inline json system_json(const RealSystem& s) {
  json j;
  j["rank"] = s.rank;
  j["code"] = std::string(1, s.code);
  const bool rank1 = s.rank == 1;
  j["coef1"] = nullable(s.coef1, rank1);
  j["coef2"] = nullable(s.coef2, rank1);
  return j;
}

inline void add_real_check(json& r, const Matrix& A, const RndStatus& st) {
  const auto& pr = st.profile.commutator;
  r["field"] = "real";
  r["n"] = A.rows();
  r["verdict"] = to_string(st.verdict);
  r["gate"] = to_string(st.gate);
  r["d"] = nullable(pr.d, pr.rank_ok);
  r["inertia"] = inertia_json(pr.inertia);
  r["lower_bound"] = std::max(pr.inertia.plus, pr.inertia.minus);
  if (st.report) {
    r["cases"] = {{"case1", system_json(st.report->first)}, {"case2", system_json(st.report->second)}};
    r["m1"] = st.report->m1();
    r["m2"] = st.report->m2();
  } else {
    r["cases"] = nullptr;
  }
}

inline int cmd_check(const std::string& file, bool real, bool standard, const Common& c, std::ostream& out) {
  const Tolerance tol = resolve_tolerance(c);
  const Matrix A = read_matrix(file);
  require_square(A, "check needs a square matrix");
  json r = base_report("check", tol);
  r["input"] = file;
  r["seed"] = nullptr;
  int code = kSoftware;
  if (real) {
    if (!A.is_real()) throw Error(ErrorCode::NotReal, "--real needs a real matrix");
    const RndStatus st = rnd_status(A, tol);
    add_real_check(r, A, st);
    code = verdict_exit(st.verdict);
  } else {
    const NdStatus st = nd_status(A, tol, NdOptions{!standard});
    add_complex_check(r, A, st);
    code = verdict_exit(st.verdict);
  }
  r["unitary_defect"] = A.max_abs() > 0.0 ? json(unitary_defect(A, tol)) : json(nullptr);
  emit(out, r, c.json_out);
  return code;
}

inline int cmd_complete(const std::string& file, std::size_t count, std::uint64_t seed, double mu_angle,
                        const std::string& dir, bool real, const Common& c, std::ostream& out, std::ostream& err) {
  const Tolerance tol = resolve_tolerance(c);
  const Matrix A = read_matrix(file);
  require_square(A, "complete needs a square matrix");
  json r = base_report("complete", tol);
  r["input"] = file;
  r["seed"] = seed;
  json list = json::array();
  bool all_normal = true;
  auto record = [&](const Matrix& B, json entry, std::size_t i) {
    const NormalityCheck nc = verify_normal(B, tol);
    all_normal = all_normal && nc.normal;
    entry["normality_residual"] = nc.relative;
    entry["file"] = nullptr;
    if (!dir.empty()) {
      const std::string p = out_path(dir, indexed("completion", i));
      write_matrix(p, B);
      entry["file"] = p;
    }
    list.push_back(std::move(entry));
  };
  if (real) {
    if (!A.is_real()) throw Error(ErrorCode::NotReal, "--real needs a real matrix");
    const RndStatus st = rnd_status(A, tol);
    r["field"] = "real";
    r["verdict"] = to_string(st.verdict);
    if (st.verdict != NdVerdict::One) {
      err << "ndefect: NotDefectOne: real normal defect is not one\n";
      r["completions"] = list;
      emit(out, r, c.json_out);
      return verdict_exit(st.verdict);
    }
    for (std::size_t i = 0; i < st.solutions.size() && i < count; ++i) {
      const RealSolution& s = st.solutions[i];
      const Matrix B = build_real_completion(A, st.profile, s, tol);
      record(B,
             {{"case", s.which == RealCase::Case1 ? 1 : 2},
              {"x1", complex_json(s.x1)},
              {"x2", complex_json(s.x2)},
              {"mu", complex_json(1.0)},
              {"z", complex_json(B(A.rows(), A.rows()))}},
             i);
    }
  } else {
    const NdStatus st = nd_status(A, tol);
    r["field"] = "complex";
    r["verdict"] = to_string(st.verdict);
    if (st.verdict != NdVerdict::One) {
      err << "ndefect: NotDefectOne: normal defect is not one\n";
      r["completions"] = list;
      emit(out, r, c.json_out);
      return verdict_exit(st.verdict);
    }
    const cplx mu = std::polar(1.0, mu_angle);
    const auto pairs = st.family->sample(count, seed, tol);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const Matrix B = st.family->completion(pairs[i], mu, tol);
      record(B,
             {{"x1", complex_json(pairs[i].x1)},
              {"x2", complex_json(pairs[i].x2)},
              {"mu", complex_json(mu)},
              {"z", complex_json(B(A.rows(), A.rows()))}},
             i);
    }
  }
  r["completions"] = list;
  emit(out, r, c.json_out);
  return all_normal ? kOne : kSoftware;
}

inline int cmd_generate(std::size_t n, bool real, std::uint64_t seed, const std::string& file, const Common& c,
                        std::ostream& out) {
  const Tolerance tol = resolve_tolerance(c);
  if (n < 2) throw Error(ErrorCode::DimensionMismatch, "--n must be at least 2");
  const Matrix A = real ? generate_rnd1_real_even(n, seed, tol) : generate_nd1_complex(n, seed, tol);
  const NdVerdict v = real ? rnd_status(A, tol).verdict : nd_status(A, tol).verdict;
  json r = base_report("generate", tol);
  r["input"] = nullptr;
  r["seed"] = seed;
  r["n"] = n;
  r["field"] = real ? "real" : "complex";
  r["verdict"] = to_string(v);
  r["file"] = file.empty() ? json(nullptr) : json(file);
  if (file.empty()) {
    out << matrix_json(A).dump(1) << "\n";
  } else {
    write_matrix(file, A);
    emit(out, r, c.json_out);
  }
  return v == NdVerdict::One ? kOne : kSoftware;
}

inline double structure_residual(const PairCompletion& pc) {
  switch (pc.kind) {
    case PairKind::Hermitian: return std::max(hermitian_defect(pc.B1), hermitian_defect(pc.B2));
    case PairKind::Symmetric:
      return std::max({symmetric_defect(pc.B1), symmetric_defect(pc.B2), pc.B1.imag_part().frobenius(),
                       pc.B2.imag_part().frobenius()});
    case PairKind::SymAntisym:
      return std::max({symmetric_defect(pc.B1), (pc.B2 + pc.B2.transpose()).frobenius(),
                       pc.B1.imag_part().frobenius(), pc.B2.imag_part().frobenius()});
  }
  return 0.0;
}

inline int cmd_commute(const std::string& f1, const std::string& f2, const std::string& kind, std::size_t count,
                       std::uint64_t seed, const std::string& dir, const Common& c, std::ostream& out) {
  const Tolerance tol = resolve_tolerance(c);
  const Matrix A1 = read_matrix(f1), A2 = read_matrix(f2);
  PairStatus ps;
  if (kind == "hermitian") ps = chd_solve(A1, A2, tol);
  else if (kind == "symmetric") ps = csd_solve(A1, A2, tol);
  else ps = sym_antisym_solve(A1, A2, tol);
  json r = base_report("commute", tol);
  r["input"] = json::array({f1, f2});
  r["seed"] = seed;
  r["kind"] = to_string(ps.kind);
  r["verdict"] = to_string(ps.verdict);
  r["gate"] = to_string(ps.gate);
  json list = json::array();
  bool ok = true;
  const auto pcs = sample_pair_completions(ps, A1, A2, count, seed, tol);
  for (std::size_t i = 0; i < pcs.size(); ++i) {
    const auto& pc = pcs[i];
    json e;
    e["t1"] = complex_json(pc.t1);
    e["t2"] = complex_json(pc.t2);
    e["z1"] = pc.z1;
    e["z2"] = pc.z2;
    e["commutator_residual"] = commutator_residual(pc.B1, pc.B2);
    e["structure_residual"] = structure_residual(pc);
    ok = ok && e["commutator_residual"].get<double>() <= tol.residual_tol;
    e["files"] = nullptr;
    if (!dir.empty()) {
      const std::string p1 = out_path(dir, indexed("B1", i)), p2 = out_path(dir, indexed("B2", i));
      write_matrix(p1, pc.B1);
      write_matrix(p2, pc.B2);
      e["files"] = json::array({p1, p2});
    }
    list.push_back(std::move(e));
  }
  r["completions"] = list;
  emit(out, r, c.json_out);
  if (!ok) return kSoftware;
  switch (ps.verdict) {
    case PairVerdict::One: return kOne;
    case PairVerdict::Zero: return kNormal;
    case PairVerdict::MoreThanOne: return kMoreThanOne;
  }
  return kSoftware;
}

inline int cmd_separability(const std::string& mfile, const std::string& bfile, const std::string& cfile,
                            const std::string& dir, const Common& c, std::ostream& out) {
  const Tolerance tol = resolve_tolerance(c);
  SepVerdict v;
  Matrix C;
  json r = base_report("separability", tol);
  r["seed"] = nullptr;
  if (!mfile.empty()) {
    const Matrix M = read_matrix(mfile);
    v = sep_check_state(M, tol);
    r["input"] = mfile;
  } else {
    if (bfile.empty() || cfile.empty()) throw Error(ErrorCode::Parse, "give a state file or both --B and --C");
    const Matrix B = read_matrix(bfile);
    C = read_matrix(cfile);
    v = sep_check(B, C, tol);
    r["input"] = json::array({bfile, cfile});
  }
  r["verdict"] = to_string(v.verdict);
  r["reason"] = v.reason;
  r["peres_ok"] = v.peres_ok;
  r["ranks"] = json::array({v.rank_m, v.rank_mt});
  r["dependent"] = v.dependent;
  r["state_count"] = v.state_count > 0 ? json(v.state_count) : json(nullptr);
  if (v.witness) {
    json w;
    w["nu"] = complex_json(v.witness->nu);
    w["z"] = complex_json(v.witness->z);
    w["normality_residual"] = verify_normal(v.witness->B, tol).relative;
    w["file"] = nullptr;
    if (!dir.empty()) {
      const std::string p = out_path(dir, "witness.json");
      write_matrix(p, v.witness->B);
      w["file"] = p;
    }
    r["witness"] = w;
  } else {
    r["witness"] = nullptr;
  }
  emit(out, r, c.json_out);
  switch (v.verdict) {
    case SepOutcome::Separable: return kOne;
    case SepOutcome::Entangled: return kEntangled;
    case SepOutcome::Inconclusive: return kInconclusive;
  }
  return kSoftware;
}

inline bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoConvergence:
    case ErrorCode::DegenerateSpan:
    case ErrorCode::FactorizationMismatch:
    case ErrorCode::SolutionInvalid:
    case ErrorCode::GuardFailed:
      return false;
    default:
      return true;
  }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"normal defect one: decide, complete, generate, commute, separability"};
  app.name("ndefect");
  app.require_subcommand(1);
  Common common;
  app.add_option("--tol", common.tol_flag, "rank_tol[,residual_tol]; overrides NDEFECT_TOL");
  app.add_flag("--json", common.json_out, "print the report as JSON");

  std::string file, file2, bfile, cfile, dir, kind = "hermitian";
  bool real = false, standard = false, refined = false;
  std::size_t count = 3, n = 0;
  std::uint64_t seed = 0;
  double mu = 0.0;

  auto* check = app.add_subcommand("check", "decide whether the normal defect is one");
  check->add_option("file", file, "matrix file")->required();
  check->add_flag("--real", real, "decide the real normal defect");
  auto* fs = check->add_flag("--standard", standard, "use the 2n x 4 tableau");
  check->add_flag("--refined", refined, "use the (n-2) x 4 tableau (default)")->excludes(fs);

  auto* complete = app.add_subcommand("complete", "sample minimal normal completions");
  complete->add_option("file", file, "matrix file")->required();
  complete->add_option("--count", count, "number of completions")->check(CLI::PositiveNumber);
  complete->add_option("--seed", seed, "sampler seed");
  complete->add_option("--mu", mu, "phase angle of mu in radians");
  complete->add_option("--out", dir, "directory for completion files");
  complete->add_flag("--real", real, "real completions");

  auto* generate = app.add_subcommand("generate", "synthesize a matrix with normal defect one");
  generate->add_option("--n", n, "size")->required();
  generate->add_flag("--real", real, "real matrix of even size");
  generate->add_option("--seed", seed, "seed");
  generate->add_option("--out", file, "output file (stdout if omitted)");

  auto* commute = app.add_subcommand("commute", "commuting completions of a matrix pair");
  commute->add_option("a1", file, "first matrix")->required();
  commute->add_option("a2", file2, "second matrix")->required();
  commute->add_option("--kind", kind, "hermitian | symmetric | symantisym")
      ->check(CLI::IsMember({"hermitian", "symmetric", "symantisym"}));
  commute->add_option("--count", count, "number of completions")->check(CLI::PositiveNumber);
  commute->add_option("--seed", seed, "sampler seed");
  commute->add_option("--out", dir, "directory for completion files");

  auto* sep = app.add_subcommand("separability", "2 x n separability of a state");
  sep->add_option("file", file, "2n x 2n state file");
  sep->add_option("--B", bfile, "B block (state [[I, B*], [B, C]])");
  sep->add_option("--C", cfile, "C block");
  sep->add_option("--out", dir, "directory for the witness file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ndefect: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*check) return cmd_check(file, real, standard, common, out);
    if (*complete) return cmd_complete(file, count, seed, mu, dir, real, common, out, err);
    if (*generate) return cmd_generate(n, real, seed, file, common, out);
    if (*commute) return cmd_commute(file, file2, kind, count, seed, dir, common, out);
    if (*sep) return cmd_separability(file, bfile, cfile, dir, common, out);
  } catch (const Error& e) {
    err << "ndefect: " << e.what() << "\n";
    return is_input_error(e.code()) ? kUsage : kSoftware;
  } catch (const std::exception& e) {
    err << "ndefect: " << e.what() << "\n";
    return kSoftware;
  }
  return kUsage;
}

}  // namespace ndefect::cli

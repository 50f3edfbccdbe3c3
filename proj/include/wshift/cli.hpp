#pragma once

// Command dispatch and report emission. Exit codes: 0 every verdict passes,
// 2 a mathematical verdict failed, 1 usage, parse or I/O error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ios>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wshift/config.hpp"
#include "wshift/equivalence.hpp"
#include "wshift/gallery.hpp"
#include "wshift/shift.hpp"
#include "wshift/twodim.hpp"

namespace wshift {

namespace cli {

using ojson = nlohmann::ordered_json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerdict = 2;

/// A report is an ordered JSON document with a "verdicts" object of
/// name -> "pass" | "fail". Text output is rendered from the same document.
class Report {
 public:
  explicit Report(const std::string& command) { doc_["command"] = command; }

  ojson& operator[](const char* key) { return doc_[key]; }

  void verdict(const std::string& name, bool pass) { verdicts_[name] = pass ? "pass" : "fail"; }

  bool all_pass() const {
    return std::all_of(verdicts_.begin(), verdicts_.end(), [](const auto& v) { return v == "pass"; });
  }

  ojson document() const {
    ojson out = doc_;
    out["verdicts"] = verdicts_.is_null() ? ojson::object() : verdicts_;
    out["exit_code"] = all_pass() ? kExitPass : kExitVerdict;
    return out;
  }

 private:
  ojson doc_;
  ojson verdicts_ = ojson::object();
};

inline std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string render_scalar(const ojson& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline bool is_flat_array(const ojson& v) {
  return v.is_array() && std::all_of(v.begin(), v.end(), [](const ojson& e) { return !e.is_structured(); });
}

inline void render_text(const ojson& v, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const auto render_value_after_key = [&](const ojson& e) {
    if (!e.is_structured()) {
      out << ' ' << render_scalar(e) << '\n';
    } else if (is_flat_array(e)) {
      out << " [";
      for (std::size_t i = 0; i < e.size(); ++i) out << (i ? ", " : "") << render_scalar(e[i]);
      out << "]\n";
    } else {
      out << '\n';
      render_text(e, out, indent + 2);
    }
  };
  if (v.is_object()) {
    for (const auto& [key, e] : v.items()) {
      out << pad << key << ':';
      render_value_after_key(e);
    }
  } else if (v.is_array()) {
    for (const auto& e : v) {
      out << pad << '-';
      render_value_after_key(e);
    }
  } else {
    out << pad << render_scalar(v) << '\n';
  }
}

inline ojson report_json(const EquivalenceReport& r) {
  ojson out;
  out["n_max"] = r.params.n_max;
  out["N"] = r.params.window;
  out["margin"] = r.params.margin;
  out["tol"] = r.params.tol;
  out["rank_rel_tol"] = r.params.rank_rel_tol;
  out["residual_moduli_forward"] = r.residual_moduli_forward;
  out["residual_moduli_backward"] = r.residual_moduli_backward;
  out["residual_wandering"] = r.residual_wandering;
  out["span_defect"] = r.span_defect;
  out["span_threshold"] = r.span_threshold;
  out["pass_moduli_forward"] = r.pass_moduli_forward;
  out["pass_moduli_backward"] = r.pass_moduli_backward;
  out["pass_wandering"] = r.pass_wandering;
  out["pass_span"] = r.pass_span;
  return out;
}

inline void add_equivalence_verdicts(Report& rep, const EquivalenceReport& r) {
  rep.verdict("moduli_forward", r.pass_moduli_forward);
  rep.verdict("moduli_backward", r.pass_moduli_backward);
  rep.verdict("wandering", r.pass_wandering);
  rep.verdict("span", r.pass_span);
}

inline ojson int_set_json(const std::set<int>& s) {
  ojson out = ojson::array();
  for (int v : s) out.push_back(v);
  return out;
}

inline ojson sequence_summary(const WeightSequence& seq, int window) {
  ojson out;
  out["kind"] = seq.is_periodic() ? "periodic" : "windowed";
  if (seq.is_periodic()) {
    out["period"] = seq.stored().size();
  } else {
    out["lo"] = seq.first_index();
    out["hi"] = seq.last_index();
  }
  double smin = std::numeric_limits<double>::infinity();
  for (const auto& w : seq.stored()) smin = std::min(smin, singular_values(w).minCoeff());
  out["sup_norm"] = seq.sup_norm();
  // identity padding contributes singular value 1 outside a window
  out["min_singular_value"] = seq.is_periodic() ? smin : std::min(smin, 1.0);
  const BandedOperator trunc = truncate_shift(seq, window);
  out["truncation_dimension"] = trunc.to_dense().rows();
  out["band"] = int_set_json(trunc.band());
  out["max_block_norm"] = trunc.max_block_norm();
  return out;
}

struct Options {
  std::string config_path;
  std::optional<int> window;
  std::optional<int> n_max;
  std::optional<int> margin;
  std::optional<double> tol;
  std::optional<int> tau_range;
  std::optional<int> p_range;
  std::string json_path;
  // gen-example
  int k = 2;
  std::string family = "k-diagonal";
  std::uint64_t seed = 1;
  std::vector<int> tau{1, -1};
  bool swap = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProblemConfig load(const Options& opt) {
  ProblemConfig cfg = parse_config(read_file(opt.config_path));
  if (opt.window) cfg.params.window = *opt.window;
  if (opt.n_max) cfg.params.n_max = *opt.n_max;
  if (opt.margin) cfg.params.margin = *opt.margin;
  if (opt.tol) cfg.params.tol = *opt.tol;
  if (opt.tau_range) cfg.params.tau_range = *opt.tau_range;
  if (opt.p_range) cfg.params.p_range = *opt.p_range;
  if (cfg.params.window < 1) throw UsageError("N must be >= 1");
  return cfg;
}

inline const WeightSequence& require_t(const ProblemConfig& cfg, const char* command) {
  if (!cfg.t) throw UsageError(std::string(command) + " needs a T sequence in the config");
  return *cfg.t;
}

inline ColumnIsometry u0_or_trivial(const ProblemConfig& cfg) {
  return cfg.u0 ? *cfg.u0 : ColumnIsometry::embedding(0, identity(cfg.dim));
}

inline VerifyParams verify_params(const ProblemConfig& cfg) {
  VerifyParams p;
  p.n_max = cfg.params.n_max;
  p.window = cfg.params.window;
  p.margin = cfg.params.effective_margin();
  p.tol = cfg.params.tol;
  return p;
}

inline Report cmd_describe(const ProblemConfig& cfg) {
  Report rep("describe");
  rep["dim"] = cfg.dim;
  rep["N"] = cfg.params.window;
  rep["S"] = sequence_summary(cfg.s, cfg.params.window);
  if (cfg.t) rep["T"] = sequence_summary(*cfg.t, cfg.params.window);
  if (cfg.u0) {
    ojson u;
    ojson rows = ojson::array();
    for (const auto& b : cfg.u0->support()) rows.push_back(b.row);
    u["rows"] = rows;
    u["isometry_defect"] = cfg.u0->isometry_defect();
    rep["u0"] = u;
  }
  return rep;
}

inline ojson polar_summary(const WeightSequence& seq, int window, double tol, bool& recon_ok, bool& unitary_ok) {
  const auto [factors, moduli] = shift_polar(seq);
  const BandedOperator s = truncate_shift(seq, window);
  const BandedOperator rebuilt = truncate_shift(factors, window) * shift_modulus_operator(seq, window);
  const double recon = interior_difference(s, rebuilt, 1) / std::max(s.max_block_norm(), 1.0);
  double defect = 0.0;
  for (const auto& f : factors.stored()) defect = std::max(defect, unitarity_defect(f));
  double modulus_sym = 0.0;
  for (const auto& m : moduli.stored()) modulus_sym = std::max(modulus_sym, (m - m.adjoint()).norm());
  recon_ok = recon_ok && recon <= tol;
  unitary_ok = unitary_ok && defect <= tol;
  ojson out;
  out["reconstruction_residual"] = recon;
  out["factor_unitarity_defect"] = defect;
  out["modulus_hermitian_defect"] = modulus_sym;
  return out;
}

inline Report cmd_polar(const ProblemConfig& cfg) {
  Report rep("polar");
  rep["N"] = cfg.params.window;
  rep["tol"] = cfg.params.tol;
  bool recon = true;
  bool unit = true;
  rep["S"] = polar_summary(cfg.s, cfg.params.window, cfg.params.tol, recon, unit);
  if (cfg.t) rep["T"] = polar_summary(*cfg.t, cfg.params.window, cfg.params.tol, recon, unit);
  rep.verdict("reconstruction", recon);
  rep.verdict("factor_unitary", unit);
  return rep;
}

inline Report cmd_verify(const ProblemConfig& cfg) {
  Report rep("verify");
  const WeightSequence& t = require_t(cfg, "verify");
  const ColumnIsometry u0 = u0_or_trivial(cfg);
  rep["isometry_defect"] = u0.isometry_defect();
  try {
    const EquivalenceReport r = verify_u0(u0, cfg.s, t, verify_params(cfg));
    rep["report"] = report_json(r);
    rep.verdict("isometry", true);
    add_equivalence_verdicts(rep, r);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IsometryViolation) throw;
    rep["error"] = e.what();
    rep.verdict("isometry", false);
  }
  return rep;
}

inline Report cmd_build(const ProblemConfig& cfg) {
  Report rep("build");
  const WeightSequence& t = require_t(cfg, "build");
  const ColumnIsometry u0 = u0_or_trivial(cfg);
  const int window = cfg.params.window;
  rep["N"] = window;
  try {
    const BuildResult b = build_unitary_detailed(u0, cfg.s, t, window, window, cfg.params.tol);
    const int margin = b.reliable_margin;
    rep["col_range"] = b.col_range;
    rep["reliable_margin"] = margin;
    rep["report"] = report_json(b.report);
    rep["diagonal_support"] = int_set_json(diagonal_support(b.unitary, cfg.params.tol, margin));
    const double unit = unitarity_residual(b.unitary, margin);
    const double inter = intertwining_residual(b.unitary, cfg.s, t, 1, margin);
    rep["unitarity_residual"] = unit;
    rep["intertwining_residual"] = inter;
    rep.verdict("verification", b.report.passed());
    rep.verdict("unitary", unit <= cfg.params.tol);
    rep.verdict("intertwines", inter <= cfg.params.tol);
  } catch (const VerificationError& e) {
    rep["error"] = e.what();
    rep["report"] = report_json(e.report());
    rep.verdict("verification", false);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IsometryViolation) throw;
    rep["error"] = e.what();
    rep.verdict("isometry", false);
  }
  return rep;
}

inline Report cmd_check_diagonal(const ProblemConfig& cfg) {
  Report rep("check-diagonal");
  const WeightSequence& t = require_t(cfg, "check-diagonal");
  const int window = cfg.params.window;
  const int pr = cfg.params.p_range;
  if (pr < 0) throw UsageError("p-range must be non-negative");
  rep["p_range"] = pr;
  rep["n_max"] = cfg.params.n_max;
  rep["spectra_window"] = ojson::array({-window, window});
  ojson scans = ojson::array();
  std::optional<int> found;
  for (int p = -pr; p <= pr; ++p) {
    const SpectraReport sp = spectra_necessary_check(cfg.s, t, p, -window, window, cfg.params.tol);
    double best = std::numeric_limits<double>::infinity();
    bool pass = false;
    std::vector<CMatrix> candidates = diagonal_form_candidates(cfg.s, t, p);
    if (auto solved = solve_diagonal_block(cfg.s, t, p, cfg.params.n_max)) candidates.push_back(std::move(*solved));
    for (const CMatrix& cand : candidates) {
      const DiagonalCheckReport d = diagonal_unitary_check(cfg.s, t, p, cand, cfg.params.n_max, cfg.params.tol);
      best = std::min(best, d.max_residual());
      pass = pass || d.pass;
    }
    ojson row;
    row["p"] = p;
    row["spectra_max_deviation"] = sp.max_deviation;
    row["spectra_worst_index"] = sp.worst_index;
    row["spectra_pass"] = sp.pass;
    row["best_candidate_residual"] = best;
    row["candidate_pass"] = pass;
    scans.push_back(row);
    if (!found && sp.pass && pass) found = p;
  }
  rep["scan"] = scans;
  if (found) rep["offset"] = *found;
  rep.verdict("diagonal_form_equivalence", found.has_value());
  return rep;
}

inline Report cmd_two_dim(const ProblemConfig& cfg) {
  Report rep("two-dim");
  const WeightSequence& t = require_t(cfg, "two-dim");
  if (cfg.dim != 2) throw UsageError("two-dim needs dim = 2");
  EigenOptions eo;
  eo.tol = cfg.params.tol;
  std::optional<EigenData> sd;
  std::optional<EigenData> td;
  try {
    sd = common_eigenbasis(cfg.s, eo);
    td = common_eigenbasis(t, eo);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotCommuting && e.kind() != ErrorKind::DegenerateSpectrum &&
        e.kind() != ErrorKind::InvalidArgument) {
      throw;
    }
    rep["error"] = e.what();
    rep.verdict("preconditions", false);
    return rep;
  }
  rep.verdict("preconditions", true);
  rep["tau_range"] = cfg.params.tau_range;
  const auto st = match_sigma_tau(*sd, *td, cfg.params.tau_range, cfg.params.tol);
  rep.verdict("match", st.has_value());
  if (!st) return rep;
  rep["sigma"] = ojson::array({st->sigma[0] + 1, st->sigma[1] + 1});
  rep["tau"] = ojson::array({st->tau[0], st->tau[1]});
  try {
    const TwoDiagonalResult r = construct_two_diagonal_unitary(cfg.s, t, *st, *sd, *td, cfg.params.window,
                                                               cfg.params.tol);
    const int margin = r.build.reliable_margin;
    const double unit = unitarity_residual(r.build.unitary, margin);
    const double inter = intertwining_residual(r.build.unitary, cfg.s, t, 1, margin);
    rep["reliable_margin"] = margin;
    rep["diagonal_support"] = int_set_json(r.support);
    rep["unitarity_residual"] = unit;
    rep["intertwining_residual"] = inter;
    rep["report"] = report_json(r.build.report);
    rep.verdict("construction", true);
    rep.verdict("at_most_two_diagonals", r.support.size() <= 2);
    rep.verdict("unitary", unit <= cfg.params.tol);
    rep.verdict("intertwines", inter <= cfg.params.tol);
  } catch (const VerificationError& e) {
    rep["error"] = e.what();
    rep["report"] = report_json(e.report());
    rep.verdict("construction", false);
  }
  return rep;
}

/// Grid read back from a diagonal windowed S.
inline EigenGrid grid_from_sequence(const WeightSequence& s) {
  if (s.is_periodic()) throw Error(ErrorKind::NotExampleShape, "S must be windowed");
  EigenGrid g;
  g.k = static_cast<int>(s.dim());
  g.lo = s.first_index();
  g.hi = s.last_index();
  for (int n = g.lo; n <= g.hi; ++n) {
    std::vector<double> row;
    for (int i = 0; i < g.k; ++i) row.push_back(s.at(n)(i, i).real());
    g.values.push_back(std::move(row));
  }
  return g;
}

inline Report cmd_certify(const ProblemConfig& cfg) {
  Report rep("certify-min-support");
  const WeightSequence& t = require_t(cfg, "certify-min-support");
  const EigenGrid grid = grid_from_sequence(cfg.s);
  const MinSupportCertificate c = certify_min_support(cfg.s, t, grid, grid.k);
  rep["k"] = c.k;
  ojson rows = ojson::array();
  for (const auto& r : c.admissible_rows) rows.push_back(r);
  rep["admissible_rows"] = rows;
  rep["min_support"] = c.min_support;
  rep.verdict("min_support_equals_k", c.certified);
  return rep;
}

inline ProblemConfig gen_example(const Options& opt) {
  ProblemConfig cfg;
  if (opt.family == "k-diagonal") {
    const EigenGrid grid = default_grid(opt.k);
    ShiftPair pair = generate_k_diagonal_pair(grid);
    cfg.dim = opt.k;
    cfg.s = std::move(pair.s);
    cfg.t = std::move(pair.t);
    cfg.u0 = canonical_u0(opt.k);
    cfg.params.window = std::max(8, 2 * opt.k + 4);
  } else if (opt.family == "branch-shift") {
    if (opt.tau.size() != 2) throw UsageError("--tau needs two integers");
    std::mt19937_64 rng(opt.seed);
    BranchShiftPair pair = branch_shift_pair(rng, opt.tau[0], opt.tau[1], opt.swap);
    cfg.dim = 2;
    cfg.s = std::move(pair.s);
    cfg.t = std::move(pair.t);
    cfg.params.window = 10;
  } else {
    throw UsageError("unknown family '" + opt.family + "'");
  }
  cfg.params.n_max = 3;
  cfg.params.margin = 3;
  cfg.params.tau_range = 4;
  cfg.params.p_range = 6;
  if (opt.window) cfg.params.window = *opt.window;
  if (opt.n_max) cfg.params.n_max = *opt.n_max;
  if (opt.margin) cfg.params.margin = *opt.margin;
  if (opt.tol) cfg.params.tol = *opt.tol;
  if (opt.tau_range) cfg.params.tau_range = *opt.tau_range;
  if (opt.p_range) cfg.params.p_range = *opt.p_range;
  return cfg;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

}  // namespace cli

/// Runs one CLI invocation; args excludes the program name.
inline int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  using namespace cli;
  CLI::App app("Bilateral operator-weighted shifts: equivalence verification and construction", "wshift");
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&opt](CLI::App* sub, bool needs_config) {
    if (needs_config) sub->add_option("config", opt.config_path, "JSON config file")->required();
    sub->add_option("--N", opt.window, "truncation window N");
    sub->add_option("--n-max", opt.n_max, "largest power checked");
    sub->add_option("--margin", opt.margin, "interior margin");
    sub->add_option("--tol", opt.tol, "verdict tolerance");
    sub->add_option("--tau-range", opt.tau_range, "tau search range");
    sub->add_option("--p-range", opt.p_range, "offset range for check-diagonal");
    sub->add_option("--json", opt.json_path, "write the machine-readable report to this path");
  };

  struct Entry {
    const char* name;
    const char* help;
    Report (*run)(const ProblemConfig&);
  };
  const Entry entries[] = {
      {"describe", "print truncation, band and norms", cmd_describe},
      {"polar", "polar decomposition summary", cmd_polar},
      {"verify", "verify a zeroth column U0", cmd_verify},
      {"build", "build the intertwining unitary from U0", cmd_build},
      {"check-diagonal", "scan offsets p for a diagonal-form equivalence", cmd_check_diagonal},
      {"two-dim", "two-diagonal construction for m = 2", cmd_two_dim},
      {"certify-min-support", "lower bound on the number of diagonals for the k-diagonal example", cmd_certify},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, true);
    subs.emplace_back(sub, &e);
  }
  CLI::App* gen = app.add_subcommand("gen-example", "emit an example fixture config");
  add_common(gen, false);
  gen->add_option("--k", opt.k, "dimension k of the k-diagonal example")->check(CLI::Range(2, 64));
  gen->add_option("--family", opt.family, "k-diagonal | branch-shift");
  gen->add_option("--seed", opt.seed, "RNG seed (branch-shift)");
  gen->add_option("--tau", opt.tau, "branch offsets tau_a tau_b (branch-shift)")->expected(2)->allow_extra_args(false);
  gen->add_flag("--swap", opt.swap, "exchange branches (branch-shift)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const ProblemConfig cfg = gen_example(opt);
      const std::string text = serialize_config(cfg);
      out << text;
      if (!opt.json_path.empty()) write_text_file(opt.json_path, text);
      return kExitPass;
    }
    for (const auto& [sub, entry] : subs) {
      if (!sub->parsed()) continue;
      const ProblemConfig cfg = load(opt);
      const ojson doc = entry->run(cfg).document();
      render_text(doc, out, 0);
      if (!opt.json_path.empty()) write_text_file(opt.json_path, doc.dump(2) + "\n");
      return doc["exit_code"].get<int>();
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::InvariantError:
      case ErrorKind::InvalidArgument:
      case ErrorKind::DimensionMismatch:
      case ErrorKind::WindowTooSmall:
      case ErrorKind::InvalidK:
      case ErrorKind::GridTooShort:
        return kExitUsage;
      default:
        return kExitVerdict;
    }
  }
  return kExitUsage;
}

}  // namespace wshift

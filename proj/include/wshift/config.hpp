#pragma once

// JSON problem configuration.
//
//   {
//     "dim": 2,
//     "S": {"kind": "windowed", "lo": -6, "weights": [M, ...]}
//        | {"kind": "periodic", "weights": [M, ...]},
//     "T": <same shape, optional>,
//     "u0": [{"row": 1, "block": M}, ...],            (optional)
//     "params": {"N": 8, "n_max": 3, "margin": 3, "tol": 1e-8,
//                "tau_range": 4, "p_range": 6}        (all optional)
//   }
//
// A matrix M is a list of rows; each entry is a [re, im] pair.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "wshift/column_isometry.hpp"
#include "wshift/weight_sequence.hpp"

namespace wshift {

struct ProblemParams {
  int window = 8;
  int n_max = 3;
  std::optional<int> margin;
  double tol = kDefaultTol;
  int tau_range = 4;
  int p_range = 6;

  int effective_margin() const { return margin.value_or(n_max); }
};

struct ProblemConfig {
  Eigen::Index dim = 1;
  WeightSequence s = WeightSequence::identity_weights(1);
  std::optional<WeightSequence> t;
  std::optional<ColumnIsometry> u0;
  ProblemParams params;
};

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ParseError, field + ": " + what);
}

inline const json& require_field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) parse_fail(path, std::string("missing field '") + key + "'");
  return obj.at(key);
}

inline int read_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) parse_fail(path, "expected an integer");
  return v.get<int>();
}

inline double read_double(const json& v, const std::string& path) {
  if (!v.is_number()) parse_fail(path, "expected a number");
  return v.get<double>();
}

inline CMatrix read_matrix(const json& v, Eigen::Index dim, const std::string& path) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
    parse_fail(path, "expected " + std::to_string(dim) + " rows");
  }
  CMatrix out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      parse_fail(rpath, "expected " + std::to_string(dim) + " entries");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      const std::string epath = rpath + "[" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2) parse_fail(epath, "expected a [re, im] pair");
      out(r, c) = Complex(read_double(e[0], epath + "[0]"), read_double(e[1], epath + "[1]"));
    }
  }
  return out;
}

inline json write_matrix(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline WeightSequence read_sequence(const json& v, Eigen::Index dim, const std::string& path) {
  const std::string kind = [&] {
    const json& k = require_field(v, "kind", path);
    if (!k.is_string()) parse_fail(path + ".kind", "expected a string");
    return k.get<std::string>();
  }();
  const json& ws = require_field(v, "weights", path);
  if (!ws.is_array()) parse_fail(path + ".weights", "expected an array");
  std::vector<CMatrix> weights;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    weights.push_back(read_matrix(ws[i], dim, path + ".weights[" + std::to_string(i) + "]"));
  }
  try {
    if (kind == "periodic") return WeightSequence::periodic(dim, std::move(weights));
    if (kind == "windowed") {
      const int lo = read_int(require_field(v, "lo", path), path + ".lo");
      if (v.contains("hi") && read_int(v.at("hi"), path + ".hi") != lo + static_cast<int>(weights.size()) - 1) {
        parse_fail(path + ".hi", "does not match lo and the weight count");
      }
      return WeightSequence::windowed(dim, lo, std::move(weights));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::InvariantError, path + ": " + e.what());
  }
  parse_fail(path + ".kind", "unknown sequence kind '" + kind + "'");
}

inline json write_sequence(const WeightSequence& seq) {
  json out;
  json ws = json::array();
  for (const auto& w : seq.stored()) ws.push_back(write_matrix(w));
  if (seq.is_periodic()) {
    out["kind"] = "periodic";
  } else {
    out["kind"] = "windowed";
    out["lo"] = seq.first_index();
    out["hi"] = seq.last_index();
  }
  out["weights"] = std::move(ws);
  return out;
}

}  // namespace detail

inline ProblemConfig parse_config(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) detail::parse_fail("<root>", "expected an object");

  ProblemConfig cfg;
  const int dim = detail::read_int(detail::require_field(doc, "dim", "<root>"), "dim");
  if (dim < 1) detail::parse_fail("dim", "must be positive");
  cfg.dim = dim;
  cfg.s = detail::read_sequence(detail::require_field(doc, "S", "<root>"), dim, "S");
  if (doc.contains("T")) cfg.t = detail::read_sequence(doc.at("T"), dim, "T");
  if (doc.contains("u0")) {
    const json& u = doc.at("u0");
    if (!u.is_array()) detail::parse_fail("u0", "expected an array of {row, block}");
    std::vector<ColumnBlock> blocks;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::string path = "u0[" + std::to_string(i) + "]";
      blocks.push_back({detail::read_int(detail::require_field(u[i], "row", path), path + ".row"),
                        detail::read_matrix(detail::require_field(u[i], "block", path), dim, path + ".block")});
    }
    try {
      cfg.u0 = ColumnIsometry(dim, std::move(blocks));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvariantError, std::string("u0: ") + e.what());
    }
  }
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) detail::parse_fail("params", "expected an object");
    if (p.contains("N")) cfg.params.window = detail::read_int(p.at("N"), "params.N");
    if (p.contains("n_max")) cfg.params.n_max = detail::read_int(p.at("n_max"), "params.n_max");
    if (p.contains("margin")) cfg.params.margin = detail::read_int(p.at("margin"), "params.margin");
    if (p.contains("tol")) cfg.params.tol = detail::read_double(p.at("tol"), "params.tol");
    if (p.contains("tau_range")) cfg.params.tau_range = detail::read_int(p.at("tau_range"), "params.tau_range");
    if (p.contains("p_range")) cfg.params.p_range = detail::read_int(p.at("p_range"), "params.p_range");
  }
  return cfg;
}

inline nlohmann::json config_to_json(const ProblemConfig& cfg) {
  using detail::json;
  json doc;
  doc["dim"] = cfg.dim;
  doc["S"] = detail::write_sequence(cfg.s);
  if (cfg.t) doc["T"] = detail::write_sequence(*cfg.t);
  if (cfg.u0) {
    json u = json::array();
    for (const auto& [row, b] : cfg.u0->support()) u.push_back({{"row", row}, {"block", detail::write_matrix(b)}});
    doc["u0"] = std::move(u);
  }
  json p;
  p["N"] = cfg.params.window;
  p["n_max"] = cfg.params.n_max;
  if (cfg.params.margin) p["margin"] = *cfg.params.margin;
  p["tol"] = cfg.params.tol;
  p["tau_range"] = cfg.params.tau_range;
  p["p_range"] = cfg.params.p_range;
  doc["params"] = std::move(p);
  return doc;
}

inline std::string serialize_config(const ProblemConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

}  // namespace wshift

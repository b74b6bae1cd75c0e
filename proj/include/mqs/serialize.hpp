#pragma once

// JSON and CSV emission. Floats are written with 17 significant digits and
// object keys keep insertion order, so equal inputs give byte-identical
// files. Complex numbers are [re, im] pairs; matrices are row lists.

#include "mqs/certifier.hpp"
#include "mqs/fit.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

namespace mqs {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_json(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_json(it.value(), out, indent, depth + 1);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric rows stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && (e.is_primitive() || (e.is_array() && e.size() <= 2));
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += nl + pad;
        first = false;
        dump_json(e, out, flat ? 0 : indent, depth + 1);
      }
      if (!flat) out += nl + close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no inf/nan literals
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string to_json_text(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_json(j, out, indent, 0);
  out += "\n";
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  f << content;
  if (!f) throw Error(ErrorKind::io, "write to " + path + " failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// CSV

using CsvCell = std::variant<long long, double, std::string, bool>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

inline std::string to_csv_text(const CsvTable& t) {
  std::string out;
  auto cell = [](const CsvCell& c) -> std::string {
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell(row[i]);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear algebra values

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error(ErrorKind::invalid_input, "complex number must be an [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(ErrorKind::invalid_input, "matrix must be a nonempty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(ErrorKind::invalid_input, "ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline Json vector_to_json(const CVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

inline CVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::invalid_input, "vector must be a list");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline Json lattice_to_json(const LatticeConfig& l) {
  return Json{{"n_sites", l.n_sites()}, {"local_dim", l.local_dim()}};
}

inline LatticeConfig lattice_from_json(const Json& j) {
  return LatticeConfig(j.at("n_sites").get<int>(), j.value("local_dim", 2));
}

// ---------------------------------------------------------------------------
// Domain objects

inline Json channel_to_json(const KrausChannel& ch) {
  const auto v = validate(ch);
  Json j;
  j["kind"] = "kraus_channel";
  j["lattice"] = lattice_to_json(ch.lattice());
  j["support"] = ch.support().sites();
  j["trace_preserving"] = v.trace_preserving;
  j["valid"] = v.valid;
  Json ops = Json::array();
  for (const CMatrix& e : ch.ops()) ops.push_back(matrix_to_json(e));
  j["kraus"] = std::move(ops);
  return j;
}

inline KrausChannel channel_from_json(const Json& j) {
  try {
    const LatticeConfig lattice = lattice_from_json(j.at("lattice"));
    SubsystemSupport s(j.at("support").get<std::vector<int>>());
    std::vector<CMatrix> ops;
    for (const Json& e : j.at("kraus")) ops.push_back(matrix_from_json(e));
    return {lattice, std::move(s), std::move(ops)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed channel document: ") + e.what());
  }
}

inline Json pure_state_to_json(const PureState& psi) {
  Json j;
  j["kind"] = "pure";
  j["lattice"] = lattice_to_json(psi.lattice());
  j["amplitudes"] = vector_to_json(psi.amplitudes());
  return j;
}

inline Json density_state_to_json(const DensityState& rho) {
  Json j;
  j["kind"] = "density";
  j["lattice"] = lattice_to_json(rho.lattice());
  j["matrix"] = matrix_to_json(rho.matrix());
  return j;
}

inline PureState pure_state_from_json(const Json& j) {
  try {
    return PureState(lattice_from_json(j.at("lattice")), vector_from_json(j.at("amplitudes")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed state document: ") + e.what());
  }
}

inline DensityState density_state_from_json(const Json& j) {
  try {
    return DensityState::from_matrix(lattice_from_json(j.at("lattice")), matrix_from_json(j.at("matrix")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed state document: ") + e.what());
  }
}

inline Json additive_to_json(const AdditiveOperator& a) {
  Json rows = Json::array();
  for (Eigen::Index l = 0; l < a.coeffs().rows(); ++l) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < a.coeffs().cols(); ++k) row.push_back(a.coeffs()(l, k));
    rows.push_back(std::move(row));
  }
  return Json{{"lattice", lattice_to_json(a.lattice())}, {"coefficients", std::move(rows)}};
}

inline AdditiveOperator additive_from_json(const Json& j) {
  try {
    const LatticeConfig lattice = lattice_from_json(j.at("lattice"));
    const Json& rows = j.at("coefficients");
    RMatrix c(static_cast<Eigen::Index>(rows.size()), basis_size(lattice.local_dim()));
    for (std::size_t l = 0; l < rows.size(); ++l) {
      if (static_cast<Eigen::Index>(rows[l].size()) != c.cols())
        throw Error(ErrorKind::invalid_input, "coefficient row has wrong length");
      for (std::size_t k = 0; k < rows[l].size(); ++k)
        c(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = rows[l][k].get<double>();
    }
    return {lattice, c};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed operator document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const TradeoffReport& r) {
  Json j;
  j["inequality"] = r.inequality;
  j["applicable"] = r.applicable;
  if (!r.note.empty()) j["note"] = r.note;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["G"] = r.G;
  j["volume_S"] = r.volume_S;
  j["tightness_ratio"] = r.tightness_ratio;
  Json comp = Json::object();
  for (const auto& [k, v] : r.components) comp[k] = v;
  j["components"] = std::move(comp);
  if (!r.diagnostics.empty()) {
    Json diag = Json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = v;
    j["diagnostics"] = std::move(diag);
  }
  return j;
}

inline Json to_json(const XiReport& r) {
  return Json{{"applicable", r.applicable},
              {"G", r.G},
              {"volume_S", r.volume_S},
              {"xi1", r.xi1},
              {"xi2", r.xi2},
              {"xi3", r.xi3},
              {"bound1", r.bound1},
              {"bound2", r.bound2},
              {"bound3", r.bound3},
              {"lhs", r.lhs},
              {"assembly_rhs", r.assembly_rhs},
              {"decomposition_residual", r.decomposition_residual}};
}

inline Json to_json(const SupportBoundReport& r) {
  return Json{{"bound", r.bound},
              {"max_ratio", r.max_ratio},
              {"commutator_norms", r.commutator_norms},
              {"violations", r.violations}};
}

inline Json to_json(const ExponentFit& f) {
  Json pts = Json::array();
  for (const auto& [n, v] : f.points) pts.push_back(Json::array({n, v}));
  return Json{{"exponent", f.exponent},
              {"stderr", f.std_error},
              {"intercept", f.intercept},
              {"floor_applied", f.floor_applied},
              {"points", std::move(pts)}};
}

inline Json to_json(const IndexPReport& r) {
  return Json{{"n_sites", r.optimal_operator.lattice().n_sites()},
              {"max_variance", r.max_variance},
              {"vcm_upper_bound", r.vcm_upper_bound},
              {"vcm_top_eigenvalue", r.vcm_top_eigenvalue},
              {"refinement_steps", r.refinement_steps},
              {"optimal_operator", additive_to_json(r.optimal_operator)}};
}

inline Json to_json(const IndexQReport& r) {
  return Json{{"n_sites", r.best_operator.lattice().n_sites()},
              {"best_value", r.best_value},
              {"best_raw", r.best_raw},
              {"floor_active", r.floor_active},
              {"best_origin", r.best_origin},
              {"evaluations", r.evaluations},
              {"best_operator", additive_to_json(r.best_operator)}};
}

}  // namespace mqs

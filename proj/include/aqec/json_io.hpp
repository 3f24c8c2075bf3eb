#pragma once

// JSON formats. Matrices are row-major arrays of rows, each entry a
// [re, im] pair. Doubles are written in shortest round-trip form, so
// finite values survive a write/read cycle bit for bit.
//
//   channel: {"dim_in": n, "dim_out": m, "kraus": [matrix, ...]}
//   code:    the channel format holding the single isometry V
//   state:   {"dim": d, "matrix": matrix}
//
// Requires nlohmann/json (vendor/json.hpp) on the include path.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aqec/correctability.hpp"
#include "aqec/recovery.hpp"

namespace aqec::io {

using json = nlohmann::json;

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error("parse", "matrix must be a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw Error("parse", "matrix row must be a non-empty array");
  const auto cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw Error("parse", "ragged matrix rows");
    for (Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw Error("parse", "matrix entries must be [re, im] number pairs");
      }
      m(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline Index dim_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer()) {
    throw Error("parse", std::string("missing integer field '") + key + "'");
  }
  const auto v = j[key].get<long long>();
  if (v <= 0) throw Error("bad-dims", std::string("field '") + key + "' must be positive");
  return static_cast<Index>(v);
}

inline json to_json(const Channel& c) {
  json ks = json::array();
  for (const Matrix& k : c.kraus()) ks.push_back(to_json(k));
  return {{"dim_in", c.dim_in()}, {"dim_out", c.dim_out()}, {"kraus", std::move(ks)}};
}

/// Dimension mismatches raise "bad-dims", everything else "parse".
inline std::vector<Matrix> kraus_from_json(const json& j, Index& din, Index& dout) {
  din = dim_field(j, "dim_in");
  dout = dim_field(j, "dim_out");
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty()) throw Error("parse", "missing 'kraus' array");
  std::vector<Matrix> ks;
  for (const json& k : j["kraus"]) {
    Matrix m = matrix_from_json(k);
    if (m.rows() != dout || m.cols() != din) throw Error("bad-dims", "Kraus operator shape disagrees with dim_in/dim_out");
    ks.push_back(std::move(m));
  }
  return ks;
}

/// Runs a validating constructor; content that fails validation for any
/// reason other than shape is reported as a parse error.
template <class F>
auto validated(F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const Error& e) {
    if (e.code() == "bad-dims" || e.code() == "parse") throw;
    throw Error("parse", e.what());
  }
}

inline Channel channel_from_json(const json& j) {
  Index din = 0;
  Index dout = 0;
  std::vector<Matrix> ks = kraus_from_json(j, din, dout);
  return validated([&] { return Channel::from_kraus(std::move(ks)); });
}

inline json to_json(const CodeIsometry& code) {
  return {{"dim_in", code.dim_logical()}, {"dim_out", code.dim_physical()}, {"kraus", json::array({to_json(code.v())})}};
}

inline CodeIsometry code_from_json(const json& j) {
  Index din = 0;
  Index dout = 0;
  const std::vector<Matrix> ks = kraus_from_json(j, din, dout);
  if (ks.size() != 1) throw Error("parse", "a code holds exactly one isometry");
  return validated([&] { return CodeIsometry::from_matrix(ks.front()); });
}

inline json to_json(const DensityMatrix& rho) {
  return {{"dim", rho.dim()}, {"matrix", to_json(rho.matrix())}};
}

inline DensityMatrix state_from_json(const json& j) {
  const Index d = dim_field(j, "dim");
  if (!j.contains("matrix")) throw Error("parse", "missing 'matrix'");
  const Matrix m = matrix_from_json(j["matrix"]);
  if (m.rows() != d || m.cols() != d) throw Error("bad-dims", "matrix shape disagrees with dim");
  return validated([&] { return DensityMatrix::from_matrix(m); });
}

inline json to_json(const KLReport& r) {
  return {{"lambda", to_json(r.lambda)}, {"epsilon", r.epsilon}, {"exact", r.exact}, {"sigma", to_json(r.sigma)}};
}

inline json to_json(const RecoveryEstimate& e) {
  json j = {{"delta", e.delta},
            {"fidelity_dual", e.fidelity_dual},
            {"lower_bound", e.lower_bound},
            {"upper_bound", e.upper_bound},
            {"converged", e.converged},
            {"sigma", to_json(e.sigma)},
            {"argmin_state", to_json(e.argmin_state)}};
  return j;
}

inline json to_json(const GuaranteeCheck& g) {
  return {{"achieved_distance", g.achieved_distance}, {"passes", g.passes}};
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error("parse", e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("parse", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace aqec::io

#pragma once

// JSON (de)serialization for network instances and quantizers, and small
// file helpers shared by the CLI and the tests.
//
// Instance schema: an object with integer fields K, L, M, N; "H" as a nested
// array indexed [l][k][row][col] of [re, im] pairs (N x M per matrix);
// "Sigma" indexed [l][row][col] (N x N); "Kx" indexed [k][row][col] (M x M);
// "P" (length K) and "C" (length L) as arrays of reals. A quantizer file
// holds either "B" or "Q", indexed [l][row][col] of [re, im] pairs.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cran/model.hpp"

namespace cran {

using Json = nlohmann::json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline Complex complex_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(path + ": expected a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Matrix matrix_from_json(const Json& j, int rows, int cols,
                               const std::string& path) {
  if (!j.is_array() || (int)j.size() != rows) {
    std::ostringstream os;
    os << path << ": expected " << rows << " rows, got "
       << (j.is_array() ? std::to_string(j.size()) : std::string("non-array"));
    throw ParseError(os.str());
  }
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || (int)j[r].size() != cols) {
      std::ostringstream os;
      os << path << "[" << r << "]: expected " << cols << " columns";
      throw ParseError(os.str());
    }
    for (int c = 0; c < cols; ++c) {
      std::ostringstream os;
      os << path << "[" << r << "][" << c << "]";
      m(r, c) = complex_from_json(j[r][c], os.str());
    }
  }
  return m;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline int int_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_number_integer())
    throw ParseError(std::string("missing or non-integer field: ") + name);
  return j[name].get<int>();
}
}  // namespace detail

inline NetworkInstance instance_from_json(const Json& j) {
  NetworkInstance inst;
  inst.K = detail::int_field(j, "K");
  inst.L = detail::int_field(j, "L");
  inst.M = detail::int_field(j, "M");
  inst.N = detail::int_field(j, "N");
  if (inst.K < 1 || inst.L < 1 || inst.M < 1 || inst.N < 1)
    throw ParseError("K, L, M, N must all be >= 1");
  for (const char* name : {"H", "Sigma", "Kx", "P", "C"})
    if (!j.contains(name) || !j[name].is_array())
      throw ParseError(std::string("missing or non-array field: ") + name);
  if ((int)j["H"].size() != inst.L)
    throw ParseError("H: expected " + std::to_string(inst.L) + " BS entries");
  inst.H.assign(inst.L, std::vector<Matrix>(inst.K));
  for (int l = 0; l < inst.L; ++l) {
    if (!j["H"][l].is_array() || (int)j["H"][l].size() != inst.K) {
      std::ostringstream os;
      os << "H[" << l << "]: expected " << inst.K << " user entries";
      throw ParseError(os.str());
    }
    for (int k = 0; k < inst.K; ++k) {
      std::ostringstream os;
      os << "H[" << l << "][" << k << "]";
      inst.H[l][k] =
          detail::matrix_from_json(j["H"][l][k], inst.N, inst.M, os.str());
    }
  }
  if ((int)j["Sigma"].size() != inst.L)
    throw ParseError("Sigma: expected " + std::to_string(inst.L) + " entries");
  for (int l = 0; l < inst.L; ++l) {
    std::ostringstream os;
    os << "Sigma[" << l << "]";
    inst.Sigma.push_back(
        detail::matrix_from_json(j["Sigma"][l], inst.N, inst.N, os.str()));
  }
  if ((int)j["Kx"].size() != inst.K)
    throw ParseError("Kx: expected " + std::to_string(inst.K) + " entries");
  for (int k = 0; k < inst.K; ++k) {
    std::ostringstream os;
    os << "Kx[" << k << "]";
    inst.Kx.push_back(
        detail::matrix_from_json(j["Kx"][k], inst.M, inst.M, os.str()));
  }
  if ((int)j["P"].size() != inst.K)
    throw ParseError("P: expected " + std::to_string(inst.K) + " entries");
  for (const auto& v : j["P"]) inst.P.push_back(v.get<double>());
  if ((int)j["C"].size() != inst.L)
    throw ParseError("C: expected " + std::to_string(inst.L) + " entries");
  for (const auto& v : j["C"]) inst.C.push_back(v.get<double>());
  return inst;
}

inline Json instance_to_json(const NetworkInstance& inst) {
  Json j;
  j["K"] = inst.K;
  j["L"] = inst.L;
  j["M"] = inst.M;
  j["N"] = inst.N;
  Json h = Json::array();
  for (int l = 0; l < inst.L; ++l) {
    Json row = Json::array();
    for (int k = 0; k < inst.K; ++k)
      row.push_back(detail::matrix_to_json(inst.H[l][k]));
    h.push_back(row);
  }
  j["H"] = h;
  Json sig = Json::array(), kx = Json::array();
  for (const Matrix& s : inst.Sigma) sig.push_back(detail::matrix_to_json(s));
  for (const Matrix& k : inst.Kx) kx.push_back(detail::matrix_to_json(k));
  j["Sigma"] = sig;
  j["Kx"] = kx;
  j["P"] = inst.P;
  j["C"] = inst.C;
  return j;
}

/// Quantizer file: {"B": [[matrix]...]} or {"Q": [[matrix]...]}.
inline QuantizerB quantizer_from_json(const Json& j,
                                      const NetworkInstance& inst) {
  bool has_b = j.contains("B"), has_q = j.contains("Q");
  if (has_b == has_q)
    throw ParseError("quantizer file must contain exactly one of B or Q");
  const char* name = has_b ? "B" : "Q";
  const Json& arr = j[name];
  if (!arr.is_array() || (int)arr.size() != inst.L)
    throw ParseError(std::string(name) + ": expected " +
                     std::to_string(inst.L) + " matrices");
  QuantizerB b;
  for (int l = 0; l < inst.L; ++l) {
    std::ostringstream os;
    os << name << "[" << l << "]";
    Matrix m = detail::matrix_from_json(arr[l], inst.N, inst.N, os.str());
    b.B.push_back(has_b ? hermitize(m, 1e-7)
                        : b_from_q(m, inst.Sigma[l]));
  }
  return b;
}

inline Json quantizer_to_json(const QuantizerB& b) {
  Json arr = Json::array();
  for (const Matrix& m : b.B) arr.push_back(detail::matrix_to_json(m));
  return Json{{"B", arr}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace cran

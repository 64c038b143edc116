#pragma once

// JSON persistence for SVE objects:
//
//   { "name": string, "tol": number, "x_domain": [lo, hi], "y_domain": [lo, hi],
//     "sigma": [...], "u": [[coeffs...], ...], "v": [[coeffs...], ...] }
//
// Numbers are written with 17 significant digits so that every double
// round-trips exactly.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mercer/errors.hpp"
#include "mercer/sve.hpp"

namespace mercer {

namespace detail {

inline void write_number(std::ostream& os, double v) {
  if (!std::isfinite(v)) throw InvalidArgument("save_sve: non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

inline void write_array(std::ostream& os, std::span<const double> values) {
  os << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) os << ',';
    write_number(os, values[i]);
  }
  os << ']';
}

inline void write_columns(std::ostream& os, const Quasimatrix& Q) {
  os << "[";
  for (std::size_t j = 0; j < Q.cols(); ++j) {
    os << (j > 0 ? ",\n    " : "\n    ");
    write_array(os, Q[j].coeffs());
  }
  os << (Q.cols() > 0 ? "\n  ]" : "]");
}

inline std::vector<double> read_numbers(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw ParseError(std::string("SVE file: '") + field + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string("SVE file: '") + field + "' must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline Interval read_domain(const nlohmann::json& j, const char* field) {
  const auto v = read_numbers(j, field);
  if (v.size() != 2) throw ParseError(std::string("SVE file: '") + field + "' must have two entries");
  try {
    return Interval(v[0], v[1]);
  } catch (const InvalidArgument& e) {
    throw IntegrityError(std::string("SVE file: '") + field + "': " + e.what());
  }
}

inline Quasimatrix read_columns(const nlohmann::json& j, const char* field, const Interval& domain) {
  if (!j.is_array()) throw ParseError(std::string("SVE file: '") + field + "' must be an array of arrays");
  std::vector<ChebSeries> cols;
  cols.reserve(j.size());
  for (const auto& c : j) {
    auto coeffs = read_numbers(c, field);
    try {
      cols.emplace_back(std::move(coeffs), domain);
    } catch (const InvalidArgument& e) {
      throw IntegrityError(std::string("SVE file: '") + field + "': " + e.what());
    }
  }
  return Quasimatrix(domain, std::move(cols));
}

inline const nlohmann::json& require_field(const nlohmann::json& doc, const char* field) {
  const auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(std::string("SVE file: missing field '") + field + "'");
  return *it;
}

}  // namespace detail

inline void write_sve(std::ostream& os, const SVE& e) {
  os << "{\n  \"name\": " << nlohmann::json(e.provenance.kernel).dump() << ",\n  \"tol\": ";
  detail::write_number(os, e.provenance.tol);
  const double xd[2] = {e.U.domain().lo(), e.U.domain().hi()};
  const double yd[2] = {e.V.domain().lo(), e.V.domain().hi()};
  os << ",\n  \"x_domain\": ";
  detail::write_array(os, xd);
  os << ",\n  \"y_domain\": ";
  detail::write_array(os, yd);
  os << ",\n  \"sigma\": ";
  detail::write_array(os, e.sigma);
  os << ",\n  \"u\": ";
  detail::write_columns(os, e.U);
  os << ",\n  \"v\": ";
  detail::write_columns(os, e.V);
  os << "\n}\n";
}

/// Parses and validates an SVE document; see validate() for the invariants.
inline SVE read_sve(std::istream& is) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("SVE file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("SVE file: top level must be an object");

  SVE e;
  const auto& name = detail::require_field(doc, "name");
  if (!name.is_string()) throw ParseError("SVE file: 'name' must be a string");
  e.provenance.kernel = name.get<std::string>();
  const auto& tol = detail::require_field(doc, "tol");
  if (!tol.is_number()) throw ParseError("SVE file: 'tol' must be a number");
  e.provenance.tol = tol.get<double>();

  const Interval xd = detail::read_domain(detail::require_field(doc, "x_domain"), "x_domain");
  const Interval yd = detail::read_domain(detail::require_field(doc, "y_domain"), "y_domain");
  e.sigma = detail::read_numbers(detail::require_field(doc, "sigma"), "sigma");
  e.U = detail::read_columns(detail::require_field(doc, "u"), "u", xd);
  e.V = detail::read_columns(detail::require_field(doc, "v"), "v", yd);
  e.provenance.skeleton_rank = e.sigma.size();
  validate(e);
  return e;
}

inline void save_sve(const SVE& e, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write_sve(os, e);
  os.flush();
  if (!os) throw std::ios_base::failure("failed writing '" + path + "'");
}

inline SVE load_sve(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::ios_base::failure("cannot open '" + path + "' for reading");
  return read_sve(is);
}

}  // namespace mercer

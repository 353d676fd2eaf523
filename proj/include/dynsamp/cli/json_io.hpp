#ifndef DYNSAMP_CLI_JSON_IO_HPP
#define DYNSAMP_CLI_JSON_IO_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "dynsamp/error.hpp"
#include "dynsamp/frames.hpp"
#include "dynsamp/numkit.hpp"

namespace dynsamp::cli {

using json = nlohmann::json;

/// Finite reals as numbers; inf/nan as the strings "inf", "-inf", "nan".
inline json real_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double real_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorKind::config_error, what + ": expected a real number");
}

/// Complex numbers are [re, im]; plain numbers are accepted on input.
inline json complex_to_json(Complex z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

inline Complex complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(ErrorKind::config_error, what + ": expected a number or [re, im]");
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::config_error, what + ": expected a nonempty list");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = complex_from_json(j[i], what + "[" + std::to_string(i) + "]");
  }
  return v;
}

/// Row-major list of rows.
inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

inline json reals_to_json(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(real_to_json(x));
  return out;
}

inline json reals_to_json(const RealVector& xs) {
  json out = json::array();
  for (Index i = 0; i < xs.size(); ++i) out.push_back(real_to_json(xs(i)));
  return out;
}

inline json bounds_to_json(const frames::BoundsReport& b) {
  return {{"lower_bound", real_to_json(b.lower_bound)},
          {"upper_bound", real_to_json(b.upper_bound)},
          {"rank", b.rank},
          {"spans_ambient", b.spans_ambient},
          {"classification", std::string(frames::to_string(b.classification))}};
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) out[static_cast<std::size_t>(i)] = digits[x & 0xf];
  return out;
}

}  // namespace dynsamp::cli

#endif  // DYNSAMP_CLI_JSON_IO_HPP

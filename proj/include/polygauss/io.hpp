#pragma once

// Kernel spec files: one JSON document
//   {"n": 1,
//    "triple": {"A": [..], "B": [..], "C": [..]},        row-major n*n, or nested rows
//    "poly": [{"exponents": [..2n..], "coeff": [re, im]}], coeff may be a plain number
//    "norm": 1.0,                                        optional, default 1
//    "partition": {"part1": [1-based indices]}}          optional
// Parse errors carry the JSON path of the offending field.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polygauss/entangle.hpp"

namespace polygauss {

using json = nlohmann::json;

struct KernelSpec {
  std::size_t n = 0;
  GaussianTriple<double> triple;
  MultiPoly<std::complex<double>> poly;
  std::optional<double> norm;
  std::optional<std::vector<std::size_t>> part1;

  bool operator==(const KernelSpec&) const = default;
};

namespace detail {

[[noreturn]] inline void spec_fail(const std::string& path, const std::string& what) {
  throw input_error("spec: " + path + ": " + what);
}

inline double spec_number(const json& j, const std::string& path) {
  if (!j.is_number()) spec_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) spec_fail(path, "not finite");
  return v;
}

inline std::size_t spec_index(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) spec_fail(path, "expected a nonnegative integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0) spec_fail(path, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

inline const json& spec_field(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) spec_fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline Matrix<double> spec_matrix(const json& j, std::size_t n, const std::string& path) {
  Matrix<double> m(n, n);
  if (!j.is_array()) spec_fail(path, "expected an array");
  if (j.size() == n * n && (n == 0 || !j.front().is_array())) {
    for (std::size_t k = 0; k < n * n; ++k) m(k / n, k % n) = spec_number(j[k], path + "[" + std::to_string(k) + "]");
    return m;
  }
  if (j.size() != n) spec_fail(path, "expected " + std::to_string(n * n) + " entries (row-major) or " + std::to_string(n) + " rows");
  for (std::size_t r = 0; r < n; ++r) {
    const auto rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != n) spec_fail(rp, "expected a row of " + std::to_string(n) + " numbers");
    for (std::size_t c = 0; c < n; ++c) m(r, c) = spec_number(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline RealSymMatrix<double> spec_sym(const json& j, std::size_t n, const std::string& path) {
  try {
    return RealSymMatrix<double>(spec_matrix(j, n, path));
  } catch (const input_error& e) {
    if (std::string(e.what()).rfind("spec:", 0) == 0) throw;
    spec_fail(path, e.what());
  }
}

inline json matrix_json(const Matrix<double>& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

}  // namespace detail

inline KernelSpec parse_spec(const json& j) {
  using namespace detail;
  if (!j.is_object()) spec_fail("$", "expected an object");
  KernelSpec s;
  s.n = spec_index(spec_field(j, "n", ""), "n");
  if (s.n == 0) spec_fail("n", "must be positive");
  const auto& t = spec_field(j, "triple", "");
  if (!t.is_object()) spec_fail("triple", "expected an object");
  if (t.contains("n") && spec_index(t["n"], "triple.n") != s.n) spec_fail("triple.n", "disagrees with n");
  const auto A = spec_sym(spec_field(t, "A", "triple"), s.n, "triple.A");
  const auto B = spec_matrix(spec_field(t, "B", "triple"), s.n, "triple.B");
  const auto C = spec_sym(spec_field(t, "C", "triple"), s.n, "triple.C");
  s.triple = GaussianTriple<double>(A, B, C);
  if (!s.triple.kernel_valid()) spec_fail("triple", "A and C must be positive definite");

  s.poly = MultiPoly<std::complex<double>>(2 * s.n);
  if (!j.contains("poly")) {
    s.poly = MultiPoly<std::complex<double>>::constant(2 * s.n, 1.0);
  } else {
    const auto& p = j["poly"];
    if (!p.is_array()) spec_fail("poly", "expected an array of terms");
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto tp = "poly[" + std::to_string(k) + "]";
      if (!p[k].is_object()) spec_fail(tp, "expected an object");
      const auto& ex = spec_field(p[k], "exponents", tp);
      if (!ex.is_array() || ex.size() != 2 * s.n)
        spec_fail(tp + ".exponents", "expected " + std::to_string(2 * s.n) + " exponents (x_1..x_n, y_1..y_n)");
      Exponent e;
      for (std::size_t i = 0; i < ex.size(); ++i)
        e.push_back(static_cast<unsigned>(spec_index(ex[i], tp + ".exponents[" + std::to_string(i) + "]")));
      const auto& c = spec_field(p[k], "coeff", tp);
      std::complex<double> v;
      if (c.is_array()) {
        if (c.size() != 2) spec_fail(tp + ".coeff", "expected [re, im]");
        v = {spec_number(c[0], tp + ".coeff[0]"), spec_number(c[1], tp + ".coeff[1]")};
      } else {
        v = spec_number(c, tp + ".coeff");
      }
      s.poly.add_term(e, v);
    }
    if (s.poly.is_zero()) spec_fail("poly", "polynomial is zero");
  }
  if (j.contains("norm")) {
    s.norm = spec_number(j["norm"], "norm");
    if (!(*s.norm > 0)) spec_fail("norm", "must be positive");
  }
  if (j.contains("partition")) {
    const auto& pt = j["partition"];
    if (!pt.is_object()) spec_fail("partition", "expected an object");
    const auto& p1 = spec_field(pt, "part1", "partition");
    if (!p1.is_array()) spec_fail("partition.part1", "expected an array of indices");
    std::vector<std::size_t> part1;
    for (std::size_t k = 0; k < p1.size(); ++k)
      part1.push_back(spec_index(p1[k], "partition.part1[" + std::to_string(k) + "]"));
    try {
      part1 = Bipartition(s.n, part1).part1();
    } catch (const input_error& e) {
      spec_fail("partition.part1", e.what());
    }
    s.part1 = part1;
  }
  return s;
}

/// Parses text; JSON syntax errors report line and column.
inline KernelSpec parse_spec_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw input_error("spec: line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
  return parse_spec(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline KernelSpec load_spec(const std::string& path) { return parse_spec_text(read_file(path)); }

/// Canonical form: keys sorted, matrices row-major, terms in graded-lex order,
/// numbers in shortest round-trip decimal.
inline json to_json(const KernelSpec& s) {
  json j;
  j["n"] = s.n;
  j["triple"] = {{"n", s.n},
                 {"A", detail::matrix_json(s.triple.A.matrix())},
                 {"B", detail::matrix_json(s.triple.B)},
                 {"C", detail::matrix_json(s.triple.C.matrix())}};
  json terms = json::array();
  for (const auto& [e, c] : s.poly.terms()) terms.push_back({{"exponents", e}, {"coeff", {c.real(), c.imag()}}});
  j["poly"] = terms;
  if (s.norm) j["norm"] = *s.norm;
  if (s.part1) j["partition"] = {{"part1", *s.part1}};
  return j;
}

inline std::string fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << h;
  return ss.str();
}

inline std::string checksum(const KernelSpec& s) { return fnv1a64(to_json(s).dump()); }

/// Self-adjointness defects up to 1e-10 are symmetrised away; larger ones are input errors.
inline PolyGaussianKernel<double> kernel_from_spec(const KernelSpec& s) {
  return PolyGaussianKernel<double>(s.poly, s.triple, s.norm.value_or(1.0));
}

inline KernelSpec spec_from_kernel(const PolyGaussianKernel<double>& k) {
  KernelSpec s;
  s.n = k.n();
  s.triple = k.triple();
  s.poly = k.poly();
  s.norm = k.norm();
  return s;
}

}  // namespace polygauss

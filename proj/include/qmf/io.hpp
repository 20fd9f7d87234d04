#ifndef QMF_IO_HPP_
#define QMF_IO_HPP_

// JSON, CSV and SVG formats for the library's value types.
//
// Complex numbers are [re, im] pairs. Numbers are written with 17 significant
// digits so that a write/read round trip is exact.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qmf/cascade.hpp"
#include "qmf/design.hpp"
#include "qmf/errors.hpp"
#include "qmf/filterbank.hpp"
#include "qmf/laurent.hpp"
#include "qmf/operators.hpp"
#include "qmf/transfer.hpp"

namespace qmf {

using json = nlohmann::json;

/// Malformed input. `line()` is 1-based, 0 when the problem is structural
/// rather than tied to a line; `where()` is a JSON pointer or column name.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& where, const std::string& msg)
      : Error(format(source, line, where, msg)), line_(line), where_(where), message_(msg) {}
  int line() const noexcept { return line_; }
  const std::string& where() const noexcept { return where_; }
  const std::string& message() const noexcept { return message_; }

 private:
  static std::string format(const std::string& source, int line, const std::string& where, const std::string& msg) {
    std::string s = source;
    if (line > 0) s += ":" + std::to_string(line);
    if (!where.empty()) s += " (" + where + ")";
    return s + ": " + msg;
  }
  int line_;
  std::string where_;
  std::string message_;
};

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError("json", 0, path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("json", 0, path + "/" + key, std::string("missing key \"") + key + "\"");
  return *it;
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError("json", 0, path, "expected a number");
  return j.get<double>();
}

inline int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError("json", 0, path, "expected an integer");
  return j.get<int>();
}

}  // namespace detail

inline json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& path = "") {
  if (j.is_number()) return j.get<double>();
  if (!j.is_array() || j.size() != 2) throw ParseError("json", 0, path, "expected [re, im]");
  return {detail::number_at(j[0], path + "/0"), detail::number_at(j[1], path + "/1")};
}

inline json to_json(const LaurentPoly& p) {
  json c = json::array();
  for (const cplx& v : p.coeffs()) c.push_back(to_json(v));
  return {{"min_deg", p.is_zero() ? 0 : p.min_deg()}, {"coeffs", c}};
}

inline LaurentPoly laurent_from_json(const json& j, const std::string& path = "") {
  const int lo = detail::int_at(detail::require(j, "min_deg", path), path + "/min_deg");
  const json& c = detail::require(j, "coeffs", path);
  if (!c.is_array()) throw ParseError("json", 0, path + "/coeffs", "expected an array");
  std::vector<cplx> v;
  for (std::size_t i = 0; i < c.size(); ++i) v.push_back(complex_from_json(c[i], path + "/coeffs/" + std::to_string(i)));
  return LaurentPoly(lo, std::move(v));
}

inline json to_json(const MatLaurentPoly& a) {
  json cs = json::array();
  for (const CMatrix& m : a.coeffs()) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
      rows.push_back(row);
    }
    cs.push_back(rows);
  }
  return {{"n", a.dim()}, {"min_deg", a.is_zero() ? 0 : a.min_deg()}, {"coeffs", cs}};
}

inline MatLaurentPoly mat_laurent_from_json(const json& j, const std::string& path = "") {
  const int n = detail::int_at(detail::require(j, "n", path), path + "/n");
  const int lo = detail::int_at(detail::require(j, "min_deg", path), path + "/min_deg");
  if (n < 1) throw ParseError("json", 0, path + "/n", "dimension must be positive");
  const json& cs = detail::require(j, "coeffs", path);
  if (!cs.is_array()) throw ParseError("json", 0, path + "/coeffs", "expected an array");
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const std::string pk = path + "/coeffs/" + std::to_string(k);
    if (!cs[k].is_array() || cs[k].size() != static_cast<std::size_t>(n))
      throw ParseError("json", 0, pk, "expected " + std::to_string(n) + " rows");
    CMatrix m(n, n);
    for (int r = 0; r < n; ++r) {
      const json& row = cs[k][static_cast<std::size_t>(r)];
      const std::string pr = pk + "/" + std::to_string(r);
      if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
        throw ParseError("json", 0, pr, "expected " + std::to_string(n) + " entries");
      for (int c = 0; c < n; ++c)
        m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], pr + "/" + std::to_string(c));
    }
    out.push_back(std::move(m));
  }
  return MatLaurentPoly(n, lo, std::move(out));
}

inline json to_json(const FilterBank& bank) {
  json f = json::array();
  for (const auto& m : bank.filters()) f.push_back(to_json(m));
  return {{"N", bank.scale()}, {"filters", f}, {"convention", "sqrtN"}};
}

inline FilterBank bank_from_json(const json& j, const std::string& path = "") {
  const int n = detail::int_at(detail::require(j, "N", path), path + "/N");
  if (j.contains("convention") && j["convention"] != "sqrtN")
    throw ParseError("json", 0, path + "/convention", "only the \"sqrtN\" convention is supported");
  const json& f = detail::require(j, "filters", path);
  if (!f.is_array()) throw ParseError("json", 0, path + "/filters", "expected an array");
  std::vector<LaurentPoly> filters;
  for (std::size_t i = 0; i < f.size(); ++i) filters.push_back(laurent_from_json(f[i], path + "/filters/" + std::to_string(i)));
  try {
    return FilterBank(n, std::move(filters));
  } catch (const ValidationError& e) {
    throw ParseError("json", 0, path, e.what());
  }
}

inline json to_json(const LiftingStep& s) {
  json j = {{"kind", to_string(s.kind())}};
  if (s.kind() == LiftingStep::Kind::diag)
    j["k"] = to_json(s.k());
  else
    j["poly"] = to_json(s.poly());
  return j;
}

inline LiftingStep lifting_step_from_json(const json& j, const std::string& path = "") {
  const json& kind = detail::require(j, "kind", path);
  if (kind == "lower") return LiftingStep::lower(laurent_from_json(detail::require(j, "poly", path), path + "/poly"));
  if (kind == "upper") return LiftingStep::upper(laurent_from_json(detail::require(j, "poly", path), path + "/poly"));
  if (kind == "diag") {
    const cplx k = complex_from_json(detail::require(j, "k", path), path + "/k");
    if (k == cplx{}) throw ParseError("json", 0, path + "/k", "diagonal step needs a nonzero k");
    return LiftingStep::diag(k);
  }
  throw ParseError("json", 0, path + "/kind", "kind must be lower, upper or diag");
}

inline json to_json(const SpectrumReport& r) {
  json ev = json::array(), per = json::array();
  for (cplx l : r.eigenvalues) ev.push_back(to_json(l));
  for (cplx l : r.peripheral) per.push_back(to_json(l));
  return {{"eigenvalues", ev}, {"pf_holds", r.pf_holds}, {"peripheral", per}};
}

inline ProjectionParam projection_param_from_json(const json& j, const std::string& path = "") {
  ProjectionParam p{detail::number_at(detail::require(j, "lambda", path), path + "/lambda"),
                    detail::number_at(detail::require(j, "theta", path), path + "/theta")};
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ParseError("json", 0, path, e.what());
  }
  return p;
}

/// Parses text, reporting syntax errors with their line number.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i)
      if (text[i] == '\n') ++line;
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(source, line, "", msg);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Reads a JSON file; structural errors are re-raised with the file name.
template <class F>
auto load_json_file(const std::string& path, F&& convert) {
  const json j = parse_json(read_file(path), path);
  try {
    return convert(j);
  } catch (const ParseError& e) {
    if (e.line() > 0) throw;
    throw ParseError(path, 0, e.where(), e.message());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write to " + path + " failed");
}

// ---------------------------------------------------------------------------
// CSV

inline std::string signal_to_csv(const Signal& s) {
  std::string out = "index,re,im\n";
  for (int n = s.offset(); !s.empty() && n <= s.last(); ++n)
    out += std::to_string(n) + "," + fmt_double(s[n].real()) + "," + fmt_double(s[n].imag()) + "\n";
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& source, int line, const std::string& col) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParseError(source, line, col, "not a number: \"" + s + "\"");
  return v;
}

}  // namespace detail

/// CSV with header index,re,im. Indices must be consecutive; im may be omitted.
inline Signal signal_from_csv(const std::string& text, const std::string& source = "csv") {
  std::istringstream in(text);
  std::string line;
  int lineno = 0, offset = 0, expect = 0;
  bool header = false, first = true;
  std::vector<cplx> samples;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv(line);
    if (!header) {
      if (f.empty() || f[0] != "index") throw ParseError(source, lineno, "", "expected header index,re,im");
      header = true;
      continue;
    }
    if (f.size() < 2 || f.size() > 3) throw ParseError(source, lineno, "", "expected 2 or 3 columns");
    std::size_t used = 0;
    int idx = 0;
    try {
      idx = std::stoi(f[0], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != f[0].size()) throw ParseError(source, lineno, "index", "not an integer: \"" + f[0] + "\"");
    if (first) {
      offset = expect = idx;
      first = false;
    }
    if (idx != expect) throw ParseError(source, lineno, "index", "indices must be consecutive");
    ++expect;
    const double re = detail::parse_double(f[1], source, lineno, "re");
    const double im = f.size() == 3 ? detail::parse_double(f[2], source, lineno, "im") : 0.0;
    samples.emplace_back(re, im);
  }
  if (!header) throw ParseError(source, lineno, "", "empty file");
  return Signal(offset, std::move(samples));
}

inline std::string grid_to_csv(const GridFunction& g) {
  std::string out = "x,value_re,value_im\n";
  for (int k = g.support_lo; k <= g.support_hi; ++k) {
    const cplx v = g.at(k);
    out += fmt_double(g.x(k)) + "," + fmt_double(v.real()) + "," + fmt_double(v.imag()) + "\n";
  }
  return out;
}

/// Static SVG polyline of (x, Re value).
inline std::string grid_to_svg(const GridFunction& g, int width = 800, int height = 400) {
  double xmin = 0.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  if (!g.empty()) {
    xmin = g.x(g.support_lo);
    xmax = g.x(g.support_hi);
    ymin = ymax = g.values.front().real();
    for (const cplx& v : g.values) {
      ymin = std::min(ymin, v.real());
      ymax = std::max(ymax, v.real());
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return (x - xmin) / (xmax - xmin) * width; };
  auto py = [&](double y) { return (ymax - y) / (ymax - ymin) * height; };
  std::string pts;
  char buf[64];
  for (int k = g.support_lo; k <= g.support_hi; ++k) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(g.x(k)), py(g.at(k).real()));
    pts += buf;
  }
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                    std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                    std::to_string(height) + "\">\n";
  std::snprintf(buf, sizeof buf, "%.3f", py(0.0));
  out += "<line x1=\"0\" y1=\"" + std::string(buf) + "\" x2=\"" + std::to_string(width) + "\" y2=\"" + buf +
         "\" stroke=\"#bbb\"/>\n";
  out += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"" + pts + "\"/>\n</svg>\n";
  return out;
}

}  // namespace qmf

#endif  // QMF_IO_HPP_

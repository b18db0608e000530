#include "bcsys/spec_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bcsys/errors.hpp"

namespace bcsys {

namespace {

using json = nlohmann::ordered_json;

cxd parse_scalar(const json& v, const std::string& where) {
  if (v.is_number()) return cxd(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return cxd(v[0].get<double>(), v[1].get<double>());
  }
  throw SchemaError("expected number or [re, im] pair in " + where);
}

CMatrix parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + " must be an array of rows");
  const std::size_t rows = v.size();
  if (rows == 0) return CMatrix(0, 0);
  std::size_t cols = 0;
  std::vector<cxd> entries;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = v[i];
    if (!row.is_array()) throw SchemaError(where + " rows must be arrays");
    if (i == 0) {
      cols = row.size();
      entries.reserve(rows * cols);
    } else if (row.size() != cols) {
      throw DimensionError(where + " has ragged rows");
    }
    for (const json& e : row) entries.push_back(parse_scalar(e, where));
  }
  return CMatrix(rows, cols, std::move(entries));
}

CoefficientFunction parse_coefficient(const json& v, const std::string& where) {
  if (!v.is_object()) {
    throw SchemaError(where + " must be an object with kind/coeffs");
  }
  std::set<std::string> keys;
  for (auto it = v.begin(); it != v.end(); ++it) keys.insert(it.key());
  if (!keys.count("kind") || !keys.count("coeffs")) {
    throw SchemaError(where + " needs kind and coeffs");
  }
  const std::string kind = v.at("kind").get<std::string>();
  const json& cj = v.at("coeffs");
  if (!cj.is_array() || cj.empty()) {
    throw SchemaError(where + ".coeffs must be a nonempty array of matrices");
  }
  std::vector<CMatrix> coeffs;
  for (std::size_t i = 0; i < cj.size(); ++i) {
    coeffs.push_back(parse_matrix(cj[i], where + ".coeffs"));
  }
  std::set<std::string> allowed = {"kind", "coeffs"};
  if (kind == "piecewise-constant") allowed.insert("breakpoints");
  for (const auto& k : keys) {
    if (!allowed.count(k)) throw SchemaError("unknown key " + k + " in " + where);
  }
  if (kind == "constant") {
    if (coeffs.size() != 1) {
      throw DimensionError(where + ": constant kind takes exactly one matrix");
    }
    return CoefficientFunction::constant(coeffs.front());
  }
  if (kind == "polynomial") {
    return CoefficientFunction::polynomial(std::move(coeffs));
  }
  if (kind == "piecewise-constant") {
    if (!keys.count("breakpoints")) {
      throw SchemaError(where + ": piecewise-constant kind needs breakpoints");
    }
    std::vector<double> breaks;
    for (const json& b : v.at("breakpoints")) {
      if (!b.is_number()) throw SchemaError(where + ".breakpoints must be numbers");
      breaks.push_back(b.get<double>());
    }
    return CoefficientFunction::piecewise_constant(std::move(coeffs),
                                                   std::move(breaks));
  }
  throw SchemaError(where + ": unknown kind '" + kind + "'");
}

json emit_scalar(cxd v) {
  if (v.imag() == 0.0) return json(v.real());
  return json::array({v.real(), v.imag()});
}

json emit_matrix(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(emit_scalar(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json emit_coefficient(const CoefficientFunction& f) {
  json o = json::object();
  o["kind"] = to_string(f.kind());
  json cs = json::array();
  for (const auto& m : f.coefficients()) cs.push_back(emit_matrix(m));
  o["coeffs"] = std::move(cs);
  if (f.kind() == CoefficientFunction::Kind::PiecewiseConstant) {
    o["breakpoints"] = f.breakpoints();
  }
  return o;
}

}  // namespace

SystemSpec parse_spec(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("document must be a JSON object");
  const std::set<std::string> required = {"n",  "m",  "P2",  "P1", "P0",
                                          "H",  "WB1", "WB2", "WC"};
  std::set<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.insert(it.key());
  for (const auto& k : required) {
    if (!keys.count(k)) throw SchemaError("missing key " + k);
  }
  for (const auto& k : keys) {
    if (!required.count(k)) throw SchemaError("unknown key " + k);
  }
  SystemSpec spec;
  if (!doc["n"].is_number_unsigned() || !doc["m"].is_number_unsigned()) {
    throw SchemaError("n and m must be nonnegative integers");
  }
  spec.n = doc["n"].get<std::size_t>();
  spec.m = doc["m"].get<std::size_t>();
  spec.P2 = parse_matrix(doc["P2"], "P2");
  spec.P1 = parse_matrix(doc["P1"], "P1");
  spec.P0 = parse_coefficient(doc["P0"], "P0");
  spec.H = parse_coefficient(doc["H"], "H");
  spec.WB1 = parse_matrix(doc["WB1"], "WB1");
  spec.WB2 = parse_matrix(doc["WB2"], "WB2");
  spec.WC = parse_matrix(doc["WC"], "WC");
  spec.check_dimensions();
  return spec;
}

SystemSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  return parse_spec(buf.str());
}

std::string emit_spec(const SystemSpec& spec) {
  spec.check_dimensions();
  json o = json::object();
  o["n"] = spec.n;
  o["m"] = spec.m;
  o["P2"] = emit_matrix(spec.P2);
  o["P1"] = emit_matrix(spec.P1);
  o["P0"] = emit_coefficient(spec.P0);
  o["H"] = emit_coefficient(spec.H);
  o["WB1"] = emit_matrix(spec.WB1);
  o["WB2"] = spec.WB2.empty() ? json::array() : emit_matrix(spec.WB2);
  o["WC"] = emit_matrix(spec.WC);
  return o.dump(2) + "\n";
}

void emit_spec_file(const SystemSpec& spec, const std::string& path) {
  const std::string text = emit_spec(spec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace bcsys

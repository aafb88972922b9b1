#include "pencil/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pencil::io {

namespace {

void dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        dump_into(value, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

cplx parse_complex(const Json& j, const std::string& pointer) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError("expected [re, im]", pointer);
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

int parse_order(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("document must be an object", "");
  if (!doc.contains("order")) throw SchemaError("missing field", "/order");
  const Json& o = doc["order"];
  if (!o.is_number_integer() || o.get<long long>() < 1 ||
      o.get<long long>() > 100000) {
    throw SchemaError("order must be a positive integer", "/order");
  }
  return static_cast<int>(o.get<long long>());
}

std::vector<cplx> parse_series(const Json& doc, const char* key, int order) {
  const std::string pointer = std::string("/") + key;
  if (!doc.contains(key)) throw SchemaError("missing field", pointer);
  const Json& arr = doc[key];
  if (!arr.is_array()) throw SchemaError("expected an array", pointer);
  if (arr.size() != static_cast<std::size_t>(order)) {
    throw SchemaError("array length differs from order", pointer);
  }
  std::vector<cplx> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_complex(arr[i], pointer + "/" + std::to_string(i)));
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite value in output");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump(const Json& doc) {
  std::string out;
  dump_into(doc, out);
  out += '\n';
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what(), "");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

Potential parse_potential(const Json& doc) {
  const int order = parse_order(doc);
  auto p = parse_series(doc, "p", order);
  auto q = parse_series(doc, "q", order);
  return {std::move(p), std::move(q)};
}

SpectralData parse_spectral(const Json& doc) {
  const int order = parse_order(doc);
  auto sp = parse_series(doc, "s_plus", order);
  auto sm = parse_series(doc, "s_minus", order);
  return {std::move(sp), std::move(sm)};
}

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json complex_array(std::span<const cplx> values) {
  Json arr = Json::array();
  for (const cplx& v : values) arr.push_back(complex_to_json(v));
  return arr;
}

Json potential_to_json(const Potential& pot) {
  Json j;
  j["order"] = pot.order();
  j["p"] = complex_array(pot.p_coeffs());
  j["q"] = complex_array(pot.q_coeffs());
  return j;
}

Json spectral_to_json(const SpectralData& s) {
  Json j;
  j["order"] = s.order();
  j["s_plus"] = complex_array(s.coeffs(Branch::plus));
  j["s_minus"] = complex_array(s.coeffs(Branch::minus));
  return j;
}

Json grid_to_json(const GridSpec& g) {
  Json j;
  j["re_min"] = g.re_min;
  j["re_max"] = g.re_max;
  j["im_min"] = g.im_min;
  j["im_max"] = g.im_max;
  j["nx"] = g.nx;
  j["ny"] = g.ny;
  return j;
}

std::string determinant_csv(const characterize::DeterminantGrid& grid) {
  std::string out = "re_z,im_z,re_D,im_D,abs_D\n";
  for (int k = 0; k < grid.spec.ny; ++k) {
    for (int j = 0; j < grid.spec.nx; ++j) {
      const cplx z = grid.spec.point(j, k);
      const cplx d = grid.at(j, k);
      out += format_double(z.real());
      out += ',';
      out += format_double(z.imag());
      out += ',';
      out += format_double(d.real());
      out += ',';
      out += format_double(d.imag());
      out += ',';
      out += format_double(std::abs(d));
      out += '\n';
    }
  }
  return out;
}

}  // namespace pencil::io

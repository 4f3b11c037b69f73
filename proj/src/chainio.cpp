#include "corrdyn/chainio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "corrdyn/errors.hpp"

namespace corrdyn {

using nlohmann::json;

std::string chain_to_json(const Chain& c) {
  json doc;
  doc["components"] = json::array();
  for (const auto& comp : c.components()) {
    json jc;
    jc["bidegree"] = {comp.poly.dz, comp.poly.dw};
    json rows = json::array();
    for (int i = 0; i <= comp.poly.dz; ++i) {
      json row = json::array();
      for (int j = 0; j <= comp.poly.dw; ++j) {
        const cdouble& v = comp.poly.at(i, j);
        row.push_back({v.real(), v.imag()});
      }
      rows.push_back(std::move(row));
    }
    jc["coeffs"] = std::move(rows);
    jc["mult"] = comp.mult;
    doc["components"].push_back(std::move(jc));
  }
  return doc.dump(2);
}

Chain chain_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("chain file: ") + e.what(), static_cast<long>(e.byte));
  }
  try {
    if (!doc.contains("components") || !doc["components"].is_array() ||
        doc["components"].empty())
      throw ParseError("chain file: missing or empty \"components\" array");
    std::vector<Chain::Component> comps;
    for (const auto& jc : doc["components"]) {
      int dz = jc.at("bidegree").at(0).get<int>();
      int dw = jc.at("bidegree").at(1).get<int>();
      if (dz < 0 || dw < 0) throw ParseError("chain file: negative bidegree");
      const auto& rows = jc.at("coeffs");
      if (static_cast<int>(rows.size()) != dz + 1)
        throw ParseError("chain file: coefficient row count does not match bidegree");
      std::vector<cdouble> c((dz + 1) * (dw + 1));
      for (int i = 0; i <= dz; ++i) {
        const auto& row = rows.at(i);
        if (static_cast<int>(row.size()) != dw + 1)
          throw ParseError("chain file: coefficient column count does not match bidegree");
        for (int j = 0; j <= dw; ++j) {
          const auto& pair = row.at(j);
          if (!pair.is_array() || pair.size() != 2)
            throw ParseError("chain file: coefficient entries must be [re, im] pairs");
          c[i * (dw + 1) + j] = cdouble(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
      }
      int mult = jc.value("mult", 1);
      if (mult < 1) throw ParseError("chain file: mult must be a positive integer");
      Chain::Component comp;
      try {
        comp.poly = BihomPoly::from_coeffs_trusted(dz, dw, std::move(c));
      } catch (const ZeroPolynomial& e) {
        throw ParseError(std::string("chain file: ") + e.what());
      }
      comp.mult = mult;
      comps.push_back(std::move(comp));
    }
    return Chain::from_components(std::move(comps), true);
  } catch (const json::exception& e) {
    throw ParseError(std::string("chain file: ") + e.what());
  }
}

Chain load_chain_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open chain file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return chain_from_json(ss.str());
}

void save_chain_file(const Chain& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write chain file: " + path);
  out << chain_to_json(c) << "\n";
}

ProjPoint parse_point(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t == "inf" || t == "infinity" || t == "oo") return ProjPoint::infinity();
  if (!t.empty() && t.front() == '[') {
    json arr;
    try {
      arr = json::parse(t);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("point: ") + e.what(), static_cast<long>(e.byte));
    }
    if (arr.is_array() && arr.size() == 2)
      return ProjPoint::affine(cdouble(arr[0].get<double>(), arr[1].get<double>()));
    if (arr.is_array() && arr.size() == 4)
      return ProjPoint(cdouble(arr[0].get<double>(), arr[1].get<double>()),
                       cdouble(arr[2].get<double>(), arr[3].get<double>()));
    throw ParseError("point: expected [re, im] or [re_a, im_a, re_b, im_b]");
  }
  double re = 0.0, im = 0.0;
  char comma = 0;
  std::istringstream ss(t);
  ss >> re;
  if (ss >> comma) {
    if (comma != ',' || !(ss >> im)) throw ParseError("point: expected \"re,im\"");
  }
  if (ss.fail() && t.empty()) throw ParseError("point: empty");
  return ProjPoint::affine(cdouble(re, im));
}

}  // namespace corrdyn

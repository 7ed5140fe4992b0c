#include "pencil/problem.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pencil {

namespace {

using nlohmann::json;

cplx parseEntry(const json& e) {
  if (e.is_number()) return cplx(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2)
    return cplx(e[0].get<double>(), e[1].get<double>());
  throw std::runtime_error("coefficient entry must be a number or [re, im]");
}

Mat parseMatrix(const json& v, int d) {
  if (!v.is_array() || (int)v.size() != d)
    throw std::runtime_error("coefficient value must be a d x d matrix");
  Mat A(d, d);
  for (int i = 0; i < d; ++i) {
    if (!v[i].is_array() || (int)v[i].size() != d)
      throw std::runtime_error("coefficient value must be a d x d matrix");
    for (int j = 0; j < d; ++j) A(i, j) = parseEntry(v[i][j]);
  }
  return A;
}

struct Term {
  int tpow = 0, lampow = 0;
  Mat value;
};

Coefficient parseCoefficient(const json& terms, int d) {
  if (!terms.is_array()) throw std::runtime_error("coefficient must be a term list");
  auto parsed = std::make_shared<std::vector<Term>>();
  for (const auto& t : terms) {
    Term tm;
    tm.tpow = t.value("tpow", 0);
    tm.lampow = t.value("lampow", 0);
    tm.value = parseMatrix(t.at("value"), d);
    if (tm.tpow < 0) throw std::runtime_error("tpow must be >= 0");
    parsed->push_back(std::move(tm));
  }
  Coefficient c;
  c.d = d;
  c.isZero = parsed->empty();
  c.fn = [parsed, d](double t, cplx lam, int k) -> Mat {
    Mat acc = Mat::Zero(d, d);
    for (const auto& tm : *parsed) {
      if (k > tm.tpow) continue;
      double fac = 1.0;  // falling factorial j (j-1) ... (j-k+1)
      for (int i = 0; i < k; ++i) fac *= (tm.tpow - i);
      acc += fac * std::pow(t, tm.tpow - k) * std::pow(lam, tm.lampow) *
             tm.value;
    }
    return acc;
  };
  return c;
}

DiffExpr parseExpr(const json& j, int r, int d) {
  DiffExpr e = DiffExpr::make(r, d);
  for (int k = 0; k <= e.np(); ++k) {
    std::string key = "p" + std::to_string(k);
    if (j.contains(key)) e.p[k] = parseCoefficient(j.at(key), d);
  }
  for (int k = 1; k <= e.nq(); ++k) {
    for (std::string pre : {"q", "s"}) {
      std::string key = pre + std::to_string(k);
      if (j.contains(key))
        (pre == "q" ? e.q : e.s)[k] = parseCoefficient(j.at(key), d);
    }
  }
  return e;
}

Problem fromJson(const json& j) {
  Problem prob;
  if (j.contains("case")) {
    double h = j.value("h", 1.0);
    ReferenceCase rc = caseByName(j.at("case").get<std::string>(), h);
    prob.name = rc.name;
    prob.pencil = rc.pencil;
    prob.period = rc.period;
    prob.refCase = rc;
    if (rc.name == "example2") {
      prob.a = 0.0;
      prob.b = 1.0;
      prob.hasInterval = true;
    }
  } else {
    prob.name = j.value("name", "problem");
    int r = j.at("r").get<int>();
    int d = j.at("d").get<int>();
    DiffExpr l = j.contains("l") ? parseExpr(j.at("l"), r, d)
                                 : DiffExpr::make(r, d);
    if (!j.contains("m")) throw std::runtime_error("problem requires a weight m");
    int ms = j.at("m").value("r", r - r % 2);
    DiffExpr m = parseExpr(j.at("m"), ms, d);
    int ns = j.contains("n") ? j.at("n").value("r", 0) : 0;
    DiffExpr n = j.contains("n") ? parseExpr(j.at("n"), ns, d)
                                 : DiffExpr::make(0, d);
    std::vector<cplx> excl;
    for (const auto& e : j.value("excluded", json::array()))
      excl.push_back(parseEntry(e));
    prob.pencil = Pencil::fromParts(l, m, n, r, excl);
    prob.period = j.value("period", 1.0);
  }
  if (j.contains("interval")) {
    prob.a = j.at("interval")[0].get<double>();
    prob.b = j.at("interval")[1].get<double>();
    prob.hasInterval = true;
  }
  return prob;
}

}  // namespace

Problem problemFromJsonText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("JSON parse error: ") + e.what());
  }
  return fromJson(j);
}

Problem loadProblem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return problemFromJsonText(ss.str());
}

}  // namespace pencil

#include "sdcc/io.hpp"

#include <fstream>

namespace sdcc {

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"n", m.rows()}, {"rows", std::move(rows)}};
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("rows"))
    throw std::invalid_argument("matrix json: expected {\"n\": int, \"rows\": [[...]]}");
  const int n = j.at("n").get<int>();
  const Json& rows = j.at("rows");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("matrix json: row count does not match n");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    const Json& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::invalid_argument("matrix json: row " + std::to_string(i) +
                                  " has wrong length");
    for (int k = 0; k < n; ++k) m(i, k) = row.at(k).get<double>();
  }
  return require_symmetric(m, "matrix json");
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return Json::parse(in);  // parse errors carry line/byte diagnostics
}

Mat load_matrix(const std::string& path) { return matrix_from_json(load_json(path)); }

void save_matrix(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << dump_deterministic(matrix_to_json(m));
}

Json vector_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector json: expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

Json report_to_json(const MembershipReport& r) {
  Json viol = Json::array();
  for (const auto& v : r.violations)
    viol.push_back({{"block", v.block}, {"constraint", v.constraint}, {"magnitude", v.magnitude}});
  return Json{{"verdict", to_string(r.verdict)},
              {"residual", r.residual},
              {"tol", r.tol},
              {"violations", std::move(viol)},
              {"warnings", r.warnings}};
}

Json sigma_to_json(const SigmaValue& s) {
  Json j{{"finite", s.finite}, {"notes", s.notes}};
  if (s.finite) j["value"] = s.value;
  return j;
}

Json stationarity_to_json(const StationarityReport& r) {
  Json viol = Json::array();
  for (const auto& v : r.violations)
    viol.push_back({{"block", v.block}, {"constraint", v.constraint}, {"magnitude", v.magnitude}});
  return Json{{"flavor", to_string(r.flavor)},
              {"grad_norm", r.grad_norm},
              {"feasibility", r.feasibility},
              {"cone_residual", r.cone_residual},
              {"residual", r.residual},
              {"sampled", r.sampled},
              {"violations", std::move(viol)},
              {"warnings", r.warnings}};
}

Json condition_to_json(const ConditionReport& r) {
  Json j{{"d", vector_to_json(r.d)},
         {"stationarity", r.stationarity},
         {"stationarity_regular", r.stationarity_regular},
         {"feasibility", r.feasibility},
         {"critical_residual", r.critical_residual},
         {"quad", r.quad},
         {"sigma", sigma_to_json(r.sigma)},
         {"vacuous", r.vacuous},
         {"warnings", r.warnings}};
  if (!r.vacuous) j["margin"] = r.margin;
  return j;
}

Json sonc_to_json(const SoncAggregate& a) {
  return Json{{"min_margin", a.min_margin},
              {"worst_d", vector_to_json(a.worst_d)},
              {"evaluated", a.evaluated},
              {"vacuous", a.vacuous},
              {"violated", a.violated},
              {"margin_tol", a.margin_tol},
              {"warnings", a.warnings}};
}

Json sosc_to_json(const SoscAggregate& a) {
  return Json{{"estimate", a.estimate},
              {"worst_d", vector_to_json(a.worst_d)},
              {"evaluated", a.evaluated},
              {"variant", a.variant == SoscVariant::Tight ? "tight" : "relaxed"},
              {"positive", a.positive},
              {"warnings", a.warnings}};
}

Json example_to_json(const ExampleReport& r) {
  // wall-clock time is deliberately not serialized: reports must be
  // byte-identical across runs with the same config
  Json clauses = Json::array();
  for (const auto& c : r.clauses)
    clauses.push_back(
        {{"name", c.name}, {"pass", c.pass}, {"error", c.error}, {"detail", c.detail}});
  return Json{{"clauses", std::move(clauses)}, {"pass", r.pass}, {"notes", r.notes}};
}

namespace {

Poly2 poly_from_json(const Json& j, int m) {
  Poly2 p;
  if (j.contains("c")) p.c = j.at("c").get<double>();
  if (j.contains("lin")) p.lin = vector_from_json(j.at("lin"));
  if (j.contains("quad")) {
    const Json& q = j.at("quad");
    p.quad = Mat::Zero(m, m);
    if (!q.is_array() || static_cast<int>(q.size()) != m)
      throw std::invalid_argument("poly2 json: quad must be m x m");
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) p.quad(i, k) = q.at(i).at(k).get<double>();
  }
  return p;
}

Json poly_to_json(const Poly2& p, int m) {
  Json j{{"c", p.c}};
  if (p.lin.size()) j["lin"] = vector_to_json(p.lin);
  if (p.quad.size()) {
    Json q = Json::array();
    for (int i = 0; i < m; ++i) {
      Json row = Json::array();
      for (int k = 0; k < m; ++k) row.push_back(p.quad(i, k));
      q.push_back(std::move(row));
    }
    j["quad"] = std::move(q);
  }
  return j;
}

std::vector<Poly2> polys_from_json(const Json& j, int m, const std::string& what,
                                   int expected) {
  if (!j.is_array() || static_cast<int>(j.size()) != expected)
    throw std::invalid_argument("problem json: " + what + " must list " +
                                std::to_string(expected) + " entries");
  std::vector<Poly2> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(poly_from_json(e, m));
  return out;
}

}  // namespace

Json problem_to_json(const ProblemSpec& spec) {
  Json kf = Json::array();
  for (const auto& f : spec.K) {
    std::string t;
    switch (f.type) {
      case ConeFactor::Psd: t = "psd"; break;
      case ConeFactor::Orthant: t = "orthant"; break;
      case ConeFactor::Zero: t = "zero"; break;
      case ConeFactor::Free: t = "free"; break;
    }
    kf.push_back({{"type", t}, {"dim", f.dim}});
  }
  Json h = Json::array(), th = Json::array(), ze = Json::array();
  for (const auto& p : spec.h) h.push_back(poly_to_json(p, spec.m));
  for (const auto& p : spec.theta) th.push_back(poly_to_json(p, spec.m));
  for (const auto& p : spec.zeta) ze.push_back(poly_to_json(p, spec.m));
  return Json{{"m", spec.m},     {"n", spec.n},  {"K", std::move(kf)},
              {"phi", poly_to_json(spec.phi, spec.m)}, {"h", std::move(h)},
              {"theta", std::move(th)},                {"zeta", std::move(ze)}};
}

ProblemSpec problem_from_json(const Json& j) {
  ProblemSpec spec;
  spec.m = j.at("m").get<int>();
  spec.n = j.at("n").get<int>();
  for (const auto& f : j.at("K")) {
    ConeFactor cf;
    const std::string t = f.at("type").get<std::string>();
    if (t == "psd") cf.type = ConeFactor::Psd;
    else if (t == "orthant") cf.type = ConeFactor::Orthant;
    else if (t == "zero") cf.type = ConeFactor::Zero;
    else if (t == "free") cf.type = ConeFactor::Free;
    else throw std::invalid_argument("problem json: unknown cone factor type " + t);
    cf.dim = f.at("dim").get<int>();
    spec.K.push_back(cf);
  }
  spec.phi = poly_from_json(j.at("phi"), spec.m);
  const int ns = spec.n * (spec.n + 1) / 2;
  spec.h = polys_from_json(j.at("h"), spec.m, "h", spec.h_entries());
  spec.theta = polys_from_json(j.at("theta"), spec.m, "theta", ns);
  spec.zeta = polys_from_json(j.at("zeta"), spec.m, "zeta", ns);
  spec.validate();
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  return problem_from_json(load_json(path));
}

Vec point_from_json(const Json& j) {
  if (!j.contains("x")) throw std::invalid_argument("point json: expected {\"x\": [...]}");
  return vector_from_json(j.at("x"));
}

MultiplierPair multipliers_from_json(const Json& j, const ProblemSpec& spec) {
  MultiplierPair mult;
  mult.xi = vector_from_json(j.at("xi"));
  if (mult.xi.size() != spec.h_entries())
    throw std::invalid_argument("multipliers json: xi length mismatch");
  mult.gamma1 = matrix_from_json(j.at("gamma1"));
  mult.gamma2 = matrix_from_json(j.at("gamma2"));
  if (mult.gamma1.rows() != spec.n || mult.gamma2.rows() != spec.n)
    throw std::invalid_argument("multipliers json: Gamma size mismatch");
  return mult;
}

std::string dump_deterministic(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace sdcc

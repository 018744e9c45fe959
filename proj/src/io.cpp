#include "formvol/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "formvol/errors.hpp"

namespace formvol {
namespace {

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::kParse, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kParse, std::string("field '") + key + "' has the wrong type");
  }
}

std::pair<int, int> shape_of(const Json& j) {
  const int n = get_field<int>(j, "n");
  const int d = get_field<int>(j, "d");
  if (n < 1 || d < 0) fail(ErrorCode::kParse, "n must be >= 1 and d >= 0");
  return {n, d};
}

Json trace_row(const TraceRow& r) {
  return Json{{"iter", r.iter},
              {"objective", number(r.objective)},
              {"std_error", number(r.std_error)},
              {"best", number(r.best)},
              {"step", number(r.step)},
              {"residual", number(r.residual)},
              {"samples", r.samples},
              {"rejections", r.rejections}};
}

Json norm_fields(const NormSpec& s) {
  Json j{{"norm", s.name()}};
  if (s.kind == NormKind::kLpSphere || s.kind == NormKind::kSchatten) j["p"] = s.p;
  return j;
}

}  // namespace

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json form_to_json(const Form& f, bool monomial_basis) {
  const auto& table = f.table();
  const std::vector<double> c =
      monomial_basis ? monomial_from_rescaled(f) : std::vector<double>(f.coeffs().begin(), f.coeffs().end());
  Json terms = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    const auto a = table[i];
    terms.push_back(Json{{"alpha", std::vector<int>(a.begin(), a.end())}, {"coeff", number(c[i])}});
  }
  return Json{{"n", f.variables()},
              {"d", f.degree()},
              {"basis", monomial_basis ? "monomial" : "rescaled"},
              {"terms", std::move(terms)}};
}

Form form_from_json(const Json& j) {
  const auto [n, d] = shape_of(j);
  const std::string basis = j.contains("basis") ? get_field<std::string>(j, "basis") : "monomial";
  if (basis != "monomial" && basis != "rescaled") fail(ErrorCode::kParse, "basis must be 'monomial' or 'rescaled'");
  const auto& table = multi_index_table(n, d);
  std::vector<double> c(table.size(), 0.0);
  const Json& terms = j.contains("terms") ? j.at("terms") : Json::array();
  if (!terms.is_array()) fail(ErrorCode::kParse, "'terms' must be an array");
  for (const Json& t : terms) {
    const auto alpha = get_field<std::vector<int>>(t, "alpha");
    if (!t.contains("coeff") || !t.at("coeff").is_number()) fail(ErrorCode::kParse, "term needs a numeric 'coeff'");
    const double coeff = t.at("coeff").get<double>();
    if (alpha.size() != static_cast<std::size_t>(n)) fail(ErrorCode::kParse, "exponent vector has the wrong length");
    int total = 0;
    for (int a : alpha) {
      if (a < 0) fail(ErrorCode::kParse, "exponents must be nonnegative");
      total += a;
    }
    if (total != d) fail(ErrorCode::kParse, "exponent vector does not have total degree d");
    c[table.index_of(alpha)] += coeff;
  }
  if (basis == "monomial") return rescaled_from_monomial(n, d, c);
  return Form(n, d, std::move(c));
}

Json gram_to_json(const GramMatrix& g) {
  Json rows = Json::array();
  const Matrix& e = g.entries();
  for (std::size_t i = 0; i < e.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < e.cols(); ++k) row.push_back(number(e(i, k)));
    rows.push_back(std::move(row));
  }
  return Json{{"n", g.variables()}, {"d", g.degree()}, {"order", "graded-lex"}, {"rows", std::move(rows)}};
}

GramMatrix gram_from_json(const Json& j) {
  const auto [n, d] = shape_of(j);
  if (j.contains("order") && get_field<std::string>(j, "order") != "graded-lex")
    fail(ErrorCode::kParse, "only graded-lex order is supported");
  const auto rows = get_field<std::vector<std::vector<double>>>(j, "rows");
  const std::size_t dim = gram_dimension(n, d);
  if (rows.size() != dim) fail(ErrorCode::kShape, "Gram matrix must have " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (rows[i].size() != dim) fail(ErrorCode::kShape, "Gram row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = rows[i][k];
  }
  return GramMatrix(n, d, std::move(m));
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kParse, e.what());
  }
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

Json to_json(const VolumeEstimate& v) {
  return Json{{"value", number(v.value)},
              {"std_error", number(v.std_error)},
              {"samples", v.samples},
              {"seed", v.seed},
              {"method", to_string(v.method)},
              {"infinite", v.infinite}};
}

Json to_json(const NormEstimate& v) {
  const char* kind = v.kind == NormEstimateKind::kLp ? "lp" : v.kind == NormEstimateKind::kSup ? "sup" : "min";
  return Json{{"value", number(v.value)}, {"std_error", number(v.std_error)}, {"samples", v.samples}, {"estimator", kind}};
}

Json to_json(const SolverTrace& t, bool with_trace) {
  Json j = norm_fields(t.norm);
  j["n"] = t.n;
  j["d"] = t.d;
  j["seed"] = t.seed;
  if (t.norm.invariant())
    j["theoretical_opt"] = number(theoretical_opt(t.norm, t.n, t.d));
  else
    j["theoretical_opt"] = nullptr;
  j["final_objective"] = to_json(t.final_objective);
  j["final_norm"] = number(t.final_norm);
  j["reference"] = Json{{"name", t.reference_name}, {"distance", number(t.reference_distance)}};
  j["final_form"] = form_to_json(t.final_form);
  if (t.final_gram) j["final_gram"] = gram_to_json(*t.final_gram);
  if (with_trace) {
    Json rows = Json::array();
    for (const auto& r : t.rows) rows.push_back(trace_row(r));
    j["trace"] = std::move(rows);
  }
  return j;
}

Json to_json(const LowerBoundReport& r) {
  Json j = norm_fields(r.norm);
  j["n"] = r.n;
  j["d"] = r.d;
  j["theoretical_opt"] = number(r.theoretical_opt);
  j["bound"] = number(r.bound);
  j["trials"] = r.trials;
  j["infinite_trials"] = r.infinite_trials;
  j["tol"] = r.tol;
  j["min_ratio"] = number(r.min_ratio);
  if (r.ratio_quantiles.size() == 5) {
    const auto& q = r.ratio_quantiles;
    j["ratio_quantiles"] = Json{{"min", q[0]}, {"q10", q[1]}, {"median", q[2]}, {"q90", q[3]}, {"max", q[4]}};
  }
  j["passed"] = r.passed();
  Json violations = Json::array();
  for (const auto& v : r.violations)
    violations.push_back(Json{{"trial", v.trial},
                              {"value", number(v.value)},
                              {"std_error", number(v.std_error)},
                              {"bound", number(v.bound)},
                              {"form", form_to_json(v.form)}});
  j["violations"] = std::move(violations);
  return j;
}

Json to_json(const PStarReport& r) {
  Json j = norm_fields(r.norm);
  j["n"] = r.n;
  j["d"] = r.d;
  j["kappa"] = number(r.kappa);
  j["c_closed"] = number(r.c_closed);
  j["c_closed_rel_error"] = number(r.c_closed_rel_error);
  j["c_mc"] = number(r.c_mc);
  j["c_mc_std_error"] = number(r.c_mc_std_error);
  j["opt_star"] = number(r.opt_star);
  j["measured_norm"] = number(r.measured_norm);
  j["measured_std_error"] = number(r.measured_std_error);
  j["passed"] = r.passed;
  return j;
}

}  // namespace formvol

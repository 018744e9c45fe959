// Command-line front end over the C interface.
//
//   formvol volume   --builtin ball --n 2 --d 4
//   formvol norm     --in f.json --kind lp --p 2
//   formvol optimize --norm bombieri --n 2 --d 4
//   formvol verify   --norm schatten --p 1 --n 2 --d 2 --trials 500
//
// Exit codes: 0 success, 1 internal failure, 2 usage or input error,
// 3 infinite volume, 4 verification failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "formvol/formvol.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfinite = 3;
constexpr int kExitVerifyFailed = 4;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(fv_status s) {
  switch (s) {
    case FV_ERR_NUMERIC:
    case FV_ERR_INTERNAL:
    case FV_ERR_CAPACITY:
      return kExitInternal;
    default:
      return kExitUsage;
  }
}

void check(fv_status s) {
  if (s != FV_OK) throw CliError{exit_code_for(s), std::string(fv_status_string(s)) + ": " + fv_last_error()};
}

struct FormDeleter {
  void operator()(fv_form* f) const { fv_form_free(f); }
};
struct GramDeleter {
  void operator()(fv_gram* g) const { fv_gram_free(g); }
};
struct ReportDeleter {
  void operator()(fv_report* r) const { fv_report_free(r); }
};
using FormPtr = std::unique_ptr<fv_form, FormDeleter>;
using GramPtr = std::unique_ptr<fv_gram, GramDeleter>;
using ReportPtr = std::unique_ptr<fv_report, ReportDeleter>;

double parse_p(const std::string& text) {
  if (text == "inf" || text == "infinity") return INFINITY;
  double p = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), p);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw CliError{kExitUsage, "invalid value for --p: '" + text + "'"};
  return p;
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// RFC 4180 field: quoted when it holds a comma, quote or line break.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_value(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_string()) return csv_field(v.get<std::string>());
  return csv_field(v.dump());
}

// Header plus one line per row; every row is an object with the header keys.
std::string to_csv(const std::vector<std::string>& header, const std::vector<Json>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_field(header[i]);
  out += "\r\n";
  for (const Json& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out += ',';
      out += row.contains(header[i]) ? csv_value(row.at(header[i])) : "";
    }
    out += "\r\n";
  }
  return out;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json exponent(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

struct Common {
  int n = 2;
  int d = 2;
  std::string p_text = "2";
  std::uint64_t samples = 0;
  std::uint64_t seed = 1234567;
  std::string format = "json";
  std::string out;
};

struct Source {
  std::string builtin;
  std::string in;
  std::string gram;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw CliError{kExitUsage, "cannot write '" + c.out + "'"};
  f << text;
}

std::string source_name(const Source& s) {
  if (!s.in.empty()) return s.in;
  if (!s.gram.empty()) return s.gram;
  return s.builtin;
}

void require_one_source(const Source& s) {
  const int count = (!s.builtin.empty()) + (!s.in.empty()) + (!s.gram.empty());
  if (count != 1) throw CliError{kExitUsage, "give exactly one of --builtin, --in, --gram"};
}

FormPtr load_form(const Source& s, const Common& c) {
  fv_form* f = nullptr;
  if (!s.builtin.empty()) {
    check(fv_form_builtin(s.builtin.c_str(), c.n, c.d, &f));
  } else if (!s.in.empty()) {
    check(fv_form_load(s.in.c_str(), &f));
  } else {
    fv_gram* g = nullptr;
    check(fv_gram_load(s.gram.c_str(), &g));
    GramPtr owned(g);
    check(fv_gram_to_form(g, &f));
  }
  return FormPtr(f);
}

int run_volume(const Common& c, const Source& s, const std::string& method_name) {
  require_one_source(s);
  fv_volume_method method = FV_VOLUME_LAPLACE;
  if (method_name == "spherical")
    method = FV_VOLUME_SPHERICAL;
  else if (method_name == "exact")
    method = FV_VOLUME_EXACT;
  FormPtr f = load_form(s, c);
  fv_volume_estimate est{};
  check(fv_volume(f.get(), method, c.samples ? c.samples : 100000, c.seed, &est));

  Json j{{"command", "volume"},
         {"source", source_name(s)},
         {"n", fv_form_variables(f.get())},
         {"d", fv_form_degree(f.get())},
         {"method", method_name},
         {"value", number(est.value)},
         {"std_error", number(est.std_error)},
         {"samples", est.samples},
         {"seed", est.seed},
         {"infinite", est.infinite != 0}};
  if (c.format == "csv")
    emit(c, to_csv({"n", "d", "source", "method", "value", "std_error", "samples", "seed", "infinite"}, {j}));
  else
    emit(c, j.dump(2) + "\n");
  return est.infinite ? kExitInfinite : kExitOk;
}

fv_norm_kind norm_kind(const std::string& name) {
  if (name == "bombieri") return FV_NORM_BOMBIERI;
  if (name == "l1") return FV_NORM_L1;
  if (name == "lp") return FV_NORM_LP;
  if (name == "sup") return FV_NORM_SUP;
  if (name == "nuclear") return FV_NORM_NUCLEAR;
  if (name == "schatten") return FV_NORM_SCHATTEN;
  if (name == "spectral") return FV_NORM_SPECTRAL;
  throw CliError{kExitUsage, "unknown norm '" + name + "'"};
}

int run_norm(const Common& c, const Source& s, const std::string& kind_name) {
  require_one_source(s);
  const fv_norm_kind kind = norm_kind(kind_name);
  const double p = parse_p(c.p_text);
  fv_norm_estimate est{};
  int n = c.n, d = c.d;
  if (kind == FV_NORM_SCHATTEN || kind == FV_NORM_SPECTRAL) {
    fv_gram* g = nullptr;
    if (!s.gram.empty())
      check(fv_gram_load(s.gram.c_str(), &g));
    else if (s.builtin == "ball")
      check(fv_gram_identity(c.n, c.d, &g));
    else
      throw CliError{kExitUsage, "matrix norms need --gram or --builtin ball"};
    GramPtr owned(g);
    check(fv_gram_norm(g, kind, p, &est.value));
    if (!s.gram.empty()) {
      fv_form* raw = nullptr;
      check(fv_gram_to_form(g, &raw));
      FormPtr f(raw);
      n = fv_form_variables(raw);
      d = fv_form_degree(raw);
    }
  } else {
    FormPtr f = load_form(s, c);
    check(fv_form_norm(f.get(), kind, p, c.samples ? c.samples : 100000, c.seed, &est));
    n = fv_form_variables(f.get());
    d = fv_form_degree(f.get());
  }

  Json j{{"command", "norm"}, {"source", source_name(s)}, {"n", n}, {"d", d}, {"kind", kind_name}};
  if (kind == FV_NORM_LP || kind == FV_NORM_SCHATTEN) j["p"] = exponent(p);
  j["value"] = number(est.value);
  j["std_error"] = number(est.std_error);
  j["samples"] = est.samples;
  if (c.format == "csv")
    emit(c, to_csv({"n", "d", "source", "kind", "p", "value", "std_error", "samples"}, {j}));
  else
    emit(c, j.dump(2) + "\n");
  return kExitOk;
}

struct OptimizeArgs {
  std::string norm = "bombieri";
  bool sos = false;
  int iters = 0;
  std::uint64_t max_samples = 0;
  std::uint64_t eval_samples = 0;
  double step = 0.0;
  std::string start;
  std::string start_gram;
  bool no_trace = false;
};

int run_optimize(const Common& c, const OptimizeArgs& a) {
  fv_optimize_config cfg;
  fv_optimize_config_init(&cfg);
  cfg.n = c.n;
  cfg.d = c.d;
  cfg.seed = c.seed;
  if (a.sos) {
    const double p = parse_p(c.p_text);
    cfg.norm = std::isinf(p) ? FV_NORM_SPECTRAL : FV_NORM_SCHATTEN;
    cfg.p = p;
  } else {
    cfg.norm = norm_kind(a.norm);
  }
  if (a.iters > 0) cfg.iters = a.iters;
  if (c.samples) cfg.samples = c.samples;
  if (a.max_samples) cfg.max_samples = a.max_samples;
  if (a.eval_samples) cfg.eval_samples = a.eval_samples;
  if (a.step > 0.0) cfg.step = a.step;
  cfg.with_trace = a.no_trace ? 0 : 1;

  FormPtr start;
  GramPtr start_gram;
  if (!a.start.empty()) {
    fv_form* f = nullptr;
    check(fv_form_load(a.start.c_str(), &f));
    start.reset(f);
    cfg.start = f;
  }
  if (!a.start_gram.empty()) {
    fv_gram* g = nullptr;
    check(fv_gram_load(a.start_gram.c_str(), &g));
    start_gram.reset(g);
    cfg.start_gram = g;
  }

  fv_report* raw = nullptr;
  check(fv_optimize(&cfg, &raw));
  ReportPtr report(raw);
  const std::string text = fv_report_json(raw);
  if (c.format == "csv") {
    const Json j = Json::parse(text);
    std::vector<Json> rows;
    if (j.contains("trace"))
      for (const Json& r : j.at("trace")) rows.push_back(r);
    const Json& fo = j.at("final_objective");
    rows.push_back(Json{{"iter", "final"}, {"objective", fo.at("value")}, {"std_error", fo.at("std_error")},
                        {"samples", fo.at("samples")}});
    emit(c, to_csv({"iter", "objective", "std_error", "best", "step", "residual", "samples", "rejections"}, rows));
  } else {
    emit(c, text);
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string norm = "bombieri";
  int trials = 500;
  double tol = 1e-3;
  int threads = 1;
  double bound_scale = 1.0;
  bool pstar = false;
};

int run_verify(const Common& c, const VerifyArgs& a) {
  const double p = parse_p(c.p_text);
  fv_report* raw = nullptr;
  if (a.pstar) {
    check(fv_verify_pstar(norm_kind(a.norm), p, c.n, c.d, c.samples ? c.samples : 200000, c.seed, &raw));
  } else {
    fv_verify_config cfg;
    fv_verify_config_init(&cfg);
    cfg.norm = norm_kind(a.norm);
    cfg.p = p;
    cfg.n = c.n;
    cfg.d = c.d;
    cfg.trials = a.trials;
    if (c.samples) cfg.samples = c.samples;
    cfg.seed = c.seed;
    cfg.tol = a.tol;
    cfg.threads = a.threads;
    cfg.bound_scale = a.bound_scale;
    check(fv_verify(&cfg, &raw));
  }
  ReportPtr report(raw);
  const std::string text = fv_report_json(raw);
  if (c.format == "csv") {
    Json j = Json::parse(text);
    if (j.contains("violations")) j["violations"] = j.at("violations").size();
    std::vector<std::string> header;
    for (const auto& [key, value] : j.items())
      if (!value.is_object()) header.push_back(key);
    emit(c, to_csv(header, {j}));
  } else {
    emit(c, text);
  }
  return fv_report_passed(raw) ? kExitOk : kExitVerifyFailed;
}

void add_common(CLI::App* app, Common& c, bool with_p = true) {
  app->add_option("--n", c.n, "number of variables")->check(CLI::PositiveNumber);
  app->add_option("--d", c.d, "degree")->check(CLI::NonNegativeNumber);
  if (with_p) app->add_option("--p", c.p_text, "exponent p (number or inf)");
  app->add_option("--samples", c.samples, "Monte Carlo samples");
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", c.out, "write the report to a file instead of stdout");
}

void add_source(CLI::App* app, Source& s) {
  app->add_option("--builtin", s.builtin, "builtin form")->check(CLI::IsMember({"ball", "powers"}));
  app->add_option("--in", s.in, "form JSON file");
  app->add_option("--gram", s.gram, "Gram matrix JSON file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volumes, norms and extremal problems for homogeneous forms"};
  app.set_version_flag("--version", std::string(fv_version()));
  app.require_subcommand(1);

  Common common;
  Source source;
  std::string method = "laplace";
  auto* volume = app.add_subcommand("volume", "volume of the sublevel set {f <= 1}");
  add_common(volume, common, false);
  add_source(volume, source);
  volume->add_option("--method", method, "estimator")->check(CLI::IsMember({"laplace", "spherical", "exact"}));

  std::string kind = "bombieri";
  auto* norm = app.add_subcommand("norm", "norm of a form or Gram matrix");
  add_common(norm, common);
  add_source(norm, source);
  norm->add_option("--kind", kind, "norm")->check(
      CLI::IsMember({"bombieri", "l1", "lp", "sup", "nuclear", "schatten", "spectral"}));

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "minimize volume over a norm ball");
  add_common(optimize, common);
  optimize->add_option("--norm", opt.norm, "constraint norm")->check(CLI::IsMember({"bombieri", "l1"}));
  optimize->add_flag("--sos", opt.sos, "optimize over PSD Gram matrices in the Schatten p ball");
  optimize->add_option("--iters", opt.iters, "iterations");
  optimize->add_option("--max-samples", opt.max_samples, "cap on samples per gradient");
  optimize->add_option("--eval-samples", opt.eval_samples, "samples for the final objective");
  optimize->add_option("--step", opt.step, "first step length");
  optimize->add_option("--start", opt.start, "starting form JSON");
  optimize->add_option("--start-gram", opt.start_gram, "starting Gram matrix JSON");
  optimize->add_flag("--no-trace", opt.no_trace, "omit the per-iteration trace");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "check the volume lower bound on random feasible forms");
  add_common(verify, common);
  verify->add_option("--norm", ver.norm, "norm")->check(
      CLI::IsMember({"bombieri", "l1", "lp", "sup", "nuclear", "schatten", "spectral"}));
  verify->add_option("--trials", ver.trials, "number of feasible points")->check(CLI::PositiveNumber);
  verify->add_option("--tol", ver.tol, "relative tolerance floor")->check(CLI::NonNegativeNumber);
  verify->add_option("--threads", ver.threads, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--bound-scale", ver.bound_scale, "multiply the bound (failure injection)")
      ->check(CLI::PositiveNumber);
  verify->add_flag("--pstar", ver.pstar, "check the probabilistic formulation instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*volume) return run_volume(common, source, method);
    if (*norm) return run_norm(common, source, kind);
    if (*optimize) return run_optimize(common, opt);
    if (*verify) return run_verify(common, ver);
  } catch (const CliError& e) {
    std::cerr << "formvol: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "formvol: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

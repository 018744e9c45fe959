#include "formvol/formvol.h"

#include <cmath>
#include <algorithm>
#include <cstring>
#include <new>
#include <string>

#include "formvol/errors.hpp"
#include "formvol/extremal.hpp"
#include "formvol/io.hpp"
#include "formvol/norms.hpp"
#include "formvol/sos.hpp"
#include "formvol/volume.hpp"

#ifndef FORMVOL_VERSION
#define FORMVOL_VERSION "0.0.0"
#endif

struct fv_form {
  formvol::Form f;
};

struct fv_gram {
  formvol::GramMatrix g;
};

struct fv_report {
  std::string json;
  bool passed = false;
};

namespace {

using namespace formvol;

thread_local std::string g_last_error;

fv_status set_error(fv_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

fv_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::kShape:
      return FV_ERR_SHAPE;
    case ErrorCode::kDomain:
      return FV_ERR_DOMAIN;
    case ErrorCode::kCapacity:
      return FV_ERR_CAPACITY;
    case ErrorCode::kNumeric:
      return FV_ERR_NUMERIC;
    case ErrorCode::kInvalidCertificate:
      return FV_ERR_INVALID_CERTIFICATE;
    case ErrorCode::kNotInvariant:
      return FV_ERR_NOT_INVARIANT;
    case ErrorCode::kInitialization:
      return FV_ERR_INITIALIZATION;
    case ErrorCode::kParse:
      return FV_ERR_PARSE;
    case ErrorCode::kIo:
      return FV_ERR_IO;
  }
  return FV_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
fv_status guard(F&& body) {
  try {
    body();
    return FV_OK;
  } catch (const Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FV_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FV_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(FV_ERR_INTERNAL, "unknown error");
  }
}

NormSpec spec_of(fv_norm_kind kind, double p) {
  switch (kind) {
    case FV_NORM_BOMBIERI:
      return NormSpec::bombieri();
    case FV_NORM_L1:
      return NormSpec::l1_coeff();
    case FV_NORM_LP:
      return parse_norm_spec("lp", p);
    case FV_NORM_SUP:
      return NormSpec::sup_sphere();
    case FV_NORM_NUCLEAR:
      return NormSpec::nuclear();
    case FV_NORM_SCHATTEN:
      return parse_norm_spec("schatten", p);
    case FV_NORM_SPECTRAL:
      return NormSpec::spectral();
  }
  fail(ErrorCode::kDomain, "unknown norm kind");
}

// c with f = c b_{d,n} up to rounding, or NaN if f is not such a multiple.
double ball_multiple(const Form& f) {
  if (f.degree() % 2 != 0) return std::nan("");
  const Form b = ball_form(f.variables(), f.degree());
  const double c = bombieri_product(f, b) / bombieri_product(b, b);
  const double residual = bombieri_norm(f - b * c);
  return residual <= 1e-12 * std::max(1.0, bombieri_norm(f)) ? c : std::nan("");
}

fv_report* make_report(const Json& j, bool passed) {
  auto* r = new fv_report;
  r->json = j.dump(2) + "\n";
  r->passed = passed;
  return r;
}

}  // namespace

extern "C" {

const char* fv_version(void) { return FORMVOL_VERSION; }

const char* fv_last_error(void) { return g_last_error.c_str(); }

const char* fv_status_string(fv_status status) {
  switch (status) {
    case FV_OK:
      return "ok";
    case FV_ERR_SHAPE:
      return "shape error";
    case FV_ERR_DOMAIN:
      return "domain error";
    case FV_ERR_CAPACITY:
      return "capacity error";
    case FV_ERR_NUMERIC:
      return "numeric error";
    case FV_ERR_INVALID_CERTIFICATE:
      return "invalid certificate";
    case FV_ERR_NOT_INVARIANT:
      return "norm not invariant";
    case FV_ERR_INITIALIZATION:
      return "initialization error";
    case FV_ERR_PARSE:
      return "parse error";
    case FV_ERR_IO:
      return "i/o error";
    case FV_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case FV_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

#define FV_REQUIRE(cond, msg) \
  if (!(cond)) return set_error(FV_ERR_INVALID_ARGUMENT, msg)

fv_status fv_form_builtin(const char* name, int n, int d, fv_form** out) {
  FV_REQUIRE(name && out, "null argument");
  return guard([&] {
    const std::string s(name);
    if (s == "ball")
      *out = new fv_form{ball_form(n, d)};
    else if (s == "powers")
      *out = new fv_form{powers_form(n, d)};
    else
      fail(ErrorCode::kDomain, "unknown builtin '" + s + "'");
  });
}

fv_status fv_form_from_coeffs(int n, int d, const double* coeffs, size_t len, int monomial_basis, fv_form** out) {
  FV_REQUIRE(out && (coeffs || len == 0), "null argument");
  return guard([&] {
    std::vector<double> c(coeffs, coeffs + len);
    if (monomial_basis) {
      if (len != multi_index_table(n, d).size()) fail(ErrorCode::kShape, "coefficient vector has the wrong length");
      *out = new fv_form{rescaled_from_monomial(n, d, c)};
    } else {
      *out = new fv_form{Form(n, d, std::move(c))};
    }
  });
}

fv_status fv_form_from_json(const char* text, fv_form** out) {
  FV_REQUIRE(text && out, "null argument");
  return guard([&] { *out = new fv_form{form_from_json(parse_json(text))}; });
}

fv_status fv_form_load(const char* path, fv_form** out) {
  FV_REQUIRE(path && out, "null argument");
  return guard([&] { *out = new fv_form{form_from_json(load_json(path))}; });
}

fv_status fv_form_save(const fv_form* f, const char* path) {
  FV_REQUIRE(f && path, "null argument");
  return guard([&] { save_text(path, form_to_json(f->f).dump(2) + "\n"); });
}

void fv_form_free(fv_form* f) { delete f; }

int fv_form_variables(const fv_form* f) { return f ? f->f.variables() : 0; }
int fv_form_degree(const fv_form* f) { return f ? f->f.degree() : 0; }
size_t fv_form_size(const fv_form* f) { return f ? f->f.size() : 0; }

fv_status fv_form_coeffs(const fv_form* f, double* out, size_t len) {
  FV_REQUIRE(f && out, "null argument");
  if (len != f->f.size()) return set_error(FV_ERR_SHAPE, "output buffer has the wrong length");
  std::memcpy(out, f->f.coeffs().data(), len * sizeof(double));
  return FV_OK;
}

fv_status fv_form_evaluate(const fv_form* f, const double* x, size_t n, double* out) {
  FV_REQUIRE(f && x && out, "null argument");
  return guard([&] {
    if (n != static_cast<size_t>(f->f.variables())) fail(ErrorCode::kShape, "point has the wrong dimension");
    *out = evaluate(f->f, std::span<const double>(x, n));
  });
}

fv_status fv_form_to_json(const fv_form* f, char** out) {
  FV_REQUIRE(f && out, "null argument");
  return guard([&] {
    const std::string s = form_to_json(f->f).dump(2);
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
  });
}

void fv_string_free(char* s) { delete[] s; }

fv_status fv_gram_dimension(int n, int d, size_t* out) {
  FV_REQUIRE(out, "null argument");
  return guard([&] { *out = gram_dimension(n, d); });
}

fv_status fv_gram_from_entries(int n, int d, const double* entries, size_t len, fv_gram** out) {
  FV_REQUIRE(entries && out, "null argument");
  return guard([&] {
    const std::size_t dim = gram_dimension(n, d);
    if (len != dim * dim) fail(ErrorCode::kShape, "Gram entries have the wrong length");
    Matrix m(dim, dim);
    std::copy(entries, entries + len, m.data().begin());
    *out = new fv_gram{GramMatrix(n, d, std::move(m))};
  });
}

fv_status fv_gram_identity(int n, int d, fv_gram** out) {
  FV_REQUIRE(out, "null argument");
  return guard([&] { *out = new fv_gram{GramMatrix::identity(n, d)}; });
}

fv_status fv_gram_load(const char* path, fv_gram** out) {
  FV_REQUIRE(path && out, "null argument");
  return guard([&] { *out = new fv_gram{gram_from_json(load_json(path))}; });
}

fv_status fv_gram_to_form(const fv_gram* g, fv_form** out) {
  FV_REQUIRE(g && out, "null argument");
  return guard([&] { *out = new fv_form{form_from_gram(g->g)}; });
}

void fv_gram_free(fv_gram* g) { delete g; }

fv_status fv_volume(const fv_form* f, fv_volume_method method, uint64_t samples, uint64_t seed,
                    fv_volume_estimate* out) {
  FV_REQUIRE(f && out, "null argument");
  return guard([&] {
    VolumeEstimate est;
    const Form& form = f->f;
    switch (method) {
      case FV_VOLUME_LAPLACE:
        est = volume_laplace_mc(form, samples, seed);
        break;
      case FV_VOLUME_SPHERICAL:
        est = volume_spherical_mc(form, samples, seed);
        break;
      case FV_VOLUME_EXACT: {
        est.method = VolumeMethod::kExact;
        est.seed = seed;
        const int n = form.variables();
        const double c = ball_multiple(form);
        if (!std::isnan(c)) {
          est.infinite = c <= 0.0;
          est.value = est.infinite ? INFINITY : std::pow(c, -static_cast<double>(n) / form.degree()) * ball_volume(n);
        } else if (form.degree() == 2) {
          const auto mono = monomial_from_rescaled(form);
          const auto& table = form.table();
          Matrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
          for (std::size_t k = 0; k < table.size(); ++k) {
            int i = -1, j = -1;
            for (int v = 0; v < n; ++v) {
              if (table[k][v] == 2) i = j = v;
              if (table[k][v] == 1) (i < 0 ? i : j) = v;
            }
            if (i == j) {
              a(i, i) = mono[k];
            } else {
              a(i, j) = a(j, i) = 0.5 * mono[k];
            }
          }
          try {
            est.value = volume_quadratic_exact(a);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kDomain) throw;
            est.infinite = true;
            est.value = INFINITY;
          }
        } else {
          fail(ErrorCode::kDomain, "exact volume needs degree 2 or a multiple of the ball form");
        }
        break;
      }
      default:
        fail(ErrorCode::kDomain, "unknown volume method");
    }
    out->value = est.value;
    out->std_error = est.std_error;
    out->samples = est.samples;
    out->seed = est.seed;
    out->method = static_cast<fv_volume_method>(est.method);
    out->infinite = est.infinite ? 1 : 0;
  });
}

fv_status fv_ball_volume(int n, double* out) {
  FV_REQUIRE(out, "null argument");
  return guard([&] { *out = ball_volume(n); });
}

fv_status fv_kappa(int n, int d, double* out) {
  FV_REQUIRE(out, "null argument");
  return guard([&] { *out = kappa(n, d); });
}

fv_status fv_form_norm(const fv_form* f, fv_norm_kind kind, double p, uint64_t samples, uint64_t seed,
                       fv_norm_estimate* out) {
  FV_REQUIRE(f && out, "null argument");
  return guard([&] {
    *out = fv_norm_estimate{0.0, 0.0, 0};
    const Form& form = f->f;
    switch (kind) {
      case FV_NORM_BOMBIERI:
        out->value = bombieri_norm(form);
        break;
      case FV_NORM_L1:
        out->value = l1_coeff_norm(form);
        break;
      case FV_NORM_LP: {
        if (std::isinf(p)) {
          out->value = sup_sphere_norm(form, 32, 200, seed).value;
          break;
        }
        const auto est = lp_sphere_norm(form, p, samples, seed);
        out->value = est.value;
        out->std_error = est.std_error;
        out->samples = est.samples;
        break;
      }
      case FV_NORM_SUP:
        out->value = sup_sphere_norm(form, 32, 200, seed).value;
        break;
      case FV_NORM_NUCLEAR: {
        const double c = ball_multiple(form);
        if (std::isnan(c)) fail(ErrorCode::kDomain, "nuclear norm of a general form needs a certificate");
        out->value = std::abs(c) * nuclear_norm_ball(form.variables(), form.degree());
        break;
      }
      default:
        fail(ErrorCode::kDomain, "Schatten and spectral norms apply to Gram matrices");
    }
  });
}

fv_status fv_gram_norm(const fv_gram* g, fv_norm_kind kind, double p, double* out) {
  FV_REQUIRE(g && out, "null argument");
  return guard([&] {
    if (kind == FV_NORM_SPECTRAL)
      *out = spectral_norm(g->g.entries());
    else if (kind == FV_NORM_SCHATTEN)
      *out = schatten_norm(g->g.entries(), p);
    else
      fail(ErrorCode::kDomain, "Gram matrices support the Schatten and spectral norms");
  });
}

fv_status fv_nuclear_upper_bound(const fv_form* f, const double* weights, const double* directions, size_t count,
                                 double tol, double* out) {
  FV_REQUIRE(f && out && (count == 0 || (weights && directions)), "null argument");
  return guard([&] {
    const auto n = static_cast<std::size_t>(f->f.variables());
    std::vector<PowerTerm> terms(count);
    for (std::size_t k = 0; k < count; ++k) {
      terms[k].weight = weights[k];
      terms[k].direction.assign(directions + k * n, directions + (k + 1) * n);
    }
    *out = nuclear_upper_bound(terms, f->f, tol);
  });
}

fv_status fv_theoretical_opt(fv_norm_kind kind, double p, int n, int d, double* out) {
  FV_REQUIRE(out, "null argument");
  return guard([&] { *out = theoretical_opt(spec_of(kind, p), n, d); });
}

void fv_optimize_config_init(fv_optimize_config* c) {
  if (!c) return;
  const SolverOptions o;
  *c = fv_optimize_config{};
  c->norm = FV_NORM_BOMBIERI;
  c->p = 2.0;
  c->n = 2;
  c->d = 4;
  c->iters = o.iters;
  c->samples = o.samples;
  c->max_samples = o.max_samples;
  c->eval_samples = o.eval_samples;
  c->seed = o.seed;
  c->step = o.step;
  c->start = nullptr;
  c->start_gram = nullptr;
  c->with_trace = 1;
}

void fv_verify_config_init(fv_verify_config* c) {
  if (!c) return;
  const VerifyOptions o;
  *c = fv_verify_config{};
  c->norm = FV_NORM_BOMBIERI;
  c->p = 2.0;
  c->n = 2;
  c->d = 2;
  c->trials = o.trials;
  c->samples = o.samples;
  c->seed = o.seed;
  c->tol = o.tol;
  c->threads = o.threads;
  c->bound_scale = o.bound_scale;
}

fv_status fv_optimize(const fv_optimize_config* c, fv_report** out) {
  FV_REQUIRE(c && out, "null argument");
  return guard([&] {
    SolverOptions o;
    o.iters = c->iters;
    o.samples = c->samples;
    o.max_samples = c->max_samples;
    o.eval_samples = c->eval_samples;
    o.seed = c->seed;
    o.step = c->step;
    if (c->start) o.start = c->start->f;
    if (c->start_gram) o.start_gram = c->start_gram->g;
    SolverTrace t;
    if (c->norm == FV_NORM_SCHATTEN || c->norm == FV_NORM_SPECTRAL)
      t = minimize_volume_sos(c->norm == FV_NORM_SPECTRAL ? INFINITY : c->p, c->n, c->d, o);
    else
      t = minimize_volume_form(spec_of(c->norm, c->p), c->n, c->d, o);
    Json j{{"command", "optimize"}, {"problem", t.final_gram ? "sos" : "form"}};
    j.update(to_json(t, c->with_trace != 0));
    *out = make_report(j, !t.final_objective.infinite);
  });
}

fv_status fv_verify(const fv_verify_config* c, fv_report** out) {
  FV_REQUIRE(c && out, "null argument");
  return guard([&] {
    VerifyOptions o;
    o.trials = c->trials;
    o.samples = c->samples;
    o.seed = c->seed;
    o.tol = c->tol;
    o.threads = c->threads;
    o.bound_scale = c->bound_scale;
    const auto r = verify_lower_bound(spec_of(c->norm, c->p), c->n, c->d, o);
    Json j{{"command", "verify"}, {"seed", c->seed}, {"samples", c->samples}, {"bound_scale", c->bound_scale}};
    j.update(to_json(r));
    *out = make_report(j, r.passed());
  });
}

fv_status fv_verify_pstar(fv_norm_kind kind, double p, int n, int d, uint64_t samples, uint64_t seed,
                          fv_report** out) {
  FV_REQUIRE(out, "null argument");
  return guard([&] {
    const auto r = verify_pstar_equivalence(spec_of(kind, p), n, d, seed, samples);
    Json j{{"command", "verify-pstar"}, {"seed", seed}, {"samples", samples}};
    j.update(to_json(r));
    *out = make_report(j, r.passed);
  });
}

int fv_report_passed(const fv_report* r) { return r && r->passed ? 1 : 0; }

const char* fv_report_json(const fv_report* r) { return r ? r->json.c_str() : ""; }

void fv_report_free(fv_report* r) { delete r; }

}  // extern "C"

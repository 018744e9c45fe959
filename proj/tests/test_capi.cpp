#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "formvol/formvol.h"

TEST(CApi, FormLifecycle) {
  fv_form* f = nullptr;
  ASSERT_EQ(fv_form_builtin("ball", 2, 4, &f), FV_OK);
  EXPECT_EQ(fv_form_variables(f), 2);
  EXPECT_EQ(fv_form_degree(f), 4);
  ASSERT_EQ(fv_form_size(f), 5u);
  std::vector<double> c(5);
  ASSERT_EQ(fv_form_coeffs(f, c.data(), c.size()), FV_OK);
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_NEAR(c[2], 2.0 / std::sqrt(6.0), 1e-15);
  EXPECT_EQ(fv_form_coeffs(f, c.data(), 3), FV_ERR_SHAPE);
  const double x[] = {0.6, 0.8};
  double v = 0.0;
  ASSERT_EQ(fv_form_evaluate(f, x, 2, &v), FV_OK);
  EXPECT_NEAR(v, 1.0, 1e-15);
  char* json = nullptr;
  ASSERT_EQ(fv_form_to_json(f, &json), FV_OK);
  fv_form* g = nullptr;
  ASSERT_EQ(fv_form_from_json(json, &g), FV_OK);
  fv_string_free(json);
  fv_form_free(g);
  fv_form_free(f);
}

TEST(CApi, ErrorsCarryMessages) {
  fv_form* f = nullptr;
  EXPECT_EQ(fv_form_builtin("ball", 2, 3, &f), FV_ERR_DOMAIN);
  EXPECT_NE(std::string(fv_last_error()).size(), 0u);
  EXPECT_EQ(fv_form_builtin("cube", 2, 2, &f), FV_ERR_DOMAIN);
  EXPECT_EQ(fv_form_builtin(nullptr, 2, 2, &f), FV_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(fv_form_from_json("{", &f), FV_ERR_PARSE);
  EXPECT_EQ(fv_form_load("/nonexistent.json", &f), FV_ERR_IO);
  double out = 0.0;
  EXPECT_EQ(fv_theoretical_opt(FV_NORM_L1, 1.0, 2, 4, &out), FV_ERR_NOT_INVARIANT);
  EXPECT_STREQ(fv_status_string(FV_ERR_NOT_INVARIANT), "norm not invariant");
}

TEST(CApi, ErrorsAreThreadLocal) {
  fv_form* f = nullptr;
  EXPECT_EQ(fv_form_builtin("cube", 2, 2, &f), FV_ERR_DOMAIN);
  const std::string mine = fv_last_error();
  std::thread([] {
    fv_form* g = nullptr;
    EXPECT_EQ(fv_form_from_json("{", &g), FV_ERR_PARSE);
  }).join();
  EXPECT_EQ(mine, fv_last_error());
}

TEST(CApi, Volumes) {
  fv_form* f = nullptr;
  ASSERT_EQ(fv_form_builtin("ball", 3, 2, &f), FV_OK);
  fv_volume_estimate est{};
  ASSERT_EQ(fv_volume(f, FV_VOLUME_LAPLACE, 1000, 1, &est), FV_OK);
  EXPECT_NEAR(est.value, 4.0 * M_PI / 3.0, 1e-12);
  ASSERT_EQ(fv_volume(f, FV_VOLUME_EXACT, 0, 1, &est), FV_OK);
  EXPECT_NEAR(est.value, 4.0 * M_PI / 3.0, 1e-13);
  fv_form_free(f);

  const double q[] = {2.0, 0.0, 0.5};  // 2 x^2 + y^2 / 2, monomial basis
  ASSERT_EQ(fv_form_from_coeffs(2, 2, q, 3, 1, &f), FV_OK);
  ASSERT_EQ(fv_volume(f, FV_VOLUME_EXACT, 0, 1, &est), FV_OK);
  EXPECT_NEAR(est.value, M_PI, 1e-13);
  fv_form_free(f);

  const double indefinite[] = {1.0, 0.0, -1.0};
  ASSERT_EQ(fv_form_from_coeffs(2, 2, indefinite, 3, 1, &f), FV_OK);
  ASSERT_EQ(fv_volume(f, FV_VOLUME_LAPLACE, 1000, 1, &est), FV_OK);
  EXPECT_EQ(est.infinite, 1);
  ASSERT_EQ(fv_volume(f, FV_VOLUME_EXACT, 0, 1, &est), FV_OK);
  EXPECT_EQ(est.infinite, 1);
  fv_form_free(f);

  ASSERT_EQ(fv_form_builtin("powers", 2, 4, &f), FV_OK);
  EXPECT_EQ(fv_volume(f, FV_VOLUME_EXACT, 0, 1, &est), FV_ERR_DOMAIN);
  fv_form_free(f);
}

TEST(CApi, Norms) {
  fv_form* f = nullptr;
  ASSERT_EQ(fv_form_builtin("ball", 2, 4, &f), FV_OK);
  fv_norm_estimate n{};
  ASSERT_EQ(fv_form_norm(f, FV_NORM_BOMBIERI, 0, 0, 1, &n), FV_OK);
  EXPECT_NEAR(n.value, std::sqrt(8.0 / 3.0), 1e-14);
  ASSERT_EQ(fv_form_norm(f, FV_NORM_NUCLEAR, 0, 0, 1, &n), FV_OK);
  EXPECT_NEAR(n.value, 8.0 / 3.0, 1e-14);
  ASSERT_EQ(fv_form_norm(f, FV_NORM_L1, 0, 0, 1, &n), FV_OK);
  EXPECT_NEAR(n.value, 4.0, 1e-14);
  EXPECT_EQ(fv_form_norm(f, FV_NORM_SCHATTEN, 2, 0, 1, &n), FV_ERR_DOMAIN);
  fv_form_free(f);

  ASSERT_EQ(fv_form_builtin("powers", 2, 4, &f), FV_OK);
  EXPECT_EQ(fv_form_norm(f, FV_NORM_NUCLEAR, 0, 0, 1, &n), FV_ERR_DOMAIN);
  const double w[] = {1.0, 1.0};
  const double dirs[] = {1.0, 0.0, 0.0, 1.0};
  double bound = 0.0;
  ASSERT_EQ(fv_nuclear_upper_bound(f, w, dirs, 2, 1e-9, &bound), FV_OK);
  EXPECT_DOUBLE_EQ(bound, 2.0);
  EXPECT_EQ(fv_nuclear_upper_bound(f, w, dirs, 1, 1e-9, &bound), FV_ERR_INVALID_CERTIFICATE);
  fv_form_free(f);

  fv_gram* g = nullptr;
  ASSERT_EQ(fv_gram_identity(2, 4, &g), FV_OK);
  double s = 0.0;
  ASSERT_EQ(fv_gram_norm(g, FV_NORM_SCHATTEN, 2.0, &s), FV_OK);
  EXPECT_NEAR(s, std::sqrt(3.0), 1e-14);
  ASSERT_EQ(fv_gram_norm(g, FV_NORM_SPECTRAL, 0, &s), FV_OK);
  EXPECT_NEAR(s, 1.0, 1e-15);
  fv_form* b = nullptr;
  ASSERT_EQ(fv_gram_to_form(g, &b), FV_OK);
  fv_form_free(b);
  fv_gram_free(g);

  const double bad[] = {1.0, 0.5, 0.4, 1.0};
  EXPECT_EQ(fv_gram_from_entries(2, 2, bad, 4, &g), FV_ERR_DOMAIN);
}

TEST(CApi, OptimizeAndVerifyReports) {
  fv_optimize_config oc;
  fv_optimize_config_init(&oc);
  oc.n = 2;
  oc.d = 2;
  oc.iters = 10;
  oc.samples = 2000;
  oc.eval_samples = 5000;
  fv_report* r = nullptr;
  ASSERT_EQ(fv_optimize(&oc, &r), FV_OK);
  EXPECT_EQ(fv_report_passed(r), 1);
  const std::string json = fv_report_json(r);
  EXPECT_NE(json.find("\"trace\""), std::string::npos);
  EXPECT_NE(json.find("\"final_objective\""), std::string::npos);
  fv_report_free(r);

  fv_verify_config vc;
  fv_verify_config_init(&vc);
  vc.n = 2;
  vc.d = 2;
  vc.trials = 10;
  vc.samples = 2000;
  ASSERT_EQ(fv_verify(&vc, &r), FV_OK);
  EXPECT_EQ(fv_report_passed(r), 1);
  fv_report_free(r);
  vc.bound_scale = 2.0;
  ASSERT_EQ(fv_verify(&vc, &r), FV_OK);
  EXPECT_EQ(fv_report_passed(r), 0);
  EXPECT_NE(std::string(fv_report_json(r)).find("\"violations\""), std::string::npos);
  fv_report_free(r);

  ASSERT_EQ(fv_verify_pstar(FV_NORM_BOMBIERI, 2.0, 2, 4, 5000, 1, &r), FV_OK);
  EXPECT_EQ(fv_report_passed(r), 1);
  fv_report_free(r);
}

TEST(CApi, Constants) {
  double k = 0.0;
  ASSERT_EQ(fv_kappa(1, 4, &k), FV_OK);
  EXPECT_NEAR(k, 10.7995166289787681939031974998, 1e-11);
  ASSERT_EQ(fv_ball_volume(2, &k), FV_OK);
  EXPECT_NEAR(k, M_PI, 1e-14);
  EXPECT_STRNE(fv_version(), "");
}

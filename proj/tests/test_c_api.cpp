#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "lrd/lrd.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  lrd_string_free(s);
  return out;
}

lrd_series* fgn(double h, std::size_t n, std::uint64_t seed) {
  lrd_series* s = nullptr;
  REQUIRE(lrd_generate_fgn(h, 1.0, n, seed, &s) == LRD_OK);
  return s;
}

}  // namespace

TEST_CASE("status codes") {
  CHECK(std::strlen(lrd_version()) > 0);
  CHECK(std::string(lrd_status_name(LRD_OK)) == "ok");
  CHECK(lrd_exit_code(LRD_OK) == 0);
  CHECK(lrd_exit_code(LRD_ERR_PARAMETER) == 1);
  CHECK(lrd_exit_code(LRD_ERR_CONSTRAINT) == 1);
  CHECK(lrd_exit_code(LRD_ERR_PARSE) == 2);
  CHECK(lrd_exit_code(LRD_ERR_QUALITY) == 2);
  CHECK(lrd_exit_code(LRD_ERR_IO) == 2);
  CHECK(lrd_exit_code(LRD_ERR_DEGENERATE) == 3);
  CHECK(lrd_exit_code(LRD_ERR_NUMERICAL) == 3);
  CHECK(lrd_exit_code(LRD_ERR_INTERNAL) == 3);
}

TEST_CASE("series handles") {
  const double v[] = {1.0, 2.0, 4.0};
  lrd_series* s = nullptr;
  REQUIRE(lrd_series_create(v, 3, 0.5, 2.0, &s) == LRD_OK);
  CHECK(lrd_series_length(s) == 3);
  CHECK(lrd_series_delta(s) == 0.5);
  CHECK(lrd_series_t0(s) == 2.0);
  CHECK(lrd_series_values(s)[2] == 4.0);
  char* csv = nullptr;
  REQUIRE(lrd_series_to_csv(s, &csv) == LRD_OK);
  CHECK(take(csv) == "t,value\n2,1\n2.5,2\n3,4\n");

  lrd_series* agg = nullptr;
  REQUIRE(lrd_series_aggregate(s, &agg) == LRD_OK);
  CHECK(lrd_series_values(agg)[2] == 7.0);
  lrd_series_free(agg);

  const auto path = fs::temp_directory_path() / "lrd_c_api_series.csv";
  REQUIRE(lrd_series_write_csv(s, path.c_str()) == LRD_OK);
  lrd_series* back = nullptr;
  REQUIRE(lrd_series_read(path.c_str(), "uniform-csv", nullptr, &back, nullptr) == LRD_OK);
  CHECK(lrd_series_length(back) == 3);
  CHECK(lrd_series_t0(back) == 2.0);
  lrd_series_free(back);
  fs::remove(path);
  lrd_series_free(s);

  const double bad[] = {1.0, NAN};
  lrd_series* none = nullptr;
  CHECK(lrd_series_create(bad, 2, 1.0, 0.0, &none) == LRD_ERR_PARAMETER);
  CHECK(none == nullptr);
  CHECK(std::strlen(lrd_last_error()) > 0);
  CHECK(lrd_series_create(v, 3, 0.0, 0.0, &none) == LRD_ERR_PARAMETER);
  CHECK(lrd_series_create(nullptr, 3, 1.0, 0.0, &none) == LRD_ERR_PARAMETER);
  CHECK(lrd_series_read("/nonexistent/file.csv", "uniform-csv", nullptr, &none, nullptr) == LRD_ERR_IO);
  lrd_series_free(nullptr);
}

TEST_CASE("rr files") {
  const auto path = fs::temp_directory_path() / "lrd_c_api.rr";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    for (int i = 0; i < 40; ++i) std::fprintf(f, "%d\n", i == 5 ? 4000 : 600);
    std::fclose(f);
  }
  lrd_series* s = nullptr;
  std::size_t dropped = 0;
  REQUIRE(lrd_series_read(path.c_str(), "rr-ms", nullptr, &s, &dropped) == LRD_OK);
  CHECK(dropped == 1);
  CHECK(lrd_series_values(s)[0] == doctest::Approx(100.0));
  lrd_series_free(s);
  CHECK(lrd_series_read(path.c_str(), "wav", nullptr, &s, nullptr) == LRD_ERR_PARAMETER);
  fs::remove(path);
}

TEST_CASE("synthesis") {
  double r = 0.0;
  REQUIRE(lrd_fgn_autocovariance(0.7, 1.0, 1, &r) == LRD_OK);
  CHECK(r == doctest::Approx(0.5 * (std::pow(2.0, 1.4) - 2.0)));
  CHECK(lrd_fgn_autocovariance(1.2, 1.0, 1, &r) == LRD_ERR_PARAMETER);

  lrd_series* a = fgn(0.7, 256, 9);
  lrd_series* b = fgn(0.7, 256, 9);
  CHECK(std::memcmp(lrd_series_values(a), lrd_series_values(b), 256 * sizeof(double)) == 0);

  const double coef[] = {1.0, 2.0};
  lrd_series* t = nullptr;
  REQUIRE(lrd_add_polynomial_trend(a, coef, 2, &t) == LRD_OK);
  CHECK(lrd_series_values(t)[128] == doctest::Approx(lrd_series_values(a)[128] + 2.0));
  lrd_series_free(t);
  const double levels[] = {0.0, 5.0};
  const double breaks[] = {0.5};
  REQUIRE(lrd_add_step_trend(a, levels, breaks, 1, &t) == LRD_OK);
  CHECK(lrd_series_values(t)[200] == doctest::Approx(lrd_series_values(a)[200] + 5.0));
  lrd_series_free(t);
  const double bad_breaks[] = {1.5};
  CHECK(lrd_add_step_trend(a, levels, bad_breaks, 1, &t) == LRD_ERR_PARAMETER);
  lrd_series_free(a);
  lrd_series_free(b);

  lrd_series* l = nullptr;
  char* warning = nullptr;
  REQUIRE(lrd_generate_lfgn(1.2, 1.0, 0.2, 4.0, NAN, NAN, 4096, 0.25, 3, &l, &warning) == LRD_OK);
  CHECK(lrd_series_length(l) == 4096);
  CHECK(lrd_series_delta(l) == 0.25);
  if (warning) lrd_string_free(warning);
  lrd_series_free(l);
  REQUIRE(lrd_generate_lfgn(1.2, 1.0, 0.2, 4.0, NAN, NAN, 64, 0.25, 3, &l, &warning) == LRD_OK);
  CHECK(warning != nullptr);
  if (warning) lrd_string_free(warning);
  lrd_series_free(l);
  CHECK(lrd_generate_lfgn(1.2, 1.0, 4.0, 0.2, NAN, NAN, 64, 0.25, 3, &l, nullptr) == LRD_ERR_PARAMETER);
}

TEST_CASE("configuration") {
  lrd_config* c = nullptr;
  REQUIRE(lrd_config_create(&c) == LRD_OK);
  REQUIRE(lrd_config_set(c, "k_max", "5") == LRD_OK);
  REQUIRE(lrd_config_set(c, "regression", "ols") == LRD_OK);
  char* v = nullptr;
  REQUIRE(lrd_config_get(c, "k_max", &v) == LRD_OK);
  CHECK(take(v) == "5");
  REQUIRE(lrd_config_get(c, "regression", &v) == LRD_OK);
  CHECK(take(v) == "ols");
  REQUIRE(lrd_config_set(c, "threads", "3") == LRD_OK);
  REQUIRE(lrd_config_get(c, "threads", &v) == LRD_OK);
  CHECK(take(v) == "3");
  CHECK(lrd_config_get(c, "nope", &v) == LRD_ERR_PARAMETER);
  CHECK(lrd_config_set(c, "nope", "1") == LRD_ERR_PARAMETER);
  CHECK(lrd_config_set(c, "omega0", "abc") == LRD_ERR_PARAMETER);
  char* json = nullptr;
  REQUIRE(lrd_config_to_json(c, &json) == LRD_OK);
  const std::string j = take(json);
  CHECK(j.find("\"k_max\":5") != std::string::npos);
  CHECK(j.find("threads") == std::string::npos);

  const auto path = fs::temp_directory_path() / "lrd_c_api.toml";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs("min_seg = 40\nomega1 = 3\n", f);
    std::fclose(f);
  }
  lrd_config* loaded = nullptr;
  REQUIRE(lrd_config_load(path.c_str(), &loaded) == LRD_OK);
  REQUIRE(lrd_config_get(loaded, "min_seg", &v) == LRD_OK);
  CHECK(take(v) == "40");
  lrd_config_free(loaded);
  fs::remove(path);
  CHECK(lrd_config_load("/nonexistent/c.toml", &loaded) == LRD_ERR_IO);
  lrd_config_free(c);
}

TEST_CASE("segmentation, dfa and wavelets") {
  std::vector<double> v(600);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i < 250 ? 0.0 : 10.0) + 0.01 * std::sin(0.7 * i);
  lrd_series* s = nullptr;
  REQUIRE(lrd_series_create(v.data(), v.size(), 1.0, 0.0, &s) == LRD_OK);
  lrd_segmentation* seg = nullptr;
  REQUIRE(lrd_segment(s, nullptr, 2, &seg) == LRD_OK);
  CHECK(lrd_segmentation_k(seg) == 2);
  std::size_t taus[4] = {};
  CHECK(lrd_segmentation_taus(seg, taus, 4) == 1);
  CHECK(std::abs(static_cast<long>(taus[0]) - 250) <= 1);
  char* json = nullptr;
  REQUIRE(lrd_segmentation_to_json(seg, &json) == LRD_OK);
  CHECK(take(json).find("\"taus\"") != std::string::npos);
  lrd_segmentation_free(seg);
  CHECK(lrd_segment(s, nullptr, 40, &seg) == LRD_ERR_CONSTRAINT);
  lrd_series_free(s);

  lrd_series* x = fgn(0.8, 8192, 21);
  lrd_dfa_result* d = nullptr;
  REQUIRE(lrd_dfa(x, nullptr, &d) == LRD_OK);
  CHECK(std::abs(lrd_dfa_h(d) - 0.8) < 0.15);
  REQUIRE(lrd_dfa_to_csv(d, &json) == LRD_OK);
  CHECK(take(json).rfind("w,F\n", 0) == 0);
  REQUIRE(lrd_dfa_to_json(d, &json) == LRD_OK);
  CHECK(take(json).find("\"h_hat\"") != std::string::npos);
  lrd_dfa_free(d);

  lrd_wavelet_result* w = nullptr;
  REQUIRE(lrd_wavelet(x, nullptr, "lrd", 1, 1, &w) == LRD_OK);
  CHECK(std::abs(lrd_wavelet_h(w) - 0.8) < 0.15);
  double p = -1.0;
  CHECK(lrd_wavelet_gof_p(w, &p) == 1);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
  REQUIRE(lrd_wavelet_to_csv(w, &json) == LRD_OK);
  CHECK(take(json).rfind("a,log_a,S,log_S,count\n", 0) == 0);
  REQUIRE(lrd_wavelet_to_json(w, &json) == LRD_OK);
  CHECK(take(json).find("band_suggestion") != std::string::npos);
  lrd_wavelet_free(w);
  REQUIRE(lrd_wavelet(x, nullptr, "selfsimilar", 0, 0, &w) == LRD_OK);
  CHECK(lrd_wavelet_gof_p(w, &p) == 0);
  lrd_wavelet_free(w);
  CHECK(lrd_wavelet(x, nullptr, "spectral", 0, 0, &w) == LRD_ERR_PARAMETER);
  lrd_series_free(x);

  std::vector<double> zeros(1000, 0.0);
  REQUIRE(lrd_series_create(zeros.data(), zeros.size(), 1.0, 0.0, &s) == LRD_OK);
  CHECK(lrd_wavelet(s, nullptr, "lrd", 0, 0, &w) == LRD_ERR_DEGENERATE);
  CHECK(lrd_dfa(s, nullptr, &d) == LRD_ERR_DEGENERATE);
  lrd_series_free(s);
}

TEST_CASE("analysis and Monte Carlo") {
  lrd_series* s = nullptr;
  REQUIRE(lrd_generate_lfgn(1.2, 1.0, 0.2, 4.0, NAN, NAN, 3000, 1.0, 5, &s, nullptr) == LRD_OK);
  lrd_report* r = nullptr;
  REQUIRE(lrd_analyze(s, nullptr, "one", &r) == LRD_OK);
  CHECK(lrd_report_phase_count(r) >= 1);
  double h = 0.0;
  CHECK(lrd_report_phase_wavelet_h(r, 0, &h) == 1);
  CHECK(lrd_report_phase_wavelet_h(r, 99, &h) == 0);
  char* json = nullptr;
  REQUIRE(lrd_report_to_json(r, &json) == LRD_OK);
  CHECK(take(json).find("\"subject\": \"one\"") != std::string::npos);
  const auto dir = fs::temp_directory_path() / "lrd_c_api_emit";
  fs::remove_all(dir);
  REQUIRE(lrd_report_emit(r, dir.c_str()) == LRD_OK);
  CHECK(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
  const lrd_report* both[] = {r, r};
  REQUIRE(lrd_cohort_to_json(both, 2, &json) == LRD_OK);
  CHECK(take(json).find("anova_wavelet") != std::string::npos);
  lrd_report_free(r);
  lrd_series_free(s);

  const double hs[] = {0.6};
  lrd_table1* t1 = nullptr;
  lrd_table1* t2 = nullptr;
  REQUIRE(lrd_table1_run(hs, 1, 2048, 10, 4, "ols", 1, &t1) == LRD_OK);
  REQUIRE(lrd_table1_run(hs, 1, 2048, 10, 4, "ols", 2, &t2) == LRD_OK);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(lrd_table1_to_json(t1, &a) == LRD_OK);
  REQUIRE(lrd_table1_to_json(t2, &b) == LRD_OK);
  CHECK(take(a) == take(b));
  REQUIRE(lrd_table1_to_text(t1, &a) == LRD_OK);
  CHECK(!take(a).empty());
  REQUIRE(lrd_table1_to_csv(t1, &a) == LRD_OK);
  CHECK(take(a).rfind("H,", 0) == 0);
  lrd_table1_free(t1);
  lrd_table1_free(t2);
  CHECK(lrd_table1_run(hs, 1, 2048, 10, 4, "wls", 1, &t1) == LRD_ERR_PARAMETER);
}

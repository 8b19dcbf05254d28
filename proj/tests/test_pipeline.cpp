#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lrd/config.hpp"
#include "lrd/error.hpp"
#include "lrd/parallel.hpp"
#include "lrd/pipeline.hpp"
#include "lrd/synthesis.hpp"

using namespace lrd;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::numerical;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lrd_test_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

UniformSeries concat(const std::vector<UniformSeries>& parts) {
  std::vector<double> v;
  for (const auto& p : parts) v.insert(v.end(), p.values().begin(), p.values().end());
  return UniformSeries(v);
}

UniformSeries shifted(const UniformSeries& s, double scale, double shift) {
  std::vector<double> v(s.values().begin(), s.values().end());
  for (auto& x : v) x = scale * x + shift;
  return UniformSeries(v);
}

}  // namespace

TEST_CASE("config files") {
  SUBCASE("json") {
    const auto c = parse_config(R"({"min_seg": 30, "regression": "ols", "dfa_windows": [8, 16, 32],
                                   "omega0": 0.1})");
    CHECK(c.changepoint.min_seg == 30);
    CHECK(c.regression == RegressionKind::ols);
    CHECK(c.dfa_windows == std::vector<std::size_t>{8, 16, 32});
    CHECK(c.band.omega0 == 0.1);
    CHECK(c.band.omega1 == 4.0);
  }
  SUBCASE("key = value") {
    const auto c = parse_config(
        "# analysis\n[changepoint]\nk_max = 5  # fewer\nelbow_ratio = 3.5\n\nregression = \"ols\"\n"
        "dfa_windows = [8, 16, 64]\n");
    CHECK(c.changepoint.k_max == 5);
    CHECK(c.changepoint.elbow_ratio == 3.5);
    CHECK(c.regression == RegressionKind::ols);
    CHECK(c.dfa_windows == std::vector<std::size_t>{8, 16, 64});
  }
  SUBCASE("round trip") {
    AnalysisConfig a;
    a.set("omega1", "3.5");
    a.set("seed", "99");
    a.set("dfa_windows", "4,9,30");
    CHECK(parse_config(a.to_json()).to_json() == a.to_json());
    CHECK(a.to_json().find("threads") == std::string::npos);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { parse_config("k_max = 5\nbogus = 1\n", "c.toml"); }) == ErrorCode::parameter);
    CHECK(message_of([] { parse_config("k_max = 5\nbogus = 1\n", "c.toml"); }).find("c.toml:2") !=
          std::string::npos);
    CHECK(code_of([] { parse_config("{\"k_max\": }"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("k_max 5\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("omega0 = 5\n"); }) == ErrorCode::parameter);
    CHECK(code_of([] { parse_config("regression = wls\n"); }) == ErrorCode::parameter);
    CHECK(code_of([] { parse_config("min_seg = -3\n"); }) == ErrorCode::parameter);
    CHECK(code_of([] { load_config("/nonexistent/lrd.toml"); }) == ErrorCode::io);
  }
}

TEST_CASE("rr parsing") {
  const auto r = parse_rr("# header\n600\n\n 610.5 \n590\n", "s1");
  CHECK(r.subject == "s1");
  CHECK(r.rr_ms == std::vector<double>{600, 610.5, 590});
  CHECK(code_of([] { parse_rr("600\nabc\n", "s", "f.rr"); }) == ErrorCode::parse);
  CHECK(message_of([] { parse_rr("600\nabc\n", "s", "f.rr"); }).find("f.rr:2") != std::string::npos);
  CHECK(message_of([] { parse_rr("600\n700\n-5\n", "s", "f.rr"); }).find("f.rr:3") != std::string::npos);
  CHECK(code_of([] { parse_rr("# nothing\n", "s"); }) == ErrorCode::parse);
  CHECK(parse_input_format("rr-ms") == InputFormat::rr_ms);
  CHECK(parse_input_format("uniform-csv") == InputFormat::uniform_csv);
  CHECK_THROWS_AS(parse_input_format("xml"), Error);
}

TEST_CASE("cleaning and resampling") {
  SUBCASE("constant intervals") {
    const auto res = clean_and_resample({"s", std::vector<double>(30, 600.0)});
    CHECK(res.kept == 30);
    CHECK(res.dropped.empty());
    CHECK(res.series.delta() == 1.0);
    CHECK(res.series.t0() == doctest::Approx(0.6));
    CHECK(res.series.size() == 18);
    for (double v : res.series.values()) CHECK(v == doctest::Approx(100.0));
  }
  SUBCASE("interpolation between beats") {
    std::vector<double> rr;
    for (int i = 0; i < 20; ++i) rr.push_back(i % 2 ? 1000.0 : 500.0);
    const auto res = clean_and_resample({"s", rr}, 2.0);
    // Beats at 0.5 s (120 BPM) and 1.5 s (60 BPM); the grid starts at 0.5 s.
    CHECK(res.series.delta() == 0.5);
    CHECK(res.series[0] == doctest::Approx(120.0));
    CHECK(res.series[1] == doctest::Approx(90.0));
    CHECK(res.series[2] == doctest::Approx(60.0));
  }
  SUBCASE("artifacts are dropped") {
    std::vector<double> rr(20, 600.0);
    rr[7] = 5000.0;
    rr[12] = 100.0;
    const auto res = clean_and_resample({"s", rr});
    CHECK(res.kept == 18);
    CHECK(res.dropped == std::vector<std::size_t>{7, 12});
    for (double v : res.series.values()) CHECK(v == doctest::Approx(100.0));
    // The clock keeps running through the dropped 5 s interval.
    CHECK(res.series.t0() + res.series.delta() * static_cast<double>(res.series.size() - 1) >= 15.0);
  }
  SUBCASE("poor recordings") {
    std::vector<double> rr(20, 600.0);
    for (int i = 0; i < 11; ++i) rr[static_cast<std::size_t>(i)] = 3000.0;
    CHECK(code_of([&] { clean_and_resample({"s", rr}); }) == ErrorCode::quality);
    CHECK(code_of([] { clean_and_resample({"s", std::vector<double>(8, 600.0)}); }) == ErrorCode::quality);
    CHECK(code_of([] { clean_and_resample({"s", std::vector<double>(30, 600.0)}, 0.0); }) ==
          ErrorCode::parameter);
  }
}

TEST_CASE("uniform csv") {
  const auto x = generate_fgn({0.7, 2.0, 200, 4});
  const UniformSeries s(std::vector<double>(x.values().begin(), x.values().end()), 0.25, 10.0);
  const auto back = parse_uniform_csv(series_to_csv(s));
  REQUIRE(back.size() == s.size());
  CHECK(back.delta() == doctest::Approx(0.25));
  CHECK(back.t0() == doctest::Approx(10.0));
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(back[i] == doctest::Approx(s[i]).epsilon(1e-8));
  CHECK(code_of([] { parse_uniform_csv("time,v\n0,1\n"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_uniform_csv("t,value\n0,1\n1,2\n2.5,3\n"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_uniform_csv("t,value\n0,1\n1,x\n"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_uniform_csv("t,value\n"); }) == ErrorCode::parse);
  CHECK(code_of([] { read_uniform_csv("/nonexistent/x.csv"); }) == ErrorCode::io);
}

TEST_CASE("phase mapping") {
  auto seg = [](std::vector<std::size_t> ends) {
    Segmentation s;
    std::size_t lo = 0;
    for (auto e : ends) {
      s.segments.push_back({lo, e, 0.0, 1.0});
      lo = e;
    }
    s.n = lo;
    return s;
  };
  auto names = [](const std::vector<PhaseAnalysis>& p) {
    std::vector<std::string> out;
    for (const auto& x : p) out.push_back(x.name);
    return out;
  };
  CHECK(names(map_phases(seg({100}))) == std::vector<std::string>{"middle"});
  CHECK(names(map_phases(seg({80, 100}))) == std::vector<std::string>{"middle", "end"});
  CHECK(names(map_phases(seg({20, 100}))) == std::vector<std::string>{"beginning", "middle"});
  const auto four = map_phases(seg({10, 40, 70, 100}));
  CHECK(names(four) == std::vector<std::string>{"beginning", "middle", "end"});
  CHECK(four[1].lo == 10);
  CHECK(four[1].hi == 70);
  CHECK(four[1].segment_indices == std::vector<std::size_t>{1, 2});
}

TEST_CASE("analysis of a three-phase surrogate") {
  const auto profile = SpectralProfile::with_defaults(1.2, 1.0, 0.2, 4.0);
  std::vector<UniformSeries> parts;
  const double means[] = {0.0, 4.0, 2.0}, scales[] = {1.0, 1.5, 1.2};
  for (int i = 0; i < 3; ++i) {
    auto p = generate_lfgn(profile, 2000, 1.0, derive_seed(3, static_cast<std::uint64_t>(i)));
    const double sd = std::sqrt(variance(p.values()));
    parts.push_back(shifted(p, scales[i] / sd, means[i] - scales[i] * mean(p.values()) / sd));
  }
  const auto series = concat(parts);
  AnalysisConfig cfg;
  const auto rep = analyze(series, cfg, "surrogate");
  CHECK(rep.warnings.empty());
  REQUIRE(rep.scan.has_value());
  CHECK(rep.segmentation.k() >= 3);
  REQUIRE(rep.phases.size() == 3);
  CHECK(rep.phases.front().lo == 0);
  CHECK(rep.phases.back().hi == series.size());
  for (const auto& p : rep.phases) CHECK(p.ok());
  CHECK(rep.whole.ok());

  const auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j["schema_version"] == 1);
  CHECK(j["subject"] == "surrogate");
  CHECK(j["phases"].size() == 3);
  CHECK(j["config"]["omega1"] == 4.0);
  CHECK(j["phases"][0]["wavelet"]["gof"].contains("p_value"));
  CHECK(report_to_json(analyze(series, cfg, "surrogate")) == report_to_json(rep));

  const auto dir = scratch_dir("emit");
  emit(rep, dir.string());
  for (const char* f : {"report.json", "segments.json", "series.csv", "summary.txt", "spectrum_beginning.csv",
                        "spectrum_middle.csv", "spectrum_end.csv", "spectrum_whole.csv", "dfa_middle.csv",
                        "dfa_whole.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  std::ifstream in(dir / "report.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == report_to_json(rep));
  fs::remove_all(dir);

  const auto cmp = compare_cohort({rep, rep});
  REQUIRE(cmp.wavelet.has_value());
  CHECK(cmp.wavelet->labels == std::vector<std::string>{"beginning", "middle", "end"});
  const auto cj = nlohmann::json::parse(cohort_to_json(cmp, {rep, rep}));
  CHECK(cj["subjects"].size() == 2);
}

TEST_CASE("short series and failed phases") {
  const auto noise = generate_fgn({0.6, 1.0, 600, 8});
  const auto flat = UniformSeries(std::vector<double>(600, 5.0));
  const auto series = concat({noise, flat, shifted(generate_fgn({0.6, 1.0, 600, 9}), 1.0, -3.0)});
  AnalysisConfig cfg;
  cfg.min_samples = 2000;
  const auto rep = analyze(series, cfg, "flat");
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("1800 samples") != std::string::npos);
  REQUIRE(rep.phases.size() == 3);
  const auto& mid = rep.phases[1];
  CHECK_FALSE(mid.ok());
  CHECK(mid.dfa_error.rfind("degenerate", 0) == 0);
  CHECK_FALSE(mid.wavelet_error.empty());
  CHECK(rep.phases[0].dfa.has_value());
  const auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j["phases"][1]["status"] == "failed");
  CHECK(j["phases"][1]["dfa"].contains("error"));
  CHECK(report_summary(rep).find("failed") != std::string::npos);

  const auto dir = scratch_dir("failed");
  emit(rep, dir.string());
  CHECK_FALSE(fs::exists(dir / "spectrum_middle.csv"));
  CHECK_FALSE(fs::exists(dir / "dfa_middle.csv"));
  fs::remove_all(dir);

  cfg.band = {1.0, 0.5};
  CHECK_THROWS_AS(analyze(series, cfg), Error);
}

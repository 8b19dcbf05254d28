#include <cmath>
#include <vector>

#include "doctest.h"
#include "lrd/dfa.hpp"
#include "lrd/error.hpp"
#include "lrd/parallel.hpp"
#include "lrd/synthesis.hpp"

using namespace lrd;

namespace {

// Pooled RMS of per-window linear-fit residuals of the cumulative sum,
// written with explicit normal equations.
double dfa_reference(const std::vector<double>& x, std::size_t w) {
  std::vector<double> y(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = (acc += x[i]);
  const std::size_t windows = x.size() / w;
  double ss = 0.0;
  for (std::size_t b = 0; b < windows; ++b) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < w; ++i) {
      const double t = static_cast<double>(i), v = y[b * w + i];
      st += t;
      sy += v;
      stt += t * t;
      sty += t * v;
    }
    const double n = static_cast<double>(w);
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    const double icpt = (sy - slope * st) / n;
    for (std::size_t i = 0; i < w; ++i) {
      const double r = y[b * w + i] - icpt - slope * static_cast<double>(i);
      ss += r * r;
    }
  }
  return std::sqrt(ss / static_cast<double>(windows * w));
}

double mean_h(double h, std::size_t seeds) {
  double acc = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto x = generate_fgn({h, 1.0, 10000, derive_seed(31, s)});
    acc += estimate_h_dfa(dfa_profile(x, default_dfa_windows(x.size()))).h_hat;
  }
  return acc / static_cast<double>(seeds);
}

}  // namespace

TEST_CASE("default window grid") {
  const auto w = default_dfa_windows(10000);
  REQUIRE(w.size() >= 3);
  CHECK(w.front() == 4);
  CHECK(w.back() == 1250);
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
  const auto small = default_dfa_windows(40);
  for (auto v : small) {
    CHECK(v >= 4);
    CHECK(v <= 10);
  }
  CHECK_THROWS_AS(default_dfa_windows(10), Error);
}

TEST_CASE("profile matches a direct computation") {
  const auto x = generate_fgn({0.7, 1.0, 1003, 5});
  const std::vector<double> v(x.values().begin(), x.values().end());
  const std::vector<std::size_t> windows{4, 9, 17, 60, 250};
  const auto p = dfa_profile(x, windows);
  CHECK(p.n_samples == 1003);
  CHECK(p.window_lengths == windows);
  for (std::size_t i = 0; i < windows.size(); ++i)
    CHECK(p.fluctuation[i] == doctest::Approx(dfa_reference(v, windows[i])).epsilon(1e-9));
}

TEST_CASE("constant increments leave no residual") {
  const UniformSeries x(std::vector<double>(400, 2.5));
  const auto p = dfa_profile(x, {4, 8, 16, 50});
  for (double f : p.fluctuation) CHECK(f == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  try {
    estimate_h_dfa(dfa_profile(x, {4, 8, 16}));
    FAIL("expected a degenerate profile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate);
  }
}

TEST_CASE("exact power law profile") {
  DfaProfile p;
  p.window_lengths = {4, 8, 16, 32, 64};
  for (auto w : p.window_lengths) p.fluctuation.push_back(3.0 * std::pow(static_cast<double>(w), 0.7));
  p.n_samples = 1000;
  const auto e = estimate_h_dfa(p);
  CHECK(e.h_hat == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(e.stderr_h == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(e.method == EstimateMethod::dfa);
  CHECK(std::string(to_string(e.method)) == "dfa");
}

TEST_CASE("window constraints") {
  const auto x = generate_fgn({0.5, 1.0, 100, 1});
  CHECK_THROWS_AS(dfa_profile(x, {3, 8}), Error);
  CHECK_THROWS_AS(dfa_profile(x, {4, 26}), Error);
  CHECK_THROWS_AS(dfa_profile(generate_fgn({0.5, 1.0, 15, 1}), {4}), Error);
  DfaProfile two;
  two.window_lengths = {4, 8};
  two.fluctuation = {1.0, 2.0};
  CHECK_THROWS_AS(estimate_h_dfa(two), Error);
}

TEST_CASE("scale and shift invariance") {
  const auto x = generate_fgn({0.8, 1.0, 2000, 9});
  const std::vector<std::size_t> w{4, 10, 25, 60, 150, 400};
  const auto base = dfa_profile(x, w);
  std::vector<double> scaled(x.values().begin(), x.values().end()), shifted = scaled;
  for (auto& v : scaled) v *= 3.0;
  for (auto& v : shifted) v += 11.0;
  const auto ps = dfa_profile(UniformSeries(scaled), w);
  const auto pt = dfa_profile(UniformSeries(shifted), w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(ps.fluctuation[i] == doctest::Approx(3.0 * base.fluctuation[i]).epsilon(1e-10));
    CHECK(pt.fluctuation[i] == doctest::Approx(base.fluctuation[i]).epsilon(1e-7));
  }
  CHECK(estimate_h_dfa(ps).h_hat == doctest::Approx(estimate_h_dfa(base).h_hat).epsilon(1e-10));
  const auto again = dfa_profile(x, w);
  CHECK(again.fluctuation == base.fluctuation);
}

TEST_CASE("white noise and long memory slopes") {
  CHECK(std::abs(mean_h(0.5, 50) - 0.5) <= 0.05);
  CHECK(std::abs(mean_h(0.8, 50) - 0.8) <= 0.05);
}

TEST_CASE("linear trend breaks the DFA estimate") {
  int broken = 0;
  for (std::size_t s = 0; s < 50; ++s) {
    const auto x = generate_fgn({0.8, 1.0, 10000, derive_seed(41, s)});
    // Ramp on the samples whose height is twice the standard deviation of the
    // aggregated path.
    const double amp = 2.0 * std::sqrt(variance(aggregate(x).values()));
    const auto trended = add_trend(x, PolynomialTrend{{0.0, amp}});
    const double h = estimate_h_dfa(dfa_profile(trended, default_dfa_windows(x.size()))).h_hat;
    broken += std::abs(h - 0.8) > 0.1;
  }
  CHECK(broken >= 40);
}

TEST_CASE("csv output") {
  DfaProfile p;
  p.window_lengths = {4, 8, 16};
  p.fluctuation = {0.5, 1.25, 2.0};
  CHECK(dfa_profile_to_csv(p) == "w,F\n4,0.5\n8,1.25\n16,2\n");
}

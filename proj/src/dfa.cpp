#include "lrd/dfa.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "format.hpp"
#include "lrd/error.hpp"
#include "lrd/regression.hpp"

namespace lrd {

std::vector<std::size_t> default_dfa_windows(std::size_t n, std::size_t count) {
  require(n >= 16, ErrorCode::constraint, "DFA needs at least 16 samples");
  require(count >= 2, ErrorCode::parameter, "window grid needs at least 2 points");
  const double lo = 4.0;
  const double hi = std::max(4.0 * lo, static_cast<double>(n) / 8.0);
  const std::size_t cap = n / 4;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    auto w = static_cast<std::size_t>(std::llround(lo * std::pow(hi / lo, t)));
    w = std::clamp<std::size_t>(w, 4, cap);
    if (out.empty() || out.back() != w) out.push_back(w);
  }
  return out;
}

DfaProfile dfa_profile(const UniformSeries& series, const std::vector<std::size_t>& windows) {
  const std::size_t n = series.size();
  require(n >= 16, ErrorCode::constraint, "DFA needs at least 16 samples");
  require(!windows.empty(), ErrorCode::parameter, "no DFA windows given");
  for (std::size_t w : windows)
    require(w >= 4 && w <= n / 4, ErrorCode::parameter,
            "DFA window " + std::to_string(w) + " outside [4, n/4]");

  std::vector<double> path(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) path[i] = acc += series[i];

  DfaProfile profile;
  profile.n_samples = n;
  profile.window_lengths = windows;
  profile.fluctuation.reserve(windows.size());
  for (std::size_t w : windows) {
    const std::size_t blocks = n / w;
    const double tc = 0.5 * static_cast<double>(w - 1);
    double stt = 0.0;
    for (std::size_t t = 0; t < w; ++t) stt += (t - tc) * (t - tc);
    double sum_sq = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const double* z = path.data() + b * w;
      double zm = 0.0;
      for (std::size_t t = 0; t < w; ++t) zm += z[t];
      zm /= static_cast<double>(w);
      double szt = 0.0;
      for (std::size_t t = 0; t < w; ++t) szt += (z[t] - zm) * (t - tc);
      const double slope = szt / stt;
      for (std::size_t t = 0; t < w; ++t) {
        const double r = z[t] - zm - slope * (t - tc);
        sum_sq += r * r;
      }
    }
    profile.fluctuation.push_back(std::sqrt(sum_sq / static_cast<double>(blocks * w)));
  }
  return profile;
}

FractalEstimate estimate_h_dfa(const DfaProfile& profile) {
  const std::size_t m = profile.window_lengths.size();
  require(profile.fluctuation.size() == m, ErrorCode::parameter, "malformed DFA profile");
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = static_cast<double>(profile.window_lengths[i]);
    require(i == 0 || profile.window_lengths[i] > profile.window_lengths[i - 1],
            ErrorCode::parameter, "DFA window lengths must be strictly increasing");
  }
  require(m >= 3, ErrorCode::parameter, "DFA regression needs at least 3 window lengths");
  for (double f : profile.fluctuation)
    require(f > 0.0, ErrorCode::degenerate, "DFA function vanishes at some window length");

  const RegressionFit fit = loglog_fit(w, profile.fluctuation);
  FractalEstimate est;
  est.method = EstimateMethod::dfa;
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.h_hat = fit.slope;
  est.stderr_h = fit.stderr_slope;
  const boost::math::students_t dist(static_cast<double>(m - 2));
  est.ci_halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * est.stderr_h;
  return est;
}

std::string dfa_profile_to_csv(const DfaProfile& profile) {
  std::string out = "w,F\n";
  for (std::size_t i = 0; i < profile.window_lengths.size(); ++i)
    out += std::to_string(profile.window_lengths[i]) + "," + format_g9(profile.fluctuation[i]) + "\n";
  return out;
}

}  // namespace lrd

#include "lrd/inference.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "format.hpp"
#include "lrd/dfa.hpp"
#include "lrd/error.hpp"
#include "lrd/parallel.hpp"
#include "lrd/synthesis.hpp"

namespace lrd {

double mean_test(std::span<const double> sample, double mu0) {
  const std::size_t n = sample.size();
  require(n >= 2, ErrorCode::parameter, "t-test needs at least 2 values");
  const double m = mean(sample);
  double ss = 0.0;
  for (double v : sample) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return m == mu0 ? 1.0 : 0.0;
  const double t = (m - mu0) / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

SampleComparison anova_f(const std::vector<std::vector<double>>& groups,
                         std::vector<std::string> labels) {
  const std::size_t g = groups.size();
  require(g >= 2, ErrorCode::parameter, "ANOVA needs at least 2 groups");
  require(labels.empty() || labels.size() == g, ErrorCode::parameter,
          "one label per group expected");
  std::size_t total = 0;
  double grand = 0.0;
  for (const auto& grp : groups) {
    require(grp.size() >= 2, ErrorCode::parameter, "each ANOVA group needs at least 2 values");
    for (double v : grp) {
      require(std::isfinite(v), ErrorCode::parameter, "ANOVA values must be finite");
      grand += v;
    }
    total += grp.size();
  }
  grand /= static_cast<double>(total);

  double ss_between = 0.0;
  double ss_within = 0.0;
  bool means_equal = true;
  double first_mean = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double m = mean(groups[i]);
    if (i == 0) first_mean = m;
    else if (m != first_mean) means_equal = false;
    ss_between += static_cast<double>(groups[i].size()) * (m - grand) * (m - grand);
    for (double v : groups[i]) ss_within += (v - m) * (v - m);
  }

  SampleComparison out;
  out.labels = labels.empty() ? std::vector<std::string>{} : std::move(labels);
  if (out.labels.empty())
    for (std::size_t i = 0; i < g; ++i) out.labels.push_back("group" + std::to_string(i + 1));
  out.df_between = static_cast<int>(g - 1);
  out.df_within = static_cast<int>(total - g);
  if (means_equal) {
    out.f_statistic = 0.0;
    out.p_value = 1.0;
    return out;
  }
  if (ss_within == 0.0) {
    out.f_statistic = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  out.f_statistic = (ss_between / out.df_between) / (ss_within / out.df_within);
  const boost::math::fisher_f dist(out.df_between, out.df_within);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.f_statistic));
  return out;
}

MonteCarloReport table1_harness(const MonteCarloConfig& config) {
  require(config.reps >= 10, ErrorCode::parameter, "Monte Carlo needs at least 10 replicates");
  require(!config.h_values.empty(), ErrorCode::parameter, "no Hurst values given");
  for (double h : config.h_values)
    require(h > 0.0 && h < 1.0, ErrorCode::parameter, "FGN Hurst values must lie in (0, 1)");

  const std::size_t reps = config.reps;
  const std::size_t total = config.h_values.size() * reps;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> h_dfa(total, nan);
  std::vector<double> h_wav(total, nan);

  const auto windows = default_dfa_windows(config.n, config.dfa_windows);
  const MotherWavelet wavelet;
  const auto scales = default_scales(config.n, 1.0, ScaleMode::lrd, wavelet, std::nullopt,
                                     config.wavelet_scales);

  parallel_for(total, config.threads, [&](std::size_t idx) {
    const double h = config.h_values[idx / reps];
    const auto path = generate_fgn({h, 1.0, config.n, derive_seed(config.seed, idx)});
    try {
      h_dfa[idx] = estimate_h_dfa(dfa_profile(path, windows)).h_hat;
    } catch (const Error&) {
    }
    try {
      const auto spec = scale_spectrum(path, wavelet, scales, ScaleMode::lrd);
      h_wav[idx] = estimate_h_wavelet(spec, config.wavelet_regression).h_hat;
    } catch (const Error&) {
    }
  });

  MonteCarloReport report;
  report.n = config.n;
  report.reps = reps;
  report.seed = config.seed;
  for (std::size_t hi = 0; hi < config.h_values.size(); ++hi) {
    const double h = config.h_values[hi];
    MonteCarloRow row;
    row.hurst = h;
    auto summarize = [&](const std::vector<double>& est, double& bias, double& p, double& rmse,
                         double& mean_out, std::size_t& used, std::size_t& failed) {
      std::vector<double> ok;
      for (std::size_t r = 0; r < reps; ++r) {
        const double v = est[hi * reps + r];
        if (std::isnan(v)) ++failed;
        else ok.push_back(v);
      }
      used = ok.size();
      if (ok.size() < 2) {
        bias = rmse = mean_out = nan;
        p = nan;
        return;
      }
      mean_out = mean(ok);
      bias = std::abs(mean_out - h);
      double mse = 0.0;
      for (double v : ok) mse += (v - h) * (v - h);
      rmse = std::sqrt(mse / static_cast<double>(ok.size()));
      p = mean_test(ok, h);
    };
    summarize(h_dfa, row.bias_dfa, row.p_dfa, row.rmse_dfa, row.mean_dfa, row.used_dfa,
              row.failed_dfa);
    summarize(h_wav, row.bias_wav, row.p_wav, row.rmse_wav, row.mean_wav, row.used_wav,
              row.failed_wav);
    report.rows.push_back(row);
  }
  return report;
}

std::string table1_to_text(const MonteCarloReport& report) {
  std::string out = "N = " + std::to_string(report.n) + ", replications = " +
                    std::to_string(report.reps) + ", seed = " + std::to_string(report.seed) + "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %12s %12s %12s %12s %12s %12s %8s\n", "H", "|bias|DFA",
                "|bias|WAV", "p-val DFA", "p-val WAV", "rMSE DFA", "rMSE WAV", "failed");
  out += line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-6.2f %12.4f %12.4f %12.3g %12.3g %12.4f %12.4f %8zu\n",
                  r.hurst, r.bias_dfa, r.bias_wav, r.p_dfa, r.p_wav, r.rmse_dfa, r.rmse_wav,
                  r.failed_dfa + r.failed_wav);
    out += line;
  }
  return out;
}

std::string table1_to_csv(const MonteCarloReport& report) {
  std::string out =
      "H,abs_bias_dfa,abs_bias_wav,p_val_dfa,p_val_wav,rmse_dfa,rmse_wav,mean_dfa,mean_wav,"
      "failed_dfa,failed_wav\n";
  for (const auto& r : report.rows) {
    out += format_g9(r.hurst) + "," + format_g9(r.bias_dfa) + "," + format_g9(r.bias_wav) + "," +
           format_g9(r.p_dfa) + "," + format_g9(r.p_wav) + "," + format_g9(r.rmse_dfa) + "," +
           format_g9(r.rmse_wav) + "," + format_g9(r.mean_dfa) + "," + format_g9(r.mean_wav) + "," +
           std::to_string(r.failed_dfa) + "," + std::to_string(r.failed_wav) + "\n";
  }
  return out;
}

}  // namespace lrd

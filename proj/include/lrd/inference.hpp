#ifndef LRD_INFERENCE_HPP
#define LRD_INFERENCE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrd/wavelet.hpp"

namespace lrd {

/// Two-sided one-sample t-test of H0: mean == mu0. A sample with zero
/// variance gives p = 1 if it equals mu0 exactly and p = 0 otherwise.
double mean_test(std::span<const double> sample, double mu0);

struct SampleComparison {
  std::vector<std::string> labels;
  double f_statistic = 0.0;
  double p_value = 1.0;
  int df_between = 0;
  int df_within = 0;
};

/// One-way ANOVA. Needs at least 2 groups of at least 2 values. When the
/// pooled within-group variance is zero: identical group means give F = 0,
/// p = 1; distinct means give F = infinity, p = 0.
SampleComparison anova_f(const std::vector<std::vector<double>>& groups,
                         std::vector<std::string> labels = {});

struct MonteCarloRow {
  double hurst = 0.0;
  double bias_dfa = 0.0;  // absolute values
  double bias_wav = 0.0;
  double p_dfa = 1.0;
  double p_wav = 1.0;
  double rmse_dfa = 0.0;
  double rmse_wav = 0.0;
  double mean_dfa = 0.0;
  double mean_wav = 0.0;
  std::size_t used_dfa = 0;
  std::size_t used_wav = 0;
  std::size_t failed_dfa = 0;
  std::size_t failed_wav = 0;
};

struct MonteCarloConfig {
  std::vector<double> h_values{0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t n = 10000;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  RegressionKind wavelet_regression = RegressionKind::ols;
  std::size_t dfa_windows = 6;
  std::size_t wavelet_scales = 12;
};

struct MonteCarloReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<MonteCarloRow> rows;
};

/// For each H, draws `reps` FGN paths (replicate r of H index h uses seed
/// derive_seed(seed, h * reps + r)), estimates H by DFA and by wavelets in
/// lrd mode, and summarizes. Replicates whose estimator fails are counted and
/// left out.
MonteCarloReport table1_harness(const MonteCarloConfig& config);

/// Aligned text table in the column order H, |bias| DFA, |bias| WAV,
/// p-val DFA, p-val WAV, sqrt(MSE) DFA, sqrt(MSE) WAV.
std::string table1_to_text(const MonteCarloReport& report);
std::string table1_to_csv(const MonteCarloReport& report);

}  // namespace lrd

#endif  // LRD_INFERENCE_HPP

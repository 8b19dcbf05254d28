#ifndef LRD_ESTIMATE_HPP
#define LRD_ESTIMATE_HPP

#include <optional>
#include <string>

namespace lrd {

/// Chi-squared distance between the log scale spectrum and its fitted line.
struct GofResult {
  double statistic = 0.0;
  int dof = 1;
  double p_value = 1.0;
  double level = 0.05;
  bool accepted = true;  // p_value >= level
};

enum class EstimateMethod { dfa, wavelet_ols, wavelet_gls };

const char* to_string(EstimateMethod method) noexcept;

/// An exponent estimate with its regression diagnostics. `stderr_h` and
/// `ci_halfwidth` are on the scale of h_hat, not of the raw slope.
struct FractalEstimate {
  double h_hat = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_h = 0.0;
  double ci_halfwidth = 0.0;
  EstimateMethod method = EstimateMethod::dfa;
  std::optional<GofResult> gof;
};

}  // namespace lrd

#endif  // LRD_ESTIMATE_HPP

#ifndef LRD_REGRESSION_HPP
#define LRD_REGRESSION_HPP

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

namespace lrd {

/// Straight-line fit y = intercept + slope * x.
struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::vector<double> residuals;
  double rss = 0.0;  // weighted when weights are present
  std::optional<std::vector<double>> weights;
};

/// Least squares of y on x. With weights, minimizes sum w_i r_i^2 and the
/// slope error uses the weighted residual variance.
RegressionFit linear_fit(std::span<const double> x, std::span<const double> y,
                         std::span<const double> weights = {});

/// linear_fit of log y on log x. Needs at least 3 strictly positive points.
RegressionFit loglog_fit(std::span<const double> x, std::span<const double> y,
                         std::span<const double> weights = {});

/// Generalized least squares with a full covariance for y. stderr_slope is
/// the model-based value sqrt((Z' C^-1 Z)^-1)_11 and rss is r' C^-1 r.
RegressionFit gls_fit(std::span<const double> x, std::span<const double> y,
                      const Eigen::MatrixXd& covariance);

}  // namespace lrd

#endif  // LRD_REGRESSION_HPP

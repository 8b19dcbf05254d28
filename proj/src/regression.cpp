#include "lrd/regression.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "lrd/error.hpp"

namespace lrd {

RegressionFit linear_fit(std::span<const double> x, std::span<const double> y,
                         std::span<const double> weights) {
  const std::size_t n = x.size();
  require(n == y.size(), ErrorCode::parameter, "regression inputs differ in length");
  require(n >= 3, ErrorCode::parameter, "regression needs at least 3 points");
  require(weights.empty() || weights.size() == n, ErrorCode::parameter,
          "weight vector length does not match the data");
  for (std::size_t i = 0; i < n; ++i)
    require(std::isfinite(x[i]) && std::isfinite(y[i]), ErrorCode::parameter,
            "regression inputs must be finite");

  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require(w(i) > 0.0 && std::isfinite(w(i)), ErrorCode::parameter,
            "regression weights must be positive");
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w(i) * (x[i] - mx) * (x[i] - mx);
    sxy += w(i) * (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::degenerate, "regression abscissae are all equal");

  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - fit.intercept - fit.slope * x[i];
    fit.rss += w(i) * fit.residuals[i] * fit.residuals[i];
  }
  fit.stderr_slope = std::sqrt(fit.rss / static_cast<double>(n - 2) / sxx);
  if (!weights.empty()) fit.weights.emplace(weights.begin(), weights.end());
  return fit;
}

RegressionFit loglog_fit(std::span<const double> x, std::span<const double> y,
                         std::span<const double> weights) {
  require(x.size() == y.size(), ErrorCode::parameter, "regression inputs differ in length");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::degenerate,
            "log-log regression needs strictly positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly, weights);
}

RegressionFit gls_fit(std::span<const double> x, std::span<const double> y,
                      const Eigen::MatrixXd& covariance) {
  const auto n = static_cast<Eigen::Index>(x.size());
  require(x.size() == y.size(), ErrorCode::parameter, "regression inputs differ in length");
  require(n >= 3, ErrorCode::parameter, "regression needs at least 3 points");
  require(covariance.rows() == n && covariance.cols() == n, ErrorCode::parameter,
          "covariance size does not match the data");

  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::numerical, "regression covariance is not positive definite");

  Eigen::MatrixXd z(n, 2);
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    z(i, 1) = x[static_cast<std::size_t>(i)];
    yv(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd ciz = llt.solve(z);
  const Eigen::Matrix2d normal = z.transpose() * ciz;
  const Eigen::Vector2d theta = normal.ldlt().solve(ciz.transpose() * yv);
  const Eigen::VectorXd r = yv - z * theta;
  const Eigen::Matrix2d inv = normal.inverse();

  RegressionFit fit;
  fit.intercept = theta(0);
  fit.slope = theta(1);
  fit.residuals.assign(r.data(), r.data() + n);
  fit.rss = r.dot(llt.solve(r));
  fit.stderr_slope = std::sqrt(std::max(inv(1, 1), 0.0));
  return fit;
}

}  // namespace lrd

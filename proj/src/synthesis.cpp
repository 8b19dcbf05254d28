#include "lrd/synthesis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "lrd/error.hpp"

namespace lrd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Number of aliases summed explicitly on each side before switching to the
// integral tail.
constexpr int kExplicitAliases = 32;

// Integral of x^-s over [a, b].
double power_integral(double a, double b, double s) {
  if (b <= a) return 0.0;
  if (std::abs(s - 1.0) < 1e-12) return std::log(b / a);
  return (std::pow(b, 1.0 - s) - std::pow(a, 1.0 - s)) / (1.0 - s);
}

}  // namespace

void FgnParams::validate() const {
  require(std::isfinite(hurst) && hurst > 0.0 && hurst < 1.0, ErrorCode::parameter,
          "FGN Hurst exponent must lie in (0, 1)");
  require(std::isfinite(sigma2) && sigma2 > 0.0, ErrorCode::parameter,
          "FGN variance must be positive");
  require(length >= 2, ErrorCode::parameter, "FGN length must be at least 2");
}

double fgn_autocovariance(double hurst, double sigma2, std::size_t lag) {
  FgnParams{hurst, sigma2, 2, 0}.validate();
  const double k = static_cast<double>(lag);
  const double two_h = 2.0 * hurst;
  return 0.5 * sigma2 *
         (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(std::abs(k - 1.0), two_h));
}

double fgn_autocovariance(const FgnParams& params, std::size_t lag) {
  params.validate();
  return fgn_autocovariance(params.hurst, params.sigma2, lag);
}

namespace detail {

std::vector<double> sample_stationary_gaussian(std::span<const double> autocov,
                                               std::uint64_t seed, bool* used_fallback) {
  const std::size_t n = autocov.size();
  require(n >= 1, ErrorCode::parameter, "empty autocovariance");
  require(autocov[0] > 0.0, ErrorCode::parameter, "lag-0 autocovariance must be positive");
  if (used_fallback) *used_fallback = false;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  if (n == 1) return {std::sqrt(autocov[0]) * normal(rng)};

  // Minimal circulant embedding of size 2(n-1).
  const std::size_t m = 2 * (n - 1);
  std::vector<fft::cplx> row(m);
  for (std::size_t k = 0; k < n; ++k) row[k] = autocov[k];
  for (std::size_t k = n; k < m; ++k) row[k] = autocov[m - k];
  const auto eig = fft::complex_transform(row, -1);

  double max_abs = 0.0;
  double min_eig = 0.0;
  for (const auto& e : eig) {
    max_abs = std::max(max_abs, std::abs(e.real()));
    min_eig = std::min(min_eig, e.real());
  }

  if (min_eig >= -1e-10 * max_abs) {
    std::vector<fft::cplx> w(m);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double scale = std::sqrt(std::max(eig[k].real(), 0.0) * inv_m);
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      w[k] = fft::cplx(scale * z1, scale * z2);
    }
    const auto y = fft::complex_transform(w, -1);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i].real();
    return out;
  }

  if (used_fallback) *used_fallback = true;
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cov(size, size);
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j)
      cov(i, j) = autocov[static_cast<std::size_t>(std::abs(i - j))];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::numerical, "covariance matrix is not positive definite");
  Eigen::VectorXd z(size);
  for (Eigen::Index i = 0; i < size; ++i) z(i) = normal(rng);
  const Eigen::VectorXd y = llt.matrixL() * z;
  return std::vector<double>(y.data(), y.data() + size);
}

}  // namespace detail

UniformSeries generate_fgn(const FgnParams& params) {
  params.validate();
  std::vector<double> autocov(params.length);
  for (std::size_t k = 0; k < params.length; ++k)
    autocov[k] = fgn_autocovariance(params.hurst, params.sigma2, k);
  return UniformSeries(detail::sample_stationary_gaussian(autocov, params.seed), 1.0, 0.0);
}

UniformSeries aggregate(const UniformSeries& series) {
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    out[i] = acc;
  }
  return series.with_values(std::move(out));
}

UniformSeries difference(const UniformSeries& series) {
  std::vector<double> out(series.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    out[i] = series[i] - prev;
    prev = series[i];
  }
  return series.with_values(std::move(out));
}

SpectralProfile SpectralProfile::with_defaults(double hurst, double sigma, double omega0,
                                               double omega1) {
  SpectralProfile p{hurst, sigma, omega0, omega1, 0.5, std::max(hurst, 0.5)};
  return p;
}

void SpectralProfile::validate() const {
  require(std::isfinite(hurst_band), ErrorCode::parameter, "band exponent must be finite");
  require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::parameter, "sigma must be positive");
  require(std::isfinite(omega0) && std::isfinite(omega1) && omega0 > 0.0 && omega1 > omega0,
          ErrorCode::parameter, "band edges must satisfy 0 < omega0 < omega1");
  require(std::isfinite(h_low) && h_low < 1.0, ErrorCode::parameter,
          "low-frequency continuation exponent must be < 1 for integrability");
  require(std::isfinite(h_high) && h_high > 0.0, ErrorCode::parameter,
          "high-frequency continuation exponent must be > 0 for integrability");
}

double SpectralProfile::inverse_rho_squared(double xi) const {
  const double x = std::abs(xi);
  const double s2 = sigma * sigma;
  if (x < omega0) return s2 * std::pow(omega0, 2.0 * (h_low - hurst_band)) * std::pow(x, -2.0 * h_low - 1.0);
  if (x > omega1)
    return s2 * std::pow(omega1, 2.0 * (h_high - hurst_band)) * std::pow(x, -2.0 * h_high - 1.0);
  return s2 * std::pow(x, -2.0 * hurst_band - 1.0);
}

double SpectralProfile::inverse_rho_squared_tail(double x0) const {
  const double s2 = sigma * sigma;
  double total = 0.0;
  if (x0 < omega0)
    total += s2 * std::pow(omega0, 2.0 * (h_low - hurst_band)) *
             power_integral(x0, omega0, 2.0 * h_low + 1.0);
  const double band_lo = std::max(x0, omega0);
  if (band_lo < omega1) total += s2 * power_integral(band_lo, omega1, 2.0 * hurst_band + 1.0);
  const double high_lo = std::max(x0, omega1);
  const double s_high = 2.0 * h_high + 1.0;
  total += s2 * std::pow(omega1, 2.0 * (h_high - hurst_band)) * std::pow(high_lo, 1.0 - s_high) /
           (s_high - 1.0);
  return total;
}

UniformSeries generate_lfgn(const SpectralProfile& profile, std::size_t n, double delta,
                            std::uint64_t seed) {
  profile.validate();
  require(n >= 2, ErrorCode::parameter, "lfGN length must be at least 2");
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::parameter,
          "sampling step must be positive");

  const std::size_t half = n / 2;
  const double dxi = kTwoPi / (static_cast<double>(n) * delta);
  const double alias_step = kTwoPi / delta;
  const double tail_start = (kExplicitAliases + 0.5) * alias_step;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<fft::cplx> spectrum(half + 1, fft::cplx(0.0, 0.0));
  for (std::size_t j = 1; j <= half; ++j) {
    const double xi = static_cast<double>(j) * dxi;
    double folded = profile.inverse_rho_squared(xi);
    for (int m = 1; m <= kExplicitAliases; ++m) {
      folded += profile.inverse_rho_squared(xi + m * alias_step);
      folded += profile.inverse_rho_squared(m * alias_step - xi);
    }
    folded += (profile.inverse_rho_squared_tail(tail_start + xi) +
               profile.inverse_rho_squared_tail(tail_start - xi)) /
              alias_step;
    const double s = std::sin(0.5 * xi * delta);
    const double density = 4.0 * s * s * folded;
    const double amplitude = std::sqrt(density * dxi / kTwoPi);
    if (j == half && n % 2 == 0) {
      spectrum[j] = fft::cplx(amplitude * normal(rng), 0.0);
    } else {
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      spectrum[j] = fft::cplx(amplitude * z1, amplitude * z2) / std::numbers::sqrt2;
    }
  }
  return UniformSeries(fft::backward_real(spectrum, n), delta, 0.0);
}

std::optional<std::string> lfgn_span_warning(const SpectralProfile& profile, std::size_t n,
                                             double delta) {
  const double span = static_cast<double>(n) * delta;
  const double period = kTwoPi / profile.omega0;
  if (span < 4.0 * period)
    return "path spans " + std::to_string(span / period) +
           " periods of the low band edge; at least 4 are needed to resolve it";
  return std::nullopt;
}

void validate_trend(const TrendSpec& trend) {
  if (const auto* poly = std::get_if<PolynomialTrend>(&trend)) {
    require(!poly->coefficients.empty(), ErrorCode::parameter,
            "polynomial trend needs at least one coefficient");
    for (double c : poly->coefficients)
      require(std::isfinite(c), ErrorCode::parameter, "trend coefficients must be finite");
    return;
  }
  const auto& pc = std::get<PiecewiseConstantTrend>(trend);
  require(pc.levels.size() == pc.breaks.size() + 1, ErrorCode::parameter,
          "piecewise trend needs exactly one more level than breaks");
  for (std::size_t i = 0; i < pc.breaks.size(); ++i) {
    require(pc.breaks[i] > 0.0 && pc.breaks[i] < 1.0, ErrorCode::parameter,
            "break fractions must lie in (0, 1)");
    require(i == 0 || pc.breaks[i] > pc.breaks[i - 1], ErrorCode::parameter,
            "break fractions must be strictly increasing");
  }
  for (double l : pc.levels) require(std::isfinite(l), ErrorCode::parameter, "levels must be finite");
}

UniformSeries add_trend(const UniformSeries& series, const TrendSpec& trend) {
  validate_trend(trend);
  const std::size_t n = series.size();
  std::vector<double> out(series.values().begin(), series.values().end());
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n);
    double value = 0.0;
    if (const auto* poly = std::get_if<PolynomialTrend>(&trend)) {
      for (auto c = poly->coefficients.rbegin(); c != poly->coefficients.rend(); ++c)
        value = value * u + *c;
    } else {
      const auto& pc = std::get<PiecewiseConstantTrend>(trend);
      const auto idx = std::upper_bound(pc.breaks.begin(), pc.breaks.end(), u) - pc.breaks.begin();
      value = pc.levels[static_cast<std::size_t>(idx)];
    }
    out[i] += value;
  }
  return series.with_values(std::move(out));
}

}  // namespace lrd

#ifndef LRD_SYNTHESIS_HPP
#define LRD_SYNTHESIS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lrd/series.hpp"

namespace lrd {

/// Fractional Gaussian noise: Hurst exponent in (0, 1), variance sigma2,
/// `length` samples at unit step.
struct FgnParams {
  double hurst = 0.5;
  double sigma2 = 1.0;
  std::size_t length = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

/// (sigma2 / 2) (|k+1|^2H - 2|k|^2H + |k-1|^2H)
double fgn_autocovariance(double hurst, double sigma2, std::size_t lag);
double fgn_autocovariance(const FgnParams& params, std::size_t lag);

/// Exact sample of fractional Gaussian noise (circulant embedding, with a
/// dense Cholesky fallback).
UniformSeries generate_fgn(const FgnParams& params);

/// Cumulative sums: out[k] = in[0] + ... + in[k]. The implicit sample before
/// the first is zero, so difference(aggregate(x)) == x.
UniformSeries aggregate(const UniformSeries& series);
UniformSeries difference(const UniformSeries& series);

/// Spectral weight rho of a locally fractional Brownian motion.
///
/// Inside the band [omega0, omega1] rho(xi) = |xi|^(H + 1/2) / sigma with H
/// any real. Outside the band rho continues as a power law with exponents
/// h_low (below omega0) and h_high (above omega1), scaled so that rho is
/// continuous at both edges. h_low < 1 and h_high > 0 are exactly the
/// conditions for the harmonizable integral to exist.
struct SpectralProfile {
  double hurst_band = 0.5;
  double sigma = 1.0;
  double omega0 = 0.2;
  double omega1 = 4.0;
  double h_low = 0.5;
  double h_high = 0.5;

  /// Default continuations: h_low = 0.5, h_high = max(H, 0.5).
  static SpectralProfile with_defaults(double hurst, double sigma, double omega0, double omega1);

  void validate() const;

  /// rho(xi)^-2, the spectral density of the increments of X_rho up to the
  /// |e^{i xi} - 1|^2 factor.
  double inverse_rho_squared(double xi) const;

  /// Integral of rho^-2 over [x0, infinity), x0 > 0.
  double inverse_rho_squared_tail(double x0) const;
};

/// Stationary Gaussian path approximating the step-delta increments
/// Y(k delta) = X_rho((k+1) delta) - X_rho(k delta) by frequency-grid
/// synthesis. Content above the Nyquist frequency is folded back onto the
/// grid, so the result is the exact sampled spectrum up to grid resolution.
UniformSeries generate_lfgn(const SpectralProfile& profile, std::size_t n, double delta,
                            std::uint64_t seed);

/// Message when the path is too short to resolve the low band edge.
std::optional<std::string> lfgn_span_warning(const SpectralProfile& profile, std::size_t n,
                                             double delta);

/// Additive trends evaluated on normalized time u = i / n in [0, 1).
struct PolynomialTrend {
  std::vector<double> coefficients;  // c0 + c1 u + c2 u^2 + ...
};

struct PiecewiseConstantTrend {
  std::vector<double> levels;  // one more than breaks
  std::vector<double> breaks;  // strictly increasing in (0, 1)
};

using TrendSpec = std::variant<PolynomialTrend, PiecewiseConstantTrend>;

void validate_trend(const TrendSpec& trend);
UniformSeries add_trend(const UniformSeries& series, const TrendSpec& trend);

namespace detail {

/// Zero-mean Gaussian vector with Toeplitz covariance autocov[|i-j|].
/// Circulant embedding when the embedding is non-negative definite, dense
/// Cholesky otherwise. `used_fallback` reports which path ran.
std::vector<double> sample_stationary_gaussian(std::span<const double> autocov,
                                               std::uint64_t seed,
                                               bool* used_fallback = nullptr);

}  // namespace detail

}  // namespace lrd

#endif  // LRD_SYNTHESIS_HPP

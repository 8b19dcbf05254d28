#ifndef LRD_WAVELET_HPP
#define LRD_WAVELET_HPP

#include <Eigen/Core>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lrd/estimate.hpp"
#include "lrd/series.hpp"

namespace lrd {

/// Mother wavelet defined by its Fourier transform: an even C-infinity bump
/// supported on alpha <= |xi| <= beta,
///   psi_hat(xi) = exp(-kappa x^2 / (1 - x^2)),  x = (2|xi| - alpha - beta) / (beta - alpha).
/// It vanishes on (-alpha, alpha), so every polynomial moment of psi is zero.
/// `width` is the effective time support in units of the scale; coefficients
/// closer than width * a / 2 to either end of the path are discarded.
struct MotherWavelet {
  double alpha = std::numbers::pi / 2.0;
  double beta = std::numbers::pi;
  double kappa = 1.0;
  double width = 8.0;

  void validate() const;
  double fourier(double xi) const;
};

enum class ScaleMode {
  lrd,          // stationary increments: S(a) ~ a^(2H-1)
  selfsimilar,  // aggregated path: S(a) ~ a^(2H+1)
  band          // aggregated lfGN path, scales restricted to the band
};

const char* to_string(ScaleMode mode) noexcept;

struct Band {
  double omega0 = 0.2;
  double omega1 = 4.0;
};

struct RejectedScale {
  double scale = 0.0;
  std::string reason;
};

/// Geometric grid over the whole admissible range, from
/// max(2 delta, beta delta / pi) to N delta / (width + 16). Used to look at a
/// spectrum before choosing a band.
std::vector<double> wide_scales(std::size_t n, double delta, const MotherWavelet& wavelet = {},
                                std::size_t count = 16);

/// Sample wavelet variance S_N(a) per admissible scale.
struct ScaleSpectrum {
  std::vector<double> scales;
  std::vector<double> s_n;
  std::vector<std::size_t> counts;
  std::vector<RejectedScale> rejected;
  ScaleMode mode = ScaleMode::lrd;
  std::optional<Band> band;
  MotherWavelet wavelet;
  double delta = 1.0;
  std::size_t n_samples = 0;
  bool degenerate = false;  // some S_N(a) is zero relative to the input power
};

/// e(a, k) at shifts spaced by a, with coefficients near the path ends
/// dropped. Before transforming, the least-squares polynomial of degree 5
/// and then the chord through the two end samples are removed; the wavelet
/// annihilates both, and the circular transform then sees a continuous,
/// trend-free path. Requires a >= 2 delta and a >= beta delta / pi.
std::vector<double> wavelet_coefficients(const UniformSeries& series, const MotherWavelet& wavelet,
                                         double scale);

/// Default grid of `count` geometric scales.
/// lrd / selfsimilar: from 6 delta to 3 N^(1/3) delta.
/// band: from max(beta / omega1, 2 delta, beta delta / pi) to alpha / omega0.
/// The top scale is also kept below N delta / (width + 16) so that every scale
/// retains usable coefficients.
std::vector<double> default_scales(std::size_t n, double delta, ScaleMode mode,
                                   const MotherWavelet& wavelet = {},
                                   const std::optional<Band>& band = std::nullopt,
                                   std::size_t count = 12);

/// S_N at each scale. In band mode, scales outside [beta / omega1, alpha / omega0]
/// are moved to `rejected`. Fewer than 3 surviving scales is a constraint error.
ScaleSpectrum scale_spectrum(const UniformSeries& series, const MotherWavelet& wavelet,
                             const std::vector<double>& scales, ScaleMode mode,
                             const std::optional<Band>& band = std::nullopt);

enum class RegressionKind { ols, gls };

/// Regression of log S_N on log a, slope mapped to H by the spectrum mode.
/// gls: iterated pseudo-generalized least squares with the covariance of
/// log_spectrum_covariance evaluated at the current slope.
FractalEstimate estimate_h_wavelet(const ScaleSpectrum& spectrum,
                                   RegressionKind regression = RegressionKind::gls);

/// Approximate covariance of (log S_N(a_i))_i for Gaussian input with
/// spectral density proportional to |xi|^gamma.
Eigen::MatrixXd log_spectrum_covariance(const std::vector<double>& scales,
                                        const std::vector<std::size_t>& counts,
                                        const MotherWavelet& wavelet, double gamma);

/// T = r' C^-1 r for the residuals of the fitted line, with C from
/// log_spectrum_covariance at the fitted slope; chi-squared with l - 2 dof.
GofResult goodness_of_fit(const ScaleSpectrum& spectrum, const FractalEstimate& fit,
                          double level = 0.05);

struct BandCandidate {
  std::size_t first = 0;  // scale indices, inclusive
  std::size_t last = 0;
  Band band;
  double score = 0.0;  // chi-squared statistic per degree of freedom
  double p_value = 0.0;
};

struct BandSuggestion {
  BandCandidate best;
  std::optional<BandCandidate> runner_up;
};

/// Scans contiguous runs of at least `min_run` scales. Each run is fitted and
/// tested with goodness_of_fit; the widest run that passes at `level` wins,
/// ties going to the smaller statistic per degree of freedom. If no run
/// passes, the smallest statistic per degree of freedom wins. The run
/// [a_i, a_j] maps to the band [alpha / a_j, beta / a_i].
BandSuggestion suggest_band(const ScaleSpectrum& spectrum, double level = 0.05,
                            std::size_t min_run = 4);

/// CSV `a,log_a,S,log_S,count`.
std::string spectrum_to_csv(const ScaleSpectrum& spectrum);

}  // namespace lrd

#endif  // LRD_WAVELET_HPP

#include "lrd/wavelet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "fft.hpp"
#include "format.hpp"
#include "lrd/error.hpp"
#include "lrd/regression.hpp"

namespace lrd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kTrendDegree = 5;

// Removes the least-squares Legendre polynomial of degree kTrendDegree, then
// the chord through the end samples.
std::vector<double> remove_trend(std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
  const Eigen::Index cols = std::min<Eigen::Index>(kTrendDegree + 1, n);
  Eigen::MatrixXd v(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = n > 1 ? -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    v(i, 0) = 1.0;
    if (cols > 1) v(i, 1) = t;
    for (Eigen::Index k = 2; k < cols; ++k)
      v(i, k) = ((2.0 * k - 1.0) * t * v(i, k - 1) - (k - 1.0) * v(i, k - 2)) / static_cast<double>(k);
  }
  const Eigen::VectorXd c = v.householderQr().solve(y);
  y -= v * c;
  std::vector<double> out(y.data(), y.data() + n);
  if (n > 1) {
    const double first = out.front();
    const double step = (out.back() - first) / static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] -= first + step * static_cast<double>(i);
  }
  return out;
}

void check_scale(const MotherWavelet& w, double scale, double delta) {
  require(std::isfinite(scale) && scale > 0.0, ErrorCode::parameter, "scale must be positive");
  require(scale >= 2.0 * delta * (1.0 - 1e-12), ErrorCode::parameter,
          "scale " + format_g9(scale) + " is below twice the sampling step");
  require(scale >= w.beta * delta / std::numbers::pi * (1.0 - 1e-12), ErrorCode::parameter,
          "scale " + format_g9(scale) + " puts the wavelet support above the Nyquist frequency");
}

// Transformed, trend-free input shared by all scales.
struct Prepared {
  std::vector<fft::cplx> spectrum;
  std::size_t n = 0;
  double delta = 1.0;
};

Prepared prepare(const UniformSeries& series) {
  require(series.size() >= 16, ErrorCode::constraint, "wavelet analysis needs at least 16 samples");
  const auto clean = remove_trend(series.values());
  return Prepared{fft::forward_real(clean), series.size(), series.delta()};
}

std::vector<double> coefficients(const Prepared& p, const MotherWavelet& w, double scale) {
  check_scale(w, scale, p.delta);
  const double dxi = kTwoPi / (static_cast<double>(p.n) * p.delta);
  const double norm = std::sqrt(scale) / static_cast<double>(p.n);
  std::vector<fft::cplx> filtered(p.spectrum.size());
  for (std::size_t k = 0; k < filtered.size(); ++k)
    filtered[k] = p.spectrum[k] * (norm * w.fourier(scale * static_cast<double>(k) * dxi));
  const auto e = fft::backward_real(filtered, p.n);

  const double step = scale / p.delta;
  const double margin = 0.5 * w.width * scale / p.delta;
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double pos = std::round(static_cast<double>(k) * step);
    if (pos > static_cast<double>(p.n - 1)) break;
    if (pos >= margin && pos <= static_cast<double>(p.n - 1) - margin)
      out.push_back(e[static_cast<std::size_t>(pos)]);
  }
  return out;
}

double h_from_slope(ScaleMode mode, double slope) {
  return mode == ScaleMode::lrd ? 0.5 * (slope + 1.0) : 0.5 * (slope - 1.0);
}

std::vector<double> log_values(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
  return out;
}

template <class F>
double integrate(F f, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-10);
}

RegressionFit gls_iterated(const std::vector<double>& lx, const std::vector<double>& ly,
                           const std::vector<double>& scales, const std::vector<std::size_t>& counts,
                           const MotherWavelet& w) {
  RegressionFit fit = linear_fit(lx, ly);
  for (int pass = 0; pass < 2; ++pass)
    fit = gls_fit(lx, ly, log_spectrum_covariance(scales, counts, w, -fit.slope));
  return fit;
}

GofResult chi_squared_result(double statistic, int dof, double level) {
  GofResult g;
  g.statistic = std::max(statistic, 0.0);
  g.dof = dof;
  g.level = level;
  const boost::math::chi_squared dist(dof);
  g.p_value = g.statistic == 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, g.statistic));
  g.accepted = g.p_value >= level;
  return g;
}

}  // namespace

void MotherWavelet::validate() const {
  require(std::isfinite(alpha) && std::isfinite(beta) && alpha > 0.0 && beta > alpha,
          ErrorCode::parameter, "wavelet support must satisfy 0 < alpha < beta");
  require(std::isfinite(kappa) && kappa > 0.0, ErrorCode::parameter, "wavelet kappa must be positive");
  require(std::isfinite(width) && width > 0.0, ErrorCode::parameter, "wavelet width must be positive");
}

double MotherWavelet::fourier(double xi) const {
  const double u = std::abs(xi);
  if (u <= alpha || u >= beta) return 0.0;
  const double x = (2.0 * u - alpha - beta) / (beta - alpha);
  return std::exp(-kappa * x * x / (1.0 - x * x));
}

const char* to_string(ScaleMode mode) noexcept {
  switch (mode) {
    case ScaleMode::lrd: return "lrd";
    case ScaleMode::selfsimilar: return "selfsimilar";
    case ScaleMode::band: return "band";
  }
  return "unknown";
}

std::vector<double> wavelet_coefficients(const UniformSeries& series, const MotherWavelet& wavelet,
                                         double scale) {
  wavelet.validate();
  check_scale(wavelet, scale, series.delta());
  auto out = coefficients(prepare(series), wavelet, scale);
  require(!out.empty(), ErrorCode::constraint,
          "scale " + format_g9(scale) + " leaves no coefficient away from the path ends");
  return out;
}

std::vector<double> default_scales(std::size_t n, double delta, ScaleMode mode,
                                   const MotherWavelet& wavelet, const std::optional<Band>& band,
                                   std::size_t count) {
  wavelet.validate();
  require(count >= 3, ErrorCode::parameter, "scale grid needs at least 3 scales");
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::parameter, "sampling step must be positive");
  const double top = static_cast<double>(n) * delta / (wavelet.width + 16.0);
  double lo = 0.0;
  double hi = 0.0;
  if (mode == ScaleMode::band) {
    require(band.has_value(), ErrorCode::parameter, "band mode needs a frequency band");
    require(band->omega0 > 0.0 && band->omega1 > band->omega0, ErrorCode::parameter,
            "band edges must satisfy 0 < omega0 < omega1");
    require(wavelet.beta / wavelet.alpha < band->omega1 / band->omega0, ErrorCode::constraint,
            "band too narrow: beta/alpha must be below omega1/omega0");
    lo = std::max({wavelet.beta / band->omega1, 2.0 * delta, wavelet.beta * delta / std::numbers::pi});
    hi = std::min(wavelet.alpha / band->omega0, top);
  } else {
    lo = std::max(6.0 * delta, wavelet.beta * delta / std::numbers::pi);
    hi = std::min(3.0 * std::cbrt(static_cast<double>(n)) * delta, top);
  }
  require(hi > lo * (1.0 + 1e-9), ErrorCode::constraint,
          "no admissible scale range: series too short or band not resolvable at this sampling step");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  out.back() = hi;
  return out;
}

std::vector<double> wide_scales(std::size_t n, double delta, const MotherWavelet& wavelet,
                                std::size_t count) {
  wavelet.validate();
  require(count >= 3, ErrorCode::parameter, "scale grid needs at least 3 scales");
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::parameter, "sampling step must be positive");
  const double lo = std::max(2.0 * delta, wavelet.beta * delta / std::numbers::pi);
  const double hi = static_cast<double>(n) * delta / (wavelet.width + 16.0);
  require(hi > lo * (1.0 + 1e-9), ErrorCode::constraint, "series too short for a scale scan");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  out.back() = hi;
  return out;
}

ScaleSpectrum scale_spectrum(const UniformSeries& series, const MotherWavelet& wavelet,
                             const std::vector<double>& scales, ScaleMode mode,
                             const std::optional<Band>& band) {
  wavelet.validate();
  for (std::size_t i = 1; i < scales.size(); ++i)
    require(scales[i] > scales[i - 1], ErrorCode::parameter, "scales must be strictly increasing");

  ScaleSpectrum spec;
  spec.mode = mode;
  spec.wavelet = wavelet;
  spec.delta = series.delta();
  spec.n_samples = series.size();
  if (mode == ScaleMode::band) {
    require(band.has_value(), ErrorCode::parameter, "band mode needs a frequency band");
    require(band->omega0 > 0.0 && band->omega1 > band->omega0, ErrorCode::parameter,
            "band edges must satisfy 0 < omega0 < omega1");
    spec.band = band;
  }

  const Prepared prepared = prepare(series);
  for (double a : scales) {
    if (band) {
      const double lo = wavelet.beta / band->omega1;
      const double hi = wavelet.alpha / band->omega0;
      if (a < lo * (1.0 - 1e-9) || a > hi * (1.0 + 1e-9)) {
        spec.rejected.push_back({a, "outside the band scale range [" + format_g9(lo) + ", " +
                                        format_g9(hi) + "]"});
        continue;
      }
    }
    const auto e = coefficients(prepared, wavelet, a);
    if (e.size() < 2) {
      spec.rejected.push_back({a, "fewer than 2 coefficients away from the path ends"});
      continue;
    }
    double sum_sq = 0.0;
    for (double v : e) sum_sq += v * v;
    spec.scales.push_back(a);
    spec.s_n.push_back(sum_sq / static_cast<double>(e.size()));
    spec.counts.push_back(e.size());
  }
  if (spec.scales.size() < 3)
    fail(ErrorCode::constraint,
         mode == ScaleMode::band
             ? "band too narrow: fewer than 3 admissible scales (check beta/alpha < omega1/omega0)"
             : "fewer than 3 admissible scales");

  const double power = variance(series.values());
  for (double s : spec.s_n)
    if (!(s > 1e-20 * power)) spec.degenerate = true;
  return spec;
}

Eigen::MatrixXd log_spectrum_covariance(const std::vector<double>& scales,
                                        const std::vector<std::size_t>& counts,
                                        const MotherWavelet& w, double gamma) {
  const auto l = static_cast<Eigen::Index>(scales.size());
  require(counts.size() == scales.size(), ErrorCode::parameter, "scale and count vectors differ");
  std::vector<double> energy(scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double a = scales[i];
    energy[i] = integrate(
        [&](double xi) {
          const double p = w.fourier(a * xi);
          return a * p * p * std::pow(xi, gamma);
        },
        w.alpha / a, w.beta / a);
  }
  Eigen::MatrixXd cov(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = i; j < l; ++j) {
      const double ai = scales[static_cast<std::size_t>(i)];
      const double aj = scales[static_cast<std::size_t>(j)];
      const double lo = std::max(w.alpha / ai, w.alpha / aj);
      const double hi = std::min(w.beta / ai, w.beta / aj);
      const double num = integrate(
          [&](double xi) {
            const double pi_ = w.fourier(ai * xi);
            const double pj = w.fourier(aj * xi);
            return ai * aj * pi_ * pi_ * pj * pj * std::pow(xi, 2.0 * gamma);
          },
          lo, hi);
      const double mi = ai * static_cast<double>(counts[static_cast<std::size_t>(i)]);
      const double mj = aj * static_cast<double>(counts[static_cast<std::size_t>(j)]);
      const double c = kTwoPi * num /
                       (std::sqrt(mi * mj) * energy[static_cast<std::size_t>(i)] *
                        energy[static_cast<std::size_t>(j)]);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  return cov;
}

FractalEstimate estimate_h_wavelet(const ScaleSpectrum& spectrum, RegressionKind regression) {
  const std::size_t l = spectrum.scales.size();
  require(l >= 3, ErrorCode::parameter, "wavelet regression needs at least 3 scales");
  for (double s : spectrum.s_n)
    require(s > 0.0 && std::isfinite(s), ErrorCode::degenerate,
            "wavelet variance vanishes at some scale");
  require(!spectrum.degenerate, ErrorCode::degenerate, "scale spectrum is degenerate");

  const auto lx = log_values(spectrum.scales);
  const auto ly = log_values(spectrum.s_n);
  FractalEstimate est;
  if (regression == RegressionKind::ols) {
    const RegressionFit fit = linear_fit(lx, ly);
    est.method = EstimateMethod::wavelet_ols;
    est.slope = fit.slope;
    est.intercept = fit.intercept;
    est.stderr_h = 0.5 * fit.stderr_slope;
    const boost::math::students_t dist(static_cast<double>(l - 2));
    est.ci_halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * est.stderr_h;
  } else {
    const RegressionFit fit = gls_iterated(lx, ly, spectrum.scales, spectrum.counts, spectrum.wavelet);
    est.method = EstimateMethod::wavelet_gls;
    est.slope = fit.slope;
    est.intercept = fit.intercept;
    est.stderr_h = 0.5 * fit.stderr_slope;
    const boost::math::normal dist;
    est.ci_halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * est.stderr_h;
  }
  est.h_hat = h_from_slope(spectrum.mode, est.slope);
  return est;
}

GofResult goodness_of_fit(const ScaleSpectrum& spectrum, const FractalEstimate& fit, double level) {
  const std::size_t l = spectrum.scales.size();
  require(l >= 3, ErrorCode::parameter, "goodness of fit needs at least 3 scales");
  require(level > 0.0 && level < 1.0, ErrorCode::parameter, "test level must lie in (0, 1)");
  for (double s : spectrum.s_n)
    require(s > 0.0 && std::isfinite(s), ErrorCode::degenerate,
            "wavelet variance vanishes at some scale");
  const auto lx = log_values(spectrum.scales);
  const auto ly = log_values(spectrum.s_n);
  const Eigen::MatrixXd cov =
      log_spectrum_covariance(spectrum.scales, spectrum.counts, spectrum.wavelet, -fit.slope);
  Eigen::VectorXd r(static_cast<Eigen::Index>(l));
  for (std::size_t i = 0; i < l; ++i)
    r(static_cast<Eigen::Index>(i)) = ly[i] - fit.intercept - fit.slope * lx[i];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::numerical, "log-spectrum covariance is not positive definite");
  return chi_squared_result(r.dot(llt.solve(r)), static_cast<int>(l - 2), level);
}

BandSuggestion suggest_band(const ScaleSpectrum& spectrum, double level, std::size_t min_run) {
  const std::size_t l = spectrum.scales.size();
  require(min_run >= 3, ErrorCode::parameter, "band scan runs need at least 3 scales");
  require(l >= min_run, ErrorCode::constraint, "spectrum has fewer scales than the minimal run");
  for (double s : spectrum.s_n)
    require(s > 0.0 && std::isfinite(s), ErrorCode::degenerate,
            "wavelet variance vanishes at some scale");

  const auto lx = log_values(spectrum.scales);
  const auto ly = log_values(spectrum.s_n);
  std::vector<BandCandidate> candidates;
  for (std::size_t first = 0; first + min_run <= l; ++first) {
    for (std::size_t last = first + min_run - 1; last < l; ++last) {
      const std::vector<double> x(lx.begin() + first, lx.begin() + last + 1);
      const std::vector<double> y(ly.begin() + first, ly.begin() + last + 1);
      const std::vector<double> a(spectrum.scales.begin() + first, spectrum.scales.begin() + last + 1);
      const std::vector<std::size_t> c(spectrum.counts.begin() + first,
                                       spectrum.counts.begin() + last + 1);
      const RegressionFit fit = linear_fit(x, y);
      const Eigen::MatrixXd cov = log_spectrum_covariance(a, c, spectrum.wavelet, -fit.slope);
      Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
      for (std::size_t i = 0; i < x.size(); ++i) r(static_cast<Eigen::Index>(i)) = fit.residuals[i];
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success)
        fail(ErrorCode::numerical, "log-spectrum covariance is not positive definite");
      const int dof = static_cast<int>(x.size() - 2);
      const GofResult g = chi_squared_result(r.dot(llt.solve(r)), dof, level);
      BandCandidate cand;
      cand.first = first;
      cand.last = last;
      cand.band = Band{spectrum.wavelet.alpha / spectrum.scales[last],
                       spectrum.wavelet.beta / spectrum.scales[first]};
      cand.score = g.statistic / dof;
      cand.p_value = g.p_value;
      candidates.push_back(cand);
    }
  }

  const bool any_pass = std::any_of(candidates.begin(), candidates.end(),
                                    [&](const BandCandidate& c) { return c.p_value >= level; });
  auto better = [&](const BandCandidate& u, const BandCandidate& v) {
    if (any_pass) {
      const bool pu = u.p_value >= level;
      const bool pv = v.p_value >= level;
      if (pu != pv) return pu;
      const std::size_t wu = u.last - u.first;
      const std::size_t wv = v.last - v.first;
      if (wu != wv) return wu > wv;
      if (u.score != v.score) return u.score < v.score;
    } else {
      if (u.score != v.score) return u.score < v.score;
      const std::size_t wu = u.last - u.first;
      const std::size_t wv = v.last - v.first;
      if (wu != wv) return wu > wv;
    }
    return u.first < v.first;
  };
  std::stable_sort(candidates.begin(), candidates.end(), better);

  BandSuggestion out;
  out.best = candidates.front();
  if (candidates.size() > 1) out.runner_up = candidates[1];
  return out;
}

std::string spectrum_to_csv(const ScaleSpectrum& spectrum) {
  std::string out = "a,log_a,S,log_S,count\n";
  for (std::size_t i = 0; i < spectrum.scales.size(); ++i) {
    out += format_g9(spectrum.scales[i]) + "," + format_g9(std::log(spectrum.scales[i])) + "," +
           format_g9(spectrum.s_n[i]) + "," + format_g9(std::log(spectrum.s_n[i])) + "," +
           std::to_string(spectrum.counts[i]) + "\n";
  }
  return out;
}

}  // namespace lrd

#include "lrd/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "json.hpp"
#include "lrd/error.hpp"

namespace lrd {
namespace {

// Prefix sums of the centered series for O(1) segment moments.
class Moments {
 public:
  Moments(std::span<const double> x, double floor_var) : floor_var_(floor_var) {
    long double m = 0.0L;
    for (double v : x) m += v;
    m /= static_cast<long double>(x.size());
    s1_.assign(x.size() + 1, 0.0L);
    s2_.assign(x.size() + 1, 0.0L);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double c = x[i] - m;
      s1_[i + 1] = s1_[i] + c;
      s2_[i + 1] = s2_[i] + c * c;
    }
    offset_ = static_cast<double>(m);
  }

  double mean(std::size_t lo, std::size_t hi) const {
    return offset_ + static_cast<double>((s1_[hi] - s1_[lo]) / static_cast<long double>(hi - lo));
  }

  double var(std::size_t lo, std::size_t hi) const {
    const long double len = static_cast<long double>(hi - lo);
    const long double s1 = s1_[hi] - s1_[lo];
    const long double v = (s2_[hi] - s2_[lo] - s1 * s1 / len) / len;
    return std::max(static_cast<double>(v), floor_var_);
  }

  double cost(std::size_t lo, std::size_t hi) const {
    return static_cast<double>(hi - lo) * std::log(var(lo, hi));
  }

 private:
  std::vector<long double> s1_;
  std::vector<long double> s2_;
  double offset_ = 0.0;
  double floor_var_;
};

Segmentation build(const Moments& mom, std::size_t n, const std::vector<std::size_t>& ends) {
  Segmentation seg;
  seg.n = n;
  std::size_t lo = 0;
  for (std::size_t hi : ends) {
    seg.segments.push_back({lo, hi, mom.mean(lo, hi), std::sqrt(mom.var(lo, hi))});
    seg.contrast += mom.cost(lo, hi);
    if (hi != n) seg.taus.push_back(hi);
    lo = hi;
  }
  return seg;
}

// Optimal segment ends for every k <= k_max on `x` with minimal length m.
std::vector<std::vector<std::size_t>> dynamic_program(const Moments& mom, std::size_t n,
                                                      std::size_t k_max, std::size_t m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(k_max, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::uint32_t>> arg(k_max, std::vector<std::uint32_t>(n + 1, 0));
  // Segment costs ending at j are shared by every k, so each log is taken once.
  std::vector<double> cost(n + 1);
  for (std::size_t j = m; j <= n; ++j) {
    best[0][j] = mom.cost(0, j);
    if (k_max == 1 || j < 2 * m) continue;
    for (std::size_t i = m; i + m <= j; ++i) cost[i] = mom.cost(i, j);
    for (std::size_t k = 1; k < k_max && (k + 1) * m <= j; ++k) {
      double b = inf;
      std::uint32_t a = 0;
      const std::vector<double>& prev = best[k - 1];
      for (std::size_t i = k * m; i + m <= j; ++i) {
        const double v = prev[i] + cost[i];
        if (v < b) {
          b = v;
          a = static_cast<std::uint32_t>(i);
        }
      }
      best[k][j] = b;
      arg[k][j] = a;
    }
  }
  std::vector<std::vector<std::size_t>> out(k_max);
  for (std::size_t k = 0; k < k_max; ++k) {
    std::vector<std::size_t> ends{n};
    std::size_t j = n;
    for (std::size_t kk = k; kk > 0; --kk) {
      j = arg[kk][j];
      ends.push_back(j);
    }
    std::reverse(ends.begin(), ends.end());
    out[k] = std::move(ends);
  }
  return out;
}

}  // namespace

void ChangepointConfig::validate() const {
  require(min_seg >= 2, ErrorCode::parameter, "min_seg must be at least 2");
  require(std::isfinite(sigma_floor_factor) && sigma_floor_factor > 0.0, ErrorCode::parameter,
          "sigma floor factor must be positive");
  require(std::isfinite(elbow_ratio) && elbow_ratio > 0.0, ErrorCode::parameter,
          "elbow ratio must be positive");
  require(k_max >= 1, ErrorCode::parameter, "k_max must be at least 1");
  require(downsample >= 1, ErrorCode::parameter, "downsampling factor must be at least 1");
}

double sigma_floor(const UniformSeries& series, const ChangepointConfig& config) {
  const double sd = std::sqrt(variance(series.values()));
  return config.sigma_floor_factor * (sd > 0.0 ? sd : 1.0);
}

SegmentContrast segment_contrast(const UniformSeries& series, std::size_t lo, std::size_t hi,
                                 const ChangepointConfig& config) {
  config.validate();
  require(lo < hi && hi <= series.size(), ErrorCode::parameter, "segment bounds out of range");
  require(hi - lo >= config.min_seg, ErrorCode::constraint,
          "segment shorter than min_seg (" + std::to_string(config.min_seg) + ")");
  const double fl = sigma_floor(series, config);
  const Moments mom(series.values(), fl * fl);
  return {mom.mean(lo, hi), std::sqrt(mom.var(lo, hi)), mom.cost(lo, hi)};
}

std::vector<Segmentation> detect_all(const UniformSeries& series, std::size_t k_max,
                                     const ChangepointConfig& config) {
  config.validate();
  const std::size_t n = series.size();
  require(k_max >= 1, ErrorCode::parameter, "k_max must be at least 1");
  require(k_max * config.min_seg <= n, ErrorCode::constraint,
          std::to_string(k_max) + " segments of at least " + std::to_string(config.min_seg) +
              " samples do not fit in " + std::to_string(n) + " samples");
  const double fl = sigma_floor(series, config);
  const Moments full(series.values(), fl * fl);

  std::vector<std::vector<std::size_t>> ends;
  const std::size_t d = config.downsample;
  if (d == 1) {
    ends = dynamic_program(full, n, k_max, config.min_seg);
  } else {
    std::vector<double> coarse;
    for (std::size_t i = 0; i < n; i += d) coarse.push_back(series[i]);
    const std::size_t m = std::max<std::size_t>(2, (config.min_seg + d - 1) / d);
    require(k_max * m <= coarse.size(), ErrorCode::constraint,
            "downsampled series too short for the requested segments");
    const Moments mom(coarse, fl * fl);
    ends = dynamic_program(mom, coarse.size(), k_max, m);
    for (auto& e : ends) {
      for (auto& v : e) v = std::min(v * d, n);
    }
  }
  std::vector<Segmentation> out;
  out.reserve(k_max);
  for (const auto& e : ends) out.push_back(build(full, n, e));
  return out;
}

Segmentation detect_k(const UniformSeries& series, std::size_t k, const ChangepointConfig& config) {
  require(k >= 1, ErrorCode::parameter, "k must be at least 1");
  return detect_all(series, k, config).back();
}

PenaltyScan select_k(const UniformSeries& series, const ChangepointConfig& config) {
  config.validate();
  const std::size_t n = series.size();
  const std::size_t k_max = std::min(config.k_max, n / config.min_seg);
  require(k_max >= 1, ErrorCode::constraint, "series shorter than min_seg");

  PenaltyScan scan;
  scan.fits = detect_all(series, k_max, config);
  for (std::size_t k = 1; k <= k_max; ++k) {
    scan.ks.push_back(k);
    scan.contrasts.push_back(scan.fits[k - 1].contrast);
  }
  for (std::size_t i = 0; i + 1 < scan.ks.size(); ++i)
    scan.betas.push_back((scan.contrasts[i] - scan.contrasts[i + 1]) /
                         static_cast<double>(scan.ks[i + 1] - scan.ks[i]));
  for (std::size_t i = 0; i + 1 < scan.betas.size(); ++i)
    scan.curvatures.push_back(scan.betas[i] - scan.betas[i + 1]);

  // The last candidates have few (or no) later curvatures to compare with, so
  // they must also stand out against the typical curvature of the whole scan.
  std::vector<double> mags;
  for (double c : scan.curvatures) mags.push_back(std::abs(c));
  double typical = 0.0;
  if (!mags.empty()) {
    std::sort(mags.begin(), mags.end());
    const std::size_t h = mags.size() / 2;
    typical = mags.size() % 2 ? mags[h] : 0.5 * (mags[h - 1] + mags[h]);
  }
  const double floor = config.elbow_ratio * std::max(std::log(static_cast<double>(n)), typical);
  scan.selected_k = 1;
  double later = 0.0;  // max |curvature| at larger K
  for (std::size_t i = scan.curvatures.size(); i-- > 0;) {
    const double c = scan.curvatures[i];
    if (c >= floor && c >= config.elbow_ratio * later) {
      scan.selected_k = scan.ks[i + 1];
      break;
    }
    later = std::max(later, std::abs(c));
  }
  return scan;
}

std::string segmentation_to_json(const Segmentation& seg) {
  nlohmann::ordered_json j;
  j["n"] = seg.n;
  j["K"] = seg.k();
  j["taus"] = seg.taus;
  auto segs = nlohmann::ordered_json::array();
  for (const auto& s : seg.segments)
    segs.push_back({{"lo", s.lo}, {"hi", s.hi}, {"mean", s.mean}, {"std", s.std}});
  j["segments"] = segs;
  j["contrast"] = seg.contrast;
  return j.dump(2) + "\n";
}

}  // namespace lrd

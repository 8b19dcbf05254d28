#ifndef LRD_CHANGEPOINT_HPP
#define LRD_CHANGEPOINT_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "lrd/series.hpp"

namespace lrd {

struct ChangepointConfig {
  std::size_t min_seg = 20;
  double sigma_floor_factor = 1e-6;  // floor = factor * overall std
  double elbow_ratio = 5.0;
  std::size_t k_max = 8;
  std::size_t downsample = 1;  // detect on every d-th sample, refit on the full data

  void validate() const;
};

struct SegmentFit {
  std::size_t lo = 0;  // half-open [lo, hi)
  std::size_t hi = 0;
  double mean = 0.0;
  double std = 0.0;
};

/// Change instants are the segment ends: taus[j] = segments[j].hi for all but
/// the last segment, so a change at tau means sample tau starts a new segment.
struct Segmentation {
  std::size_t n = 0;
  std::vector<std::size_t> taus;
  std::vector<SegmentFit> segments;
  double contrast = 0.0;

  std::size_t k() const noexcept { return segments.size(); }
};

struct SegmentContrast {
  double mean = 0.0;
  double std = 0.0;
  double contrast = 0.0;  // (hi - lo) log(std^2)
};

/// Floor applied to segment standard deviations for this series.
double sigma_floor(const UniformSeries& series, const ChangepointConfig& config = {});

SegmentContrast segment_contrast(const UniformSeries& series, std::size_t lo, std::size_t hi,
                                 const ChangepointConfig& config = {});

/// Exact minimizer of the total contrast over all segmentations into k
/// segments of length >= min_seg.
Segmentation detect_k(const UniformSeries& series, std::size_t k,
                      const ChangepointConfig& config = {});

/// Exact minimizers for every k = 1..k_max from one dynamic program.
std::vector<Segmentation> detect_all(const UniformSeries& series, std::size_t k_max,
                                     const ChangepointConfig& config = {});

struct PenaltyScan {
  std::vector<std::size_t> ks;
  std::vector<double> contrasts;
  std::vector<double> betas;       // (G_i - G_{i+1}) / (K_{i+1} - K_i)
  std::vector<double> curvatures;  // betas[i] - betas[i+1], located at ks[i+1]
  std::size_t selected_k = 1;
  std::vector<Segmentation> fits;

  const Segmentation& selected() const { return fits.at(selected_k - 1); }
};

/// Runs detect_all for K = 1..k_max and picks the largest K = ks[i+1] whose
/// curvature is at least elbow_ratio * log(n) and at least elbow_ratio times
/// every curvature at larger K. K = 1 when no curvature qualifies.
PenaltyScan select_k(const UniformSeries& series, const ChangepointConfig& config = {});

/// JSON: {n, K, taus[], segments[{lo, hi, mean, std}], contrast}.
std::string segmentation_to_json(const Segmentation& seg);

}  // namespace lrd

#endif  // LRD_CHANGEPOINT_HPP

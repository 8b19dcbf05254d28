#ifndef LRD_DFA_HPP
#define LRD_DFA_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "lrd/estimate.hpp"
#include "lrd/series.hpp"

namespace lrd {

/// DFA function F(w) for a set of window lengths.
struct DfaProfile {
  std::vector<std::size_t> window_lengths;
  std::vector<double> fluctuation;
  std::size_t n_samples = 0;
};

/// Geometric grid of `count` window lengths from 4 to max(16, n/8), rounded,
/// deduplicated and clipped to [4, n/4].
std::vector<std::size_t> default_dfa_windows(std::size_t n, std::size_t count = 6);

/// Aggregates the increments, cuts the path into floor(n/w) windows (the
/// tail is discarded), removes a least-squares line per window and returns
/// the pooled RMS of the residuals. Needs n >= 16 and 4 <= w <= n/4.
DfaProfile dfa_profile(const UniformSeries& series, const std::vector<std::size_t>& windows);

/// OLS slope of log F(w) on log w.
FractalEstimate estimate_h_dfa(const DfaProfile& profile);

/// CSV `w,F`.
std::string dfa_profile_to_csv(const DfaProfile& profile);

}  // namespace lrd

#endif  // LRD_DFA_HPP

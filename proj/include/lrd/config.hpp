#ifndef LRD_CONFIG_HPP
#define LRD_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lrd/changepoint.hpp"
#include "lrd/wavelet.hpp"

namespace lrd {

/// Every tunable of the analysis pipeline. All fields are recorded in
/// report.json; `threads` is not, since it must not change any output.
struct AnalysisConfig {
  ChangepointConfig changepoint;
  Band band{0.2, 4.0};
  MotherWavelet wavelet;
  std::size_t scale_count = 12;
  std::size_t dfa_window_count = 6;
  std::vector<std::size_t> dfa_windows;  // explicit grid; empty means the default grid
  RegressionKind regression = RegressionKind::gls;
  double gof_level = 0.05;
  double rate_hz = 1.0;
  double rr_min_ms = 300.0;
  double rr_max_ms = 2000.0;
  std::size_t min_samples = 1000;  // warn below this length
  std::uint64_t seed = 1;
  unsigned threads = 0;

  void validate() const;

  /// Sets one field from its textual value. Keys are the flat names used in
  /// config files, e.g. "min_seg", "omega0", "dfa_windows" ("16,32,64").
  void set(const std::string& key, const std::string& value);

  /// Flat JSON object of every key except threads, in a fixed order.
  std::string to_json() const;
};

/// Reads a flat JSON object or a flat `key = value` file (TOML subset:
/// comments with #, optional quotes, arrays as [a, b, c]). The format is
/// chosen by the first non-blank character: `{` means JSON.
AnalysisConfig load_config(const std::string& path);
AnalysisConfig parse_config(const std::string& text, const std::string& origin = "<config>");

}  // namespace lrd

#endif  // LRD_CONFIG_HPP

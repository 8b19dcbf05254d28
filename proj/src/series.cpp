#include "lrd/series.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "format.hpp"
#include "lrd/error.hpp"

namespace lrd {

UniformSeries::UniformSeries(std::vector<double> values, double delta, double t0)
    : values_(std::move(values)), delta_(delta), t0_(t0) {
  require(!values_.empty(), ErrorCode::parameter, "series must contain at least one sample");
  require(std::isfinite(delta_) && delta_ > 0.0, ErrorCode::parameter,
          "sampling step must be positive and finite");
  require(std::isfinite(t0_), ErrorCode::parameter, "start time must be finite");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      fail(ErrorCode::parameter, "series sample " + std::to_string(i) + " is not finite");
  }
}

UniformSeries UniformSeries::slice(std::size_t lo, std::size_t hi) const {
  require(lo < hi && hi <= values_.size(), ErrorCode::parameter, "invalid slice bounds");
  return UniformSeries(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(lo),
                                           values_.begin() + static_cast<std::ptrdiff_t>(hi)),
                       delta_, time(lo));
}

UniformSeries UniformSeries::with_values(std::vector<double> values) const {
  return UniformSeries(std::move(values), delta_, t0_);
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

std::string series_to_csv(const UniformSeries& series) {
  std::string out = "t,value\n";
  out.reserve(series.size() * 24);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_g9(series.time(i));
    out += ',';
    out += format_g9(series[i]);
    out += '\n';
  }
  return out;
}

void write_series_csv(const UniformSeries& series, const std::string& path) {
  write_text_file(path, series_to_csv(series));
}

}  // namespace lrd

#ifndef LRD_SERIES_HPP
#define LRD_SERIES_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lrd {

/// Real samples on a uniform time grid t_i = t0 + i * delta.
///
/// Every stage of the library consumes and produces this type. The
/// constructor rejects empty input, non-finite samples and a non-positive
/// step, so a live object always satisfies those invariants.
class UniformSeries {
 public:
  explicit UniformSeries(std::vector<double> values, double delta = 1.0, double t0 = 0.0);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double delta() const noexcept { return delta_; }
  double t0() const noexcept { return t0_; }
  double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * delta_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Samples [lo, hi) with the grid preserved.
  UniformSeries slice(std::size_t lo, std::size_t hi) const;

  /// Same grid, different samples.
  UniformSeries with_values(std::vector<double> values) const;

 private:
  std::vector<double> values_;
  double delta_;
  double t0_;
};

double mean(std::span<const double> x);
/// Population variance (divides by n).
double variance(std::span<const double> x);

/// Series CSV: header `t,value`, one sample per line, 9 significant digits.
std::string series_to_csv(const UniformSeries& series);
void write_series_csv(const UniformSeries& series, const std::string& path);

}  // namespace lrd

#endif  // LRD_SERIES_HPP

#ifndef LRD_PIPELINE_HPP
#define LRD_PIPELINE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lrd/changepoint.hpp"
#include "lrd/config.hpp"
#include "lrd/dfa.hpp"
#include "lrd/inference.hpp"
#include "lrd/series.hpp"
#include "lrd/wavelet.hpp"

namespace lrd {

/// Inter-beat intervals in milliseconds, in recording order.
struct RawRecording {
  std::string subject;
  std::vector<double> rr_ms;
};

enum class InputFormat { rr_ms, uniform_csv };

InputFormat parse_input_format(const std::string& name);

/// One interval per line; blank lines and lines starting with # are skipped.
/// Non-numeric or non-positive values are parse errors naming the line.
RawRecording parse_rr(const std::string& text, const std::string& subject,
                      const std::string& origin = "<rr>");
RawRecording read_rr(const std::string& path);

/// CSV with header `t,value`. The step is t[1] - t[0]; the remaining times
/// must follow the same grid to within 1e-6 of a step.
UniformSeries parse_uniform_csv(const std::string& text, const std::string& origin = "<csv>");
UniformSeries read_uniform_csv(const std::string& path);

struct ResampleResult {
  UniformSeries series;
  std::size_t kept = 0;
  std::vector<std::size_t> dropped;  // indices into rr_ms
};

/// Drops intervals outside [rr_min_ms, rr_max_ms], converts each kept
/// interval to 60000 / rr BPM at the time of the beat that closes it (the
/// clock runs through dropped intervals), and interpolates linearly onto a
/// grid of step 1 / rate_hz seconds starting at the first kept beat.
ResampleResult clean_and_resample(const RawRecording& rec, double rate_hz = 1.0,
                                  double rr_min_ms = 300.0, double rr_max_ms = 2000.0);

/// Both estimates for one stretch of the series. A missing estimate comes
/// with its error message.
struct PhaseAnalysis {
  std::string name;
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::vector<std::size_t> segment_indices;
  std::optional<DfaProfile> dfa_profile;
  std::optional<FractalEstimate> dfa;
  std::string dfa_error;
  std::optional<ScaleSpectrum> spectrum;
  std::optional<FractalEstimate> wavelet;
  std::string wavelet_error;

  bool ok() const noexcept { return dfa.has_value() && wavelet.has_value(); }
};

struct AnalysisReport {
  std::string subject;
  std::size_t n = 0;
  double delta = 1.0;
  double t0 = 0.0;
  AnalysisConfig config;
  std::vector<std::string> warnings;
  std::optional<PenaltyScan> scan;
  std::string segmentation_error;
  Segmentation segmentation;
  PhaseAnalysis whole;
  std::vector<PhaseAnalysis> phases;
  std::optional<UniformSeries> series;
  std::size_t rr_dropped = 0;
  bool from_rr = false;
};

/// Phase names for the segments of a segmentation: K = 1 gives one "middle"
/// phase; K = 2 calls the longer segment "middle" and the other "beginning"
/// or "end" by position; K >= 3 gives "beginning", "middle" (all interior
/// segments merged) and "end".
std::vector<PhaseAnalysis> map_phases(const Segmentation& seg);

/// Segmentation, phase mapping and per-phase estimation. DFA runs on the
/// series as increments; the wavelet estimate runs in band mode on the
/// aggregated series. Stage failures are recorded, never thrown.
AnalysisReport analyze(const UniformSeries& series, const AnalysisConfig& config,
                       const std::string& subject = "subject");

std::string report_to_json(const AnalysisReport& report);
std::string report_summary(const AnalysisReport& report);

/// Writes report.json, segments.json, series.csv, summary.txt and, per phase
/// with the corresponding estimate, spectrum_<phase>.csv and dfa_<phase>.csv.
void emit(const AnalysisReport& report, const std::string& out_dir);

/// ANOVA of the per-phase estimates across subjects, one comparison per
/// method. Phases missing in a subject are skipped for that subject.
struct CohortComparison {
  std::optional<SampleComparison> wavelet;
  std::optional<SampleComparison> dfa;
  std::vector<std::string> notes;
};

CohortComparison compare_cohort(const std::vector<AnalysisReport>& reports);
std::string cohort_to_json(const CohortComparison& cmp, const std::vector<AnalysisReport>& reports);

}  // namespace lrd

#endif  // LRD_PIPELINE_HPP

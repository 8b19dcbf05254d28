#include "lrd/pipeline.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "format.hpp"
#include "json.hpp"
#include "lrd/error.hpp"
#include "lrd/synthesis.hpp"

namespace lrd {
namespace {

using ojson = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::string stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// JSON numbers must be finite; infinities and NaN become null.
ojson num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ojson estimate_json(const FractalEstimate& e) {
  ojson j;
  j["method"] = to_string(e.method);
  j["h_hat"] = num(e.h_hat);
  j["slope"] = num(e.slope);
  j["intercept"] = num(e.intercept);
  j["stderr"] = num(e.stderr_h);
  j["ci_halfwidth"] = num(e.ci_halfwidth);
  if (e.gof) {
    j["gof"] = {{"statistic", num(e.gof->statistic)},
                {"dof", e.gof->dof},
                {"p_value", num(e.gof->p_value)},
                {"level", e.gof->level},
                {"accepted", e.gof->accepted}};
  }
  return j;
}

ojson phase_json(const PhaseAnalysis& p) {
  ojson j;
  j["name"] = p.name;
  j["lo"] = p.lo;
  j["hi"] = p.hi;
  j["segments"] = p.segment_indices;
  j["status"] = p.ok() ? "ok" : "failed";
  if (p.dfa) {
    ojson d = estimate_json(*p.dfa);
    d["windows"] = p.dfa_profile->window_lengths;
    j["dfa"] = d;
  } else {
    j["dfa"] = {{"error", p.dfa_error}};
  }
  if (p.wavelet) {
    ojson w = estimate_json(*p.wavelet);
    w["mode"] = to_string(p.spectrum->mode);
    w["scales"] = p.spectrum->scales.size();
    w["scale_min"] = p.spectrum->scales.front();
    w["scale_max"] = p.spectrum->scales.back();
    auto rej = ojson::array();
    for (const auto& r : p.spectrum->rejected) rej.push_back({{"scale", r.scale}, {"reason", r.reason}});
    w["rejected"] = rej;
    j["wavelet"] = w;
  } else {
    j["wavelet"] = {{"error", p.wavelet_error}};
  }
  return j;
}

void analyze_phase(PhaseAnalysis& phase, const UniformSeries& part, const AnalysisConfig& cfg) {
  try {
    std::vector<std::size_t> windows;
    if (cfg.dfa_windows.empty()) {
      windows = default_dfa_windows(part.size(), cfg.dfa_window_count);
    } else {
      for (std::size_t w : cfg.dfa_windows)
        if (w <= part.size() / 4) windows.push_back(w);
    }
    require(windows.size() >= 3, ErrorCode::constraint,
            "fewer than 3 DFA windows fit in " + std::to_string(part.size()) + " samples");
    phase.dfa_profile = dfa_profile(part, windows);
    phase.dfa = estimate_h_dfa(*phase.dfa_profile);
  } catch (const Error& e) {
    phase.dfa_profile.reset();
    phase.dfa.reset();
    phase.dfa_error = std::string(to_string(e.code())) + ": " + e.what();
  }
  try {
    const UniformSeries path = aggregate(part);
    const auto scales = default_scales(path.size(), path.delta(), ScaleMode::band, cfg.wavelet,
                                       cfg.band, cfg.scale_count);
    phase.spectrum = scale_spectrum(path, cfg.wavelet, scales, ScaleMode::band, cfg.band);
    FractalEstimate est = estimate_h_wavelet(*phase.spectrum, cfg.regression);
    est.gof = goodness_of_fit(*phase.spectrum, est, cfg.gof_level);
    phase.wavelet = est;
  } catch (const Error& e) {
    phase.spectrum.reset();
    phase.wavelet.reset();
    phase.wavelet_error = std::string(to_string(e.code())) + ": " + e.what();
  }
}

ojson comparison_json(const AnalysisReport& r) {
  ojson j;
  auto diffs = ojson::array();
  for (const auto& p : r.phases) {
    if (p.dfa && p.wavelet)
      diffs.push_back({{"phase", p.name}, {"dfa_minus_wavelet", num(p.dfa->h_hat - p.wavelet->h_hat)}});
  }
  j["dfa_vs_wavelet"] = diffs;
  auto pairs = ojson::array();
  const boost::math::normal normal;
  for (std::size_t i = 0; i + 1 < r.phases.size(); ++i) {
    const auto& a = r.phases[i];
    const auto& b = r.phases[i + 1];
    if (!a.wavelet || !b.wavelet) continue;
    const double d = b.wavelet->h_hat - a.wavelet->h_hat;
    const double se = std::hypot(a.wavelet->stderr_h, b.wavelet->stderr_h);
    ojson e{{"from", a.name}, {"to", b.name}, {"wavelet_difference", num(d)}};
    if (se > 0.0) {
      e["z"] = num(d / se);
      e["p_value"] = num(2.0 * boost::math::cdf(boost::math::complement(normal, std::abs(d / se))));
    } else {
      e["z"] = nullptr;
      e["p_value"] = nullptr;
    }
    pairs.push_back(e);
  }
  j["successive_phases"] = pairs;
  return j;
}

ojson comparison_to_json(const std::optional<SampleComparison>& c) {
  if (!c) return nullptr;
  return ojson{{"groups", c->labels},
               {"f_statistic", num(c->f_statistic)},
               {"df_between", c->df_between},
               {"df_within", c->df_within},
               {"p_value", num(c->p_value)}};
}

}  // namespace

InputFormat parse_input_format(const std::string& name) {
  if (name == "rr-ms") return InputFormat::rr_ms;
  if (name == "uniform-csv") return InputFormat::uniform_csv;
  fail(ErrorCode::parameter, "unknown input format '" + name + "' (expected rr-ms or uniform-csv)");
}

RawRecording parse_rr(const std::string& text, const std::string& subject, const std::string& origin) {
  RawRecording rec;
  rec.subject = subject;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    double v = 0.0;
    if (!parse_number(t, v))
      fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": '" + t + "' is not a number");
    if (v <= 0.0)
      fail(ErrorCode::parse,
           origin + ":" + std::to_string(line_no) + ": interval " + t + " ms is not positive");
    rec.rr_ms.push_back(v);
  }
  require(!rec.rr_ms.empty(), ErrorCode::parse, origin + ": no intervals found");
  return rec;
}

RawRecording read_rr(const std::string& path) {
  return parse_rr(read_text_file(path), stem(path), path);
}

UniformSeries parse_uniform_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<double> t, v;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (!header) {
      std::string h = s;
      h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '"'; }), h.end());
      if (h != "t,value")
        fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": expected header 't,value'");
      header = true;
      continue;
    }
    const auto comma = s.find(',');
    double tv = 0.0, vv = 0.0;
    if (comma == std::string::npos || !parse_number(s.substr(0, comma), tv) ||
        !parse_number(s.substr(comma + 1), vv))
      fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": malformed row '" + s + "'");
    t.push_back(tv);
    v.push_back(vv);
  }
  require(header, ErrorCode::parse, origin + ": empty file");
  require(!v.empty(), ErrorCode::parse, origin + ": no samples after the header");
  double delta = 1.0;
  if (t.size() >= 2) {
    delta = t[1] - t[0];
    require(delta > 0.0, ErrorCode::parse, origin + ": time column must increase");
    for (std::size_t i = 2; i < t.size(); ++i) {
      const double expected = t[0] + static_cast<double>(i) * delta;
      if (std::abs(t[i] - expected) > 1e-6 * delta + 1e-9 * std::abs(expected))
        fail(ErrorCode::parse, origin + ": row " + std::to_string(i + 1) + " breaks the uniform time grid");
    }
  }
  return UniformSeries(std::move(v), delta, t[0]);
}

UniformSeries read_uniform_csv(const std::string& path) {
  return parse_uniform_csv(read_text_file(path), path);
}

ResampleResult clean_and_resample(const RawRecording& rec, double rate_hz, double rr_min_ms,
                                  double rr_max_ms) {
  require(rate_hz > 0.0 && std::isfinite(rate_hz), ErrorCode::parameter, "rate_hz must be positive");
  require(rr_min_ms > 0.0 && rr_max_ms > rr_min_ms, ErrorCode::parameter,
          "RR filter needs 0 < rr_min_ms < rr_max_ms");
  std::vector<double> times, bpm;
  std::vector<std::size_t> dropped;
  double clock = 0.0;
  for (std::size_t i = 0; i < rec.rr_ms.size(); ++i) {
    const double rr = rec.rr_ms[i];
    require(rr > 0.0 && std::isfinite(rr), ErrorCode::parse,
            "interval " + std::to_string(i + 1) + " is not positive");
    clock += rr / 1000.0;
    if (rr < rr_min_ms || rr > rr_max_ms) {
      dropped.push_back(i);
      continue;
    }
    times.push_back(clock);
    bpm.push_back(60000.0 / rr);
  }
  const std::size_t total = rec.rr_ms.size();
  require(2 * dropped.size() <= total, ErrorCode::quality,
          std::to_string(dropped.size()) + " of " + std::to_string(total) +
              " intervals fall outside [" + format_g9(rr_min_ms) + ", " + format_g9(rr_max_ms) +
              "] ms");
  require(times.size() >= 10, ErrorCode::quality,
          "only " + std::to_string(times.size()) + " valid intervals; at least 10 are needed");

  const double step = 1.0 / rate_hz;
  const auto count = static_cast<std::size_t>(std::floor((times.back() - times.front()) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  std::size_t k = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = times.front() + static_cast<double>(i) * step;
    while (k + 2 < times.size() && times[k + 1] < t) ++k;
    const double t0 = times[k], t1 = times[k + 1];
    const double u = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    out[i] = bpm[k] + u * (bpm[k + 1] - bpm[k]);
  }
  return ResampleResult{UniformSeries(std::move(out), step, times.front()), times.size(),
                        std::move(dropped)};
}

std::vector<PhaseAnalysis> map_phases(const Segmentation& seg) {
  std::vector<PhaseAnalysis> out;
  const auto& s = seg.segments;
  auto make = [&](const char* name, std::size_t first, std::size_t last) {
    PhaseAnalysis p;
    p.name = name;
    p.lo = s[first].lo;
    p.hi = s[last].hi;
    for (std::size_t i = first; i <= last; ++i) p.segment_indices.push_back(i);
    out.push_back(std::move(p));
  };
  if (s.size() == 1) {
    make("middle", 0, 0);
  } else if (s.size() == 2) {
    const bool first_longer = s[0].hi - s[0].lo >= s[1].hi - s[1].lo;
    if (first_longer) {
      make("middle", 0, 0);
      make("end", 1, 1);
    } else {
      make("beginning", 0, 0);
      make("middle", 1, 1);
    }
  } else if (s.size() >= 3) {
    make("beginning", 0, 0);
    make("middle", 1, s.size() - 2);
    make("end", s.size() - 1, s.size() - 1);
  }
  return out;
}

AnalysisReport analyze(const UniformSeries& series, const AnalysisConfig& config,
                       const std::string& subject) {
  config.validate();
  AnalysisReport r;
  r.subject = subject;
  r.n = series.size();
  r.delta = series.delta();
  r.t0 = series.t0();
  r.config = config;
  r.series = series;
  if (series.size() < config.min_samples)
    r.warnings.push_back("series has " + std::to_string(series.size()) + " samples; at least " +
                         std::to_string(config.min_samples) +
                         " are recommended for per-phase estimation");

  try {
    r.scan = select_k(series, config.changepoint);
    r.segmentation = r.scan->selected();
  } catch (const Error& e) {
    r.segmentation_error = std::string(to_string(e.code())) + ": " + e.what();
    r.warnings.push_back("segmentation failed; the whole series is analyzed as one phase");
    const double m = mean(series.values());
    r.segmentation = Segmentation{series.size(), {}, {{0, series.size(), m,
                                                        std::sqrt(variance(series.values()))}}, 0.0};
  }

  r.whole.name = "whole";
  r.whole.lo = 0;
  r.whole.hi = series.size();
  analyze_phase(r.whole, series, config);
  r.phases = map_phases(r.segmentation);
  for (auto& p : r.phases) {
    if (p.hi - p.lo < 16) {
      p.dfa_error = p.wavelet_error = "constraint: phase shorter than 16 samples";
      continue;
    }
    analyze_phase(p, series.slice(p.lo, p.hi), config);
  }
  return r;
}

std::string report_to_json(const AnalysisReport& r) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["subject"] = r.subject;
  j["n"] = r.n;
  j["delta"] = r.delta;
  j["t0"] = r.t0;
  if (r.from_rr) j["rr_dropped"] = r.rr_dropped;
  j["config"] = ojson::parse(r.config.to_json());
  j["band"] = {{"omega0", r.config.band.omega0}, {"omega1", r.config.band.omega1}};
  j["warnings"] = r.warnings;

  ojson seg = ojson::parse(segmentation_to_json(r.segmentation));
  if (r.scan) {
    seg["scan"] = {{"ks", r.scan->ks},
                   {"contrasts", r.scan->contrasts},
                   {"betas", r.scan->betas},
                   {"curvatures", r.scan->curvatures},
                   {"selected_k", r.scan->selected_k}};
  } else {
    seg["error"] = r.segmentation_error;
  }
  j["segmentation"] = seg;
  j["whole"] = phase_json(r.whole);
  auto phases = ojson::array();
  for (const auto& p : r.phases) phases.push_back(phase_json(p));
  j["phases"] = phases;
  j["comparison"] = comparison_json(r);
  return j.dump(2) + "\n";
}

std::string report_summary(const AnalysisReport& r) {
  std::string out = "subject " + r.subject + ", n = " + std::to_string(r.n) + ", K = " +
                    std::to_string(r.segmentation.k()) + ", band [" + format_g9(r.config.band.omega0) +
                    ", " + format_g9(r.config.band.omega1) + "]\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %8s %8s %10s %10s %8s %s\n", "phase", "lo", "hi", "H_DFA",
                "H_WAV", "GOF_p", "status");
  out += line;
  auto row = [&](const PhaseAnalysis& p) {
    const std::string hd = p.dfa ? format_fixed(p.dfa->h_hat, 4) : "-";
    const std::string hw = p.wavelet ? format_fixed(p.wavelet->h_hat, 4) : "-";
    const std::string gp =
        p.wavelet && p.wavelet->gof ? format_fixed(p.wavelet->gof->p_value, 4) : "-";
    std::snprintf(line, sizeof line, "%-10s %8zu %8zu %10s %10s %8s %s\n", p.name.c_str(), p.lo,
                  p.hi, hd.c_str(), hw.c_str(), gp.c_str(), p.ok() ? "ok" : "failed");
    out += line;
  };
  for (const auto& p : r.phases) row(p);
  row(r.whole);
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  return out;
}

void emit(const AnalysisReport& report, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create directory '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);
  write_text_file((dir / "report.json").string(), report_to_json(report));
  write_text_file((dir / "segments.json").string(), segmentation_to_json(report.segmentation));
  write_text_file((dir / "summary.txt").string(), report_summary(report));
  if (report.series) write_series_csv(*report.series, (dir / "series.csv").string());
  auto files = [&](const PhaseAnalysis& p) {
    if (p.spectrum && p.wavelet)
      write_text_file((dir / ("spectrum_" + p.name + ".csv")).string(), spectrum_to_csv(*p.spectrum));
    if (p.dfa_profile)
      write_text_file((dir / ("dfa_" + p.name + ".csv")).string(), dfa_profile_to_csv(*p.dfa_profile));
  };
  for (const auto& p : report.phases) files(p);
  files(report.whole);
}

CohortComparison compare_cohort(const std::vector<AnalysisReport>& reports) {
  CohortComparison cmp;
  const std::vector<std::string> names{"beginning", "middle", "end"};
  auto collect = [&](bool wavelet) {
    std::vector<std::vector<double>> groups;
    std::vector<std::string> labels;
    for (const auto& name : names) {
      std::vector<double> g;
      for (const auto& r : reports)
        for (const auto& p : r.phases)
          if (p.name == name) {
            const auto& e = wavelet ? p.wavelet : p.dfa;
            if (e) g.push_back(e->h_hat);
          }
      if (g.size() >= 2) {
        groups.push_back(std::move(g));
        labels.push_back(name);
      } else {
        cmp.notes.push_back(std::string(wavelet ? "wavelet" : "dfa") + ": phase '" + name +
                            "' has fewer than 2 estimates and is left out");
      }
    }
    std::optional<SampleComparison> out;
    if (groups.size() >= 2) out = anova_f(groups, labels);
    return out;
  };
  cmp.wavelet = collect(true);
  cmp.dfa = collect(false);
  return cmp;
}

std::string cohort_to_json(const CohortComparison& cmp, const std::vector<AnalysisReport>& reports) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  auto subjects = ojson::array();
  for (const auto& r : reports) {
    ojson s{{"subject", r.subject}, {"K", r.segmentation.k()}};
    auto ph = ojson::object();
    for (const auto& p : r.phases)
      ph[p.name] = {{"dfa", p.dfa ? num(p.dfa->h_hat) : ojson(nullptr)},
                    {"wavelet", p.wavelet ? num(p.wavelet->h_hat) : ojson(nullptr)}};
    s["phases"] = ph;
    subjects.push_back(s);
  }
  j["subjects"] = subjects;
  j["anova_wavelet"] = comparison_to_json(cmp.wavelet);
  j["anova_dfa"] = comparison_to_json(cmp.dfa);
  j["notes"] = cmp.notes;
  return j.dump(2) + "\n";
}

}  // namespace lrd

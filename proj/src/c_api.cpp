#include "lrd/lrd.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "format.hpp"
#include "json.hpp"
#include "lrd/config.hpp"
#include "lrd/dfa.hpp"
#include "lrd/error.hpp"
#include "lrd/inference.hpp"
#include "lrd/pipeline.hpp"
#include "lrd/synthesis.hpp"
#include "lrd/wavelet.hpp"

struct lrd_series {
  lrd::UniformSeries series;
};

struct lrd_config {
  lrd::AnalysisConfig config;
};

struct lrd_segmentation {
  lrd::Segmentation seg;
  std::optional<lrd::PenaltyScan> scan;
};

struct lrd_dfa_result {
  lrd::DfaProfile profile;
  lrd::FractalEstimate estimate;
};

struct lrd_wavelet_result {
  lrd::ScaleSpectrum spectrum;
  lrd::FractalEstimate estimate;
  bool aggregated = false;
  std::optional<lrd::ScaleSpectrum> scan;
  std::optional<lrd::BandSuggestion> suggestion;
};

struct lrd_report {
  lrd::AnalysisReport report;
};

struct lrd_table1 {
  lrd::MonteCarloReport report;
};

namespace {

using ojson = nlohmann::ordered_json;

thread_local std::string g_last_error;

lrd_status status_of(lrd::ErrorCode code) {
  switch (code) {
    case lrd::ErrorCode::parameter: return LRD_ERR_PARAMETER;
    case lrd::ErrorCode::constraint: return LRD_ERR_CONSTRAINT;
    case lrd::ErrorCode::degenerate: return LRD_ERR_DEGENERATE;
    case lrd::ErrorCode::numerical: return LRD_ERR_NUMERICAL;
    case lrd::ErrorCode::parse: return LRD_ERR_PARSE;
    case lrd::ErrorCode::quality: return LRD_ERR_QUALITY;
    case lrd::ErrorCode::io: return LRD_ERR_IO;
  }
  return LRD_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and the thread's last error.
template <class F>
lrd_status guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LRD_OK;
  } catch (const lrd::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LRD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LRD_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) lrd::fail(lrd::ErrorCode::parameter, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  need(out, "output pointer");
  *out = dup(s);
}

const lrd::AnalysisConfig& config_or_default(const lrd_config* cfg) {
  static const lrd::AnalysisConfig defaults;
  return cfg ? cfg->config : defaults;
}

lrd::ScaleMode parse_mode(const char* mode) {
  need(mode, "mode");
  const std::string m(mode);
  if (m == "lrd") return lrd::ScaleMode::lrd;
  if (m == "selfsimilar") return lrd::ScaleMode::selfsimilar;
  if (m == "band") return lrd::ScaleMode::band;
  lrd::fail(lrd::ErrorCode::parameter, "unknown wavelet mode '" + m + "'");
}

ojson num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ojson estimate_json(const lrd::FractalEstimate& e) {
  ojson j;
  j["method"] = lrd::to_string(e.method);
  j["h_hat"] = num(e.h_hat);
  j["slope"] = num(e.slope);
  j["intercept"] = num(e.intercept);
  j["stderr"] = num(e.stderr_h);
  j["ci_halfwidth"] = num(e.ci_halfwidth);
  if (e.gof)
    j["gof"] = {{"statistic", num(e.gof->statistic)},
                {"dof", e.gof->dof},
                {"p_value", num(e.gof->p_value)},
                {"level", e.gof->level},
                {"accepted", e.gof->accepted}};
  return j;
}

ojson candidate_json(const lrd::BandCandidate& c, const lrd::ScaleSpectrum& s) {
  return ojson{{"omega0", c.band.omega0},
               {"omega1", c.band.omega1},
               {"scale_min", s.scales[c.first]},
               {"scale_max", s.scales[c.last]},
               {"score", num(c.score)},
               {"p_value", num(c.p_value)}};
}

lrd::UniformSeries read_series(const char* path, const char* format, const lrd::AnalysisConfig& cfg,
                               std::size_t* dropped, bool* from_rr, std::string* subject) {
  need(path, "path");
  need(format, "format");
  const auto fmt = lrd::parse_input_format(format);
  if (subject) *subject = std::filesystem::path(path).stem().string();
  if (fmt == lrd::InputFormat::uniform_csv) {
    if (dropped) *dropped = 0;
    if (from_rr) *from_rr = false;
    return lrd::read_uniform_csv(path);
  }
  const auto rec = lrd::read_rr(path);
  auto res = lrd::clean_and_resample(rec, cfg.rate_hz, cfg.rr_min_ms, cfg.rr_max_ms);
  if (dropped) *dropped = res.dropped.size();
  if (from_rr) *from_rr = true;
  return std::move(res.series);
}

}  // namespace

extern "C" {

const char* lrd_version(void) { return "1.0.0"; }

const char* lrd_last_error(void) { return g_last_error.c_str(); }

const char* lrd_status_name(lrd_status status) {
  switch (status) {
    case LRD_OK: return "ok";
    case LRD_ERR_PARAMETER: return "parameter";
    case LRD_ERR_CONSTRAINT: return "constraint";
    case LRD_ERR_DEGENERATE: return "degenerate";
    case LRD_ERR_NUMERICAL: return "numerical";
    case LRD_ERR_PARSE: return "parse";
    case LRD_ERR_QUALITY: return "quality";
    case LRD_ERR_IO: return "io";
    case LRD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int lrd_exit_code(lrd_status status) {
  switch (status) {
    case LRD_OK: return 0;
    case LRD_ERR_PARAMETER:
    case LRD_ERR_CONSTRAINT: return 1;
    case LRD_ERR_PARSE:
    case LRD_ERR_QUALITY:
    case LRD_ERR_IO: return 2;
    case LRD_ERR_DEGENERATE:
    case LRD_ERR_NUMERICAL:
    case LRD_ERR_INTERNAL: return 3;
  }
  return 3;
}

void lrd_string_free(char* s) { std::free(s); }

lrd_status lrd_series_create(const double* values, size_t n, double delta, double t0,
                             lrd_series** out) {
  return guard([&] {
    need(out, "output pointer");
    need(values, "values");
    *out = new lrd_series{lrd::UniformSeries(std::vector<double>(values, values + n), delta, t0)};
  });
}

void lrd_series_free(lrd_series* s) { delete s; }
size_t lrd_series_length(const lrd_series* s) { return s ? s->series.size() : 0; }
double lrd_series_delta(const lrd_series* s) { return s ? s->series.delta() : 0.0; }
double lrd_series_t0(const lrd_series* s) { return s ? s->series.t0() : 0.0; }
const double* lrd_series_values(const lrd_series* s) { return s ? s->series.values().data() : nullptr; }

lrd_status lrd_series_to_csv(const lrd_series* s, char** out) {
  return guard([&] {
    need(s, "series");
    put_string(out, lrd::series_to_csv(s->series));
  });
}

lrd_status lrd_series_write_csv(const lrd_series* s, const char* path) {
  return guard([&] {
    need(s, "series");
    need(path, "path");
    lrd::write_series_csv(s->series, path);
  });
}

lrd_status lrd_series_read(const char* path, const char* format, const lrd_config* cfg,
                           lrd_series** out, size_t* dropped) {
  return guard([&] {
    need(out, "output pointer");
    *out = new lrd_series{read_series(path, format, config_or_default(cfg), dropped, nullptr, nullptr)};
  });
}

lrd_status lrd_series_aggregate(const lrd_series* s, lrd_series** out) {
  return guard([&] {
    need(s, "series");
    need(out, "output pointer");
    *out = new lrd_series{lrd::aggregate(s->series)};
  });
}

lrd_status lrd_fgn_autocovariance(double hurst, double sigma2, size_t lag, double* out) {
  return guard([&] {
    need(out, "output pointer");
    *out = lrd::fgn_autocovariance(hurst, sigma2, lag);
  });
}

lrd_status lrd_generate_fgn(double hurst, double sigma2, size_t n, uint64_t seed, lrd_series** out) {
  return guard([&] {
    need(out, "output pointer");
    *out = new lrd_series{lrd::generate_fgn({hurst, sigma2, n, seed})};
  });
}

lrd_status lrd_generate_lfgn(double hurst, double sigma, double omega0, double omega1, double h_low,
                             double h_high, size_t n, double delta, uint64_t seed, lrd_series** out,
                             char** warning) {
  return guard([&] {
    need(out, "output pointer");
    auto profile = lrd::SpectralProfile::with_defaults(hurst, sigma, omega0, omega1);
    if (!std::isnan(h_low)) profile.h_low = h_low;
    if (!std::isnan(h_high)) profile.h_high = h_high;
    auto series = lrd::generate_lfgn(profile, n, delta, seed);
    if (warning) {
      const auto w = lrd::lfgn_span_warning(profile, n, delta);
      *warning = w ? dup(*w) : nullptr;
    }
    *out = new lrd_series{std::move(series)};
  });
}

lrd_status lrd_add_polynomial_trend(const lrd_series* s, const double* coefficients, size_t count,
                                    lrd_series** out) {
  return guard([&] {
    need(s, "series");
    need(out, "output pointer");
    need(coefficients, "coefficients");
    lrd::PolynomialTrend t{std::vector<double>(coefficients, coefficients + count)};
    *out = new lrd_series{lrd::add_trend(s->series, t)};
  });
}

lrd_status lrd_add_step_trend(const lrd_series* s, const double* levels, const double* breaks,
                              size_t breaks_count, lrd_series** out) {
  return guard([&] {
    need(s, "series");
    need(out, "output pointer");
    need(levels, "levels");
    if (breaks_count > 0) need(breaks, "breaks");
    lrd::PiecewiseConstantTrend t{std::vector<double>(levels, levels + breaks_count + 1),
                                  std::vector<double>(breaks, breaks + breaks_count)};
    *out = new lrd_series{lrd::add_trend(s->series, t)};
  });
}

lrd_status lrd_config_create(lrd_config** out) {
  return guard([&] {
    need(out, "output pointer");
    *out = new lrd_config{};
  });
}

lrd_status lrd_config_load(const char* path, lrd_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "output pointer");
    *out = new lrd_config{lrd::load_config(path)};
  });
}

void lrd_config_free(lrd_config* cfg) { delete cfg; }

lrd_status lrd_config_set(lrd_config* cfg, const char* key, const char* value) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    lrd::AnalysisConfig next = cfg->config;
    next.set(key, value);
    next.validate();
    cfg->config = next;
  });
}

lrd_status lrd_config_to_json(const lrd_config* cfg, char** out) {
  return guard([&] {
    need(cfg, "config");
    put_string(out, cfg->config.to_json());
  });
}

lrd_status lrd_config_get(const lrd_config* cfg, const char* key, char** out) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    const auto j = ojson::parse(cfg->config.to_json());
    if (std::string(key) == "threads") {
      put_string(out, std::to_string(cfg->config.threads));
      return;
    }
    const auto it = j.find(key);
    if (it == j.end()) lrd::fail(lrd::ErrorCode::parameter, "unknown config key '" + std::string(key) + "'");
    put_string(out, it->is_string() ? it->get<std::string>() : it->dump());
  });
}

lrd_status lrd_segment(const lrd_series* s, const lrd_config* cfg, size_t k, lrd_segmentation** out) {
  return guard([&] {
    need(s, "series");
    need(out, "output pointer");
    const auto& c = config_or_default(cfg);
    if (k == 0) {
      auto scan = lrd::select_k(s->series, c.changepoint);
      auto seg = scan.selected();
      *out = new lrd_segmentation{std::move(seg), std::move(scan)};
    } else {
      *out = new lrd_segmentation{lrd::detect_k(s->series, k, c.changepoint), std::nullopt};
    }
  });
}

void lrd_segmentation_free(lrd_segmentation* seg) { delete seg; }
size_t lrd_segmentation_k(const lrd_segmentation* seg) { return seg ? seg->seg.k() : 0; }
double lrd_segmentation_contrast(const lrd_segmentation* seg) { return seg ? seg->seg.contrast : 0.0; }

size_t lrd_segmentation_taus(const lrd_segmentation* seg, size_t* taus, size_t capacity) {
  if (!seg) return 0;
  for (size_t i = 0; i < seg->seg.taus.size() && i < capacity && taus; ++i) taus[i] = seg->seg.taus[i];
  return seg->seg.taus.size();
}

lrd_status lrd_segmentation_to_json(const lrd_segmentation* seg, char** out) {
  return guard([&] {
    need(seg, "segmentation");
    ojson j = ojson::parse(lrd::segmentation_to_json(seg->seg));
    if (seg->scan) {
      j["scan"] = {{"ks", seg->scan->ks},
                   {"contrasts", seg->scan->contrasts},
                   {"betas", seg->scan->betas},
                   {"curvatures", seg->scan->curvatures},
                   {"selected_k", seg->scan->selected_k}};
    }
    put_string(out, j.dump(2) + "\n");
  });
}

lrd_status lrd_dfa(const lrd_series* s, const lrd_config* cfg, lrd_dfa_result** out) {
  return guard([&] {
    need(s, "series");
    need(out, "output pointer");
    const auto& c = config_or_default(cfg);
    const auto windows = c.dfa_windows.empty()
                             ? lrd::default_dfa_windows(s->series.size(), c.dfa_window_count)
                             : c.dfa_windows;
    auto profile = lrd::dfa_profile(s->series, windows);
    auto est = lrd::estimate_h_dfa(profile);
    *out = new lrd_dfa_result{std::move(profile), est};
  });
}

void lrd_dfa_free(lrd_dfa_result* r) { delete r; }
double lrd_dfa_h(const lrd_dfa_result* r) { return r ? r->estimate.h_hat : NAN; }

lrd_status lrd_dfa_to_json(const lrd_dfa_result* r, char** out) {
  return guard([&] {
    need(r, "result");
    ojson j;
    j["n"] = r->profile.n_samples;
    j["windows"] = r->profile.window_lengths;
    j["fluctuation"] = r->profile.fluctuation;
    j["estimate"] = estimate_json(r->estimate);
    put_string(out, j.dump(2) + "\n");
  });
}

lrd_status lrd_dfa_to_csv(const lrd_dfa_result* r, char** out) {
  return guard([&] {
    need(r, "result");
    put_string(out, lrd::dfa_profile_to_csv(r->profile));
  });
}

lrd_status lrd_wavelet(const lrd_series* s, const lrd_config* cfg, const char* mode, int gof,
                       int suggest, lrd_wavelet_result** out) {
  return guard([&] {
    need(s, "series");
    need(out, "output pointer");
    const auto& c = config_or_default(cfg);
    const auto m = parse_mode(mode);
    const bool aggregated = m != lrd::ScaleMode::lrd;
    const lrd::UniformSeries input = aggregated ? lrd::aggregate(s->series) : s->series;
    std::optional<lrd::Band> band;
    if (m == lrd::ScaleMode::band) band = c.band;
    const auto scales =
        lrd::default_scales(input.size(), input.delta(), m, c.wavelet, band, c.scale_count);
    auto spectrum = lrd::scale_spectrum(input, c.wavelet, scales, m, band);
    auto est = lrd::estimate_h_wavelet(spectrum, c.regression);
    if (gof) est.gof = lrd::goodness_of_fit(spectrum, est, c.gof_level);
    auto result = std::make_unique<lrd_wavelet_result>();
    result->spectrum = std::move(spectrum);
    result->estimate = est;
    result->aggregated = aggregated;
    if (suggest) {
      const auto wide = lrd::wide_scales(input.size(), input.delta(), c.wavelet,
                                         std::max<std::size_t>(c.scale_count, 8));
      const auto scan_mode = aggregated ? lrd::ScaleMode::selfsimilar : lrd::ScaleMode::lrd;
      result->scan = lrd::scale_spectrum(input, c.wavelet, wide, scan_mode);
      result->suggestion = lrd::suggest_band(*result->scan, c.gof_level);
    }
    *out = result.release();
  });
}

void lrd_wavelet_free(lrd_wavelet_result* r) { delete r; }
double lrd_wavelet_h(const lrd_wavelet_result* r) { return r ? r->estimate.h_hat : NAN; }

int lrd_wavelet_gof_p(const lrd_wavelet_result* r, double* p_value) {
  if (!r || !r->estimate.gof) return 0;
  if (p_value) *p_value = r->estimate.gof->p_value;
  return 1;
}

lrd_status lrd_wavelet_to_json(const lrd_wavelet_result* r, char** out) {
  return guard([&] {
    need(r, "result");
    const auto& sp = r->spectrum;
    ojson j;
    j["mode"] = lrd::to_string(sp.mode);
    j["aggregated_input"] = r->aggregated;
    j["n"] = sp.n_samples;
    j["delta"] = sp.delta;
    if (sp.band) j["band"] = {{"omega0", sp.band->omega0}, {"omega1", sp.band->omega1}};
    j["wavelet"] = {{"alpha", sp.wavelet.alpha},
                    {"beta", sp.wavelet.beta},
                    {"kappa", sp.wavelet.kappa},
                    {"width", sp.wavelet.width}};
    j["scales"] = sp.scales;
    j["s_n"] = sp.s_n;
    j["counts"] = sp.counts;
    auto rej = ojson::array();
    for (const auto& x : sp.rejected) rej.push_back({{"scale", x.scale}, {"reason", x.reason}});
    j["rejected"] = rej;
    j["estimate"] = estimate_json(r->estimate);
    if (r->suggestion) {
      ojson sg;
      sg["scan_scales"] = r->scan->scales;
      sg["best"] = candidate_json(r->suggestion->best, *r->scan);
      sg["runner_up"] = r->suggestion->runner_up ? candidate_json(*r->suggestion->runner_up, *r->scan)
                                                 : ojson(nullptr);
      j["band_suggestion"] = sg;
    }
    put_string(out, j.dump(2) + "\n");
  });
}

lrd_status lrd_wavelet_to_csv(const lrd_wavelet_result* r, char** out) {
  return guard([&] {
    need(r, "result");
    put_string(out, lrd::spectrum_to_csv(r->spectrum));
  });
}

lrd_status lrd_analyze(const lrd_series* s, const lrd_config* cfg, const char* subject,
                       lrd_report** out) {
  return guard([&] {
    need(s, "series");
    need(out, "output pointer");
    *out = new lrd_report{lrd::analyze(s->series, config_or_default(cfg), subject ? subject : "subject")};
  });
}

lrd_status lrd_analyze_file(const char* path, const char* format, const lrd_config* cfg,
                            lrd_report** out) {
  return guard([&] {
    need(out, "output pointer");
    const auto& c = config_or_default(cfg);
    std::size_t dropped = 0;
    bool from_rr = false;
    std::string subject;
    const auto series = read_series(path, format, c, &dropped, &from_rr, &subject);
    auto report = lrd::analyze(series, c, subject);
    report.from_rr = from_rr;
    report.rr_dropped = dropped;
    *out = new lrd_report{std::move(report)};
  });
}

void lrd_report_free(lrd_report* r) { delete r; }
size_t lrd_report_phase_count(const lrd_report* r) { return r ? r->report.phases.size() : 0; }

int lrd_report_phase_wavelet_h(const lrd_report* r, size_t i, double* h) {
  if (!r || i >= r->report.phases.size() || !r->report.phases[i].wavelet) return 0;
  if (h) *h = r->report.phases[i].wavelet->h_hat;
  return 1;
}

lrd_status lrd_report_to_json(const lrd_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    put_string(out, lrd::report_to_json(r->report));
  });
}

lrd_status lrd_report_emit(const lrd_report* r, const char* out_dir) {
  return guard([&] {
    need(r, "report");
    need(out_dir, "output directory");
    lrd::emit(r->report, out_dir);
  });
}

lrd_status lrd_cohort_to_json(const lrd_report* const* reports, size_t count, char** out) {
  return guard([&] {
    need(reports, "reports");
    std::vector<lrd::AnalysisReport> all;
    for (size_t i = 0; i < count; ++i) {
      need(reports[i], "report");
      all.push_back(reports[i]->report);
    }
    put_string(out, lrd::cohort_to_json(lrd::compare_cohort(all), all));
  });
}

lrd_status lrd_table1_run(const double* h_values, size_t h_count, size_t n, size_t reps, uint64_t seed,
                          const char* regression, unsigned threads, lrd_table1** out) {
  return guard([&] {
    need(out, "output pointer");
    lrd::MonteCarloConfig mc;
    if (h_count > 0) {
      need(h_values, "H values");
      mc.h_values.assign(h_values, h_values + h_count);
    }
    mc.n = n;
    mc.reps = reps;
    mc.seed = seed;
    mc.threads = threads;
    if (regression) {
      const std::string r(regression);
      if (r == "gls") mc.wavelet_regression = lrd::RegressionKind::gls;
      else if (r == "ols") mc.wavelet_regression = lrd::RegressionKind::ols;
      else lrd::fail(lrd::ErrorCode::parameter, "regression must be 'ols' or 'gls'");
    }
    *out = new lrd_table1{lrd::table1_harness(mc)};
  });
}

void lrd_table1_free(lrd_table1* t) { delete t; }

lrd_status lrd_table1_to_text(const lrd_table1* t, char** out) {
  return guard([&] {
    need(t, "table");
    put_string(out, lrd::table1_to_text(t->report));
  });
}

lrd_status lrd_table1_to_csv(const lrd_table1* t, char** out) {
  return guard([&] {
    need(t, "table");
    put_string(out, lrd::table1_to_csv(t->report));
  });
}

lrd_status lrd_table1_to_json(const lrd_table1* t, char** out) {
  return guard([&] {
    need(t, "table");
    ojson j;
    j["n"] = t->report.n;
    j["reps"] = t->report.reps;
    j["seed"] = t->report.seed;
    auto rows = ojson::array();
    for (const auto& r : t->report.rows)
      rows.push_back({{"H", r.hurst},
                      {"abs_bias_dfa", num(r.bias_dfa)},
                      {"abs_bias_wav", num(r.bias_wav)},
                      {"p_val_dfa", num(r.p_dfa)},
                      {"p_val_wav", num(r.p_wav)},
                      {"rmse_dfa", num(r.rmse_dfa)},
                      {"rmse_wav", num(r.rmse_wav)},
                      {"mean_dfa", num(r.mean_dfa)},
                      {"mean_wav", num(r.mean_wav)},
                      {"failed_dfa", r.failed_dfa},
                      {"failed_wav", r.failed_wav}});
    j["rows"] = rows;
    put_string(out, j.dump(2) + "\n");
  });
}

}  // extern "C"

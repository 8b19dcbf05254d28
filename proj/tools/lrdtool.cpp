// lrdtool: batch front end over the lrd C interface.
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "lrd/lrd.h"

namespace fs = std::filesystem;

namespace {

// Thrown to unwind main with a library status attached.
struct Failure {
  lrd_status status;
  std::string context;
};

void check(lrd_status st, const std::string& context) {
  if (st != LRD_OK) throw Failure{st, context + ": " + lrd_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Series = std::unique_ptr<lrd_series, Deleter<lrd_series, lrd_series_free>>;
using Config = std::unique_ptr<lrd_config, Deleter<lrd_config, lrd_config_free>>;
using Report = std::unique_ptr<lrd_report, Deleter<lrd_report, lrd_report_free>>;

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  lrd_string_free(s);
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{LRD_ERR_IO, "cannot open '" + path.string() + "' for writing"};
  f << text;
  if (!f) throw Failure{LRD_ERR_IO, "write failed for '" + path.string() + "'"};
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{LRD_ERR_IO, "cannot create directory '" + dir + "': " + ec.message()};
}

// Writes text to <out>/<name>, or to stdout when no output directory was given.
void deliver(const std::string& out, const std::string& name, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  ensure_dir(out);
  write_file(fs::path(out) / name, text);
}

const char* const kConfigKeys[] = {
    "min_seg",       "sigma_floor_factor", "elbow_ratio",      "k_max",       "downsample",
    "omega0",        "omega1",             "wavelet_alpha",    "wavelet_beta", "wavelet_kappa",
    "wavelet_width", "scale_count",        "dfa_window_count", "dfa_windows", "regression",
    "gof_level",     "rate_hz",            "rr_min_ms",        "rr_max_ms",   "min_samples"};

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out;
  unsigned threads = 0;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--config", c.config_path, "TOML or JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory (stdout when omitted)");
  cmd->add_option("--threads", c.threads, "Worker threads, 0 for all cores");
  cmd->add_option("--set", c.sets, "Override a config key, key=value");
  for (const char* key : kConfigKeys) {
    std::string flag = std::string("--") + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    cmd->add_option(flag, c.overrides[key], std::string("Override config key ") + key);
  }
}

Config make_config(const Common& c) {
  lrd_config* raw = nullptr;
  if (c.config_path.empty()) check(lrd_config_create(&raw), "config");
  else check(lrd_config_load(c.config_path.c_str(), &raw), "config");
  Config cfg(raw);
  for (const auto& [key, value] : c.overrides)
    if (!value.empty()) check(lrd_config_set(cfg.get(), key.c_str(), value.c_str()), "--" + key);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{LRD_ERR_PARAMETER, "--set expects key=value, got '" + kv + "'"};
    check(lrd_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set");
  }
  if (c.seed) check(lrd_config_set(cfg.get(), "seed", std::to_string(*c.seed).c_str()), "--seed");
  check(lrd_config_set(cfg.get(), "threads", std::to_string(c.threads).c_str()), "--threads");
  return cfg;
}

Series read_input(const std::string& path, const std::string& format, const lrd_config* cfg) {
  lrd_series* s = nullptr;
  size_t dropped = 0;
  check(lrd_series_read(path.c_str(), format.c_str(), cfg, &s, &dropped), path);
  if (dropped > 0) std::cerr << path << ": dropped " << dropped << " RR intervals outside the filter\n";
  return Series(s);
}

std::string config_value(const lrd_config* cfg, const char* key) {
  char* v = nullptr;
  check(lrd_config_get(cfg, key, &v), "config");
  return take(v);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string model = "fgn";
  double hurst = 0.8;
  double sigma = 1.0;
  std::size_t n = 10000;
  double delta = 1.0;
  double h_low = NAN;
  double h_high = NAN;
  std::vector<double> poly;
  std::vector<double> step_levels;
  std::vector<double> step_breaks;
  bool aggregate = false;
};

void run_synth(const Common& c, const SynthArgs& a) {
  const Config cfg = make_config(c);
  const std::uint64_t seed = std::stoull(config_value(cfg.get(), "seed"));
  auto field = [&](const char* key) { return std::stod(config_value(cfg.get(), key)); };

  lrd_series* raw = nullptr;
  if (a.model == "fgn") {
    check(lrd_generate_fgn(a.hurst, a.sigma * a.sigma, a.n, seed, &raw), "synth");
  } else {
    char* warning = nullptr;
    check(lrd_generate_lfgn(a.hurst, a.sigma, field("omega0"), field("omega1"), a.h_low, a.h_high, a.n,
                            a.delta, seed, &raw, &warning),
          "synth");
    const std::string w = take(warning);
    if (!w.empty()) std::cerr << "warning: " << w << "\n";
  }
  Series s(raw);
  if (!a.poly.empty()) {
    check(lrd_add_polynomial_trend(s.get(), a.poly.data(), a.poly.size(), &raw), "trend");
    s.reset(raw);
  }
  if (!a.step_levels.empty()) {
    if (a.step_levels.size() != a.step_breaks.size() + 1)
      throw Failure{LRD_ERR_PARAMETER, "--step-levels needs one more entry than --step-breaks"};
    check(lrd_add_step_trend(s.get(), a.step_levels.data(), a.step_breaks.data(), a.step_breaks.size(),
                             &raw),
          "trend");
    s.reset(raw);
  }
  if (a.aggregate) {
    check(lrd_series_aggregate(s.get(), &raw), "aggregate");
    s.reset(raw);
  }
  char* csv = nullptr;
  check(lrd_series_to_csv(s.get(), &csv), "synth");
  deliver(c.out, "series.csv", take(csv));
}

struct InputArgs {
  std::string input;
  std::string format = "uniform-csv";
};

void run_segment(const Common& c, const InputArgs& in, std::size_t k) {
  const Config cfg = make_config(c);
  const Series s = read_input(in.input, in.format, cfg.get());
  lrd_segmentation* seg = nullptr;
  check(lrd_segment(s.get(), cfg.get(), k, &seg), "segment");
  char* js = nullptr;
  const lrd_status st = lrd_segmentation_to_json(seg, &js);
  lrd_segmentation_free(seg);
  check(st, "segment");
  deliver(c.out, "segments.json", take(js));
}

void run_dfa(const Common& c, const InputArgs& in) {
  const Config cfg = make_config(c);
  const Series s = read_input(in.input, in.format, cfg.get());
  lrd_dfa_result* r = nullptr;
  check(lrd_dfa(s.get(), cfg.get(), &r), "dfa");
  char* js = nullptr;
  char* csv = nullptr;
  lrd_status st = lrd_dfa_to_json(r, &js);
  if (st == LRD_OK) st = lrd_dfa_to_csv(r, &csv);
  lrd_dfa_free(r);
  check(st, "dfa");
  const std::string json = take(js);
  const std::string profile = take(csv);
  deliver(c.out, "dfa.json", json);
  if (!c.out.empty()) deliver(c.out, "dfa.csv", profile);
}

void run_wavelet(const Common& c, const InputArgs& in, const std::string& mode, bool gof, bool suggest,
                 const std::string& json_name) {
  const Config cfg = make_config(c);
  const Series s = read_input(in.input, in.format, cfg.get());
  lrd_wavelet_result* r = nullptr;
  check(lrd_wavelet(s.get(), cfg.get(), mode.c_str(), gof ? 1 : 0, suggest ? 1 : 0, &r), "wavelet");
  char* js = nullptr;
  char* csv = nullptr;
  lrd_status st = lrd_wavelet_to_json(r, &js);
  if (st == LRD_OK) st = lrd_wavelet_to_csv(r, &csv);
  lrd_wavelet_free(r);
  check(st, "wavelet");
  const std::string json = take(js);
  const std::string spectrum = take(csv);
  deliver(c.out, json_name, json);
  if (!c.out.empty()) deliver(c.out, "spectrum.csv", spectrum);
}

// Unique directory names for several subjects, from the file stems.
std::vector<std::string> subject_dirs(const std::vector<std::string>& inputs) {
  std::vector<std::string> names;
  std::set<std::string> used;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::string base = fs::path(inputs[i]).stem().string();
    if (base.empty()) base = "subject";
    std::string name = base;
    for (std::size_t k = 2; used.count(name); ++k) name = base + "_" + std::to_string(k);
    used.insert(name);
    names.push_back(name);
  }
  return names;
}

void run_analyze(const Common& c, const std::vector<std::string>& inputs, const std::string& format) {
  const Config cfg = make_config(c);
  const std::size_t count = inputs.size();
  std::vector<lrd_report*> raw(count, nullptr);
  std::vector<lrd_status> status(count, LRD_OK);
  std::vector<std::string> errors(count);

  // Subjects are independent; each worker fills only its own slots.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(count, c.threads == 0 ? hw : c.threads));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      status[i] = lrd_analyze_file(inputs[i].c_str(), format.c_str(), cfg.get(), &raw[i]);
      if (status[i] != LRD_OK) errors[i] = lrd_last_error();
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<Report> reports;
  for (auto* r : raw) reports.emplace_back(r);
  for (std::size_t i = 0; i < count; ++i)
    if (status[i] != LRD_OK) throw Failure{status[i], inputs[i] + ": " + errors[i]};

  if (c.out.empty()) {
    if (count != 1) throw Failure{LRD_ERR_PARAMETER, "--out is required with several inputs"};
    char* js = nullptr;
    check(lrd_report_to_json(reports[0].get(), &js), "report");
    std::cout << take(js);
    return;
  }
  ensure_dir(c.out);
  if (count == 1) {
    check(lrd_report_emit(reports[0].get(), c.out.c_str()), "emit");
    return;
  }
  const auto names = subject_dirs(inputs);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string dir = (fs::path(c.out) / names[i]).string();
    check(lrd_report_emit(reports[i].get(), dir.c_str()), "emit");
  }
  std::vector<const lrd_report*> ptrs;
  for (const auto& r : reports) ptrs.push_back(r.get());
  char* js = nullptr;
  check(lrd_cohort_to_json(ptrs.data(), ptrs.size(), &js), "cohort");
  write_file(fs::path(c.out) / "cohort.json", take(js));
}

struct Table1Args {
  std::vector<double> h = {0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t n = 10000;
  std::size_t reps = 100;
  std::string regression = "ols";
};

void run_table1(const Common& c, const Table1Args& a) {
  const Config cfg = make_config(c);
  const std::uint64_t seed = std::stoull(config_value(cfg.get(), "seed"));
  lrd_table1* t = nullptr;
  check(lrd_table1_run(a.h.data(), a.h.size(), a.n, a.reps, seed, a.regression.c_str(), c.threads, &t),
        "table1");
  char* text = nullptr;
  char* csv = nullptr;
  char* js = nullptr;
  lrd_status st = lrd_table1_to_text(t, &text);
  if (st == LRD_OK) st = lrd_table1_to_csv(t, &csv);
  if (st == LRD_OK) st = lrd_table1_to_json(t, &js);
  lrd_table1_free(t);
  check(st, "table1");
  const std::string txt = take(text);
  const std::string table = take(csv);
  const std::string json = take(js);
  deliver(c.out, "table1.txt", txt);
  if (!c.out.empty()) {
    deliver(c.out, "table1.csv", table);
    deliver(c.out, "table1.json", json);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-range dependence analysis: synthesis, change points, DFA and wavelet estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lrd_version()));

  Common common;
  InputArgs input;

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate FGN or lfGN samples as CSV");
  add_common(cmd_synth, common);
  cmd_synth->add_option("--model", synth.model, "fgn or lfgn")->check(CLI::IsMember({"fgn", "lfgn"}));
  cmd_synth->add_option("--hurst", synth.hurst, "Hurst or local fractality parameter");
  cmd_synth->add_option("--sigma", synth.sigma, "Scale (FGN standard deviation or lfGN sigma)");
  cmd_synth->add_option("-n,--samples", synth.n, "Number of samples");
  cmd_synth->add_option("--delta", synth.delta, "Sampling step (lfGN)");
  cmd_synth->add_option("--h-low", synth.h_low, "Exponent continued below the band (lfGN)");
  cmd_synth->add_option("--h-high", synth.h_high, "Exponent continued above the band (lfGN)");
  cmd_synth->add_option("--poly-trend", synth.poly, "Polynomial trend coefficients on u = i/n")->delimiter(',');
  cmd_synth->add_option("--step-levels", synth.step_levels, "Piecewise constant trend levels")->delimiter(',');
  cmd_synth->add_option("--step-breaks", synth.step_breaks, "Break positions in (0, 1)")->delimiter(',');
  cmd_synth->add_flag("--aggregate", synth.aggregate, "Write the cumulative sum instead");

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("-i,--input", input.input, "Input file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", input.format, "uniform-csv or rr-ms")
        ->check(CLI::IsMember({"uniform-csv", "rr-ms"}));
  };

  std::size_t seg_k = 0;
  auto* cmd_segment = app.add_subcommand("segment", "Detect changes in mean and variance");
  add_common(cmd_segment, common);
  add_input(cmd_segment);
  cmd_segment->add_option("-k,--segments", seg_k, "Force this many segments (0 selects K)");

  auto* cmd_dfa = app.add_subcommand("dfa", "Detrended fluctuation analysis");
  add_common(cmd_dfa, common);
  add_input(cmd_dfa);

  std::string mode = "lrd";
  bool want_gof = false;
  bool want_suggest = false;
  auto* cmd_wavelet = app.add_subcommand("wavelet", "Wavelet scale-spectrum estimate");
  add_common(cmd_wavelet, common);
  add_input(cmd_wavelet);
  cmd_wavelet->add_option("--mode", mode, "lrd, selfsimilar or band")
      ->check(CLI::IsMember({"lrd", "selfsimilar", "band"}));
  cmd_wavelet->add_flag("--gof", want_gof, "Attach the chi-squared goodness-of-fit test");
  cmd_wavelet->add_flag("--suggest", want_suggest, "Scan a wide scale range and suggest a band");

  std::string gof_mode = "band";
  auto* cmd_gof = app.add_subcommand("gof", "Chi-squared goodness of fit of the wavelet regression");
  add_common(cmd_gof, common);
  add_input(cmd_gof);
  cmd_gof->add_option("--mode", gof_mode, "lrd, selfsimilar or band")
      ->check(CLI::IsMember({"lrd", "selfsimilar", "band"}));

  std::vector<std::string> analyze_inputs;
  auto* cmd_analyze = app.add_subcommand("analyze", "Full pipeline on one or more recordings");
  add_common(cmd_analyze, common);
  cmd_analyze->add_option("-i,--input", analyze_inputs, "Input files, one per subject")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_analyze->add_option("--format", input.format, "uniform-csv or rr-ms")
      ->check(CLI::IsMember({"uniform-csv", "rr-ms"}));

  Table1Args table1;
  auto* cmd_table1 = app.add_subcommand("table1", "Monte Carlo comparison of DFA and wavelet estimates");
  add_common(cmd_table1, common);
  cmd_table1->add_option("--hurst", table1.h, "H values")->delimiter(',');
  cmd_table1->add_option("-n,--samples", table1.n, "Samples per replicate");
  cmd_table1->add_option("--reps", table1.reps, "Replicates per H");
  cmd_table1->add_option("--wavelet-regression", table1.regression, "ols or gls")
      ->check(CLI::IsMember({"ols", "gls"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_synth->parsed()) run_synth(common, synth);
    else if (cmd_segment->parsed()) run_segment(common, input, seg_k);
    else if (cmd_dfa->parsed()) run_dfa(common, input);
    else if (cmd_wavelet->parsed()) run_wavelet(common, input, mode, want_gof, want_suggest, "wavelet.json");
    else if (cmd_gof->parsed()) run_wavelet(common, input, gof_mode, true, false, "gof.json");
    else if (cmd_analyze->parsed()) run_analyze(common, analyze_inputs, input.format);
    else if (cmd_table1->parsed()) run_table1(common, table1);
  } catch (const Failure& f) {
    std::cerr << "lrdtool: " << lrd_status_name(f.status) << ": " << f.context << "\n";
    return lrd_exit_code(f.status);
  }
  return 0;
}

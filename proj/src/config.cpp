#include "lrd/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "format.hpp"
#include "json.hpp"
#include "lrd/error.hpp"

namespace lrd {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
    fail(ErrorCode::parameter, "config key '" + key + "': '" + text + "' is not a finite number");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(ErrorCode::parameter, "config key '" + key + "': '" + text + "' is not a non-negative integer");
  return v;
}

std::vector<std::size_t> to_list(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
  std::vector<std::size_t> out;
  if (trim(t).empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<std::size_t>(to_unsigned(key, item)));
  return out;
}

std::string unquote(const std::string& s) {
  std::string t = trim(s);
  if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') || (t.front() == '\'' && t.back() == '\'')))
    return t.substr(1, t.size() - 2);
  return t;
}

}  // namespace

void AnalysisConfig::validate() const {
  changepoint.validate();
  wavelet.validate();
  require(band.omega0 > 0.0 && band.omega1 > band.omega0, ErrorCode::parameter,
          "band edges must satisfy 0 < omega0 < omega1");
  require(scale_count >= 3, ErrorCode::parameter, "scale_count must be at least 3");
  require(dfa_window_count >= 3, ErrorCode::parameter, "dfa_window_count must be at least 3");
  for (std::size_t i = 0; i < dfa_windows.size(); ++i) {
    require(dfa_windows[i] >= 4, ErrorCode::parameter, "DFA windows must be at least 4");
    require(i == 0 || dfa_windows[i] > dfa_windows[i - 1], ErrorCode::parameter,
            "DFA windows must be strictly increasing");
  }
  require(gof_level > 0.0 && gof_level < 1.0, ErrorCode::parameter, "gof_level must lie in (0, 1)");
  require(rate_hz > 0.0, ErrorCode::parameter, "rate_hz must be positive");
  require(rr_min_ms > 0.0 && rr_max_ms > rr_min_ms, ErrorCode::parameter,
          "RR filter needs 0 < rr_min_ms < rr_max_ms");
}

void AnalysisConfig::set(const std::string& key, const std::string& value) {
  if (key == "min_seg") changepoint.min_seg = to_unsigned(key, value);
  else if (key == "sigma_floor_factor") changepoint.sigma_floor_factor = to_double(key, value);
  else if (key == "elbow_ratio") changepoint.elbow_ratio = to_double(key, value);
  else if (key == "k_max") changepoint.k_max = to_unsigned(key, value);
  else if (key == "downsample") changepoint.downsample = to_unsigned(key, value);
  else if (key == "omega0") band.omega0 = to_double(key, value);
  else if (key == "omega1") band.omega1 = to_double(key, value);
  else if (key == "wavelet_alpha") wavelet.alpha = to_double(key, value);
  else if (key == "wavelet_beta") wavelet.beta = to_double(key, value);
  else if (key == "wavelet_kappa") wavelet.kappa = to_double(key, value);
  else if (key == "wavelet_width") wavelet.width = to_double(key, value);
  else if (key == "scale_count") scale_count = to_unsigned(key, value);
  else if (key == "dfa_window_count") dfa_window_count = to_unsigned(key, value);
  else if (key == "dfa_windows") dfa_windows = to_list(key, value);
  else if (key == "regression") {
    const std::string v = unquote(value);
    if (v == "ols") regression = RegressionKind::ols;
    else if (v == "gls") regression = RegressionKind::gls;
    else fail(ErrorCode::parameter, "config key 'regression' must be 'ols' or 'gls'");
  } else if (key == "gof_level") gof_level = to_double(key, value);
  else if (key == "rate_hz") rate_hz = to_double(key, value);
  else if (key == "rr_min_ms") rr_min_ms = to_double(key, value);
  else if (key == "rr_max_ms") rr_max_ms = to_double(key, value);
  else if (key == "min_samples") min_samples = to_unsigned(key, value);
  else if (key == "seed") seed = to_unsigned(key, value);
  else if (key == "threads") threads = static_cast<unsigned>(to_unsigned(key, value));
  else fail(ErrorCode::parameter, "unknown config key '" + key + "'");
}

std::string AnalysisConfig::to_json() const {
  nlohmann::ordered_json j;
  j["min_seg"] = changepoint.min_seg;
  j["sigma_floor_factor"] = changepoint.sigma_floor_factor;
  j["elbow_ratio"] = changepoint.elbow_ratio;
  j["k_max"] = changepoint.k_max;
  j["downsample"] = changepoint.downsample;
  j["omega0"] = band.omega0;
  j["omega1"] = band.omega1;
  j["wavelet_alpha"] = wavelet.alpha;
  j["wavelet_beta"] = wavelet.beta;
  j["wavelet_kappa"] = wavelet.kappa;
  j["wavelet_width"] = wavelet.width;
  j["scale_count"] = scale_count;
  j["dfa_window_count"] = dfa_window_count;
  j["dfa_windows"] = dfa_windows;
  j["regression"] = regression == RegressionKind::gls ? "gls" : "ols";
  j["gof_level"] = gof_level;
  j["rate_hz"] = rate_hz;
  j["rr_min_ms"] = rr_min_ms;
  j["rr_max_ms"] = rr_max_ms;
  j["min_samples"] = min_samples;
  j["seed"] = seed;
  return j.dump();
}

AnalysisConfig parse_config(const std::string& text, const std::string& origin) {
  AnalysisConfig cfg;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse, origin + ": invalid JSON: " + e.what());
    }
    require(j.is_object(), ErrorCode::parse, origin + ": config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      std::string v;
      if (value.is_string()) v = value.get<std::string>();
      else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) v += (i ? "," : "") + value[i].dump();
      } else if (value.is_number() || value.is_boolean()) v = value.dump();
      else fail(ErrorCode::parse, origin + ": unsupported value for key '" + key + "'");
      cfg.set(key, v);
    }
  } else {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty() || line.front() == '[') {
        // Table headers are accepted and ignored: all keys are flat.
        if (!line.empty() && line.back() != ']')
          fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": malformed table header");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = unquote(line.substr(eq + 1));
      try {
        cfg.set(key, value);
      } catch (const Error& e) {
        fail(e.code(), origin + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

AnalysisConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path), path);
}

}  // namespace lrd

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run lrdtool(const std::string& args) {
  const std::string cmd = std::string(LRDTOOL_PATH) + " " + args + " 2>/dev/null";
  Run r;
  std::FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("lrd_test_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("usage errors") {
  CHECK(lrdtool("").code == 1);
  CHECK(lrdtool("frobnicate").code == 1);
  CHECK(lrdtool("synth --hurst").code == 1);
  CHECK(lrdtool("--help").code == 0);
  CHECK(lrdtool("synth --help").code == 0);
  CHECK_FALSE(lrdtool("--version").out.empty());
}

TEST_CASE("synth") {
  const auto a = lrdtool("synth --hurst 0.7 -n 100 --seed 4");
  REQUIRE(a.code == 0);
  CHECK(a.out.rfind("t,value\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 101);
  CHECK(lrdtool("synth --hurst 0.7 -n 100 --seed 4").out == a.out);
  CHECK(lrdtool("synth --hurst 0.7 -n 100 --seed 5").out != a.out);
  CHECK(lrdtool("synth --hurst 1.5 -n 100").code == 1);
  CHECK(lrdtool("synth --model lfgn --hurst 1.2 -n 2048 --delta 0.25 --seed 2").code == 0);
  CHECK(lrdtool("synth --model lfgn --hurst 1.2 -n 64 --omega0 3 --omega1 1").code == 1);
  CHECK(lrdtool("synth --step-levels 0,1 -n 100").code == 1);
  CHECK(lrdtool("synth --set bogus=1 -n 100").code == 1);

  TempDir d("synth");
  REQUIRE(lrdtool("synth --hurst 0.7 -n 100 --seed 4 --out " + d.path.string()).code == 0);
  CHECK(slurp(d / "series.csv") == a.out);
}

TEST_CASE("single-stage commands") {
  TempDir d("stages");
  REQUIRE(lrdtool("synth --hurst 0.8 -n 4096 --seed 7 --out " + d.path.string()).code == 0);
  const std::string in = " -i " + (d / "series.csv");

  const auto seg = lrdtool("segment -k 2" + in);
  REQUIRE(seg.code == 0);
  CHECK(nlohmann::json::parse(seg.out)["K"] == 2);

  const auto dfa = lrdtool("dfa" + in);
  REQUIRE(dfa.code == 0);
  CHECK(nlohmann::json::parse(dfa.out)["estimate"].contains("h_hat"));

  const auto wav = lrdtool("wavelet --mode lrd --gof" + in);
  REQUIRE(wav.code == 0);
  const auto wj = nlohmann::json::parse(wav.out);
  CHECK(wj["estimate"]["gof"].contains("p_value"));

  const auto gof = lrdtool("gof --mode lrd" + in);
  REQUIRE(gof.code == 0);
  CHECK(nlohmann::json::parse(gof.out)["estimate"].contains("gof"));

  const fs::path out = d.path / "w";
  REQUIRE(lrdtool("wavelet --mode lrd --suggest --out " + out.string() + in).code == 0);
  CHECK(fs::exists(out / "wavelet.json"));
  CHECK(slurp(out / "spectrum.csv").rfind("a,log_a,S,log_S,count\n", 0) == 0);

  CHECK(lrdtool("dfa -i /nonexistent.csv").code == 1);
  CHECK(lrdtool("wavelet --mode spectral" + in).code == 1);
  CHECK(lrdtool("segment -k 5000" + in).code == 1);

  {
    std::ofstream bad(d / "bad.csv");
    bad << "t,value\n0,1\n1,oops\n";
  }
  CHECK(lrdtool("dfa -i " + (d / "bad.csv")).code == 2);
  {
    std::ofstream flat(d / "flat.csv");
    flat << "t,value\n";
    for (int i = 0; i < 500; ++i) flat << i << ",3\n";
  }
  CHECK(lrdtool("dfa -i " + (d / "flat.csv")).code == 3);
}

TEST_CASE("analyze") {
  TempDir d("analyze");
  REQUIRE(lrdtool("synth --model lfgn --hurst 1.2 -n 3000 --seed 1 --step-levels 0,3 --step-breaks 0.5 --out " +
                  d.path.string())
              .code == 0);
  fs::rename(d.path / "series.csv", d.path / "a.csv");
  REQUIRE(lrdtool("synth --model lfgn --hurst 1.2 -n 3000 --seed 2 --out " + d.path.string()).code == 0);
  fs::rename(d.path / "series.csv", d.path / "b.csv");

  const auto one = lrdtool("analyze -i " + (d / "a.csv"));
  REQUIRE(one.code == 0);
  const auto j = nlohmann::json::parse(one.out);
  CHECK(j["subject"] == "a");
  CHECK(j["config"]["omega0"] == 0.2);

  const auto out = d.path / "cohort";
  REQUIRE(lrdtool("analyze -i " + (d / "a.csv") + " -i " + (d / "b.csv") + " --out " + out.string()).code == 0);
  CHECK(fs::exists(out / "cohort.json"));
  CHECK(fs::exists(out / "a" / "report.json"));
  CHECK(fs::exists(out / "b" / "summary.txt"));
  CHECK(slurp(out / "a" / "report.json") == one.out);

  CHECK(lrdtool("analyze -i " + (d / "a.csv") + " --omega1 0.1").code == 1);
  {
    std::ofstream rr(d / "bad.rr");
    for (int i = 0; i < 50; ++i) rr << (i % 3 ? 5000 : 600) << "\n";
  }
  CHECK(lrdtool("analyze --format rr-ms -i " + (d / "bad.rr")).code == 2);
  {
    std::ofstream cfg(d / "c.toml");
    cfg << "k_max = 3\nbogus = 2\n";
  }
  CHECK(lrdtool("analyze --config " + (d / "c.toml") + " -i " + (d / "a.csv")).code == 1);
}

TEST_CASE("table1") {
  TempDir d("table1");
  REQUIRE(lrdtool("table1 --hurst 0.6 0.8 -n 2048 --reps 10 --seed 3 --threads 1 --out " + (d / "t1")).code == 0);
  REQUIRE(lrdtool("table1 --hurst 0.6 0.8 -n 2048 --reps 10 --seed 3 --threads 2 --out " + (d / "t2")).code == 0);
  for (const char* f : {"table1.txt", "table1.csv", "table1.json"}) {
    CHECK(fs::exists(d.path / "t1" / f));
    CHECK(slurp(d.path / "t1" / f) == slurp(d.path / "t2" / f));
  }
  CHECK(lrdtool("table1 --reps 3").code == 1);
  CHECK(lrdtool("table1 --wavelet-regression wls --reps 10 -n 1000").code == 1);
}

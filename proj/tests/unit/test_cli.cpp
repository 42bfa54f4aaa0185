#include "support.hpp"

#include <doctest.h>
#include <specband/cli.hpp>

#include <fstream>
#include <iterator>
#include <sstream>

using namespace specband;
namespace ts = testsupport;
namespace fs = std::filesystem;

namespace {

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "specband");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("band sets") {
  const auto d6 = cli::parse_band_set("default6", FrequencyUnit::radians);
  REQUIRE(d6.size() == 6);
  CHECK(d6[0] == Band::cycles(0.0, 0.08));
  CHECK(d6[5] == Band::cycles(0.40, 0.48));
  for (std::size_t i = 1; i < 6; ++i) CHECK(d6[i].lo == d6[i - 1].hi);
  const auto neuro = cli::parse_band_set("neuro", FrequencyUnit::radians);
  REQUIRE(neuro.size() == 4);
  CHECK(neuro[0] == Band::hertz(4, 8));
  CHECK(neuro[1] == Band::hertz(8, 12));
  CHECK(neuro[2] == Band::hertz(12, 30));
  CHECK(neuro[3] == Band::hertz(30, 50));
  const auto custom = cli::parse_band_set("0:0.5,0.5:1.5", FrequencyUnit::radians);
  CHECK(custom.size() == 2);
  CHECK(custom[1] == Band::radians(0.5, 1.5));
  CHECK_THROWS_AS(cli::parse_band_set("0-1", FrequencyUnit::radians), Error);
  CHECK_THROWS_AS(cli::parse_band_set("0:x", FrequencyUnit::radians), Error);
  CHECK_NOTHROW(cli::check_partition(d6, 1.0));
  CHECK_THROWS_AS(cli::check_partition(cli::parse_band_set("0:1,0.5:2", FrequencyUnit::radians), 1.0),
                  Error);
}

TEST_CASE("kernel resolution") {
  cli::KernelOptions k;
  CHECK(k.resolve(1000, 500).span() == 32);
  k.rule = BandwidthRule::epoch_count;
  CHECK(k.resolve(1000, 500).span() == 23);
  k.type = KernelType::bartlett_priestley;
  CHECK(k.resolve(1000, 500).bandwidth(1000) == doctest::Approx(std::pow(500.0, -0.4)));
  k.bandwidth = 0.3;
  CHECK(k.resolve(1000, 500).bandwidth(1000) == 0.3);
}

TEST_CASE("simulate -> fsratio -> report pipeline") {
  const auto root = ts::scratch_dir("cli_pipeline");
  const auto d = root / "d";
  const auto r = root / "r";
  REQUIRE(invoke({"simulate", "--scheme", "s1", "--seed", "7", "--epochs", "500", "--length", "256",
                  "--out", d.string(), "--threads", "2"}) == 0);
  CHECK(fs::exists(d / "manifest.json"));
  CHECK(fs::exists(d / "epoch_0500.csv"));
  REQUIRE(invoke({"fsratio", "--in", (d / "manifest.json").string(), "--bands", "default6", "--out",
                  r.string(), "--threads", "3"}) == 0);
  const auto rows = lines(r / "fsratio.csv");
  CHECK(rows.front() == "epoch_id,band_lo,band_hi,unit,ratio,ci_lower,ci_upper");
  CHECK(rows.size() == 1 + 6 * 500);
  CHECK(rows[1].rfind("1,0,0.08,cycles,", 0) == 0);
  CHECK(lines(r / "fsratio_band_0.4_0.48.csv").size() == 501);
  CHECK(fs::exists(r / "run.json"));
  CHECK(slurp(r / "run.json").find("\"changepoint\": 250") != std::string::npos);

  REQUIRE(invoke({"report", "--in", r.string(), "--split", "249"}) == 0);
  const auto pre = lines(r / "summary_pre.csv");
  const auto post = lines(r / "summary_post.csv");
  CHECK(pre.size() == 7);
  CHECK(post.size() == 7);
  CHECK(pre[0] == "band_lo,band_hi,unit,count,mean,median,sd,ci_lower,ci_upper,ci_source");
  CHECK(pre[1].rfind("0,0.08,cycles,249,", 0) == 0);
  CHECK(post[1].rfind("0,0.08,cycles,251,", 0) == 0);

  // rerun with the same config: byte-identical CSV
  const auto r2 = root / "r2";
  REQUIRE(invoke({"fsratio", "--in", (d / "manifest.json").string(), "--bands", "default6", "--out",
                  r2.string(), "--threads", "1"}) == 0);
  CHECK(slurp(r / "fsratio.csv") == slurp(r2 / "fsratio.csv"));
  const auto d2 = root / "d2";
  REQUIRE(invoke({"simulate", "--scheme", "s1", "--seed", "7", "--epochs", "500", "--length", "256",
                  "--out", d2.string()}) == 0);
  CHECK(slurp(d / "epoch_0123.csv") == slurp(d2 / "epoch_0123.csv"));
}

TEST_CASE("bootstrap through the cli is reproducible") {
  const auto root = ts::scratch_dir("cli_boot");
  const auto d = root / "d";
  REQUIRE(invoke({"simulate", "--scheme", "ex21a", "--seed", "1", "--epochs", "4", "--length", "128",
                  "--out", d.string()}) == 0);
  for (const char* out : {"a", "b"}) {
    REQUIRE(invoke({"fsratio", "--in", (d / "manifest.json").string(), "--bands", "0:0.3,0.3:3.14159",
                    "--unit", "radians", "--bootstrap", "50", "--seed", "5", "--block", "auto",
                    "--out", (root / out).string()}) == 0);
  }
  CHECK(slurp(root / "a" / "fsratio.csv") == slurp(root / "b" / "fsratio.csv"));
  const auto rows = lines(root / "a" / "fsratio.csv");
  CHECK(rows[1].back() != ',');
}

TEST_CASE("seed falls back to SPECBAND_SEED") {
  const auto root = ts::scratch_dir("cli_env");
  setenv("SPECBAND_SEED", "42", 1);
  REQUIRE(invoke({"simulate", "--scheme", "s2", "--epochs", "2", "--length", "64", "--out",
                  (root / "a").string()}) == 0);
  unsetenv("SPECBAND_SEED");
  REQUIRE(invoke({"simulate", "--scheme", "s2", "--epochs", "2", "--length", "64", "--seed", "42",
                  "--out", (root / "b").string()}) == 0);
  CHECK(slurp(root / "a" / "epoch_0001.csv") == slurp(root / "b" / "epoch_0001.csv"));
  CHECK(slurp(root / "a" / "run.json").find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("eqtest and coherence commands") {
  const auto root = ts::scratch_dir("cli_eq");
  const auto d = root / "d";
  REQUIRE(invoke({"simulate", "--scheme", "s3", "--no-truncate", "--seed", "3", "--epochs", "4",
                  "--length", "256", "--out", d.string()}) == 0);
  REQUIRE(invoke({"eqtest", "--in", (d / "manifest.json").string(), "--bands", "0:1.5", "--unit",
                  "radians", "--out", (root / "e").string()}) == 0);
  const auto eq = lines(root / "e" / "eqtest.csv");
  CHECK(eq[0] == "epoch_i,epoch_j,band_lo,band_hi,unit,d_hat,z,p_value");
  CHECK(eq.size() == 4);
  REQUIRE(invoke({"coherence", "--in", (d / "manifest.json").string(), "--bands", "default6",
                  "--prewhiten", "--out", (root / "c").string()}) == 0);
  CHECK(lines(root / "c" / "coherence_default6.csv").size() == 1 + 4 * 6);
  CHECK(lines(root / "c" / "coherence_default6_prewhitened.csv")[0] ==
        "epoch_id,band_lo,band_hi,unit,mean_offdiag_coherence");
}

TEST_CASE("failures print one line and remove partial outputs") {
  const auto root = ts::scratch_dir("cli_fail");
  const auto d = root / "d";
  REQUIRE(invoke({"simulate", "--scheme", "s1", "--seed", "1", "--epochs", "3", "--length", "64",
                  "--out", d.string()}) == 0);

  cli::RunConfig c;
  c.command = cli::Command::fsratio;
  c.input = d / "manifest.json";
  c.output = root / "out";
  c.bands = {Band::cycles(0.0, 0.2), Band::cycles(0.1, 0.3)};
  c.partition_check = true;
  std::ostringstream err;
  CHECK(cli::run(c, err) == 1);
  const std::string msg = err.str();
  CHECK(msg.rfind("specband: error: kind=InvalidBand message=\"", 0) == 0);
  CHECK(std::count(msg.begin(), msg.end(), '\n') == 1);
  CHECK_FALSE(fs::exists(root / "out"));

  // a failure after some files were written: pre-existing files survive
  fs::create_directories(root / "keep");
  std::ofstream(root / "keep" / "mine.txt") << "x";
  c.output = root / "keep";
  c.partition_check = false;
  c.bands = {Band::cycles(0.0, 0.2)};
  c.dump_spectrum = true;
  std::ofstream(d / "epoch_0003.csv") << "1\n2\nfoo\n4\n5\n";
  std::ostringstream err2;
  CHECK(cli::run(c, err2) == 1);
  CHECK(err2.str().find("kind=ParseError") != std::string::npos);
  CHECK(fs::exists(root / "keep" / "mine.txt"));
  CHECK(std::distance(fs::directory_iterator(root / "keep"), fs::directory_iterator{}) == 1);

  CHECK(invoke({"fsratio", "--in", "/nonexistent/manifest.json", "--out", (root / "x").string()}) == 1);
  CHECK_FALSE(fs::exists(root / "x"));
  CHECK(invoke({"simulate", "--scheme", "s9", "--out", (root / "y").string()}) == 1);
}

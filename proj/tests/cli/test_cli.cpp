#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "curlgap/errors.hpp"
#include "curlgap/radial_spectrum.hpp"

using namespace curlgap;
using namespace curlgap::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("curlgap_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string out_arg() const { return "output_dir=\"" + path_.string() + "\""; }

 private:
  fs::path path_;
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  return json::parse(in);
}

std::vector<std::string> lines_of(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST(Config, DefaultsParse) {
  const RunConfig c = parse_config(default_config());
  EXPECT_EQ(c.band_count, 8u);
  EXPECT_EQ(c.problem.mode, Mode::focusing);
  EXPECT_EQ(c.grid.nr, 64u);
}

TEST(Config, OverridesAndMerging) {
  json doc = default_config();
  apply_override(doc, "grid.nr=32");
  apply_override(doc, "problem.mode=defocusing");
  apply_override(doc, "periodic.values=[1, 2]");
  EXPECT_EQ(doc["grid"]["nr"], 32);
  EXPECT_EQ(doc["problem"]["mode"], "defocusing");
  EXPECT_EQ(doc["periodic"]["values"], json::array({1, 2}));
  merge_into(doc, json::parse(R"({"problem": {"gamma": {"type": "power", "coefficient": -1, "exponent": 3}}})"));
  EXPECT_FALSE(doc["problem"]["gamma"].contains("value"));
  EXPECT_EQ(doc["problem"]["p"], 3.0);
  const RunConfig c = parse_config(doc);
  EXPECT_EQ(c.problem.gamma.kind, GammaSpec::Kind::power);
  EXPECT_DOUBLE_EQ(c.problem.gamma.sampler()(3.0, 4.0), -216.0);
}

TEST(Config, RejectsMalformedDocuments) {
  for (const char* bad : {"grid.nr=0", "grid.r_max=-1", "bogus=1", "problem.mode=sideways", "problem.gamma.type=wavy",
                          "periodic.breakpoints=[0.2, 0.5]", "bands.count=\"eight\""}) {
    json doc = default_config();
    apply_override(doc, bad);
    EXPECT_THROW(parse_config(doc), ConfigError) << bad;
  }
  json doc = default_config();
  EXPECT_THROW(apply_override(doc, "no_equals_sign"), ConfigError);
}

TEST(Cli, UsageAndConfigErrorsExitOne) {
  EXPECT_EQ(invoke({}).code, kConfigError);
  EXPECT_EQ(invoke({"transmogrify"}).code, kConfigError);
  EXPECT_EQ(invoke({"bands", "--set", "grid.nr=0"}).code, kConfigError);
  EXPECT_EQ(invoke({"bands", "-c", "/nonexistent/config.json"}).code, kConfigError);
  const auto help = invoke({"--help"});
  EXPECT_EQ(help.code, kOk);
  EXPECT_NE(help.out.find("groundstate"), std::string::npos);
}

TEST(Cli, BandsReportsFirstGap) {
  TempDir dir;
  const auto r = invoke({"bands", "--set", dir.out_arg()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("nu1=4.48546682"), std::string::npos);
  const auto rows = lines_of(dir.path() / "bands.csv");
  EXPECT_EQ(rows.size(), 9u);
  EXPECT_TRUE(read_json(dir.path() / "bands_report.json").is_object());
}

TEST(Cli, RequireGapOnClosedGapExitsTwo) {
  TempDir dir;
  const auto r = invoke({"bands", "--require-gap", "--set", "periodic.values=[0.0, 0.0]", "--set", dir.out_arg()});
  EXPECT_EQ(r.code, kHypothesisViolation);
  EXPECT_EQ(invoke({"bands", "--set", "periodic.values=[0.0, 0.0]", "--set", dir.out_arg()}).code, kOk);
}

TEST(Cli, ChainViolationNamesInequality) {
  TempDir dir;
  const auto r = invoke({"design", "--set", "radial_design.winf=-10", "--set", dir.out_arg()});
  EXPECT_EQ(r.code, kHypothesisViolation);
  EXPECT_NE(r.err.find("-nu1 < W_inf"), std::string::npos) << r.err;
}

TEST(Cli, GammaSignMismatchExitsTwo) {
  TempDir dir;
  const auto r = invoke({"groundstate", "--set", "problem.mode=defocusing", "--set", "problem.potential.value=-1",
                         "--set", "grid.nr=16", "--set", "grid.nz=16", "--set", dir.out_arg()});
  EXPECT_EQ(r.code, kHypothesisViolation);
  EXPECT_NE(r.err.find("hypothesis violated"), std::string::npos);
}

TEST(Cli, DesignThenSpectrumRoundTrip) {
  TempDir dir;
  const auto d = invoke({"design", "--set", dir.out_arg()});
  ASSERT_EQ(d.code, kOk) << d.err;
  const json cert = read_json(dir.path() / "certificate.json");
  EXPECT_GT(cert.at("margin").get<double>(), 0.0);
  for (const auto& h : cert.at("chain").at("holds")) EXPECT_TRUE(h.get<bool>());

  const auto s = invoke({"spectrum", "--set", dir.out_arg()});
  ASSERT_EQ(s.code, kOk) << s.err;
  const json spec = read_json(dir.path() / "spectrum.json");
  EXPECT_NEAR(spec.at("certificate").at("margin").get<double>(), cert.at("margin").get<double>(), 1e-10);
  const auto values = cert.at("chain").at("values").get<std::vector<double>>();
  EXPECT_NEAR(spec.at("mu0").get<double>(), values[1], 1e-10);
  EXPECT_NEAR(spec.at("spectrum").at("tail").get<double>(), values[4] - values[3], 1e-10);

  const auto pot = read_potential_file(dir.path() / "potential.json");
  EXPECT_TRUE(pot.radial.single_eigenvalue_condition());
  EXPECT_EQ(pot.periodic.breakpoints(), (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(pot.periodic.values(), (std::vector<double>{0.0, 10.0}));
}

TEST(Cli, SpectrumRejectsMalformedPotentialFile) {
  TempDir dir;
  std::ofstream(dir.path() / "potential.json") << "{\"periodic\": {}}";
  EXPECT_EQ(invoke({"spectrum", "--set", dir.out_arg()}).code, kConfigError);
  EXPECT_EQ(invoke({"spectrum", "--set", "spectrum.potential_file=\"/nonexistent.json\"", "--set", dir.out_arg()}).code,
            kConfigError);
}

TEST(Cli, CurvesTableHasPoleGapsAndOneCrossing) {
  TempDir dir;
  const auto r = invoke({"curves", "--set", "curves.samples=4000", "--set", dir.out_arg()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = lines_of(dir.path() / "curves.csv");
  ASSERT_EQ(rows.size(), 4001u);
  EXPECT_EQ(rows[0], "mu,g,h");
  std::size_t empty_g = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto first = rows[k].find(',');
    const auto second = rows[k].find(',', first + 1);
    if (second == first + 1) ++empty_g;
    EXPECT_LT(second + 1, rows[k].size()) << "h missing in row " << k;
  }
  const double jp1 = 1.8411837813406593;
  const std::size_t poles_below = 20.0 > jp1 * jp1 ? 1 : 0;
  EXPECT_EQ(empty_g, poles_below);
  const json rep = read_json(dir.path() / "curves_report.json");
  EXPECT_EQ(rep.at("crossings_between_pole_and_zero").get<int>(), 1);
  EXPECT_NEAR(rep.at("eigenvalue").get<double>(), radial_eigenvalue(StepRadialPotential(0.0, 20.0, 1.0)), 1e-12);
}

TEST(Cli, FocusingDemoWritesArtifacts) {
  TempDir dir;
  const auto r = invoke({"groundstate", "--set", "grid.nr=24", "--set", "grid.nz=24", "--set", "solver.random_starts=1",
                         "--set", dir.out_arg()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json res = read_json(dir.path() / "result.json");
  EXPECT_EQ(res.at("mode"), "focusing");
  EXPECT_GT(res.at("energy").get<double>(), 0.0);
  EXPECT_TRUE(res.at("nontrivial").get<bool>());
  EXPECT_EQ(lines_of(dir.path() / "field.csv").size(), 24u * 24u + 1u);
  const json grid = read_json(dir.path() / "grid.json");
  EXPECT_EQ(grid.at("nr").get<int>(), 24);
}

TEST(Cli, DefocusingDemoWritesArtifacts) {
  TempDir dir;
  const auto r = invoke({"groundstate", "--set", "problem.mode=defocusing", "--set", "problem.p=2", "--set",
                         "problem.potential.value=-1", "--set",
                         R"(problem.gamma={"type": "power", "coefficient": -1, "exponent": 3})", "--set", "grid.nr=32",
                         "--set", "grid.nz=32", "--set", dir.out_arg()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json res = read_json(dir.path() / "result.json");
  EXPECT_EQ(res.at("mode"), "defocusing");
  EXPECT_LT(res.at("energy").get<double>(), 0.0);
  EXPECT_TRUE(res.at("nontrivial").get<bool>());
}

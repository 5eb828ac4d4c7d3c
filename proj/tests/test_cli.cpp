#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "testing.hpp"

namespace fs = std::filesystem;
using widthlab::testing::fixture_path;

namespace {

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = widthlab::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("widthlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& sub = "out") const { return (dir_ / sub).string(); }
  std::string write_config(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

int significant_digits(const std::string& field) {
  std::string mant = field.substr(0, field.find_first_of("eE"));
  std::string digits;
  for (char c : mant)
    if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
  const auto first = digits.find_first_not_of('0');
  return first == std::string::npos ? 1 : static_cast<int>(digits.size() - first);
}

}  // namespace

TEST_F(CliTest, WidthOfTheEllipse) {
  const CliRun r = run({"width", fixture_path("ellipse"), "--out", out()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("S = 2.0000"), std::string::npos) << r.out;
  const std::string csv = slurp(fs::path(out()) / "sweepout.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,x,y,i,j,s1,s2,distance");
}

TEST_F(CliTest, JsonOutputParses) {
  const CliRun r = run({"width", "--config", fixture_path("circle"), "--out", out(), "--json", "--grid", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["grid"], 64);
  EXPECT_NEAR(j["S"].get<double>(), 2.0, 1e-3);
}

TEST_F(CliTest, GoldenSweepout) {
  ASSERT_EQ(run({"width", fixture_path("circle"), "--grid", "16", "--out", out()}).code, 0);
  const std::string golden = slurp(fs::path(WIDTHLAB_GOLDEN) / "circle_sweepout_16.csv");
  EXPECT_EQ(slurp(fs::path(out()) / "sweepout.csv"), golden);
}

TEST_F(CliTest, GoldenSweepoutMatchesChordLengths) {
  // Unit circle: the distance between samples i and j is 2 sin(pi |i - j| / 16).
  std::istringstream in(slurp(fs::path(WIDTHLAB_GOLDEN) / "circle_sweepout_16.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 8u);
    const int i = std::stoi(f[3]), j = std::stoi(f[4]);
    EXPECT_NEAR(std::stod(f[7]), 2.0 * std::abs(std::sin(widthlab::kPi * (i - j) / 16.0)), 1e-8);
    ++rows;
  }
  EXPECT_GE(rows, 9);
}

TEST_F(CliTest, NumbersHaveNineSignificantDigits) {
  ASSERT_EQ(run({"planar", fixture_path("ellipse"), "--out", out()}).code, 0);
  std::istringstream in(slurp(fs::path(out()) / "width_table.csv"));
  std::string line;
  std::getline(in, line);
  int checked = 0;
  while (std::getline(in, line) && checked < 200) {
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) {
      EXPECT_LE(significant_digits(x), 9) << x;
      ++checked;
    }
  }
}

TEST_F(CliTest, BadSurfaceKindNamesTheField) {
  const std::string cfg =
      write_config("badkind.json", R"({"surface": {"kind": "banana"}, "curve": {"type": "ellipse", "a": 1, "b": 1}})");
  const CliRun r = run({"width", cfg, "--out", out()});
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "config");
  EXPECT_EQ(j["field"], "/surface/kind");
}

TEST_F(CliTest, UnknownKeysAreRejected) {
  const std::string cfg = write_config(
      "extra.json",
      R"({"surface": {"kind": "euclidean-plane"}, "curve": {"type": "ellipse", "a": 1, "b": 1}, "colour": 3})");
  const CliRun r = run({"width", cfg, "--out", out()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("colour"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingConfig) {
  EXPECT_EQ(run({"width", (dir_ / "nope.json").string()}).code, 2);
  EXPECT_EQ(run({"width"}).code, 2);
}

TEST_F(CliTest, InvalidGrid) {
  EXPECT_EQ(run({"width", fixture_path("circle"), "--grid", "4", "--out", out()}).code, 2);
  EXPECT_EQ(run({"width", fixture_path("circle"), "--grid", "5000", "--out", out()}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"geodesic", fixture_path("circle"), "--out", out()}).code, 2);
}

TEST_F(CliTest, NumericalFailureExitsThree) {
  const std::string cfg = write_config("short.json", R"({
    "surface": {"kind": "euclidean-plane"},
    "curve": {"type": "ellipse", "a": 1, "b": 1},
    "birkhoff": {"bend": 0.3, "max_iters": 1}})");
  const CliRun r = run({"birkhoff", cfg, "--out", out()});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "numerical");
}

TEST_F(CliTest, CylinderReportHasHalfLengthWidth) {
  const CliRun r = run({"report", fixture_path("cylinder"), "--out", out(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["half_length_width"]["holds"].get<bool>());
  EXPECT_NEAR(j["S"].get<double>(), 0.5 * j["length"].get<double>(), 1e-3 * j["length"].get<double>());
}

TEST_F(CliTest, GeodesicBirkhoffFbgCritical) {
  CliRun r = run({"geodesic", fixture_path("ellipse"), "--from", "0", "--to", "4.84422411", "--out", out()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("d = 4"), std::string::npos) << r.out;
  r = run({"birkhoff", fixture_path("circle"), "--out", out(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["outcome"], "free_boundary_geodesic");
  r = run({"fbg", fixture_path("ellipse"), "--out", out(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["geodesics"].size(), 2u);
  r = run({"critical", fixture_path("ellipse"), "--out", out(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["components"].size(), 2u);
}

TEST_F(CliTest, ArtifactsAreByteIdenticalAcrossRuns) {
  for (const char* cmd : {"width", "report", "render", "fbg", "planar"}) {
    ASSERT_EQ(run({cmd, fixture_path("squircle"), "--out", out("a")}).code, 0) << cmd;
    ASSERT_EQ(run({cmd, fixture_path("squircle"), "--out", out("b")}).code, 0) << cmd;
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(out("a"))) {
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(out("b")) / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 6);
}

TEST_F(CliTest, RenderIsAnSvg) {
  ASSERT_EQ(run({"render", fixture_path("oblate_cap"), "--out", out()}).code, 0);
  const std::string svg = slurp(fs::path(out()) / "render.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("stroke=\"#c22\""), std::string::npos);  // width level
  EXPECT_NE(svg.find("stroke=\"#26c\""), std::string::npos);  // free-boundary geodesics
}

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "atlas_commands.hpp"
#include "support.hpp"

using namespace tdoa;
using namespace tdoa::test;
using nlohmann::json;

namespace {

std::string config(const char* name) { return std::string(TDOA_SOURCE_DIR) + "/configs/" + name + ".json"; }

atlas::Options opts(const char* name = "demo_right") {
  atlas::Options o;
  o.config_path = config(name);
  return o;
}

std::string run_ok(const std::string& cmd, const atlas::Options& o) {
  std::ostringstream out, err;
  const int rc = atlas::run(cmd, o, out, err);
  EXPECT_EQ(rc, 0) << err.str();
  return out.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  size_t col(const std::string& name) const {
    return static_cast<size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  return f;
}

Csv parse_csv(const std::string& text) {
  Csv c;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  c.header = split(line);
  while (std::getline(ss, line)) c.rows.push_back(split(line));
  return c;
}

// Runs the installed binary; returns exit status and stdout.
std::pair<int, std::string> run_bin(const std::string& args) {
  const std::string cmd = std::string(TDOA_ATLAS_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(CmdClassifyTau, Examples) {
  atlas::Options o = opts();
  o.tau = std::vector<double>{0, 0};
  json j = json::parse(run_ok("classify-tau", o));
  EXPECT_EQ(j["fiber_count"], 1);
  EXPECT_LT(j["a"].get<double>(), 0.0);
  o.tau = std::vector<double>{3, 0};
  j = json::parse(run_ok("classify-tau", o));
  EXPECT_EQ(j["fiber_count"], 0);
  EXPECT_EQ(j["region"], "outside_p2");
  o.tau = std::vector<double>{1.9, 2.7};
  j = json::parse(run_ok("classify-tau", o));
  EXPECT_EQ(j["fiber_count"], 2);
  for (const char* k : {"region", "fiber_count", "a", "b", "c", "delta"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST(CmdClassifyTau, CollinearOutput) {
  atlas::Options o = opts("collinear");
  o.tau = std::vector<double>{0.5, 0.5};
  json j = json::parse(run_ok("classify-tau", o));
  EXPECT_EQ(j["fiber_count"], 2);
  EXPECT_GT(j["delta"].get<double>(), 0.0);
  o.tau = std::vector<double>{0.5, -0.5};
  j = json::parse(run_ok("classify-tau", o));
  EXPECT_EQ(j["fiber_count"], 0);
  EXPECT_TRUE(j["a"].is_null());
}

TEST(CmdClassifyTau, BadConfigExitsTwo) {
  atlas::Options o;
  o.config_path = "/no/such/file.json";
  o.tau = std::vector<double>{0, 0};
  std::ostringstream out, err;
  EXPECT_EQ(atlas::run("classify-tau", o, out, err), 2);
  EXPECT_TRUE(out.str().empty());
  EXPECT_EQ(run_bin("classify-tau --config /no/such/file.json --tau 0,0").first, 2);
  EXPECT_EQ(run_bin("classify-tau --config " + config("demo_right") + " --tau 1").first, 2);
  EXPECT_EQ(run_bin("nonsense --config " + config("demo_right")).first, 2);
}

TEST(CmdLocate, Circumcenter) {
  atlas::Options o = opts();
  o.tau = std::vector<double>{0, 0};
  const auto check = [](const std::string& text) {
    const json j = json::parse(text);
    ASSERT_EQ(j.size(), 1u);
    EXPECT_NEAR(j[0][0].get<double>(), 1.0, 1e-14);
    EXPECT_NEAR(j[0][1].get<double>(), 1.0, 1e-14);
  };
  check(run_ok("locate", o));
  const auto [rc, out] = run_bin("locate --config " + config("demo_right") + " --tau 0,0");
  EXPECT_EQ(rc, 0);
  check(out);
}

TEST(CmdLocate, CollinearHalfLine) {
  const SensorConfig cfg = demo_collinear();
  atlas::Options o = opts("collinear");
  o.tau = std::vector<double>{cfg.d10, -cfg.d20};
  const json j = json::parse(run_ok("locate", o));
  EXPECT_TRUE(j.is_object());
  EXPECT_TRUE(j.contains("half_line"));
}

TEST(CmdMleLocate, Projection) {
  const SensorConfig cfg = demo_right();
  atlas::Options o = opts();
  o.taustar = std::vector<double>{1, 0, 0};
  const json j = json::parse(run_ok("mle-locate", o));
  EXPECT_NEAR(j["projected"][0].get<double>(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(j["projected"][1].get<double>(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(j["projected"][2].get<double>(), -1.0 / 3.0, 1e-15);
  // The inversion agrees with locate on the projected pair.
  const FiberResult f = locate(cfg, {2.0 / 3.0, 1.0 / 3.0});
  ASSERT_EQ(j["fiber"].size(), f.points.size());
  for (size_t i = 0; i < f.points.size(); ++i) {
    EXPECT_NEAR(j["fiber"][i][0].get<double>(), f.points[i].x.x, 1e-12);
    EXPECT_NEAR(j["fiber"][i][1].get<double>(), f.points[i].x.y, 1e-12);
  }
}

TEST(CmdForward, NoiseIsSeeded) {
  atlas::Options o = opts();
  o.x = std::vector<double>{5, 3};
  const json clean = json::parse(run_ok("forward", o));
  const TauTriple t = tau2_star(demo_right(), {5, 3});
  EXPECT_EQ(clean["taustar"][2].get<double>(), t.tau21);
  o.noise = 1e-3;
  o.seed = 11;
  const std::string a = run_ok("forward", o);
  EXPECT_EQ(a, run_ok("forward", o));
  o.seed = 12;
  EXPECT_NE(a, run_ok("forward", o));
}

TEST(CmdBifurcation, ThreeBranches) {
  atlas::Options o = opts();
  o.samples = 512;
  const Csv c = parse_csv(run_ok("bifurcation", o));
  ASSERT_EQ(c.header, (std::vector<std::string>{"mu", "tau1", "tau2", "x", "y", "branch"}));
  std::set<std::string> branches;
  for (const auto& r : c.rows) branches.insert(r[c.col("branch")]);
  EXPECT_GE(branches.size(), 3u);
}

TEST(CmdBifurcation, Implicitize) {
  atlas::Options o = opts();
  o.implicitize = true;
  const json j = json::parse(run_ok("bifurcation", o));
  EXPECT_EQ(j["coefficients"].size(), 21u);
  EXPECT_LE(j["max_heldout_residual"].get<double>(), 1e-6);
  std::ostringstream out, err;
  atlas::Options c = opts("collinear");
  EXPECT_EQ(atlas::run("bifurcation", c, out, err), 2);
}

TEST(CmdImageReport, ProperSubsetAndSigns) {
  const SensorConfig cfg = demo_right();
  atlas::Options o = opts();
  o.grid = 200;
  const Csv c = parse_csv(run_ok("image-report", o));
  ASSERT_EQ(c.header, (std::vector<std::string>{"tau1", "tau2", "region", "fibers"}));
  ASSERT_EQ(c.rows.size(), 200u * 200u);
  size_t in = 0, two = 0;
  for (const auto& r : c.rows) {
    const int f = std::stoi(r[3]);
    if (f != 0) ++in;
    if (f == 2) {
      ++two;
      EXPECT_GT(coeff_a(cfg, {std::stod(r[0]), std::stod(r[1])}), 0.0);
    }
  }
  EXPECT_GT(in, 0u);
  EXPECT_LT(in, c.rows.size());
  EXPECT_GT(two, 0u);
  // Row-major: tau1 varies fastest.
  EXPECT_EQ(c.rows[0][1], c.rows[1][1]);
  EXPECT_NE(c.rows[0][0], c.rows[1][0]);
}

TEST(CmdXAtlas, RegionsAndDegeneracy) {
  const SensorConfig cfg = demo_right();
  atlas::Options o = opts();
  o.grid = 121;
  o.xmin = -4;
  o.xmax = 8;
  o.ymin = -4;
  o.ymax = 8;
  const Csv c = parse_csv(run_ok("x-atlas", o));
  ASSERT_EQ(c.header, (std::vector<std::string>{"x", "y", "detJ", "rank", "region"}));
  std::set<std::string> regions;
  int on_locus = 0;
  for (const auto& r : c.rows) {
    regions.insert(r[4]);
    const Point2 p{std::stod(r[0]), std::stod(r[1])};
    // The grid steps by 0.1 and so hits r1+, r2+ and r0- exactly up to rounding.
    if (r[3] == "rank1") {
      EXPECT_LE(std::abs(std::stod(r[2])), 1e-6) << r[0] << "," << r[1];
      ++on_locus;
    }
    if (distance_to_sensors(cfg, p) > 1e-9 && distance_to_degeneracy(cfg, p) < 1e-12) {
      EXPECT_LE(std::abs(std::stod(r[2])), 1e-6) << r[0] << "," << r[1];
    }
  }
  EXPECT_GT(on_locus, 10);
  EXPECT_TRUE(regions.count("e_minus_pre"));
  EXPECT_TRUE(std::any_of(regions.begin(), regions.end(), [](const std::string& r) { return r.rfind("u_pre", 0) == 0; }));
}

TEST(CmdGrids, DeterministicAcrossThreadCounts) {
  const std::string base = " --config " + config("demo_left");
  for (const std::string& cmd : {std::string("image-report --grid 40"), std::string("x-atlas --grid 40"),
                                 std::string("bifurcation --samples 128")}) {
    setenv("TDOA_ATLAS_THREADS", "1", 1);
    const auto a = run_bin(cmd + base);
    setenv("TDOA_ATLAS_THREADS", "4", 1);
    const auto b = run_bin(cmd + base);
    unsetenv("TDOA_ATLAS_THREADS");
    EXPECT_EQ(a.first, 0);
    EXPECT_EQ(a, b) << cmd;
  }
}

TEST(CmdGrids, OutFileMatchesStdout) {
  atlas::Options o = opts();
  o.grid = 16;
  const std::string text = run_ok("image-report", o);
  o.out_path = ::testing::TempDir() + "tdoa_image_report.csv";
  std::ostringstream out, err;
  ASSERT_EQ(atlas::run("image-report", o, out, err), 0);
  EXPECT_TRUE(out.str().empty());
  std::ifstream f(o.out_path, std::ios::binary);
  const std::string file((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file, text);
  o.out_path = "/no/such/dir/out.csv";
  EXPECT_EQ(atlas::run("image-report", o, out, err), 2);
}

TEST(CmdGrids, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, M_PI}) EXPECT_EQ(std::stod(atlas::fmt(v)), v);
  EXPECT_EQ(atlas::fmt(-0.0), "0");
}

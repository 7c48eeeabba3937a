#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = HOPF_CLI;
const fs::path kData = HOPF_DATA_DIR;

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

json run_json(const std::string& args) {
  const auto r = run(args + " --json");
  EXPECT_EQ(r.status, 0) << args;
  return json::parse(r.out);
}

std::string problem(const std::string& name) { return (kData / "problems" / name).string(); }
std::string shape(const std::string& name) { return (kData / "shapes" / name).string(); }

TEST(CliEval, EllipsoidWorkedExample) {
  const auto out = run_json("eval --problem " + problem("ellipsoid_l1.json") + " --x 2,0.5,0,0,0,0,0,0 --t 1");
  EXPECT_NEAR(out["value"].get<double>(), 0.0, 1e-6);
  EXPECT_TRUE(out["converged"].get<bool>());
  EXPECT_NEAR(out["gradient"][0].get<double>(), 1.0, 1e-6);
  EXPECT_TRUE(out["control"].is_null());
}

TEST(CliEval, SphereZeroLevelSet) {
  // |x| = t + 1 with t = 2.
  const auto out = run_json("eval --problem " + problem("sphere_l2.json") + " --x 1.8,2.4,0,0,0,0,0,0 --t 2");
  EXPECT_NEAR(out["value"].get<double>(), 0.0, 1e-6);
  ASSERT_TRUE(out["control"].is_array());
  EXPECT_NEAR(out["control"][0].get<double>(), 0.6, 1e-4);
}

TEST(CliEval, TimeZeroIsInitialData) {
  const auto out = run_json("eval --problem " + problem("sphere_l2.json") + " --x 3,0,0,0,0,0,0,0 --t 0");
  EXPECT_EQ(out["value"].get<double>(), 4.0);
}

TEST(CliEval, DimensionOverrideAndText) {
  const auto r = run("eval --problem " + problem("table_half_sq_l2__l2.json") + " --dim 2 --x 3,4 --t 2");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("value      4.5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("converged  true"), std::string::npos);
}

TEST(CliEval, MinProblemsReportBranch) {
  const auto out = run_json("eval --problem " + problem("fig4_min_shifted__l1.json") + " --x 0,0,0,0,0,0,0,0 --t 1");
  EXPECT_TRUE(out["tie"].get<bool>());
  EXPECT_EQ(out["branch"].get<int>(), 0);
}

TEST(CliEval, StrictExitsOnNonconvergence) {
  const fs::path dir = fs::temp_directory_path() / "hopf_cli_strict";
  fs::create_directories(dir);
  std::ofstream(dir / "p.json") << R"({"dimension": 3, "hamiltonian": {"type": "l2"},
    "initial": {"type": "half_sq_l1"}, "solver": {"max_iters": 1, "tol": 1e-30}})";
  const std::string args = "eval --problem " + (dir / "p.json").string() + " --x 5,-3,2 --t 4";
  EXPECT_EQ(run(args).status, 0);
  EXPECT_EQ(run(args + " --strict").status, 3);
}

TEST(CliEval, Errors) {
  EXPECT_EQ(run("eval --problem " + problem("sphere_l2.json") + " --x 1,2 --t 1").status, 1);
  EXPECT_EQ(run("eval --problem " + problem("sphere_l2.json") + " --x 1,a --t 1").status, 2);
  EXPECT_EQ(run("eval --problem /does/not/exist.json --x 1 --t 1").status, 2);
  EXPECT_EQ(run("eval --x 1 --t 1").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  const fs::path dir = fs::temp_directory_path() / "hopf_cli_errors";
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"dimension": 2, "hamiltonian": {"type": "l7"}, "initial": {"type": "half_sq_l2"}})";
  EXPECT_EQ(run("eval --problem " + (dir / "bad.json").string() + " --x 1,2 --t 1").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST(CliProject, Examples) {
  auto out = run_json("project --shape " + shape("unit_ball_l2.json") + " --y 3,0");
  EXPECT_NEAR(out["distance"].get<double>(), 2.0, 1e-6);
  EXPECT_NEAR(out["point"][0].get<double>(), 1.0, 1e-6);
  out = run_json("project --shape " + shape("ellipsoid_1_2.json") + " --y 0,3");
  EXPECT_NEAR(out["distance"].get<double>(), 1.0, 1e-6);
  EXPECT_NEAR(out["point"][1].get<double>(), 2.0, 1e-6);
  out = run_json("project --shape " + shape("two_balls.json") + " --y 0,2");
  EXPECT_TRUE(out["tie"].get<bool>());
  EXPECT_EQ(out["branch"].get<int>(), 0);
  const auto text = run("project --shape " + shape("two_balls.json") + " --y 0,2");
  EXPECT_NE(text.out.find("tie        true"), std::string::npos) << text.out;
  EXPECT_EQ(run("project --shape " + shape("unit_ball_l2.json") + " --y 0.1,0").status, 1);
}

TEST(CliSlice, WritesCsvPerTime) {
  const fs::path dir = fs::temp_directory_path() / "hopf_cli_slice";
  fs::remove_all(dir);
  const auto r = run("slice --problem " + problem("fig2_half_sq_l1__l1.json") + " --out " + dir.string() +
                     " --samples 10 --times 0,5 --contour-step 5");
  ASSERT_EQ(r.status, 0);
  for (const char* f : {"phi_t0.csv", "phi_t5.csv", "contours_t0.csv", "contours_t5.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream in(dir / "phi_t5.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x1,x2,phi,grad_norm,converged");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 100);
  EXPECT_EQ(run("slice --problem " + problem("fig2_half_sq_l1__l1.json") + " --out " + dir.string() +
                " --axes 1,9")
                .status,
            1);
}

TEST(CliBench, SingleSampleTable) {
  const auto out = run_json("bench --problem " + problem("table_half_sq_l2__l1.json") + " --dims 4,8 --samples 1");
  ASSERT_TRUE(out.is_array());
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1]["n"].get<int>(), 8);
  EXPECT_EQ(out[0]["convergence_rate"].get<double>(), 1.0);
  const auto text = run("bench --problem " + problem("table_half_sq_l2__l1.json") + " --dims 4 --samples 1");
  EXPECT_EQ(text.status, 0);
  EXPECT_NE(text.out.find("sec/call"), std::string::npos);
}

}  // namespace

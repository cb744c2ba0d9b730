#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vortexgas/cli.hpp"

namespace {

using namespace vortexgas;
namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("vortexgas_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path samples_dir() {
  const char* env = std::getenv("VORTEXGAS_SAMPLES");
  return env ? fs::path(env) : fs::path("samples");
}

cli::RunOutcome run(cli::Command c, const fs::path& config, const fs::path& out,
                    std::vector<std::string> overrides = {}) {
  cli::RunConfig rc;
  rc.command = c;
  rc.config_path = config.empty() ? "" : config.string();
  rc.out_dir = out.string();
  rc.overrides = std::move(overrides);
  return cli::run(rc);
}

TEST(Cli, CommandNames) {
  for (auto c : {cli::Command::simulate, cli::Command::sample, cli::Command::scan, cli::Command::field,
                 cli::Command::order_parameter, cli::Command::check}) {
    EXPECT_EQ(cli::parse_command(cli::to_string(c)), c);
  }
  EXPECT_FALSE(cli::parse_command("simulat"));
}

TEST(Cli, SphereIsRejectedWithGenusReason) {
  const auto dir = scratch("sphere");
  const auto cfg = write_config(dir, {{"geometry", {{"kind", "sphere"}}},
                                      {"vortices", {{{"re", 0.1}, {"im", 0.0}, {"charge", 1}}}},
                                      {"t_end", 1.0}});
  const auto out = run(cli::Command::simulate, cfg, dir / "out");
  EXPECT_NE(out.exit_status, 0);
  EXPECT_EQ(out.error["code"], "inadmissible");
  EXPECT_NE(out.error["message"].get<std::string>().find("genus 0"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "error.json"));
  EXPECT_FALSE(fs::exists(dir / "out" / "trajectory.csv"));
  EXPECT_EQ(json::parse(slurp(dir / "out" / "error.json")), out.error);

  const auto sample_cfg = write_config(dir, {{"geometry", {{"kind", "sphere"}}}, {"n_pairs", 2}, {"beta", 1.0}});
  const auto s = run(cli::Command::sample, sample_cfg, dir / "out2");
  EXPECT_NE(s.exit_status, 0);
  EXPECT_NE(s.error["message"].get<std::string>().find("genus 0"), std::string::npos);
}

TEST(Cli, SphereSampleConfigFromSamples) {
  const auto dir = scratch("sphere_sample");
  const auto out = run(cli::Command::simulate, samples_dir() / "sphere.json", dir);
  EXPECT_EQ(out.exit_status, 3);
  EXPECT_NE(out.error["message"].get<std::string>().find("genus 0"), std::string::npos);
}

TEST(Cli, OrderParameterDefaults) {
  const auto dir = scratch("order");
  const auto out = run(cli::Command::order_parameter, {}, dir);
  ASSERT_EQ(out.exit_status, 0) << out.error.dump();
  std::istringstream csv(slurp(dir / "order_parameter.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "T,psi_min,branch,F_min");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto f = io::split(line, ',');
    ASSERT_EQ(f.size(), 4u);
    const double t = io::parse_double(f[0]);
    const double psi = io::parse_double(f[1]);
    if (t > 1.0) {
      EXPECT_EQ(psi, 0.0);
      EXPECT_EQ(f[2], "normal");
    } else if (t < 1.0) {
      EXPECT_NEAR(psi, std::sqrt((1.0 - t) / 2.0), 1e-12);
      EXPECT_EQ(f[2], "superfluid");
    }
    ++rows;
  }
  EXPECT_EQ(rows, 101);
  const auto rel = json::parse(slurp(dir / "relevance.json"));
  EXPECT_EQ(rel["points"].size(), 101u);
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "order-parameter");
  EXPECT_EQ(manifest["version"], std::string(kVersion));
}

TEST(Cli, UnknownKeyAndParseErrors) {
  const auto dir = scratch("errors");
  auto cfg = write_config(dir, {{"t_end", 1.0},
                                {"vortices", {{{"re", 0.0}, {"im", 0.0}, {"charge", 1}}}},
                                {"tend", 2.0}});
  auto out = run(cli::Command::simulate, cfg, dir / "a");
  EXPECT_EQ(out.exit_status, 2);
  EXPECT_NE(out.error["message"].get<std::string>().find("tend"), std::string::npos);

  std::ofstream(dir / "broken.json") << "{\"t_end\": 1.0,";
  out = run(cli::Command::simulate, dir / "broken.json", dir / "b");
  EXPECT_EQ(out.exit_status, 2);
  EXPECT_EQ(out.error["code"], "config_parse");

  out = run(cli::Command::simulate, dir / "missing.json", dir / "c");
  EXPECT_EQ(out.exit_status, 5);

  cfg = write_config(dir, {{"t_end", 1.0}, {"vortices", {{{"re", 0.0}, {"im", 0.0}, {"charge", 0}}}}});
  out = run(cli::Command::simulate, cfg, dir / "d");
  EXPECT_EQ(out.exit_status, 2);

  out = run(cli::Command::order_parameter, {}, dir / "e", {"model=cubic"});
  EXPECT_EQ(out.exit_status, 2);
  out = run(cli::Command::order_parameter, {}, dir / "f", {"noequals"});
  EXPECT_EQ(out.exit_status, 2);
}

TEST(Cli, OverridesAndSeedAreRecorded) {
  const auto dir = scratch("override");
  const auto cfg = write_config(dir, {{"n_pairs", 2}, {"beta", 1.0}, {"n_sweeps", 50}, {"n_burn", 10}});
  const auto out = run(cli::Command::sample, cfg, dir / "a", {"beta=2.5", "seed=11"});
  ASSERT_EQ(out.exit_status, 0) << out.error.dump();
  const auto m = json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(m["config"]["beta"], 2.5);
  EXPECT_EQ(m["seed"], 11);
  const auto s = json::parse(slurp(dir / "a" / "sample.json"));
  EXPECT_EQ(s["beta"], 2.5);
  EXPECT_EQ(s["samples"], 50);
}

TEST(Cli, RepeatRunsAreByteIdentical) {
  const auto dir = scratch("repeat");
  const auto sim = write_config(dir, {{"random", {{"n_pairs", 3}, {"half_width", 2.0}, {"min_separation", 0.3}}},
                                      {"t_end", 2.0},
                                      {"output_interval", 0.5},
                                      {"seed", 4}});
  for (const char* sub : {"a", "b"}) ASSERT_EQ(run(cli::Command::simulate, sim, dir / sub).exit_status, 0);
  EXPECT_EQ(slurp(dir / "a" / "trajectory.csv"), slurp(dir / "b" / "trajectory.csv"));
  EXPECT_EQ(slurp(dir / "a" / "trajectory.json"), slurp(dir / "b" / "trajectory.json"));

  const auto scan = write_config(dir, {{"n_pairs", 2}, {"betas", {0.5, 2.0}}, {"n_sweeps", 100}, {"seed", 9}});
  for (const char* sub : {"c", "d"}) ASSERT_EQ(run(cli::Command::scan, scan, dir / sub).exit_status, 0);
  EXPECT_EQ(slurp(dir / "c" / "scan.csv"), slurp(dir / "d" / "scan.csv"));
  const auto rows = json::parse(slurp(dir / "c" / "scan.json"));
  EXPECT_EQ(rows[1]["seed"], 10);
}

TEST(Cli, SimulateDipoleTrajectory) {
  const auto dir = scratch("dipole");
  const auto out = run(cli::Command::simulate, samples_dir() / "dipole.json", dir);
  ASSERT_EQ(out.exit_status, 0) << out.error.dump();
  std::istringstream is(slurp(dir / "trajectory.csv"));
  const auto frames = io::read_trajectory_csv(is);
  ASSERT_FALSE(frames.empty());
  const auto& last = frames.back();
  EXPECT_DOUBLE_EQ(last.time, 10.0);
  ASSERT_EQ(last.vortices.size(), 2u);
  // d = 1, both drift at speed 1 along +y
  EXPECT_NEAR(last.vortices[0].position.imag(), 10.0, 1e-6);
  EXPECT_NEAR(last.vortices[1].position.imag(), 10.0, 1e-6);
  const auto doc = json::parse(slurp(dir / "trajectory.json"));
  EXPECT_LT(doc["report"]["max_drift"]["energy"]["absolute"].get<double>(), 1e-9);
}

TEST(Cli, CheckStoredTrajectory) {
  const auto dir = scratch("check");
  const auto out = run(cli::Command::check, samples_dir() / "dipole_check.json", dir);
  ASSERT_EQ(out.exit_status, 0) << out.error.dump();
  const auto report = json::parse(slurp(dir / "check.json"));
  EXPECT_EQ(report["source"], "stored trajectory");
  EXPECT_GT(report["frames"].get<int>(), 2);
  EXPECT_LT(report["max_drift"]["energy"]["absolute"].get<double>(), 1e-9);
  EXPECT_LT(report["max_drift"]["dipole_moment"]["absolute"].get<double>(), 1e-9);
  EXPECT_EQ(report["max_drift"]["total_charge"], 0);
}

TEST(Cli, FieldReportsChernClassAndWinding) {
  const auto dir = scratch("field");
  const auto cfg = write_config(dir, {{"divisor", {{{"re", 0.0}, {"im", 0.0}, {"order", 3}},
                                                   {{"re", 1.5}, {"im", 0.5}, {"order", -1}}}},
                                      {"window", {{"x_min", -2}, {"x_max", 2}, {"y_min", -2}, {"y_max", 2}}},
                                      {"resolution", {{"nx", 9}, {"ny", 5}}},
                                      {"contours", {{{"re", 0.0}, {"im", 0.0}, {"radius", 0.5}}}}});
  const auto out = run(cli::Command::field, cfg, dir / "out");
  ASSERT_EQ(out.exit_status, 0) << out.error.dump();
  const auto f = json::parse(slurp(dir / "out" / "field.json"));
  EXPECT_EQ(f["chern_class"], 2);
  EXPECT_EQ(f["contours"][0]["winding"], 3);
  std::istringstream csv(slurp(dir / "out" / "field.csv"));
  std::string line;
  int rows = -1;
  bool saw_missing = false;
  while (std::getline(csv, line)) {
    ++rows;
    if (line.size() > 1 && line.substr(line.size() - 2) == ",,") saw_missing = true;
  }
  EXPECT_EQ(rows, 45);
  EXPECT_TRUE(saw_missing);  // grid node (0, 0) sits on the order-3 point
}

}  // namespace

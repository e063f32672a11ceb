#include <filesystem>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "mfgt/commands.hpp"
#include "mfgt/error.hpp"
#include "mfgt/io.hpp"

namespace mfgt {
namespace {

namespace fs = std::filesystem;

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("mfgt_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::ostringstream log_;
};

const char* kWeakCoupling = R"({
  "grid": {"n_x": 16, "n_t": 16},
  "model": {
    "f": {"terms": [{"freq": [1], "sin": 0.2}]},
    "kappa": {"terms": [{"freq": [1], "cos": 1.0}]},
    "c_F": 0.05,
    "g_base": {"terms": [{"freq": [1], "cos": 1.0}]}
  },
  "mu0": {"density": {"constant": 1.0, "terms": [{"freq": [1], "cos": 0.5}]}},
  "solver": {"alpha": 0.5, "tol": 1e-3, "max_iter": 50}
})";

TEST_F(CommandsTest, ZeroDatumGivesZeroValues) {
  const RunConfig cfg = parse_config(R"({"grid": {"n_x": 6, "n_t": 3}})");
  ASSERT_EQ(cmd_solve_hj(cfg, out("a"), log_), 0);
  std::istringstream csv(read_text(out("a/value_field.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "k,t_k,i,x0,v,successor");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const std::size_t last = line.rfind(',');
    const std::size_t before = line.rfind(',', last - 1);
    EXPECT_EQ(line.substr(before + 1, last - before - 1), "0") << line;
  }
  EXPECT_EQ(rows, 6 * 4);
}

TEST_F(CommandsTest, RerunsAreByteIdentical) {
  const RunConfig cfg = parse_config(kWeakCoupling);
  ASSERT_EQ(cmd_mfg(cfg, out("a"), log_), 0);
  ASSERT_EQ(cmd_mfg(cfg, out("b"), log_), 0);
  for (const char* f : {"report.json", "history.json", "value_field.csv", "xi_star.csv", "xi_star.jsonl"}) {
    EXPECT_EQ(read_text(out(std::string("a/") + f)), read_text(out(std::string("b/") + f))) << f;
  }
  ASSERT_EQ(cmd_solve_hj(cfg, out("c"), log_), 0);
  ASSERT_EQ(cmd_solve_hj(cfg, out("d"), log_), 0);
  EXPECT_EQ(read_text(out("c/value_field.csv")), read_text(out("d/value_field.csv")));
}

TEST_F(CommandsTest, DecoupledHistoryHasOneEntry) {
  const RunConfig cfg = parse_config(R"({"grid": {"n_x": 12, "n_t": 6},
    "model": {"g_base": {"terms": [{"freq": [1], "cos": 1.0}]}},
    "solver": {"tol": 1e-10}})");
  ASSERT_EQ(cmd_mfg(cfg, out("a"), log_), 0);
  const nlohmann::json h = nlohmann::json::parse(read_text(out("a/history.json")));
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0]["residual"].get<double>(), 0.0);
  const nlohmann::json r = nlohmann::json::parse(read_text(out("a/report.json")));
  EXPECT_EQ(r["status"], "converged");
}

TEST_F(CommandsTest, ZeroIterationsIsNoConvergence) {
  RunConfig cfg = parse_config(kWeakCoupling);
  cfg.solver.max_iter = 0;
  ASSERT_EQ(cmd_mfg(cfg, out("a"), log_), 0);
  const nlohmann::json r = nlohmann::json::parse(read_text(out("a/report.json")));
  EXPECT_EQ(r["status"], "no-convergence");
  EXPECT_EQ(r["iterations"], 0);
  EXPECT_TRUE(r["history"].empty());
}

TEST_F(CommandsTest, VerifyDetectsTampering) {
  const RunConfig cfg = parse_config(kWeakCoupling);
  ASSERT_EQ(cmd_mfg(cfg, out("a"), log_), 0);
  EXPECT_EQ(cmd_verify(cfg, out("a/report.json"), log_), 0);

  nlohmann::ordered_json r = nlohmann::ordered_json::parse(read_text(out("a/report.json")));
  ASSERT_GE(r["xi"].size(), 2u);
  // move weight between two atoms, keeping the total
  std::size_t heavy = 0;
  for (std::size_t i = 1; i < r["xi"].size(); ++i) {
    if (r["xi"][i]["weight"].get<double>() > r["xi"][heavy]["weight"].get<double>()) heavy = i;
  }
  const std::size_t light = heavy == 0 ? 1 : 0;
  r["xi"][heavy]["weight"] = r["xi"][heavy]["weight"].get<double>() - 0.01;
  r["xi"][light]["weight"] = r["xi"][light]["weight"].get<double>() + 0.01;
  write_text(out("a/tampered.json"), dump_json(r));
  std::ostringstream msg;
  EXPECT_EQ(cmd_verify(cfg, out("a/tampered.json"), msg), 1);
  EXPECT_NE(msg.str().find("mismatch"), std::string::npos);

  RunConfig other = cfg;
  other.grid.n_x = 8;
  try {
    cmd_verify(other, out("a/report.json"), log_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  write_text(out("a/broken.json"), "{ not json");
  EXPECT_THROW(cmd_verify(cfg, out("a/broken.json"), log_), Error);
}

TEST_F(CommandsTest, OtherCommandsWriteArtifacts) {
  const RunConfig cfg = parse_config(kWeakCoupling);
  EXPECT_EQ(cmd_optimal_curves(cfg, out("a"), log_), 0);
  EXPECT_TRUE(fs::exists(out("a/curves.csv")));
  EXPECT_EQ(cmd_cost_matrix(cfg, out("b"), log_), 0);
  EXPECT_TRUE(fs::exists(out("b/cost_matrix.csv")));
  EXPECT_EQ(cmd_fenchel_sweep(cfg, out("c"), log_), 0);
  const nlohmann::json f = nlohmann::json::parse(read_text(out("c/fenchel.json")));
  EXPECT_FALSE(f.empty());
  EXPECT_EQ(cmd_continuity_check(cfg, out("d"), log_), 0);
  EXPECT_TRUE(fs::exists(out("d/continuity.json")));
  for (const char* d : {"a", "b", "c", "d"}) EXPECT_TRUE(fs::exists(out(std::string(d) + "/config.json")));
}

}  // namespace
}  // namespace mfgt

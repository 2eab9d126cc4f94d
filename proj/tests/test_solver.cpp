#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>

#include "support/fixtures.hpp"
#include "tep/checker.hpp"
#include "tep/solver.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("tep_solver_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

tep::PlanModel tiny() {
  return tep::build_model(fixtures::two_bus(20000.0, 1000.0), fixtures::peak_only());
}

}  // namespace

TEST(ParseSolution, EmptyTextHasNoIncumbent) {
  const auto s = tep::parse_solution("", tiny());
  EXPECT_EQ(s.status, tep::SolveStatus::error);
  EXPECT_FALSE(s.has_incumbent());
}

TEST(ParseSolution, FractionalBinaryIsRejected) {
  try {
    tep::parse_solution("STATUS optimal\ny_1_2_1 0.4\n", tiny());
    FAIL();
  } catch (const tep::SolverError& e) {
    EXPECT_EQ(e.kind(), tep::SolverErrorKind::bad_solution);
  }
  const auto s = tep::parse_solution("STATUS optimal\ny_1_2_1 0.9999999\n", tiny());
  EXPECT_EQ(s.value(tep::VarRef::build(1, 2, 1)), 1.0);
  EXPECT_THROW(tep::parse_solution("y_1_2_1 2\n", tiny()), tep::SolverError);
  EXPECT_THROW(tep::parse_solution("g_1_1 abc\n", tiny()), tep::SolverError);
}

TEST(ParseSolution, GarverPlanWithMissingColumns) {
  const auto m = tep::build_model(fixtures::garver(), fixtures::peak_only());
  const std::string raw =
      "STATUS optimal\nOBJECTIVE 200000\nBOUND 200000\n"
      "y_2_6_1 1\ny_2_6_2 1\ny_2_6_3 1\ny_2_6_4 1\ny_3_5_1 1\ny_4_6_1 1\ny_4_6_2 1\n"
      "solver chatter line\nq_9 7\n";
  const auto s = tep::parse_solution(raw, m);
  EXPECT_EQ(s.status, tep::SolveStatus::optimal);
  EXPECT_DOUBLE_EQ(s.objective, 200000.0);
  EXPECT_DOUBLE_EQ(s.gap, 0.0);
  EXPECT_EQ(tep::format_circuits(tep::built_circuits(s)), "2-6 (4); 3-5 (1); 4-6 (2)");
  EXPECT_EQ(s.assignment.size(), m.variables.size());
  EXPECT_EQ(s.warnings.size(), m.variables.size() - 7);
}

TEST(ParseSolution, ObjectiveRecomputedWhenAbsent) {
  const auto s = tep::parse_solution("y_1_2_1 1\ng_1_1 30\n", tiny());
  EXPECT_EQ(s.status, tep::SolveStatus::feasible);
  EXPECT_DOUBLE_EQ(s.objective, 20000.0);
}

TEST(ParseSolution, InfeasibleStatus) {
  const auto s = tep::parse_solution("STATUS infeasible\n", tiny());
  EXPECT_EQ(s.status, tep::SolveStatus::infeasible);
  EXPECT_FALSE(s.has_incumbent());
}

TEST(SolverConfig, TemplateNeedsPlaceholders) {
  auto cfg = fixtures::config("solve {mps}");
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.command_template = "solve {mps} {sol}";
  cfg.time_limit = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SolverConfig, ExpansionQuotesPaths) {
  auto cfg = fixtures::config("run {mps} {sol} {timelimit_s} {gap}", 30.0);
  cfg.rel_gap = 0.01;
  EXPECT_EQ(tep::expand_command(cfg, "/a b/m.mps", "/c'd/s.txt"),
            "run '/a b/m.mps' '/c'\\''d/s.txt' 30 0.01");
}

TEST(InvokeSolver, HappyPathWithScriptedSolver) {
  const auto dir = scratch("ok");
  const auto mps = dir / "model.mps";
  tep::write_mps(tiny(), mps.string());
  auto cfg = fixtures::config(
      "test -s {mps} && printf 'STATUS optimal\\ny_1_2_1 1\\ng_1_1 30\\n' > {sol} && echo done");
  const auto raw = tep::invoke_solver(cfg, mps.string(), dir.string());
  EXPECT_NE(raw.find("STATUS optimal"), std::string::npos);
  EXPECT_EQ(tep::detail::read_file(dir / "solver.stdout"), "done\n");
  EXPECT_TRUE(fs::exists(dir / "solver.cmd"));
  fs::remove_all(dir);
}

TEST(InvokeSolver, ErrorKinds) {
  const auto dir = scratch("err");
  const auto mps = (dir / "model.mps").string();
  tep::write_mps(tiny(), mps);
  auto kind_of = [&](const std::string& cmd, double tl = 60.0, double grace = 30.0) {
    auto cfg = fixtures::config(cmd, tl);
    cfg.grace = grace;
    try {
      tep::invoke_solver(cfg, mps, dir.string());
    } catch (const tep::SolverError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for " << cmd;
    return tep::SolverErrorKind::io;
  };
  EXPECT_EQ(kind_of("/nonexistent/bin/solver {mps} {sol}"),
            tep::SolverErrorKind::command_not_found);
  EXPECT_EQ(kind_of("false {mps} {sol}"), tep::SolverErrorKind::nonzero_exit);
  EXPECT_EQ(kind_of("true {mps} {sol}"), tep::SolverErrorKind::io);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(kind_of("sleep 30; : {mps} {sol}", 0.2, 0.3), tep::SolverErrorKind::timeout);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
  fs::remove_all(dir);
}

TEST(InvokeSolver, TimeLimitIsHonoured) {
  const auto cmd = fixtures::highs_cmd();
  if (cmd.empty()) GTEST_SKIP() << "HiGHS not configured";
  const auto net = fixtures::garver();
  const auto sc = tep::load_scenario(fixtures::kData + "/short_peak_48.scn");
  tep::BuildOptions bo;
  bo.storage_cost_override = 170.0;
  const auto m = tep::build_model(net, sc, bo);
  const auto dir = scratch("tl");
  const auto s = tep::solve_external(m, fixtures::config(cmd, 1.0), dir.string());
  EXPECT_LT(s.wall_time, 1.0 + 30.0);
  EXPECT_TRUE(s.status == tep::SolveStatus::time_limit || s.status == tep::SolveStatus::optimal)
      << tep::to_string(s.status);
  if (s.has_incumbent()) {
    tep::CheckOptions co;
    co.storage_cost_override = 170.0;
    const auto rep = tep::validate(net, sc, s, co);
    EXPECT_TRUE(rep.pass) << rep.max_residual;
    EXPECT_GE(s.objective, s.bound - 1e-6 * s.objective);
  }
  fs::remove_all(dir);
}

// tep: plan, sweep, scenario generation and validation for transmission
// expansion with storage.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tep/checker.hpp"
#include "tep/model.hpp"
#include "tep/netdata.hpp"
#include "tep/solver.hpp"
#include "tep/sweep.hpp"

#ifndef TEP_DEFAULT_SOLVER_CMD
#define TEP_DEFAULT_SOLVER_CMD "python3 tools/solvers/highs_solve.py {mps} {sol} {timelimit_s} {gap}"
#endif

namespace fs = std::filesystem;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kSolverError = 3;
constexpr int kValidationFailed = 4;
constexpr int kNoSolution = 5;

struct Common {
  std::string network;
  std::string scenario;
  std::string solver_cmd;
  double timelimit = 600.0;
  double gap = 0.0;
  std::string out_dir = "out";
  double tol = tep::kDefaultCheckTol;
  int jobs = 1;
};

std::string default_solver_cmd() {
  if (const char* env = std::getenv("TEP_SOLVER_CMD"); env && *env) return env;
  return TEP_DEFAULT_SOLVER_CMD;
}

tep::SolverConfig solver_config(const Common& c) {
  tep::SolverConfig cfg;
  cfg.command_template = c.solver_cmd;
  cfg.time_limit = c.timelimit;
  cfg.rel_gap = c.gap;
  return cfg;
}

void add_common(CLI::App* app, Common& c, bool with_solver) {
  app->add_option("--network", c.network, "network file")->required();
  app->add_option("--scenario", c.scenario, "scenario file")->required();
  if (with_solver) {
    app->add_option("--solver-cmd", c.solver_cmd,
                    "solver command template with {mps} {sol} {timelimit_s} {gap}")
        ->default_str(default_solver_cmd());
    app->add_option("--timelimit", c.timelimit, "solver time limit in seconds");
    app->add_option("--gap", c.gap, "relative MIP gap");
  }
  app->add_option("--out-dir", c.out_dir, "output directory");
  app->add_option("--tol", c.tol, "validation tolerance");
}

void write_summary(std::ostream& out, const tep::PlanSolution& s,
                   const tep::ValidationReport& rep) {
  out << "status: " << tep::to_string(s.status) << '\n'
      << "objective_usd: " << tep::detail::format_number(s.objective) << '\n'
      << "objective_kusd: " << tep::detail::format_number(s.objective / 1000.0) << '\n'
      << "bound_usd: " << tep::detail::format_number(s.bound) << '\n'
      << "gap: " << tep::detail::format_number(s.gap) << '\n'
      << "wall_time_s: " << tep::detail::format_number(s.wall_time) << '\n'
      << "circuits: " << tep::format_circuits(tep::built_circuits(s)) << '\n'
      << "total_storage_mwh: " << tep::detail::format_number(tep::total_storage(s)) << '\n';
  for (const auto& [bus, x] : tep::storage_by_bus(s))
    out << "storage_bus_" << bus << "_mwh: " << tep::detail::format_number(x) << '\n';
  out << "curtailment_total_mw_periods: "
      << tep::detail::format_number(tep::total_curtailment(s)) << '\n'
      << "validation: " << (rep.pass ? "pass" : "fail") << '\n';
}

int cmd_plan(const Common& c, bool no_storage, std::optional<double> storage_cost) {
  const auto net = tep::load_network(c.network);
  const auto sc = tep::load_scenario(c.scenario);
  tep::BuildOptions bo;
  bo.no_storage = no_storage;
  bo.storage_cost_override = storage_cost;
  const auto model = tep::build_model(net, sc, bo);

  fs::create_directories(c.out_dir);
  tep::PlanSolution sol;
  try {
    sol = tep::solve_external(model, solver_config(c), c.out_dir);
  } catch (const tep::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  }
  if (!sol.has_incumbent()) {
    std::cerr << "no solution: status " << tep::to_string(sol.status) << '\n';
    return kNoSolution;
  }
  tep::CheckOptions co;
  co.tol = c.tol;
  co.no_storage = no_storage;
  co.storage_cost_override = storage_cost;
  const auto rep = tep::validate(net, sc, sol, co);
  {
    std::ofstream f(fs::path(c.out_dir) / "validation.txt");
    tep::write_report_text(f, rep);
  }
  {
    std::ofstream f(fs::path(c.out_dir) / "validation.kv");
    tep::write_report_kv(f, rep);
  }
  {
    std::ofstream f(fs::path(c.out_dir) / "summary.txt");
    write_summary(f, sol, rep);
  }
  write_summary(std::cout, sol, rep);
  if (!rep.pass) {
    tep::write_report_text(std::cerr, rep, 20);
    return kValidationFailed;
  }
  return kOk;
}

int cmd_sweep(const Common& c, double cost_min, double cost_max, double cost_step) {
  const auto net = tep::load_network(c.network);
  const auto sc = tep::load_scenario(c.scenario);
  fs::create_directories(c.out_dir);
  const auto res = tep::run_sweep(net, sc, solver_config(c), cost_min, cost_max, cost_step,
                                  c.out_dir, c.jobs, c.tol);
  {
    std::ofstream f(fs::path(c.out_dir) / "sweep.csv");
    tep::write_sweep_csv(f, res);
  }
  {
    std::ofstream f(fs::path(c.out_dir) / "sweep_plot.dat");
    tep::write_sweep_plot_data(f, res);
  }
  {
    std::ofstream f(fs::path(c.out_dir) / "sweep_table.txt");
    tep::write_sweep_table(f, res);
  }
  tep::write_sweep_table(std::cout, res);
  const auto mono = tep::check_sweep_monotonicity(res);
  for (const auto& n : mono.notes) std::cout << "note: " << n << '\n';
  for (const auto& row : res.rows)
    if (row.status != "optimal") return kNoSolution;
  return kOk;
}

int cmd_gen_scenario(const std::string& kind, int periods, const std::string& out,
                     std::optional<double> target) {
  const auto k = tep::profile_kind_from_string(kind);
  tep::ProfileCalibration cal = k == tep::ProfileKind::long_peak
                                    ? tep::ProfileCalibration::long_peak_default()
                                    : tep::ProfileCalibration::short_peak_default();
  if (target) cal.target_mean_ratio = *target;
  const auto sc = tep::generate_profile(k, periods, cal);
  std::ofstream f(out);
  if (!f) {
    std::cerr << "cannot write " << out << '\n';
    return kInputError;
  }
  f << "# " << kind << " profile, mean/peak "
    << tep::detail::format_number(sc.mean() / sc.peak()) << '\n';
  tep::write_scenario(f, sc);
  return kOk;
}

int cmd_validate(const Common& c, const std::string& solution_path, bool no_storage,
                 std::optional<double> storage_cost) {
  const auto net = tep::load_network(c.network);
  const auto sc = tep::load_scenario(c.scenario);
  tep::BuildOptions bo;
  bo.no_storage = no_storage;
  bo.storage_cost_override = storage_cost;
  const auto model = tep::build_model(net, sc, bo);
  std::ifstream in(solution_path);
  if (!in) {
    std::cerr << "cannot open " << solution_path << '\n';
    return kInputError;
  }
  std::ostringstream raw;
  raw << in.rdbuf();
  tep::PlanSolution sol;
  try {
    sol = tep::parse_solution(raw.str(), model);
  } catch (const tep::SolverError& e) {
    std::cerr << "solution parse error: " << e.what() << '\n';
    return kInputError;
  }
  tep::CheckOptions co;
  co.tol = c.tol;
  co.no_storage = no_storage;
  co.storage_cost_override = storage_cost;
  const auto rep = tep::validate(net, sc, sol, co);
  tep::write_report_text(std::cout, rep);
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    std::ofstream f(fs::path(c.out_dir) / "validation.kv");
    tep::write_report_kv(f, rep);
  }
  return rep.pass ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission expansion planning with energy storage"};
  app.require_subcommand(1);

  Common plan_c, sweep_c, val_c;
  plan_c.solver_cmd = sweep_c.solver_cmd = default_solver_cmd();
  val_c.out_dir.clear();

  bool plan_no_storage = false;
  std::optional<double> plan_storage_cost;
  auto* plan = app.add_subcommand("plan", "solve one expansion plan");
  add_common(plan, plan_c, true);
  plan->add_flag("--no-storage", plan_no_storage, "disallow storage");
  plan->add_option("--storage-cost", plan_storage_cost, "uniform storage cost, US$/MWh");

  double cost_min = 10, cost_max = 200, cost_step = 10;
  auto* sweep = app.add_subcommand("sweep", "sweep a uniform storage cost");
  add_common(sweep, sweep_c, true);
  sweep->add_option("--cost-min", cost_min, "first storage cost, US$/MWh");
  sweep->add_option("--cost-max", cost_max, "last storage cost, US$/MWh");
  sweep->add_option("--cost-step", cost_step, "storage cost increment, US$/MWh");
  sweep->add_option("--jobs", sweep_c.jobs, "concurrent solver processes");

  std::string kind, gen_out;
  int periods = 48;
  std::optional<double> target;
  auto* gen = app.add_subcommand("gen-scenario", "write a daily demand scenario file");
  gen->add_option("kind", kind, "short_peak | long_peak | constant")->required();
  gen->add_option("--periods", periods, "number of periods over 24 h");
  gen->add_option("--target-mean", target, "mean-to-peak ratio to calibrate to");
  gen->add_option("--out", gen_out, "output scenario file")->required();

  std::string solution_path;
  bool val_no_storage = false;
  std::optional<double> val_storage_cost;
  auto* val = app.add_subcommand("validate", "check a solution file");
  add_common(val, val_c, false);
  val->add_option("--solution", solution_path, "name/value solution file")->required();
  val->add_flag("--no-storage", val_no_storage, "storage was disallowed");
  val->add_option("--storage-cost", val_storage_cost, "uniform storage cost, US$/MWh");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*plan) return cmd_plan(plan_c, plan_no_storage, plan_storage_cost);
    if (*sweep) return cmd_sweep(sweep_c, cost_min, cost_max, cost_step);
    if (*gen) return cmd_gen_scenario(kind, periods, gen_out, target);
    if (*val) return cmd_validate(val_c, solution_path, val_no_storage, val_storage_cost);
  } catch (const tep::DataError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return kOk;
}

#pragma once

// External MIP solver driver. The solver is any command line that reads an
// MPS file and writes a plain-text solution of `<column> <value>` lines;
// adapters for specific solvers live in tools/solvers/.
//
// Solution file grammar (one record per line, blank lines ignored):
//   STATUS <optimal|feasible|infeasible|time_limit|error>
//   OBJECTIVE <value>
//   BOUND <value>
//   <column name> <value>
// Any other line whose first token is not a column of the model is ignored.

#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "tep/model.hpp"
#include "tep/mps.hpp"
#include "tep/solution.hpp"

namespace tep {

enum class SolverErrorKind { command_not_found, timeout, nonzero_exit, io, bad_solution };

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  SolverErrorKind kind() const { return kind_; }

 private:
  SolverErrorKind kind_;
};

struct SolverConfig {
  std::string command_template;
  double time_limit = 600.0;  // s
  double rel_gap = 0.0;
  double grace = 30.0;        // s allowed past time_limit before the process is killed
  std::string solution_format = "name_value_pairs";

  void validate() const {
    if (command_template.find("{mps}") == std::string::npos ||
        command_template.find("{sol}") == std::string::npos)
      throw std::invalid_argument("solver command template needs {mps} and {sol}");
    if (solution_format != "name_value_pairs")
      throw std::invalid_argument("unsupported solution format " + solution_format);
    if (!(time_limit > 0.0)) throw std::invalid_argument("time limit must be > 0");
    if (!(rel_gap >= 0.0)) throw std::invalid_argument("gap must be >= 0");
  }
};

namespace detail {

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

inline void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string tail(const std::string& s, std::size_t n = 2000) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

}  // namespace detail

inline std::string expand_command(const SolverConfig& cfg, const std::string& mps,
                                  const std::string& sol) {
  std::string cmd = cfg.command_template;
  detail::replace_all(cmd, "{mps}", detail::shell_quote(mps));
  detail::replace_all(cmd, "{sol}", detail::shell_quote(sol));
  detail::replace_all(cmd, "{timelimit_s}", detail::format_number(cfg.time_limit));
  detail::replace_all(cmd, "{gap}", detail::format_number(cfg.rel_gap));
  return cmd;
}

/// Runs the configured command on `mps_path` and returns the raw solution
/// text. stdout/stderr go to solver.stdout / solver.stderr in `work_dir`.
inline std::string invoke_solver(const SolverConfig& cfg, const std::string& mps_path,
                                 const std::string& work_dir) {
  namespace fs = std::filesystem;
  cfg.validate();
  fs::create_directories(work_dir);
  const fs::path sol = fs::path(work_dir) / "solution.txt";
  const fs::path out_log = fs::path(work_dir) / "solver.stdout";
  const fs::path err_log = fs::path(work_dir) / "solver.stderr";
  std::error_code ec;
  fs::remove(sol, ec);
  const std::string cmd = expand_command(cfg, fs::absolute(mps_path).string(),
                                         fs::absolute(sol).string());
  {
    std::ofstream(fs::path(work_dir) / "solver.cmd") << cmd << '\n';
  }

  pid_t pid = fork();
  if (pid < 0) throw SolverError(SolverErrorKind::io, "fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    int fo = open(out_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    int fe = open(err_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fo >= 0) dup2(fo, STDOUT_FILENO);
    if (fe >= 0) dup2(fe, STDERR_FILENO);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(cfg.time_limit + cfg.grace);
  int status = 0;
  while (true) {
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw SolverError(SolverErrorKind::io, "waitpid failed");
    if (std::chrono::steady_clock::now() > deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw SolverError(SolverErrorKind::timeout,
                        "solver exceeded time limit plus grace: " + cmd);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (code == 127 || code == 126)
    throw SolverError(SolverErrorKind::command_not_found,
                      "solver command not found or not executable: " + cmd + "\n" +
                          detail::tail(detail::read_file(err_log)));
  if (code != 0)
    throw SolverError(SolverErrorKind::nonzero_exit,
                      "solver exited with status " + std::to_string(code) + ": " + cmd +
                          "\n" + detail::tail(detail::read_file(err_log)) +
                          detail::tail(detail::read_file(out_log)));
  if (!fs::exists(sol))
    throw SolverError(SolverErrorKind::io, "solver wrote no solution file " + sol.string());
  return detail::read_file(sol);
}

/// Integrality threshold for circuit variables in parsed solutions.
inline constexpr double kIntegralityTol = 1e-6;

/// Maps raw `<name> <value>` text back onto the model's variables.
inline PlanSolution parse_solution(const std::string& raw, const PlanModel& m) {
  PlanSolution s;
  std::optional<double> objective, bound;
  std::optional<SolveStatus> status;
  std::istringstream in(raw);
  std::string line;
  std::size_t lineno = 0;
  bool any_value = false;
  auto number = [&](const std::string& tok) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw SolverError(SolverErrorKind::bad_solution,
                        "solution line " + std::to_string(lineno) + ": bad value '" + tok + "'");
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key, val;
    if (!(ls >> key)) continue;
    if (!(ls >> val)) continue;
    if (key == "STATUS") {
      status = solve_status_from_string(val);
      continue;
    }
    if (key == "OBJECTIVE") {
      objective = number(val);
      continue;
    }
    if (key == "BOUND") {
      bound = number(val);
      continue;
    }
    auto ref = parse_var_name(key);
    if (!ref) continue;
    auto idx = m.find(*ref);
    if (!idx) continue;
    double v = number(val);
    if (m.variables[*idx].binary) {
      const double r = std::round(v);
      if (std::abs(v - r) > kIntegralityTol || (r != 0.0 && r != 1.0))
        throw SolverError(SolverErrorKind::bad_solution,
                          "integrality violation: " + key + " = " + val);
      v = r;
    }
    s.assignment[*ref] = v;
    any_value = true;
  }
  for (const auto& v : m.variables)
    if (!s.assignment.count(v.ref)) {
      s.assignment[v.ref] = 0.0;
      s.warnings.push_back("missing " + var_name(v.ref) + ", set to 0");
    }

  s.status = status.value_or(any_value ? SolveStatus::feasible : SolveStatus::error);
  if (s.status == SolveStatus::infeasible || s.status == SolveStatus::error) {
    s.objective = kInf;
    s.bound = bound.value_or(-kInf);
    s.gap = kInf;
    return s;
  }
  if (!any_value && s.status == SolveStatus::time_limit) {
    s.objective = kInf;
    s.bound = bound.value_or(-kInf);
    return s;
  }
  s.objective = objective.value_or(objective_value(m, s.assignment));
  s.bound = bound.value_or(s.status == SolveStatus::optimal ? s.objective : -kInf);
  s.gap = relative_gap(s.objective, s.bound);
  return s;
}

/// Writes the model, runs the solver, parses the result. Solver artifacts
/// stay in `work_dir`.
inline PlanSolution solve_external(const PlanModel& m, const SolverConfig& cfg,
                                   const std::string& work_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(work_dir);
  const std::string mps = (fs::path(work_dir) / "model.mps").string();
  write_mps(m, mps);
  const auto t0 = std::chrono::steady_clock::now();
  std::string raw = invoke_solver(cfg, mps, work_dir);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto s = parse_solution(raw, m);
  s.wall_time = wall;
  return s;
}

}  // namespace tep

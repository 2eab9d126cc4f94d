#pragma once

// Storage-cost sweep: one independent solve per unit cost, merged in cost
// order, with CSV / plot-data / table output.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tep/checker.hpp"
#include "tep/model.hpp"
#include "tep/solver.hpp"

namespace tep {

struct SweepRow {
  double storage_cost = 0.0;  // US$/MWh
  double total_cost = kInf;   // US$
  std::map<CorridorKey, int> circuits;
  double total_storage = 0.0;  // MWh
  std::map<int, double> storage_by_bus;
  double wall_time = 0.0;
  std::string status;
  bool validated = false;
  double recomputed_cost = kInf;
  PlanSolution solution;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending storage_cost
};

inline std::vector<double> sweep_points(double cost_min, double cost_max, double cost_step) {
  if (!(cost_step > 0.0)) throw std::invalid_argument("cost step must be > 0");
  if (cost_min > cost_max) throw std::invalid_argument("cost_min exceeds cost_max");
  std::vector<double> pts;
  for (long i = 0;; ++i) {
    const double c = cost_min + static_cast<double>(i) * cost_step;
    if (c > cost_max + 1e-9 * cost_step) break;
    pts.push_back(c);
  }
  return pts;
}

/// Solves one point. Failures are captured in the row status.
inline SweepRow solve_sweep_point(const Network& net, const DemandScenario& sc,
                                  const SolverConfig& cfg, double cost,
                                  const std::string& work_dir, double tol = kDefaultCheckTol) {
  SweepRow row;
  row.storage_cost = cost;
  try {
    BuildOptions bo;
    bo.storage_cost_override = cost;
    const auto model = build_model(net, sc, bo);
    auto sol = solve_external(model, cfg, work_dir);
    row.status = to_string(sol.status);
    row.wall_time = sol.wall_time;
    if (sol.has_incumbent()) {
      CheckOptions co;
      co.tol = tol;
      co.storage_cost_override = cost;
      const auto rep = validate(net, sc, sol, co);
      row.validated = rep.pass;
      row.recomputed_cost = rep.objective_recomputed;
      row.total_cost = sol.objective;
      row.circuits = built_circuits(sol);
      row.total_storage = total_storage(sol);
      row.storage_by_bus = storage_by_bus(sol);
      if (!rep.pass) row.status += "+invalid";
    }
    row.solution = std::move(sol);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
    std::replace(row.status.begin(), row.status.end(), '\n', ' ');
    std::replace(row.status.begin(), row.status.end(), ',', ';');
  }
  return row;
}

inline SweepResult run_sweep(const Network& net, const DemandScenario& sc,
                             const SolverConfig& cfg, double cost_min, double cost_max,
                             double cost_step, const std::string& out_dir, int jobs = 1,
                             double tol = kDefaultCheckTol) {
  namespace fs = std::filesystem;
  const auto pts = sweep_points(cost_min, cost_max, cost_step);
  SweepResult res;
  res.rows.resize(pts.size());
  auto dir_for = [&](double c) {
    return (fs::path(out_dir) / ("cost_" + detail::format_number(c))).string();
  };
  jobs = std::max(1, jobs);
  for (std::size_t start = 0; start < pts.size(); start += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t i = start; i < std::min(pts.size(), start + jobs); ++i)
      batch.push_back(std::async(std::launch::async, [&, i] {
        return solve_sweep_point(net, sc, cfg, pts[i], dir_for(pts[i]), tol);
      }));
    for (std::size_t k = 0; k < batch.size(); ++k) res.rows[start + k] = batch[k].get();
  }
  std::sort(res.rows.begin(), res.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.storage_cost < b.storage_cost; });
  return res;
}

inline constexpr const char* kSweepCsvHeader =
    "storage_cost_usd_per_mwh,total_cost_usd,circuits,total_storage_mwh,wall_time_s,status";

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << kSweepCsvHeader << '\n';
  for (const auto& row : r.rows) {
    out << detail::format_number(row.storage_cost) << ','
        << (std::isfinite(row.total_cost) ? detail::format_number(row.total_cost) : "")
        << ',' << format_circuits(row.circuits) << ','
        << detail::format_number(row.total_storage) << ','
        << detail::format_number(row.wall_time) << ',' << row.status << '\n';
  }
}

/// Two-column "cost total_storage" data for plotting storage against cost.
inline void write_sweep_plot_data(std::ostream& out, const SweepResult& r) {
  out << "# storage_cost_usd_per_mwh total_storage_mwh\n";
  for (const auto& row : r.rows)
    if (std::isfinite(row.total_cost))
      out << detail::format_number(row.storage_cost) << ' '
          << detail::format_number(row.total_storage) << '\n';
}

/// Human-readable table in 10^3 US$, with per-bus storage.
inline void write_sweep_table(std::ostream& out, const SweepResult& r) {
  out << std::fixed;
  out << "cost(US$/MWh)  total(10^3 US$)  storage(MWh)  circuits  | storage by bus\n";
  for (const auto& row : r.rows) {
    out << std::setw(13) << std::setprecision(2) << row.storage_cost << "  " << std::setw(15)
        << std::setprecision(2) << row.total_cost / 1000.0 << "  " << std::setw(12)
        << std::setprecision(2) << row.total_storage << "  " << format_circuits(row.circuits)
        << "  |";
    for (const auto& [bus, x] : row.storage_by_bus)
      out << ' ' << bus << ':' << std::setprecision(2) << x;
    out << "  [" << row.status << "]\n";
  }
  out << std::defaultfloat;
}

struct MonotonicityReport {
  bool storage_non_increasing = true;
  bool objective_non_decreasing = true;
  bool objective_concave = true;
  std::vector<std::string> notes;
  bool pass() const { return storage_non_increasing && objective_non_decreasing; }
};

/// Checks the exchange-argument properties across exactly solved rows.
/// `storage_tol` is in MWh; objective comparisons are relative.
inline MonotonicityReport check_sweep_monotonicity(const SweepResult& r,
                                                   double storage_tol = 1e-6,
                                                   double rel_tol = 1e-6) {
  MonotonicityReport rep;
  std::vector<const SweepRow*> ok;
  for (const auto& row : r.rows)
    if (row.status == "optimal") ok.push_back(&row);
  for (std::size_t i = 1; i < ok.size(); ++i) {
    const auto& a = *ok[i - 1];
    const auto& b = *ok[i];
    const double vt = rel_tol * std::max(1.0, std::abs(b.total_cost));
    if (b.total_storage > a.total_storage + storage_tol) {
      rep.storage_non_increasing = false;
      rep.notes.push_back("storage rises between costs " + detail::format_number(a.storage_cost) +
                          " and " + detail::format_number(b.storage_cost));
    }
    if (b.total_cost < a.total_cost - vt) {
      rep.objective_non_decreasing = false;
      rep.notes.push_back("objective falls between costs " +
                          detail::format_number(a.storage_cost) + " and " +
                          detail::format_number(b.storage_cost));
    }
    if (i + 1 < ok.size()) {
      const auto& c = *ok[i + 1];
      const double w = (b.storage_cost - a.storage_cost) / (c.storage_cost - a.storage_cost);
      const double chord = (1.0 - w) * a.total_cost + w * c.total_cost;
      if (b.total_cost < chord - vt) {
        rep.objective_concave = false;
        rep.notes.push_back("objective below chord at cost " +
                            detail::format_number(b.storage_cost));
      }
    }
  }
  return rep;
}

}  // namespace tep

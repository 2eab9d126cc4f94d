#pragma once

// Exact reference path for tiny instances: the operating LP with every
// circuit decision fixed, and exhaustive enumeration over circuit counts.

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tep/lp.hpp"
#include "tep/model.hpp"
#include "tep/solution.hpp"

namespace tep {

class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

/// Largest total candidate slot count brute_force_plan accepts.
inline constexpr int kEnumerationGuard = 12;

inline lp::Problem to_lp(const PlanModel& m) {
  lp::Problem p;
  p.cost.assign(m.variables.size(), 0.0);
  for (const auto& v : m.variables) {
    p.lower.push_back(v.lower);
    p.upper.push_back(v.upper);
  }
  for (const auto& t : m.objective) p.cost[t.var] += t.coef;
  for (const auto& c : m.constraints) {
    lp::Row r;
    for (const auto& t : c.terms) r.terms.push_back({t.var, t.coef});
    r.sense = c.sense == Sense::le ? lp::RowSense::le
              : c.sense == Sense::ge ? lp::RowSense::ge
                                     : lp::RowSense::eq;
    r.rhs = c.rhs;
    p.rows.push_back(std::move(r));
  }
  return p;
}

/// Copy of `m` with y fixed so that corridor (i, j) uses its first
/// `counts[(i, j)]` slots; corridors absent from `counts` build nothing.
inline PlanModel fix_circuits(const PlanModel& m, const std::map<CorridorKey, int>& counts) {
  PlanModel out = m;
  for (auto& v : out.variables) {
    if (v.ref.kind != VarKind::circuit_build) continue;
    auto it = counts.find({v.ref.bus, v.ref.to_bus});
    const double on = (it != counts.end() && v.ref.slot <= it->second) ? 1.0 : 0.0;
    v.lower = v.upper = on;
  }
  return out;
}

/// Solves the operating problem of a model whose binaries are all fixed.
/// The reported objective is the full objective including the fixed
/// circuit investment.
inline PlanSolution solve_operational_lp(const PlanModel& m, const lp::Options& opt = {}) {
  for (const auto& v : m.variables)
    if (v.binary && !(v.lower == v.upper && (v.lower == 0.0 || v.lower == 1.0)))
      throw OracleError("circuit variable " + var_name(v.ref) + " is not fixed");

  const auto t0 = std::chrono::steady_clock::now();
  auto res = lp::solve(to_lp(m), opt);
  PlanSolution s;
  s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  switch (res.status) {
    case lp::Status::optimal:
      s.status = SolveStatus::optimal;
      break;
    case lp::Status::infeasible:
      s.status = SolveStatus::infeasible;
      s.warnings.push_back(res.message);
      return s;
    case lp::Status::too_large:
      throw OracleError(res.message);
    default:
      s.status = SolveStatus::error;
      s.warnings.push_back(std::string("simplex ") + lp::to_string(res.status) + ": " +
                           res.message);
      return s;
  }
  for (std::size_t j = 0; j < m.variables.size(); ++j)
    s.assignment[m.variables[j].ref] = res.x[j];
  s.objective = objective_value(m, s.assignment);
  s.bound = s.objective;
  s.gap = 0.0;
  return s;
}

/// Exhaustive search over every symmetry-respecting circuit plan. Ties on
/// the objective go to the plan with fewer circuits, then to the
/// lexicographically smallest build vector.
inline PlanSolution brute_force_plan(const Network& net, const DemandScenario& sc,
                                     const BuildOptions& opt = {},
                                     int slot_cap = kEnumerationGuard) {
  std::vector<const Corridor*> cands;
  int slots = 0;
  for (const auto& c : net.corridors)
    if (c.is_candidate()) {
      cands.push_back(&c);
      slots += c.n_max_new;
    }
  if (slots > slot_cap)
    throw OracleError("enumeration guard: " + std::to_string(slots) +
                      " candidate slots exceed " + std::to_string(slot_cap));

  const auto t0 = std::chrono::steady_clock::now();
  const PlanModel base = build_model(net, sc, opt);
  std::vector<int> counts(cands.size(), 0);
  PlanSolution best;
  int best_circuits = 0;
  std::vector<int> best_counts;
  bool have = false;

  // Mixed-radix odometer over per-corridor circuit counts.
  while (true) {
    std::map<CorridorKey, int> plan;
    int circuits = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      plan[{cands[i]->from_bus, cands[i]->to_bus}] = counts[i];
      circuits += counts[i];
    }
    auto s = solve_operational_lp(fix_circuits(base, plan));
    if (s.status == SolveStatus::error)
      throw OracleError("operating LP failed: " +
                        (s.warnings.empty() ? std::string("?") : s.warnings.front()));
    if (s.status == SolveStatus::optimal) {
      const double tol = 1e-9 * std::max(1.0, std::abs(s.objective));
      bool better = !have || s.objective < best.objective - tol;
      if (!better && std::abs(s.objective - best.objective) <= tol) {
        // Slot usage per corridor is a prefix, so comparing build vectors in
        // corridor order is the same as comparing count vectors.
        if (circuits < best_circuits)
          better = true;
        else if (circuits == best_circuits)
          better = counts < best_counts;
      }
      if (better) {
        best = std::move(s);
        best_circuits = circuits;
        best_counts = counts;
        have = true;
      }
    }
    std::size_t i = 0;
    for (; i < cands.size(); ++i) {
      if (++counts[i] <= cands[i]->n_max_new) break;
      counts[i] = 0;
    }
    if (i == cands.size()) break;
  }
  if (!have) {
    best.status = SolveStatus::infeasible;
    return best;
  }
  best.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return best;
}

}  // namespace tep

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tep/model.hpp"

namespace tep {

enum class SolveStatus { optimal, feasible, infeasible, time_limit, error };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::error: return "error";
  }
  return "?";
}

inline SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "optimal") return SolveStatus::optimal;
  if (s == "feasible") return SolveStatus::feasible;
  if (s == "infeasible") return SolveStatus::infeasible;
  if (s == "time_limit") return SolveStatus::time_limit;
  return SolveStatus::error;
}

struct PlanSolution {
  Assignment assignment;
  double objective = kInf;  // US$
  double bound = -kInf;     // US$
  double gap = kInf;
  double wall_time = 0.0;   // s
  SolveStatus status = SolveStatus::error;
  std::vector<std::string> warnings;

  bool has_incumbent() const {
    return status == SolveStatus::optimal || status == SolveStatus::feasible ||
           (status == SolveStatus::time_limit && std::isfinite(objective));
  }

  double value(const VarRef& v) const {
    auto it = assignment.find(v);
    return it == assignment.end() ? 0.0 : it->second;
  }
};

inline double relative_gap(double objective, double bound) {
  if (!std::isfinite(objective) || !std::isfinite(bound)) return kInf;
  return (objective - bound) / std::max(1.0, std::abs(objective));
}

/// Circuits built per corridor, keyed by corridor endpoints.
inline std::map<CorridorKey, int> built_circuits(const PlanSolution& s) {
  std::map<CorridorKey, int> out;
  for (const auto& [ref, v] : s.assignment)
    if (ref.kind == VarKind::circuit_build && v > 0.5) ++out[{ref.bus, ref.to_bus}];
  return out;
}

/// Multiset notation "i-j (n)" joined by `sep`, in corridor order.
inline std::string format_circuits(const std::map<CorridorKey, int>& built,
                                   const std::string& sep = "; ") {
  std::string s;
  for (const auto& [key, n] : built) {
    if (!s.empty()) s += sep;
    s += std::to_string(key.first) + "-" + std::to_string(key.second) + " (" +
         std::to_string(n) + ")";
  }
  return s;
}

inline double total_storage(const PlanSolution& s) {
  double x = 0.0;
  for (const auto& [ref, v] : s.assignment)
    if (ref.kind == VarKind::storage_cap) x += v;
  return x;
}

inline std::map<int, double> storage_by_bus(const PlanSolution& s) {
  std::map<int, double> out;
  for (const auto& [ref, v] : s.assignment)
    if (ref.kind == VarKind::storage_cap && v != 0.0) out[ref.bus] = v;
  return out;
}

inline double total_curtailment(const PlanSolution& s) {
  double r = 0.0;
  for (const auto& [ref, v] : s.assignment)
    if (ref.kind == VarKind::curtailment) r += v;
  return r;
}

}  // namespace tep

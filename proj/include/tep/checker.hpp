#pragma once

// Independent feasibility and objective check of a plan. Every constraint
// is recomputed from the Network and DemandScenario; nothing here reads the
// rows assembled by build_model.

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tep/netdata.hpp"
#include "tep/solution.hpp"

namespace tep {

inline constexpr double kDefaultCheckTol = 1e-6;

struct Violation {
  Family family;
  std::string where;  // e.g. "t=3 k=2" or "t=1 2-6 p=1"
  double residual;    // amount by which the limit is exceeded
  double limit;       // tolerance applied
};

struct ValidationReport {
  std::vector<Violation> violations;
  double max_residual = 0.0;
  double objective_recomputed = 0.0;
  double objective_delta = 0.0;
  bool pass = false;

  bool has(Family f) const {
    for (const auto& v : violations)
      if (v.family == f) return true;
    return false;
  }
};

struct CheckOptions {
  double tol = kDefaultCheckTol;
  bool no_storage = false;
  std::optional<double> storage_cost_override;
};

/// Checks `sol` against every family of the planning model. Residuals are
/// absolute in MW, MWh and unit-interval terms; the objective comparison is
/// relative to max(1, |objective|).
inline ValidationReport validate(const Network& net, const DemandScenario& sc,
                                 const PlanSolution& sol, const CheckOptions& opt) {
  ValidationReport rep;
  const double tol = opt.tol;
  const int T = sc.periods;
  const double h = sc.step_hours;

  auto val = [&sol](const VarRef& r) { return sol.value(r); };
  auto note = [&](double residual, Family fam, const std::string& where) {
    // residual is the signed excess over a limit of zero
    rep.max_residual = std::max(rep.max_residual, residual);
    if (residual > tol) rep.violations.push_back({fam, where, residual, tol});
  };
  auto at = [](int t, int k) { return "t=" + std::to_string(t) + " k=" + std::to_string(k); };
  auto atc = [](int t, const Corridor& c, int p) {
    std::string s = "t=" + std::to_string(t) + " " + c.label();
    if (p > 0) s += " p=" + std::to_string(p);
    return s;
  };

  // Circuit decisions.
  for (const auto& c : net.corridors) {
    for (int p = 1; p <= c.n_max_new; ++p) {
      const double y = val(VarRef::build(c.from_bus, c.to_bus, p));
      note(std::min(std::abs(y), std::abs(y - 1.0)), Family::integrality, atc(0, c, p));
      if (p < c.n_max_new)
        note(val(VarRef::build(c.from_bus, c.to_bus, p + 1)) - y, Family::symmetry,
             atc(0, c, p));
    }
  }

  for (const auto& b : net.buses) {
    const double xmax = opt.no_storage ? 0.0 : b.storage_max;
    const double x = val(VarRef::cap(b.id));
    note(-x, Family::storage_bounds, "k=" + std::to_string(b.id));
    note(x - xmax, Family::storage_bounds, "k=" + std::to_string(b.id));
  }

  for (int t = 1; t <= T; ++t) {
    const double frac = sc.profile[static_cast<std::size_t>(t - 1)];
    for (const auto& b : net.buses) {
      const double d = frac * b.peak_demand;
      double balance = val(VarRef::gen(b.id, t)) + val(VarRef::curtail(b.id, t)) -
                       val(VarRef::charge(b.id, t)) - d;
      for (const auto& c : net.corridors) {
        double sign = 0.0;
        if (c.from_bus == b.id) sign = 1.0;
        if (c.to_bus == b.id) sign = -1.0;
        if (sign == 0.0) continue;
        double f = c.n_existing > 0 ? val(VarRef::flow0(c.from_bus, c.to_bus, t)) : 0.0;
        for (int p = 1; p <= c.n_max_new; ++p)
          f += val(VarRef::flowc(c.from_bus, c.to_bus, p, t));
        balance += sign * f;
      }
      note(std::abs(balance), Family::kcl, at(t, b.id));

      const double g = val(VarRef::gen(b.id, t));
      note(-g, Family::gen_bounds, at(t, b.id));
      note(g - b.gen_max, Family::gen_bounds, at(t, b.id));
      const double r = val(VarRef::curtail(b.id, t));
      note(-r, Family::curtail_bounds, at(t, b.id));
      note(r - d, Family::curtail_bounds, at(t, b.id));

      const double l = val(VarRef::level(b.id, t));
      note(-l, Family::level_bounds, at(t, b.id));
      note(l - val(VarRef::cap(b.id)), Family::level_bounds, at(t, b.id));
      const double prev = val(VarRef::level(b.id, t == 1 ? T : t - 1));
      const double step = l - prev - h * val(VarRef::charge(b.id, t));
      note(std::abs(step), t == 1 ? Family::storage_wrap : Family::storage_level, at(t, b.id));
    }

    for (const auto& c : net.corridors) {
      const double dtheta =
          val(VarRef::angle(c.from_bus, t)) - val(VarRef::angle(c.to_bus, t));
      if (c.n_existing > 0) {
        const double f = val(VarRef::flow0(c.from_bus, c.to_bus, t));
        note(std::abs(f - c.susceptance * c.n_existing * dtheta), Family::kvl_existing,
             atc(t, c, 0));
        note(std::abs(f) - c.n_existing * c.flow_max, Family::flow_existing, atc(t, c, 0));
      }
      for (int p = 1; p <= c.n_max_new; ++p) {
        const double y = std::round(val(VarRef::build(c.from_bus, c.to_bus, p)));
        const double f = val(VarRef::flowc(c.from_bus, c.to_bus, p, t));
        if (y >= 0.5)
          note(std::abs(f - c.susceptance * dtheta), Family::kvl_candidate, atc(t, c, p));
        else
          note(std::abs(f), Family::candidate_off, atc(t, c, p));
        note(std::abs(f) - val(VarRef::build(c.from_bus, c.to_bus, p)) * c.flow_max,
             Family::flow_candidate, atc(t, c, p));
      }
    }
  }

  double v = 0.0;
  for (const auto& c : net.corridors)
    for (int p = 1; p <= c.n_max_new; ++p)
      v += c.circuit_cost * val(VarRef::build(c.from_bus, c.to_bus, p));
  for (const auto& b : net.buses) {
    v += opt.storage_cost_override.value_or(b.storage_cost) * val(VarRef::cap(b.id));
    for (int t = 1; t <= T; ++t) v += b.curtail_cost * val(VarRef::curtail(b.id, t));
  }
  rep.objective_recomputed = v;
  rep.objective_delta = std::isfinite(sol.objective) ? v - sol.objective : kInf;
  const bool objective_ok =
      std::abs(rep.objective_delta) <= tol * std::max(1.0, std::abs(v));
  rep.pass = rep.violations.empty() && objective_ok;
  return rep;
}

inline ValidationReport validate(const Network& net, const DemandScenario& sc,
                                 const PlanSolution& sol, double tol = kDefaultCheckTol) {
  CheckOptions opt;
  opt.tol = tol;
  return validate(net, sc, sol, opt);
}

struct CycleReport {
  std::map<int, double> net_energy;  // MWh per bus
  std::vector<int> flagged;          // buses where |net energy| > tol
  bool pass() const { return flagged.empty(); }
};

/// Net energy sum_t β_tk h per bus; the wrap-around and level recursion
/// rows together force it to zero.
inline CycleReport storage_cycle_check(const PlanSolution& sol, const Network& net,
                                       const DemandScenario& sc,
                                       double tol = kDefaultCheckTol) {
  CycleReport rep;
  for (const auto& b : net.buses) {
    double e = 0.0;
    for (int t = 1; t <= sc.periods; ++t) e += sol.value(VarRef::charge(b.id, t)) * sc.step_hours;
    rep.net_energy[b.id] = e;
    if (std::abs(e) > tol) rep.flagged.push_back(b.id);
  }
  return rep;
}

inline void write_report_text(std::ostream& out, const ValidationReport& r,
                              std::size_t max_listed = 50) {
  out << "verdict: " << (r.pass ? "PASS" : "FAIL") << '\n'
      << "violations: " << r.violations.size() << '\n'
      << "max_residual: " << detail::format_number(r.max_residual) << '\n'
      << "objective_recomputed: " << detail::format_number(r.objective_recomputed) << '\n'
      << "objective_delta: " << detail::format_number(r.objective_delta) << '\n';
  std::size_t n = 0;
  for (const auto& v : r.violations) {
    if (n++ == max_listed) {
      out << "  ... " << r.violations.size() - max_listed << " more\n";
      break;
    }
    out << "  " << family_name(v.family) << " [" << v.where << "] residual "
        << detail::format_number(v.residual) << " > " << detail::format_number(v.limit) << '\n';
  }
}

/// key=value lines; violation entries are numbered violation.<i>.*.
inline void write_report_kv(std::ostream& out, const ValidationReport& r) {
  out << "verdict=" << (r.pass ? "pass" : "fail") << '\n'
      << "violation_count=" << r.violations.size() << '\n'
      << "max_residual=" << detail::format_number(r.max_residual) << '\n'
      << "objective_recomputed=" << detail::format_number(r.objective_recomputed) << '\n'
      << "objective_delta=" << detail::format_number(r.objective_delta) << '\n';
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    const auto& v = r.violations[i];
    out << "violation." << i << ".family=" << family_name(v.family) << '\n'
        << "violation." << i << ".where=" << v.where << '\n'
        << "violation." << i << ".residual=" << detail::format_number(v.residual) << '\n';
  }
}

}  // namespace tep

#pragma once

// Disjunctive mixed-integer model of transmission expansion with storage:
// indexed variables, linear rows, objective, and big-M coefficients.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tep/netdata.hpp"

namespace tep {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind : std::uint8_t {
  circuit_build,   // y   (corridor, slot)
  storage_cap,     // x   (bus)
  flow_existing,   // f0  (corridor, period)
  flow_candidate,  // fc  (corridor, slot, period)
  generation,      // g   (bus, period)
  curtailment,     // r   (bus, period)
  storage_flow,    // b   (bus, period)
  storage_level,   // l   (bus, period)
  phase_angle,     // th  (bus, period)
};

/// Identifies one decision variable. Bus-indexed kinds use `bus` and leave
/// `to_bus` at 0; corridor-indexed kinds use (`bus`, `to_bus`) as the
/// corridor endpoints. `slot` and `period` are 0 when not applicable.
struct VarRef {
  VarKind kind = VarKind::generation;
  int bus = 0;
  int to_bus = 0;
  int slot = 0;
  int period = 0;

  auto operator<=>(const VarRef&) const = default;

  static VarRef build(int i, int j, int p) { return {VarKind::circuit_build, i, j, p, 0}; }
  static VarRef cap(int k) { return {VarKind::storage_cap, k, 0, 0, 0}; }
  static VarRef flow0(int i, int j, int t) { return {VarKind::flow_existing, i, j, 0, t}; }
  static VarRef flowc(int i, int j, int p, int t) {
    return {VarKind::flow_candidate, i, j, p, t};
  }
  static VarRef gen(int k, int t) { return {VarKind::generation, k, 0, 0, t}; }
  static VarRef curtail(int k, int t) { return {VarKind::curtailment, k, 0, 0, t}; }
  static VarRef charge(int k, int t) { return {VarKind::storage_flow, k, 0, 0, t}; }
  static VarRef level(int k, int t) { return {VarKind::storage_level, k, 0, 0, t}; }
  static VarRef angle(int k, int t) { return {VarKind::phase_angle, k, 0, 0, t}; }
};

using Assignment = std::map<VarRef, double>;

// ---------------------------------------------------------------------------
// Column naming
//
//   name  := prefix ( "_" uint )+
//   y_i_j_p   x_k   f0_i_j_t   fc_i_j_p_t   g_k_t   r_k_t   b_k_t   l_k_t   th_k_t
//
// Names never contain whitespace and are at most a few dozen characters.
// ---------------------------------------------------------------------------

namespace detail {

struct KindSpec {
  VarKind kind;
  const char* prefix;
  int arity;
};

inline constexpr KindSpec kKindSpecs[] = {
    {VarKind::circuit_build, "y", 3},  {VarKind::storage_cap, "x", 1},
    {VarKind::flow_existing, "f0", 3}, {VarKind::flow_candidate, "fc", 4},
    {VarKind::generation, "g", 2},     {VarKind::curtailment, "r", 2},
    {VarKind::storage_flow, "b", 2},   {VarKind::storage_level, "l", 2},
    {VarKind::phase_angle, "th", 2},
};

inline const KindSpec& spec_of(VarKind k) {
  for (const auto& s : kKindSpecs)
    if (s.kind == k) return s;
  throw std::logic_error("unknown VarKind");
}

}  // namespace detail

inline std::string var_name(const VarRef& v) {
  std::string s = detail::spec_of(v.kind).prefix;
  auto add = [&s](int x) { s += '_'; s += std::to_string(x); };
  switch (v.kind) {
    case VarKind::circuit_build: add(v.bus); add(v.to_bus); add(v.slot); break;
    case VarKind::storage_cap: add(v.bus); break;
    case VarKind::flow_existing: add(v.bus); add(v.to_bus); add(v.period); break;
    case VarKind::flow_candidate:
      add(v.bus); add(v.to_bus); add(v.slot); add(v.period); break;
    default: add(v.bus); add(v.period); break;
  }
  return s;
}

/// Inverse of var_name; nullopt for anything outside the grammar.
inline std::optional<VarRef> parse_var_name(const std::string& name) {
  auto us = name.find('_');
  if (us == std::string::npos) return std::nullopt;
  const std::string prefix = name.substr(0, us);
  const detail::KindSpec* spec = nullptr;
  for (const auto& s : detail::kKindSpecs)
    if (prefix == s.prefix) spec = &s;
  if (!spec) return std::nullopt;

  std::vector<int> idx;
  std::size_t pos = us;
  while (pos != std::string::npos && pos < name.size()) {
    std::size_t next = name.find('_', pos + 1);
    std::string part = name.substr(pos + 1, next == std::string::npos ? std::string::npos
                                                                      : next - pos - 1);
    if (part.empty() || part.size() > 9 ||
        !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    idx.push_back(std::stoi(part));
    pos = next;
  }
  if (static_cast<int>(idx.size()) != spec->arity) return std::nullopt;

  VarRef v;
  v.kind = spec->kind;
  switch (spec->kind) {
    case VarKind::circuit_build: v.bus = idx[0]; v.to_bus = idx[1]; v.slot = idx[2]; break;
    case VarKind::storage_cap: v.bus = idx[0]; break;
    case VarKind::flow_existing: v.bus = idx[0]; v.to_bus = idx[1]; v.period = idx[2]; break;
    case VarKind::flow_candidate:
      v.bus = idx[0]; v.to_bus = idx[1]; v.slot = idx[2]; v.period = idx[3]; break;
    default: v.bus = idx[0]; v.period = idx[1]; break;
  }
  if (var_name(v) != name) return std::nullopt;  // rejects leading zeros
  return v;
}

// ---------------------------------------------------------------------------
// Constraint families. The model emits rows for the first nine; the
// remaining ones are variable bounds or integrality, which the checker
// reports under their own tags.
// ---------------------------------------------------------------------------

enum class Family : std::uint8_t {
  kcl,             // node balance
  kvl_existing,    // flow = n0 * gamma * dtheta
  kvl_candidate,   // disjunctive big-M rows
  flow_existing,   // |f0| <= n0 fmax
  flow_candidate,  // |fc| <= y fmax
  storage_wrap,    // level at t = 1 continues from t = T
  storage_level,   // level recursion t = 2..T
  level_bounds,    // 0 <= l <= x
  symmetry,        // y^p >= y^{p+1}
  candidate_off,   // unbuilt candidate carries no flow
  storage_bounds,  // 0 <= x <= xmax
  gen_bounds,      // 0 <= g <= gmax
  curtail_bounds,  // 0 <= r <= d
  integrality,     // y in {0, 1}
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::kcl: return "kcl";
    case Family::kvl_existing: return "kvl_existing";
    case Family::kvl_candidate: return "kvl_candidate";
    case Family::flow_existing: return "flow_existing";
    case Family::flow_candidate: return "flow_candidate";
    case Family::storage_wrap: return "storage_wrap";
    case Family::storage_level: return "storage_level";
    case Family::level_bounds: return "level_bounds";
    case Family::symmetry: return "symmetry";
    case Family::candidate_off: return "candidate_off";
    case Family::storage_bounds: return "storage_bounds";
    case Family::gen_bounds: return "gen_bounds";
    case Family::curtail_bounds: return "curtail_bounds";
    case Family::integrality: return "integrality";
  }
  return "?";
}

enum class Sense : std::uint8_t { le, eq, ge };

struct Term {
  std::size_t var;  // index into PlanModel::variables
  double coef;
};

struct LinearConstraint {
  Family family;
  std::string name;  // row name, e.g. KCL_3_2 for period 3, bus 2
  std::vector<Term> terms;
  Sense sense;
  double rhs;
};

struct Variable {
  VarRef ref;
  double lower;
  double upper;
  bool binary;
};

struct BuildOptions {
  bool no_storage = false;
  std::optional<double> storage_cost_override;  // US$/MWh applied to every bus
};

struct Provenance {
  std::uint64_t network_hash = 0;
  std::uint64_t scenario_hash = 0;
  std::string options;
};

using CorridorKey = std::pair<int, int>;

class PlanModel {
 public:
  std::vector<Variable> variables;
  std::vector<LinearConstraint> constraints;
  std::vector<Term> objective;
  std::map<CorridorKey, double> big_m;
  Provenance provenance;

  std::optional<std::size_t> find(const VarRef& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t at(const VarRef& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw std::out_of_range("no variable " + var_name(v));
    return it->second;
  }

  std::size_t add_variable(const VarRef& ref, double lo, double hi, bool binary = false) {
    if (index_.count(ref)) throw std::logic_error("duplicate variable " + var_name(ref));
    index_.emplace(ref, variables.size());
    variables.push_back({ref, lo, hi, binary});
    return variables.size() - 1;
  }

  std::size_t count(Family f) const {
    return static_cast<std::size_t>(std::count_if(
        constraints.begin(), constraints.end(),
        [f](const LinearConstraint& c) { return c.family == f; }));
  }

  std::size_t binary_count() const {
    return static_cast<std::size_t>(std::count_if(
        variables.begin(), variables.end(), [](const Variable& v) { return v.binary; }));
  }

 private:
  std::map<VarRef, std::size_t> index_;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string join_indices(std::initializer_list<int> idx) {
  std::string s;
  for (int i : idx) {
    s += '_';
    s += std::to_string(i);
  }
  return s;
}

// Collapses repeated variables and drops exact zeros so each row lists a
// variable at most once.
inline std::vector<Term> merge_terms(std::vector<Term> terms) {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().var == t.var)
      out.back().coef += t.coef;
    else
      out.push_back(t);
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

}  // namespace detail

inline std::uint64_t network_hash(const Network& net) {
  std::ostringstream os;
  write_network(os, net);
  return detail::fnv1a(os.str());
}

inline std::uint64_t scenario_hash(const DemandScenario& sc) {
  std::ostringstream os;
  write_scenario(os, sc);
  return detail::fnv1a(os.str());
}

/// Largest |θi − θj| that one in-service circuit on `c` permits: f̄/γ.
inline double angle_spread(const Corridor& c) { return c.flow_max / c.susceptance; }

/// Disjunctive coefficient for every candidate corridor: γ_ij times the
/// shortest existing-network path between its endpoints, with edge weights
/// f̄/γ. Endpoints not joined by existing circuits fall back to the sum of
/// f̄/γ over all corridors.
inline std::map<CorridorKey, double> compute_big_m(const Network& net) {
  const std::size_t n = net.buses.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  double fallback = 0.0;
  for (const auto& c : net.corridors) {
    fallback += angle_spread(c);
    if (!c.is_existing()) continue;
    const auto a = net.bus_index(c.from_bus), b = net.bus_index(c.to_bus);
    adj[a].push_back({b, angle_spread(c)});
    adj[b].push_back({a, angle_spread(c)});
  }

  auto dijkstra = [&](std::size_t src) {
    std::vector<double> dist(n, kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (auto [v, w] : adj[u])
        if (d + w < dist[v]) {
          dist[v] = d + w;
          pq.push({dist[v], v});
        }
    }
    return dist;
  };

  std::map<CorridorKey, double> out;
  std::map<std::size_t, std::vector<double>> cache;
  for (const auto& c : net.corridors) {
    if (!c.is_candidate()) continue;
    const auto a = net.bus_index(c.from_bus), b = net.bus_index(c.to_bus);
    auto it = cache.find(a);
    if (it == cache.end()) it = cache.emplace(a, dijkstra(a)).first;
    double d = it->second[b];
    if (!std::isfinite(d)) d = fallback;
    out[{c.from_bus, c.to_bus}] = c.susceptance * d;
  }
  return out;
}

/// Assembles the full multi-period planning model. Output ordering depends
/// only on the input ordering, so identical inputs give identical models.
inline PlanModel build_model(const Network& net, const DemandScenario& sc,
                             const BuildOptions& opt = {}) {
  validate_network(net);
  validate_scenario(sc);
  if (opt.no_storage && opt.storage_cost_override)
    throw DataError("storage_cost_override conflicts with no_storage");
  if (opt.storage_cost_override &&
      !(std::isfinite(*opt.storage_cost_override) && *opt.storage_cost_override >= 0.0))
    throw DataError("storage_cost_override must be finite and >= 0");

  PlanModel m;
  m.big_m = compute_big_m(net);
  {
    std::ostringstream os;
    os << "no_storage=" << opt.no_storage << ";storage_cost=";
    if (opt.storage_cost_override) os << detail::format_number(*opt.storage_cost_override);
    m.provenance = {network_hash(net), scenario_hash(sc), os.str()};
  }

  const int T = sc.periods;
  const double h = sc.step_hours;
  const int ref = net.reference_bus();
  auto storage_bus = [&](const Bus& b) { return !opt.no_storage && b.storage_max > 0.0; };
  auto add_row = [&m](Family fam, std::string name, std::vector<Term> terms, Sense s,
                      double rhs) {
    m.constraints.push_back({fam, std::move(name), detail::merge_terms(std::move(terms)), s, rhs});
  };
  using detail::join_indices;

  // Investment columns.
  for (const auto& c : net.corridors)
    for (int p = 1; p <= c.n_max_new; ++p) {
      auto j = m.add_variable(VarRef::build(c.from_bus, c.to_bus, p), 0.0, 1.0, true);
      m.objective.push_back({j, c.circuit_cost});
    }
  for (const auto& b : net.buses) {
    if (!storage_bus(b)) continue;
    auto j = m.add_variable(VarRef::cap(b.id), 0.0, b.storage_max);
    m.objective.push_back({j, opt.storage_cost_override.value_or(b.storage_cost)});
  }

  // Operating columns, period by period.
  for (int t = 1; t <= T; ++t) {
    const auto d = demand_at(net, sc, t);
    for (std::size_t k = 0; k < net.buses.size(); ++k) {
      const auto& b = net.buses[k];
      if (b.id == ref)
        m.add_variable(VarRef::angle(b.id, t), 0.0, 0.0);
      else
        m.add_variable(VarRef::angle(b.id, t), -kInf, kInf);
      m.add_variable(VarRef::gen(b.id, t), 0.0, b.gen_max);
      auto r = m.add_variable(VarRef::curtail(b.id, t), 0.0, d[k]);
      m.objective.push_back({r, b.curtail_cost});
      if (storage_bus(b)) {
        m.add_variable(VarRef::charge(b.id, t), -kInf, kInf);
        m.add_variable(VarRef::level(b.id, t), 0.0, kInf);
      }
    }
    for (const auto& c : net.corridors) {
      if (c.is_existing()) m.add_variable(VarRef::flow0(c.from_bus, c.to_bus, t), -kInf, kInf);
      for (int p = 1; p <= c.n_max_new; ++p)
        m.add_variable(VarRef::flowc(c.from_bus, c.to_bus, p, t), -kInf, kInf);
    }
  }

  // Node balance. Incidence is +1 at the from bus and -1 at the to bus; the
  // angle rows below use the matching orientation, so a positive flow runs
  // toward the from bus.
  for (int t = 1; t <= T; ++t) {
    const auto d = demand_at(net, sc, t);
    for (std::size_t k = 0; k < net.buses.size(); ++k) {
      const auto& b = net.buses[k];
      std::vector<Term> terms;
      for (const auto& c : net.corridors) {
        double sign = c.from_bus == b.id ? 1.0 : (c.to_bus == b.id ? -1.0 : 0.0);
        if (sign == 0.0) continue;
        if (c.is_existing()) terms.push_back({m.at(VarRef::flow0(c.from_bus, c.to_bus, t)), sign});
        for (int p = 1; p <= c.n_max_new; ++p)
          terms.push_back({m.at(VarRef::flowc(c.from_bus, c.to_bus, p, t)), sign});
      }
      terms.push_back({m.at(VarRef::gen(b.id, t)), 1.0});
      terms.push_back({m.at(VarRef::curtail(b.id, t)), 1.0});
      if (storage_bus(b)) terms.push_back({m.at(VarRef::charge(b.id, t)), -1.0});
      add_row(Family::kcl, "KCL" + join_indices({t, b.id}), std::move(terms), Sense::eq, d[k]);
    }
  }

  for (int t = 1; t <= T; ++t)
    for (const auto& c : net.corridors) {
      if (!c.is_existing()) continue;
      const double g = c.susceptance * c.n_existing;
      add_row(Family::kvl_existing, "KVL0" + join_indices({t, c.from_bus, c.to_bus}),
              {{m.at(VarRef::flow0(c.from_bus, c.to_bus, t)), 1.0},
               {m.at(VarRef::angle(c.from_bus, t)), -g},
               {m.at(VarRef::angle(c.to_bus, t)), g}},
              Sense::eq, 0.0);
    }

  // |f - γ(θi - θj)| <= M (1 - y)
  for (int t = 1; t <= T; ++t)
    for (const auto& c : net.corridors)
      for (int p = 1; p <= c.n_max_new; ++p) {
        const double M = m.big_m.at({c.from_bus, c.to_bus});
        const double g = c.susceptance;
        const auto f = m.at(VarRef::flowc(c.from_bus, c.to_bus, p, t));
        const auto ti = m.at(VarRef::angle(c.from_bus, t));
        const auto tj = m.at(VarRef::angle(c.to_bus, t));
        const auto y = m.at(VarRef::build(c.from_bus, c.to_bus, p));
        const auto idx = join_indices({t, c.from_bus, c.to_bus, p});
        add_row(Family::kvl_candidate, "KVLCU" + idx,
                {{f, 1.0}, {ti, -g}, {tj, g}, {y, M}}, Sense::le, M);
        add_row(Family::kvl_candidate, "KVLCL" + idx,
                {{f, -1.0}, {ti, g}, {tj, -g}, {y, M}}, Sense::le, M);
      }

  for (int t = 1; t <= T; ++t)
    for (const auto& c : net.corridors) {
      if (!c.is_existing()) continue;
      const auto f = m.at(VarRef::flow0(c.from_bus, c.to_bus, t));
      const double cap = c.n_existing * c.flow_max;
      const auto idx = join_indices({t, c.from_bus, c.to_bus});
      add_row(Family::flow_existing, "FLOW0U" + idx, {{f, 1.0}}, Sense::le, cap);
      add_row(Family::flow_existing, "FLOW0L" + idx, {{f, -1.0}}, Sense::le, cap);
    }

  for (int t = 1; t <= T; ++t)
    for (const auto& c : net.corridors)
      for (int p = 1; p <= c.n_max_new; ++p) {
        const auto f = m.at(VarRef::flowc(c.from_bus, c.to_bus, p, t));
        const auto y = m.at(VarRef::build(c.from_bus, c.to_bus, p));
        const auto idx = join_indices({t, c.from_bus, c.to_bus, p});
        add_row(Family::flow_candidate, "FLOWCU" + idx, {{f, 1.0}, {y, -c.flow_max}}, Sense::le, 0.0);
        add_row(Family::flow_candidate, "FLOWCL" + idx, {{f, -1.0}, {y, -c.flow_max}}, Sense::le, 0.0);
      }

  // Storage: l_1 = l_T + h β_1, l_t = l_{t-1} + h β_t, l_t <= x.
  for (const auto& b : net.buses) {
    if (!storage_bus(b)) continue;
    add_row(Family::storage_wrap, "WRAP" + join_indices({b.id}),
            {{m.at(VarRef::level(b.id, 1)), 1.0},
             {m.at(VarRef::level(b.id, T)), -1.0},
             {m.at(VarRef::charge(b.id, 1)), -h}},
            Sense::eq, 0.0);
  }
  for (int t = 2; t <= T; ++t)
    for (const auto& b : net.buses) {
      if (!storage_bus(b)) continue;
      add_row(Family::storage_level, "LEVEL" + join_indices({t, b.id}),
              {{m.at(VarRef::level(b.id, t)), 1.0},
               {m.at(VarRef::level(b.id, t - 1)), -1.0},
               {m.at(VarRef::charge(b.id, t)), -h}},
              Sense::eq, 0.0);
    }
  for (int t = 1; t <= T; ++t)
    for (const auto& b : net.buses) {
      if (!storage_bus(b)) continue;
      add_row(Family::level_bounds, "CAP" + join_indices({t, b.id}),
              {{m.at(VarRef::level(b.id, t)), 1.0}, {m.at(VarRef::cap(b.id)), -1.0}},
              Sense::le, 0.0);
    }

  for (const auto& c : net.corridors)
    for (int p = 1; p + 1 <= c.n_max_new; ++p)
      add_row(Family::symmetry, "SYM" + join_indices({c.from_bus, c.to_bus, p}),
              {{m.at(VarRef::build(c.from_bus, c.to_bus, p + 1)), 1.0},
               {m.at(VarRef::build(c.from_bus, c.to_bus, p)), -1.0}},
              Sense::le, 0.0);

  return m;
}

/// Inner product of the objective with `a`; throws when an objective
/// variable is missing from the assignment.
inline double objective_value(const PlanModel& m, const Assignment& a) {
  double v = 0.0;
  for (const auto& term : m.objective) {
    const auto& ref = m.variables[term.var].ref;
    auto it = a.find(ref);
    if (it == a.end()) throw std::out_of_range("assignment lacks " + var_name(ref));
    v += term.coef * it->second;
  }
  return v;
}

/// Circuit investment part of the objective (US$).
inline double circuit_investment(const PlanModel& m, const Assignment& a) {
  double v = 0.0;
  for (const auto& term : m.objective) {
    const auto& ref = m.variables[term.var].ref;
    if (ref.kind != VarKind::circuit_build) continue;
    auto it = a.find(ref);
    if (it != a.end()) v += term.coef * it->second;
  }
  return v;
}

/// Stable digest of the full model structure, used to confirm that builds
/// are deterministic.
inline std::uint64_t model_fingerprint(const PlanModel& m) {
  std::uint64_t h = detail::fnv1a("tep-model");
  auto mix = [&h](const std::string& s) { h = detail::fnv1a(s + '\n', h); };
  for (const auto& v : m.variables)
    mix(var_name(v.ref) + ' ' + detail::format_number(v.lower) + ' ' +
        detail::format_number(v.upper) + (v.binary ? " B" : " C"));
  for (const auto& c : m.constraints) {
    std::string s = c.name + ' ' + std::to_string(static_cast<int>(c.sense)) + ' ' +
                    detail::format_number(c.rhs);
    for (const auto& t : c.terms)
      s += ' ' + std::to_string(t.var) + ':' + detail::format_number(t.coef);
    mix(s);
  }
  for (const auto& t : m.objective)
    mix(std::to_string(t.var) + ':' + detail::format_number(t.coef));
  return h;
}

}  // namespace tep

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.
//
// usage: tep_acceptance [--work-dir DIR] [--only 1,3,5]

#include <sys/stat.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "support/probes.hpp"
#include "tep/checker.hpp"
#include "tep/oracle.hpp"
#include "tep/sweep.hpp"

namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-6;
constexpr double kGarverOptimum = 200000.0;
constexpr double kIeee25Optimum = 107706e3;

struct Outcome {
  int id;
  bool pass;
  std::string detail;
};

struct Solved {
  std::string label;
  tep::Network net;
  tep::DemandScenario sc;
  tep::CheckOptions opt;
  tep::PlanSolution sol;
};

bool rel_eq(double a, double b, double tol = kTol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

std::string num(double v) { return tep::detail::format_number(v); }

class Run {
 public:
  Run(fs::path work, std::set<int> only) : work_(std::move(work)), only_(std::move(only)) {
    fs::create_directories(work_);
    cmd_ = fixtures::highs_cmd();
  }

  bool wanted(int id) const { return only_.empty() || only_.count(id); }

  void report(int id, bool pass, const std::string& detail) {
    outcomes_.push_back({id, pass, detail});
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail
              << std::endl;
  }

  void note(const std::string& s) { std::cout << "  note: " << s << std::endl; }

  tep::SolverConfig cfg(double time_limit) const { return fixtures::config(cmd_, time_limit); }

  bool have_solver() const { return !cmd_.empty(); }

  void keep(Solved s) { solved_.push_back(std::move(s)); }

  // 1. Garver static optimum.
  void garver_static() {
    if (!have_solver()) return report(1, false, "no reference MIP solver configured");
    const auto net = fixtures::garver();
    const auto sc = fixtures::peak_only();
    tep::BuildOptions bo;
    bo.no_storage = true;
    const auto m = tep::build_model(net, sc, bo);
    const auto s = tep::solve_external(m, cfg(60.0), (work_ / "garver_static").string());
    tep::CheckOptions co;
    co.no_storage = true;
    keep({"garver static", net, sc, co, s});
    const double inv = tep::circuit_investment(m, s.assignment);
    const bool ok = s.status == tep::SolveStatus::optimal && rel_eq(s.objective, kGarverOptimum) &&
                    s.gap <= 1e-12 && rel_eq(inv, kGarverOptimum);
    report(1, ok,
           "objective " + num(s.objective) + ", gap " + num(s.gap) + ", investment " + num(inv) +
               ", plan " + tep::format_circuits(tep::built_circuits(s)) + ", " +
               num(std::round(s.wall_time * 100) / 100) + " s");

    if (const auto cbc = fixtures::cbc_cmd(); !cbc.empty()) {
      const auto c = tep::solve_external(m, fixtures::config(cbc, 60.0),
                                         (work_ / "garver_static_cbc").string());
      note("second solver on the same model: objective " + num(c.objective) + ", plan " +
           tep::format_circuits(tep::built_circuits(c)));
    }
  }

  // 2. 25-bus static optimum.
  void ieee25_static() {
    const fs::path file = fs::path(fixtures::kData) / "ieee25.net";
    if (!fs::exists(file))
      return report(2, false,
                    "network data " + file.string() +
                        " is not available: the 25-bus corridor, cost and load tables "
                        "could not be obtained, so the US$107,706e3 optimum cannot be checked");
    if (!have_solver()) return report(2, false, "no reference MIP solver configured");
    const auto net = tep::load_network(file.string());
    const auto sc = fixtures::peak_only();
    tep::BuildOptions bo;
    bo.no_storage = true;
    const auto s = tep::solve_external(tep::build_model(net, sc, bo), cfg(900.0),
                                       (work_ / "ieee25_static").string());
    tep::CheckOptions co;
    co.no_storage = true;
    keep({"ieee25 static", net, sc, co, s});
    report(2, s.status == tep::SolveStatus::optimal && rel_eq(s.objective, kIeee25Optimum),
           "objective " + num(s.objective) + " status " + tep::to_string(s.status));
  }

  tep::SweepResult sweep(const std::string& scn) {
    const auto net = fixtures::garver();
    const auto sc = tep::load_scenario(fixtures::kData + "/" + scn + ".scn");
    const auto dir = work_ / ("sweep_" + scn);
    auto res = tep::run_sweep(net, sc, cfg(1800.0), 10, 200, 10, dir.string(), 1, kTol);
    std::ofstream csv(dir / "sweep.csv");
    tep::write_sweep_csv(csv, res);
    std::cout << "  sweep " << scn << ":\n";
    std::ostringstream os;
    tep::write_sweep_table(os, res);
    std::istringstream table(os.str());
    for (std::string line; std::getline(table, line);) std::cout << "    " << line << '\n';
    for (const auto& row : res.rows) {
      tep::CheckOptions co;
      co.storage_cost_override = row.storage_cost;
      if (row.solution.has_incumbent())
        keep({scn + " @" + num(row.storage_cost), net, sc, co, row.solution});
    }
    return res;
  }

  // 3. No storage at US$200/MWh on the short peak.
  void short_peak_at_200(const tep::SweepResult& r) {
    for (const auto& row : r.rows) {
      if (row.storage_cost != 200.0) continue;
      const bool ok = row.status == "optimal" && std::abs(row.total_storage) <= kTol &&
                      rel_eq(row.total_cost, kGarverOptimum);
      return report(3, ok,
                    "storage " + num(row.total_storage) + " MWh, objective " +
                        num(row.total_cost) + ", status " + row.status);
    }
    report(3, false, "sweep has no US$200/MWh point");
  }

  // Lowest sweep cost from which storage is never installed and the plan
  // costs the storage-free optimum; rows below it must all use storage.
  // Returns a negative value when the sweep does not have that shape.
  static double threshold(const tep::SweepResult& r, std::string& why) {
    std::size_t k = r.rows.size();
    while (k > 0 && r.rows[k - 1].status == "optimal" && std::abs(r.rows[k - 1].total_storage) <= kTol &&
           rel_eq(r.rows[k - 1].total_cost, kGarverOptimum))
      --k;
    if (k == r.rows.size()) {
      why = "storage still installed at the highest cost";
      return -1.0;
    }
    if (k == 0) {
      why = "no storage at any cost";
      return -1.0;
    }
    for (std::size_t i = 0; i < k; ++i) {
      const auto& row = r.rows[i];
      if (row.status != "optimal" || !(row.total_storage > kTol) ||
          !(row.total_cost < kGarverOptimum * (1 - kTol))) {
        why = "row at " + num(row.storage_cost) + " breaks the threshold shape (" + row.status +
              ", storage " + num(row.total_storage) + ")";
        return -1.0;
      }
    }
    return r.rows[k].storage_cost;
  }

  // 4. Both sweeps show a threshold and the short peak's is not lower.
  void thresholds(const tep::SweepResult& shortp, const tep::SweepResult& longp) {
    std::string ws, wl;
    const double ts = threshold(shortp, ws), tl = threshold(longp, wl);
    std::string d = "short-peak threshold " + (ts < 0 ? "none (" + ws + ")" : num(ts)) +
                    ", long-peak threshold " + (tl < 0 ? "none (" + wl + ")" : num(tl));
    report(4, ts > 0 && tl > 0 && ts >= tl, d + " US$/MWh");
  }

  // 5. Exhaustive search and the MIP solver agree on random small cases.
  void oracle_equivalence() {
    if (!have_solver()) return report(5, false, "no reference MIP solver configured");
    std::mt19937 rng(20240607);
    constexpr int kInstances = 60;
    int agree = 0, storage_cases = 0;
    std::string first_miss;
    for (int i = 0; i < kInstances; ++i) {
      const auto [net, sc] = random_case(rng);
      const auto bf = tep::brute_force_plan(net, sc);
      const auto ms = tep::solve_external(tep::build_model(net, sc), cfg(120.0),
                                          (work_ / "random" / std::to_string(i)).string());
      keep({"random " + std::to_string(i) + " exhaustive", net, sc, {}, bf});
      if (ms.has_incumbent()) keep({"random " + std::to_string(i) + " mip", net, sc, {}, ms});
      storage_cases += tep::total_storage(bf) > kTol;
      if (bf.status == tep::SolveStatus::optimal && ms.status == tep::SolveStatus::optimal &&
          rel_eq(ms.objective, bf.objective))
        ++agree;
      else if (first_miss.empty())
        first_miss = "; instance " + std::to_string(i) + ": exhaustive " + num(bf.objective) +
                     " vs mip " + num(ms.objective);
    }
    report(5, agree == kInstances && kInstances >= 50,
           std::to_string(agree) + "/" + std::to_string(kInstances) +
               " instances agree within 1e-6 relative (" + std::to_string(storage_cases) +
               " with storage built)" + first_miss);
  }

  static std::pair<tep::Network, tep::DemandScenario> random_case(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = u(rng) < 0.3 ? 2 : 3;
    tep::Network net;
    double load = 0.0;
    for (int k = 1; k <= n; ++k) {
      tep::Bus b{k, std::round(100.0 * u(rng)), 0.0, 0.0, 0.0, std::round(500.0 + 2500.0 * u(rng))};
      load += b.peak_demand;
      if (k > 1 && u(rng) < 0.5) {
        b.storage_max = std::round(100.0 * u(rng));
        b.storage_cost = std::round(5.0 + 200.0 * u(rng));
      }
      net.buses.push_back(b);
    }
    net.buses[0].gen_max = std::round(load * (0.7 + 0.6 * u(rng)));
    for (int k = 1; k < n; ++k)
      if (u(rng) < 0.3) net.buses[k].gen_max = std::round(50.0 * u(rng));
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        const int n0 = u(rng) < 0.5 ? 1 : 0;
        const int nn = static_cast<int>(3.0 * u(rng));
        if (n0 == 0 && nn == 0) continue;
        net.corridors.push_back({i, j, n0, nn, std::round(10.0 * (0.5 + 2.0 * u(rng))) / 10.0,
                                 std::round(10.0 + 60.0 * u(rng)),
                                 std::round(5000.0 + 40000.0 * u(rng))});
      }
    tep::DemandScenario sc;
    sc.periods = 1 + static_cast<int>(4.0 * u(rng));
    sc.step_hours = u(rng) < 0.5 ? 1.0 : 0.5;
    for (int t = 0; t < sc.periods; ++t) sc.profile.push_back(std::round(100.0 * (0.3 + 0.7 * u(rng))) / 100.0);
    sc.profile[static_cast<std::size_t>(rng() % sc.profile.size())] = 1.0;
    return {net, sc};
  }

  // 6. Every solution validates; every mutation probe is caught.
  void validation_suite() {
    std::size_t bad = 0;
    std::string first;
    for (const auto& s : solved_) {
      const auto rep = tep::validate(s.net, s.sc, s.sol, s.opt);
      if (!rep.pass) {
        ++bad;
        if (first.empty())
          first = "; first failure " + s.label + " (max residual " + num(rep.max_residual) +
                  ", objective delta " + num(rep.objective_delta) + ")";
      }
    }
    const auto net = probes::network();
    const auto sc = probes::scenario();
    const auto base = tep::brute_force_plan(net, sc);
    std::size_t caught = 0;
    const auto list = probes::mutations();
    std::string missed;
    for (const auto& p : list) {
      auto s = base;
      p.apply(s.assignment);
      const auto rep = tep::validate(net, sc, s, kTol);
      if (!rep.pass && rep.has(p.family))
        ++caught;
      else
        missed += std::string(" ") + tep::family_name(p.family);
    }
    const bool base_ok = tep::validate(net, sc, base, kTol).pass;
    report(6, bad == 0 && caught == list.size() && base_ok && !solved_.empty(),
           std::to_string(solved_.size() - bad) + "/" + std::to_string(solved_.size()) +
               " solutions validate at 1e-6" + first + "; " + std::to_string(caught) + "/" +
               std::to_string(list.size()) + " mutation probes caught with their family tag" +
               (missed.empty() ? "" : " (missed:" + missed + ")"));
  }

  // 7. Net stored energy over the horizon is zero.
  void storage_cycle() {
    std::size_t with = 0, bad = 0;
    double worst = 0.0;
    for (const auto& s : solved_) {
      bool any = tep::total_storage(s.sol) > 0.0;
      for (const auto& [ref, v] : s.sol.assignment)
        any = any || (ref.kind == tep::VarKind::storage_flow && v != 0.0);
      if (!any) continue;
      ++with;
      const auto rep = tep::storage_cycle_check(s.sol, s.net, s.sc, kTol);
      for (const auto& [bus, e] : rep.net_energy) worst = std::max(worst, std::abs(e));
      bad += !rep.pass();
    }
    report(7, bad == 0 && with > 0,
           std::to_string(with) + " storage-bearing solutions, largest |net energy| " +
               num(worst) + " MWh");
  }

  // 8. Storage falls and cost rises with the storage price.
  void monotonicity(const tep::SweepResult& shortp, const tep::SweepResult& longp) {
    std::string d;
    bool ok = true;
    for (const auto* r : {&shortp, &longp}) {
      std::size_t exact = 0;
      for (const auto& row : r->rows) exact += row.status == "optimal";
      const auto rep = tep::check_sweep_monotonicity(*r, kTol, kTol);
      ok = ok && rep.pass() && exact == r->rows.size();
      d += (d.empty() ? "" : "; ") + std::string(r == &shortp ? "short" : "long") + " peak " +
           std::to_string(exact) + "/" + std::to_string(r->rows.size()) + " exact, " +
           (rep.pass() ? "monotone" : "NOT monotone");
      for (const auto& n : rep.notes) note(n);
    }
    report(8, ok, d);
  }

  // 9. Desk-infeasible runs are shipped as optional scripts, not executed.
  void long_runs() {
    const fs::path script = fs::path(fixtures::kData).parent_path() / "scripts" / "long_runs.sh";
    struct stat st {};
    const bool ok = ::stat(script.c_str(), &st) == 0 && (st.st_mode & S_IXUSR);
    report(9, ok,
           ok ? "25-bus multi-period and 46-bus runs shipped as " + script.string() +
                    " (excluded from automated runs, not executed here)"
              : "missing executable " + script.string());
  }

  int finish() const {
    int failed = 0;
    for (const auto& o : outcomes_) failed += !o.pass;
    std::cout << "acceptance: " << outcomes_.size() - failed << " passed, " << failed
              << " failed" << std::endl;
    return failed == 0 ? 0 : 1;
  }

 private:
  fs::path work_;
  std::set<int> only_;
  std::string cmd_;
  std::vector<Solved> solved_;
  std::vector<Outcome> outcomes_;
};

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "tep_acceptance";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work-dir" && i + 1 < argc) {
      work = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      std::cerr << "usage: tep_acceptance [--work-dir DIR] [--only 1,3,5]\n";
      return 2;
    }
  }

  Run run(work, only);
  try {
    if (run.wanted(1)) run.garver_static();
    if (run.wanted(2)) run.ieee25_static();
    const bool need_sweeps = run.wanted(3) || run.wanted(4) || run.wanted(8);
    tep::SweepResult shortp, longp;
    if (need_sweeps && run.have_solver()) {
      shortp = run.sweep("short_peak_48");
      if (run.wanted(4) || run.wanted(8)) longp = run.sweep("long_peak_48");
    }
    if (run.wanted(3)) {
      if (run.have_solver()) run.short_peak_at_200(shortp);
      else run.report(3, false, "no reference MIP solver configured");
    }
    if (run.wanted(4)) {
      if (run.have_solver()) run.thresholds(shortp, longp);
      else run.report(4, false, "no reference MIP solver configured");
    }
    if (run.wanted(5)) run.oracle_equivalence();
    if (run.wanted(6)) run.validation_suite();
    if (run.wanted(7)) run.storage_cycle();
    if (run.wanted(8)) {
      if (run.have_solver()) run.monotonicity(shortp, longp);
      else run.report(8, false, "no reference MIP solver configured");
    }
    if (run.wanted(9)) run.long_runs();
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return run.finish();
}

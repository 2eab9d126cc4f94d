#pragma once

// Small hand-built instances and solver wiring shared by the test programs.

#include <cstdlib>
#include <random>
#include <string>

#include "tep/netdata.hpp"
#include "tep/solver.hpp"

namespace fixtures {

inline const std::string kData = TEP_DATA_DIR;

inline tep::Network garver() { return tep::load_network(kData + "/garver6.net"); }

inline tep::DemandScenario peak_only() { return {1, 1.0, {1.0}}; }

/// Bus 1 generates, bus 2 has a 30 MW load and no existing link.
inline tep::Network two_bus(double circuit_cost, double curtail_cost) {
  tep::Network net;
  net.buses.push_back({1, 0.0, 100.0, 0.0, 0.0, curtail_cost});
  net.buses.push_back({2, 30.0, 0.0, 0.0, 0.0, curtail_cost});
  net.corridors.push_back({1, 2, 0, 1, 1.0, 100.0, circuit_cost});
  return net;
}

/// Random connected instance with at most `max_slots` candidate slots.
inline tep::Network random_instance(std::mt19937& rng, int max_slots = 6) {
  std::uniform_int_distribution<int> nbus(2, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = nbus(rng);
  tep::Network net;
  double load = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double d = std::round(100.0 * u(rng));
    load += d;
    net.buses.push_back({k, d, 0.0, 0.0, 0.0, 1000.0 + std::round(2000.0 * u(rng))});
  }
  // Generation sits on bus 1 plus a random share elsewhere.
  net.buses[0].gen_max = std::round(load * (0.6 + 0.6 * u(rng)));
  for (int k = 1; k < n; ++k)
    if (u(rng) < 0.4) net.buses[k].gen_max = std::round(60.0 * u(rng));

  int slots = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const bool chain = j == i + 1;
      const int n0 = chain && u(rng) < 0.6 ? 1 : 0;
      int nn = u(rng) < 0.7 ? 1 + static_cast<int>(2.0 * u(rng)) : 0;
      nn = std::min(nn, max_slots - slots);
      if (n0 == 0 && nn == 0) {
        if (!chain || slots >= max_slots) {
          if (chain) net.corridors.push_back({i, j, 1, 0, 1.0 + 2.0 * u(rng), 20.0, 0.0});
          continue;
        }
        nn = 1;
      }
      slots += nn;
      net.corridors.push_back({i, j, n0, nn, 0.5 + 2.0 * u(rng),
                               std::round(10.0 + 60.0 * u(rng)),
                               std::round(5000.0 + 40000.0 * u(rng))});
    }
  return net;
}

#ifndef TEP_TEST_HIGHS_CMD
#define TEP_TEST_HIGHS_CMD ""
#endif
#ifndef TEP_TEST_CBC_CMD
#define TEP_TEST_CBC_CMD ""
#endif

/// The environment overrides the solver found at configure time.
inline std::string env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string(fallback);
}

/// Solver command templates, empty when the solver is unavailable.
inline std::string highs_cmd() { return env_or("TEP_HIGHS_CMD", TEP_TEST_HIGHS_CMD); }
inline std::string cbc_cmd() { return env_or("TEP_CBC_CMD", TEP_TEST_CBC_CMD); }

inline tep::SolverConfig config(const std::string& cmd, double time_limit = 600.0) {
  tep::SolverConfig cfg;
  cfg.command_template = cmd;
  cfg.time_limit = time_limit;
  cfg.rel_gap = 0.0;
  return cfg;
}

}  // namespace fixtures

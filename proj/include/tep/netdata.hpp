#pragma once

// Network and demand-scenario data model, text file ingestion, and
// piecewise-linear demand profile generation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tep {

/// Default curtailment penalty in US$ per MW per period.
inline constexpr double kDefaultCurtailCost = 1.0e6;

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the file readers; carries the 1-based line number (0 when the
/// error concerns the file as a whole).
class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& msg)
      : DataError(file + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Bus {
  int id = 0;
  double peak_demand = 0.0;   // MW
  double gen_max = 0.0;       // MW
  double storage_max = 0.0;   // MWh
  double storage_cost = 0.0;  // US$/MWh
  double curtail_cost = kDefaultCurtailCost;  // US$/(MW period)

  bool operator==(const Bus&) const = default;
};

/// A right of way between two buses holding existing and/or candidate
/// parallel circuits. Per-circuit parameters apply to every circuit on it.
struct Corridor {
  int from_bus = 0;
  int to_bus = 0;
  int n_existing = 0;
  int n_max_new = 0;
  double susceptance = 1.0;  // p.u. per circuit
  double flow_max = 0.0;     // MW per circuit
  double circuit_cost = 0.0; // US$ per circuit

  bool is_existing() const { return n_existing > 0; }
  bool is_candidate() const { return n_max_new > 0; }
  std::string label() const {
    return std::to_string(from_bus) + "-" + std::to_string(to_bus);
  }

  bool operator==(const Corridor&) const = default;
};

struct Network {
  std::vector<Bus> buses;
  std::vector<Corridor> corridors;

  /// Position of bus `id` in `buses`; throws DataError when absent.
  std::size_t bus_index(int id) const {
    for (std::size_t k = 0; k < buses.size(); ++k)
      if (buses[k].id == id) return k;
    throw DataError("unknown bus id " + std::to_string(id));
  }

  bool has_bus(int id) const {
    return std::any_of(buses.begin(), buses.end(),
                       [id](const Bus& b) { return b.id == id; });
  }

  double total_peak_demand() const {
    double s = 0.0;
    for (const auto& b : buses) s += b.peak_demand;
    return s;
  }

  int reference_bus() const {
    int ref = buses.front().id;
    for (const auto& b : buses) ref = std::min(ref, b.id);
    return ref;
  }

  bool operator==(const Network&) const = default;
};

struct DemandScenario {
  int periods = 1;
  double step_hours = 1.0;
  std::vector<double> profile;  // one fraction per period, index 0 is t = 1

  double mean() const {
    return std::accumulate(profile.begin(), profile.end(), 0.0) /
           static_cast<double>(profile.size());
  }
  double peak() const {
    return *std::max_element(profile.begin(), profile.end());
  }

  bool operator==(const DemandScenario&) const = default;
};

namespace detail {

inline bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

inline std::vector<std::string> split_fields(const std::string& line) {
  std::string body = line.substr(0, line.find('#'));
  std::istringstream in(body);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline double to_double(const std::string& tok, const std::string& file,
                        std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected a number, got '" + tok + "'");
  }
}

inline int to_int(const std::string& tok, const std::string& file,
                  std::size_t line) {
  try {
    std::size_t used = 0;
    long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected an integer, got '" + tok + "'");
  }
}

/// Shortest decimal text that reads back bit-identically; plain notation
/// for magnitudes in [1e-4, 1e15).
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return v != v ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const double a = std::abs(v);
  if (v == 0.0 || (a >= 1e-4 && a < 1e15)) {
    for (int d = 0; d <= 20; ++d) {
      std::snprintf(buf, sizeof buf, "%.*f", d, v);
      if (std::strtod(buf, nullptr) == v) return buf;
    }
  }
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace detail

/// Checks every type invariant of a network; throws DataError on the first
/// violation.
inline void validate_network(const Network& net) {
  if (net.buses.empty()) throw DataError("network has no buses");
  std::set<int> ids;
  for (const auto& b : net.buses) {
    if (b.id < 1) throw DataError("bus id must be >= 1");
    if (!ids.insert(b.id).second)
      throw DataError("duplicate bus id " + std::to_string(b.id));
    for (double v : {b.peak_demand, b.gen_max, b.storage_max, b.storage_cost,
                     b.curtail_cost})
      if (!detail::finite_nonneg(v))
        throw DataError("bus " + std::to_string(b.id) +
                        " has a negative or non-finite parameter");
  }
  std::set<std::pair<int, int>> pairs;
  for (const auto& c : net.corridors) {
    if (c.from_bus == c.to_bus)
      throw DataError("corridor " + c.label() + " is a self loop");
    if (c.from_bus > c.to_bus)
      throw DataError("corridor " + c.label() + " must list the lower bus id first");
    if (!ids.count(c.from_bus) || !ids.count(c.to_bus))
      throw DataError("corridor " + c.label() + " references an unknown bus");
    if (!pairs.insert({c.from_bus, c.to_bus}).second)
      throw DataError("duplicate corridor " + c.label());
    if (c.n_existing < 0 || c.n_max_new < 0)
      throw DataError("corridor " + c.label() + " has a negative circuit count");
    if (!(std::isfinite(c.susceptance) && c.susceptance > 0.0))
      throw DataError("corridor " + c.label() + " needs susceptance > 0");
    if (!(std::isfinite(c.flow_max) && c.flow_max > 0.0))
      throw DataError("corridor " + c.label() + " needs flow_max > 0");
    if (!detail::finite_nonneg(c.circuit_cost))
      throw DataError("corridor " + c.label() + " has an invalid cost");
  }
}

inline void validate_scenario(const DemandScenario& sc) {
  if (sc.periods < 1) throw DataError("scenario needs at least one period");
  if (!(std::isfinite(sc.step_hours) && sc.step_hours > 0.0))
    throw DataError("step_hours must be > 0");
  if (static_cast<int>(sc.profile.size()) != sc.periods)
    throw DataError("profile length does not match PERIODS");
  for (double f : sc.profile)
    if (!(f >= 0.0 && f <= 1.0)) throw DataError("profile fraction outside [0, 1]");
}

// ---------------------------------------------------------------------------
// Network file
//
//   BUS <id> <peak_MW> <gen_max_MW> <storage_max_MWh> <storage_cost> <curtail_cost>
//   CORRIDOR <i> <j> <n_existing> <n_max_new> <susceptance> <flow_max> <cost>
// ---------------------------------------------------------------------------

inline Network parse_network(std::istream& in, const std::string& name = "<network>") {
  Network net;
  std::set<int> ids;
  std::set<std::pair<int, int>> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = detail::split_fields(line);
    if (f.empty()) continue;
    if (f[0] == "BUS") {
      if (f.size() != 7) throw ParseError(name, lineno, "BUS needs 6 fields");
      Bus b;
      b.id = detail::to_int(f[1], name, lineno);
      b.peak_demand = detail::to_double(f[2], name, lineno);
      b.gen_max = detail::to_double(f[3], name, lineno);
      b.storage_max = detail::to_double(f[4], name, lineno);
      b.storage_cost = detail::to_double(f[5], name, lineno);
      b.curtail_cost = detail::to_double(f[6], name, lineno);
      if (!ids.insert(b.id).second)
        throw ParseError(name, lineno, "duplicate bus id " + f[1]);
      net.buses.push_back(b);
    } else if (f[0] == "CORRIDOR") {
      if (f.size() != 8) throw ParseError(name, lineno, "CORRIDOR needs 7 fields");
      Corridor c;
      c.from_bus = detail::to_int(f[1], name, lineno);
      c.to_bus = detail::to_int(f[2], name, lineno);
      c.n_existing = detail::to_int(f[3], name, lineno);
      c.n_max_new = detail::to_int(f[4], name, lineno);
      c.susceptance = detail::to_double(f[5], name, lineno);
      c.flow_max = detail::to_double(f[6], name, lineno);
      c.circuit_cost = detail::to_double(f[7], name, lineno);
      if (!pairs.insert({c.from_bus, c.to_bus}).second)
        throw ParseError(name, lineno, "duplicate corridor " + c.label());
      net.corridors.push_back(c);
    } else {
      throw ParseError(name, lineno, "unknown record '" + f[0] + "'");
    }
  }
  // Endpoint references are resolved after the whole file is read so that
  // corridors may precede the buses they use.
  for (const auto& c : net.corridors)
    if (!ids.count(c.from_bus) || !ids.count(c.to_bus))
      throw ParseError(name, 0, "corridor " + c.label() + " references an unknown bus");
  try {
    validate_network(net);
  } catch (const ParseError&) {
    throw;
  } catch (const DataError& e) {
    throw ParseError(name, 0, e.what());
  }
  return net;
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_network(in, path);
}

inline void write_network(std::ostream& out, const Network& net) {
  using detail::format_number;
  for (const auto& b : net.buses)
    out << "BUS " << b.id << ' ' << format_number(b.peak_demand) << ' '
        << format_number(b.gen_max) << ' ' << format_number(b.storage_max) << ' '
        << format_number(b.storage_cost) << ' ' << format_number(b.curtail_cost)
        << '\n';
  for (const auto& c : net.corridors)
    out << "CORRIDOR " << c.from_bus << ' ' << c.to_bus << ' ' << c.n_existing
        << ' ' << c.n_max_new << ' ' << format_number(c.susceptance) << ' '
        << format_number(c.flow_max) << ' ' << format_number(c.circuit_cost)
        << '\n';
}

// ---------------------------------------------------------------------------
// Scenario file
//
//   PERIODS <T>
//   STEP_HOURS <h>
//   PROFILE <t> <fraction>     (t = 1..T ascending)
// ---------------------------------------------------------------------------

inline DemandScenario parse_scenario(std::istream& in,
                                     const std::string& name = "<scenario>") {
  DemandScenario sc;
  sc.periods = 0;
  sc.step_hours = 0.0;
  bool have_periods = false, have_step = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = detail::split_fields(line);
    if (f.empty()) continue;
    if (f[0] == "PERIODS") {
      if (f.size() != 2) throw ParseError(name, lineno, "PERIODS needs 1 field");
      sc.periods = detail::to_int(f[1], name, lineno);
      if (sc.periods < 1) throw ParseError(name, lineno, "PERIODS must be >= 1");
      have_periods = true;
    } else if (f[0] == "STEP_HOURS") {
      if (f.size() != 2) throw ParseError(name, lineno, "STEP_HOURS needs 1 field");
      sc.step_hours = detail::to_double(f[1], name, lineno);
      if (!(sc.step_hours > 0.0 && std::isfinite(sc.step_hours)))
        throw ParseError(name, lineno, "STEP_HOURS must be > 0");
      have_step = true;
    } else if (f[0] == "PROFILE") {
      if (f.size() != 3) throw ParseError(name, lineno, "PROFILE needs 2 fields");
      int t = detail::to_int(f[1], name, lineno);
      if (t != static_cast<int>(sc.profile.size()) + 1)
        throw ParseError(name, lineno, "PROFILE periods must run 1..T ascending");
      double v = detail::to_double(f[2], name, lineno);
      if (!(v >= 0.0 && v <= 1.0))
        throw ParseError(name, lineno, "profile fraction " + f[2] + " outside [0, 1]");
      sc.profile.push_back(v);
    } else {
      throw ParseError(name, lineno, "unknown record '" + f[0] + "'");
    }
  }
  if (!have_periods) throw ParseError(name, 0, "missing PERIODS");
  if (!have_step) throw ParseError(name, 0, "missing STEP_HOURS");
  if (static_cast<int>(sc.profile.size()) != sc.periods)
    throw ParseError(name, 0,
                     "PERIODS " + std::to_string(sc.periods) + " but " +
                         std::to_string(sc.profile.size()) + " PROFILE lines");
  return sc;
}

inline DemandScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_scenario(in, path);
}

inline void write_scenario(std::ostream& out, const DemandScenario& sc) {
  out << "PERIODS " << sc.periods << '\n'
      << "STEP_HOURS " << detail::format_number(sc.step_hours) << '\n';
  for (int t = 0; t < sc.periods; ++t)
    out << "PROFILE " << t + 1 << ' ' << detail::format_number(sc.profile[t]) << '\n';
}

/// Demand in MW at every bus (network order) in period t (1-based).
inline std::vector<double> demand_at(const Network& net, const DemandScenario& sc,
                                     int t) {
  if (t < 1 || t > sc.periods)
    throw std::out_of_range("period " + std::to_string(t) + " outside 1.." +
                            std::to_string(sc.periods));
  const double frac = sc.profile[static_cast<std::size_t>(t - 1)];
  std::vector<double> d;
  d.reserve(net.buses.size());
  for (const auto& b : net.buses) d.push_back(frac * b.peak_demand);
  return d;
}

// ---------------------------------------------------------------------------
// Daily demand profiles
// ---------------------------------------------------------------------------

enum class ProfileKind { short_peak, long_peak, constant };

inline ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "short_peak") return ProfileKind::short_peak;
  if (s == "long_peak") return ProfileKind::long_peak;
  if (s == "constant") return ProfileKind::constant;
  throw DataError("unknown profile kind '" + s + "'");
}

/// Knot placement for the daily curves. Both curves share a flat low
/// plateau over the first `plateau_end_h` hours. The short peak then rises
/// linearly to 1.0 at `short_peak_h`; the long peak rises to 1.0 within
/// `long_rise_h` hours and holds for `long_hold_h` hours. Both then decline
/// linearly to an end-of-day level `tail_mix` of the way from plateau to
/// peak; the short peak keeps more of its evening load. The plateau level is the single calibrated unknown, chosen so
/// that mean/peak hits `target_mean_ratio`.
struct ProfileCalibration {
  double target_mean_ratio = 0.0;
  double horizon_h = 24.0;
  double plateau_end_h = 5.0;
  double short_peak_h = 16.0;
  double long_rise_h = 1.0;
  double long_hold_h = 10.0;
  double tail_mix = 0.5;  // end-of-day level = plateau + tail_mix (1 - plateau)

  static ProfileCalibration short_peak_default() {
    ProfileCalibration c;
    c.target_mean_ratio = 577.0 / 760.0;
    c.tail_mix = 0.75;
    return c;
  }
  static ProfileCalibration long_peak_default() {
    ProfileCalibration c;
    c.target_mean_ratio = 670.0 / 760.0;
    return c;
  }
};

namespace detail {

inline double interpolate(const std::vector<std::pair<double, double>>& knots,
                          double h) {
  if (h <= knots.front().first) return knots.front().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (h <= knots[i].first) {
      const auto [h0, v0] = knots[i - 1];
      const auto [h1, v1] = knots[i];
      if (h1 == h0) return v1;
      return v0 + (v1 - v0) * (h - h0) / (h1 - h0);
    }
  }
  return knots.back().second;
}

inline std::vector<double> sample_profile(ProfileKind kind, int periods,
                                          const ProfileCalibration& cal,
                                          double plateau) {
  const double tail = plateau + cal.tail_mix * (1.0 - plateau);
  std::vector<std::pair<double, double>> knots;
  if (kind == ProfileKind::short_peak) {
    knots = {{0.0, plateau},
             {cal.plateau_end_h, plateau},
             {cal.short_peak_h, 1.0},
             {cal.horizon_h, tail}};
  } else {
    const double top = cal.plateau_end_h + cal.long_rise_h;
    knots = {{0.0, plateau},
             {cal.plateau_end_h, plateau},
             {top, 1.0},
             {top + cal.long_hold_h, 1.0},
             {cal.horizon_h, tail}};
  }
  const double step = cal.horizon_h / periods;
  std::vector<double> out(static_cast<std::size_t>(periods));
  // Each period takes the curve value at its start time.
  for (int t = 0; t < periods; ++t) out[t] = interpolate(knots, t * step);
  return out;
}

}  // namespace detail

/// Builds a peak-normalized daily scenario with `periods` equal steps over the
/// calibration horizon.
inline DemandScenario generate_profile(ProfileKind kind, int periods,
                                       const ProfileCalibration& cal) {
  DemandScenario sc;
  sc.periods = periods;
  if (kind == ProfileKind::constant) {
    if (periods < 1) throw DataError("constant profile needs periods >= 1");
    sc.step_hours = cal.horizon_h / periods;
    sc.profile.assign(static_cast<std::size_t>(periods), 1.0);
    return sc;
  }
  if (periods < 4) throw DataError("peaked profiles need periods >= 4");
  sc.step_hours = cal.horizon_h / periods;

  auto ratio = [&](double plateau) {
    auto p = detail::sample_profile(kind, periods, cal, plateau);
    double mean = std::accumulate(p.begin(), p.end(), 0.0) / periods;
    return mean / *std::max_element(p.begin(), p.end());
  };
  // The mean ratio is increasing in the plateau level.
  double lo = 0.0, hi = 1.0;
  const double target = cal.target_mean_ratio;
  if (!(target < 1.0) || !(target > ratio(lo)))
    throw DataError("calibration target " + detail::format_number(target) +
                    " is unreachable: must lie in (" +
                    detail::format_number(ratio(lo)) + ", 1)");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }
  const double plateau = 0.5 * (lo + hi);
  sc.profile = detail::sample_profile(kind, periods, cal, plateau);
  const double pk = *std::max_element(sc.profile.begin(), sc.profile.end());
  if (pk < 1.0)
    throw DataError("sampling grid misses the peak; choose periods so a step "
                    "lands on the peak hour");
  for (double& v : sc.profile) v = std::clamp(v, 0.0, 1.0);
  return sc;
}

inline DemandScenario generate_profile(ProfileKind kind, int periods) {
  switch (kind) {
    case ProfileKind::short_peak:
      return generate_profile(kind, periods, ProfileCalibration::short_peak_default());
    case ProfileKind::long_peak:
      return generate_profile(kind, periods, ProfileCalibration::long_peak_default());
    default:
      return generate_profile(kind, periods, ProfileCalibration{});
  }
}

/// Lowest plateau level attained by a generated profile (value in period 1).
inline double profile_plateau(const DemandScenario& sc) { return sc.profile.front(); }

}  // namespace tep

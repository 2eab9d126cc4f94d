#pragma once

// MPS export. Sections and record layout follow the fixed format; names
// longer than eight characters simply push later fields right, which every
// mainstream reader accepts since names never contain blanks.

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tep/model.hpp"

namespace tep {

class MpsError : public std::runtime_error {
 public:
  explicit MpsError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::size_t kMaxMpsName = 255;
inline constexpr const char* kObjectiveRow = "OBJ";

namespace detail {

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + "  " : s + std::string(width - s.size() + 2, ' ');
}

inline void check_name(const std::string& s) {
  if (s.empty() || s.size() > kMaxMpsName)
    throw MpsError("MPS name '" + s.substr(0, 40) + "' is empty or longer than 255");
}

}  // namespace detail

inline void write_mps(const PlanModel& m, std::ostream& out,
                      const std::string& model_name = "TEPESS") {
  using detail::format_number;
  using detail::pad;
  for (const auto& v : m.variables) detail::check_name(var_name(v.ref));
  for (const auto& c : m.constraints) detail::check_name(c.name);

  out << "NAME          " << model_name << '\n';
  out << "ROWS\n";
  out << " N  " << kObjectiveRow << '\n';
  for (const auto& c : m.constraints) {
    const char* s = c.sense == Sense::le ? "L" : c.sense == Sense::ge ? "G" : "E";
    out << ' ' << s << "  " << c.name << '\n';
  }

  // Column-major view of the matrix, rows in model order within a column.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(m.variables.size());
  for (std::size_t i = 0; i < m.constraints.size(); ++i)
    for (const auto& t : m.constraints[i].terms) cols[t.var].push_back({i, t.coef});
  std::vector<double> obj(m.variables.size(), 0.0);
  std::vector<bool> in_obj(m.variables.size(), false);
  for (const auto& t : m.objective) {
    obj[t.var] += t.coef;
    in_obj[t.var] = true;
  }

  out << "COLUMNS\n";
  for (std::size_t j = 0; j < m.variables.size(); ++j) {
    const std::string name = var_name(m.variables[j].ref);
    // Every column is listed at least once so that BOUNDS can reference it.
    if ((in_obj[j] && obj[j] != 0.0) || cols[j].empty())
      out << "    " << pad(name, 8) << pad(kObjectiveRow, 8) << format_number(obj[j]) << '\n';
    for (auto [i, a] : cols[j])
      out << "    " << pad(name, 8) << pad(m.constraints[i].name, 8) << format_number(a)
          << '\n';
  }

  out << "RHS\n";
  for (const auto& c : m.constraints)
    if (c.rhs != 0.0)
      out << "    " << pad("RHS", 8) << pad(c.name, 8) << format_number(c.rhs) << '\n';

  out << "BOUNDS\n";
  for (const auto& v : m.variables) {
    const std::string name = var_name(v.ref);
    auto line = [&](const char* type, const std::string& val) {
      out << ' ' << type << ' ' << pad("BND", 8) << pad(name, 8) << val << '\n';
    };
    const bool lo_inf = !std::isfinite(v.lower), hi_inf = !std::isfinite(v.upper);
    if (v.binary && v.lower == 0.0 && v.upper == 1.0) {
      out << " BV " << pad("BND", 8) << name << '\n';
    } else if (v.lower == v.upper) {
      line("FX", format_number(v.lower));
    } else if (lo_inf && hi_inf) {
      out << " FR " << pad("BND", 8) << name << '\n';
    } else {
      if (lo_inf)
        out << " MI " << pad("BND", 8) << name << '\n';
      else if (v.lower != 0.0)
        line("LO", format_number(v.lower));
      if (!hi_inf) line("UP", format_number(v.upper));
    }
  }
  out << "ENDATA\n";
}

inline void write_mps(const PlanModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MpsError("cannot open " + path + " for writing");
  write_mps(m, out);
  out.flush();
  if (!out) throw MpsError("write failed for " + path);
}

}  // namespace tep

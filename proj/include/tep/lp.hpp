#pragma once

// Dense two-phase tableau simplex with Bland's anti-cycling rule. Intended
// for small linear programs (a few hundred rows) used as an exact oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tep::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { le, eq, ge };

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

/// minimize cost·x subject to rows and lower <= x <= upper.
struct Problem {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  std::size_t add_var(double c, double lo, double hi) {
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return cost.size() - 1;
  }
};

enum class Status { optimal, infeasible, unbounded, numerical_failure, too_large };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_failure: return "numerical_failure";
    case Status::too_large: return "too_large";
  }
  return "?";
}

struct Options {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-11;
  std::size_t max_rows = 500;  // general rows left after presolve
  std::size_t max_iterations = 200000;
};

struct Result {
  Status status = Status::numerical_failure;
  std::vector<double> x;
  double objective = 0.0;
  double max_residual = 0.0;  // largest row or bound violation of x
  std::size_t iterations = 0;
  std::string message;
};

/// Largest violation of any row or bound of `p` at point `x`.
inline double max_violation(const Problem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < p.lower[j]) worst = std::max(worst, p.lower[j] - x[j]);
    if (x[j] > p.upper[j]) worst = std::max(worst, x[j] - p.upper[j]);
  }
  for (const auto& r : p.rows) {
    double lhs = 0.0;
    for (auto [j, a] : r.terms) lhs += a * x[j];
    double v = 0.0;
    if (r.sense == RowSense::le) v = lhs - r.rhs;
    if (r.sense == RowSense::ge) v = r.rhs - lhs;
    if (r.sense == RowSense::eq) v = std::abs(lhs - r.rhs);
    worst = std::max(worst, v);
  }
  return worst;
}

namespace detail {

// Standard form: min c·z, A z = b, z >= 0, b >= 0.
struct Standard {
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> c;
  double c0 = 0.0;
  // x_j = offset_j + sum(sign * z_col) over the listed columns.
  std::vector<double> offset;
  std::vector<std::vector<std::pair<std::size_t, double>>> map;
};

inline bool presolve(Problem& p, const Options& opt, std::string& why) {
  // Singleton rows become bounds; empty rows are checked and dropped.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Row> kept;
    for (auto& r : p.rows) {
      std::vector<std::pair<std::size_t, double>> live;
      double rhs = r.rhs;
      for (auto [j, a] : r.terms) {
        if (a == 0.0) continue;
        if (p.lower[j] == p.upper[j])
          rhs -= a * p.lower[j];
        else
          live.push_back({j, a});
      }
      if (live.empty()) {
        const double tol = opt.feas_tol * std::max(1.0, std::abs(r.rhs));
        bool ok = (r.sense == RowSense::le && rhs >= -tol) ||
                  (r.sense == RowSense::ge && rhs <= tol) ||
                  (r.sense == RowSense::eq && std::abs(rhs) <= tol);
        if (!ok) {
          why = "constant row violated by " + std::to_string(std::abs(rhs));
          return false;
        }
        changed = true;
        continue;
      }
      if (live.size() == 1) {
        auto [j, a] = live.front();
        const double v = rhs / a;
        const bool upper_side = (r.sense == RowSense::le) == (a > 0);
        if (r.sense == RowSense::eq) {
          p.lower[j] = std::max(p.lower[j], v);
          p.upper[j] = std::min(p.upper[j], v);
        } else if (upper_side) {
          p.upper[j] = std::min(p.upper[j], v);
        } else {
          p.lower[j] = std::max(p.lower[j], v);
        }
        if (p.lower[j] > p.upper[j]) {
          if (p.lower[j] - p.upper[j] <= opt.feas_tol * std::max(1.0, std::abs(v)))
            p.upper[j] = p.lower[j];
          else {
            why = "bounds crossed on column " + std::to_string(j);
            return false;
          }
        }
        changed = true;
        continue;
      }
      r.terms = std::move(live);
      r.rhs = rhs;
      kept.push_back(std::move(r));
    }
    p.rows = std::move(kept);
  }
  return true;
}

inline Standard to_standard(const Problem& p) {
  Standard s;
  const std::size_t n = p.cost.size();
  s.offset.assign(n, 0.0);
  s.map.resize(n);
  std::size_t ncol = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (col, bound)
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = p.lower[j], hi = p.upper[j];
    if (lo == hi) {
      s.offset[j] = lo;
    } else if (std::isfinite(lo)) {
      s.offset[j] = lo;
      s.map[j] = {{ncol, 1.0}};
      if (std::isfinite(hi)) upper_rows.push_back({ncol, hi - lo});
      ++ncol;
    } else if (std::isfinite(hi)) {
      s.offset[j] = hi;
      s.map[j] = {{ncol, -1.0}};
      ++ncol;
    } else {
      s.map[j] = {{ncol, 1.0}, {ncol + 1, -1.0}};
      ncol += 2;
    }
  }
  const std::size_t structural = ncol;
  std::size_t nslack = upper_rows.size();
  for (const auto& r : p.rows)
    if (r.sense != RowSense::eq) ++nslack;
  const std::size_t total = structural + nslack;

  s.c.assign(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    s.c0 += p.cost[j] * s.offset[j];
    for (auto [col, sg] : s.map[j]) s.c[col] += sg * p.cost[j];
  }

  std::size_t slack = structural;
  for (const auto& r : p.rows) {
    std::vector<double> a(total, 0.0);
    double rhs = r.rhs;
    for (auto [j, coef] : r.terms) {
      rhs -= coef * s.offset[j];
      for (auto [col, sg] : s.map[j]) a[col] += sg * coef;
    }
    if (r.sense == RowSense::le) a[slack++] = 1.0;
    if (r.sense == RowSense::ge) a[slack++] = -1.0;
    if (rhs < 0) {
      for (double& v : a) v = -v;
      rhs = -rhs;
    }
    s.A.push_back(std::move(a));
    s.b.push_back(rhs);
  }
  for (auto [col, bound] : upper_rows) {
    std::vector<double> a(total, 0.0);
    a[col] = 1.0;
    a[slack++] = 1.0;
    s.A.push_back(std::move(a));
    s.b.push_back(bound);
  }
  return s;
}

// Solves B xb = b by Gaussian elimination with partial pivoting.
inline bool solve_dense(std::vector<std::vector<double>> B, std::vector<double> rhs,
                        std::vector<double>& out) {
  const std::size_t m = B.size();
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < m; ++i)
      if (std::abs(B[i][k]) > std::abs(B[piv][k])) piv = i;
    if (std::abs(B[piv][k]) < 1e-14) return false;
    std::swap(B[k], B[piv]);
    std::swap(rhs[k], rhs[piv]);
    for (std::size_t i = k + 1; i < m; ++i) {
      const double f = B[i][k] / B[k][k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < m; ++j) B[i][j] -= f * B[k][j];
      rhs[i] -= f * rhs[k];
    }
  }
  out.assign(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    double v = rhs[k];
    for (std::size_t j = k + 1; j < m; ++j) v -= B[k][j] * out[j];
    out[k] = v / B[k][k];
  }
  return true;
}

class Tableau {
 public:
  // Rows 0..m-1 are constraints; column `width` is the right-hand side.
  std::vector<std::vector<double>> T;
  std::vector<double> obj;  // reduced costs, last entry is -objective
  std::vector<std::size_t> basis;
  std::size_t width = 0;

  void pivot(std::size_t r, std::size_t col) {
    auto& pr = T[r];
    const double inv = 1.0 / pr[col];
    for (double& v : pr) v *= inv;
    pr[col] = 1.0;
    for (std::size_t i = 0; i < T.size(); ++i) {
      if (i == r) continue;
      const double f = T[i][col];
      if (f == 0.0) continue;
      auto& row = T[i];
      for (std::size_t j = 0; j <= width; ++j) row[j] -= f * pr[j];
      row[col] = 0.0;
    }
    const double f = obj[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= width; ++j) obj[j] -= f * pr[j];
      obj[col] = 0.0;
    }
    basis[r] = col;
  }

  void price(const std::vector<double>& c) {
    obj.assign(width + 1, 0.0);
    for (std::size_t j = 0; j < width; ++j) obj[j] = c[j];
    for (std::size_t i = 0; i < T.size(); ++i) {
      const double cb = c[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= width; ++j) obj[j] -= cb * T[i][j];
    }
  }

  // Bland's rule: lowest-index improving column; ratio ties broken by the
  // lowest basic index. Returns optimal / unbounded / numerical_failure.
  Status run(const std::vector<bool>& allowed, double dj_tol, const Options& opt,
             std::size_t& iters) {
    while (true) {
      if (++iters > opt.max_iterations) return Status::numerical_failure;
      std::size_t enter = width;
      for (std::size_t j = 0; j < width; ++j)
        if (allowed[j] && obj[j] < -dj_tol) {
          enter = j;
          break;
        }
      if (enter == width) return Status::optimal;
      std::size_t leave = T.size();
      double best = kInf;
      for (std::size_t i = 0; i < T.size(); ++i) {
        const double a = T[i][enter];
        if (a <= opt.pivot_tol) continue;
        const double ratio = T[i][width] / a;
        if (ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == T.size()) return Status::unbounded;
      pivot(leave, enter);
    }
  }
};

}  // namespace detail

/// Solves `problem` to optimality or reports why it could not.
inline Result solve(const Problem& problem, const Options& opt = {}) {
  Result res;
  Problem p = problem;
  for (std::size_t j = 0; j < p.cost.size(); ++j)
    if (p.lower[j] > p.upper[j] + opt.feas_tol) {
      res.status = Status::infeasible;
      res.message = "column " + std::to_string(j) + " has crossed bounds";
      return res;
    }
  if (!detail::presolve(p, opt, res.message)) {
    res.status = Status::infeasible;
    return res;
  }
  if (p.rows.size() > opt.max_rows) {
    res.status = Status::too_large;
    res.message = std::to_string(p.rows.size()) + " rows after presolve exceeds the "
                  "limit of " + std::to_string(opt.max_rows);
    return res;
  }
  auto s = detail::to_standard(p);
  const std::size_t m = s.A.size();
  const std::size_t nstd = s.c.size();

  // Artificial column for every row lacking a unit slack that can start basic.
  detail::Tableau tab;
  tab.basis.assign(m, 0);
  std::vector<std::size_t> art_rows;
  std::vector<long> slack_basic(m, -1);
  std::vector<std::size_t> nnz(nstd, 0);
  for (const auto& row : s.A)
    for (std::size_t j = 0; j < nstd; ++j)
      if (row[j] != 0.0) ++nnz[j];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < nstd; ++j)
      if (s.A[i][j] == 1.0 && nnz[j] == 1 && s.c[j] == 0.0) {
        slack_basic[i] = static_cast<long>(j);
        break;
      }
  for (std::size_t i = 0; i < m; ++i)
    if (slack_basic[i] < 0) art_rows.push_back(i);
  tab.width = nstd + art_rows.size();
  tab.T.assign(m, std::vector<double>(tab.width + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(s.A[i].begin(), s.A[i].end(), tab.T[i].begin());
    tab.T[i][tab.width] = s.b[i];
    if (slack_basic[i] >= 0) tab.basis[i] = static_cast<std::size_t>(slack_basic[i]);
  }
  for (std::size_t a = 0; a < art_rows.size(); ++a) {
    tab.T[art_rows[a]][nstd + a] = 1.0;
    tab.basis[art_rows[a]] = nstd + a;
  }

  double bscale = 1.0;
  for (double v : s.b) bscale = std::max(bscale, std::abs(v));
  double cscale = 1.0;
  for (double v : s.c) cscale = std::max(cscale, std::abs(v));

  std::vector<bool> allowed(tab.width, true);
  if (!art_rows.empty()) {
    std::vector<double> c1(tab.width, 0.0);
    for (std::size_t a = 0; a < art_rows.size(); ++a) c1[nstd + a] = 1.0;
    tab.price(c1);
    auto st = tab.run(allowed, opt.pivot_tol, opt, res.iterations);
    if (st != Status::optimal) {
      res.status = Status::numerical_failure;
      res.message = "phase 1 did not converge";
      return res;
    }
    if (-tab.obj[tab.width] > opt.feas_tol * bscale) {
      res.status = Status::infeasible;
      res.message = "phase 1 optimum " + std::to_string(-tab.obj[tab.width]);
      return res;
    }
    // Move zero-level artificials out of the basis, dropping redundant rows.
    for (std::size_t i = 0; i < tab.T.size();) {
      if (tab.basis[i] < nstd) {
        ++i;
        continue;
      }
      std::size_t col = nstd;
      for (std::size_t j = 0; j < nstd; ++j)
        if (std::abs(tab.T[i][j]) > 1e-9) {
          col = j;
          break;
        }
      if (col < nstd) {
        tab.pivot(i, col);
        ++i;
      } else {
        tab.T.erase(tab.T.begin() + static_cast<long>(i));
        tab.basis.erase(tab.basis.begin() + static_cast<long>(i));
        s.A.erase(s.A.begin() + static_cast<long>(i));
        s.b.erase(s.b.begin() + static_cast<long>(i));
      }
    }
    for (std::size_t j = nstd; j < tab.width; ++j) allowed[j] = false;
  }

  std::vector<double> c2(tab.width, 0.0);
  std::copy(s.c.begin(), s.c.end(), c2.begin());
  tab.price(c2);
  auto st = tab.run(allowed, opt.feas_tol * cscale, opt, res.iterations);
  if (st == Status::unbounded) {
    res.status = Status::unbounded;
    return res;
  }
  if (st != Status::optimal) {
    res.status = Status::numerical_failure;
    res.message = "phase 2 iteration limit";
    return res;
  }

  // Recompute the basic solution from the original columns to shed the
  // round-off accumulated over the pivots.
  std::vector<double> z(nstd, 0.0);
  const std::size_t mb = tab.T.size();
  std::vector<std::vector<double>> B(mb, std::vector<double>(mb, 0.0));
  for (std::size_t i = 0; i < mb; ++i)
    for (std::size_t k = 0; k < mb; ++k) B[i][k] = s.A[i][tab.basis[k]];
  std::vector<double> zb;
  if (detail::solve_dense(B, s.b, zb)) {
    for (std::size_t k = 0; k < mb; ++k) z[tab.basis[k]] = std::max(0.0, zb[k]);
  } else {
    for (std::size_t k = 0; k < mb; ++k) z[tab.basis[k]] = std::max(0.0, tab.T[k][tab.width]);
  }

  const std::size_t n = problem.cost.size();
  res.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = s.offset[j];
    for (auto [col, sg] : s.map[j]) v += sg * z[col];
    res.x[j] = v;
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += problem.cost[j] * res.x[j];
  res.max_residual = max_violation(problem, res.x);
  if (res.max_residual > opt.feas_tol * bscale) {
    res.status = Status::numerical_failure;
    res.message = "primal residual " + std::to_string(res.max_residual);
    return res;
  }
  res.status = Status::optimal;
  return res;
}

}  // namespace tep::lp

#ifndef SPACETIME_SIMPLEX_HPP_
#define SPACETIME_SIMPLEX_HPP_

#include "spacetime/error.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace spacetime::lp {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class row_sense { less_equal, greater_equal, equal };

struct row {
  std::vector<double> coefficients;
  row_sense sense = row_sense::less_equal;
  double rhs = 0.0;
  std::string label;
};

/// maximize c.x subject to rows and 0 <= x <= upper.
struct program {
  std::vector<double> objective;
  std::vector<double> upper;  // empty means unbounded above
  std::vector<row> rows;

  [[nodiscard]] auto num_variables() const noexcept { return objective.size(); }
};

enum class status { optimal, infeasible, unbounded };

struct solution {
  status state = status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::uint64_t iterations = 0;
};

namespace detail {

/// Dense bounded-variable simplex tableau. Nonbasic variables sit at 0 or at
/// their upper bound; Bland's rule picks entering and leaving variables.
class tableau {
 public:
  tableau(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> upper,
          std::vector<std::size_t> basis)
      : m_a(std::move(a))
      , m_beta(std::move(b))
      , m_upper(std::move(upper))
      , m_basis(std::move(basis))
      , m_at_upper(m_upper.size(), false)
      , m_basic_row(m_upper.size(), npos) {
    for (std::size_t r = 0; r < m_basis.size(); ++r) {
      m_basic_row[m_basis[r]] = r;
    }
  }

  /// Optimizes the given costs from the current basis.
  auto optimize(std::vector<double> const& cost, std::uint64_t& iterations) -> status {
    auto const n = m_upper.size();
    auto const m = m_basis.size();
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = cost[j];
      for (std::size_t r = 0; r < m; ++r) {
        d[j] -= cost[m_basis[r]] * m_a[r][j];
      }
    }
    for (;;) {
      std::size_t q = npos;
      for (std::size_t j = 0; j < n; ++j) {
        if (m_basic_row[j] != npos) {
          continue;
        }
        if ((!m_at_upper[j] && d[j] > tol && m_upper[j] > 0.0) || (m_at_upper[j] && d[j] < -tol)) {
          q = j;
          break;
        }
      }
      if (q == npos) {
        return status::optimal;
      }
      ++iterations;
      double const dir = m_at_upper[q] ? -1.0 : 1.0;

      double theta = m_upper[q];
      std::size_t leave_row = npos;
      for (std::size_t r = 0; r < m; ++r) {
        double const change = -dir * m_a[r][q];
        double limit = infinity;
        if (change < -tol) {
          limit = std::max(0.0, m_beta[r]) / -change;
        } else if (change > tol && std::isfinite(m_upper[m_basis[r]])) {
          limit = std::max(0.0, m_upper[m_basis[r]] - m_beta[r]) / change;
        } else {
          continue;
        }
        // Ties: a bound flip wins, otherwise the smallest basic index leaves.
        if (limit < theta - tol || (limit <= theta + tol && leave_row != npos && m_basis[r] < m_basis[leave_row])) {
          theta = limit;
          leave_row = r;
        }
      }
      if (!std::isfinite(theta)) {
        return status::unbounded;
      }

      for (std::size_t r = 0; r < m; ++r) {
        m_beta[r] -= theta * dir * m_a[r][q];
      }
      if (leave_row == npos) {
        m_at_upper[q] = !m_at_upper[q];
        continue;
      }

      double const entering_value = m_at_upper[q] ? m_upper[q] - theta : theta;
      auto const leaving = m_basis[leave_row];
      double const change = -dir * m_a[leave_row][q];
      m_at_upper[leaving] = change > 0.0;
      m_basic_row[leaving] = npos;

      pivot(leave_row, q, d);
      m_basis[leave_row] = q;
      m_basic_row[q] = leave_row;
      m_at_upper[q] = false;
      m_beta[leave_row] = entering_value;
    }
  }

  [[nodiscard]] auto values() const -> std::vector<double> {
    std::vector<double> x(m_upper.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (m_at_upper[j]) {
        x[j] = m_upper[j];
      }
    }
    for (std::size_t r = 0; r < m_basis.size(); ++r) {
      x[m_basis[r]] = m_beta[r];
    }
    return x;
  }

  void set_upper(std::size_t j, double u) { m_upper[j] = u; }

  static constexpr double tol = 1e-9;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void pivot(std::size_t pr, std::size_t q, std::vector<double>& d) {
    auto& prow = m_a[pr];
    double const p = prow[q];
    for (auto& v : prow) {
      v /= p;
    }
    prow[q] = 1.0;
    for (std::size_t r = 0; r < m_a.size(); ++r) {
      if (r == pr) {
        continue;
      }
      double const f = m_a[r][q];
      if (f == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < prow.size(); ++j) {
        m_a[r][j] -= f * prow[j];
      }
      m_a[r][q] = 0.0;
    }
    double const f = d[q];
    for (std::size_t j = 0; j < prow.size(); ++j) {
      d[j] -= f * prow[j];
    }
    d[q] = 0.0;
  }

  std::vector<std::vector<double>> m_a;
  std::vector<double> m_beta;
  std::vector<double> m_upper;
  std::vector<std::size_t> m_basis;
  std::vector<bool> m_at_upper;
  std::vector<std::size_t> m_basic_row;
};

}  // namespace detail

/// Two-phase primal simplex. Phase one starts from an all-artificial basis;
/// artificials are then capped at 0 and phase two optimizes the objective.
[[nodiscard]] inline auto solve(program const& prog) -> solution {
  auto const n = prog.num_variables();
  auto const m = prog.rows.size();
  if (!prog.upper.empty() && prog.upper.size() != n) {
    throw error("bad_program", "upper bounds must match the variable count");
  }
  for (auto const& r : prog.rows) {
    if (r.coefficients.size() != n) {
      throw error("bad_program", "row width must match the variable count");
    }
  }

  // Columns: structural [0,n), one slack per inequality, one artificial per row.
  std::size_t slacks = 0;
  for (auto const& r : prog.rows) {
    slacks += r.sense == row_sense::equal ? 0 : 1;
  }
  auto const width = n + slacks + m;
  std::vector<std::vector<double>> a(m, std::vector<double>(width, 0.0));
  std::vector<double> b(m);
  std::vector<double> upper(width, infinity);
  for (std::size_t j = 0; j < n && !prog.upper.empty(); ++j) {
    upper[j] = prog.upper[j];
  }
  std::vector<std::size_t> basis(m);
  std::size_t s = n;
  for (std::size_t r = 0; r < m; ++r) {
    auto const& row = prog.rows[r];
    for (std::size_t j = 0; j < n; ++j) {
      a[r][j] = row.coefficients[j];
    }
    if (row.sense == row_sense::less_equal) {
      a[r][s++] = 1.0;
    } else if (row.sense == row_sense::greater_equal) {
      a[r][s++] = -1.0;
    }
    b[r] = row.rhs;
    if (b[r] < 0.0) {
      for (auto& v : a[r]) {
        v = -v;
      }
      b[r] = -b[r];
    }
    a[r][n + slacks + r] = 1.0;
    basis[r] = n + slacks + r;
  }

  solution sol;
  detail::tableau tab(std::move(a), std::move(b), std::move(upper), basis);
  std::vector<double> phase1(width, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    phase1[n + slacks + r] = -1.0;
  }
  tab.optimize(phase1, sol.iterations);
  auto x = tab.values();
  double infeasibility = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    infeasibility += x[n + slacks + r];
  }
  if (infeasibility > 1e-7) {
    sol.state = status::infeasible;
    return sol;
  }
  for (std::size_t r = 0; r < m; ++r) {
    tab.set_upper(n + slacks + r, 0.0);
  }

  std::vector<double> phase2(width, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    phase2[j] = prog.objective[j];
  }
  if (tab.optimize(phase2, sol.iterations) == status::unbounded) {
    sol.state = status::unbounded;
    return sol;
  }
  x = tab.values();
  x.resize(n);
  for (auto& v : x) {
    if (std::abs(v) < 1e-12) {
      v = 0.0;
    }
  }
  sol.state = status::optimal;
  sol.x = std::move(x);
  for (std::size_t j = 0; j < n; ++j) {
    sol.objective += prog.objective[j] * sol.x[j];
  }
  return sol;
}

}  // namespace spacetime::lp

#endif  // SPACETIME_SIMPLEX_HPP_

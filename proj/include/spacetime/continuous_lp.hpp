#ifndef SPACETIME_CONTINUOUS_LP_HPP_
#define SPACETIME_CONTINUOUS_LP_HPP_

#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"
#include "spacetime/objective.hpp"
#include "spacetime/simplex.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace spacetime {

/// Optional per-(facility, period) and per-(location, period) budget caps and
/// floors. Keys are (index, activation period); missing keys are unconstrained.
struct budget_bounds {
  using bound_map = std::map<std::pair<std::size_t, std::size_t>, double>;
  bound_map facility_max;
  bound_map facility_min;
  bound_map location_max;
  bound_map location_min;

  [[nodiscard]] auto empty() const noexcept {
    return facility_max.empty() && facility_min.empty() && location_max.empty() && location_min.empty();
  }
  friend bool operator==(budget_bounds const&, budget_bounds const&) = default;
};

/// Real-valued x_ilt: budget allocated to facility i at location l in period t.
class budget_allocation {
 public:
  budget_allocation() = default;
  budget_allocation(std::size_t facilities, std::size_t locations, std::size_t periods)
      : m_n(facilities)
      , m_m(locations)
      , m_p(periods)
      , m_amounts(facilities * locations * periods, 0.0) {}

  [[nodiscard]] auto amount(std::size_t i, std::size_t l, std::size_t t) const -> double {
    return m_amounts[(i * m_m + l) * m_p + t];
  }
  auto amount(std::size_t i, std::size_t l, std::size_t t) -> double& { return m_amounts[(i * m_m + l) * m_p + t]; }
  [[nodiscard]] auto amounts() const noexcept -> std::vector<double> const& { return m_amounts; }
  [[nodiscard]] auto num_facilities() const noexcept { return m_n; }
  [[nodiscard]] auto num_locations() const noexcept { return m_m; }
  [[nodiscard]] auto num_periods() const noexcept { return m_p; }

 private:
  std::size_t m_n = 0;
  std::size_t m_m = 0;
  std::size_t m_p = 0;
  std::vector<double> m_amounts;
};

/// Index errors and min > max conflicts. Caps above B_t are redundant, not errors.
[[nodiscard]] inline auto validate_bounds(problem_instance const& inst, budget_bounds const& bounds)
    -> std::vector<issue> {
  std::vector<issue> issues;
  auto check = [&](budget_bounds::bound_map const& map, std::size_t limit, std::string const& block) {
    for (auto const& [key, value] : map) {
      auto const ptr = "/continuous/" + block + "/" + std::to_string(key.first) + "/" + std::to_string(key.second);
      if (key.first >= limit || key.second >= inst.num_periods()) {
        issues.push_back({"index_out_of_range", "bound references unknown index", ptr});
      } else if (!(value >= 0.0)) {
        issues.push_back({"negative_value", "bound must be non-negative", ptr});
      }
    }
  };
  check(bounds.facility_max, inst.num_facilities(), "facility_max");
  check(bounds.facility_min, inst.num_facilities(), "facility_min");
  check(bounds.location_max, inst.num_locations(), "location_max");
  check(bounds.location_min, inst.num_locations(), "location_min");
  auto order = [&](budget_bounds::bound_map const& lo, budget_bounds::bound_map const& hi, std::string const& block) {
    for (auto const& [key, value] : lo) {
      auto it = hi.find(key);
      if (it != hi.end() && value > it->second + equality_tolerance) {
        issues.push_back({"bound_conflict", "minimum exceeds maximum",
                          "/continuous/" + block + "/" + std::to_string(key.first) + "/" + std::to_string(key.second)});
      }
    }
  };
  order(bounds.facility_min, bounds.facility_max, "facility_min");
  order(bounds.location_min, bounds.location_max, "location_min");
  return issues;
}

/// Caps that exceed the period budget (harmless, reported for the user).
[[nodiscard]] inline auto bound_warnings(problem_instance const& inst, budget_bounds const& bounds)
    -> std::vector<issue> {
  std::vector<issue> out;
  auto check = [&](budget_bounds::bound_map const& map, std::string const& block) {
    for (auto const& [key, value] : map) {
      if (key.second < inst.num_periods() && value > inst.budgets[key.second] + equality_tolerance) {
        out.push_back({"redundant_bound", "cap " + detail::fmt_number(value) + " exceeds budget " +
                                              detail::fmt_number(inst.budgets[key.second]),
                       "/continuous/" + block + "/" + std::to_string(key.first) + "/" + std::to_string(key.second)});
      }
    }
  };
  check(bounds.facility_max, "facility_max");
  check(bounds.location_max, "location_max");
  return out;
}

/// Per-unit-budget objective: the binary overall objective read with real x.
[[nodiscard]] inline auto allocation_value(problem_instance const& inst, budget_allocation const& x) -> double {
  auto const obj = overall_objective(inst);
  double sum = 0.0;
  for (std::size_t k = 0; k < x.amounts().size(); ++k) {
    sum += obj.coefficients()[k] * x.amounts()[k];
  }
  return sum;
}

/// The LP together with the (i, l, t) of each column.
struct continuous_program {
  lp::program program;
  std::vector<activation> columns;
};

namespace detail {

inline auto build_rows(problem_instance const& inst, budget_bounds const& bounds, std::vector<std::size_t> const& periods)
    -> continuous_program {
  auto const n = inst.num_facilities();
  auto const m = inst.num_locations();
  auto const obj = overall_objective(inst);
  continuous_program out;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> column;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < m; ++l) {
      for (auto t : periods) {
        column[{i, l, t}] = out.columns.size();
        out.columns.push_back({i, l, t});
        out.program.objective.push_back(obj.coefficient(i, l, t));
      }
    }
  }
  bool const degenerate =
      std::all_of(out.program.objective.begin(), out.program.objective.end(), [](double c) { return c == 0.0; });
  if (degenerate) {
    // Deterministic choice: the least total allocation meeting every floor.
    std::fill(out.program.objective.begin(), out.program.objective.end(), -1.0);
  }
  auto const width = out.columns.size();
  auto add = [&](std::vector<std::size_t> const& cols, lp::row_sense sense, double rhs, std::string label) {
    lp::row r;
    r.coefficients.assign(width, 0.0);
    for (auto c : cols) {
      r.coefficients[c] = 1.0;
    }
    r.sense = sense;
    r.rhs = rhs;
    r.label = std::move(label);
    out.program.rows.push_back(std::move(r));
  };
  for (auto t : periods) {
    auto const ts = std::to_string(t);
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < m; ++l) {
        all.push_back(column[{i, l, t}]);
      }
    }
    add(all, lp::row_sense::less_equal, inst.budgets[t], "budget/" + ts);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> cols;
      for (std::size_t l = 0; l < m; ++l) {
        cols.push_back(column[{i, l, t}]);
      }
      if (auto it = bounds.facility_max.find({i, t}); it != bounds.facility_max.end()) {
        add(cols, lp::row_sense::less_equal, it->second, "facility_max/" + inst.facilities[i].id + "/" + ts);
      }
      if (auto it = bounds.facility_min.find({i, t}); it != bounds.facility_min.end()) {
        add(cols, lp::row_sense::greater_equal, it->second, "facility_min/" + inst.facilities[i].id + "/" + ts);
      }
    }
    for (std::size_t l = 0; l < m; ++l) {
      std::vector<std::size_t> cols;
      for (std::size_t i = 0; i < n; ++i) {
        cols.push_back(column[{i, l, t}]);
      }
      if (auto it = bounds.location_max.find({l, t}); it != bounds.location_max.end()) {
        add(cols, lp::row_sense::less_equal, it->second, "location_max/" + inst.locations[l].id + "/" + ts);
      }
      if (auto it = bounds.location_min.find({l, t}); it != bounds.location_min.end()) {
        add(cols, lp::row_sense::greater_equal, it->second, "location_min/" + inst.locations[l].id + "/" + ts);
      }
    }
  }
  return out;
}

inline void require_valid_bounds(problem_instance const& inst, budget_bounds const& bounds) {
  if (auto issues = validate_bounds(inst, bounds); !issues.empty()) {
    throw validation_error(std::move(issues));
  }
}

}  // namespace detail

/// The whole program over every period: n*m*p columns.
[[nodiscard]] inline auto build_program(problem_instance const& inst, budget_bounds const& bounds)
    -> continuous_program {
  detail::require_valid_bounds(inst, bounds);
  std::vector<std::size_t> periods(inst.num_periods());
  std::iota(periods.begin(), periods.end(), std::size_t{0});
  return detail::build_rows(inst, bounds, periods);
}

/// The subprogram of a single activation period.
[[nodiscard]] inline auto build_period_program(problem_instance const& inst, budget_bounds const& bounds,
                                               std::size_t period) -> continuous_program {
  detail::require_valid_bounds(inst, bounds);
  return detail::build_rows(inst, bounds, {period});
}

struct lp_result {
  lp::status status = lp::status::infeasible;
  budget_allocation allocation;
  double objective_value = 0.0;
  /// First infeasible period, when status is infeasible.
  std::optional<std::size_t> infeasible_period;
};

namespace detail {

inline void scatter(continuous_program const& prog, std::vector<double> const& x, budget_allocation& out) {
  for (std::size_t c = 0; c < prog.columns.size(); ++c) {
    auto const& a = prog.columns[c];
    out.amount(a.facility, a.location, a.period) = x[c];
  }
}

}  // namespace detail

/// Solves the periods independently (no constraint couples them) and concatenates.
[[nodiscard]] inline auto solve_lp(problem_instance const& inst, budget_bounds const& bounds) -> lp_result {
  lp_result result;
  result.allocation = budget_allocation(inst.num_facilities(), inst.num_locations(), inst.num_periods());
  for (std::size_t t = 0; t < inst.num_periods(); ++t) {
    auto const prog = build_period_program(inst, bounds, t);
    auto const sol = lp::solve(prog.program);
    if (sol.state != lp::status::optimal) {
      result.status = sol.state;
      result.infeasible_period = t;
      return result;
    }
    detail::scatter(prog, sol.x, result.allocation);
  }
  result.status = lp::status::optimal;
  result.objective_value = allocation_value(inst, result.allocation);
  return result;
}

/// Single dense solve of the whole program, used to cross-check the decomposition.
[[nodiscard]] inline auto solve_lp_whole(problem_instance const& inst, budget_bounds const& bounds) -> lp_result {
  lp_result result;
  result.allocation = budget_allocation(inst.num_facilities(), inst.num_locations(), inst.num_periods());
  auto const prog = build_program(inst, bounds);
  auto const sol = lp::solve(prog.program);
  result.status = sol.state;
  if (sol.state == lp::status::optimal) {
    detail::scatter(prog, sol.x, result.allocation);
    result.objective_value = allocation_value(inst, result.allocation);
  }
  return result;
}

/// Every violated budget, cap or floor, with 1e-6 slack.
[[nodiscard]] inline auto check_allocation(problem_instance const& inst, budget_bounds const& bounds,
                                           budget_allocation const& x) -> feasibility_report {
  constexpr double slack = 1e-6;
  feasibility_report report;
  auto const n = inst.num_facilities();
  auto const m = inst.num_locations();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < m; ++l) {
      for (std::size_t t = 0; t < inst.num_periods(); ++t) {
        if (x.amount(i, l, t) < -slack) {
          report.violations.push_back({violation_kind::budget, "negative allocation", {i, l, t}});
        }
      }
    }
  }
  auto describe = [](std::string what, double got, char op, double limit) {
    return what + " " + detail::fmt_number(got) + " " + op + " " + detail::fmt_number(limit);
  };
  for (std::size_t t = 0; t < inst.num_periods(); ++t) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < m; ++l) {
        total += x.amount(i, l, t);
      }
    }
    if (total > inst.budgets[t] + slack) {
      report.violations.push_back(
          {violation_kind::budget, describe("period " + std::to_string(t) + " total", total, '>', inst.budgets[t]), {t}});
    }
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t l = 0; l < m; ++l) {
        sum += x.amount(i, l, t);
      }
      auto const what = "facility " + inst.facilities[i].id + " period " + std::to_string(t);
      if (auto it = bounds.facility_max.find({i, t}); it != bounds.facility_max.end() && sum > it->second + slack) {
        report.violations.push_back({violation_kind::budget, describe(what, sum, '>', it->second), {i, t}});
      }
      if (auto it = bounds.facility_min.find({i, t}); it != bounds.facility_min.end() && sum < it->second - slack) {
        report.violations.push_back({violation_kind::budget, describe(what, sum, '<', it->second), {i, t}});
      }
    }
    for (std::size_t l = 0; l < m; ++l) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sum += x.amount(i, l, t);
      }
      auto const what = "location " + inst.locations[l].id + " period " + std::to_string(t);
      if (auto it = bounds.location_max.find({l, t}); it != bounds.location_max.end() && sum > it->second + slack) {
        report.violations.push_back({violation_kind::budget, describe(what, sum, '>', it->second), {l, t}});
      }
      if (auto it = bounds.location_min.find({l, t}); it != bounds.location_min.end() && sum < it->second - slack) {
        report.violations.push_back({violation_kind::budget, describe(what, sum, '<', it->second), {l, t}});
      }
    }
  }
  return report;
}

}  // namespace spacetime

#endif  // SPACETIME_CONTINUOUS_LP_HPP_

#ifndef SPACETIME_INSTANCE_HPP_
#define SPACETIME_INSTANCE_HPP_

#include "spacetime/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace spacetime {

inline constexpr double equality_tolerance = 1e-9;

struct entity {
  std::string id;
  std::string name;

  friend bool operator==(entity const&, entity const&) = default;
};

struct precedence_pair {
  std::size_t before;
  std::size_t after;

  friend bool operator==(precedence_pair const&, precedence_pair const&) = default;
};

/// Facility/location/period data of the space-time model.
///
/// Periods run over T = {0, ..., horizon}. Activations may happen in
/// {0, ..., horizon-1}; performances accrue in {1, ..., horizon}.
/// `evaluations` is indexed [facility][criterion][location]. When
/// `period_evaluations` is non-empty it overrides the time-invariant value
/// for accrual period t and is laid out as ((i*q + j)*m + l)*(horizon+1) + t.
struct problem_instance {
  std::string name;
  std::vector<entity> facilities;
  std::vector<entity> locations;
  std::vector<entity> criteria;
  std::size_t horizon = 0;
  std::vector<std::vector<std::vector<double>>> evaluations;
  std::vector<double> costs;
  std::vector<double> budgets;
  std::vector<double> weights;
  double interest_rate = 0.0;
  std::vector<precedence_pair> precedence;
  std::vector<double> period_evaluations;

  [[nodiscard]] auto num_facilities() const noexcept { return facilities.size(); }
  [[nodiscard]] auto num_locations() const noexcept { return locations.size(); }
  [[nodiscard]] auto num_criteria() const noexcept { return criteria.size(); }
  /// Number of activation periods, i.e. |T - {p}|.
  [[nodiscard]] auto num_periods() const noexcept { return horizon; }

  [[nodiscard]] auto evaluation(std::size_t i, std::size_t j, std::size_t l) const -> double {
    return evaluations[i][j][l];
  }

  [[nodiscard]] auto evaluation(std::size_t i, std::size_t j, std::size_t l, std::size_t t) const -> double {
    if (period_evaluations.empty()) {
      return evaluations[i][j][l];
    }
    return period_evaluations[((i * num_criteria() + j) * num_locations() + l) * (horizon + 1) + t];
  }

  [[nodiscard]] auto has_period_evaluations() const noexcept { return !period_evaluations.empty(); }
};

/// v(t) = (1 + rate)^-t
[[nodiscard]] inline auto discount_factor(std::size_t t, double rate) -> double {
  return std::pow(1.0 + rate, -static_cast<double>(t));
}

struct activation {
  std::size_t facility;
  std::size_t location;
  std::size_t period;

  friend auto operator<=>(activation const&, activation const&) = default;
};

/// A 0-1 assignment x_ilt stored as its set of ones, kept sorted by
/// (facility, location, period).
class strategy {
 public:
  strategy() = default;

  explicit strategy(std::vector<activation> activations)
      : m_activations(std::move(activations)) {
    std::sort(m_activations.begin(), m_activations.end());
  }

  strategy(std::initializer_list<activation> activations)
      : strategy(std::vector<activation>(activations)) {}

  [[nodiscard]] auto activations() const noexcept -> std::vector<activation> const& { return m_activations; }
  [[nodiscard]] auto size() const noexcept { return m_activations.size(); }
  [[nodiscard]] auto empty() const noexcept { return m_activations.empty(); }
  [[nodiscard]] auto begin() const noexcept { return m_activations.begin(); }
  [[nodiscard]] auto end() const noexcept { return m_activations.end(); }

  [[nodiscard]] auto find(std::size_t facility) const -> std::optional<activation> {
    for (auto const& a : m_activations) {
      if (a.facility == facility) {
        return a;
      }
    }
    return std::nullopt;
  }

  void add(activation a) {
    m_activations.insert(std::upper_bound(m_activations.begin(), m_activations.end(), a), a);
  }

  friend bool operator==(strategy const&, strategy const&) = default;

  /// Deterministic tie-break: lexicographic order of the sorted triple sequence.
  friend auto operator<(strategy const& a, strategy const& b) -> bool {
    return std::lexicographical_compare(a.m_activations.begin(), a.m_activations.end(), b.m_activations.begin(),
                                        b.m_activations.end());
  }

 private:
  std::vector<activation> m_activations;
};

enum class violation_kind { budget, activation, precedence };

struct violation {
  violation_kind kind;
  std::string detail;
  std::vector<std::size_t> indices;
};

struct feasibility_report {
  std::vector<violation> violations;

  [[nodiscard]] auto feasible() const noexcept { return violations.empty(); }
};

[[nodiscard]] inline auto to_string(violation_kind kind) -> std::string {
  switch (kind) {
    case violation_kind::budget:
      return "budget";
    case violation_kind::activation:
      return "activation";
    case violation_kind::precedence:
      return "precedence";
  }
  return "unknown";
}

namespace detail {

inline auto has_precedence_cycle(std::size_t n, std::vector<precedence_pair> const& pairs) -> bool {
  std::vector<std::vector<std::size_t>> next(n);
  for (auto const& [a, b] : pairs) {
    if (a < n && b < n) {
      next[a].push_back(b);
    }
  }
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (state[root] != 0) {
      continue;
    }
    stack.emplace_back(root, 0);
    state[root] = 1;
    while (!stack.empty()) {
      auto& [node, edge] = stack.back();
      if (edge < next[node].size()) {
        auto succ = next[node][edge++];
        if (state[succ] == 1) {
          return true;
        }
        if (state[succ] == 0) {
          state[succ] = 1;
          stack.emplace_back(succ, 0);
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

inline auto fmt_number(double v) -> std::string {
  auto s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') {
    s.pop_back();
  }
  return s;
}

}  // namespace detail

/// Every violated invariant of the raw instance, with JSON-pointer style locations.
[[nodiscard]] inline auto validate_instance(problem_instance const& inst) -> std::vector<issue> {
  std::vector<issue> issues;
  auto const n = inst.num_facilities();
  auto const q = inst.num_criteria();
  auto const m = inst.num_locations();

  if (inst.horizon == 0) {
    issues.push_back({"invalid_horizon", "horizon must be at least 1", "/meta/horizon"});
  }
  if (!(inst.interest_rate >= 0.0)) {
    issues.push_back({"negative_value", "interest rate must be non-negative", "/meta/interest_rate"});
  }

  if (inst.evaluations.size() != n) {
    issues.push_back({"missing_evaluation", "evaluations must have one row per facility", "/evaluations"});
  }
  for (std::size_t i = 0; i < std::min(n, inst.evaluations.size()); ++i) {
    auto const& row = inst.evaluations[i];
    auto const base = "/evaluations/" + std::to_string(i);
    if (row.size() != q) {
      issues.push_back({"missing_evaluation", "facility row must have one entry per criterion", base});
      continue;
    }
    for (std::size_t j = 0; j < q; ++j) {
      if (row[j].size() != m) {
        issues.push_back({"missing_evaluation", "criterion row must have one entry per location",
                          base + "/" + std::to_string(j)});
        continue;
      }
      for (std::size_t l = 0; l < m; ++l) {
        if (!(row[j][l] >= 0.0)) {
          issues.push_back({"negative_value", "evaluation must be non-negative",
                            base + "/" + std::to_string(j) + "/" + std::to_string(l)});
        }
      }
    }
  }

  if (inst.costs.size() != n) {
    issues.push_back({"missing_value", "costs must have one entry per facility", "/costs"});
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(inst.costs[i] > 0.0)) {
        issues.push_back({"negative_value", "cost must be positive", "/costs/" + std::to_string(i)});
      }
    }
  }

  if (inst.budgets.size() != inst.horizon) {
    issues.push_back({"missing_value", "budgets must have one entry per activation period 0..p-1", "/budgets"});
  } else {
    for (std::size_t t = 0; t < inst.horizon; ++t) {
      if (!(inst.budgets[t] >= 0.0)) {
        issues.push_back({"negative_value", "budget must be non-negative", "/budgets/" + std::to_string(t)});
      }
    }
  }

  if (inst.weights.size() != q) {
    issues.push_back({"missing_value", "weights must have one entry per criterion", "/weights"});
  } else {
    bool negative = false;
    for (std::size_t j = 0; j < q; ++j) {
      if (!(inst.weights[j] >= 0.0)) {
        negative = true;
        issues.push_back({"negative_value", "weight must be non-negative", "/weights/" + std::to_string(j)});
      }
    }
    auto const sum = std::accumulate(inst.weights.begin(), inst.weights.end(), 0.0);
    if (!negative && std::abs(sum - 1.0) > equality_tolerance) {
      issues.push_back({"weight_sum", "weights sum " + detail::fmt_number(sum) + " != 1", "/weights"});
    }
  }

  for (std::size_t k = 0; k < inst.precedence.size(); ++k) {
    auto const& [a, b] = inst.precedence[k];
    if (a >= n || b >= n) {
      issues.push_back({"index_out_of_range", "precedence references unknown facility",
                        "/precedence/" + std::to_string(k)});
    } else if (a == b) {
      issues.push_back({"precedence_cycle", "precedence cycle", "/precedence/" + std::to_string(k)});
    }
  }
  if (detail::has_precedence_cycle(n, inst.precedence)) {
    issues.push_back({"precedence_cycle", "precedence cycle", "/precedence"});
  }

  if (!inst.period_evaluations.empty() && inst.period_evaluations.size() != n * q * m * (inst.horizon + 1)) {
    issues.push_back({"missing_evaluation", "per-period evaluation table has the wrong size", "/evaluations"});
  }
  return issues;
}

/// Returns the instance if valid, throws validation_error listing every issue otherwise.
[[nodiscard]] inline auto validated(problem_instance inst) -> problem_instance {
  auto issues = validate_instance(inst);
  if (!issues.empty()) {
    throw validation_error(std::move(issues));
  }
  return inst;
}

/// Index errors on a strategy (unknown facility/location, period outside T - {p}).
[[nodiscard]] inline auto validate_strategy(problem_instance const& inst, strategy const& x) -> std::vector<issue> {
  std::vector<issue> issues;
  std::size_t k = 0;
  for (auto const& a : x) {
    auto const ptr = "/activations/" + std::to_string(k++);
    if (a.facility >= inst.num_facilities()) {
      issues.push_back({"index_out_of_range", "unknown facility", ptr + "/facility"});
    }
    if (a.location >= inst.num_locations()) {
      issues.push_back({"index_out_of_range", "unknown location", ptr + "/location"});
    }
    if (a.period >= inst.num_periods()) {
      issues.push_back({"index_out_of_range", "activation period must be < horizon", ptr + "/period"});
    }
  }
  return issues;
}

/// Budget per period, at most one activation per facility, weak precedence.
[[nodiscard]] inline auto check_feasibility(problem_instance const& inst, strategy const& x) -> feasibility_report {
  if (auto issues = validate_strategy(inst, x); !issues.empty()) {
    throw validation_error(std::move(issues));
  }
  feasibility_report report;

  std::vector<double> spend(inst.num_periods(), 0.0);
  for (auto const& a : x) {
    spend[a.period] += inst.costs[a.facility];
  }
  for (std::size_t t = 0; t < inst.num_periods(); ++t) {
    if (spend[t] > inst.budgets[t] + equality_tolerance) {
      report.violations.push_back({violation_kind::budget,
                                   "period " + std::to_string(t) + " spends " + detail::fmt_number(spend[t]) +
                                       " > budget " + detail::fmt_number(inst.budgets[t]),
                                   {t}});
    }
  }

  std::vector<std::optional<std::size_t>> period_of(inst.num_facilities());
  std::vector<std::size_t> count(inst.num_facilities(), 0);
  for (auto const& a : x) {
    if (++count[a.facility] == 2) {
      report.violations.push_back({violation_kind::activation,
                                   "facility " + inst.facilities[a.facility].id + " activated more than once",
                                   {a.facility}});
    }
    period_of[a.facility] = period_of[a.facility] ? std::min(*period_of[a.facility], a.period) : a.period;
  }

  for (auto const& [before, after] : inst.precedence) {
    if (!period_of[after]) {
      continue;
    }
    if (!period_of[before] || *period_of[before] > *period_of[after]) {
      report.violations.push_back({violation_kind::precedence,
                                   inst.facilities[after].id + " activated before its predecessor " +
                                       inst.facilities[before].id,
                                   {before, after}});
    }
  }
  return report;
}

}  // namespace spacetime

#endif  // SPACETIME_INSTANCE_HPP_

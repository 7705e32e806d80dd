#ifndef SPACETIME_BINARY_SOLVER_HPP_
#define SPACETIME_BINARY_SOLVER_HPP_

#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"
#include "spacetime/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace spacetime {

enum class solve_status { optimal, infeasible };

struct solve_result {
  strategy x;
  double objective_value = 0.0;
  solve_status status = solve_status::infeasible;
  std::uint64_t nodes_explored = 0;
  /// Audit mode only: pruned subtrees that contained a better completion.
  std::uint64_t unsound_prunes = 0;
};

inline constexpr std::uint64_t default_node_limit = 100'000'000;

struct solve_options {
  std::vector<linear_constraint> constraints;
  /// Re-enumerate every pruned subtree and count bound violations.
  bool audit = false;
  std::uint64_t node_limit = default_node_limit;
};

namespace detail {

struct placement {
  std::size_t location;
  std::size_t period;
};

/// Incremental budget, activation and precedence bookkeeping for a
/// depth-first walk over facilities in index order.
class search_state {
 public:
  explicit search_state(problem_instance const& inst)
      : m_inst(&inst)
      , m_remaining(inst.budgets)
      , m_period(inst.num_facilities())
      , m_closing(inst.num_facilities()) {
    for (auto const& pr : inst.precedence) {
      m_closing[std::max(pr.before, pr.after)].push_back(pr);
    }
  }

  [[nodiscard]] auto affordable(std::size_t i, std::size_t t) const -> bool {
    return m_inst->costs[i] <= m_remaining[t] + equality_tolerance;
  }

  /// Returns the budget left before placing, to be handed back to unplace.
  auto place(std::size_t i, placement o) -> double {
    auto const before = m_remaining[o.period];
    m_remaining[o.period] -= m_inst->costs[i];
    m_period[i] = o.period;
    return before;
  }
  void unplace(std::size_t i, placement o, double before) {
    m_remaining[o.period] = before;
    m_period[i].reset();
  }

  /// Precedence pairs whose both ends are decided once facility i is.
  [[nodiscard]] auto precedence_ok(std::size_t i) const -> bool {
    for (auto const& [before, after] : m_closing[i]) {
      if (m_period[after] && (!m_period[before] || *m_period[before] > *m_period[after])) {
        return false;
      }
    }
    return true;
  }

 private:
  problem_instance const* m_inst;
  std::vector<double> m_remaining;
  std::vector<std::optional<std::size_t>> m_period;
  std::vector<std::vector<precedence_pair>> m_closing;
};

inline auto all_placements(problem_instance const& inst) -> std::vector<placement> {
  std::vector<placement> out;
  for (std::size_t l = 0; l < inst.num_locations(); ++l) {
    for (std::size_t t = 0; t < inst.num_periods(); ++t) {
      out.push_back({l, t});
    }
  }
  return out;
}

inline auto prune_tolerance(double incumbent) -> double { return 1e-9 * std::max(1.0, std::abs(incumbent)); }

inline void check_shape(problem_instance const& inst, linear_objective const& obj) {
  if (obj.num_facilities() != inst.num_facilities() || obj.num_locations() != inst.num_locations() ||
      obj.num_periods() != inst.num_periods()) {
    throw error("bad_objective", "objective grid does not match the instance");
  }
}

inline auto satisfies(std::vector<linear_constraint> const& cs, strategy const& x) -> bool {
  return std::all_of(cs.begin(), cs.end(),
                     [&](auto const& c) { return c.lhs.value(x) >= c.rhs - equality_tolerance; });
}

/// Per-facility best coefficient over individually affordable placements,
/// clipped at 0 (skipping is always allowed), as suffix sums.
inline auto suffix_best(problem_instance const& inst, linear_objective const& obj) -> std::vector<double> {
  auto const n = inst.num_facilities();
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double best = 0.0;
    for (std::size_t l = 0; l < inst.num_locations(); ++l) {
      for (std::size_t t = 0; t < inst.num_periods(); ++t) {
        if (inst.costs[i] <= inst.budgets[t] + equality_tolerance) {
          best = std::max(best, obj.coefficient(i, l, t));
        }
      }
    }
    suffix[i] = suffix[i + 1] + best;
  }
  return suffix;
}

}  // namespace detail

/// Calls visit(x) for every feasible strategy. Throws when more than
/// node_limit search nodes would be visited.
inline auto for_each_feasible(problem_instance const& inst, std::function<void(strategy const&)> const& visit,
                              std::uint64_t node_limit = default_node_limit) -> std::uint64_t {
  auto const n = inst.num_facilities();
  auto const options = detail::all_placements(inst);
  detail::search_state state(inst);
  std::vector<activation> current;
  std::uint64_t nodes = 0;

  std::function<void(std::size_t)> dfs = [&](std::size_t i) {
    if (++nodes > node_limit) {
      throw error("too_large", "instance too large for exhaustive enumeration");
    }
    if (i == n) {
      visit(strategy(current));
      return;
    }
    if (state.precedence_ok(i)) {
      dfs(i + 1);
    }
    for (auto const& o : options) {
      if (!state.affordable(i, o.period)) {
        continue;
      }
      auto const left = state.place(i, o);
      if (state.precedence_ok(i)) {
        current.push_back({i, o.location, o.period});
        dfs(i + 1);
        current.pop_back();
      }
      state.unplace(i, o, left);
    }
  };
  dfs(0);
  return nodes;
}

[[nodiscard]] inline auto count_feasible(problem_instance const& inst,
                                         std::vector<linear_constraint> const& constraints = {},
                                         std::uint64_t node_limit = default_node_limit) -> std::uint64_t {
  std::uint64_t count = 0;
  for_each_feasible(
      inst,
      [&](strategy const& x) {
        if (detail::satisfies(constraints, x)) {
          ++count;
        }
      },
      node_limit);
  return count;
}

/// Exhaustive maximization (or minimization, per the objective's sense).
[[nodiscard]] inline auto brute_force(problem_instance const& inst, linear_objective const& obj,
                                      std::vector<linear_constraint> const& constraints = {},
                                      std::uint64_t node_limit = default_node_limit) -> solve_result {
  detail::check_shape(inst, obj);
  bool const maximizing = obj.objective_sense() == sense::maximize;
  solve_result best;
  best.nodes_explored = for_each_feasible(
      inst,
      [&](strategy const& x) {
        if (!detail::satisfies(constraints, x)) {
          return;
        }
        auto const v = obj.value(x);
        bool better = best.status == solve_status::infeasible;
        if (!better) {
          better = maximizing ? v > best.objective_value : v < best.objective_value;
          better = better || (v == best.objective_value && x < best.x);
        }
        if (better) {
          best.x = x;
          best.objective_value = v;
          best.status = solve_status::optimal;
        }
      },
      node_limit);
  return best;
}

/// Largest relative deviation (ideal - value)/ideal over the objectives.
[[nodiscard]] inline auto max_deviation(std::vector<deviation_objective> const& devs, strategy const& x) -> double {
  double worst = -std::numeric_limits<double>::infinity();
  for (auto const& d : devs) {
    worst = std::max(worst, d.deviation(x));
  }
  return worst;
}

namespace detail {

inline void check_deviations(problem_instance const& inst, std::vector<deviation_objective> const& devs) {
  if (devs.empty()) {
    throw error("bad_objective", "minimax needs at least one deviation");
  }
  for (std::size_t d = 0; d < devs.size(); ++d) {
    check_shape(inst, devs[d].objective);
    if (!(devs[d].ideal > 0.0)) {
      throw error("zero_ideal", "relative deviation undefined for ideal <= 0", "/deviations/" + std::to_string(d));
    }
  }
}

}  // namespace detail

/// Exhaustive minimax over relative deviations.
[[nodiscard]] inline auto brute_force(problem_instance const& inst, std::vector<deviation_objective> const& devs,
                                      std::uint64_t node_limit = default_node_limit) -> solve_result {
  detail::check_deviations(inst, devs);
  solve_result best;
  best.nodes_explored = for_each_feasible(
      inst,
      [&](strategy const& x) {
        auto const v = max_deviation(devs, x);
        if (best.status == solve_status::infeasible || v < best.objective_value ||
            (v == best.objective_value && x < best.x)) {
          best.x = x;
          best.objective_value = v;
          best.status = solve_status::optimal;
        }
      },
      node_limit);
  return best;
}

namespace detail {

/// Depth-first branch and bound over facilities in index order. `Score`
/// evaluates a complete strategy (lower is better), `Bound` gives an
/// optimistic score for a partial assignment of facilities [0, i).
class branch_and_bound {
 public:
  using score_fn = std::function<double(strategy const&)>;
  using bound_fn = std::function<double(std::size_t next, std::vector<double> const& partials)>;

  branch_and_bound(problem_instance const& inst, std::vector<linear_objective const*> tracked,
                   std::vector<std::vector<placement>> order, score_fn score, bound_fn bound,
                   std::vector<linear_constraint> const& constraints, solve_options const& opts)
      : m_inst(inst)
      , m_tracked(std::move(tracked))
      , m_order(std::move(order))
      , m_score(std::move(score))
      , m_bound(std::move(bound))
      , m_constraints(constraints)
      , m_opts(opts)
      , m_state(inst)
      , m_partials(m_tracked.size() + constraints.size(), 0.0) {
    for (auto const& c : constraints) {
      m_constraint_best.push_back(suffix_best(inst, c.lhs));
    }
  }

  auto run() -> solve_result {
    dfs(0);
    return m_best;
  }

 private:
  auto objective_at(std::size_t k) const -> linear_objective const& {
    return k < m_tracked.size() ? *m_tracked[k] : m_constraints[k - m_tracked.size()].lhs;
  }

  auto pruned(std::size_t next) const -> bool {
    for (std::size_t c = 0; c < m_constraints.size(); ++c) {
      auto const reach = m_partials[m_tracked.size() + c] + m_constraint_best[c][next];
      if (reach < m_constraints[c].rhs - equality_tolerance - prune_tolerance(m_constraints[c].rhs)) {
        return true;
      }
    }
    if (m_best.status == solve_status::infeasible) {
      return false;
    }
    auto const bound = m_bound(next, m_partials);
    return bound > m_best.objective_value + prune_tolerance(m_best.objective_value);
  }

  void audit_subtree(std::size_t next) {
    // Every feasible completion of the current prefix must be no better than the incumbent.
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
      if (i == m_inst.num_facilities()) {
        strategy x(m_current);
        if (satisfies(m_constraints, x)) {
          auto const s = m_score(x);
          if (s < m_best.objective_value) {
            ++m_best.unsound_prunes;
          }
        }
        return;
      }
      if (m_state.precedence_ok(i)) {
        walk(i + 1);
      }
      for (auto const& o : m_order[i]) {
        if (!m_state.affordable(i, o.period)) {
          continue;
        }
        auto const left = m_state.place(i, o);
        if (m_state.precedence_ok(i)) {
          m_current.push_back({i, o.location, o.period});
          walk(i + 1);
          m_current.pop_back();
        }
        m_state.unplace(i, o, left);
      }
    };
    walk(next);
  }

  void leaf() {
    strategy x(m_current);
    if (!satisfies(m_constraints, x)) {
      return;
    }
    auto const s = m_score(x);
    if (m_best.status == solve_status::infeasible || s < m_best.objective_value ||
        (s == m_best.objective_value && x < m_best.x)) {
      m_best.x = std::move(x);
      m_best.objective_value = s;
      m_best.status = solve_status::optimal;
    }
  }

  void dfs(std::size_t i) {
    if (++m_best.nodes_explored > m_opts.node_limit) {
      throw error("too_large", "branch and bound node limit exceeded");
    }
    if (i == m_inst.num_facilities()) {
      leaf();
      return;
    }
    if (pruned(i)) {
      if (m_opts.audit) {
        audit_subtree(i);
      }
      return;
    }
    for (auto const& o : m_order[i]) {
      if (!m_state.affordable(i, o.period)) {
        continue;
      }
      auto const left = m_state.place(i, o);
      if (m_state.precedence_ok(i)) {
        std::vector<double> saved = m_partials;
        for (std::size_t k = 0; k < m_partials.size(); ++k) {
          m_partials[k] += objective_at(k).coefficient(i, o.location, o.period);
        }
        m_current.push_back({i, o.location, o.period});
        dfs(i + 1);
        m_current.pop_back();
        m_partials = std::move(saved);
      }
      m_state.unplace(i, o, left);
    }
    if (m_state.precedence_ok(i)) {
      dfs(i + 1);
    }
  }

  problem_instance const& m_inst;
  std::vector<linear_objective const*> m_tracked;
  std::vector<std::vector<placement>> m_order;
  score_fn m_score;
  bound_fn m_bound;
  std::vector<linear_constraint> const& m_constraints;
  solve_options const& m_opts;
  search_state m_state;
  std::vector<double> m_partials;
  std::vector<std::vector<double>> m_constraint_best;
  std::vector<activation> m_current;
  solve_result m_best;
};

/// Placements of each facility sorted by a key, descending, ties by (l, t).
inline auto ordered_placements(problem_instance const& inst,
                               std::function<double(std::size_t, placement)> const& key)
    -> std::vector<std::vector<placement>> {
  auto const base = all_placements(inst);
  std::vector<std::vector<placement>> order(inst.num_facilities());
  for (std::size_t i = 0; i < inst.num_facilities(); ++i) {
    auto& opts = order[i];
    opts = base;
    std::stable_sort(opts.begin(), opts.end(), [&](placement a, placement b) { return key(i, a) > key(i, b); });
  }
  return order;
}

}  // namespace detail

/// Exact optimum of a linear objective over feasible 0-1 strategies, ties
/// broken towards the lexicographically smallest activation sequence.
[[nodiscard]] inline auto maximize(problem_instance const& inst, linear_objective const& obj,
                                   solve_options const& opts = {}) -> solve_result {
  detail::check_shape(inst, obj);
  double const sign = obj.objective_sense() == sense::maximize ? 1.0 : -1.0;
  linear_objective signed_obj = obj;
  if (sign < 0) {
    for (std::size_t i = 0; i < inst.num_facilities(); ++i) {
      for (std::size_t l = 0; l < inst.num_locations(); ++l) {
        for (std::size_t t = 0; t < inst.num_periods(); ++t) {
          signed_obj.coefficient(i, l, t) = -obj.coefficient(i, l, t);
        }
      }
    }
  }
  auto const best = detail::suffix_best(inst, signed_obj);
  auto order = detail::ordered_placements(
      inst, [&](std::size_t i, detail::placement o) { return signed_obj.coefficient(i, o.location, o.period); });

  // Scores are minimized internally; the score of a maximization is -value.
  detail::branch_and_bound bb(
      inst, {&obj}, std::move(order),
      [&](strategy const& x) { return -sign * obj.value(x); },
      [&](std::size_t next, std::vector<double> const& partials) { return -(sign * partials[0] + best[next]); },
      opts.constraints, opts);
  auto result = bb.run();
  if (result.status == solve_status::optimal) {
    result.objective_value = obj.value(result.x);
  }
  return result;
}

/// Minimizes the largest relative deviation from each objective's ideal.
[[nodiscard]] inline auto solve_minimax(problem_instance const& inst, std::vector<deviation_objective> const& devs,
                                        solve_options const& opts = {}) -> solve_result {
  detail::check_deviations(inst, devs);
  std::vector<std::vector<double>> best;
  std::vector<linear_objective const*> tracked;
  for (auto const& d : devs) {
    best.push_back(detail::suffix_best(inst, d.objective));
    tracked.push_back(&d.objective);
  }
  auto order = detail::ordered_placements(inst, [&](std::size_t i, detail::placement o) {
    double key = 0.0;
    for (auto const& d : devs) {
      key += d.objective.coefficient(i, o.location, o.period) / d.ideal;
    }
    return key;
  });

  detail::branch_and_bound bb(
      inst, std::move(tracked), std::move(order), [&](strategy const& x) { return max_deviation(devs, x); },
      [&](std::size_t next, std::vector<double> const& partials) {
        double lb = -std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < devs.size(); ++d) {
          lb = std::max(lb, (devs[d].ideal - (partials[d] + best[d][next])) / devs[d].ideal);
        }
        return lb;
      },
      opts.constraints, opts);
  return bb.run();
}

/// A non-dominated objective vector with its lexicographically smallest witness.
struct nondominated_point {
  strategy x;
  std::vector<double> values;
};

/// True when a >= b componentwise and a != b.
[[nodiscard]] inline auto dominates(std::vector<double> const& a, std::vector<double> const& b) -> bool {
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) {
      return false;
    }
    strict = strict || a[k] > b[k];
  }
  return strict;
}

/// Every Pareto-maximal objective vector over feasible strategies satisfying
/// the constraints, sorted by vector descending.
[[nodiscard]] inline auto enumerate_nondominated(problem_instance const& inst,
                                                 std::vector<linear_objective> const& objectives,
                                                 std::vector<linear_constraint> const& constraints = {},
                                                 std::uint64_t node_limit = default_node_limit)
    -> std::vector<nondominated_point> {
  for (auto const& o : objectives) {
    detail::check_shape(inst, o);
  }
  std::map<std::vector<double>, strategy> witnesses;
  for_each_feasible(
      inst,
      [&](strategy const& x) {
        if (!detail::satisfies(constraints, x)) {
          return;
        }
        std::vector<double> v;
        v.reserve(objectives.size());
        for (auto const& o : objectives) {
          v.push_back(o.value(x));
        }
        auto [it, inserted] = witnesses.try_emplace(std::move(v), x);
        if (!inserted && x < it->second) {
          it->second = x;
        }
      },
      node_limit);

  std::vector<nondominated_point> points;
  for (auto const& [v, x] : witnesses) {
    points.push_back({x, v});
  }
  std::vector<nondominated_point> front;
  for (auto const& a : points) {
    bool dominated = std::any_of(points.begin(), points.end(),
                                 [&](auto const& b) { return dominates(b.values, a.values); });
    if (!dominated) {
      front.push_back(a);
    }
  }
  std::sort(front.begin(), front.end(), [](auto const& a, auto const& b) { return a.values > b.values; });
  return front;
}

}  // namespace spacetime

#endif  // SPACETIME_BINARY_SOLVER_HPP_

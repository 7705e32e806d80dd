#ifndef SPACETIME_OBJECTIVE_HPP_
#define SPACETIME_OBJECTIVE_HPP_

#include "spacetime/dashboard.hpp"
#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"

#include <string>
#include <vector>

namespace spacetime {

enum class sense { maximize, minimize };

/// A linear functional of x: one coefficient per variable x_ilt on the grid
/// I x L x (T - {p}), laid out as (i*m + l)*p + t.
class linear_objective {
 public:
  linear_objective() = default;
  linear_objective(std::size_t facilities, std::size_t locations, std::size_t periods, std::string name = {})
      : m_n(facilities)
      , m_m(locations)
      , m_p(periods)
      , m_coefficients(facilities * locations * periods, 0.0)
      , m_name(std::move(name)) {}

  [[nodiscard]] auto num_facilities() const noexcept { return m_n; }
  [[nodiscard]] auto num_locations() const noexcept { return m_m; }
  [[nodiscard]] auto num_periods() const noexcept { return m_p; }
  [[nodiscard]] auto name() const noexcept -> std::string const& { return m_name; }
  void set_name(std::string name) { m_name = std::move(name); }
  [[nodiscard]] auto objective_sense() const noexcept { return m_sense; }
  void set_sense(sense s) noexcept { m_sense = s; }

  [[nodiscard]] auto coefficient(std::size_t i, std::size_t l, std::size_t t) const -> double {
    return m_coefficients[(i * m_m + l) * m_p + t];
  }
  auto coefficient(std::size_t i, std::size_t l, std::size_t t) -> double& {
    return m_coefficients[(i * m_m + l) * m_p + t];
  }
  [[nodiscard]] auto coefficients() const noexcept -> std::vector<double> const& { return m_coefficients; }

  /// Sum of coefficients over the activations, accumulated in facility order
  /// from 0.0. Every solver uses this same order so values compare exactly.
  [[nodiscard]] auto value(strategy const& x) const -> double {
    double sum = 0.0;
    for (auto const& a : x) {
      sum += coefficient(a.facility, a.location, a.period);
    }
    return sum;
  }

 private:
  std::size_t m_n = 0;
  std::size_t m_m = 0;
  std::size_t m_p = 0;
  std::vector<double> m_coefficients;
  std::string m_name;
  sense m_sense = sense::maximize;
};

/// One cell of one dashboard table, used as an objective.
struct aggregate_spec {
  axis_selection axes;
  std::vector<std::size_t> cell;  // coordinates of the retained axes, period 1-based
};

/// The objective whose value on any strategy is the dashboard cell named by `spec`.
[[nodiscard]] inline auto linearize(problem_instance const& inst, aggregate_spec const& spec,
                                    stakeholder_set const* stakeholders = nullptr) -> linear_objective {
  auto const& sel = spec.axes;
  detail::check_selection(sel, stakeholders);
  auto const ax = sel.kept.axes();
  if (spec.cell.size() != ax.size()) {
    throw error("bad_index", "cell arity does not match retained axes");
  }
  constexpr std::size_t any = static_cast<std::size_t>(-1);
  std::array<std::size_t, 5> want{any, any, any, any, any};
  for (std::size_t d = 0; d < ax.size(); ++d) {
    want[static_cast<std::size_t>(ax[d])] = spec.cell[d];
  }
  auto const n = inst.num_facilities();
  auto const m = inst.num_locations();
  auto const p = inst.horizon;
  bool const by_stakeholder = sel.weights == weighting::stakeholder_and_criterion_weights;
  auto const num_k = by_stakeholder ? stakeholders->size() : std::size_t{1};
  if (want[3] != any && (want[3] == 0 || want[3] > p)) {
    throw error("bad_index", "period index ranges over 1..p");
  }

  auto const name = table_name(sel);
  linear_objective obj(n, m, p, name);
  for (std::size_t i = 0; i < n; ++i) {
    if (want[0] != any && want[0] != i) {
      continue;
    }
    for (std::size_t l = 0; l < m; ++l) {
      if (want[2] != any && want[2] != l) {
        continue;
      }
      for (std::size_t tau = 0; tau < p; ++tau) {
        double c = 0.0;
        for (auto t = tau + 1; t <= p; ++t) {
          if (want[3] != any && want[3] != t) {
            continue;
          }
          double const disc = sel.discounted ? discount_factor(t, inst.interest_rate) : 1.0;
          for (std::size_t j = 0; j < inst.num_criteria(); ++j) {
            if (want[1] != any && want[1] != j) {
              continue;
            }
            double const y = inst.evaluation(i, j, l, t);
            for (std::size_t k = 0; k < num_k; ++k) {
              if (want[4] != any && want[4] != k) {
                continue;
              }
              double w = 1.0;
              if (sel.weights == weighting::criterion_weights) {
                w = inst.weights[j];
              } else if (by_stakeholder) {
                w = stakeholders->criterion_weights[k][j];
                if (!sel.kept.contains(axis::stakeholder)) {
                  w *= stakeholders->planner_weights[k];
                }
              }
              c += y * w * disc;
            }
          }
        }
        obj.coefficient(i, l, tau) = c;
      }
    }
  }
  return obj;
}

/// The overall discounted weighted performance, the model's main objective.
[[nodiscard]] inline auto overall_objective(problem_instance const& inst) -> linear_objective {
  return linearize(inst, {axis_selection{{}, true, weighting::criterion_weights}, {}});
}

/// objective(x) >= rhs
struct linear_constraint {
  linear_objective lhs;
  double rhs = 0.0;
};

/// An objective together with its ideal value, for relative deviations.
struct deviation_objective {
  linear_objective objective;
  double ideal = 0.0;

  [[nodiscard]] auto deviation(strategy const& x) const -> double { return (ideal - objective.value(x)) / ideal; }
};

}  // namespace spacetime

#endif  // SPACETIME_OBJECTIVE_HPP_

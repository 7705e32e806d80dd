#ifndef SPACETIME_COMPROMISE_HPP_
#define SPACETIME_COMPROMISE_HPP_

#include "spacetime/binary_solver.hpp"
#include "spacetime/dashboard.hpp"
#include "spacetime/error.hpp"
#include "spacetime/objective.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace spacetime {

/// Which aggregates the compromise targets: per location (CPL), per criterion
/// (CPO), per criterion and location (CPOL) or per stakeholder (CPK).
enum class cp_family { cpl, cpo, cpol, cpk };

[[nodiscard]] inline auto to_string(cp_family f) -> std::string_view {
  switch (f) {
    case cp_family::cpl:
      return "cpl";
    case cp_family::cpo:
      return "cpo";
    case cp_family::cpol:
      return "cpol";
    case cp_family::cpk:
      return "cpk";
  }
  return "";
}

[[nodiscard]] inline auto parse_cp_family(std::string_view s) -> cp_family {
  if (s == "cpl") {
    return cp_family::cpl;
  }
  if (s == "cpo") {
    return cp_family::cpo;
  }
  if (s == "cpol") {
    return cp_family::cpol;
  }
  if (s == "cpk") {
    return cp_family::cpk;
  }
  throw error("bad_objective", "unknown compromise family '" + std::string(s) + "'");
}

/// Where the discount factor is taken. `accrual` discounts each period's
/// performance by v(t), as the dashboard does. `activation` discounts every
/// accrued term by v(tau) of the activation period instead.
enum class discount_placement { accrual, activation };

struct cp_member {
  std::string label;
  linear_objective objective;
};

namespace detail {

inline auto with_activation_discount(problem_instance const& inst, linear_objective undiscounted)
    -> linear_objective {
  for (std::size_t i = 0; i < inst.num_facilities(); ++i) {
    for (std::size_t l = 0; l < inst.num_locations(); ++l) {
      for (std::size_t tau = 0; tau < inst.num_periods(); ++tau) {
        undiscounted.coefficient(i, l, tau) *= discount_factor(tau, inst.interest_rate);
      }
    }
  }
  return undiscounted;
}

}  // namespace detail

/// The member objectives of a family. Criterion-indexed members use the
/// unweighted aggregate: w_j cancels in the relative deviation.
[[nodiscard]] inline auto cp_members(problem_instance const& inst, cp_family family,
                                     stakeholder_set const* stakeholders = nullptr,
                                     discount_placement placement = discount_placement::accrual)
    -> std::vector<cp_member> {
  bool const accrual = placement == discount_placement::accrual;
  auto make = [&](aggregate_spec spec, std::string label) {
    spec.axes.discounted = accrual;
    auto obj = linearize(inst, spec, stakeholders);
    if (!accrual) {
      obj = detail::with_activation_discount(inst, std::move(obj));
    }
    obj.set_name(label);
    return cp_member{std::move(label), std::move(obj)};
  };
  std::vector<cp_member> out;
  switch (family) {
    case cp_family::cpl:
      for (std::size_t l = 0; l < inst.num_locations(); ++l) {
        out.push_back(make({{{axis::location}, true, weighting::criterion_weights}, {l}}, inst.locations[l].id));
      }
      break;
    case cp_family::cpo:
      for (std::size_t j = 0; j < inst.num_criteria(); ++j) {
        out.push_back(make({{{axis::criterion}, true, weighting::none}, {j}}, inst.criteria[j].id));
      }
      break;
    case cp_family::cpol:
      for (std::size_t j = 0; j < inst.num_criteria(); ++j) {
        for (std::size_t l = 0; l < inst.num_locations(); ++l) {
          out.push_back(make({{{axis::criterion, axis::location}, true, weighting::none}, {j, l}},
                             inst.criteria[j].id + "/" + inst.locations[l].id));
        }
      }
      break;
    case cp_family::cpk:
      if (stakeholders == nullptr) {
        throw error("missing_stakeholders", "stakeholder compromise needs a stakeholder set");
      }
      for (std::size_t k = 0; k < stakeholders->size(); ++k) {
        out.push_back(make({{{axis::stakeholder}, true, weighting::stakeholder_and_criterion_weights}, {k}},
                           stakeholders->members[k].id));
      }
      break;
  }
  return out;
}

struct ideal_point_result {
  std::vector<std::string> members;
  std::vector<double> ideal;
  std::vector<strategy> maximizers;
};

/// Each member's best attainable value, one independent maximization each.
[[nodiscard]] inline auto ideal_point(problem_instance const& inst, cp_family family,
                                      stakeholder_set const* stakeholders = nullptr,
                                      discount_placement placement = discount_placement::accrual)
    -> ideal_point_result {
  ideal_point_result out;
  for (auto const& m : cp_members(inst, family, stakeholders, placement)) {
    auto const r = maximize(inst, m.objective);
    out.members.push_back(m.label);
    out.ideal.push_back(r.objective_value);
    out.maximizers.push_back(r.x);
  }
  return out;
}

/// (ideal - achieved) / ideal per member, in member order.
[[nodiscard]] inline auto cp_deviations(problem_instance const& inst, strategy const& x, cp_family family,
                                        std::vector<double> const& ideals,
                                        stakeholder_set const* stakeholders = nullptr,
                                        discount_placement placement = discount_placement::accrual)
    -> std::vector<double> {
  auto const members = cp_members(inst, family, stakeholders, placement);
  if (members.size() != ideals.size()) {
    throw error("bad_objective", "one ideal value per member required");
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < members.size(); ++k) {
    out.push_back(deviation_objective{members[k].objective, ideals[k]}.deviation(x));
  }
  return out;
}

struct cp_result {
  cp_family family = cp_family::cpl;
  std::vector<std::string> members;
  std::vector<double> ideal;
  strategy x;
  std::vector<double> deviations;  // NaN for members dropped with a zero ideal
  double minimax = 0.0;
  std::vector<std::string> warnings;
  std::uint64_t nodes_explored = 0;
};

/// Strategy minimizing the largest relative deviation from the ideal point.
/// Members whose ideal is 0 are dropped with a warning; if every ideal is 0
/// the deviation is undefined and an error is thrown.
[[nodiscard]] inline auto solve_cp(problem_instance const& inst, cp_family family,
                                   stakeholder_set const* stakeholders = nullptr,
                                   discount_placement placement = discount_placement::accrual) -> cp_result {
  auto const members = cp_members(inst, family, stakeholders, placement);
  cp_result out;
  out.family = family;
  std::vector<deviation_objective> devs;
  for (auto const& m : members) {
    auto const ideal = maximize(inst, m.objective).objective_value;
    out.members.push_back(m.label);
    out.ideal.push_back(ideal);
    if (ideal > 0.0) {
      devs.push_back({m.objective, ideal});
    } else {
      out.warnings.push_back("member " + m.label + " has ideal 0 and is ignored");
    }
  }
  if (devs.empty()) {
    throw error("zero_ideal", "every ideal value is 0; relative deviations are undefined");
  }
  auto const r = solve_minimax(inst, devs);
  out.x = r.x;
  out.minimax = r.objective_value;
  out.nodes_explored = r.nodes_explored;
  for (std::size_t k = 0; k < members.size(); ++k) {
    out.deviations.push_back(out.ideal[k] > 0.0
                                 ? deviation_objective{members[k].objective, out.ideal[k]}.deviation(out.x)
                                 : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

/// The deviation objectives solve_cp minimizes over, for oracle checks.
[[nodiscard]] inline auto cp_deviation_objectives(problem_instance const& inst, cp_family family,
                                                  stakeholder_set const* stakeholders = nullptr,
                                                  discount_placement placement = discount_placement::accrual)
    -> std::vector<deviation_objective> {
  std::vector<deviation_objective> devs;
  for (auto const& m : cp_members(inst, family, stakeholders, placement)) {
    auto const ideal = maximize(inst, m.objective).objective_value;
    if (ideal > 0.0) {
      devs.push_back({m.objective, ideal});
    }
  }
  return devs;
}

}  // namespace spacetime

#endif  // SPACETIME_COMPROMISE_HPP_

#ifndef SPACETIME_SERVICE_WORKBENCH_HPP_
#define SPACETIME_SERVICE_WORKBENCH_HPP_

#include "spacetime/binary_solver.hpp"
#include "spacetime/compromise.hpp"
#include "spacetime/continuous_lp.hpp"
#include "spacetime/dashboard.hpp"
#include "spacetime/io/csv.hpp"
#include "spacetime/io/instance_file.hpp"
#include "spacetime/objective.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace spacetime::service {

using io::json;

/// What `solve` optimizes and on which data.
struct solve_request {
  std::string objective = "overall";  // overall | cpl | cpo | cpol | cpk
  bool expected = false;              // use expected values of the uncertainty trees
  bool continuous = false;            // solve the budget-allocation LP instead
};

[[nodiscard]] inline auto parse_solve_request(json const& j) -> solve_request {
  solve_request r;
  if (j.is_null()) {
    return r;
  }
  if (!j.is_object()) {
    throw validation_error({{"type_error", "expected an object", ""}});
  }
  for (auto const& [key, value] : j.items()) {
    if (key == "objective" && value.is_string()) {
      r.objective = value.get<std::string>();
    } else if (key == "expected" && value.is_boolean()) {
      r.expected = value.get<bool>();
    } else if (key == "continuous" && value.is_boolean()) {
      r.continuous = value.get<bool>();
    } else if (key == "objective" || key == "expected" || key == "continuous") {
      throw validation_error({{"type_error", "wrong type for '" + key + "'", "/" + key}});
    } else {
      throw validation_error({{"unknown_key", "unknown key '" + key + "'", "/" + key}});
    }
  }
  return r;
}

/// The instance the request sees: expected values need the uncertainty block.
[[nodiscard]] inline auto solve_instance(io::instance_document const& doc, bool expected) -> problem_instance {
  if (!expected) {
    return doc.instance;
  }
  if (!doc.uncertainty) {
    throw error("missing_uncertainty", "the instance has no uncertainty block", "/uncertainty");
  }
  return doc.effective_instance();
}

[[nodiscard]] inline auto table_to_json(dashboard_table const& table, problem_instance const& inst,
                                        stakeholder_set const* stakeholders) -> json {
  auto const ax = table.axes();
  json axes = json::array();
  std::vector<std::vector<std::string>> labels;
  for (auto a : ax) {
    axes.push_back(std::string(axis_name(a)));
    labels.push_back(io::detail::axis_ids(a, inst, stakeholders));
  }
  json cells = json::array();
  for (std::size_t flat = 0; flat < table.size(); ++flat) {
    auto const idx = table.index_of(flat);
    json index = json::array();
    for (std::size_t d = 0; d < ax.size(); ++d) {
      index.push_back(labels[d][ax[d] == axis::period ? idx[d] - 1 : idx[d]]);
    }
    cells.push_back({{"index", std::move(index)}, {"value", table.values()[flat]}});
  }
  return {{"axes", std::move(axes)}, {"discounted", table.selection().discounted}, {"cells", std::move(cells)}};
}

/// Every dashboard table of a strategy, keyed by table name.
[[nodiscard]] inline auto dashboard_to_json(problem_instance const& inst, strategy const& x,
                                            stakeholder_set const* stakeholders) -> json {
  json out = json::object();
  for (auto const& [name, table] : full_report(inst, x, stakeholders)) {
    out[name] = table_to_json(table, inst, stakeholders);
  }
  return out;
}

[[nodiscard]] inline auto nan_to_null(double v) -> json { return std::isnan(v) ? json(nullptr) : json(v); }

/// Solves the request and reports strategy, value and dashboard as JSON.
[[nodiscard]] inline auto run_solve(io::instance_document const& doc, solve_request const& req) -> json {
  auto const inst = solve_instance(doc, req.expected);
  auto const* stakeholders = doc.stakeholders ? &*doc.stakeholders : nullptr;
  if (req.continuous) {
    auto const bounds = doc.continuous ? *doc.continuous : budget_bounds{};
    auto const r = solve_lp(inst, bounds);
    if (r.status != lp::status::optimal) {
      throw error("infeasible", "no allocation meets the budgets and bounds" +
                                    (r.infeasible_period ? " in period " + std::to_string(*r.infeasible_period) : ""),
                  "/continuous");
    }
    json cells = json::array();
    for (std::size_t i = 0; i < inst.num_facilities(); ++i) {
      for (std::size_t l = 0; l < inst.num_locations(); ++l) {
        for (std::size_t t = 0; t < inst.num_periods(); ++t) {
          if (auto const v = r.allocation.amount(i, l, t); std::abs(v) > 1e-12) {
            cells.push_back({{"facility", inst.facilities[i].id},
                             {"location", inst.locations[l].id},
                             {"period", t},
                             {"amount", v}});
          }
        }
      }
    }
    json warnings = json::array();
    for (auto const& w : bound_warnings(inst, bounds)) {
      warnings.push_back({{"code", w.code}, {"message", w.message}, {"pointer", io::detail::rename_bound_pointer(w.pointer, inst)}});
    }
    return {{"objective", "continuous"}, {"value", r.objective_value}, {"allocation", std::move(cells)},
            {"warnings", std::move(warnings)}};
  }
  if (req.objective == "overall") {
    auto const r = maximize(inst, overall_objective(inst));
    return {{"objective", "overall"},
            {"strategy", io::strategy_to_json(inst, r.x)},
            {"value", r.objective_value},
            {"dashboard", dashboard_to_json(inst, r.x, stakeholders)}};
  }
  auto const family = parse_cp_family(req.objective);
  if (family == cp_family::cpk && stakeholders == nullptr) {
    throw error("missing_stakeholders", "cpk needs a stakeholders block", "/stakeholders");
  }
  auto const r = solve_cp(inst, family, stakeholders);
  json members = json::array();
  for (std::size_t k = 0; k < r.members.size(); ++k) {
    members.push_back({{"member", r.members[k]}, {"ideal", r.ideal[k]}, {"deviation", nan_to_null(r.deviations[k])}});
  }
  return {{"objective", req.objective},
          {"strategy", io::strategy_to_json(inst, r.x)},
          {"value", r.minimax},
          {"members", std::move(members)},
          {"warnings", r.warnings},
          {"dashboard", dashboard_to_json(inst, r.x, stakeholders)}};
}

/// Error body {code, message, pointer} plus every issue of a validation error.
[[nodiscard]] inline auto error_to_json(error const& e) -> json {
  json out = {{"code", e.code()}, {"message", e.what()}, {"pointer", e.pointer()}};
  if (auto const* v = dynamic_cast<validation_error const*>(&e)) {
    json issues = json::array();
    for (auto const& i : v->issues()) {
      issues.push_back({{"code", i.code}, {"message", i.message}, {"pointer", i.pointer}});
    }
    out["issues"] = std::move(issues);
  }
  return out;
}

}  // namespace spacetime::service

#endif  // SPACETIME_SERVICE_WORKBENCH_HPP_

#ifndef SPACETIME_TESTS_LATTICE_HPP_
#define SPACETIME_TESTS_LATTICE_HPP_

#include "spacetime/dashboard.hpp"

#include <cmath>

namespace spacetime::testing {

/// Sums a table over one retained axis. Summing out the criterion axis applies
/// w_j, summing out the stakeholder axis applies z_k, as the coarser table does.
inline auto marginalize(problem_instance const& inst, dashboard_table const& fine, axis drop,
                        stakeholder_set const* stakeholders = nullptr) -> dashboard_table {
  auto sel = fine.selection();
  sel.kept.erase(drop);
  if (drop == axis::criterion) {
    sel.weights = weighting::criterion_weights;
  }
  auto const fine_axes = fine.axes();
  std::vector<std::size_t> extents;
  std::size_t drop_dim = 0;
  for (std::size_t d = 0; d < fine_axes.size(); ++d) {
    if (fine_axes[d] == drop) {
      drop_dim = d;
    } else {
      extents.push_back(fine.extents()[d]);
    }
  }
  dashboard_table coarse(sel, extents);
  for (std::size_t f = 0; f < fine.size(); ++f) {
    auto idx = fine.index_of(f);
    auto const c = idx[drop_dim];
    double factor = 1.0;
    if (drop == axis::criterion) {
      factor = inst.weights[c];
    } else if (drop == axis::stakeholder) {
      factor = stakeholders->planner_weights[c];
    }
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(drop_dim));
    coarse.ref(idx) += fine.values()[f] * factor;
  }
  return coarse;
}

inline auto max_abs_difference(dashboard_table const& a, dashboard_table const& b) -> double {
  double worst = 0.0;
  if (a.size() != b.size()) {
    return INFINITY;
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.values()[k] - b.values()[k]));
  }
  return worst;
}

/// Largest lattice inconsistency over every (table, droppable axis) pair.
/// Criterion-weighted tables cannot drop J (already summed); stakeholder
/// weighting keeps the criterion axis summed as well.
inline auto lattice_error(problem_instance const& inst, strategy const& x,
                          stakeholder_set const* stakeholders = nullptr) -> double {
  double worst = 0.0;
  for (auto const& [name, table] : full_report(inst, x, stakeholders)) {
    for (auto a : table.axes()) {
      auto coarse = marginalize(inst, table, a, stakeholders);
      auto const direct = aggregate(inst, x, coarse.selection(), stakeholders);
      worst = std::max(worst, max_abs_difference(coarse, direct));
    }
  }
  return worst;
}

}  // namespace spacetime::testing

#endif  // SPACETIME_TESTS_LATTICE_HPP_

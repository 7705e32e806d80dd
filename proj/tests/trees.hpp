#ifndef SPACETIME_TESTS_TREES_HPP_
#define SPACETIME_TESTS_TREES_HPP_

#include "council.hpp"

#include "spacetime/scenario.hpp"

namespace spacetime::testing {

/// Complete binary tree of the given depth. `conditionals` lists each node's
/// two child probabilities in preorder; `leaves` are the final-period values.
inline auto binary_tree(std::size_t depth, std::vector<double> const& conditionals, std::vector<double> const& leaves)
    -> scenario_node {
  std::size_t next_cond = 0;
  std::size_t next_leaf = 0;
  auto build = [&](auto const& self, scenario_node& node, std::size_t d) -> void {
    if (d == depth) {
      node.performance = leaves.at(next_leaf++);
      return;
    }
    node.children.resize(2);
    for (std::size_t k = 0; k < 2; ++k) {
      node.children[k].state = node.state + std::to_string(k + 1);
      node.children[k].probability = conditionals.at(next_cond++);
    }
    for (auto& c : node.children) {
      self(self, c, d + 1);
    }
  };
  scenario_node root;
  root.state = "s";
  build(build, root, 0);
  return root;
}

/// Two periods, two states per period, values printed for period 2 only.
inline auto two_period_tree() -> scenario_tree {
  return {0, 0, 0, binary_tree(2, {0.3, 0.7, 0.2, 0.8, 0.6, 0.4}, {20, 40, 60, 50})};
}

inline auto housing_conditionals() -> std::vector<double> {
  return {0.8, 0.2, 0.65, 0.35, 0.3, 0.7, 0.6, 0.4, 0.25, 0.75, 0.3, 0.7, 0.5, 0.5, 0.2, 0.8, 0.6, 0.4, 0.3, 0.7, 0.65,
          0.35, 0.15, 0.85, 0.6, 0.4, 0.5, 0.5, 0.2, 0.8, 0.5, 0.5, 0.6, 0.4, 0.3, 0.7, 0.85, 0.15, 0.2, 0.8, 0.3, 0.7,
          0.5, 0.5, 0.2, 0.8, 0.6, 0.4, 0.3, 0.7, 0.6, 0.4, 0.3, 0.7, 0.4, 0.6, 0.4, 0.6, 0.2, 0.8, 0.35, 0.65};
}

/// Economic performance of Social Housing in the North and in the South.
inline auto housing_trees() -> std::vector<scenario_tree> {
  std::vector<double> const north_values = {76, 64, 96, 78, 81, 86, 66, 69, 78, 64, 81, 67, 90, 81, 67, 95,
                                     39, 68, 76, 26, 80, 70, 94, 43, 62, 44, 65, 26, 66, 51, 42, 41};
  std::vector<double> const south_values = {89, 92, 84, 95, 78, 93, 17, 99, 96, 88, 12, 78, 69, 87, 79, 94,
                                     15, 92, 15, 77, 69, 67, 93, 12, 75, 88, 77, 10, 48, 87, 15, 96};
  return {{social_housing, economic, north, binary_tree(5, housing_conditionals(), north_values)},
          {social_housing, economic, south, binary_tree(5, housing_conditionals(), south_values)}};
}

}  // namespace spacetime::testing

#endif  // SPACETIME_TESTS_TREES_HPP_

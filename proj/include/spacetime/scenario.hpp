#ifndef SPACETIME_SCENARIO_HPP_
#define SPACETIME_SCENARIO_HPP_

#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace spacetime {

/// A state of nature. `probability` is conditional on the parent state; the
/// root carries 1. A node without a performance stands for the conditional
/// expectation of its children.
struct scenario_node {
  std::string state;
  double probability = 1.0;
  std::optional<double> performance;
  std::vector<scenario_node> children;

  friend bool operator==(scenario_node const&, scenario_node const&) = default;
};

/// Uncertain performance of one (facility, criterion, location) cell. The
/// root sits at period 0 and a node at depth t belongs to period t.
struct scenario_tree {
  std::size_t facility = 0;
  std::size_t criterion = 0;
  std::size_t location = 0;
  scenario_node root;

  friend bool operator==(scenario_tree const&, scenario_tree const&) = default;
};

/// Sibling probabilities must sum to 1 within this tolerance.
inline constexpr double tree_tolerance = 1e-9;

/// Product of conditional probabilities along a path of child indices.
[[nodiscard]] inline auto path_probability(scenario_tree const& tree, std::vector<std::size_t> const& path) -> double {
  double p = 1.0;
  auto const* node = &tree.root;
  for (auto k : path) {
    if (k >= node->children.size()) {
      throw error("bad_path", "path leaves the tree");
    }
    node = &node->children[k];
    p *= node->probability;
  }
  return p;
}

/// The node's own performance, or the expectation of its children.
[[nodiscard]] inline auto node_value(scenario_node const& node) -> double {
  if (node.performance) {
    return *node.performance;
  }
  double v = 0.0;
  for (auto const& c : node.children) {
    v += c.probability * node_value(c);
  }
  return v;
}

namespace detail {

inline void accumulate_depth(scenario_node const& node, std::size_t depth, std::size_t t, double p, double& sum) {
  if (depth == t) {
    sum += p * node_value(node);
    return;
  }
  for (auto const& c : node.children) {
    accumulate_depth(c, depth + 1, t, p * c.probability, sum);
  }
}

inline void validate_node(scenario_node const& node, std::size_t depth, std::size_t horizon, double tol,
                          std::string const& pointer, std::vector<issue>& out) {
  if (depth > 0 && !(node.probability >= 0.0 && node.probability <= 1.0)) {
    out.push_back({"bad_probability", "conditional probability must lie in [0, 1]", pointer + "/probability"});
  }
  if (node.performance && !(*node.performance >= 0.0)) {
    out.push_back({"negative_value", "performance must be nonnegative", pointer + "/performance"});
  }
  if (node.children.empty()) {
    if (depth != horizon) {
      out.push_back({"tree_depth", "leaf at period " + std::to_string(depth) + ", expected " + std::to_string(horizon),
                     pointer});
    }
    if (!node.performance) {
      out.push_back({"missing_performance", "a leaf needs a performance", pointer});
    }
    return;
  }
  if (depth >= horizon) {
    out.push_back({"tree_depth", "node below the final period", pointer + "/children"});
    return;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < node.children.size(); ++k) {
    sum += node.children[k].probability;
    validate_node(node.children[k], depth + 1, horizon, tol, pointer + "/children/" + std::to_string(k), out);
  }
  if (std::abs(sum - 1.0) > tol) {
    out.push_back({"probability_sum", "child probabilities sum to " + detail::fmt_number(sum) + ", not 1",
                   pointer + "/children"});
  }
}

}  // namespace detail

/// E_p at period t: path-probability-weighted mean of the depth-t values.
[[nodiscard]] inline auto expected_performance(scenario_tree const& tree, std::size_t t) -> double {
  double sum = 0.0;
  detail::accumulate_depth(tree.root, 0, t, 1.0, sum);
  return sum;
}

/// Structural problems of a tree whose leaves should sit at `horizon`.
/// Pointers are relative to the tree ("/root/children/0/...").
[[nodiscard]] inline auto validate_tree(scenario_tree const& tree, std::size_t horizon, double tol = tree_tolerance)
    -> std::vector<issue> {
  std::vector<issue> out;
  detail::validate_node(tree.root, 0, horizon, tol, "/root", out);
  return out;
}

/// Every leaf with its path probability, depth-first.
[[nodiscard]] inline auto leaf_probabilities(scenario_tree const& tree) -> std::vector<double> {
  std::vector<double> out;
  auto walk = [&](auto const& self, scenario_node const& node, double p) -> void {
    if (node.children.empty()) {
      out.push_back(p);
      return;
    }
    for (auto const& c : node.children) {
      self(self, c, p * c.probability);
    }
  };
  walk(walk, tree.root, 1.0);
  return out;
}

/// Copy of the instance whose per-period evaluations replace every tree cell
/// by E_p(t). Cells without a tree keep their deterministic value.
[[nodiscard]] inline auto expected_instance(problem_instance const& inst, std::vector<scenario_tree> const& trees,
                                            double tol = tree_tolerance) -> problem_instance {
  std::vector<issue> issues;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    auto const& tr = trees[k];
    auto const pointer = "/uncertainty/trees/" + std::to_string(k);
    if (tr.facility >= inst.num_facilities() || tr.criterion >= inst.num_criteria() ||
        tr.location >= inst.num_locations()) {
      issues.push_back({"index_out_of_range", "tree cell outside the instance", pointer});
      continue;
    }
    if (!seen.insert({tr.facility, tr.criterion, tr.location}).second) {
      issues.push_back({"duplicate_tree", "more than one tree for the same cell", pointer});
    }
    for (auto i : validate_tree(tr, inst.horizon, tol)) {
      i.pointer = pointer + i.pointer;
      issues.push_back(std::move(i));
    }
  }
  if (!issues.empty()) {
    throw validation_error(std::move(issues));
  }
  problem_instance out = inst;
  if (trees.empty()) {
    return out;
  }
  auto const n = inst.num_facilities();
  auto const q = inst.num_criteria();
  auto const m = inst.num_locations();
  auto const width = inst.horizon + 1;
  out.period_evaluations.assign(n * q * m * width, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t l = 0; l < m; ++l) {
        for (std::size_t t = 0; t < width; ++t) {
          out.period_evaluations[((i * q + j) * m + l) * width + t] = inst.evaluation(i, j, l, t);
        }
      }
    }
  }
  for (auto const& tr : trees) {
    for (std::size_t t = 0; t < width; ++t) {
      out.period_evaluations[((tr.facility * q + tr.criterion) * m + tr.location) * width + t] =
          expected_performance(tr, t);
    }
  }
  return out;
}

}  // namespace spacetime

#endif  // SPACETIME_SCENARIO_HPP_

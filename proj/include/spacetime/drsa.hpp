#ifndef SPACETIME_DRSA_HPP_
#define SPACETIME_DRSA_HPP_

#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"
#include "spacetime/objective.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spacetime {

/// Whether a value equal to a threshold attains it.
enum class boundary_rule { inclusive, exclusive };

[[nodiscard]] inline auto to_string(boundary_rule b) -> std::string_view {
  return b == boundary_rule::inclusive ? "inclusive" : "exclusive";
}

[[nodiscard]] inline auto parse_boundary_rule(std::string_view s) -> boundary_rule {
  if (s == "inclusive") {
    return boundary_rule::inclusive;
  }
  if (s == "exclusive") {
    return boundary_rule::exclusive;
  }
  throw error("bad_boundary", "unknown boundary rule '" + std::string(s) + "'");
}

[[nodiscard]] inline auto attains(double y, double threshold, boundary_rule b) -> bool {
  return b == boundary_rule::inclusive ? y >= threshold : y > threshold;
}

/// Ascending satisfaction thresholds per (criterion, location), all with the
/// same number of levels. `labels` names the levels + 1 classes, worst first.
struct threshold_scheme {
  std::vector<std::string> labels;
  boundary_rule boundary = boundary_rule::inclusive;
  std::vector<std::vector<std::vector<double>>> values;  // [criterion][location][level]

  [[nodiscard]] auto levels() const -> std::size_t {
    return values.empty() || values.front().empty() ? 0 : values.front().front().size();
  }

  [[nodiscard]] auto at(std::size_t j, std::size_t l) const -> std::vector<double> const& { return values[j][l]; }

  friend bool operator==(threshold_scheme const&, threshold_scheme const&) = default;
};

/// The same thresholds for every criterion and location.
[[nodiscard]] inline auto uniform_thresholds(std::size_t criteria, std::size_t locations, std::vector<double> levels,
                                             std::vector<std::string> labels = {},
                                             boundary_rule boundary = boundary_rule::inclusive) -> threshold_scheme {
  threshold_scheme s;
  s.labels = std::move(labels);
  s.boundary = boundary;
  s.values.assign(criteria, std::vector<std::vector<double>>(locations, levels));
  return s;
}

[[nodiscard]] inline auto validate_thresholds(problem_instance const& inst, threshold_scheme const& s)
    -> std::vector<issue> {
  std::vector<issue> issues;
  if (s.values.size() != inst.num_criteria()) {
    issues.push_back({"shape_mismatch", "one threshold row per criterion required", "/thresholds/values"});
    return issues;
  }
  auto const h = s.levels();
  if (h == 0) {
    issues.push_back({"empty_thresholds", "at least one threshold level required", "/thresholds/values"});
    return issues;
  }
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    auto const pj = "/thresholds/values/" + std::to_string(j);
    if (s.values[j].size() != inst.num_locations()) {
      issues.push_back({"shape_mismatch", "one threshold list per location required", pj});
      continue;
    }
    for (std::size_t l = 0; l < s.values[j].size(); ++l) {
      auto const& v = s.values[j][l];
      auto const pl = pj + "/" + std::to_string(l);
      if (v.size() != h) {
        issues.push_back({"level_count", "every threshold list needs " + std::to_string(h) + " levels", pl});
        continue;
      }
      for (std::size_t a = 1; a < v.size(); ++a) {
        if (!(v[a - 1] < v[a])) {
          issues.push_back({"not_ascending", "thresholds must be strictly ascending", pl + "/" + std::to_string(a)});
        }
      }
    }
  }
  if (!s.labels.empty() && s.labels.size() != h + 1) {
    issues.push_back({"label_count", "class labels must number levels + 1", "/thresholds/labels"});
  }
  return issues;
}

/// Satisfaction class of y, 1 (below every threshold) to levels + 1.
[[nodiscard]] inline auto classify(double y, std::vector<double> const& thresholds,
                                   boundary_rule b = boundary_rule::inclusive) -> std::size_t {
  std::size_t a = 1;
  for (auto s : thresholds) {
    if (!attains(y, s, b)) {
      break;
    }
    ++a;
  }
  return a;
}

/// Evaluation used for qualitative classes. With period-dependent data the
/// terminal period stands for the facility.
[[nodiscard]] inline auto class_evaluation(problem_instance const& inst, std::size_t i, std::size_t j, std::size_t l)
    -> double {
  return inst.has_period_evaluations() ? inst.evaluation(i, j, l, inst.horizon) : inst.evaluation(i, j, l);
}

/// F[a][j][l]: activated-at-l facilities whose evaluation attains level a.
class attainment_counts {
 public:
  attainment_counts(std::size_t levels, std::size_t criteria, std::size_t locations)
      : m_h(levels)
      , m_q(criteria)
      , m_m(locations)
      , m_counts(levels * criteria * locations, 0) {}

  [[nodiscard]] auto levels() const noexcept { return m_h; }
  [[nodiscard]] auto num_criteria() const noexcept { return m_q; }
  [[nodiscard]] auto num_locations() const noexcept { return m_m; }

  /// Level a is 0-based here: a = 0 counts the first threshold.
  [[nodiscard]] auto at(std::size_t a, std::size_t j, std::size_t l) const -> std::size_t {
    return m_counts[(a * m_q + j) * m_m + l];
  }
  auto ref(std::size_t a, std::size_t j, std::size_t l) -> std::size_t& { return m_counts[(a * m_q + j) * m_m + l]; }

  /// Sum over criteria for one level and location.
  [[nodiscard]] auto location_sum(std::size_t a, std::size_t l) const -> std::size_t {
    std::size_t s = 0;
    for (std::size_t j = 0; j < m_q; ++j) {
      s += at(a, j, l);
    }
    return s;
  }

  /// Sum over locations for one level and criterion.
  [[nodiscard]] auto criterion_sum(std::size_t a, std::size_t j) const -> std::size_t {
    std::size_t s = 0;
    for (std::size_t l = 0; l < m_m; ++l) {
      s += at(a, j, l);
    }
    return s;
  }

  friend bool operator==(attainment_counts const&, attainment_counts const&) = default;

 private:
  std::size_t m_h;
  std::size_t m_q;
  std::size_t m_m;
  std::vector<std::size_t> m_counts;
};

[[nodiscard]] inline auto count_attainments(problem_instance const& inst, strategy const& x,
                                            threshold_scheme const& s) -> attainment_counts {
  attainment_counts out(s.levels(), inst.num_criteria(), inst.num_locations());
  for (auto const& act : x) {
    for (std::size_t j = 0; j < inst.num_criteria(); ++j) {
      auto const y = class_evaluation(inst, act.facility, j, act.location);
      auto const& th = s.at(j, act.location);
      for (std::size_t a = 0; a < th.size(); ++a) {
        if (attains(y, th[a], s.boundary)) {
          ++out.ref(a, j, act.location);
        }
      }
    }
  }
  return out;
}

/// Which sums of attainment counts become objectives.
enum class formulation { location, criterion, criterion_location };

[[nodiscard]] inline auto to_string(formulation f) -> std::string_view {
  switch (f) {
    case formulation::location:
      return "location";
    case formulation::criterion:
      return "criterion";
    case formulation::criterion_location:
      return "criterion-location";
  }
  return "";
}

[[nodiscard]] inline auto parse_formulation(std::string_view s) -> formulation {
  if (s == "location") {
    return formulation::location;
  }
  if (s == "criterion") {
    return formulation::criterion;
  }
  if (s == "criterion-location" || s == "criterion_location") {
    return formulation::criterion_location;
  }
  throw error("bad_formulation", "unknown formulation '" + std::string(s) + "'");
}

/// Linear count objectives, level-major: (a, l) for location, (a, j) for
/// criterion and (a, j, l) for criterion-location. Names read "F1/south",
/// "F2/economic" or "F3/economic/north" with 1-based levels.
[[nodiscard]] inline auto formulation_objectives(problem_instance const& inst, formulation f,
                                                 threshold_scheme const& s) -> std::vector<linear_objective> {
  auto const issues = validate_thresholds(inst, s);
  if (!issues.empty()) {
    throw validation_error(issues);
  }
  auto const n = inst.num_facilities();
  auto const m = inst.num_locations();
  auto const p = inst.num_periods();
  auto const q = inst.num_criteria();
  auto hit = [&](std::size_t a, std::size_t i, std::size_t j, std::size_t l) {
    return attains(class_evaluation(inst, i, j, l), s.at(j, l)[a], s.boundary) ? 1.0 : 0.0;
  };
  auto make = [&](std::string name, auto const& cell) {
    linear_objective obj(n, m, p, std::move(name));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < m; ++l) {
        double const c = cell(i, l);
        for (std::size_t t = 0; t < p; ++t) {
          obj.coefficient(i, l, t) = c;
        }
      }
    }
    return obj;
  };
  std::vector<linear_objective> out;
  for (std::size_t a = 0; a < s.levels(); ++a) {
    auto const level = "F" + std::to_string(a + 1);
    switch (f) {
      case formulation::location:
        for (std::size_t l0 = 0; l0 < m; ++l0) {
          out.push_back(make(level + "/" + inst.locations[l0].id, [&](std::size_t i, std::size_t l) {
            double c = 0.0;
            if (l == l0) {
              for (std::size_t j = 0; j < q; ++j) {
                c += hit(a, i, j, l);
              }
            }
            return c;
          }));
        }
        break;
      case formulation::criterion:
        for (std::size_t j = 0; j < q; ++j) {
          out.push_back(make(level + "/" + inst.criteria[j].id,
                             [&](std::size_t i, std::size_t l) { return hit(a, i, j, l); }));
        }
        break;
      case formulation::criterion_location:
        for (std::size_t j = 0; j < q; ++j) {
          for (std::size_t l0 = 0; l0 < m; ++l0) {
            out.push_back(make(level + "/" + inst.criteria[j].id + "/" + inst.locations[l0].id,
                               [&](std::size_t i, std::size_t l) { return l == l0 ? hit(a, i, j, l) : 0.0; }));
          }
        }
        break;
    }
  }
  return out;
}

[[nodiscard]] inline auto objective_vector(std::vector<linear_objective> const& objectives, strategy const& x)
    -> std::vector<double> {
  std::vector<double> v;
  v.reserve(objectives.size());
  for (auto const& o : objectives) {
    v.push_back(o.value(x));
  }
  return v;
}

enum class label { unlabeled, good, other };

[[nodiscard]] inline auto to_string(label l) -> std::string_view {
  switch (l) {
    case label::unlabeled:
      return "unlabeled";
    case label::good:
      return "good";
    case label::other:
      return "other";
  }
  return "";
}

[[nodiscard]] inline auto parse_label(std::string_view s) -> label {
  if (s == "good") {
    return label::good;
  }
  if (s == "other") {
    return label::other;
  }
  if (s == "unlabeled") {
    return label::unlabeled;
  }
  throw error("invalid_labels", "unknown label '" + std::string(s) + "'");
}

struct labeled_item {
  std::string id;
  std::vector<double> values;
  label tag = label::unlabeled;
};

using labeled_sample = std::vector<labeled_item>;

/// objective >= threshold
struct rule_condition {
  std::size_t objective = 0;
  double threshold = 0.0;

  friend auto operator<=>(rule_condition const&, rule_condition const&) = default;
};

/// "if every condition holds then good"; support lists covered GOOD items.
struct decision_rule {
  std::vector<rule_condition> conditions;
  std::vector<std::size_t> support;

  [[nodiscard]] auto covers(std::vector<double> const& v) const -> bool {
    return std::all_of(conditions.begin(), conditions.end(),
                       [&](rule_condition const& c) { return v[c.objective] >= c.threshold; });
  }

  friend bool operator==(decision_rule const&, decision_rule const&) = default;
};

/// Constraints objective >= threshold, one per condition.
[[nodiscard]] inline auto rule_constraints(decision_rule const& r, std::vector<linear_objective> const& objectives)
    -> std::vector<linear_constraint> {
  std::vector<linear_constraint> out;
  for (auto const& c : r.conditions) {
    out.push_back({objectives.at(c.objective), c.threshold});
  }
  return out;
}

namespace detail {

inline void check_sample(labeled_sample const& sample) {
  for (std::size_t k = 1; k < sample.size(); ++k) {
    if (sample[k].values.size() != sample[0].values.size()) {
      throw error("bad_sample", "objective vectors differ in arity", "/" + std::to_string(k));
    }
  }
}

/// a >= b componentwise.
inline auto weakly_dominates(std::vector<double> const& a, std::vector<double> const& b) -> bool {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// GOOD items whose every weak dominator is GOOD, as sample indices.
[[nodiscard]] inline auto lower_approximation(labeled_sample const& sample) -> std::vector<std::size_t> {
  detail::check_sample(sample);
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < sample.size(); ++g) {
    if (sample[g].tag != label::good) {
      continue;
    }
    bool consistent = true;
    for (auto const& other : sample) {
      if (other.tag != label::good && detail::weakly_dominates(other.values, sample[g].values)) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      out.push_back(g);
    }
  }
  return out;
}

struct rule_set {
  std::vector<decision_rule> rules;
  std::vector<std::string> warnings;
};

namespace detail {

class rule_search {
 public:
  explicit rule_search(labeled_sample const& sample)
      : m_sample(sample)
      , m_lower(lower_approximation(sample)) {
    auto const arity = sample.empty() ? 0 : sample[0].values.size();
    m_candidates.resize(arity);
    for (auto const& item : sample) {
      if (item.tag == label::good) {
        for (std::size_t o = 0; o < arity; ++o) {
          m_candidates[o].insert(item.values[o]);
        }
      }
    }
  }

  [[nodiscard]] auto lower() const -> std::vector<std::size_t> const& { return m_lower; }

  auto run() -> std::vector<std::vector<rule_condition>> {
    std::vector<std::size_t> all(m_sample.size());
    for (std::size_t k = 0; k < all.size(); ++k) {
      all[k] = k;
    }
    std::vector<rule_condition> current;
    extend(0, current, all);
    return std::move(m_found);
  }

 private:
  // Adds conditions on objectives >= from. A condition is only added when it
  // removes a covered OTHER item, otherwise it could be dropped from any rule
  // it ends up in; a branch stops as soon as it is consistent.
  void extend(std::size_t from, std::vector<rule_condition>& current, std::vector<std::size_t> const& covered) {
    for (std::size_t o = from; o < m_candidates.size(); ++o) {
      for (auto threshold : m_candidates[o]) {
        std::vector<std::size_t> next;
        bool removes_other = false;
        bool has_other = false;
        bool has_lower = false;
        for (auto k : covered) {
          bool const keep = m_sample[k].values[o] >= threshold;
          bool const other = m_sample[k].tag == label::other;
          if (keep) {
            next.push_back(k);
            has_other = has_other || other;
            has_lower = has_lower || std::binary_search(m_lower.begin(), m_lower.end(), k);
          } else {
            removes_other = removes_other || other;
          }
        }
        if (!removes_other || !has_lower) {
          continue;
        }
        current.push_back({o, threshold});
        if (has_other) {
          extend(o + 1, current, next);
        } else {
          m_found.push_back(current);
        }
        current.pop_back();
      }
    }
  }

  labeled_sample const& m_sample;
  std::vector<std::size_t> m_lower;
  std::vector<std::set<double>> m_candidates;
  std::vector<std::vector<rule_condition>> m_found;
};

inline auto covers_other(labeled_sample const& sample, std::vector<rule_condition> const& conds) -> bool {
  decision_rule r{conds, {}};
  return std::any_of(sample.begin(), sample.end(),
                     [&](labeled_item const& it) { return it.tag == label::other && r.covers(it.values); });
}

/// Every condition of `general` is implied by some condition of `specific`.
inline auto more_general(std::vector<rule_condition> const& general, std::vector<rule_condition> const& specific)
    -> bool {
  return std::all_of(general.begin(), general.end(), [&](rule_condition const& g) {
    return std::any_of(specific.begin(), specific.end(), [&](rule_condition const& s) {
      return s.objective == g.objective && s.threshold >= g.threshold;
    });
  });
}

}  // namespace detail

/// All minimal consistent at-least rules with thresholds taken from GOOD
/// values, each covering a lower-approximation item and no OTHER item. With
/// no OTHER item at all each objective yields one single-condition rule. Rules
/// implied by a more general returned rule are dropped. Sorted by coverage
/// descending, condition count ascending, then conditions.
[[nodiscard]] inline auto induce_rules(labeled_sample const& sample) -> rule_set {
  detail::check_sample(sample);
  rule_set out;
  detail::rule_search search(sample);
  if (search.lower().empty()) {
    out.warnings.push_back("no GOOD item is consistently labeled; no rule can be induced");
    return out;
  }
  std::vector<std::vector<rule_condition>> minimal;
  bool const any_other =
      std::any_of(sample.begin(), sample.end(), [](labeled_item const& it) { return it.tag == label::other; });
  if (!any_other) {
    // Nothing to exclude: one rule per objective at the weakest GOOD value.
    for (std::size_t o = 0; o < sample[0].values.size(); ++o) {
      double low = std::numeric_limits<double>::infinity();
      for (auto const& it : sample) {
        if (it.tag == label::good) {
          low = std::min(low, it.values[o]);
        }
      }
      minimal.push_back({{o, low}});
    }
  }
  for (auto& conds : any_other ? search.run() : std::vector<std::vector<rule_condition>>{}) {
    bool is_minimal = true;
    for (std::size_t c = 0; c < conds.size() && is_minimal; ++c) {
      auto reduced = conds;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(c));
      is_minimal = detail::covers_other(sample, reduced);
    }
    if (is_minimal) {
      minimal.push_back(std::move(conds));
    }
  }
  for (std::size_t r = 0; r < minimal.size(); ++r) {
    bool implied = false;
    for (std::size_t g = 0; g < minimal.size() && !implied; ++g) {
      implied = g != r && minimal[g] != minimal[r] && detail::more_general(minimal[g], minimal[r]);
    }
    if (implied) {
      continue;
    }
    decision_rule rule{minimal[r], {}};
    for (std::size_t k = 0; k < sample.size(); ++k) {
      if (sample[k].tag == label::good && rule.covers(sample[k].values)) {
        rule.support.push_back(k);
      }
    }
    out.rules.push_back(std::move(rule));
  }
  std::sort(out.rules.begin(), out.rules.end(), [](decision_rule const& a, decision_rule const& b) {
    if (a.support.size() != b.support.size()) {
      return a.support.size() > b.support.size();
    }
    if (a.conditions.size() != b.conditions.size()) {
      return a.conditions.size() < b.conditions.size();
    }
    return a.conditions < b.conditions;
  });
  return out;
}

/// "F1/south >= 12 and F2/south >= 9"
[[nodiscard]] inline auto describe(decision_rule const& r, std::vector<linear_objective> const& objectives)
    -> std::string {
  std::string out;
  for (auto const& c : r.conditions) {
    if (!out.empty()) {
      out += " and ";
    }
    out += objectives.at(c.objective).name() + " >= " + detail::fmt_number(c.threshold);
  }
  return out;
}

}  // namespace spacetime

#endif  // SPACETIME_DRSA_HPP_

#ifndef SPACETIME_DASHBOARD_HPP_
#define SPACETIME_DASHBOARD_HPP_

#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spacetime {

/// Axes of the aggregation lattice, in canonical order I, J, L, T, K.
enum class axis : std::uint8_t { facility = 0, criterion = 1, location = 2, period = 3, stakeholder = 4 };

inline constexpr std::array<axis, 5> all_axes = {axis::facility, axis::criterion, axis::location, axis::period,
                                                 axis::stakeholder};

[[nodiscard]] constexpr auto axis_letter(axis a) -> char {
  constexpr std::array<char, 5> letters = {'I', 'J', 'L', 'T', 'K'};
  return letters[static_cast<std::size_t>(a)];
}

[[nodiscard]] constexpr auto axis_name(axis a) -> std::string_view {
  constexpr std::array<std::string_view, 5> names = {"facility", "criterion", "location", "period", "stakeholder"};
  return names[static_cast<std::size_t>(a)];
}

class axis_set {
 public:
  constexpr axis_set() = default;
  constexpr axis_set(std::initializer_list<axis> axes) {
    for (auto a : axes) {
      insert(a);
    }
  }

  [[nodiscard]] static constexpr auto from_bits(std::uint8_t bits) -> axis_set {
    axis_set s;
    s.m_bits = bits & 0x1f;
    return s;
  }

  constexpr void insert(axis a) { m_bits |= bit(a); }
  constexpr void erase(axis a) { m_bits &= static_cast<std::uint8_t>(~bit(a)); }
  [[nodiscard]] constexpr auto contains(axis a) const -> bool { return (m_bits & bit(a)) != 0; }
  [[nodiscard]] constexpr auto bits() const -> std::uint8_t { return m_bits; }
  [[nodiscard]] constexpr auto empty() const -> bool { return m_bits == 0; }

  /// Retained axes in canonical order.
  [[nodiscard]] auto axes() const -> std::vector<axis> {
    std::vector<axis> out;
    for (auto a : all_axes) {
      if (contains(a)) {
        out.push_back(a);
      }
    }
    return out;
  }

  friend constexpr bool operator==(axis_set, axis_set) = default;

 private:
  static constexpr auto bit(axis a) -> std::uint8_t { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(a)); }
  std::uint8_t m_bits = 0;
};

enum class weighting { none, criterion_weights, stakeholder_and_criterion_weights };

struct axis_selection {
  axis_set kept;
  bool discounted = true;
  weighting weights = weighting::criterion_weights;

  friend bool operator==(axis_selection const&, axis_selection const&) = default;
};

/// Criterion weights per stakeholder (w_jk) and the planner's weights z_k.
struct stakeholder_set {
  std::vector<entity> members;
  std::vector<std::vector<double>> criterion_weights;  // [k][j]
  std::vector<double> planner_weights;                 // [k]

  [[nodiscard]] auto size() const noexcept { return members.size(); }
};

[[nodiscard]] inline auto validate_stakeholders(stakeholder_set const& s, std::size_t num_criteria)
    -> std::vector<issue> {
  std::vector<issue> issues;
  auto const b = s.members.size();
  if (b == 0) {
    issues.push_back({"missing_value", "stakeholder set is empty", "/stakeholders/members"});
  }
  if (s.criterion_weights.size() != b || s.planner_weights.size() != b) {
    issues.push_back({"missing_value", "every stakeholder needs criterion and planner weights",
                      "/stakeholders/members"});
    return issues;
  }
  for (std::size_t k = 0; k < b; ++k) {
    auto const ptr = "/stakeholders/members/" + std::to_string(k);
    auto const& w = s.criterion_weights[k];
    if (w.size() != num_criteria) {
      issues.push_back({"missing_value", "stakeholder weights must have one entry per criterion", ptr + "/weights"});
      continue;
    }
    bool negative = false;
    for (auto v : w) {
      negative = negative || !(v >= 0.0);
    }
    auto const sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (negative) {
      issues.push_back({"negative_value", "stakeholder weight must be non-negative", ptr + "/weights"});
    } else if (std::abs(sum - 1.0) > equality_tolerance) {
      issues.push_back(
          {"weight_sum", "stakeholder weights sum " + detail::fmt_number(sum) + " != 1", ptr + "/weights"});
    }
    if (!(s.planner_weights[k] >= 0.0)) {
      issues.push_back({"negative_value", "planner weight must be non-negative", ptr + "/planner_weight"});
    }
  }
  auto const z = std::accumulate(s.planner_weights.begin(), s.planner_weights.end(), 0.0);
  if (b > 0 && std::abs(z - 1.0) > equality_tolerance) {
    issues.push_back({"weight_sum", "planner weights sum " + detail::fmt_number(z) + " != 1", "/stakeholders"});
  }
  return issues;
}

/// One aggregation y^{sets}_{indices}(x) or its discounted counterpart.
///
/// Cells are dense over the retained axes. Period coordinates are actual
/// accrual periods t in {1, ..., p}.
class dashboard_table {
 public:
  dashboard_table() = default;
  dashboard_table(axis_selection axes, std::vector<std::size_t> extents)
      : m_axes(axes)
      , m_extents(std::move(extents)) {
    std::size_t size = 1;
    for (auto e : m_extents) {
      size *= e;
    }
    m_values.assign(size, 0.0);
  }

  [[nodiscard]] auto selection() const noexcept -> axis_selection const& { return m_axes; }
  [[nodiscard]] auto axes() const -> std::vector<axis> { return m_axes.kept.axes(); }
  [[nodiscard]] auto extents() const noexcept -> std::vector<std::size_t> const& { return m_extents; }
  [[nodiscard]] auto values() const noexcept -> std::vector<double> const& { return m_values; }
  [[nodiscard]] auto size() const noexcept { return m_values.size(); }

  [[nodiscard]] auto offset(std::span<std::size_t const> index) const -> std::size_t {
    auto const ax = axes();
    if (index.size() != ax.size()) {
      throw error("bad_index", "index arity does not match retained axes");
    }
    std::size_t off = 0;
    for (std::size_t d = 0; d < ax.size(); ++d) {
      auto coord = index[d];
      if (ax[d] == axis::period) {
        if (coord == 0) {
          throw error("bad_index", "period index ranges over 1..p");
        }
        --coord;
      }
      if (coord >= m_extents[d]) {
        throw error("bad_index", "index out of range");
      }
      off = off * m_extents[d] + coord;
    }
    return off;
  }

  [[nodiscard]] auto at(std::initializer_list<std::size_t> index) const -> double {
    return m_values[offset(std::span<std::size_t const>(index.begin(), index.size()))];
  }
  [[nodiscard]] auto at(std::vector<std::size_t> const& index) const -> double { return m_values[offset(index)]; }
  auto ref(std::vector<std::size_t> const& index) -> double& { return m_values[offset(index)]; }

  /// Index tuple (period coordinates 1-based) of the cell at a flat offset.
  [[nodiscard]] auto index_of(std::size_t flat) const -> std::vector<std::size_t> {
    auto const ax = axes();
    std::vector<std::size_t> idx(ax.size());
    for (std::size_t d = ax.size(); d-- > 0;) {
      idx[d] = flat % m_extents[d];
      flat /= m_extents[d];
      if (ax[d] == axis::period) {
        ++idx[d];
      }
    }
    return idx;
  }

  /// Accumulate into the cell at a flat offset.
  void add_at(std::size_t flat, double v) { m_values[flat] += v; }

 private:
  axis_selection m_axes;
  std::vector<std::size_t> m_extents;
  std::vector<double> m_values;
};

/// Name such as "yhat_LT", "y_J", "yhat_LTK" or "yhat_LT_z" (planner-aggregated).
[[nodiscard]] inline auto table_name(axis_selection const& sel) -> std::string {
  std::string name = sel.discounted ? "yhat" : "y";
  std::string letters;
  for (auto a : sel.kept.axes()) {
    letters += axis_letter(a);
  }
  if (!letters.empty()) {
    name += "_" + letters;
  }
  if (sel.weights == weighting::stakeholder_and_criterion_weights && !sel.kept.contains(axis::stakeholder)) {
    name += "_z";
  }
  return name;
}

namespace detail {

inline void check_selection(axis_selection const& sel, stakeholder_set const* stakeholders) {
  auto const& kept = sel.kept;
  if (kept.contains(axis::criterion) && sel.weights != weighting::none) {
    throw error("bad_axes", "criterion-indexed tables are unweighted");
  }
  if (kept.contains(axis::stakeholder) && sel.weights != weighting::stakeholder_and_criterion_weights) {
    throw error("bad_axes", "stakeholder-indexed tables need stakeholder weighting");
  }
  if ((kept.contains(axis::stakeholder) || sel.weights == weighting::stakeholder_and_criterion_weights) &&
      stakeholders == nullptr) {
    throw error("missing_stakeholders", "stakeholder aggregation requested without a stakeholder set");
  }
}

inline auto table_extents(problem_instance const& inst, axis_selection const& sel,
                          stakeholder_set const* stakeholders) -> std::vector<std::size_t> {
  std::vector<std::size_t> ext;
  for (auto a : sel.kept.axes()) {
    switch (a) {
      case axis::facility:
        ext.push_back(inst.num_facilities());
        break;
      case axis::criterion:
        ext.push_back(inst.num_criteria());
        break;
      case axis::location:
        ext.push_back(inst.num_locations());
        break;
      case axis::period:
        ext.push_back(inst.horizon);
        break;
      case axis::stakeholder:
        ext.push_back(stakeholders->size());
        break;
    }
  }
  return ext;
}

}  // namespace detail

/// y^{IJLT}_{ijlt}(x): performance accrued in period t by facility i on
/// criterion j at location l, i.e. y_ijl if i was activated at l before t.
[[nodiscard]] inline auto performance_cell(problem_instance const& inst, strategy const& x, std::size_t i,
                                           std::size_t j, std::size_t l, std::size_t t) -> double {
  double sum = 0.0;
  for (auto const& a : x) {
    if (a.facility == i && a.location == l && a.period < t) {
      sum += inst.evaluation(i, j, l, t);
    }
  }
  return sum;
}

/// Sums weighted performance cells over every dropped axis.
[[nodiscard]] inline auto aggregate(problem_instance const& inst, strategy const& x, axis_selection const& sel,
                                    stakeholder_set const* stakeholders = nullptr) -> dashboard_table {
  detail::check_selection(sel, stakeholders);
  dashboard_table table(sel, detail::table_extents(inst, sel, stakeholders));
  auto const ax = sel.kept.axes();
  auto const& ext = table.extents();
  auto const p = inst.horizon;
  bool const by_stakeholder = sel.weights == weighting::stakeholder_and_criterion_weights;
  auto const num_k = by_stakeholder ? stakeholders->size() : std::size_t{1};

  std::array<std::size_t, 5> coord{};
  auto flat = [&]() {
    std::size_t off = 0;
    for (std::size_t d = 0; d < ax.size(); ++d) {
      auto c = coord[static_cast<std::size_t>(ax[d])];
      if (ax[d] == axis::period) {
        --c;
      }
      off = off * ext[d] + c;
    }
    return off;
  };

  for (auto const& a : x) {
    coord[0] = a.facility;
    coord[2] = a.location;
    for (auto t = a.period + 1; t <= p; ++t) {
      coord[3] = t;
      double const disc = sel.discounted ? discount_factor(t, inst.interest_rate) : 1.0;
      for (std::size_t j = 0; j < inst.num_criteria(); ++j) {
        coord[1] = j;
        double const y = inst.evaluation(a.facility, j, a.location, t);
        for (std::size_t k = 0; k < num_k; ++k) {
          coord[4] = k;
          double w = 1.0;
          if (sel.weights == weighting::criterion_weights) {
            w = inst.weights[j];
          } else if (by_stakeholder) {
            w = stakeholders->criterion_weights[k][j];
            if (!sel.kept.contains(axis::stakeholder)) {
              w *= stakeholders->planner_weights[k];
            }
          }
          table.add_at(flat(), y * w * disc);
        }
      }
    }
  }
  return table;
}

/// Every aggregation of the dashboard, undiscounted then discounted. Each pass
/// emits the 15 marginal tables over {I,J,L,T} and the overall scalar, then,
/// when stakeholders are given, the tables retaining K and the planner
/// aggregated (z-weighted) tables over subsets of {I,L,T}.
[[nodiscard]] inline auto full_report(problem_instance const& inst, strategy const& x,
                                      stakeholder_set const* stakeholders = nullptr)
    -> std::vector<std::pair<std::string, dashboard_table>> {
  std::vector<std::pair<std::string, dashboard_table>> out;
  constexpr std::uint8_t I = 1, J = 2, L = 4, T = 8, K = 16;
  // Finest table first, overall last.
  constexpr std::array<std::uint8_t, 16> single_dm = {
      I | J | L | T, J | L | T, I | L | T, I | J | T, I | J | L, L | T, J | T, J | L,
      I | T,         I | L,     I | J,     T,         L,         J,         I,         0};
  constexpr std::array<std::uint8_t, 8> spatial = {I | L | T, L | T, I | T, I | L, T, L, I, 0};

  for (bool disc : {false, true}) {
    for (auto bits : single_dm) {
      axis_selection sel{axis_set::from_bits(bits), disc,
                         (bits & J) != 0 ? weighting::none : weighting::criterion_weights};
      out.emplace_back(table_name(sel), aggregate(inst, x, sel));
    }
    if (stakeholders != nullptr) {
      for (auto bits : spatial) {
        axis_selection sel{axis_set::from_bits(static_cast<std::uint8_t>(bits | K)), disc,
                           weighting::stakeholder_and_criterion_weights};
        out.emplace_back(table_name(sel), aggregate(inst, x, sel, stakeholders));
      }
      for (auto bits : spatial) {
        axis_selection sel{axis_set::from_bits(bits), disc, weighting::stakeholder_and_criterion_weights};
        out.emplace_back(table_name(sel), aggregate(inst, x, sel, stakeholders));
      }
    }
  }
  return out;
}

}  // namespace spacetime

#endif  // SPACETIME_DASHBOARD_HPP_

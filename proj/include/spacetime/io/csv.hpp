#ifndef SPACETIME_IO_CSV_HPP_
#define SPACETIME_IO_CSV_HPP_

#include "spacetime/dashboard.hpp"
#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace spacetime::io {

/// Inverse of table_name: "yhat_LT" -> L,T discounted, criterion weighted.
[[nodiscard]] inline auto selection_from_name(std::string const& name) -> axis_selection {
  axis_selection sel;
  std::string rest;
  if (name.rfind("yhat", 0) == 0) {
    sel.discounted = true;
    rest = name.substr(4);
  } else if (name.rfind("y", 0) == 0) {
    sel.discounted = false;
    rest = name.substr(1);
  } else {
    throw error("bad_table", "unknown table '" + name + "'");
  }
  bool z = false;
  if (rest.size() >= 2 && rest.substr(rest.size() - 2) == "_z") {
    z = true;
    rest.resize(rest.size() - 2);
  }
  if (!rest.empty()) {
    if (rest[0] != '_') {
      throw error("bad_table", "unknown table '" + name + "'");
    }
    for (char c : rest.substr(1)) {
      bool found = false;
      for (auto a : all_axes) {
        if (axis_letter(a) == c) {
          sel.kept.insert(a);
          found = true;
        }
      }
      if (!found) {
        throw error("bad_table", "unknown axis '" + std::string(1, c) + "' in '" + name + "'");
      }
    }
  }
  if (z || sel.kept.contains(axis::stakeholder)) {
    sel.weights = weighting::stakeholder_and_criterion_weights;
  } else if (sel.kept.contains(axis::criterion)) {
    sel.weights = weighting::none;
  }
  return sel;
}

namespace detail {

inline auto axis_ids(axis a, problem_instance const& inst, stakeholder_set const* stakeholders)
    -> std::vector<std::string> {
  std::vector<std::string> out;
  auto ids = [&](std::vector<entity> const& es) {
    for (auto const& e : es) {
      out.push_back(e.id);
    }
  };
  switch (a) {
    case axis::facility:
      ids(inst.facilities);
      break;
    case axis::criterion:
      ids(inst.criteria);
      break;
    case axis::location:
      ids(inst.locations);
      break;
    case axis::period:
      for (std::size_t t = 1; t <= inst.horizon; ++t) {
        out.push_back(std::to_string(t));
      }
      break;
    case axis::stakeholder:
      if (stakeholders != nullptr) {
        ids(stakeholders->members);
      }
      break;
  }
  return out;
}

inline auto split(std::string const& line) -> std::vector<std::string> {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

}  // namespace detail

/// One row per index tuple: axis columns hold ids (periods as numbers), then
/// the value printed with 17 significant digits.
[[nodiscard]] inline auto to_csv(dashboard_table const& table, problem_instance const& inst,
                                 stakeholder_set const* stakeholders = nullptr) -> std::string {
  auto const ax = table.axes();
  std::string out;
  for (auto a : ax) {
    out += axis_name(a);
    out += ',';
  }
  out += "value\n";
  std::vector<std::vector<std::string>> labels;
  for (auto a : ax) {
    labels.push_back(detail::axis_ids(a, inst, stakeholders));
  }
  char buf[64];
  for (std::size_t flat = 0; flat < table.size(); ++flat) {
    auto const idx = table.index_of(flat);
    for (std::size_t d = 0; d < ax.size(); ++d) {
      out += labels[d][ax[d] == axis::period ? idx[d] - 1 : idx[d]];
      out += ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", table.values()[flat]);
    out += buf;
    out += '\n';
  }
  return out;
}

/// Reads a CSV written by to_csv back into a table of the given selection.
[[nodiscard]] inline auto parse_csv(std::string const& text, axis_selection const& sel, problem_instance const& inst,
                                    stakeholder_set const* stakeholders = nullptr) -> dashboard_table {
  dashboard_table table(sel, spacetime::detail::table_extents(inst, sel, stakeholders));
  auto const ax = table.axes();
  std::vector<std::vector<std::string>> labels;
  std::string expected;
  for (auto a : ax) {
    labels.push_back(detail::axis_ids(a, inst, stakeholders));
    expected += std::string(axis_name(a)) + ",";
  }
  expected += "value";
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != expected) {
    throw error("bad_csv", "header must be '" + expected + "'", "/0");
  }
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    auto const cells = detail::split(line);
    if (cells.size() != ax.size() + 1) {
      throw error("bad_csv", "wrong number of cells", "/" + std::to_string(row));
    }
    std::vector<std::size_t> idx;
    for (std::size_t d = 0; d < ax.size(); ++d) {
      auto const& ls = labels[d];
      auto it = std::find(ls.begin(), ls.end(), cells[d]);
      if (it == ls.end()) {
        throw error("bad_csv", "unknown " + std::string(axis_name(ax[d])) + " '" + cells[d] + "'",
                    "/" + std::to_string(row));
      }
      auto k = static_cast<std::size_t>(it - ls.begin());
      idx.push_back(ax[d] == axis::period ? k + 1 : k);
    }
    try {
      table.ref(idx) = std::stod(cells.back());
    } catch (std::logic_error const&) {
      throw error("bad_csv", "value is not a number", "/" + std::to_string(row));
    }
  }
  return table;
}

}  // namespace spacetime::io

#endif  // SPACETIME_IO_CSV_HPP_

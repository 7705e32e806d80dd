#ifndef SPACETIME_IO_INSTANCE_FILE_HPP_
#define SPACETIME_IO_INSTANCE_FILE_HPP_

#include "spacetime/continuous_lp.hpp"
#include "spacetime/dashboard.hpp"
#include "spacetime/drsa.hpp"
#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"
#include "spacetime/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace spacetime::io {

using json = nlohmann::ordered_json;

struct uncertainty_block {
  double tolerance = tree_tolerance;
  std::vector<scenario_tree> trees;
};

/// An instance with its optional blocks, as stored in one JSON file.
struct instance_document {
  problem_instance instance;
  std::optional<budget_bounds> continuous;
  std::optional<uncertainty_block> uncertainty;
  std::optional<stakeholder_set> stakeholders;
  std::optional<threshold_scheme> thresholds;

  /// The instance solvers should see: expected values when trees are present.
  [[nodiscard]] auto effective_instance() const -> problem_instance {
    return uncertainty ? expected_instance(instance, uncertainty->trees, uncertainty->tolerance) : instance;
  }
};

/// Integral values are written as JSON integers so files stay readable.
[[nodiscard]] inline auto number(double v) -> json {
  if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

namespace detail {

/// Collects typed reads and every problem found, with JSON pointers.
class reader {
 public:
  std::vector<issue> issues;

  void fail(std::string code, std::string message, std::string pointer) {
    issues.push_back({std::move(code), std::move(message), std::move(pointer)});
  }

  auto object(json const& j, std::string const& ptr, std::initializer_list<std::string_view> required,
              std::initializer_list<std::string_view> optional = {}) -> bool {
    if (!j.is_object()) {
      fail("type_error", "expected an object", ptr);
      return false;
    }
    for (auto const& [key, _] : j.items()) {
      auto known = [&](auto const& list) {
        return std::find(list.begin(), list.end(), std::string_view(key)) != list.end();
      };
      if (!known(required) && !known(optional)) {
        fail("unknown_key", "unknown key '" + key + "'", ptr + "/" + key);
      }
    }
    bool ok = true;
    for (auto key : required) {
      if (!j.contains(std::string(key))) {
        fail("missing_key", "missing key '" + std::string(key) + "'", ptr + "/" + std::string(key));
        ok = false;
      }
    }
    return ok;
  }

  auto array(json const& j, std::string const& ptr) -> bool {
    if (!j.is_array()) {
      fail("type_error", "expected an array", ptr);
      return false;
    }
    return true;
  }

  auto real(json const& j, std::string const& ptr) -> double {
    if (!j.is_number()) {
      fail("type_error", "expected a number", ptr);
      return 0.0;
    }
    return j.get<double>();
  }

  auto count(json const& j, std::string const& ptr) -> std::size_t {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
      fail("type_error", "expected a nonnegative integer", ptr);
      return 0;
    }
    return j.get<std::size_t>();
  }

  auto text(json const& j, std::string const& ptr) -> std::string {
    if (!j.is_string()) {
      fail("type_error", "expected a string", ptr);
      return {};
    }
    return j.get<std::string>();
  }

  auto reals(json const& j, std::string const& ptr) -> std::vector<double> {
    std::vector<double> out;
    if (array(j, ptr)) {
      for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(real(j[k], ptr + "/" + std::to_string(k)));
      }
    }
    return out;
  }

  auto texts(json const& j, std::string const& ptr) -> std::vector<std::string> {
    std::vector<std::string> out;
    if (array(j, ptr)) {
      for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(text(j[k], ptr + "/" + std::to_string(k)));
      }
    }
    return out;
  }

  auto entities(json const& j, std::string const& ptr) -> std::vector<entity> {
    std::vector<entity> out;
    if (!array(j, ptr)) {
      return out;
    }
    for (std::size_t k = 0; k < j.size(); ++k) {
      auto const p = ptr + "/" + std::to_string(k);
      if (!object(j[k], p, {"id"}, {"name"})) {
        continue;
      }
      entity e;
      e.id = text(j[k]["id"], p + "/id");
      e.name = j[k].contains("name") ? text(j[k]["name"], p + "/name") : e.id;
      for (auto const& prev : out) {
        if (prev.id == e.id) {
          fail("duplicate_id", "duplicate id '" + e.id + "'", p + "/id");
        }
      }
      out.push_back(std::move(e));
    }
    return out;
  }

  /// Index of an id (or a plain index) among entities.
  auto resolve(json const& j, std::vector<entity> const& among, std::string const& ptr) -> std::size_t {
    if (j.is_number_integer()) {
      auto const k = count(j, ptr);
      if (k >= among.size()) {
        fail("index_out_of_range", "index " + std::to_string(k) + " out of range", ptr);
      }
      return k;
    }
    auto const id = text(j, ptr);
    for (std::size_t k = 0; k < among.size(); ++k) {
      if (among[k].id == id) {
        return k;
      }
    }
    if (j.is_string()) {
      fail("unknown_id", "unknown id '" + id + "'", ptr);
    }
    return among.size();
  }
};

inline auto entities_json(std::vector<entity> const& es) -> json {
  json out = json::array();
  for (auto const& e : es) {
    out.push_back({{"id", e.id}, {"name", e.name}});
  }
  return out;
}

inline auto numbers_json(std::vector<double> const& v) -> json {
  json out = json::array();
  for (auto x : v) {
    out.push_back(number(x));
  }
  return out;
}

inline auto parse_node(reader& r, json const& j, std::string const& ptr, bool root) -> scenario_node {
  scenario_node node;
  if (!r.object(j, ptr, {}, {"state", "probability", "performance", "children"})) {
    return node;
  }
  if (j.contains("state")) {
    node.state = r.text(j["state"], ptr + "/state");
  }
  if (j.contains("probability")) {
    node.probability = r.real(j["probability"], ptr + "/probability");
  } else if (!root) {
    r.fail("missing_key", "missing key 'probability'", ptr + "/probability");
  }
  if (j.contains("performance")) {
    node.performance = r.real(j["performance"], ptr + "/performance");
  }
  if (j.contains("children") && r.array(j["children"], ptr + "/children")) {
    for (std::size_t k = 0; k < j["children"].size(); ++k) {
      node.children.push_back(parse_node(r, j["children"][k], ptr + "/children/" + std::to_string(k), false));
    }
  }
  return node;
}

inline auto node_json(scenario_node const& node, bool root) -> json {
  json out = json::object();
  if (!node.state.empty()) {
    out["state"] = node.state;
  }
  if (!root || node.probability != 1.0) {
    out["probability"] = number(node.probability);
  }
  if (node.performance) {
    out["performance"] = number(*node.performance);
  }
  if (!node.children.empty()) {
    json kids = json::array();
    for (auto const& c : node.children) {
      kids.push_back(node_json(c, false));
    }
    out["children"] = std::move(kids);
  }
  return out;
}

inline constexpr std::string_view bound_blocks[] = {"facility_max", "facility_min", "location_max", "location_min"};

inline auto bound_map(budget_bounds& b, std::string_view block) -> budget_bounds::bound_map& {
  if (block == "facility_max") {
    return b.facility_max;
  }
  if (block == "facility_min") {
    return b.facility_min;
  }
  if (block == "location_max") {
    return b.location_max;
  }
  return b.location_min;
}

inline auto parse_bounds(reader& r, json const& j, problem_instance const& inst) -> budget_bounds {
  budget_bounds b;
  if (!r.object(j, "/continuous", {}, {"facility_max", "facility_min", "location_max", "location_min"})) {
    return b;
  }
  for (auto block : bound_blocks) {
    auto const key = std::string(block);
    if (!j.contains(key)) {
      continue;
    }
    auto const ptr = "/continuous/" + key;
    if (!j[key].is_object()) {
      r.fail("type_error", "expected an object keyed by id", ptr);
      continue;
    }
    auto const& among = block.substr(0, 8) == "facility" ? inst.facilities : inst.locations;
    for (auto const& [id, periods] : j[key].items()) {
      auto const idx = r.resolve(json(id), among, ptr + "/" + id);
      if (!periods.is_object()) {
        r.fail("type_error", "expected an object keyed by period", ptr + "/" + id);
        continue;
      }
      for (auto const& [period, value] : periods.items()) {
        auto const p = ptr + "/" + id + "/" + period;
        if (period.empty() || period.find_first_not_of("0123456789") != std::string::npos) {
          r.fail("type_error", "period keys are nonnegative integers", p);
          continue;
        }
        auto const v = r.real(value, p);
        if (idx < among.size()) {
          bound_map(b, block)[{idx, std::stoul(period)}] = v;
        }
      }
    }
  }
  return b;
}

inline auto bounds_json(budget_bounds const& b, problem_instance const& inst) -> json {
  json out = json::object();
  auto copy = b;
  for (auto block : bound_blocks) {
    auto const& map = bound_map(copy, block);
    if (map.empty()) {
      continue;
    }
    auto const& among = block.substr(0, 8) == "facility" ? inst.facilities : inst.locations;
    json blk = json::object();
    for (auto const& [key, value] : map) {
      blk[among[key.first].id][std::to_string(key.second)] = number(value);
    }
    out[std::string(block)] = std::move(blk);
  }
  return out;
}

/// Bound issues are keyed by index; the file is keyed by id.
inline auto rename_bound_pointer(std::string ptr, problem_instance const& inst) -> std::string {
  for (auto block : bound_blocks) {
    auto const prefix = "/continuous/" + std::string(block) + "/";
    if (ptr.rfind(prefix, 0) != 0) {
      continue;
    }
    auto const rest = ptr.substr(prefix.size());
    auto const slash = rest.find('/');
    auto const idx = std::stoul(rest.substr(0, slash));
    auto const& among = block.substr(0, 8) == "facility" ? inst.facilities : inst.locations;
    if (idx < among.size()) {
      return prefix + among[idx].id + (slash == std::string::npos ? "" : rest.substr(slash));
    }
  }
  return ptr;
}

}  // namespace detail

/// Parses and validates a document; throws validation_error listing every
/// problem with its JSON pointer.
[[nodiscard]] inline auto parse_instance(json const& j) -> instance_document {
  detail::reader r;
  instance_document doc;
  auto& inst = doc.instance;
  if (!r.object(j, "", {"meta", "facilities", "locations", "criteria", "evaluations", "costs", "budgets", "weights"},
                {"precedence", "continuous", "uncertainty", "stakeholders", "thresholds"})) {
    throw validation_error(r.issues);
  }
  if (r.object(j["meta"], "/meta", {"name", "interest_rate", "horizon"})) {
    inst.name = r.text(j["meta"]["name"], "/meta/name");
    inst.interest_rate = r.real(j["meta"]["interest_rate"], "/meta/interest_rate");
    inst.horizon = r.count(j["meta"]["horizon"], "/meta/horizon");
  }
  inst.facilities = r.entities(j["facilities"], "/facilities");
  inst.locations = r.entities(j["locations"], "/locations");
  inst.criteria = r.entities(j["criteria"], "/criteria");
  if (r.array(j["evaluations"], "/evaluations")) {
    for (std::size_t i = 0; i < j["evaluations"].size(); ++i) {
      auto const pi = "/evaluations/" + std::to_string(i);
      std::vector<std::vector<double>> row;
      if (r.array(j["evaluations"][i], pi)) {
        for (std::size_t c = 0; c < j["evaluations"][i].size(); ++c) {
          row.push_back(r.reals(j["evaluations"][i][c], pi + "/" + std::to_string(c)));
        }
      }
      inst.evaluations.push_back(std::move(row));
    }
  }
  inst.costs = r.reals(j["costs"], "/costs");
  inst.budgets = r.reals(j["budgets"], "/budgets");
  inst.weights = r.reals(j["weights"], "/weights");
  if (j.contains("precedence") && r.array(j["precedence"], "/precedence")) {
    for (std::size_t k = 0; k < j["precedence"].size(); ++k) {
      auto const p = "/precedence/" + std::to_string(k);
      auto const& e = j["precedence"][k];
      if (r.object(e, p, {"before", "after"})) {
        inst.precedence.push_back(
            {r.resolve(e["before"], inst.facilities, p + "/before"), r.resolve(e["after"], inst.facilities, p + "/after")});
      }
    }
  }
  if (!r.issues.empty()) {
    throw validation_error(r.issues);
  }
  for (auto& i : validate_instance(inst)) {
    r.issues.push_back(std::move(i));
  }
  if (!r.issues.empty()) {
    throw validation_error(r.issues);
  }

  if (j.contains("continuous")) {
    doc.continuous = detail::parse_bounds(r, j["continuous"], inst);
    if (r.issues.empty()) {
      for (auto i : validate_bounds(inst, *doc.continuous)) {
        i.pointer = detail::rename_bound_pointer(i.pointer, inst);
        r.issues.push_back(std::move(i));
      }
    }
  }
  if (j.contains("uncertainty")) {
    auto const& u = j["uncertainty"];
    uncertainty_block block;
    if (r.object(u, "/uncertainty", {"trees"}, {"tolerance"})) {
      if (u.contains("tolerance")) {
        block.tolerance = r.real(u["tolerance"], "/uncertainty/tolerance");
      }
      if (r.array(u["trees"], "/uncertainty/trees")) {
        for (std::size_t k = 0; k < u["trees"].size(); ++k) {
          auto const p = "/uncertainty/trees/" + std::to_string(k);
          auto const& t = u["trees"][k];
          if (!r.object(t, p, {"facility", "criterion", "location", "root"})) {
            continue;
          }
          scenario_tree tree;
          tree.facility = r.resolve(t["facility"], inst.facilities, p + "/facility");
          tree.criterion = r.resolve(t["criterion"], inst.criteria, p + "/criterion");
          tree.location = r.resolve(t["location"], inst.locations, p + "/location");
          tree.root = detail::parse_node(r, t["root"], p + "/root", true);
          block.trees.push_back(std::move(tree));
        }
      }
    }
    if (r.issues.empty()) {
      try {
        (void)expected_instance(inst, block.trees, block.tolerance);
      } catch (validation_error const& e) {
        r.issues.insert(r.issues.end(), e.issues().begin(), e.issues().end());
      }
    }
    doc.uncertainty = std::move(block);
  }
  if (j.contains("stakeholders")) {
    auto const& s = j["stakeholders"];
    stakeholder_set set;
    if (r.object(s, "/stakeholders", {"members"}) && r.array(s["members"], "/stakeholders/members")) {
      for (std::size_t k = 0; k < s["members"].size(); ++k) {
        auto const p = "/stakeholders/members/" + std::to_string(k);
        auto const& m = s["members"][k];
        if (!r.object(m, p, {"id", "weights", "planner_weight"}, {"name"})) {
          continue;
        }
        entity e{r.text(m["id"], p + "/id"), {}};
        e.name = m.contains("name") ? r.text(m["name"], p + "/name") : e.id;
        set.members.push_back(std::move(e));
        set.criterion_weights.push_back(r.reals(m["weights"], p + "/weights"));
        set.planner_weights.push_back(r.real(m["planner_weight"], p + "/planner_weight"));
      }
    }
    if (r.issues.empty()) {
      for (auto& i : validate_stakeholders(set, inst.num_criteria())) {
        r.issues.push_back(std::move(i));
      }
    }
    doc.stakeholders = std::move(set);
  }
  if (j.contains("thresholds")) {
    auto const& t = j["thresholds"];
    threshold_scheme scheme;
    if (r.object(t, "/thresholds", {}, {"labels", "boundary", "values", "uniform"})) {
      if (t.contains("labels")) {
        scheme.labels = r.texts(t["labels"], "/thresholds/labels");
      }
      if (t.contains("boundary")) {
        auto const b = r.text(t["boundary"], "/thresholds/boundary");
        if (b == "inclusive" || b == "exclusive") {
          scheme.boundary = parse_boundary_rule(b);
        } else {
          r.fail("bad_boundary", "boundary is 'inclusive' or 'exclusive'", "/thresholds/boundary");
        }
      }
      if (t.contains("values") == t.contains("uniform")) {
        r.fail("missing_key", "give exactly one of 'values' and 'uniform'", "/thresholds");
      } else if (t.contains("uniform")) {
        scheme.values.assign(inst.num_criteria(), std::vector<std::vector<double>>(
                                                      inst.num_locations(), r.reals(t["uniform"], "/thresholds/uniform")));
      } else if (r.array(t["values"], "/thresholds/values")) {
        for (std::size_t c = 0; c < t["values"].size(); ++c) {
          auto const pc = "/thresholds/values/" + std::to_string(c);
          std::vector<std::vector<double>> row;
          if (r.array(t["values"][c], pc)) {
            for (std::size_t l = 0; l < t["values"][c].size(); ++l) {
              row.push_back(r.reals(t["values"][c][l], pc + "/" + std::to_string(l)));
            }
          }
          scheme.values.push_back(std::move(row));
        }
      }
    }
    if (r.issues.empty()) {
      for (auto& i : validate_thresholds(inst, scheme)) {
        r.issues.push_back(std::move(i));
      }
    }
    doc.thresholds = std::move(scheme);
  }
  if (!r.issues.empty()) {
    throw validation_error(r.issues);
  }
  return doc;
}

/// Canonical form: fixed key order, ids for references, integers where exact.
[[nodiscard]] inline auto to_json(instance_document const& doc) -> json {
  auto const& inst = doc.instance;
  json out = json::object();
  out["meta"] = {{"name", inst.name}, {"interest_rate", number(inst.interest_rate)}, {"horizon", inst.horizon}};
  out["facilities"] = detail::entities_json(inst.facilities);
  out["locations"] = detail::entities_json(inst.locations);
  out["criteria"] = detail::entities_json(inst.criteria);
  json evals = json::array();
  for (auto const& row : inst.evaluations) {
    json r = json::array();
    for (auto const& c : row) {
      r.push_back(detail::numbers_json(c));
    }
    evals.push_back(std::move(r));
  }
  out["evaluations"] = std::move(evals);
  out["costs"] = detail::numbers_json(inst.costs);
  out["budgets"] = detail::numbers_json(inst.budgets);
  out["weights"] = detail::numbers_json(inst.weights);
  if (!inst.precedence.empty()) {
    json pr = json::array();
    for (auto const& p : inst.precedence) {
      pr.push_back({{"before", inst.facilities[p.before].id}, {"after", inst.facilities[p.after].id}});
    }
    out["precedence"] = std::move(pr);
  }
  if (doc.continuous) {
    out["continuous"] = detail::bounds_json(*doc.continuous, inst);
  }
  if (doc.uncertainty) {
    json trees = json::array();
    for (auto const& t : doc.uncertainty->trees) {
      trees.push_back({{"facility", inst.facilities[t.facility].id},
                       {"criterion", inst.criteria[t.criterion].id},
                       {"location", inst.locations[t.location].id},
                       {"root", detail::node_json(t.root, true)}});
    }
    out["uncertainty"] = {{"tolerance", number(doc.uncertainty->tolerance)}, {"trees", std::move(trees)}};
  }
  if (doc.stakeholders) {
    json members = json::array();
    auto const& s = *doc.stakeholders;
    for (std::size_t k = 0; k < s.size(); ++k) {
      members.push_back({{"id", s.members[k].id},
                         {"name", s.members[k].name},
                         {"weights", detail::numbers_json(s.criterion_weights[k])},
                         {"planner_weight", number(s.planner_weights[k])}});
    }
    out["stakeholders"] = {{"members", std::move(members)}};
  }
  if (doc.thresholds) {
    auto const& t = *doc.thresholds;
    json values = json::array();
    for (auto const& row : t.values) {
      json r = json::array();
      for (auto const& l : row) {
        r.push_back(detail::numbers_json(l));
      }
      values.push_back(std::move(r));
    }
    json th = json::object();
    if (!t.labels.empty()) {
      th["labels"] = t.labels;
    }
    th["boundary"] = std::string(to_string(t.boundary));
    th["values"] = std::move(values);
    out["thresholds"] = std::move(th);
  }
  return out;
}

[[nodiscard]] inline auto parse_json_text(std::string const& text) -> json {
  try {
    return json::parse(text);
  } catch (json::parse_error const& e) {
    throw error("parse_error", e.what());
  }
}

[[nodiscard]] inline auto read_file(std::string const& path) -> std::string {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw error("io_error", "cannot read '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(std::string const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw error("io_error", "cannot write '" + path + "'");
  }
  out << text;
}

[[nodiscard]] inline auto load_instance(std::string const& path) -> instance_document {
  return parse_instance(parse_json_text(read_file(path)));
}

inline void save_instance(std::string const& path, instance_document const& doc) {
  write_file(path, to_json(doc).dump(2) + "\n");
}

/// {"activations": [{"facility": id, "location": id, "period": t}, ...]}
[[nodiscard]] inline auto strategy_to_json(problem_instance const& inst, strategy const& x) -> json {
  json acts = json::array();
  for (auto const& a : x) {
    acts.push_back({{"facility", inst.facilities[a.facility].id},
                    {"location", inst.locations[a.location].id},
                    {"period", a.period}});
  }
  return {{"activations", std::move(acts)}};
}

[[nodiscard]] inline auto parse_strategy(problem_instance const& inst, json const& j) -> strategy {
  detail::reader r;
  std::vector<activation> acts;
  if (r.object(j, "", {"activations"}) && r.array(j["activations"], "/activations")) {
    for (std::size_t k = 0; k < j["activations"].size(); ++k) {
      auto const p = "/activations/" + std::to_string(k);
      auto const& a = j["activations"][k];
      if (r.object(a, p, {"facility", "location", "period"})) {
        acts.push_back({r.resolve(a["facility"], inst.facilities, p + "/facility"),
                        r.resolve(a["location"], inst.locations, p + "/location"), r.count(a["period"], p + "/period")});
      }
    }
  }
  if (r.issues.empty()) {
    auto issues = validate_strategy(inst, strategy(acts));
    r.issues = std::move(issues);
  }
  if (!r.issues.empty()) {
    throw validation_error(r.issues);
  }
  return strategy(std::move(acts));
}

}  // namespace spacetime::io

#endif  // SPACETIME_IO_INSTANCE_FILE_HPP_

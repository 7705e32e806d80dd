#ifndef SPACETIME_IO_SESSION_JSON_HPP_
#define SPACETIME_IO_SESSION_JSON_HPP_

#include "spacetime/imo_session.hpp"
#include "spacetime/io/instance_file.hpp"

#include <map>
#include <string>
#include <vector>

namespace spacetime::io {

/// Objective index by name, or by plain index.
[[nodiscard]] inline auto objective_index(std::vector<linear_objective> const& objs, json const& j,
                                          std::string const& ptr) -> std::size_t {
  if (j.is_number_unsigned() && j.get<std::size_t>() < objs.size()) {
    return j.get<std::size_t>();
  }
  if (j.is_string()) {
    for (std::size_t o = 0; o < objs.size(); ++o) {
      if (objs[o].name() == j.get<std::string>()) {
        return o;
      }
    }
  }
  throw error("unknown_objective", "unknown objective " + j.dump(), ptr);
}

[[nodiscard]] inline auto conditions_to_json(std::vector<rule_condition> const& cs,
                                             std::vector<linear_objective> const& objs) -> json {
  json out = json::array();
  for (auto const& c : cs) {
    out.push_back({{"objective", objs.at(c.objective).name()}, {"threshold", number(c.threshold)}});
  }
  return out;
}

[[nodiscard]] inline auto parse_conditions(json const& j, std::vector<linear_objective> const& objs,
                                           std::string const& ptr) -> std::vector<rule_condition> {
  if (!j.is_array()) {
    throw error("type_error", "expected an array of conditions", ptr);
  }
  std::vector<rule_condition> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    auto const p = ptr + "/" + std::to_string(k);
    if (!j[k].is_object() || !j[k].contains("objective") || !j[k].contains("threshold") ||
        !j[k]["threshold"].is_number()) {
      throw error("type_error", "a condition is {objective, threshold}", p);
    }
    out.push_back({objective_index(objs, j[k]["objective"], p + "/objective"), j[k]["threshold"].get<double>()});
  }
  return out;
}

[[nodiscard]] inline auto sample_to_json(problem_instance const& inst, std::vector<sample_entry> const& sample)
    -> json {
  json out = json::array();
  for (auto const& s : sample) {
    out.push_back({{"id", s.id},
                   {"values", detail::numbers_json(s.values)},
                   {"activations", strategy_to_json(inst, s.x)["activations"]}});
  }
  return out;
}

[[nodiscard]] inline auto rules_to_json(std::vector<ranked_rule> const& rules, std::vector<linear_objective> const& objs)
    -> json {
  json out = json::array();
  for (auto const& r : rules) {
    out.push_back({{"id", r.id},
                   {"conditions", conditions_to_json(r.rule.conditions, objs)},
                   {"text", describe(r.rule, objs)},
                   {"support", r.support}});
  }
  return out;
}

[[nodiscard]] inline auto labels_to_json(std::map<std::string, label> const& labels) -> json {
  json out = json::object();
  for (auto const& [id, tag] : labels) {
    out[id] = std::string(to_string(tag));
  }
  return out;
}

/// {"ST1": "good", ...}; throws validation_error (invalid_labels) on bad input.
[[nodiscard]] inline auto parse_labels(json const& j) -> std::map<std::string, label> {
  if (!j.is_object()) {
    throw validation_error({{"invalid_labels", "labels are an object of id to good|other", ""}});
  }
  std::map<std::string, label> out;
  std::vector<issue> issues;
  for (auto const& [id, tag] : j.items()) {
    if (!tag.is_string() || (tag != "good" && tag != "other" && tag != "unlabeled")) {
      issues.push_back({"invalid_labels", "label must be good, other or unlabeled", "/" + id});
      continue;
    }
    out[id] = parse_label(tag.get<std::string>());
  }
  if (!issues.empty()) {
    throw validation_error(std::move(issues));
  }
  return out;
}

[[nodiscard]] inline auto event_to_json(session_event const& ev, problem_instance const& inst,
                                        std::vector<linear_objective> const& objs) -> json {
  json out = {{"kind", std::string(to_string(ev.kind))}, {"iteration", ev.iteration}};
  switch (ev.kind) {
    case event_kind::sample:
      out["region_size"] = ev.region_size;
      out["sample"] = sample_to_json(inst, ev.sample);
      break;
    case event_kind::labels:
      out["labels"] = labels_to_json(ev.labels);
      break;
    case event_kind::rules:
      out["rules"] = rules_to_json(ev.rules, objs);
      out["warnings"] = ev.warnings;
      break;
    case event_kind::choice:
    case event_kind::satisfied:
      out["choice"] = ev.choice;
      break;
  }
  return out;
}

/// Journal file: the session settings plus the ordered events. The instance
/// and its thresholds come from the instance file the journal belongs to.
[[nodiscard]] inline auto journal_to_json(imo_session const& s, bool expected = false) -> json {
  auto const& cfg = s.config();
  json events = json::array();
  for (auto const& ev : s.events()) {
    events.push_back(event_to_json(ev, cfg.instance, s.objectives()));
  }
  return {{"formulation", std::string(to_string(cfg.form))},
          {"expected", expected},
          {"sample_size", cfg.sample_size},
          {"initial_constraints", conditions_to_json(cfg.initial_constraints, s.objectives())},
          {"events", std::move(events)}};
}

struct journal {
  formulation form = formulation::location;
  bool expected = false;  // run on expected values of the uncertainty trees
  std::size_t sample_size = default_sample_size;
  std::vector<rule_condition> initial_constraints;
  std::vector<session_event> events;
};

/// Parses a journal against an instance; rule supports are rebuilt from the
/// sample ids of the preceding SAMPLE event.
[[nodiscard]] inline auto parse_journal(json const& j, problem_instance const& inst, threshold_scheme const& th)
    -> journal {
  if (!j.is_object() || !j.contains("formulation") || !j.contains("events") || !j["events"].is_array()) {
    throw error("bad_journal", "a journal has 'formulation' and 'events'");
  }
  journal out;
  out.form = parse_formulation(j["formulation"].get<std::string>());
  auto const objs = formulation_objectives(inst, out.form, th);
  if (j.contains("expected")) {
    out.expected = j["expected"].get<bool>();
  }
  if (j.contains("sample_size")) {
    out.sample_size = j["sample_size"].get<std::size_t>();
  }
  if (j.contains("initial_constraints")) {
    out.initial_constraints = parse_conditions(j["initial_constraints"], objs, "/initial_constraints");
  }
  std::vector<sample_entry> current;
  for (std::size_t k = 0; k < j["events"].size(); ++k) {
    auto const ptr = "/events/" + std::to_string(k);
    auto const& e = j["events"][k];
    try {
      session_event ev;
      ev.kind = parse_event_kind(e.at("kind").get<std::string>());
      ev.iteration = e.at("iteration").get<std::size_t>();
      switch (ev.kind) {
        case event_kind::sample:
          ev.region_size = e.at("region_size").get<std::uint64_t>();
          for (auto const& s : e.at("sample")) {
            ev.sample.push_back({s.at("id").get<std::string>(),
                                 parse_strategy(inst, {{"activations", s.at("activations")}}),
                                 s.at("values").get<std::vector<double>>()});
          }
          current = ev.sample;
          break;
        case event_kind::labels:
          ev.labels = parse_labels(e.at("labels"));
          break;
        case event_kind::rules:
          for (auto const& r : e.at("rules")) {
            ranked_rule rr;
            rr.id = r.at("id").get<std::string>();
            rr.rule.conditions = parse_conditions(r.at("conditions"), objs, ptr + "/rules");
            rr.support = r.at("support").get<std::vector<std::string>>();
            for (auto const& id : rr.support) {
              auto it = std::find_if(current.begin(), current.end(), [&](auto const& s) { return s.id == id; });
              if (it == current.end()) {
                throw error("bad_journal", "support names unknown strategy '" + id + "'", ptr);
              }
              rr.rule.support.push_back(static_cast<std::size_t>(it - current.begin()));
            }
            ev.rules.push_back(std::move(rr));
          }
          ev.warnings = e.at("warnings").get<std::vector<std::string>>();
          break;
        case event_kind::choice:
        case event_kind::satisfied:
          ev.choice = e.at("choice").get<std::string>();
          break;
      }
      out.events.push_back(std::move(ev));
    } catch (json::exception const& ex) {
      throw error("bad_journal", ex.what(), ptr);
    } catch (validation_error const& ex) {
      throw error("bad_journal", ex.what(), ptr);
    }
  }
  return out;
}

/// Current state of a session as served by the API.
[[nodiscard]] inline auto session_to_json(imo_session const& s) -> json {
  auto const& inst = s.config().instance;
  json objectives = json::array();
  for (auto const& o : s.objectives()) {
    objectives.push_back(o.name());
  }
  json out = {{"state", std::string(to_string(s.state()))},
              {"iteration", s.iteration()},
              {"formulation", std::string(to_string(s.config().form))},
              {"objectives", std::move(objectives)},
              {"constraints", conditions_to_json(s.conditions(), s.objectives())},
              {"region_size", s.region_sizes().empty() ? 0 : s.region_sizes().back()},
              {"region_sizes", s.region_sizes()},
              {"sample", sample_to_json(inst, s.sample())},
              {"rules", s.state() == session_state::awaiting_rule_choice ? rules_to_json(s.rules(), s.objectives())
                                                                          : json::array()},
              {"warnings", s.warnings()}};
  if (s.chosen()) {
    out["chosen"] = sample_to_json(inst, {*s.chosen()})[0];
  }
  return out;
}

}  // namespace spacetime::io

#endif  // SPACETIME_IO_SESSION_JSON_HPP_

#ifndef SPACETIME_IMO_SESSION_HPP_
#define SPACETIME_IMO_SESSION_HPP_

#include "spacetime/binary_solver.hpp"
#include "spacetime/drsa.hpp"
#include "spacetime/error.hpp"
#include "spacetime/instance.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spacetime {

/// Up to k non-dominated points spread by greedy max-min normalized
/// Chebyshev distance, seeded with each objective's maximizer. Ties go to the
/// earlier point in the front's descending order. An empty front yields an
/// empty sample.
[[nodiscard]] inline auto select_representatives(std::vector<nondominated_point> const& front, std::size_t k)
    -> std::vector<nondominated_point> {
  if (k == 0) {
    throw error("bad_sample_size", "sample size must be at least 1");
  }
  std::vector<nondominated_point> out;
  if (front.empty()) {
    return out;
  }
  auto const arity = front[0].values.size();
  std::vector<double> range(arity, 0.0);
  for (std::size_t o = 0; o < arity; ++o) {
    auto [lo, hi] = std::minmax_element(front.begin(), front.end(),
                                        [&](auto const& a, auto const& b) { return a.values[o] < b.values[o]; });
    range[o] = hi->values[o] - lo->values[o];
  }
  std::vector<bool> taken(front.size(), false);
  auto take = [&](std::size_t idx) {
    taken[idx] = true;
    out.push_back(front[idx]);
  };
  for (std::size_t o = 0; o < arity && out.size() < k; ++o) {
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < front.size(); ++idx) {
      if (front[idx].values[o] > front[best].values[o]) {
        best = idx;
      }
    }
    if (!taken[best]) {
      take(best);
    }
  }
  auto distance = [&](std::vector<double> const& a, std::vector<double> const& b) {
    double d = 0.0;
    for (std::size_t o = 0; o < arity; ++o) {
      if (range[o] > 0.0) {
        d = std::max(d, std::abs(a[o] - b[o]) / range[o]);
      }
    }
    return d;
  };
  while (out.size() < k && out.size() < front.size()) {
    std::size_t best = front.size();
    double best_gap = -1.0;
    for (std::size_t idx = 0; idx < front.size(); ++idx) {
      if (taken[idx]) {
        continue;
      }
      double gap = std::numeric_limits<double>::infinity();
      for (auto const& s : out) {
        gap = std::min(gap, distance(front[idx].values, s.values));
      }
      if (gap > best_gap) {
        best_gap = gap;
        best = idx;
      }
    }
    take(best);
  }
  return out;
}

[[nodiscard]] inline auto sample_representatives(problem_instance const& inst,
                                                 std::vector<linear_objective> const& objectives,
                                                 std::vector<linear_constraint> const& constraints, std::size_t k)
    -> std::vector<nondominated_point> {
  return select_representatives(enumerate_nondominated(inst, objectives, constraints), k);
}

enum class session_state { awaiting_labels, awaiting_rule_choice, satisfied, empty_region };

[[nodiscard]] inline auto to_string(session_state s) -> std::string_view {
  switch (s) {
    case session_state::awaiting_labels:
      return "AWAITING_LABELS";
    case session_state::awaiting_rule_choice:
      return "AWAITING_RULE_CHOICE";
    case session_state::satisfied:
      return "SATISFIED";
    case session_state::empty_region:
      return "EMPTY_REGION";
  }
  return "";
}

struct sample_entry {
  std::string id;
  strategy x;
  std::vector<double> values;

  friend bool operator==(sample_entry const&, sample_entry const&) = default;
};

struct ranked_rule {
  std::string id;
  decision_rule rule;
  std::vector<std::string> support;  // sample ids

  friend bool operator==(ranked_rule const&, ranked_rule const&) = default;
};

enum class event_kind { sample, labels, rules, choice, satisfied };

[[nodiscard]] inline auto to_string(event_kind k) -> std::string_view {
  switch (k) {
    case event_kind::sample:
      return "SAMPLE";
    case event_kind::labels:
      return "LABELS";
    case event_kind::rules:
      return "RULES";
    case event_kind::choice:
      return "CHOICE";
    case event_kind::satisfied:
      return "SATISFIED";
  }
  return "";
}

[[nodiscard]] inline auto parse_event_kind(std::string_view s) -> event_kind {
  for (auto k : {event_kind::sample, event_kind::labels, event_kind::rules, event_kind::choice, event_kind::satisfied}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  throw error("bad_journal", "unknown event '" + std::string(s) + "'");
}

/// One journal entry. Only the fields of its kind are meaningful: SAMPLE
/// carries `sample` and `region_size`, LABELS `labels`, RULES `rules` and
/// `warnings`, CHOICE and SATISFIED the chosen id in `choice`.
struct session_event {
  event_kind kind = event_kind::sample;
  std::size_t iteration = 1;
  std::vector<sample_entry> sample;
  std::uint64_t region_size = 0;
  std::map<std::string, label> labels;
  std::vector<ranked_rule> rules;
  std::vector<std::string> warnings;
  std::string choice;

  friend bool operator==(session_event const&, session_event const&) = default;
};

inline constexpr std::size_t default_sample_size = 6;

struct session_config {
  problem_instance instance;
  formulation form = formulation::location;
  threshold_scheme thresholds;
  std::size_t sample_size = default_sample_size;
  /// Constraints in force before the first sample, as objective >= threshold.
  std::vector<rule_condition> initial_constraints;
};

/// The interactive loop: sample, labels, induced rules, rule choice, next
/// sample, until the DM is satisfied or no strategy is left.
class imo_session {
 public:
  explicit imo_session(session_config config)
      : m_config(std::move(config))
      , m_objectives(formulation_objectives(m_config.instance, m_config.form, m_config.thresholds)) {
    if (m_config.sample_size == 0) {
      throw error("bad_sample_size", "sample size must be at least 1");
    }
    for (auto const& c : m_config.initial_constraints) {
      if (c.objective >= m_objectives.size()) {
        throw error("bad_constraint", "constraint on unknown objective " + std::to_string(c.objective));
      }
      m_conditions.push_back(c);
    }
    next_sample();
  }

  [[nodiscard]] auto config() const noexcept -> session_config const& { return m_config; }
  [[nodiscard]] auto state() const noexcept { return m_state; }
  [[nodiscard]] auto iteration() const noexcept { return m_iteration; }
  [[nodiscard]] auto objectives() const noexcept -> std::vector<linear_objective> const& { return m_objectives; }
  [[nodiscard]] auto conditions() const noexcept -> std::vector<rule_condition> const& { return m_conditions; }
  [[nodiscard]] auto sample() const noexcept -> std::vector<sample_entry> const& { return m_sample; }
  [[nodiscard]] auto rules() const noexcept -> std::vector<ranked_rule> const& { return m_rules; }
  [[nodiscard]] auto warnings() const noexcept -> std::vector<std::string> const& { return m_warnings; }
  [[nodiscard]] auto region_sizes() const noexcept -> std::vector<std::uint64_t> const& { return m_region_sizes; }
  [[nodiscard]] auto events() const noexcept -> std::vector<session_event> const& { return m_events; }
  [[nodiscard]] auto chosen() const noexcept -> std::optional<sample_entry> const& { return m_chosen; }

  [[nodiscard]] auto constraints() const -> std::vector<linear_constraint> {
    std::vector<linear_constraint> out;
    for (auto const& c : m_conditions) {
      out.push_back({m_objectives[c.objective], c.threshold});
    }
    return out;
  }

  /// Labels by sample id; missing ids stay unlabeled. Induces rules; with no
  /// rule the session keeps waiting for labels.
  auto submit_labels(std::map<std::string, label> const& labels) -> std::vector<ranked_rule> const& {
    require(session_state::awaiting_labels, "labels");
    std::vector<issue> issues;
    bool any_good = false;
    for (auto const& [id, tag] : labels) {
      if (find_sample(id) == nullptr) {
        issues.push_back({"invalid_labels", "no strategy '" + id + "' in the current sample", "/" + id});
      }
      any_good = any_good || tag == label::good;
    }
    if (issues.empty() && !any_good) {
      issues.push_back({"invalid_labels", "at least one strategy must be labeled good", ""});
    }
    if (!issues.empty()) {
      throw validation_error(std::move(issues));
    }
    auto lab = new_event(event_kind::labels);
    lab.labels = labels;
    m_events.push_back(std::move(lab));

    labeled_sample ls;
    for (auto const& s : m_sample) {
      auto it = labels.find(s.id);
      ls.push_back({s.id, s.values, it == labels.end() ? label::unlabeled : it->second});
    }
    auto induced = induce_rules(ls);
    m_rules.clear();
    for (std::size_t r = 0; r < induced.rules.size(); ++r) {
      ranked_rule rr{std::to_string(m_iteration) + "." + std::to_string(r + 1), induced.rules[r], {}};
      for (auto k : rr.rule.support) {
        rr.support.push_back(m_sample[k].id);
      }
      m_rules.push_back(std::move(rr));
    }
    m_warnings = induced.warnings;
    auto ev = new_event(event_kind::rules);
    ev.rules = m_rules;
    ev.warnings = m_warnings;
    m_events.push_back(std::move(ev));
    if (!m_rules.empty()) {
      m_state = session_state::awaiting_rule_choice;
    }
    return m_rules;
  }

  /// Adds the rule's conditions as constraints and draws the next sample.
  void choose_rule(std::string const& rule_id) {
    require(session_state::awaiting_rule_choice, "a rule choice");
    auto it = std::find_if(m_rules.begin(), m_rules.end(), [&](auto const& r) { return r.id == rule_id; });
    if (it == m_rules.end()) {
      throw error("unknown_rule", "rule '" + rule_id + "' is not in the last induced list", "/rule");
    }
    auto ev = new_event(event_kind::choice);
    ev.choice = rule_id;
    m_events.push_back(std::move(ev));
    for (auto const& c : it->rule.conditions) {
      m_conditions.push_back(c);
    }
    ++m_iteration;
    next_sample();
  }

  /// Ends the session with a strategy from the current sample.
  auto mark_satisfied(std::string const& sample_id) -> sample_entry const& {
    if (m_state != session_state::awaiting_labels && m_state != session_state::awaiting_rule_choice) {
      throw protocol_error("session is " + std::string(to_string(m_state)) + "; nothing left to accept");
    }
    auto const* s = find_sample(sample_id);
    if (s == nullptr) {
      throw error("unknown_strategy", "no strategy '" + sample_id + "' in the current sample", "/strategy");
    }
    auto ev = new_event(event_kind::satisfied);
    ev.choice = sample_id;
    m_events.push_back(std::move(ev));
    m_chosen = *s;
    m_state = session_state::satisfied;
    return *m_chosen;
  }

 private:
  void require(session_state expected, std::string_view what) const {
    if (m_state != expected) {
      throw protocol_error("session is " + std::string(to_string(m_state)) + ", not ready for " + std::string(what));
    }
  }

  [[nodiscard]] auto new_event(event_kind kind) const -> session_event {
    session_event ev;
    ev.kind = kind;
    ev.iteration = m_iteration;
    return ev;
  }

  [[nodiscard]] auto find_sample(std::string const& id) const -> sample_entry const* {
    for (auto const& s : m_sample) {
      if (s.id == id) {
        return &s;
      }
    }
    return nullptr;
  }

  void next_sample() {
    auto const cs = constraints();
    auto const picked = sample_representatives(m_config.instance, m_objectives, cs, m_config.sample_size);
    m_sample.clear();
    for (std::size_t k = 0; k < picked.size(); ++k) {
      m_sample.push_back({"ST" + std::to_string(k + 1), picked[k].x, picked[k].values});
    }
    m_region_sizes.push_back(count_feasible(m_config.instance, cs));
    m_rules.clear();
    m_warnings.clear();
    auto ev = new_event(event_kind::sample);
    ev.sample = m_sample;
    ev.region_size = m_region_sizes.back();
    m_events.push_back(std::move(ev));
    m_state = m_sample.empty() ? session_state::empty_region : session_state::awaiting_labels;
  }

  session_config m_config;
  std::vector<linear_objective> m_objectives;
  std::vector<rule_condition> m_conditions;
  session_state m_state = session_state::awaiting_labels;
  std::size_t m_iteration = 1;
  std::vector<sample_entry> m_sample;
  std::vector<ranked_rule> m_rules;
  std::vector<std::string> m_warnings;
  std::vector<std::uint64_t> m_region_sizes;
  std::vector<session_event> m_events;
  std::optional<sample_entry> m_chosen;
};

/// Rebuilds a session from its journal by re-issuing every DM action. The
/// recomputed SAMPLE and RULES events must equal the recorded ones.
[[nodiscard]] inline auto replay(session_config config, std::vector<session_event> const& journal) -> imo_session {
  imo_session session(std::move(config));
  std::size_t k = 0;
  // Every event the session produced so far must match the journal.
  auto sync = [&] {
    for (; k < session.events().size(); ++k) {
      auto const& mine = session.events()[k];
      if (k >= journal.size() || !(journal[k] == mine)) {
        throw error("journal_mismatch",
                    "replayed " + std::string(to_string(mine.kind)) + " event differs from the journal",
                    "/events/" + std::to_string(k));
      }
    }
  };
  sync();
  while (k < journal.size()) {
    auto const& ev = journal[k];
    switch (ev.kind) {
      case event_kind::labels:
        (void)session.submit_labels(ev.labels);
        break;
      case event_kind::choice:
        session.choose_rule(ev.choice);
        break;
      case event_kind::satisfied:
        (void)session.mark_satisfied(ev.choice);
        break;
      case event_kind::sample:
      case event_kind::rules:
        throw error("journal_mismatch", "unexpected " + std::string(to_string(ev.kind)) + " event",
                    "/events/" + std::to_string(k));
    }
    sync();
  }
  return session;
}

}  // namespace spacetime

#endif  // SPACETIME_IMO_SESSION_HPP_

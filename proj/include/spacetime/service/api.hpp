#ifndef SPACETIME_SERVICE_API_HPP_
#define SPACETIME_SERVICE_API_HPP_

#include "spacetime/imo_session.hpp"
#include "spacetime/io/session_json.hpp"
#include "spacetime/service/workbench.hpp"

#include <httplib.h>

#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace spacetime::service {

struct response {
  int status = 200;
  json body;
};

/// HTTP status for an error: 409 out of protocol order, 404 unknown resource,
/// 400 unparsable body, 422 for everything the engine rejects.
[[nodiscard]] inline auto status_for(error const& e) -> int {
  if (e.code() == "protocol") {
    return 409;
  }
  if (e.code() == "not_found") {
    return 404;
  }
  if (e.code() == "parse_error") {
    return 400;
  }
  return 422;
}

/// The workbench API over one loaded instance. Requests are pure
/// (method, path, body) -> response so the routing can be tested in-process;
/// `mount` attaches it to an httplib server. Sessions are locked one by one,
/// the instance document is never modified after construction.
class api {
 public:
  explicit api(io::instance_document doc)
      : m_doc(std::move(doc)) {}

  [[nodiscard]] auto document() const noexcept -> io::instance_document const& { return m_doc; }

  [[nodiscard]] auto handle(std::string const& method, std::string const& path, std::string const& body) -> response {
    try {
      return route(method, split_path(path), body);
    } catch (error const& e) {
      return {status_for(e), error_to_json(e)};
    } catch (json::exception const& e) {
      return {422, {{"code", "type_error"}, {"message", e.what()}, {"pointer", ""}}};
    } catch (std::exception const& e) {
      return {500, {{"code", "internal"}, {"message", e.what()}, {"pointer", ""}}};
    }
  }

  void mount(httplib::Server& server) {
    auto bridge = [this](httplib::Request const& req, httplib::Response& res) {
      auto const r = handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server.Get(R"(/.*)", bridge);
    server.Post(R"(/.*)", bridge);
  }

 private:
  struct session_slot {
    std::mutex lock;
    std::unique_ptr<imo_session> session;
    bool expected = false;
  };

  static auto split_path(std::string const& path) -> std::vector<std::string> {
    std::vector<std::string> parts;
    std::string part;
    for (char c : path.substr(0, path.find('?'))) {
      if (c == '/') {
        if (!part.empty()) {
          parts.push_back(std::move(part));
        }
        part.clear();
      } else {
        part += c;
      }
    }
    if (!part.empty()) {
      parts.push_back(std::move(part));
    }
    return parts;
  }

  static auto parse_body(std::string const& body) -> json {
    if (body.empty()) {
      return json(nullptr);
    }
    return io::parse_json_text(body);
  }

  static auto not_found(std::string const& what) -> error { return error("not_found", "no " + what); }

  auto route(std::string const& method, std::vector<std::string> const& p, std::string const& body) -> response {
    if (p.size() == 1 && p[0] == "instance" && method == "GET") {
      return {200, io::to_json(m_doc)};
    }
    if (p.size() == 1 && p[0] == "solve" && method == "POST") {
      return {200, run_solve(m_doc, parse_solve_request(parse_body(body)))};
    }
    if (p.size() == 1 && p[0] == "sessions" && method == "POST") {
      return create_session(parse_body(body));
    }
    if (p.size() >= 2 && p[0] == "sessions") {
      auto slot = find(p[1]);
      std::lock_guard guard(slot->lock);
      auto& s = *slot->session;
      if (p.size() == 2 && method == "GET") {
        return {200, with_id(p[1], io::session_to_json(s))};
      }
      if (p.size() == 3 && p[2] == "journal" && method == "GET") {
        return {200, io::journal_to_json(s, slot->expected)};
      }
      if (p.size() == 3 && method == "POST") {
        auto const j = parse_body(body);
        if (p[2] == "labels") {
          auto const labels = io::parse_labels(j.is_object() && j.contains("labels") ? j["labels"] : j);
          (void)s.submit_labels(labels);
          return {200, with_id(p[1], io::session_to_json(s))};
        }
        if (p[2] == "choice") {
          s.choose_rule(string_field(j, "rule"));
          return {200, with_id(p[1], io::session_to_json(s))};
        }
        if (p[2] == "satisfied") {
          auto const& chosen = s.mark_satisfied(string_field(j, "strategy"));
          auto out = with_id(p[1], io::session_to_json(s));
          auto const* stakeholders = m_doc.stakeholders ? &*m_doc.stakeholders : nullptr;
          out["dashboard"] = dashboard_to_json(s.config().instance, chosen.x, stakeholders);
          return {200, std::move(out)};
        }
      }
    }
    throw not_found("route " + method + " /" + join(p));
  }

  static auto join(std::vector<std::string> const& p) -> std::string {
    std::string out;
    for (auto const& s : p) {
      out += (out.empty() ? "" : "/") + s;
    }
    return out;
  }

  static auto string_field(json const& j, std::string const& key) -> std::string {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
      throw validation_error({{"type_error", "expected a string '" + key + "'", "/" + key}});
    }
    return j[key].get<std::string>();
  }

  static auto with_id(std::string const& id, json body) -> json {
    json out = {{"id", id}};
    out.update(body);
    return out;
  }

  auto create_session(json const& j) -> response {
    if (!m_doc.thresholds) {
      throw error("missing_thresholds", "sessions need a thresholds block", "/thresholds");
    }
    if (!j.is_null() && !j.is_object()) {
      throw validation_error({{"type_error", "expected an object", ""}});
    }
    session_config cfg{m_doc.instance, formulation::location, *m_doc.thresholds, default_sample_size, {}};
    std::unique_ptr<imo_session> session;
    bool expected = false;
    if (j.is_object() && j.contains("journal")) {
      auto const& jj = j["journal"];
      expected = jj.is_object() && jj.contains("expected") && jj["expected"] == true;
      cfg.instance = solve_instance(m_doc, expected);
      auto const jr = io::parse_journal(jj, cfg.instance, cfg.thresholds);
      cfg.form = jr.form;
      cfg.sample_size = jr.sample_size;
      cfg.initial_constraints = jr.initial_constraints;
      session = std::make_unique<imo_session>(replay(std::move(cfg), jr.events));
    } else {
      if (j.is_object()) {
        for (auto const& [key, value] : j.items()) {
          if (key != "formulation" && key != "sample_size" && key != "initial_constraints" && key != "expected") {
            throw validation_error({{"unknown_key", "unknown key '" + key + "'", "/" + key}});
          }
        }
        if (j.contains("expected")) {
          if (!j["expected"].is_boolean()) {
            throw validation_error({{"type_error", "expected is a boolean", "/expected"}});
          }
          expected = j["expected"].get<bool>();
          cfg.instance = solve_instance(m_doc, expected);
        }
        if (j.contains("formulation")) {
          cfg.form = parse_formulation(string_field(j, "formulation"));
        }
        if (j.contains("sample_size")) {
          if (!j["sample_size"].is_number_unsigned()) {
            throw validation_error({{"type_error", "sample_size is a positive integer", "/sample_size"}});
          }
          cfg.sample_size = j["sample_size"].get<std::size_t>();
        }
        if (j.contains("initial_constraints")) {
          auto const objs = formulation_objectives(cfg.instance, cfg.form, cfg.thresholds);
          cfg.initial_constraints = io::parse_conditions(j["initial_constraints"], objs, "/initial_constraints");
        }
      }
      session = std::make_unique<imo_session>(std::move(cfg));
    }
    auto slot = std::make_shared<session_slot>();
    slot->session = std::move(session);
    slot->expected = expected;
    std::string id;
    {
      std::lock_guard guard(m_registry_lock);
      id = "s" + std::to_string(++m_next_id);
      m_sessions[id] = slot;
    }
    std::lock_guard guard(slot->lock);
    return {201, with_id(id, io::session_to_json(*slot->session))};
  }

  auto find(std::string const& id) -> std::shared_ptr<session_slot> {
    std::lock_guard guard(m_registry_lock);
    auto it = m_sessions.find(id);
    if (it == m_sessions.end()) {
      throw not_found("session '" + id + "'");
    }
    return it->second;
  }

  io::instance_document const m_doc;
  std::mutex m_registry_lock;
  std::map<std::string, std::shared_ptr<session_slot>> m_sessions;
  std::size_t m_next_id = 0;
};

inline constexpr int default_port = 8080;

/// Port from SPACETIME_PORT, else the default.
[[nodiscard]] inline auto port_from_env() -> int {
  if (char const* v = std::getenv("SPACETIME_PORT"); v != nullptr && *v != '\0') {
    try {
      auto const port = std::stoi(v);
      if (port > 0 && port < 65536) {
        return port;
      }
    } catch (std::logic_error const&) {
    }
    throw error("bad_port", std::string("SPACETIME_PORT is not a port: ") + v);
  }
  return default_port;
}

}  // namespace spacetime::service

#endif  // SPACETIME_SERVICE_API_HPP_

// Command-line front end of the workbench: solve, dashboard, imo, oracle.

#include "spacetime.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace spacetime;
using io::json;

namespace {

void print_strategy(problem_instance const& inst, strategy const& x) {
  std::cout << "facility,location,period\n";
  for (auto const& a : x) {
    std::cout << inst.facilities[a.facility].id << ',' << inst.locations[a.location].id << ',' << a.period << '\n';
  }
}

auto stakeholders_of(io::instance_document const& doc) -> stakeholder_set const* {
  return doc.stakeholders ? &*doc.stakeholders : nullptr;
}

/// Writes one table, or every table, of a strategy's dashboard.
void export_tables(problem_instance const& inst, strategy const& x, stakeholder_set const* stakeholders,
                   std::string const& table, std::string const& out) {
  auto const report = full_report(inst, x, stakeholders);
  bool const to_dir = !out.empty() && std::filesystem::path(out).extension() != ".csv";
  if (to_dir) {
    std::filesystem::create_directories(out);
  }
  bool found = false;
  for (auto const& [name, t] : report) {
    if (!table.empty() && name != table) {
      continue;
    }
    found = true;
    auto const csv = io::to_csv(t, inst, stakeholders);
    if (to_dir) {
      io::write_file((std::filesystem::path(out) / (name + ".csv")).string(), csv);
    } else if (!out.empty()) {
      io::write_file(out, csv);
    } else {
      std::cout << "# " << name << '\n' << csv;
    }
  }
  if (!found) {
    throw error("bad_table", "no table named '" + table + "'", "/table");
  }
}

auto run_solve_command(std::string const& file, service::solve_request const& req, std::string const& out,
                       std::string const& table, bool as_json) -> int {
  auto const doc = io::load_instance(file);
  auto const result = service::run_solve(doc, req);
  if (as_json) {
    std::cout << result.dump(2) << '\n';
  } else if (req.continuous) {
    std::cout << "facility,location,period,amount\n";
    for (auto const& c : result["allocation"]) {
      std::cout << c["facility"].get<std::string>() << ',' << c["location"].get<std::string>() << ','
                << c["period"].get<std::size_t>() << ',' << c["amount"].get<double>() << '\n';
    }
    std::printf("value %.10g\n", result["value"].get<double>());
    for (auto const& w : result["warnings"]) {
      std::cerr << w.dump() << '\n';
    }
  } else {
    auto const inst = service::solve_instance(doc, req.expected);
    auto const x = io::parse_strategy(inst, result["strategy"]);
    print_strategy(inst, x);
    std::printf("value %.10g\n", result["value"].get<double>());
    if (result.contains("members")) {
      for (auto const& m : result["members"]) {
        std::printf("member %s ideal %.10g deviation %s\n", m["member"].get<std::string>().c_str(),
                    m["ideal"].get<double>(), m["deviation"].is_null() ? "n/a" : m["deviation"].dump().c_str());
      }
    }
  }
  if (!out.empty() && !req.continuous) {
    auto const inst = service::solve_instance(doc, req.expected);
    export_tables(inst, io::parse_strategy(inst, result["strategy"]), stakeholders_of(doc),
                  table.empty() ? "yhat_IJLT" : table, out);
  }
  return 0;
}

auto run_dashboard_command(std::string const& file, std::string const& strategy_file, bool expected,
                           std::string const& table, std::string const& out) -> int {
  auto const doc = io::load_instance(file);
  auto const inst = service::solve_instance(doc, expected);
  auto const x = io::parse_strategy(inst, io::parse_json_text(io::read_file(strategy_file)));
  if (auto const report = check_feasibility(inst, x); !report.feasible()) {
    for (auto const& v : report.violations) {
      std::cerr << json{{"warning", to_string(v.kind)}, {"message", v.detail}}.dump() << '\n';
    }
  }
  export_tables(inst, x, stakeholders_of(doc), table, out);
  return 0;
}

auto run_imo_command(std::string const& file, std::string const& form, bool serve, std::string const& journal_file,
                     std::string const& out) -> int {
  auto doc = io::load_instance(file);
  if (serve) {
    service::api api(std::move(doc));
    httplib::Server server;
    api.mount(server);
    auto const port = service::port_from_env();
    std::cerr << json{{"listening", port}}.dump() << '\n';
    if (!server.listen("0.0.0.0", port)) {
      throw error("io_error", "cannot listen on port " + std::to_string(port));
    }
    return 0;
  }
  if (!doc.thresholds) {
    throw error("missing_thresholds", "sessions need a thresholds block", "/thresholds");
  }
  session_config cfg{doc.instance, parse_formulation(form), *doc.thresholds, default_sample_size, {}};
  std::unique_ptr<imo_session> session;
  if (!journal_file.empty()) {
    auto const j = io::parse_json_text(io::read_file(journal_file));
    bool const expected = j.is_object() && j.contains("expected") && j["expected"] == true;
    cfg.instance = service::solve_instance(doc, expected);
    auto const jr = io::parse_journal(j, cfg.instance, cfg.thresholds);
    cfg.form = jr.form;
    cfg.sample_size = jr.sample_size;
    cfg.initial_constraints = jr.initial_constraints;
    session = std::make_unique<imo_session>(replay(std::move(cfg), jr.events));
  } else {
    session = std::make_unique<imo_session>(std::move(cfg));
  }
  std::cout << io::session_to_json(*session).dump(2) << '\n';
  if (!out.empty()) {
    io::write_file(out, io::journal_to_json(*session).dump(2) + "\n");
  }
  return 0;
}

/// Branch and bound against exhaustive enumeration for every objective the
/// instance supports.
auto run_oracle_command(std::string const& file, std::uint64_t node_limit) -> int {
  auto const doc = io::load_instance(file);
  auto const& inst = doc.instance;
  json checks = json::array();
  bool all = true;
  auto record = [&](std::string name, solve_result const& fast, solve_result const& slow) {
    bool const ok = fast.status == slow.status && fast.objective_value == slow.objective_value && fast.x == slow.x;
    all = all && ok;
    checks.push_back({{"objective", std::move(name)},
                      {"branch_and_bound", fast.objective_value},
                      {"brute_force", slow.objective_value},
                      {"same_strategy", fast.x == slow.x},
                      {"pass", ok}});
  };
  auto const overall = overall_objective(inst);
  record("overall", maximize(inst, overall), brute_force(inst, overall, {}, node_limit));
  for (auto family : {cp_family::cpl, cp_family::cpo, cp_family::cpol, cp_family::cpk}) {
    if (family == cp_family::cpk && !doc.stakeholders) {
      continue;
    }
    std::vector<deviation_objective> devs;
    for (auto const& d : cp_deviation_objectives(inst, family, stakeholders_of(doc))) {
      if (d.ideal > 0.0) {
        devs.push_back(d);
      }
    }
    if (devs.empty()) {
      continue;
    }
    record(std::string(to_string(family)), solve_minimax(inst, devs), brute_force(inst, devs, node_limit));
  }
  std::cout << json{{"checks", std::move(checks)}, {"pass", all}}.dump(2) << '\n';
  return all ? 0 : 1;
}

}  // namespace

auto main(int argc, char** argv) -> int {
  CLI::App app{"Space-time facility activation workbench"};
  app.require_subcommand(1);

  std::string file;
  service::solve_request req;
  std::string out;
  std::string table;
  bool as_json = false;
  auto* solve = app.add_subcommand("solve", "Optimal activation strategy");
  solve->add_option("file", file, "Instance file")->required();
  solve->add_option("--objective", req.objective, "overall, cpl, cpo, cpol or cpk")
      ->check(CLI::IsMember({"overall", "cpl", "cpo", "cpol", "cpk"}));
  solve->add_flag("--expected", req.expected, "Use expected values of the uncertainty trees");
  solve->add_flag("--continuous", req.continuous, "Solve the budget allocation LP");
  solve->add_option("--out", out, "Dashboard CSV file, or a directory for every table");
  solve->add_option("--table", table, "Table to export (default yhat_IJLT)");
  solve->add_flag("--json", as_json, "Print the full result as JSON");

  std::string strategy_file;
  bool expected = false;
  auto* dashboard = app.add_subcommand("dashboard", "Dashboard tables of a strategy as CSV");
  dashboard->add_option("file", file, "Instance file")->required();
  dashboard->add_option("--strategy", strategy_file, "Strategy JSON file")->required();
  dashboard->add_flag("--expected", expected, "Use expected values of the uncertainty trees");
  dashboard->add_option("--table", table, "Only this table");
  dashboard->add_option("--out", out, "Output directory, or a .csv file with --table");

  std::string form = "location";
  bool serve = false;
  std::string journal;
  auto* imo = app.add_subcommand("imo", "Interactive session: serve the API or replay a journal");
  imo->add_option("file", file, "Instance file")->required();
  imo->add_option("--formulation", form, "location, criterion or criterion-location");
  imo->add_flag("--serve", serve, "Serve the HTTP API on SPACETIME_PORT");
  imo->add_option("--journal", journal, "Journal to replay");
  imo->add_option("--out", out, "Write the session journal here");

  std::uint64_t node_limit = default_node_limit;
  auto* oracle = app.add_subcommand("oracle", "Cross-check the solver against enumeration");
  oracle->add_option("file", file, "Instance file")->required();
  oracle->add_option("--node-limit", node_limit, "Enumeration node limit");

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) {
      return run_solve_command(file, req, out, table, as_json);
    }
    if (dashboard->parsed()) {
      return run_dashboard_command(file, strategy_file, expected, table, out);
    }
    if (imo->parsed()) {
      return run_imo_command(file, form, serve, journal, out);
    }
    return run_oracle_command(file, node_limit);
  } catch (error const& e) {
    std::cerr << service::error_to_json(e).dump() << '\n';
    return 2;
  } catch (std::exception const& e) {
    std::cerr << json{{"code", "internal"}, {"message", e.what()}, {"pointer", ""}}.dump() << '\n';
    return 3;
  }
}

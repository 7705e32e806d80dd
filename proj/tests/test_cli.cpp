#include "council.hpp"

#include "spacetime/io/csv.hpp"
#include "spacetime/io/instance_file.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

using namespace spacetime;
using namespace spacetime::testing;
using io::json;

namespace {

struct run_result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

auto data_path(std::string const& name) -> std::string { return std::string(SPACETIME_DATA_DIR) + "/" + name; }

auto scratch() -> std::filesystem::path {
  auto dir = std::filesystem::temp_directory_path() / ("spacetime-cli-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

// Runs the CLI with the given arguments, capturing both streams.
auto run(std::string const& args) -> run_result {
  auto const err_file = scratch() / "stderr.txt";
  auto const cmd = std::string(SPACETIME_CLI) + " " + args + " 2>" + err_file.string();
  run_result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    return r;
  }
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    r.out.append(buf, n);
  }
  auto const status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = io::read_file(err_file.string());
  return r;
}

}  // namespace

TEST(Cli, SolvePrintsTheOptimum) {
  auto const r = run("solve " + data_path("council.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out,
            "facility,location,period\nschool,north,2\ncouncil,south,0\nrecycling,north,0\nstartup,south,0\n"
            "healthcare,south,3\ncommunity,north,1\nvalue 771.5471807\n");
}

TEST(Cli, SolveVariants) {
  auto r = run("solve " + data_path("empty-budget.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "facility,location,period\nvalue 0\n");

  r = run("solve " + data_path("council.json") + " --objective cpl --json");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto const j = json::parse(r.out);
  EXPECT_EQ(j["objective"], "cpl");
  EXPECT_EQ(j["members"].size(), 2u);

  r = run("solve " + data_path("council.json") + " --continuous");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 31), "facility,location,period,amount");
  EXPECT_NE(r.err.find("redundant_bound"), std::string::npos);

  r = run("solve " + data_path("council.json") + " --expected");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("social_housing,"), std::string::npos);
}

TEST(Cli, SolveExportsCsv) {
  auto const file = scratch() / "report.csv";
  auto const r = run("solve " + data_path("council.json") + " --out " + file.string() + " --table yhat_LT");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto const inst = council_instance();
  auto const table = io::parse_csv(io::read_file(file.string()), io::selection_from_name("yhat_LT"), inst);
  auto const direct = aggregate(inst, council_optimum(), io::selection_from_name("yhat_LT"));
  for (std::size_t k = 0; k < table.size(); ++k) {
    EXPECT_NEAR(table.values()[k], direct.values()[k], 1e-9);
  }
}

TEST(Cli, DashboardWritesEveryTable) {
  auto const strategy_file = scratch() / "strategy.json";
  io::write_file(strategy_file.string(), io::strategy_to_json(council_instance(), council_optimum()).dump());
  auto const dir = scratch() / "tables";
  auto r = run("dashboard " + data_path("council.json") + " --strategy " + strategy_file.string() + " --out " +
               dir.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::size_t files = 0;
  for ([[maybe_unused]] auto const& e : std::filesystem::directory_iterator(dir)) {
    ++files;
  }
  EXPECT_EQ(files, 64u);
  r = run("dashboard " + data_path("council.json") + " --strategy " + strategy_file.string() + " --table y_J");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 22), "# y_J\ncriterion,value\n");
}

TEST(Cli, ImoReplaysJournal) {
  auto const out = scratch() / "journal.json";
  auto r = run("imo " + data_path("council.json") + " --journal " + data_path("council-session.json") + " --out " +
               out.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["state"], "SATISFIED");
  EXPECT_EQ(json::parse(io::read_file(out.string())),
            json::parse(io::read_file(data_path("council-session.json"))));
  r = run("imo " + data_path("council.json") + " --formulation criterion");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["objectives"].size(), 9u);
}

TEST(Cli, OracleOnSmallInstance) {
  std::mt19937_64 rng(3);
  io::instance_document doc;
  doc.instance = random_instance(rng, 4, 2, 3);
  auto const file = scratch() / "small.json";
  io::save_instance(file.string(), doc);
  auto const r = run("oracle " + file.string());
  ASSERT_EQ(r.exit_code, 0) << r.err << r.out;
  EXPECT_TRUE(json::parse(r.out)["pass"].get<bool>());
}

TEST(Cli, ErrorsAreJsonOnStderr) {
  auto const bad = scratch() / "bad.json";
  auto j = io::parse_json_text(io::read_file(data_path("empty-budget.json")));
  j["weights"] = {0.5, 0.2, 0.2};
  io::write_file(bad.string(), j.dump());
  auto r = run("solve " + bad.string());
  EXPECT_NE(r.exit_code, 0);
  auto const e = json::parse(r.err);
  EXPECT_EQ(e["code"], "weight_sum");
  EXPECT_EQ(e["pointer"], "/weights");

  r = run("solve " + (scratch() / "nothing.json").string());
  EXPECT_NE(r.exit_code, 0);
  EXPECT_EQ(json::parse(r.err)["code"], "io_error");
  r = run("imo " + data_path("empty-budget.json"));
  EXPECT_EQ(json::parse(r.err)["code"], "missing_thresholds");
  r = run("solve " + data_path("council.json") + " --objective best");
  EXPECT_NE(r.exit_code, 0);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "subflow/cli.hpp"
#include "subflow/error.hpp"

namespace subflow::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("subflow_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  json solve_ok(const std::vector<std::string>& args) {
    const Outcome o = invoke(args);
    EXPECT_EQ(o.code, 0) << o.err;
    return json::parse(o.out);
  }

  fs::path dir_;
};

const char* kChain2 = R"({"version": 1, "kind": "solve",
  "function": {"type": "table", "n": 2, "values": [0, 1, 3, 3]}, "b": [1, 1]})";

const char* kDiamond = "p max 4 5\nn 1 s\nn 4 t\na 1 2 3\na 2 4 2\na 1 3 1\na 3 4 4\na 2 3 1\n";

TEST_F(Cli, SolveTableExample) {
  const json r = solve_ok({"solve", "--input", file("chain2.json", kChain2)});
  EXPECT_EQ(r["kind"], "solve");
  EXPECT_EQ(r["outputs"]["x"], (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(r["outputs"]["breakpoints"], (std::vector<double>{1.0, 2.0}));
  EXPECT_NO_THROW(validate_result(r));
}

TEST_F(Cli, MaxflowDimacsExample) {
  const std::string path = file("diamond.dimacs", kDiamond);
  const json maximal = solve_ok({"maxflow", "--input", path, "--cut", "maximal"});
  EXPECT_EQ(maximal["outputs"]["value"], 4.0);
  EXPECT_EQ(maximal["outputs"]["side"], std::vector<int>{1});
  const json flows = solve_ok({"maxflow", "--input", path, "--cut", "minimal", "--flows"});
  EXPECT_EQ(flows["outputs"]["flows"].size(), 5U);
}

TEST_F(Cli, ProxDensestMinratio) {
  const json p = solve_ok({"prox", "--input", file("p.json", R"({"version": 1, "kind": "prox", "s": [2, 0],
      "lambda": 1, "regularizer": {"type": "fused"}})")});
  EXPECT_NEAR(p["outputs"]["beta"][0].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(p["outputs"]["beta"][1].get<double>(), 1.0, 1e-12);

  const json d = solve_ok({"densest", "--input", file("d.json", R"({"version": 1, "kind": "densest",
      "graph": {"n": 3, "edges": [[1, 2, 1], [2, 3, 1], [1, 3, 1]]}})")});
  EXPECT_EQ(d["outputs"]["levels"].back()["set"], (std::vector<int>{1, 2, 3}));

  const json m = solve_ok({"minratio", "--input", file("m.json", R"({"version": 1, "kind": "minratio",
      "function": {"type": "table", "n": 2, "values": [0, 1, 3, 3]}})")});
  EXPECT_EQ(m["outputs"]["xi"], 1.0);
  EXPECT_EQ(m["outputs"]["set"], std::vector<int>{1});
}

TEST_F(Cli, RegressConverges) {
  const json r = solve_ok({"regress", "--input", file("r.json", R"({"version": 1, "kind": "regress", "seed": 4,
      "data": {"generate": "fused", "n": 30, "N": 40, "k": 5}, "lambda": 1, "regularizer": {"type": "fused"}})")});
  EXPECT_TRUE(r["outputs"]["converged"].get<bool>());
  const auto h = r["outputs"]["history"].get<std::vector<double>>();
  for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LE(h[k], h[k - 1] + 1e-9);
}

TEST_F(Cli, ConfigHashMatchesReserializedProblem) {
  const std::string path = file("chain2.json", kChain2);
  const json r = solve_ok({"solve", "--input", path});
  EXPECT_EQ(r["config_hash"], config_hash(json::parse(kChain2)));
  // key order and whitespace do not matter
  const json reordered = json::parse(R"({"b": [1, 1], "function": {"values": [0, 1, 3, 3], "n": 2, "type": "table"},
      "kind": "solve", "version": 1})");
  EXPECT_EQ(config_hash(reordered), r["config_hash"]);
  EXPECT_EQ(config_hash(reordered).size(), 64U);
}

TEST_F(Cli, DeterministicExceptTimings) {
  const std::string path = file("r.json", R"({"version": 1, "kind": "regress", "seed": 9,
      "data": {"generate": "group", "n": 40, "N": 30, "n_groups": 4, "group_size": 10},
      "lambda": 0.5, "regularizer": {"type": "group_linf", "groups": [[1,2,3,4,5,6,7,8,9,10],
      [11,12,13,14,15,16,17,18,19,20], [21,22,23,24,25,26,27,28,29,30], [31,32,33,34,35,36,37,38,39,40]]}})");
  json a = solve_ok({"regress", "--input", path});
  json b = solve_ok({"regress", "--input", path});
  a.erase("timings");
  b.erase("timings");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST_F(Cli, BenchIsDeterministic) {
  auto strip = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, kept;
    while (std::getline(in, line)) kept += line.substr(0, line.rfind(',')) + "\n";
    return kept;
  };
  const std::string a = bench_csv("densest", 1, 5);
  const std::string b = bench_csv("densest", 2, 5);
  EXPECT_EQ(strip(a), strip(b));
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "profile,instance,n,m,seed,minimizations,flow_solves,chain_length,iterations,value,wall_ms");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 4);
}

TEST_F(Cli, OutFileAndGen) {
  const std::string out = (dir_ / "res.json").string();
  const Outcome o = invoke({"solve", "--input", file("chain2.json", kChain2), "--out", out});
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(out);
  EXPECT_NO_THROW(validate_result(json::parse(in)));

  const fs::path gdir = dir_ / "gen";
  fs::create_directories(gdir);
  EXPECT_EQ(invoke({"gen", "fused", "--n", "20", "--N", "10", "--k", "4", "--out", gdir.string()}).code, 0);
  EXPECT_TRUE(fs::exists(gdir / "design.csv"));
  EXPECT_TRUE(fs::exists(gdir / "targets.csv"));
  EXPECT_TRUE(fs::exists(gdir / "meta.json"));
}

TEST_F(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  const Outcome flag = invoke({"solve", "--input", file("c.json", kChain2), "--bogus"});
  EXPECT_EQ(flag.code, 2);
  EXPECT_NE(flag.err.find("--bogus"), std::string::npos);
  const Outcome missing = invoke({"solve", "--input", (dir_ / "none.json").string()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("--input"), std::string::npos);
  EXPECT_EQ(invoke({"solve", "--input", file("bad.json", "{not json")}).code, 2);
  EXPECT_EQ(invoke({"prox", "--input", file("c2.json", kChain2)}).code, 2);
  EXPECT_EQ(invoke({"solve", "--input", file("v.json", R"({"version": 99, "kind": "solve",
      "function": {"type": "table", "n": 1, "values": [0, 1]}})")}).code, 2);
  EXPECT_EQ(invoke({"bench", "--profile", "nope"}).code, 2);
  EXPECT_EQ(invoke({"maxflow", "--input", file("d.dimacs", kDiamond), "--cut", "sideways"}).code, 2);
}

TEST_F(Cli, SolverErrorsExitThree) {
  const Outcome o = invoke({"solve", "--input", file("neg.json", R"({"version": 1, "kind": "solve",
      "function": {"type": "transformed_cut", "n": 2, "edges": [[1, 2, 1], [2, 1, 1]], "a": [-2, 3]},
      "variant": "log_barrier"})")});
  EXPECT_EQ(o.code, 3);
  EXPECT_NE(o.err.find("PositivityViolated"), std::string::npos);
}

TEST_F(Cli, Selftest) {
  const Outcome ok = invoke({"selftest"});
  EXPECT_EQ(ok.code, 0);
  int suites = 0;
  std::istringstream in(ok.out);
  for (std::string line; std::getline(in, line);) suites += line.rfind("suite ", 0) == 0;
  EXPECT_GE(suites, 6);
  EXPECT_NE(invoke({"selftest", "--inject-tolerance-scale", "-1"}).code, 0);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(Errc::kPositivityViolated), 3);
  EXPECT_EQ(exit_code_for(Errc::kUsageError), 2);
  EXPECT_EQ(exit_code_for(Errc::kSchemaError), 2);
}

TEST(ResultSchema, RejectsMalformed) {
  json good{{"tool_version", kToolVersion}, {"kind", "minratio"}, {"config_hash", std::string(64, 'a')},
            {"outputs", {{"xi", 1.0}, {"set", {1}}}}, {"timings", {{"total_ms", 0.1}}}};
  EXPECT_NO_THROW(validate_result(good));
  json bad = good;
  bad["outputs"].erase("xi");
  EXPECT_THROW(validate_result(bad), Error);
  bad = good;
  bad.erase("config_hash");
  EXPECT_THROW(validate_result(bad), Error);
}

}  // namespace
}  // namespace subflow::cli

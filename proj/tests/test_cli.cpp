#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "airdisk_cli.hpp"

namespace fs = std::filesystem;
using airdisk::cli::run_cli;

namespace {

const fs::path kData = AIRDISK_TEST_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "airdisk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return (kData / "data" / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("airdisk_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~TempDir() { fs::remove_all(dir_); }
  std::string operator/(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

double field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return std::stod(line.substr(key.size() + 1));
  }
  throw std::runtime_error("missing " + key);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, CompareMatchesGoldenFile) {
  const auto r = cli({"compare", "-i", data("one.json"), data("half.json"), "-a", "greedy,periodic-greedy,oracle",
                      "--horizon", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(kData / "golden" / "compare.csv"));
}

TEST(Cli, CompareSingleRowRatioAtLeastOne) {
  const auto r = cli({"compare", "-i", data("eight.json"), "-a", "greedy"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), airdisk::cli::kCompareHeader);
  EXPECT_GE(std::stod(rows[1][6]), 1.0);
}

TEST(Cli, CompareRoundRobinGain) {
  const auto r = cli({"compare", "-i", data("eight.json"), "-a", "baseline,rr", "--horizon", "1000000", "--seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][1], "baseline");
  EXPECT_NEAR(std::stod(rows[1][3]), 8.0, 0.16);
  EXPECT_EQ(rows[2][1], "rr");
  EXPECT_NEAR(std::stod(rows[2][3]), 4.5, 0.045);
  EXPECT_EQ(rows[2][8], "5");
}

TEST(Cli, UnknownAlgorithmIsUsageError) {
  EXPECT_EQ(cli({"compare", "-i", data("one.json"), "-a", "nope"}).code, 2);
  EXPECT_EQ(cli({"schedule", "-i", data("one.json"), "-a", "nope"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"solve-lb"}).code, 2);
}

TEST(Cli, ParseFailureIsInputError) {
  TempDir tmp;
  const auto bad = tmp / "bad.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(cli({"compare", "-i", bad, "-a", "greedy"}).code, 1);
  EXPECT_EQ(cli({"solve-lb", "-i", tmp / "missing.json"}).code, 1);
}

TEST(Cli, EvaluatePeriodOne) {
  TempDir tmp;
  const auto s = tmp / "s.json";
  std::ofstream(s) << R"({"period": 1, "channels": 1, "slots": [["M1"]]})";
  const auto r = cli({"evaluate", "-s", s, "-i", data("one.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ert_slot_start=1\n"), std::string::npos);
  EXPECT_EQ(field(r.out, "ert_continuous"), 1.5);
}

TEST(Cli, EvaluateMismatchedIds) {
  TempDir tmp;
  const auto s = tmp / "s.json";
  std::ofstream(s) << R"({"period": 1, "channels": 1, "slots": [["X9"]]})";
  const auto r = cli({"evaluate", "-s", s, "-i", data("one.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("X9"), std::string::npos);
}

TEST(Cli, EvaluateWithSimulation) {
  TempDir tmp;
  const auto s = tmp / "pg.json";
  ASSERT_EQ(cli({"schedule", "-i", data("half.json"), "-a", "periodic-greedy", "-o", s}).code, 0);
  const auto r = cli({"evaluate", "-s", s, "-i", data("half.json"), "--simulate", "1000000", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double exact = field(r.out, "ert_slot_start");
  const double sim = field(r.out, "sim_ert_slot_start");
  const double se = field(r.out, "sim_std_error");
  EXPECT_LE(std::abs(sim - exact), 4.0 * se);
  EXPECT_EQ(field(r.out, "sim_requests"), 1e6);
}

TEST(Cli, SolveLbTable) {
  const auto r = cli({"solve-lb", "-i", data("half.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("value,1\n"), std::string::npos);
  EXPECT_NE(r.out.find("group,size,p,c,tau\n1,2,0.5,0,1\n"), std::string::npos);
}

TEST(Cli, GenMatchesLibrary) {
  TempDir tmp;
  const auto path = tmp / "z.json";
  ASSERT_EQ(cli({"gen", "--kind", "zipf", "--m", "4", "--s", "1.0", "--seed", "7", "--out", path}).code, 0);
  const auto inst = airdisk::load_instance(std::string_view(slurp(path)));
  ASSERT_EQ(inst.size(), 4u);
  EXPECT_NEAR(inst[0].p, 12.0 / 25.0, 1e-15);
  EXPECT_EQ(cli({"gen", "--kind", "pareto"}).code, 2);
}

TEST(Cli, ReportTrivialInstance) {
  const auto r = cli({"report", "-i", data("one.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["period"], 1);
  EXPECT_LE(j["period"].get<int>(), j["period_bound"].get<int>());
  EXPECT_TRUE(j.contains("ratio"));
}

TEST(Cli, ReportLargeGroup) {
  const auto r = cli({"report", "-i", data("twenty.json"), "--epsilon", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["ratio_slot_start"].get<double>(), 1.05 * (1.0 + 1e-12));
}

TEST(Cli, ReportCertificateFailure) {
  const auto r = cli({"report", "-i", data("five.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("a_size"), std::string::npos);
  // raising the cap lets the same instance through
  const auto ok = cli({"report", "-i", data("five.json"), "--caps", "a_size=5,a_period=6,alpha_grid=4"});
  EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST(Cli, ScheduleWritesScheduleAndReport) {
  TempDir tmp;
  const auto s = tmp / "s.json";
  const auto rep = tmp / "r.json";
  const auto r = cli({"schedule", "-i", data("twenty.json"), "-a", "ptas", "--epsilon", "0.1", "--caps",
                      "a_period=8,a_size=4,alpha_grid=32", "-o", s, "--report", rep});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(rep));
  for (const char* key : {"lb", "cost_slot_start", "cost_continuous", "ratio", "stage_certificates"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  const auto ev = cli({"evaluate", "-s", s, "-i", data("twenty.json")});
  ASSERT_EQ(ev.code, 0);
  EXPECT_DOUBLE_EQ(field(ev.out, "cost"), report["cost_continuous"].get<double>());
}

TEST(Cli, BadCapsAreUsageErrors) {
  EXPECT_EQ(cli({"report", "-i", data("one.json"), "--caps", "a_size"}).code, 2);
  EXPECT_EQ(cli({"report", "-i", data("one.json"), "--caps", "bogus=1"}).code, 2);
  EXPECT_EQ(cli({"report", "-i", data("one.json"), "--epsilon", "0.5"}).code, 2);
}

TEST(Cli, OracleBudgetOverride) {
  ::setenv("AIRDISK_SEARCH_BUDGET", "10", 1);
  const auto r = cli({"schedule", "-i", data("half.json"), "-a", "oracle", "--t-max", "4"});
  ::unsetenv("AIRDISK_SEARCH_BUDGET");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(cli({"schedule", "-i", data("half.json"), "-a", "oracle", "--t-max", "4"}).code, 0);
}

TEST(Cli, Deterministic) {
  TempDir tmp;
  for (const char* alg : {"rr", "greedy", "periodic-greedy", "baseline", "oracle", "ptas"}) {
    const std::string inst = std::string(alg) == "oracle" ? data("half.json") : data("twenty.json");
    const auto a = tmp / "a.json";
    const auto b = tmp / "b.json";
    ASSERT_EQ(cli({"schedule", "-i", inst, "-a", alg, "--seed", "9", "-o", a}).code, 0) << alg;
    ASSERT_EQ(cli({"schedule", "-i", inst, "-a", alg, "--seed", "9", "-o", b}).code, 0) << alg;
    EXPECT_EQ(slurp(a), slurp(b)) << alg;
  }
  const std::vector<std::string> args{"compare", "-i", data("eight.json"), data("twenty.json"), "-a",
                                      "rr,baseline,greedy,periodic-greedy,ptas", "--seed", "4"};
  EXPECT_EQ(cli(args).out, cli(args).out);
  // a different seed changes the randomized rows
  auto other = args;
  other.back() = "5";
  EXPECT_NE(cli(args).out, cli(other).out);
}

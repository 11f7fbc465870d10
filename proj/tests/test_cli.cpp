#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "dcoflow/cli.hpp"
#include "dcoflow/errors.hpp"
#include "dcoflow/exact.hpp"
#include "dcoflow/io.hpp"
#include "dcoflow/sim.hpp"
#include "dcoflow/workload.hpp"

namespace dcoflow::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("dcoflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        io::save_instance(workload::motivating_example(0.1), path("motivating.json"));
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static std::string read(const std::string& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    static std::vector<std::string> lines(const std::string& text) {
        std::vector<std::string> out;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) out.push_back(line);
        return out;
    }

    static std::vector<std::string> fields(const std::string& line) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream in(line);
        while (std::getline(in, cell, ',')) out.push_back(cell);
        if (!line.empty() && line.back() == ',') out.emplace_back();
        return out;
    }

    fs::path dir_;
};

TEST_F(CliTest, MotivatingRunOfflineGivesExpectedCars) {
    const Result r = call({"run-offline", "--config", path("motivating.json"), "--scheduler", "wdcoflow,cs_mha"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], sim::kCsvHeader);
    EXPECT_EQ(fields(rows[1])[1], "wdcoflow");
    EXPECT_EQ(fields(rows[1])[7], "0.8");
    EXPECT_EQ(fields(rows[2])[1], "cs_mha");
    EXPECT_EQ(fields(rows[2])[7], "0.2");
    EXPECT_NE(r.err.find("digest="), std::string::npos);
    EXPECT_NE(r.err.find("scheduler=cs_mha"), std::string::npos);
    EXPECT_NE(r.err.find("ms="), std::string::npos);
}

TEST_F(CliTest, UnknownSchedulerListsValidNames) {
    const Result r = call({"run-offline", "--config", path("motivating.json"), "--scheduler", "nope"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("wdcoflow_dp"), std::string::npos);
    EXPECT_NE(r.err.find("cs_mha"), std::string::npos);
}

TEST_F(CliTest, OracleRefusesNineCoflows) {
    const Result r = call({"oracle", "--machines", "3", "--coflows", "9", "--seed", "1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("8"), std::string::npos);
}

TEST_F(CliTest, OracleRowOnMotivatingExample) {
    const Result r = call({"oracle", "--source", "motivating"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto row = fields(lines(r.out).at(1));
    EXPECT_EQ(row[1], "oracle");
    EXPECT_EQ(row[7], "0.8");
    EXPECT_EQ(row[12], "4");
}

TEST_F(CliTest, RepeatedRunsGiveIdenticalFiles) {
    const std::vector<std::string> args{"run-offline", "--machines", "5", "--coflows", "20", "--seed", "1,2,3",
                                        "--scheduler", "wdcoflow,cs_mha,wdcoflow_dp", "--no-timing"};
    auto a = args;
    a.insert(a.end(), {"--out", path("a.csv"), "--threads", "3"});
    auto b = args;
    b.insert(b.end(), {"--out", path("b.csv"), "--threads", "1"});
    ASSERT_EQ(call(a).code, 0);
    ASSERT_EQ(call(b).code, 0);
    const std::string text = read(path("a.csv"));
    EXPECT_EQ(text, read(path("b.csv")));
    const auto rows = lines(text);
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(fields(rows[1])[2], "1");
    EXPECT_EQ(fields(rows[1])[1], "wdcoflow");
    EXPECT_EQ(fields(rows[9])[2], "3");
    EXPECT_EQ(fields(rows[9])[13], "0");
}

TEST_F(CliTest, AppendsToExistingCsvAndChecksHeader) {
    ASSERT_EQ(call({"run-offline", "--source", "motivating", "--out", path("r.csv")}).code, 0);
    ASSERT_EQ(call({"run-offline", "--source", "motivating", "--out", path("r.csv")}).code, 0);
    EXPECT_EQ(lines(read(path("r.csv"))).size(), 3u);
    std::ofstream(path("bad.csv")) << "a,b,c\n";
    EXPECT_EQ(call({"run-offline", "--source", "motivating", "--out", path("bad.csv")}).code, 2);
}

TEST_F(CliTest, GenWritesInstancePerSeed) {
    ASSERT_EQ(call({"gen", "--machines", "4", "--coflows", "6", "--seed", "5,6", "--out", path("inst_{seed}.json")}).code,
              0);
    const Instance a = io::load_instance(path("inst_5.json"));
    EXPECT_EQ(a.size(), 6u);
    EXPECT_TRUE(fs::exists(path("inst_6.json")));
    EXPECT_EQ(call({"gen", "--seed", "5,6", "--out", path("no_placeholder.json")}).code, 2);
    const Result r = call({"gen", "--source", "motivating"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(io::instance_to_json(io::instance_from_json(io::json::parse(r.out))),
              io::instance_to_json(workload::motivating_example(0.1)));
}

TEST_F(CliTest, ExportIlpMatchesLibrary) {
    ASSERT_EQ(call({"export-ilp", "--config", path("motivating.json"), "--out", path("m.lp")}).code, 0);
    std::ifstream in(path("m.lp"));
    EXPECT_EQ(exact::parse_lp(in), exact::build_ilp(workload::motivating_example(0.1)));
}

TEST_F(CliTest, RunOnlineFillsLambdaAndF) {
    const Result r = call({"run-online", "--machines", "4", "--lambda", "4", "--total-coflows", "50", "--f", "2",
                           "--scheduler", "wdcoflow"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto row = fields(lines(r.out).at(1));
    EXPECT_EQ(row[0], "online-M4-n50-s1");
    EXPECT_EQ(row[4], "50");
    EXPECT_EQ(row[5], "4");
    EXPECT_EQ(row[6], "2");
    const Result inf = call({"run-online", "--machines", "4", "--total-coflows", "20"});
    ASSERT_EQ(inf.code, 0) << inf.err;
    EXPECT_EQ(fields(lines(inf.out).at(1))[6], "inf");
}

TEST_F(CliTest, ExperimentConfigFileAndOverrides) {
    std::ofstream(path("exp.json")) << R"({"workload":{"machines":4,"coflows":8},"schedulers":["edd"],"seeds":[4],
                                          "out":"rows.csv","timing":false})";
    ASSERT_EQ(call({"run-offline", "--config", path("exp.json"), "--coflows", "5"}).code, 0);
    const auto rows = lines(read(path("rows.csv")));
    ASSERT_EQ(rows.size(), 2u);
    const auto row = fields(rows[1]);
    EXPECT_EQ(row[0], "syn-M4-N5-s4");
    EXPECT_EQ(row[1], "edd");
    EXPECT_EQ(row[13], "0");
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
    std::ofstream(path("typo.json")) << R"({"workload":{"machine":4}})";
    EXPECT_EQ(call({"run-offline", "--config", path("typo.json")}).code, 2);
    std::ofstream(path("broken.json")) << "{";
    EXPECT_EQ(call({"run-offline", "--config", path("broken.json")}).code, 2);
    EXPECT_EQ(call({"run-offline", "--p2", "1.5"}).code, 2);
    EXPECT_EQ(call({"run-online", "--lambda", "0"}).code, 2);
    EXPECT_EQ(call({"run-offline", "--bogus-flag"}).code, 2);
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(CliTest, RuntimeErrorsExitThree) {
    EXPECT_EQ(call({"run-offline", "--instance", path("missing.json")}).code, 3);
}

TEST(ExperimentConfig, JsonRoundTripAndDigest) {
    ExperimentConfig cfg = parse_config(io::json::parse(
        R"({"workload":{"source":"synthetic","machines":6,"alpha":[2,3]},"online":{"lambda":12,"f":5,"batch":[5,15]},
            "schedulers":["wdcoflow","cs_mha"],"seeds":[1,2]})"));
    EXPECT_EQ(cfg.synthetic.machines, 6);
    EXPECT_EQ(cfg.arrival.lambda, 12.0);
    ASSERT_TRUE(cfg.update_frequency.has_value());
    EXPECT_EQ(*cfg.update_frequency, 5.0);
    const ExperimentConfig again = parse_config(to_json(cfg));
    EXPECT_EQ(to_json(again), to_json(cfg));
    EXPECT_EQ(digest(again), digest(cfg));
    EXPECT_EQ(digest(cfg).size(), 16u);
    cfg.seeds = {3};
    EXPECT_NE(digest(again), digest(cfg));
}

TEST(Binary, ExitCodesFromTheExecutable) {
    const char* exe = std::getenv("DCOFLOW_CLI");
    if (exe == nullptr) GTEST_SKIP() << "DCOFLOW_CLI not set";
    const std::string quiet = " >/dev/null 2>&1";
    auto status = [&](const std::string& args) {
        const int raw = std::system((std::string(exe) + " " + args + quiet).c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("run-offline --source motivating"), 0);
    EXPECT_EQ(status("run-offline --source motivating --scheduler bogus"), 2);
    EXPECT_EQ(status("oracle --coflows 9"), 3);
}

}  // namespace
}  // namespace dcoflow::cli

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dcoflow/errors.hpp"
#include "dcoflow/exact.hpp"
#include "dcoflow/sched.hpp"
#include "dcoflow/workload.hpp"
#include "testing.hpp"

namespace dcoflow::exact {
namespace {

TEST(BruteForceSigmaWcar, MotivatingExample) {
    const auto r = brute_force_sigma_wcar(workload::motivating_example(0.1));
    EXPECT_EQ(r.opt_weight, 4.0);
    EXPECT_EQ(r.accepted, (std::vector<CoflowId>{2, 3, 4, 5}));
    EXPECT_TRUE(order_feasible(workload::motivating_example(0.1), r.order));
}

TEST(BruteForceSigmaWcar, SingleInfeasibleCoflow) {
    const Instance inst(Fabric::uniform(1), {Coflow{1, {{1, 1, 2, 2.0}}, 1.0}});
    const auto r = brute_force_sigma_wcar(inst);
    EXPECT_EQ(r.opt_weight, 0.0);
    EXPECT_TRUE(r.accepted.empty());
}

TEST(BruteForceSigmaWcar, DisjointFeasibleCoflows) {
    const Instance inst(Fabric::uniform(3), {Coflow{1, {{1, 1, 4, 1.0}}, 1.0}, Coflow{2, {{1, 2, 5, 1.0}}, 1.0},
                                             Coflow{3, {{1, 3, 6, 1.0}}, 1.0}});
    EXPECT_EQ(brute_force_sigma_wcar(inst).accepted, (std::vector<CoflowId>{1, 2, 3}));
}

TEST(BruteForceSigmaWcar, RefusesMoreThanEightCoflows) {
    std::mt19937_64 rng(1);
    EXPECT_THROW(brute_force_sigma_wcar(testing::random_instance(rng, 2, 9)), SizeError);
}

TEST(BruteForceSigmaWcar, TieGoesToSmallerThenLexicographicSet) {
    // Weight 2 alone ties weights 1 + 1; either single-port pair conflicts.
    std::vector<Coflow> list{Coflow{1, {{1, 1, 2, 1.0}}, 1.0, 1.0}, Coflow{2, {{1, 1, 2, 1.0}}, 2.0, 1.0},
                             Coflow{3, {{1, 1, 2, 2.0}}, 2.0, 2.0}};
    const auto r = brute_force_sigma_wcar(Instance(Fabric::uniform(1), list));
    EXPECT_EQ(r.opt_weight, 2.0);
    EXPECT_EQ(r.accepted, (std::vector<CoflowId>{3}));
}

TEST(OrderFeasible, UsesOnlyOwnPorts) {
    const Instance inst = workload::motivating_example(0.1);
    const std::vector<CoflowId> good{1};
    const std::vector<CoflowId> bad{2, 1};
    EXPECT_TRUE(order_feasible(inst, good));
    EXPECT_FALSE(order_feasible(inst, bad));
}

TEST(ExactProperties, HeuristicsNeverBeatTheOptimum) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> machines(2, 3);
    std::uniform_int_distribution<int> size(1, 7);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst = testing::random_instance(rng, machines(rng), size(rng), 3, 0.4, trial % 2 == 0);
        const auto best = brute_force_sigma_wcar(inst);
        EXPECT_TRUE(best.edd_consistent);
        for (sched::Variant v : sched::all_variants()) {
            const auto sigma = sched::build_sigma(inst, {v, 0.9, 1});
            EXPECT_LE(testing::weight_of(inst, sigma.accepted), best.opt_weight + 1e-9) << sched::to_string(v);
            EXPECT_TRUE(order_feasible(inst, sigma.order));
        }
    }
}

Instance two_coflows(int machines) {
    return Instance(Fabric::uniform(machines),
                    {Coflow{1, {{1, 1, machines + 1, 1.0}}, 2.0}, Coflow{2, {{1, 1, machines + 2, 1.5}}, 3.0}});
}

TEST(BuildIlp, CountsForTwoCoflows) {
    const int m = 3;
    const IlpModel model = build_ilp(two_coflows(m));
    std::size_t z = 0, d = 0, y = 0;
    for (const std::string& v : model.binaries) {
        z += v.starts_with("z_");
        d += v.starts_with("d_");
        y += v.starts_with("y_");
    }
    EXPECT_EQ(z, 2u);
    EXPECT_EQ(d, 2u);
    EXPECT_EQ(y, 2u);
    EXPECT_EQ(model.continuous.size(), static_cast<std::size_t>(4 * m));
    EXPECT_EQ(model.count_rows("od1"), 1u);
    EXPECT_EQ(model.count_rows("od2"), 0u);
    EXPECT_EQ(model.count_rows("y1a"), 2u);
    EXPECT_EQ(model.count_rows("y1b"), 2u);
    EXPECT_EQ(model.count_rows("y1c"), 2u);
    EXPECT_EQ(model.count_rows("lb"), static_cast<std::size_t>(4 * m));
    EXPECT_EQ(model.count_rows("dl"), 4u);  // two ports per coflow
    EXPECT_EQ(model.objective.size(), 2u);
}

TEST(BuildIlp, TriangleRowsForDistinctTriples) {
    std::mt19937_64 rng(1);
    const IlpModel model = build_ilp(testing::random_instance(rng, 2, 4));
    EXPECT_EQ(model.count_rows("od2"), 24u);
    EXPECT_EQ(model.count_rows("od1"), 6u);
}

TEST(BuildIlp, EveryRowUsesDeclaredVariables) {
    std::mt19937_64 rng(2);
    const IlpModel model = build_ilp(testing::random_instance(rng, 3, 5));
    std::set<std::string> declared(model.binaries.begin(), model.binaries.end());
    declared.insert(model.continuous.begin(), model.continuous.end());
    for (const Row& r : model.rows) {
        for (const Term& t : r.terms) EXPECT_TRUE(declared.contains(t.var)) << r.name << " " << t.var;
    }
    for (const Term& t : model.objective) EXPECT_TRUE(declared.contains(t.var));
}

TEST(BuildIlp, EmptyInstanceIsPreconditionError) {
    EXPECT_THROW(build_ilp(Instance(Fabric::uniform(1), {})), PreconditionError);
}

TEST(WriteLp, SectionsAndDeterminism) {
    const IlpModel model = build_ilp(two_coflows(2));
    std::ostringstream a, b;
    write_lp(model, a);
    write_lp(model, b);
    EXPECT_EQ(a.str(), b.str());
    const std::string text = a.str();
    std::size_t pos = 0;
    for (const char* section : {"Maximize\n", "Subject To\n", "Bounds\n", "Binary\n", "End\n"}) {
        const auto at = text.find(section, pos);
        ASSERT_NE(at, std::string::npos) << section;
        pos = at;
    }
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) EXPECT_LE(line.size(), 200u);
}

TEST(WriteLp, RoundTrip) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const IlpModel model = build_ilp(testing::random_instance(rng, 3, 1 + trial % 6, 3, 0.5, true));
        std::stringstream text;
        write_lp(model, text);
        EXPECT_EQ(parse_lp(text), model);
    }
}

TEST(WriteLp, LongRowsWrapAndStillParse) {
    std::mt19937_64 rng(13);
    const IlpModel model = build_ilp(testing::random_instance(rng, 6, 8, 6));
    std::stringstream text;
    write_lp(model, text);
    EXPECT_EQ(parse_lp(text), model);
}

TEST(ExportIlp, WritesFile) {
    const auto path = std::filesystem::temp_directory_path() / "dcoflow_export_test.lp";
    export_ilp(two_coflows(2), path);
    std::ifstream in(path);
    EXPECT_EQ(parse_lp(in), build_ilp(two_coflows(2)));
    std::filesystem::remove(path);
}

TEST(ParseLp, ErrorsCarryLineNumbers) {
    std::istringstream bad("Maximize\n obj: z_1\nSubject To\n r1: z_1 <=\nEnd\n");
    try {
        parse_lp(bad);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
    }
    std::istringstream general("Maximize\n obj: z_1\nSubject To\n r1: z_1 <= 1\nGeneral\n z_1\nEnd\n");
    EXPECT_THROW(parse_lp(general), ParseError);
}

}  // namespace
}  // namespace dcoflow::exact

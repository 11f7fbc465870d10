#include <gtest/gtest.h>

#include <clocale>
#include <filesystem>
#include <random>

#include "dcoflow/errors.hpp"
#include "dcoflow/format.hpp"
#include "dcoflow/io.hpp"
#include "dcoflow/workload.hpp"
#include "testing.hpp"

namespace dcoflow::io {
namespace {

TEST(InstanceJson, RoundTrip) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance a = testing::random_instance(rng, 3, 6, 3, 0.5, true);
        const json doc = instance_to_json(a);
        const Instance b = instance_from_json(doc);
        EXPECT_EQ(instance_to_json(b), doc);
    }
}

TEST(InstanceJson, CanonicalFieldNames) {
    const json doc = instance_to_json(workload::motivating_example(0.1));
    EXPECT_EQ(doc["fabric"]["machines"], 4);
    EXPECT_EQ(doc["fabric"]["capacity"], 1.0);
    const json& c = doc["coflows"][1];
    for (const char* key : {"id", "deadline", "weight", "class", "release", "flows"}) EXPECT_TRUE(c.contains(key)) << key;
    const json& f = c["flows"][0];
    for (const char* key : {"src", "dst", "volume"}) EXPECT_TRUE(f.contains(key)) << key;
}

TEST(InstanceJson, OptionalFieldsDefault) {
    const json doc = json::parse(R"({"fabric":{"machines":1},"coflows":[{"id":3,"deadline":2,"flows":[{"src":1,"dst":2,"volume":1}]}]})");
    const Instance inst = instance_from_json(doc);
    EXPECT_EQ(inst.coflow(3).weight, 1.0);
    EXPECT_EQ(inst.coflow(3).class_id, 1);
    EXPECT_EQ(inst.coflow(3).release, 0.0);
    EXPECT_EQ(inst.fabric().capacity(2), 1.0);
}

TEST(InstanceJson, PerPortCapacities) {
    Fabric fab = Fabric::uniform(1);
    fab.capacities = {2.0, 3.0};
    const Instance inst(fab, {Coflow{1, {{1, 1, 2, 1.0}}, 5.0}});
    const json doc = instance_to_json(inst);
    EXPECT_TRUE(doc["fabric"]["capacity"].is_array());
    EXPECT_EQ(instance_from_json(doc).fabric().capacities, fab.capacities);
}

TEST(InstanceJson, Errors) {
    EXPECT_THROW(instance_from_json(json::parse(R"({"fabric":{"machines":1},"coflows":[],"extra":1})")), ParseError);
    EXPECT_THROW(instance_from_json(json::parse(R"({"coflows":[]})")), ParseError);
    EXPECT_THROW(instance_from_json(json::parse(R"({"fabric":{"machines":"two"},"coflows":[]})")), ParseError);
    EXPECT_THROW(
        instance_from_json(json::parse(
            R"({"fabric":{"machines":1},"coflows":[{"id":1,"deadline":2,"flows":[{"src":1,"dst":1,"volume":1}]}]})")),
        InputError);
}

TEST(InstanceJson, SaveAndLoad) {
    const auto path = std::filesystem::temp_directory_path() / "dcoflow_io_test.json";
    const Instance a = workload::motivating_example(0.1);
    save_instance(a, path);
    EXPECT_EQ(instance_to_json(load_instance(path)), instance_to_json(a));
    std::filesystem::remove(path);
    EXPECT_THROW(load_instance(path), ParseError);
}

TEST(SigmaJson, ListsNonZeroPrerejections) {
    sched::SigmaOrder s;
    s.order = {2, 3};
    s.initial = {2, 3, 1};
    s.prerejected = {0, 0, 1};
    s.accepted = {2, 3};
    const json doc = sigma_to_json(s);
    EXPECT_EQ(doc["prerejected"], json::array({1}));
    EXPECT_EQ(doc["order"], json::array({2, 3}));
}

TEST(FormatNumber, ShortestRoundTripAndLocaleIndependent) {
    EXPECT_EQ(format_number(0.8), "0.8");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(1234567.5), "1234567.5");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
    if (std::setlocale(LC_ALL, "de_DE.UTF-8") != nullptr) {
        EXPECT_EQ(format_number(2.5), "2.5");
        std::setlocale(LC_ALL, "C");
    }
}

}  // namespace
}  // namespace dcoflow::io

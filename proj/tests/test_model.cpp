#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dcoflow/errors.hpp"
#include "dcoflow/model.hpp"
#include "dcoflow/workload.hpp"
#include "testing.hpp"

namespace dcoflow {
namespace {

constexpr double kEps = 0.1;

Instance motivating() { return workload::motivating_example(kEps); }

TEST(ProcessingTime, MotivatingWideCoflowOnIngressOne) {
    EXPECT_DOUBLE_EQ(processing_time(motivating(), 1, 1), 1.0);
}

TEST(ProcessingTime, ZeroWhenPortUnused) {
    const Instance inst = motivating();
    EXPECT_DOUBLE_EQ(processing_time(inst, 2, 2), 0.0);
    EXPECT_DOUBLE_EQ(processing_time(inst, 5, 2), 0.0);
}

TEST(ProcessingTime, SumsFlowsAndDividesByCapacity) {
    Fabric fabric = Fabric::uniform(2);
    fabric.capacities[0] = 2.0;
    Coflow cf{1, {{1, 1, 3, 2.0}, {2, 1, 4, 3.0}}, 10.0};
    const Instance inst(fabric, {cf});
    EXPECT_DOUBLE_EQ(processing_time(inst, 1, 1), 2.5);
}

TEST(ProcessingTime, UnknownIdsThrowLookupError) {
    const Instance inst = motivating();
    EXPECT_THROW(processing_time(inst, 1, 42), LookupError);
    EXPECT_THROW(processing_time(inst, 9, 1), LookupError);
    EXPECT_THROW(processing_time(inst, 0, 1), LookupError);
}

TEST(PortLoad, MotivatingPortOne) {
    const std::vector<CoflowId> s{1, 2};
    EXPECT_NEAR(port_load(motivating(), 1, s), 2.1, 1e-12);
}

TEST(PortLoad, EmptyAndSingleton) {
    const Instance inst = motivating();
    EXPECT_DOUBLE_EQ(port_load(inst, 1, {}), 0.0);
    const std::vector<CoflowId> one{3};
    EXPECT_DOUBLE_EQ(port_load(inst, 2, one), processing_time(inst, 2, 3));
}

TEST(BottleneckPort, MotivatingSequence) {
    const Instance inst = motivating();
    const std::vector<CoflowId> all{1, 2, 3, 4, 5};
    EXPECT_EQ(bottleneck_port(inst, all), 1);
    const std::vector<CoflowId> rest{3, 4, 5};
    EXPECT_EQ(bottleneck_port(inst, rest), 2);
}

TEST(BottleneckPort, TieGoesToSmallestPort) {
    const Instance inst(Fabric::uniform(4), {Coflow{1, {{1, 1, 5, 1.0}}, 2.0}});
    const std::vector<CoflowId> s{1};
    EXPECT_EQ(bottleneck_port(inst, s), 1);
}

TEST(BottleneckPort, EmptySetIsPreconditionError) {
    EXPECT_THROW(bottleneck_port(motivating(), {}), PreconditionError);
}

TEST(ArgmaxPort, NearTiesCountAsTies) {
    const std::vector<double> loads{1.0, 1.0 + 1e-12, 0.5};
    EXPECT_EQ(argmax_port(loads), 1);
    const std::vector<double> clear{1.0, 1.1, 0.5};
    EXPECT_EQ(argmax_port(clear), 2);
}

TEST(IsolationCct, Examples) {
    const Instance inst = motivating();
    EXPECT_DOUBLE_EQ(isolation_cct(inst, 1), 1.0);
    EXPECT_NEAR(isolation_cct(inst, 2), 1.0 + kEps, 1e-12);
    const Instance two(Fabric::uniform(4), {Coflow{1, {{1, 1, 5, 3.0}, {2, 2, 5, 1.0}}, 10.0}});
    EXPECT_DOUBLE_EQ(isolation_cct(two, 1), 4.0);
}

// Port 1 carries p = 1 (coflow 1) and p = 2 (coflow 2).
Instance two_jobs_on_port_one(double t1, double t2) {
    return Instance(Fabric::uniform(2), {Coflow{1, {{1, 1, 3, 1.0}}, t1}, Coflow{2, {{1, 1, 4, 2.0}}, t2}});
}

TEST(FParallel, DirectEvaluation) {
    const Instance inst = two_jobs_on_port_one(1.0, 3.0);
    const std::vector<CoflowId> s{1, 2};
    EXPECT_DOUBLE_EQ(f_parallel(inst, 1, s), 7.0);
    EXPECT_DOUBLE_EQ(f_parallel(inst, 1, {}), 0.0);
}

TEST(FParallel, PermutationInvariantAndIncreasing) {
    const Instance inst = motivating();
    const std::vector<CoflowId> a{1, 2, 3}, b{3, 1, 2}, c{1, 2};
    EXPECT_DOUBLE_EQ(f_parallel(inst, 1, a), f_parallel(inst, 1, b));
    const std::vector<CoflowId> d{1, 2, 3, 4, 5};
    EXPECT_GT(f_parallel(inst, 2, d), f_parallel(inst, 2, c));
}

TEST(SchedulabilityIndex, ZeroWhenTight) {
    const Instance inst = two_jobs_on_port_one(1.0, 3.0);
    const std::vector<CoflowId> s{1, 2};
    EXPECT_NEAR(schedulability_index(inst, 1, s), 0.0, 1e-12);
}

TEST(SchedulabilityIndex, MotivatingPortOneIsNegative) {
    const std::vector<CoflowId> s{1, 2};
    const double expected = 1.0 * 1.0 + 1.1 * 2.0 - (0.5 * (1.0 + 1.21) + 0.5 * 2.1 * 2.1);
    const double got = schedulability_index(motivating(), 1, s);
    EXPECT_LT(got, 0.0);
    EXPECT_NEAR(got, expected, 1e-12);
}

TEST(SchedulabilityIndex, FeasibleSingletonIsNonNegative) {
    const Instance inst = motivating();
    for (CoflowId k : inst.ids()) {
        const std::vector<CoflowId> s{k};
        for (PortId l = 1; l <= 8; ++l) EXPECT_GE(schedulability_index(inst, l, s), 0.0);
    }
}

TEST(PsiIndex, MotivatingPortOneFavoursRejectingWideCoflow) {
    const Instance inst = motivating();
    const std::vector<CoflowId> s{1, 2};
    EXPECT_GT(psi_index(inst, 1, 1, s), psi_index(inst, 1, 2, s));
}

TEST(PsiIndex, ZeroOffPortAndPreconditionWhenAbsent) {
    const Instance inst = motivating();
    const std::vector<CoflowId> s{1, 2};
    EXPECT_DOUBLE_EQ(psi_index(inst, 3, 2, s), 0.0);
    EXPECT_THROW(psi_index(inst, 1, 3, s), PreconditionError);
}

std::vector<CoflowId> random_subset(std::mt19937_64& rng, const Instance& inst) {
    std::vector<CoflowId> s;
    std::bernoulli_distribution keep(0.6);
    for (CoflowId k : inst.ids()) {
        if (keep(rng)) s.push_back(k);
    }
    if (s.empty()) s.push_back(inst.ids().front());
    return s;
}

TEST(ModelProperties, RemovalIdentitiesOnRandomInstances) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const Instance inst = testing::random_instance(rng, 3, 6);
        const auto s = random_subset(rng, inst);
        for (CoflowId j : s) {
            std::vector<CoflowId> rest;
            for (CoflowId k : s) {
                if (k != j) rest.push_back(k);
            }
            for (PortId l = 1; l <= inst.fabric().num_ports(); ++l) {
                const double scale = 1.0 + std::abs(schedulability_index(inst, l, s));
                EXPECT_NEAR(schedulability_index(inst, l, rest),
                            schedulability_index(inst, l, s) + psi_index(inst, l, j, s), 1e-9 * scale);
                EXPECT_NEAR(f_parallel(inst, l, s),
                            f_parallel(inst, l, rest) + processing_time(inst, l, j) * port_load(inst, l, s),
                            1e-9 * (1.0 + f_parallel(inst, l, s)));
            }
        }
    }
}

TEST(ModelProperties, ZeroProcessingTimeIffPortUnused) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst = testing::random_instance(rng, 4, 5);
        for (std::size_t i = 0; i < inst.size(); ++i) {
            const auto used = inst.ports_used(i);
            for (PortId l = 1; l <= inst.fabric().num_ports(); ++l) {
                const bool uses = std::find(used.begin(), used.end(), l) != used.end();
                EXPECT_EQ(inst.p(i, l) == 0.0, !uses);
            }
        }
    }
}

TEST(Instance, MergesDuplicatePortPairs) {
    const Instance inst(Fabric::uniform(2), {Coflow{1, {{1, 1, 3, 1.0}, {2, 1, 3, 2.0}, {3, 2, 3, 1.0}}, 9.0}});
    EXPECT_EQ(inst.at(0).flows.size(), 2u);
    EXPECT_DOUBLE_EQ(processing_time(inst, 1, 1), 3.0);
    EXPECT_DOUBLE_EQ(processing_time(inst, 3, 1), 4.0);
}

TEST(Instance, RejectsInvalidData) {
    const Fabric fab = Fabric::uniform(2);
    EXPECT_THROW(Instance(fab, {Coflow{1, {{1, 3, 3, 1.0}}, 1.0}}), InputError);  // ingress out of range
    EXPECT_THROW(Instance(fab, {Coflow{1, {{1, 1, 2, 1.0}}, 1.0}}), InputError);  // egress on ingress side
    EXPECT_THROW(Instance(fab, {Coflow{1, {{1, 1, 3, 0.0}}, 1.0}}), InputError);
    EXPECT_THROW(Instance(fab, {Coflow{1, {{1, 1, 3, 1.0}}, 0.0}}), InputError);
    EXPECT_THROW(Instance(fab, {Coflow{1, {{1, 1, 3, 1.0}}, 1.0, -1.0}}), InputError);
    EXPECT_THROW(Instance(fab, {Coflow{1, {}, 1.0}}), InputError);
    EXPECT_THROW(Instance(fab, {Coflow{1, {{1, 1, 3, 1.0}}, 1.0}, Coflow{1, {{1, 2, 4, 1.0}}, 1.0}}), InputError);
    EXPECT_THROW(Instance(fab, {Coflow{0, {{1, 1, 3, 1.0}}, 1.0}}), InputError);
    Fabric bad = fab;
    bad.capacities[1] = 0.0;
    EXPECT_THROW(Instance(bad, {}), InputError);
}

}  // namespace
}  // namespace dcoflow

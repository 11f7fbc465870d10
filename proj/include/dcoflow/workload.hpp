#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcoflow/model.hpp"

namespace dcoflow::workload {

using Range = std::pair<double, double>;

// Synthetic two-type workload. Type-1 coflows carry one flow; Type-2
// coflows carry W ~ U{ceil(2M/3)..M} flows from W distinct ingress ports.
struct SyntheticConfig {
    int machines = 10;
    int coflows = 60;
    Range alpha_range{2.0, 4.0};   // deadline slack factor, T ~ U(CCT0, alpha * CCT0)
    double type2_prob = 0.4;
    double class2_prob = 0.0;
    double class2_weight = 1.0;
    std::uint64_t seed = 1;
    Range volume_range{0.1, 1.0};  // per-flow volume, uniform
    bool distinct_egress = false;  // Type-2 egress ports drawn without replacement

    void validate() const;
};

// Poisson arrivals, one coflow per arrival or uniform batches.
struct ArrivalConfig {
    double lambda = 8.0;  // coflows per unit time
    std::optional<std::pair<int, int>> batch_size_range;  // e.g. {5, 15}
    int total_coflows = 4000;

    void validate() const;
};

struct TraceRecord {
    int id = 0;
    double arrival_ms = 0.0;
    std::vector<int> mappers;
    std::vector<std::pair<int, double>> reducers;  // (machine, megabytes)

    std::size_t flow_count() const noexcept { return mappers.size() * reducers.size(); }
};

struct TraceFile {
    std::string path;
    int num_machines = 0;
    std::vector<TraceRecord> records;
};

struct TraceSampleConfig {
    int machines = 10;
    int coflows = 10;
    std::uint64_t seed = 1;
    Range alpha_range{2.0, 4.0};
    double class2_prob = 0.0;
    double class2_weight = 1.0;
};

// Offline batch: N coflows released at 0 on `fabric` (which must have cfg.machines machines).
Instance gen_synthetic(const SyntheticConfig& cfg, const Fabric& fabric);
Instance gen_synthetic(const SyntheticConfig& cfg);

// Arrival stream sorted by release time; deadlines are absolute.
// Batch mode draws batch gaps at rate lambda / 10 so the coflow rate stays near lambda.
std::vector<Coflow> gen_arrivals(const SyntheticConfig& cfg, const ArrivalConfig& arrival);

// Shuffle trace: header "<machines> <coflows>", then per coflow
// "<id> <arrival_ms> <m> <mapper...> <r> <reducer:MB...>".
TraceFile parse_trace(const std::filesystem::path& path);
TraceFile parse_trace(std::istream& in, std::string name = "<stream>");

// Uniform sample (without replacement) of coflows with at most M flows.
// Machine m maps to port (m mod M) + 1; reducer bytes split evenly over mappers.
Instance sample_trace(const TraceFile& trace, const TraceSampleConfig& cfg);

// Four machines, coflow 1 on every port (volume 1, deadline 1) and four
// single-flow coflows of volume 1 + epsilon and deadline 2.
Instance motivating_example(double epsilon = 0.1);

// M machines, coflow 1 on every port and M - 1 single-flow coflows.
Instance generalized_example(int machines, double epsilon = 0.1);

}  // namespace dcoflow::workload

#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

namespace dcoflow {

using PortId = int;
using CoflowId = int;

// Absolute tolerance for time and volume comparisons (c <= T + kTolerance).
inline constexpr double kTolerance = 1e-9;

// Big-Switch fabric: ingress ports 1..M, egress ports M+1..2M.
struct Fabric {
    int num_machines = 0;
    std::vector<double> capacities;  // capacities[port - 1]

    static Fabric uniform(int machines, double capacity = 1.0);

    int num_ports() const noexcept { return 2 * num_machines; }
    bool valid_port(PortId port) const noexcept { return port >= 1 && port <= num_ports(); }
    bool is_ingress(PortId port) const noexcept { return port >= 1 && port <= num_machines; }
    bool is_egress(PortId port) const noexcept { return port > num_machines && port <= num_ports(); }
    double capacity(PortId port) const;
    bool uniform_capacity() const noexcept;

    void validate() const;
};

struct Flow {
    int flow_id = 0;
    PortId ingress = 0;
    PortId egress = 0;
    double volume = 0.0;
    // Negative means "not started": the Instance constructor resets it to volume.
    double remaining = -1.0;
};

struct Coflow {
    CoflowId id = 0;
    std::vector<Flow> flows;
    double deadline = 0.0;  // absolute
    double weight = 1.0;
    double release = 0.0;
    int class_id = 1;
};

// A validated batch of coflows on a fabric, with the per-port processing
// times p(port, k) = (sum of k's volume on port) / B(port) precomputed.
//
// Construction merges flows of one coflow that share an (ingress, egress)
// pair, so every coflow keeps at most one flow per port pair.
class Instance {
public:
    Instance() = default;
    Instance(Fabric fabric, std::vector<Coflow> coflows);

    const Fabric& fabric() const noexcept { return fabric_; }
    const std::vector<Coflow>& coflows() const noexcept { return coflows_; }
    std::size_t size() const noexcept { return coflows_.size(); }
    bool empty() const noexcept { return coflows_.empty(); }

    bool contains(CoflowId id) const noexcept { return index_.contains(id); }
    std::size_t index_of(CoflowId id) const;
    const Coflow& coflow(CoflowId id) const;
    const Coflow& at(std::size_t index) const { return coflows_[index]; }
    std::vector<CoflowId> ids() const;

    // Unchecked dense access by coflow index.
    double p(std::size_t index, PortId port) const noexcept { return ptimes_[index][port - 1]; }
    std::span<const double> ptimes(std::size_t index) const noexcept { return ptimes_[index]; }
    std::span<const PortId> ports_used(std::size_t index) const noexcept { return used_[index]; }

private:
    Fabric fabric_;
    std::vector<Coflow> coflows_;
    std::unordered_map<CoflowId, std::size_t> index_;
    std::vector<std::vector<double>> ptimes_;
    std::vector<std::vector<PortId>> used_;
};

// p(port, k); zero when k has no flow on port.
double processing_time(const Instance& instance, PortId port, CoflowId k);

// Sum of processing times of the coflows in S on port.
double port_load(const Instance& instance, PortId port, std::span<const CoflowId> set);

// Port with the largest load over S; ties go to the smallest port id.
PortId bottleneck_port(const Instance& instance, std::span<const CoflowId> set);

// Port (1-based) of the largest entry of per-port loads. Loads within
// kTolerance of the maximum count as tied; the smallest port id wins.
PortId argmax_port(std::span<const double> loads);

// Completion time of k alone at full port rates: max over ports of p(port, k).
double isolation_cct(const Instance& instance, CoflowId k);

// Parallel-inequality right-hand side: 1/2 sum p^2 + 1/2 (sum p)^2.
double f_parallel(const Instance& instance, PortId port, std::span<const CoflowId> set);

// sum p(port, k) T_k - f_parallel(port, S). Negative means some coflow of S
// using port is late whatever the order.
double schedulability_index(const Instance& instance, PortId port, std::span<const CoflowId> set);

// Lateness index of j in S on port: p(port, j) (sum_{k in S} p(port, k) - T_j).
// Positive means j is late when served last on port. Satisfies
// I(S \ {j}) = I(S) + psi(j).
double psi_index(const Instance& instance, PortId port, CoflowId j, std::span<const CoflowId> set);

}  // namespace dcoflow

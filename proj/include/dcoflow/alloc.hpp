#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dcoflow/model.hpp"

namespace dcoflow::alloc {

// Order of the flows of one coflow in the greedy walk.
enum class FlowOrder {
    largest_remaining_first,  // descending remaining volume, ties by flow id
    by_flow_id,
};

struct AllocOptions {
    FlowOrder flow_order = FlowOrder::largest_remaining_first;
    bool record_epochs = false;  // keep per-epoch grants (audits)
    bool record_events = false;  // keep the start/stop/finish log
};

struct FlowOutcome {
    CoflowId coflow_id = 0;
    int flow_id = 0;
    PortId ingress = 0;
    PortId egress = 0;
    double volume = 0.0;  // volume to deliver from the start time
    double start = 0.0;
    std::optional<double> completion;

    bool finished() const noexcept { return completion.has_value(); }
    // volume / (completion - start); zero while unfinished.
    double average_rate() const noexcept;
};

enum class EventKind { start, stop, finish };

struct AllocEvent {
    double time = 0.0;
    int flow_id = 0;
    CoflowId coflow_id = 0;
    EventKind kind = EventKind::start;
    double rate = 0.0;
};

// Constant-rate interval; grants hold (index into flows, rate).
struct Epoch {
    double begin = 0.0;
    double end = 0.0;
    std::vector<std::pair<std::size_t, double>> grants;
};

struct AllocationTimeline {
    std::vector<FlowOutcome> flows;
    std::vector<std::size_t> priority;  // flow indices, highest first
    std::vector<std::pair<CoflowId, double>> ccts;  // scheduled coflows in sigma order
    double makespan = 0.0;
    std::vector<Epoch> epochs;
    std::vector<AllocEvent> events;
};

// A flow as seen by the greedy walk.
struct PortPair {
    PortId ingress = 0;
    PortId egress = 0;
};

// One-flow-per-port greedy grant: walks `flows` in priority order and gives
// a flow the full rate min(B_in, B_out) iff both of its ports are still
// unclaimed, zero otherwise. Returns one rate per flow.
std::vector<double> greedy_grants(const Fabric& fabric, std::span<const PortPair> flows);

// Priority walk for `sigma`: coflows in sigma order, each coflow's flows
// ordered by `order`. Returns (coflow index, flow index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> priority_walk(const Instance& instance,
                                                               std::span<const CoflowId> sigma, FlowOrder order);

// Event-driven fluid simulation of the sigma-order-preserving greedy
// allocation, starting at `start_time` from every flow's remaining volume,
// running until every flow of the coflows in sigma is delivered.
AllocationTimeline greedy_allocate(const Instance& instance, std::span<const CoflowId> sigma,
                                   double start_time = 0.0, const AllocOptions& options = {});

// Absolute completion time of coflow k (its last flow). LookupError when k was not scheduled.
double actual_cct(const AllocationTimeline& timeline, CoflowId k);

// CSV "time,flow_id,coflow_id,event,rate" of the recorded events.
void write_event_csv(const AllocationTimeline& timeline, std::ostream& out);

}  // namespace dcoflow::alloc

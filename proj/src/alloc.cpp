#include "dcoflow/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "dcoflow/errors.hpp"
#include "dcoflow/format.hpp"

namespace dcoflow::alloc {

double FlowOutcome::average_rate() const noexcept {
    if (!completion || *completion <= start) return 0.0;
    return volume / (*completion - start);
}

std::vector<double> greedy_grants(const Fabric& fabric, std::span<const PortPair> flows) {
    std::vector<bool> busy(static_cast<std::size_t>(fabric.num_ports()) + 1, false);
    std::vector<double> rates(flows.size(), 0.0);
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const auto in = static_cast<std::size_t>(flows[i].ingress);
        const auto out = static_cast<std::size_t>(flows[i].egress);
        if (busy[in] || busy[out]) continue;
        busy[in] = busy[out] = true;
        rates[i] = std::min(fabric.capacities[in - 1], fabric.capacities[out - 1]);
    }
    return rates;
}

std::vector<std::pair<std::size_t, std::size_t>> priority_walk(const Instance& instance,
                                                               std::span<const CoflowId> sigma, FlowOrder order) {
    std::vector<std::pair<std::size_t, std::size_t>> walk;
    std::unordered_set<CoflowId> seen;
    for (CoflowId k : sigma) {
        const std::size_t ci = instance.index_of(k);
        if (!seen.insert(k).second) {
            throw PreconditionError("sigma lists coflow " + std::to_string(k) + " twice");
        }
        const auto& flows = instance.at(ci).flows;
        std::vector<std::size_t> idx(flows.size());
        for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (order == FlowOrder::largest_remaining_first && flows[a].remaining != flows[b].remaining) {
                return flows[a].remaining > flows[b].remaining;
            }
            return flows[a].flow_id < flows[b].flow_id;
        });
        for (std::size_t j : idx) walk.emplace_back(ci, j);
    }
    return walk;
}

AllocationTimeline greedy_allocate(const Instance& instance, std::span<const CoflowId> sigma, double start_time,
                                   const AllocOptions& options) {
    AllocationTimeline timeline;
    const auto walk = priority_walk(instance, sigma, options.flow_order);

    std::vector<double> remaining;
    std::vector<std::size_t> active;
    for (const auto& [ci, fi] : walk) {
        const Coflow& cf = instance.at(ci);
        const Flow& f = cf.flows[fi];
        FlowOutcome outcome{cf.id, f.flow_id, f.ingress, f.egress, f.remaining, start_time, std::nullopt};
        if (f.remaining <= 0.0) outcome.completion = start_time;
        const std::size_t slot = timeline.flows.size();
        timeline.flows.push_back(outcome);
        timeline.priority.push_back(slot);
        remaining.push_back(f.remaining);
        if (f.remaining > 0.0) active.push_back(slot);
    }

    std::vector<double> last_rate(timeline.flows.size(), 0.0);
    std::vector<PortPair> ports;
    double now = start_time;
    while (!active.empty()) {
        ports.clear();
        for (std::size_t slot : active) ports.push_back({timeline.flows[slot].ingress, timeline.flows[slot].egress});
        const std::vector<double> rates = greedy_grants(instance.fabric(), ports);

        double step = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (rates[i] > 0.0) step = std::min(step, remaining[active[i]] / rates[i]);
        }
        const double next = now + step;
        const double slack = 1e-12 * std::max(1.0, std::abs(next));

        Epoch epoch{now, next, {}};
        std::vector<std::size_t> still_active;
        still_active.reserve(active.size());
        for (std::size_t i = 0; i < active.size(); ++i) {
            const std::size_t slot = active[i];
            FlowOutcome& flow = timeline.flows[slot];
            const double rate = rates[i];
            if (options.record_events && rate != last_rate[slot]) {
                timeline.events.push_back({now, flow.flow_id, flow.coflow_id,
                                           rate > 0.0 ? EventKind::start : EventKind::stop, rate});
            }
            last_rate[slot] = rate;
            if (rate > 0.0) {
                epoch.grants.emplace_back(slot, rate);
                if (now + remaining[slot] / rate <= next + slack) {
                    remaining[slot] = 0.0;
                    flow.completion = next;
                    if (options.record_events) {
                        timeline.events.push_back({next, flow.flow_id, flow.coflow_id, EventKind::finish, 0.0});
                    }
                    continue;
                }
                remaining[slot] -= rate * step;
            }
            still_active.push_back(slot);
        }
        if (options.record_epochs) timeline.epochs.push_back(std::move(epoch));
        active = std::move(still_active);
        now = next;
    }

    timeline.makespan = start_time;
    std::unordered_map<CoflowId, double> last_finish;
    for (const FlowOutcome& f : timeline.flows) {
        auto [it, fresh] = last_finish.try_emplace(f.coflow_id, *f.completion);
        if (!fresh) it->second = std::max(it->second, *f.completion);
    }
    for (CoflowId k : sigma) {
        const double cct = std::max(start_time, last_finish[k]);
        timeline.ccts.emplace_back(k, cct);
        timeline.makespan = std::max(timeline.makespan, cct);
    }
    return timeline;
}

double actual_cct(const AllocationTimeline& timeline, CoflowId k) {
    for (const auto& [id, cct] : timeline.ccts) {
        if (id == k) return cct;
    }
    throw LookupError("coflow " + std::to_string(k) + " was not scheduled");
}

void write_event_csv(const AllocationTimeline& timeline, std::ostream& out) {
    out << "time,flow_id,coflow_id,event,rate\n";
    for (const AllocEvent& e : timeline.events) {
        const char* kind = e.kind == EventKind::start ? "start" : e.kind == EventKind::stop ? "stop" : "finish";
        out << format_number(e.time) << ',' << e.flow_id << ',' << e.coflow_id << ',' << kind << ','
            << format_number(e.rate) << '\n';
    }
}

}  // namespace dcoflow::alloc

#include "dcoflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "dcoflow/errors.hpp"

namespace dcoflow {

Fabric Fabric::uniform(int machines, double capacity) {
    Fabric fabric;
    fabric.num_machines = machines;
    fabric.capacities.assign(static_cast<std::size_t>(std::max(machines, 0)) * 2, capacity);
    fabric.validate();
    return fabric;
}

double Fabric::capacity(PortId port) const {
    if (!valid_port(port)) {
        throw LookupError("unknown port " + std::to_string(port));
    }
    return capacities[static_cast<std::size_t>(port - 1)];
}

bool Fabric::uniform_capacity() const noexcept {
    return std::adjacent_find(capacities.begin(), capacities.end(), std::not_equal_to<>()) ==
           capacities.end();
}

void Fabric::validate() const {
    if (num_machines < 1) {
        throw InputError("fabric needs at least one machine");
    }
    if (capacities.size() != static_cast<std::size_t>(num_ports())) {
        throw InputError("fabric has " + std::to_string(capacities.size()) + " capacities for " +
                         std::to_string(num_ports()) + " ports");
    }
    for (double c : capacities) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw InputError("port capacities must be finite and strictly positive");
        }
    }
}

namespace {

void validate_coflow(const Fabric& fabric, const Coflow& cf) {
    const std::string tag = "coflow " + std::to_string(cf.id);
    if (cf.id < 1) {
        throw InputError(tag + ": ids must be positive");
    }
    if (cf.flows.empty()) {
        throw InputError(tag + ": no flows");
    }
    if (!(cf.deadline > cf.release) || !std::isfinite(cf.deadline)) {
        throw InputError(tag + ": deadline must be finite and later than the release time");
    }
    if (!(cf.weight >= 0.0) || !std::isfinite(cf.weight)) {
        throw InputError(tag + ": weight must be finite and nonnegative");
    }
    for (const Flow& f : cf.flows) {
        if (!fabric.is_ingress(f.ingress)) {
            throw InputError(tag + ": flow " + std::to_string(f.flow_id) + " has invalid ingress port " +
                             std::to_string(f.ingress));
        }
        if (!fabric.is_egress(f.egress)) {
            throw InputError(tag + ": flow " + std::to_string(f.flow_id) + " has invalid egress port " +
                             std::to_string(f.egress));
        }
        if (!(f.volume > 0.0) || !std::isfinite(f.volume)) {
            throw InputError(tag + ": flow volumes must be finite and positive");
        }
        if (f.remaining > f.volume * (1 + kTolerance)) {
            throw InputError(tag + ": remaining volume exceeds volume");
        }
    }
}

// One flow per (ingress, egress): volumes add, the smallest flow id survives.
std::vector<Flow> merge_flows(std::vector<Flow> flows) {
    std::map<std::pair<PortId, PortId>, Flow> merged;
    for (Flow& f : flows) {
        if (f.remaining < 0.0) {
            f.remaining = f.volume;
        }
        auto [it, inserted] = merged.try_emplace({f.ingress, f.egress}, f);
        if (!inserted) {
            it->second.volume += f.volume;
            it->second.remaining += f.remaining;
            it->second.flow_id = std::min(it->second.flow_id, f.flow_id);
        }
    }
    std::vector<Flow> out;
    out.reserve(merged.size());
    for (auto& [key, f] : merged) {
        out.push_back(f);
    }
    std::sort(out.begin(), out.end(), [](const Flow& a, const Flow& b) { return a.flow_id < b.flow_id; });
    return out;
}

}  // namespace

Instance::Instance(Fabric fabric, std::vector<Coflow> coflows)
    : fabric_(std::move(fabric)), coflows_(std::move(coflows)) {
    fabric_.validate();
    const auto ports = static_cast<std::size_t>(fabric_.num_ports());
    ptimes_.reserve(coflows_.size());
    used_.reserve(coflows_.size());
    for (std::size_t i = 0; i < coflows_.size(); ++i) {
        Coflow& cf = coflows_[i];
        validate_coflow(fabric_, cf);
        std::vector<int> seen;
        for (const Flow& f : cf.flows) {
            seen.push_back(f.flow_id);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            throw InputError("coflow " + std::to_string(cf.id) + ": duplicate flow ids");
        }
        cf.flows = merge_flows(std::move(cf.flows));
        if (!index_.emplace(cf.id, i).second) {
            throw InputError("duplicate coflow id " + std::to_string(cf.id));
        }

        std::vector<double> volume(ports, 0.0);
        for (const Flow& f : cf.flows) {
            volume[static_cast<std::size_t>(f.ingress - 1)] += f.volume;
            volume[static_cast<std::size_t>(f.egress - 1)] += f.volume;
        }
        std::vector<PortId> used;
        for (std::size_t l = 0; l < ports; ++l) {
            volume[l] /= fabric_.capacities[l];
            if (volume[l] > 0.0) {
                used.push_back(static_cast<PortId>(l + 1));
            }
        }
        ptimes_.push_back(std::move(volume));
        used_.push_back(std::move(used));
    }
}

std::size_t Instance::index_of(CoflowId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw LookupError("unknown coflow " + std::to_string(id));
    }
    return it->second;
}

const Coflow& Instance::coflow(CoflowId id) const { return coflows_[index_of(id)]; }

std::vector<CoflowId> Instance::ids() const {
    std::vector<CoflowId> out;
    out.reserve(coflows_.size());
    for (const Coflow& cf : coflows_) {
        out.push_back(cf.id);
    }
    return out;
}

namespace {

void check_port(const Instance& instance, PortId port) {
    if (!instance.fabric().valid_port(port)) {
        throw LookupError("unknown port " + std::to_string(port));
    }
}

}  // namespace

double processing_time(const Instance& instance, PortId port, CoflowId k) {
    check_port(instance, port);
    return instance.p(instance.index_of(k), port);
}

double port_load(const Instance& instance, PortId port, std::span<const CoflowId> set) {
    check_port(instance, port);
    double load = 0.0;
    for (CoflowId k : set) {
        load += instance.p(instance.index_of(k), port);
    }
    return load;
}

PortId argmax_port(std::span<const double> loads) {
    const double best = *std::max_element(loads.begin(), loads.end());
    for (std::size_t l = 0; l < loads.size(); ++l) {
        if (loads[l] >= best - kTolerance) {
            return static_cast<PortId>(l + 1);
        }
    }
    return 1;
}

PortId bottleneck_port(const Instance& instance, std::span<const CoflowId> set) {
    if (set.empty()) {
        throw PreconditionError("bottleneck_port: empty coflow set");
    }
    const int ports = instance.fabric().num_ports();
    std::vector<double> load(static_cast<std::size_t>(ports), 0.0);
    for (CoflowId k : set) {
        const std::size_t idx = instance.index_of(k);
        for (PortId l : instance.ports_used(idx)) {
            load[static_cast<std::size_t>(l - 1)] += instance.p(idx, l);
        }
    }
    return argmax_port(load);
}

double isolation_cct(const Instance& instance, CoflowId k) {
    const auto p = instance.ptimes(instance.index_of(k));
    return *std::max_element(p.begin(), p.end());
}

double f_parallel(const Instance& instance, PortId port, std::span<const CoflowId> set) {
    check_port(instance, port);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (CoflowId k : set) {
        const double p = instance.p(instance.index_of(k), port);
        sum += p;
        sum_sq += p * p;
    }
    return 0.5 * sum_sq + 0.5 * sum * sum;
}

double schedulability_index(const Instance& instance, PortId port, std::span<const CoflowId> set) {
    check_port(instance, port);
    double weighted = 0.0;
    for (CoflowId k : set) {
        const std::size_t idx = instance.index_of(k);
        weighted += instance.p(idx, port) * instance.at(idx).deadline;
    }
    return weighted - f_parallel(instance, port, set);
}

double psi_index(const Instance& instance, PortId port, CoflowId j, std::span<const CoflowId> set) {
    if (std::find(set.begin(), set.end(), j) == set.end()) {
        throw PreconditionError("psi_index: coflow " + std::to_string(j) + " is not in the set");
    }
    const std::size_t idx = instance.index_of(j);
    return instance.p(idx, port) * (port_load(instance, port, set) - instance.at(idx).deadline);
}

}  // namespace dcoflow

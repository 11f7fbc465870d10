#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcoflow/model.hpp"

namespace dcoflow::sched {

enum class Variant {
    dcoflow_v1,
    dcoflow_v2,
    wdcoflow,
    wdcoflow_dp,
    cs_mha,
    edd,
};

std::string_view to_string(Variant variant) noexcept;

// Throws ConfigError naming every valid scheduler when the name is unknown.
Variant parse_variant(std::string_view name);

std::span<const Variant> all_variants() noexcept;

struct SchedulerConfig {
    Variant variant = Variant::wdcoflow;
    double gamma = 0.9;             // dcoflow_v2 congestion threshold, in (0, 1]
    std::int64_t weight_scale = 1;  // wdcoflow_dp: integer multiplier applied to weights

    void validate() const;
};

// Priority order produced by a scheduler.
struct SigmaOrder {
    std::vector<CoflowId> order;        // final order, front = highest priority
    std::vector<CoflowId> initial;      // phase-one order, before late coflows are pruned
    std::vector<CoflowId> prerejected;  // aligned with `initial`; 0 where the coflow was accepted
    std::vector<CoflowId> accepted;     // ids of `order`, ascending

    std::vector<CoflowId> prerejected_ids() const;
    bool admits(CoflowId k) const;
};

// Runs the configured scheduler. Empty instance gives an empty order.
SigmaOrder build_sigma(const Instance& instance, const SchedulerConfig& config);

// Weighted rejection rule: argmax over R of (1/w_j) sum_{l in L*} psi(l, j, S),
// with L* the ports of negative schedulability index (falls back to the
// bottleneck port of S when L* is empty). Ties: larger total processing
// time, then smaller id. Zero-weight coflows score +inf.
CoflowId reject_coflow(const Instance& instance, std::span<const CoflowId> set, std::span<const CoflowId> candidates);

// Unit-weight scores of the dcoflow_v1 / dcoflow_v2 rules for every coflow of
// S using `bottleneck`. The coflow to reject is the one with the largest score.
//   v1: sum of psi over the coflow's ports where psi > 0 (it would be late there);
//   v2: sum of psi over ports with load >= gamma * load(bottleneck).
std::vector<std::pair<CoflowId, double>> dcoflow_variant_candidates(const Instance& instance,
                                                                    std::span<const CoflowId> set,
                                                                    PortId bottleneck, Variant variant,
                                                                    double gamma = 0.9);

// Candidate set of the DP filter: coflows of `users` (all using `bottleneck`)
// left out by at least one maximum-weight on-time set of the single-port
// late-jobs problem on `bottleneck`, so rejecting any of them keeps that
// optimum. Zero-weight coflows are always candidates. Falls back to all of
// `users` when every coflow fits. Throws InputError when a scaled weight is
// not integral.
std::vector<CoflowId> dp_filter(const Instance& instance, std::span<const CoflowId> users, PortId bottleneck,
                                std::int64_t weight_scale = 1);

// Port-independent lower bound on the CCT of the last coflow of `prefix`:
// max over its ports of its own processing time plus the processing time of
// every earlier coflow of the prefix on that port.
double eval_cct(const Instance& instance, std::span<const CoflowId> prefix, CoflowId k);

// Phase two: walks `initial` in priority order and drops every pre-rejected
// coflow whose estimated CCT over the surviving prefix exceeds its deadline.
SigmaOrder remove_late_coflows(const Instance& instance, std::vector<CoflowId> initial,
                               std::vector<CoflowId> prerejected);

// Baseline: per-port Moore-Hodgson admission, admitted where every port
// admits, EDD order, then a second chance for rejected coflows in ascending
// order of bottleneck volume over deadline.
SigmaOrder cs_mha(const Instance& instance);

// Baseline: EDD order (ties by id), late coflows pruned.
SigmaOrder edd_order(const Instance& instance);

}  // namespace dcoflow::sched

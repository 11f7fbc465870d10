#include "dcoflow/sched.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dcoflow/errors.hpp"
#include "dcoflow/singlemachine.hpp"

namespace dcoflow::sched {

namespace {

constexpr std::array kVariants = {
    Variant::dcoflow_v1, Variant::dcoflow_v2, Variant::wdcoflow, Variant::wdcoflow_dp, Variant::cs_mha, Variant::edd,
};

bool nearly_equal(double a, double b) {
    if (a == b) return true;  // covers matching infinities
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Per-port aggregates of the unscheduled set S, updated as coflows leave it.
class RoundState {
public:
    RoundState(const Instance& instance, std::span<const std::size_t> members)
        : instance_(instance), in_set_(instance.size(), false) {
        const auto ports = static_cast<std::size_t>(instance.fabric().num_ports());
        load_.assign(ports, 0.0);
        load_sq_.assign(ports, 0.0);
        load_deadline_.assign(ports, 0.0);
        users_.assign(ports, {});
        live_users_.assign(ports, 0);
        for (std::size_t idx : members) {
            in_set_[idx] = true;
            ++size_;
            const double deadline = instance.at(idx).deadline;
            for (PortId l : instance.ports_used(idx)) {
                const auto li = static_cast<std::size_t>(l - 1);
                const double p = instance.p(idx, l);
                load_[li] += p;
                load_sq_[li] += p * p;
                load_deadline_[li] += p * deadline;
                users_[li].push_back(idx);
                ++live_users_[li];
            }
        }
    }

    std::size_t size() const noexcept { return size_; }
    bool contains(std::size_t idx) const noexcept { return in_set_[idx]; }
    double load(PortId l) const noexcept { return load_[static_cast<std::size_t>(l - 1)]; }
    std::span<const double> loads() const noexcept { return load_; }

    PortId bottleneck() const { return argmax_port(load_); }

    // Coflows of S with p(l, k) > 0, in instance order.
    std::vector<std::size_t> users(PortId l) const {
        std::vector<std::size_t> out;
        for (std::size_t idx : users_[static_cast<std::size_t>(l - 1)]) {
            if (in_set_[idx]) out.push_back(idx);
        }
        return out;
    }

    // Schedulability index I_l(S).
    double index(PortId l) const noexcept {
        const auto li = static_cast<std::size_t>(l - 1);
        return load_deadline_[li] - 0.5 * load_sq_[li] - 0.5 * load_[li] * load_[li];
    }

    bool negative_index(PortId l) const noexcept {
        const auto li = static_cast<std::size_t>(l - 1);
        return index(l) < -1e-9 * std::max(1.0, std::abs(load_deadline_[li]));
    }

    // Lateness of idx on l if served last among S.
    double psi(PortId l, std::size_t idx) const noexcept {
        return instance_.p(idx, l) * (load(l) - instance_.at(idx).deadline);
    }

    void remove(std::size_t idx) {
        in_set_[idx] = false;
        --size_;
        const double deadline = instance_.at(idx).deadline;
        for (PortId l : instance_.ports_used(idx)) {
            const auto li = static_cast<std::size_t>(l - 1);
            if (--live_users_[li] == 0) {
                load_[li] = load_sq_[li] = load_deadline_[li] = 0.0;
                continue;
            }
            const double p = instance_.p(idx, l);
            load_[li] -= p;
            load_sq_[li] -= p * p;
            load_deadline_[li] -= p * deadline;
        }
    }

private:
    const Instance& instance_;
    std::vector<bool> in_set_;
    std::size_t size_ = 0;
    std::vector<double> load_;
    std::vector<double> load_sq_;
    std::vector<double> load_deadline_;
    std::vector<std::vector<std::size_t>> users_;
    std::vector<std::size_t> live_users_;
};

double total_processing(const Instance& instance, std::size_t idx) {
    const auto p = instance.ptimes(idx);
    return std::accumulate(p.begin(), p.end(), 0.0);
}

// Largest score wins; ties: larger total processing time, then smaller id.
std::size_t pick_largest(const Instance& instance, std::span<const std::size_t> candidates,
                         std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double s = scores[i];
        const double b = scores[best];
        if (!nearly_equal(s, b)) {
            if (s > b) best = i;
            continue;
        }
        const double pi = total_processing(instance, candidates[i]);
        const double pb = total_processing(instance, candidates[best]);
        if (!nearly_equal(pi, pb)) {
            if (pi > pb) best = i;
            continue;
        }
        if (instance.at(candidates[i]).id < instance.at(candidates[best]).id) best = i;
    }
    return candidates[best];
}

std::size_t weighted_reject(const Instance& instance, const RoundState& state,
                            std::span<const std::size_t> candidates) {
    const int ports = instance.fabric().num_ports();
    std::vector<bool> late_port(static_cast<std::size_t>(ports) + 1, false);
    bool any_late = false;
    for (PortId l = 1; l <= ports; ++l) {
        if (state.negative_index(l)) {
            late_port[static_cast<std::size_t>(l)] = true;
            any_late = true;
        }
    }
    if (!any_late) {
        late_port[static_cast<std::size_t>(state.bottleneck())] = true;
    }
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (std::size_t idx : candidates) {
        double sum = 0.0;
        for (PortId l : instance.ports_used(idx)) {
            if (late_port[static_cast<std::size_t>(l)]) sum += state.psi(l, idx);
        }
        const double w = instance.at(idx).weight;
        scores.push_back(w > 0.0 ? sum / w : std::numeric_limits<double>::infinity());
    }
    return pick_largest(instance, candidates, scores);
}

std::vector<double> variant_scores(const Instance& instance, const RoundState& state,
                                   std::span<const std::size_t> candidates, PortId bottleneck, Variant variant,
                                   double gamma) {
    std::vector<double> scores;
    scores.reserve(candidates.size());
    const double threshold = gamma * state.load(bottleneck);
    for (std::size_t idx : candidates) {
        double sum = 0.0;
        for (PortId l : instance.ports_used(idx)) {
            const double psi = state.psi(l, idx);
            if (variant == Variant::dcoflow_v1) {
                if (psi > 0.0) sum += psi;
            } else if (state.load(l) >= threshold - kTolerance) {
                sum += psi;
            }
        }
        scores.push_back(sum);
    }
    return scores;
}

std::int64_t scaled_weight(const Coflow& cf, std::int64_t scale) {
    const double scaled = cf.weight * static_cast<double>(scale);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9 * std::max(1.0, std::abs(scaled))) {
        throw InputError("coflow " + std::to_string(cf.id) + ": weight " + std::to_string(cf.weight) +
                         " times scale " + std::to_string(scale) + " is not an integer");
    }
    return static_cast<std::int64_t>(rounded);
}

std::vector<std::size_t> dp_filter_indices(const Instance& instance, std::span<const std::size_t> users,
                                           PortId bottleneck, std::int64_t weight_scale) {
    std::vector<singlemachine::Job> jobs;
    std::vector<std::size_t> rejected;
    for (std::size_t idx : users) {
        const Coflow& cf = instance.at(idx);
        const std::int64_t w = scaled_weight(cf, weight_scale);
        if (w < 1) {
            rejected.push_back(idx);  // weightless: never worth keeping
            continue;
        }
        jobs.push_back({static_cast<int>(idx), instance.p(idx, bottleneck), cf.deadline, w});
    }
    // k is a candidate iff some maximum-weight feasible set leaves it out,
    // i.e. dropping k keeps the optimum.
    const std::int64_t best = singlemachine::dp_weighted_late(jobs).max_weight;
    std::vector<singlemachine::Job> rest;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        rest.assign(jobs.begin(), jobs.end());
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        if (singlemachine::dp_weighted_late(rest).max_weight == best) {
            rejected.push_back(static_cast<std::size_t>(jobs[i].job_id));
        }
    }
    if (rejected.empty()) {
        return {users.begin(), users.end()};
    }
    std::sort(rejected.begin(), rejected.end());
    return rejected;
}

std::vector<std::size_t> to_indices(const Instance& instance, std::span<const CoflowId> ids) {
    std::vector<std::size_t> out;
    out.reserve(ids.size());
    for (CoflowId k : ids) out.push_back(instance.index_of(k));
    return out;
}

std::vector<CoflowId> to_ids(const Instance& instance, std::span<const std::size_t> indices) {
    std::vector<CoflowId> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) out.push_back(instance.at(idx).id);
    return out;
}

void check_subset(std::span<const std::size_t> subset, const RoundState& state, const char* what) {
    for (std::size_t idx : subset) {
        if (!state.contains(idx)) throw PreconditionError(std::string(what) + ": candidate not in the set");
    }
}

// Phase one of the sigma-order heuristics: fills the order from the back.
SigmaOrder sigma_heuristic(const Instance& instance, const SchedulerConfig& config) {
    const std::size_t n = instance.size();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    RoundState state(instance, all);

    std::vector<CoflowId> initial(n, 0);
    std::vector<CoflowId> prerejected(n, 0);
    for (std::size_t round = 0; round < n; ++round) {
        const std::size_t slot = n - 1 - round;
        const PortId bottleneck = state.bottleneck();
        const std::vector<std::size_t> users = state.users(bottleneck);

        // Max-deadline coflow on the bottleneck; ties to the smaller id.
        std::size_t last = users.front();
        for (std::size_t idx : users) {
            const Coflow& a = instance.at(idx);
            const Coflow& b = instance.at(last);
            if (a.deadline > b.deadline || (a.deadline == b.deadline && a.id < b.id)) last = idx;
        }

        std::size_t chosen = last;
        if (state.load(bottleneck) > instance.at(last).deadline + kTolerance) {
            switch (config.variant) {
                case Variant::dcoflow_v1:
                case Variant::dcoflow_v2: {
                    const auto scores =
                        variant_scores(instance, state, users, bottleneck, config.variant, config.gamma);
                    chosen = pick_largest(instance, users, scores);
                    break;
                }
                case Variant::wdcoflow:
                    chosen = weighted_reject(instance, state, users);
                    break;
                case Variant::wdcoflow_dp: {
                    const auto filtered = dp_filter_indices(instance, users, bottleneck, config.weight_scale);
                    chosen = weighted_reject(instance, state, filtered);
                    break;
                }
                default:
                    throw PreconditionError("sigma heuristic called with a baseline variant");
            }
            prerejected[slot] = instance.at(chosen).id;
        }
        initial[slot] = instance.at(chosen).id;
        state.remove(chosen);
    }
    return remove_late_coflows(instance, std::move(initial), std::move(prerejected));
}

}  // namespace

std::string_view to_string(Variant variant) noexcept {
    switch (variant) {
        case Variant::dcoflow_v1: return "dcoflow_v1";
        case Variant::dcoflow_v2: return "dcoflow_v2";
        case Variant::wdcoflow: return "wdcoflow";
        case Variant::wdcoflow_dp: return "wdcoflow_dp";
        case Variant::cs_mha: return "cs_mha";
        case Variant::edd: return "edd";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    for (Variant v : kVariants) {
        if (to_string(v) == name) return v;
    }
    std::string valid;
    for (Variant v : kVariants) {
        if (!valid.empty()) valid += ", ";
        valid += to_string(v);
    }
    throw ConfigError("unknown scheduler '" + std::string(name) + "' (valid: " + valid + ")");
}

std::span<const Variant> all_variants() noexcept { return kVariants; }

void SchedulerConfig::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ConfigError("gamma must lie in (0, 1], got " + std::to_string(gamma));
    }
    if (weight_scale < 1) {
        throw ConfigError("weight_scale must be a positive integer");
    }
}

std::vector<CoflowId> SigmaOrder::prerejected_ids() const {
    std::vector<CoflowId> out;
    for (CoflowId k : prerejected) {
        if (k != 0) out.push_back(k);
    }
    return out;
}

bool SigmaOrder::admits(CoflowId k) const { return std::binary_search(accepted.begin(), accepted.end(), k); }

SigmaOrder build_sigma(const Instance& instance, const SchedulerConfig& config) {
    config.validate();
    if (instance.empty()) return {};
    switch (config.variant) {
        case Variant::cs_mha: return cs_mha(instance);
        case Variant::edd: return edd_order(instance);
        default: return sigma_heuristic(instance, config);
    }
}

CoflowId reject_coflow(const Instance& instance, std::span<const CoflowId> set, std::span<const CoflowId> candidates) {
    if (candidates.empty()) throw PreconditionError("reject_coflow: empty candidate set");
    const auto members = to_indices(instance, set);
    const auto cand = to_indices(instance, candidates);
    RoundState state(instance, members);
    check_subset(cand, state, "reject_coflow");
    return instance.at(weighted_reject(instance, state, cand)).id;
}

std::vector<std::pair<CoflowId, double>> dcoflow_variant_candidates(const Instance& instance,
                                                                    std::span<const CoflowId> set,
                                                                    PortId bottleneck, Variant variant,
                                                                    double gamma) {
    if (variant != Variant::dcoflow_v1 && variant != Variant::dcoflow_v2) {
        throw PreconditionError("dcoflow_variant_candidates: variant must be dcoflow_v1 or dcoflow_v2");
    }
    if (!instance.fabric().valid_port(bottleneck)) {
        throw LookupError("unknown port " + std::to_string(bottleneck));
    }
    const auto members = to_indices(instance, set);
    RoundState state(instance, members);
    const auto users = state.users(bottleneck);
    const auto scores = variant_scores(instance, state, users, bottleneck, variant, gamma);
    std::vector<std::pair<CoflowId, double>> out;
    for (std::size_t i = 0; i < users.size(); ++i) {
        out.emplace_back(instance.at(users[i]).id, scores[i]);
    }
    return out;
}

std::vector<CoflowId> dp_filter(const Instance& instance, std::span<const CoflowId> users, PortId bottleneck,
                                std::int64_t weight_scale) {
    if (!instance.fabric().valid_port(bottleneck)) {
        throw LookupError("unknown port " + std::to_string(bottleneck));
    }
    const auto idx = to_indices(instance, users);
    return to_ids(instance, dp_filter_indices(instance, idx, bottleneck, weight_scale));
}

double eval_cct(const Instance& instance, std::span<const CoflowId> prefix, CoflowId k) {
    if (prefix.empty() || prefix.back() != k) {
        throw PreconditionError("eval_cct: coflow " + std::to_string(k) + " must close the prefix");
    }
    const std::size_t target = instance.index_of(k);
    double best = 0.0;
    for (PortId l : instance.ports_used(target)) {
        double sum = 0.0;
        for (CoflowId id : prefix) {
            sum += instance.p(instance.index_of(id), l);
        }
        best = std::max(best, sum);
    }
    return best;
}

SigmaOrder remove_late_coflows(const Instance& instance, std::vector<CoflowId> initial,
                               std::vector<CoflowId> prerejected) {
    if (prerejected.size() != initial.size()) {
        throw PreconditionError("remove_late_coflows: prerejected list must align with the order");
    }
    std::vector<double> load(static_cast<std::size_t>(instance.fabric().num_ports()), 0.0);
    SigmaOrder out;
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const std::size_t idx = instance.index_of(initial[i]);
        if (prerejected[i] != 0) {
            double estimate = 0.0;
            for (PortId l : instance.ports_used(idx)) {
                estimate = std::max(estimate, load[static_cast<std::size_t>(l - 1)] + instance.p(idx, l));
            }
            if (estimate > instance.at(idx).deadline + kTolerance) continue;
        }
        for (PortId l : instance.ports_used(idx)) {
            load[static_cast<std::size_t>(l - 1)] += instance.p(idx, l);
        }
        out.order.push_back(initial[i]);
    }
    out.accepted = out.order;
    std::sort(out.accepted.begin(), out.accepted.end());
    out.initial = std::move(initial);
    out.prerejected = std::move(prerejected);
    return out;
}

namespace {

std::vector<std::size_t> edd_indices(const Instance& instance) {
    std::vector<std::size_t> order(instance.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Coflow& x = instance.at(a);
        const Coflow& y = instance.at(b);
        if (x.deadline != y.deadline) return x.deadline < y.deadline;
        return x.id < y.id;
    });
    return order;
}

// Every coflow of `order` meets its deadline under the eval_cct estimate.
bool all_on_time(const Instance& instance, std::span<const std::size_t> order) {
    std::vector<double> load(static_cast<std::size_t>(instance.fabric().num_ports()), 0.0);
    for (std::size_t idx : order) {
        double estimate = 0.0;
        for (PortId l : instance.ports_used(idx)) {
            auto& slot = load[static_cast<std::size_t>(l - 1)];
            slot += instance.p(idx, l);
            estimate = std::max(estimate, slot);
        }
        if (estimate > instance.at(idx).deadline + kTolerance) return false;
    }
    return true;
}

}  // namespace

SigmaOrder cs_mha(const Instance& instance) {
    const std::size_t n = instance.size();
    const int ports = instance.fabric().num_ports();

    std::vector<bool> admitted(n, true);
    for (PortId l = 1; l <= ports; ++l) {
        std::vector<singlemachine::Job> jobs;
        for (std::size_t idx = 0; idx < n; ++idx) {
            const double p = instance.p(idx, l);
            if (p > 0.0) jobs.push_back({static_cast<int>(idx), p, instance.at(idx).deadline, 1});
        }
        if (jobs.empty()) continue;
        const auto kept = singlemachine::moore_hodgson(jobs);
        for (const auto& job : jobs) {
            if (std::find(kept.begin(), kept.end(), job.job_id) == kept.end()) {
                admitted[static_cast<std::size_t>(job.job_id)] = false;
            }
        }
    }

    const std::vector<std::size_t> edd = edd_indices(instance);
    auto edd_rank = std::vector<std::size_t>(n);
    for (std::size_t r = 0; r < n; ++r) edd_rank[edd[r]] = r;

    SigmaOrder out;
    std::vector<std::size_t> order;
    std::vector<std::size_t> second_round;
    for (std::size_t idx : edd) {
        out.initial.push_back(instance.at(idx).id);
        out.prerejected.push_back(admitted[idx] ? 0 : instance.at(idx).id);
        (admitted[idx] ? order : second_round).push_back(idx);
    }

    // Smallest bottleneck volume per unit of deadline goes first.
    auto urgency = [&](std::size_t idx) {
        const auto p = instance.ptimes(idx);
        const PortId own = argmax_port(p);
        return p[static_cast<std::size_t>(own - 1)] * instance.fabric().capacity(own) / instance.at(idx).deadline;
    };
    std::stable_sort(second_round.begin(), second_round.end(), [&](std::size_t a, std::size_t b) {
        const double ua = urgency(a);
        const double ub = urgency(b);
        if (ua != ub) return ua < ub;
        return instance.at(a).id < instance.at(b).id;
    });
    for (std::size_t idx : second_round) {
        std::vector<std::size_t> trial = order;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), idx,
                                      [&](std::size_t a, std::size_t b) { return edd_rank[a] < edd_rank[b]; }),
                     idx);
        if (all_on_time(instance, trial)) order = std::move(trial);
    }

    out.order = to_ids(instance, order);
    out.accepted = out.order;
    std::sort(out.accepted.begin(), out.accepted.end());
    return out;
}

SigmaOrder edd_order(const Instance& instance) {
    std::vector<CoflowId> initial = to_ids(instance, edd_indices(instance));
    std::vector<CoflowId> prerejected = initial;
    return remove_late_coflows(instance, std::move(initial), std::move(prerejected));
}

}  // namespace dcoflow::sched

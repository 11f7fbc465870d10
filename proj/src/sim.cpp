#include "dcoflow/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "dcoflow/errors.hpp"
#include "dcoflow/format.hpp"

namespace dcoflow::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool meets(double cct, double deadline) { return cct <= deadline + kTolerance; }

}  // namespace

std::optional<double> RunMetrics::car_of_class(int class_id) const {
    auto it = class_car.find(class_id);
    if (it == class_car.end()) return std::nullopt;
    return it->second;
}

RunMetrics summarize(std::vector<CoflowOutcome> outcomes) {
    RunMetrics m;
    m.n = outcomes.size();
    double total_weight = 0.0;
    double won_weight = 0.0;
    std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // class -> (count, on time)
    for (const CoflowOutcome& o : outcomes) {
        total_weight += o.weight;
        auto& [count, hit] = per_class[o.class_id];
        ++count;
        if (o.on_time) {
            ++m.accepted;
            ++hit;
            won_weight += o.weight;
        }
        if (o.predicted) {
            ++m.predicted;
            if (o.on_time) ++m.realized;
        }
    }
    if (m.n > 0) m.car = static_cast<double>(m.accepted) / static_cast<double>(m.n);
    m.wcar = total_weight > 0.0 ? won_weight / total_weight : m.car;
    for (const auto& [cls, counts] : per_class) {
        m.class_car[cls] = static_cast<double>(counts.second) / static_cast<double>(counts.first);
    }
    if (m.predicted > 0) {
        m.prediction_error =
            static_cast<double>(m.predicted - m.realized) / static_cast<double>(m.predicted);
    }
    m.outcomes = std::move(outcomes);
    return m;
}

RunMetrics compute_metrics(const Instance& instance, const sched::SigmaOrder& sigma,
                           const alloc::AllocationTimeline& timeline) {
    std::unordered_map<CoflowId, double> cct;
    for (const auto& [id, c] : timeline.ccts) cct.emplace(id, c);
    std::vector<CoflowOutcome> outcomes;
    outcomes.reserve(instance.size());
    for (const Coflow& cf : instance.coflows()) {
        CoflowOutcome o{cf.id, cf.class_id, cf.weight, cf.release, cf.deadline, sigma.admits(cf.id), std::nullopt,
                        false};
        if (o.predicted) {
            auto it = cct.find(cf.id);
            if (it == cct.end()) {
                throw PreconditionError("timeline lacks admitted coflow " + std::to_string(cf.id));
            }
            o.cct = it->second;
            o.on_time = meets(it->second, cf.deadline);
        }
        outcomes.push_back(o);
    }
    return summarize(std::move(outcomes));
}

OfflineResult run_offline_detailed(const Instance& instance, const sched::SchedulerConfig& config,
                                   const alloc::AllocOptions& options) {
    for (const Coflow& cf : instance.coflows()) {
        if (cf.release != 0.0) {
            throw PreconditionError("offline run needs zero releases; coflow " + std::to_string(cf.id) +
                                    " is released at " + format_number(cf.release));
        }
    }
    OfflineResult result;
    result.sigma = sched::build_sigma(instance, config);
    result.timeline = alloc::greedy_allocate(instance, result.sigma.order, 0.0, options);
    result.metrics = compute_metrics(instance, result.sigma, result.timeline);
    return result;
}

RunMetrics run_offline(const Instance& instance, const sched::SchedulerConfig& config) {
    return run_offline_detailed(instance, config).metrics;
}

double OnlineConfig::f() const noexcept { return mode == UpdateMode::on_arrival ? kInf : frequency; }

void OnlineConfig::validate() const {
    if (mode == UpdateMode::periodic && (!(frequency > 0.0) || !std::isfinite(frequency))) {
        throw ConfigError("update frequency must be finite and > 0 in periodic mode");
    }
    if (horizon_time && !(*horizon_time >= 0.0)) throw ConfigError("horizon time must be >= 0");
    scheduler.validate();
}

namespace {

enum class Status { pending, live, done, expired };

class OnlineLoop {
public:
    OnlineLoop(Instance instance, const OnlineConfig& config)
        : inst_(std::move(instance)), cfg_(config), status_(inst_.size(), Status::pending),
          predicted_(inst_.size(), false), cct_(inst_.size()), left_(inst_.size(), 0) {
        rem_.resize(inst_.size());
        for (std::size_t ci = 0; ci < inst_.size(); ++ci) {
            for (const Flow& f : inst_.at(ci).flows) rem_[ci].push_back(f.volume);
            left_[ci] = inst_.at(ci).flows.size();
        }
    }

    RunMetrics run(OnlineStats* stats) {
        double now = 0.0;
        while (true) {
            const double update = next_update(now);
            if (update == kInf && walk_.empty()) break;
            if (update <= now) {
                do_update(now);
                continue;
            }
            if (walk_.empty()) {
                now = update;
                continue;
            }
            now = advance(now, update);
        }
        for (std::size_t ci : live_) {
            if (status_[ci] == Status::live) status_[ci] = Status::expired;
        }
        if (stats) *stats = stats_;

        std::vector<CoflowOutcome> outcomes;
        outcomes.reserve(inst_.size());
        for (std::size_t ci = 0; ci < inst_.size(); ++ci) {
            const Coflow& cf = inst_.at(ci);
            CoflowOutcome o{cf.id, cf.class_id, cf.weight, cf.release, cf.deadline, predicted_[ci], cct_[ci], false};
            o.on_time = cct_[ci] && meets(*cct_[ci], cf.deadline);
            outcomes.push_back(o);
        }
        return summarize(std::move(outcomes));
    }

private:
    bool idle() const { return live_.empty() && walk_.empty(); }

    double next_update(double now) {
        const bool arrivals_left = next_arrival_ < inst_.size();
        if (cfg_.mode == UpdateMode::on_arrival) {
            return arrivals_left ? std::max(now, inst_.at(next_arrival_).release) : kInf;
        }
        if (idle()) {
            if (!arrivals_left) return kInf;
            // first tick at or after the next release
            const double r = inst_.at(next_arrival_).release;
            auto k = static_cast<std::uint64_t>(std::max(0.0, std::ceil(r * cfg_.frequency)));
            while (k > 0 && static_cast<double>(k - 1) / cfg_.frequency >= r) --k;
            while (static_cast<double>(k) / cfg_.frequency < r) ++k;
            tick_ = std::max(tick_, k);
        }
        if (live_.empty() && !arrivals_left) return kInf;
        while (tick_time() < now) ++tick_;
        return tick_time();
    }

    double tick_time() const { return static_cast<double>(tick_) / cfg_.frequency; }

    void do_update(double now) {
        ++stats_.updates;
        if (cfg_.mode == UpdateMode::periodic) ++tick_;
        while (next_arrival_ < inst_.size() && inst_.at(next_arrival_).release <= now) {
            status_[next_arrival_] = Status::live;
            live_.push_back(next_arrival_++);
        }
        std::vector<std::size_t> still;
        for (std::size_t ci : live_) {
            if (status_[ci] != Status::live) continue;
            if (inst_.at(ci).deadline - now <= kTolerance) {
                status_[ci] = Status::expired;
                continue;
            }
            still.push_back(ci);
        }
        live_ = std::move(still);
        walk_.clear();
        stats_.max_live = std::max(stats_.max_live, live_.size());
        if (live_.empty()) return;

        std::vector<Coflow> sub;
        std::vector<std::vector<std::size_t>> sub_flows;  // per sub coflow: global flow indices
        sub.reserve(live_.size());
        for (std::size_t ci : live_) {
            const Coflow& cf = inst_.at(ci);
            Coflow c{cf.id, {}, cf.deadline - now, cf.weight, 0.0, cf.class_id};
            std::vector<std::size_t> map;
            for (std::size_t fi = 0; fi < cf.flows.size(); ++fi) {
                if (rem_[ci][fi] <= 0.0) continue;
                const Flow& f = cf.flows[fi];
                c.flows.push_back({f.flow_id, f.ingress, f.egress, rem_[ci][fi]});
                map.push_back(fi);
            }
            sub.push_back(std::move(c));
            sub_flows.push_back(std::move(map));
        }
        const Instance sub_instance(inst_.fabric(), std::move(sub));
        const sched::SigmaOrder sigma = sched::build_sigma(sub_instance, cfg_.scheduler);
        for (std::size_t s = 0; s < live_.size(); ++s) {
            predicted_[live_[s]] = sigma.admits(inst_.at(live_[s]).id);
        }
        for (const auto& [s, sf] : alloc::priority_walk(sub_instance, sigma.order, alloc::FlowOrder::largest_remaining_first)) {
            walk_.push_back({live_[s], sub_flows[s][sf]});
        }
    }

    // Runs the current allocation from `now` until `until` or until the walk drains.
    double advance(double now, double until) {
        std::vector<alloc::PortPair> ports;
        while (!walk_.empty() && now < until) {
            ports.clear();
            double expiry = kInf;
            for (const auto& [ci, fi] : walk_) {
                const Flow& f = inst_.at(ci).flows[fi];
                ports.push_back({f.ingress, f.egress});
                expiry = std::min(expiry, inst_.at(ci).deadline + kTolerance);
            }
            const std::vector<double> rates = alloc::greedy_grants(inst_.fabric(), ports);
            double step = std::min(until, expiry) - now;
            for (std::size_t i = 0; i < walk_.size(); ++i) {
                if (rates[i] > 0.0) step = std::min(step, rem_[walk_[i].first][walk_[i].second] / rates[i]);
            }
            step = std::max(step, 0.0);
            const double next = now + step;
            const double slack = 1e-12 * std::max(1.0, std::abs(next));

            std::vector<std::pair<std::size_t, std::size_t>> kept;
            kept.reserve(walk_.size());
            for (std::size_t i = 0; i < walk_.size(); ++i) {
                const auto [ci, fi] = walk_[i];
                double& r = rem_[ci][fi];
                if (rates[i] > 0.0) {
                    if (now + r / rates[i] <= next + slack) {
                        r = 0.0;
                        if (--left_[ci] == 0) {
                            status_[ci] = Status::done;
                            cct_[ci] = next;
                        }
                        continue;
                    }
                    r = std::max(0.0, r - rates[i] * step);
                }
                kept.push_back(walk_[i]);
            }
            walk_.clear();
            for (const auto& entry : kept) {
                const std::size_t ci = entry.first;
                if (status_[ci] == Status::live && inst_.at(ci).deadline + kTolerance <= next) {
                    status_[ci] = Status::expired;
                }
                if (status_[ci] == Status::live) walk_.push_back(entry);
            }
            if (std::any_of(live_.begin(), live_.end(), [&](std::size_t ci) { return status_[ci] != Status::live; })) {
                std::erase_if(live_, [&](std::size_t ci) { return status_[ci] != Status::live; });
            }
            now = next;
        }
        return now;
    }

    Instance inst_;
    OnlineConfig cfg_;
    std::vector<Status> status_;
    std::vector<bool> predicted_;
    std::vector<std::optional<double>> cct_;
    std::vector<std::size_t> left_;
    std::vector<std::vector<double>> rem_;
    std::vector<std::size_t> live_;
    std::vector<std::pair<std::size_t, std::size_t>> walk_;  // (coflow, flow) in priority order
    std::size_t next_arrival_ = 0;
    std::uint64_t tick_ = 0;
    OnlineStats stats_;
};

}  // namespace

RunMetrics run_online(const Fabric& fabric, std::span<const Coflow> arrivals, const OnlineConfig& config,
                      OnlineStats* stats) {
    config.validate();
    for (std::size_t i = 1; i < arrivals.size(); ++i) {
        if (arrivals[i].release < arrivals[i - 1].release) {
            throw PreconditionError("arrival stream is not sorted by release time");
        }
    }
    std::vector<Coflow> kept;
    for (const Coflow& cf : arrivals) {
        if (config.horizon_count && kept.size() >= *config.horizon_count) break;
        if (config.horizon_time && cf.release > *config.horizon_time) break;
        if (cf.release < 0.0) throw InputError("coflow " + std::to_string(cf.id) + " has a negative release");
        kept.push_back(cf);
    }
    OnlineLoop loop(Instance(fabric, std::move(kept)), config);
    return loop.run(stats);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

std::string csv_line(const CsvRow& row) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    const RunMetrics& m = row.metrics;
    std::ostringstream out;
    out << row.instance_id << ',' << row.scheduler << ',' << row.seed << ',' << row.machines << ',' << m.n << ','
        << opt(row.lambda) << ',' << opt(row.f) << ',' << format_number(m.car) << ',' << format_number(m.wcar) << ','
        << opt(m.car_of_class(1)) << ',' << opt(m.car_of_class(2)) << ',' << format_number(m.prediction_error) << ','
        << m.accepted << ',' << format_number(row.runtime_ms);
    return out.str();
}

void write_csv_row(std::ostream& out, const CsvRow& row) { out << csv_line(row) << '\n'; }

}  // namespace dcoflow::sim

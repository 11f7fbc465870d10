#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcoflow/alloc.hpp"
#include "dcoflow/model.hpp"
#include "dcoflow/sched.hpp"

namespace dcoflow::sim {

struct CoflowOutcome {
    CoflowId id = 0;
    int class_id = 1;
    double weight = 1.0;
    double release = 0.0;
    double deadline = 0.0;          // absolute
    bool predicted = false;         // admitted by the scheduler (last decision taken on it)
    std::optional<double> cct;      // absolute completion time; empty when never completed
    bool on_time = false;           // z_k
};

struct RunMetrics {
    std::size_t n = 0;
    std::size_t accepted = 0;  // sum of z_k
    double car = 1.0;
    double wcar = 1.0;
    std::map<int, double> class_car;  // only classes with at least one coflow
    std::size_t predicted = 0;        // |sigma|
    std::size_t realized = 0;         // |sigma hat|
    double prediction_error = 0.0;
    std::vector<CoflowOutcome> outcomes;  // instance order

    std::optional<double> car_of_class(int class_id) const;
};

// Metrics from per-coflow outcomes. Empty input gives CAR = WCAR = 1.
// WCAR falls back to CAR when every weight is zero.
RunMetrics summarize(std::vector<CoflowOutcome> outcomes);

// z_k = 1 iff k is in sigma.order and its CCT in `timeline` is within T_k.
RunMetrics compute_metrics(const Instance& instance, const sched::SigmaOrder& sigma,
                           const alloc::AllocationTimeline& timeline);

struct OfflineResult {
    sched::SigmaOrder sigma;
    alloc::AllocationTimeline timeline;
    RunMetrics metrics;
};

// All coflows released at 0: schedule, allocate the admitted ones, score.
// PreconditionError when some release is nonzero.
OfflineResult run_offline_detailed(const Instance& instance, const sched::SchedulerConfig& config,
                                   const alloc::AllocOptions& options = {});
RunMetrics run_offline(const Instance& instance, const sched::SchedulerConfig& config);

enum class UpdateMode { on_arrival, periodic };

struct OnlineConfig {
    UpdateMode mode = UpdateMode::on_arrival;
    double frequency = 1.0;  // updates per unit time, periodic mode only
    std::optional<double> horizon_time;        // only arrivals with release <= horizon
    std::optional<std::size_t> horizon_count;  // only the first arrivals
    sched::SchedulerConfig scheduler;

    // +inf in on-arrival mode.
    double f() const noexcept;
    void validate() const;
};

struct OnlineStats {
    std::size_t updates = 0;
    std::size_t max_live = 0;
};

// Event loop over arrivals, update instants, flow completions and deadline
// expiries. At every update the live coflows (admitted and unfinished,
// rejected but unexpired, newly arrived) are rescheduled on their remaining
// volumes with deadlines T_k - now, and the greedy allocation restarts.
// PreconditionError when arrivals are not sorted by release.
RunMetrics run_online(const Fabric& fabric, std::span<const Coflow> arrivals, const OnlineConfig& config,
                      OnlineStats* stats = nullptr);

inline constexpr std::string_view kCsvHeader =
    "instance_id,scheduler,seed,M,N,lambda,f,CAR,WCAR,car_class1,car_class2,pred_error,accepted,runtime_ms";

struct CsvRow {
    std::string instance_id;
    std::string scheduler;
    std::uint64_t seed = 0;
    int machines = 0;
    std::optional<double> lambda;
    std::optional<double> f;
    RunMetrics metrics;
    double runtime_ms = 0.0;
};

void write_csv_header(std::ostream& out);
// Absent values print as empty fields; numbers use format_number.
void write_csv_row(std::ostream& out, const CsvRow& row);
std::string csv_line(const CsvRow& row);

}  // namespace dcoflow::sim

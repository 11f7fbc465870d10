#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dcoflow::singlemachine {

// A non-preemptive job on one machine, all released at time 0.
struct Job {
    int job_id = 0;
    double processing_time = 0.0;
    double deadline = 0.0;
    std::int64_t weight = 1;
};

struct LateJobsResult {
    std::int64_t max_weight = 0;
    std::vector<int> accepted;  // EDD order
};

// DP table of the weighted late-jobs recursion over jobs in EDD order.
// min_time[j][w]: least total processing time of an on-time subset of the
// first j jobs with weight exactly w (+inf when none exists).
struct DpTable {
    std::vector<Job> jobs;  // EDD order
    std::vector<std::vector<double>> min_time;
    std::vector<std::vector<bool>> taken;

    std::int64_t total_weight() const noexcept {
        return min_time.empty() ? 0 : static_cast<std::int64_t>(min_time.front().size()) - 1;
    }
};

// EDD order: deadline, then processing time, then id.
std::vector<Job> edd_sorted(std::span<const Job> jobs);

// True when the jobs, sequenced in EDD order, all meet their deadlines.
bool edd_feasible(std::span<const Job> jobs);

// Moore-Hodgson: maximum number of on-time jobs. Returns accepted ids in EDD order.
std::vector<int> moore_hodgson(std::span<const Job> jobs);

// Fills the pseudo-polynomial table in O(n W). Throws InputError for weights < 1.
DpTable build_dp_table(std::span<const Job> jobs);

// Maximum-weight on-time subset via the DP and backtracking.
LateJobsResult dp_weighted_late(std::span<const Job> jobs);

// Exhaustive oracle over all 2^n subsets (n <= 20, SizeError beyond).
// Ties: lexicographically smallest sorted id set.
LateJobsResult brute_force_late(std::span<const Job> jobs);

inline constexpr std::size_t kBruteForceLimit = 20;

}  // namespace dcoflow::singlemachine

#include "dcoflow/singlemachine.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "dcoflow/errors.hpp"
#include "dcoflow/model.hpp"

namespace dcoflow::singlemachine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<Job> edd_sorted(std::span<const Job> jobs) {
    std::vector<Job> out(jobs.begin(), jobs.end());
    std::sort(out.begin(), out.end(), [](const Job& a, const Job& b) {
        if (a.deadline != b.deadline) return a.deadline < b.deadline;
        if (a.processing_time != b.processing_time) return a.processing_time < b.processing_time;
        return a.job_id < b.job_id;
    });
    return out;
}

bool edd_feasible(std::span<const Job> jobs) {
    double clock = 0.0;
    for (const Job& job : edd_sorted(jobs)) {
        clock += job.processing_time;
        if (clock > job.deadline + kTolerance) {
            return false;
        }
    }
    return true;
}

std::vector<int> moore_hodgson(std::span<const Job> jobs) {
    const std::vector<Job> order = edd_sorted(jobs);
    std::vector<bool> kept(order.size(), false);
    double clock = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        kept[i] = true;
        clock += order[i].processing_time;
        if (clock > order[i].deadline + kTolerance) {
            // Evict the longest kept job; ties evict the smaller id.
            std::size_t victim = i;
            for (std::size_t j = 0; j <= i; ++j) {
                if (!kept[j]) continue;
                const Job& a = order[j];
                const Job& b = order[victim];
                if (a.processing_time > b.processing_time ||
                    (a.processing_time == b.processing_time && a.job_id < b.job_id)) {
                    victim = j;
                }
            }
            kept[victim] = false;
            clock -= order[victim].processing_time;
        }
    }
    std::vector<int> accepted;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (kept[i]) accepted.push_back(order[i].job_id);
    }
    return accepted;
}

DpTable build_dp_table(std::span<const Job> jobs) {
    DpTable table;
    table.jobs = edd_sorted(jobs);
    std::int64_t total = 0;
    for (const Job& job : table.jobs) {
        if (job.weight < 1) {
            throw InputError("job " + std::to_string(job.job_id) + ": weights must be integers >= 1");
        }
        total += job.weight;
    }
    const std::size_t n = table.jobs.size();
    const auto width = static_cast<std::size_t>(total) + 1;
    table.min_time.assign(n + 1, std::vector<double>(width, kInf));
    table.taken.assign(n + 1, std::vector<bool>(width, false));
    table.min_time[0][0] = 0.0;

    for (std::size_t j = 1; j <= n; ++j) {
        const Job& job = table.jobs[j - 1];
        const auto wj = static_cast<std::size_t>(job.weight);
        const auto& prev = table.min_time[j - 1];
        auto& row = table.min_time[j];
        auto& take = table.taken[j];
        for (std::size_t w = 0; w < width; ++w) {
            row[w] = prev[w];
            if (w < wj || prev[w - wj] == kInf) continue;
            const double with_job = prev[w - wj] + job.processing_time;
            // Strict improvement only: equal times keep the job out.
            if (with_job <= job.deadline + kTolerance && with_job < row[w]) {
                row[w] = with_job;
                take[w] = true;
            }
        }
    }
    return table;
}

LateJobsResult dp_weighted_late(std::span<const Job> jobs) {
    const DpTable table = build_dp_table(jobs);
    const std::size_t n = table.jobs.size();
    LateJobsResult result;
    const auto& last = table.min_time[n];
    for (std::size_t w = last.size(); w-- > 0;) {
        if (last[w] != kInf) {
            result.max_weight = static_cast<std::int64_t>(w);
            break;
        }
    }
    auto w = static_cast<std::size_t>(result.max_weight);
    for (std::size_t j = n; j >= 1; --j) {
        if (table.taken[j][w]) {
            result.accepted.push_back(table.jobs[j - 1].job_id);
            w -= static_cast<std::size_t>(table.jobs[j - 1].weight);
        }
    }
    std::reverse(result.accepted.begin(), result.accepted.end());
    return result;
}

LateJobsResult brute_force_late(std::span<const Job> jobs) {
    if (jobs.size() > kBruteForceLimit) {
        throw SizeError("brute_force_late handles at most " + std::to_string(kBruteForceLimit) + " jobs, got " +
                        std::to_string(jobs.size()));
    }
    const std::vector<Job> order = edd_sorted(jobs);
    const std::size_t n = order.size();
    LateJobsResult best;
    std::vector<int> best_ids;
    bool have_best = false;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double clock = 0.0;
        std::int64_t weight = 0;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (!(mask & (1u << i))) continue;
            clock += order[i].processing_time;
            weight += order[i].weight;
            ok = clock <= order[i].deadline + kTolerance;
        }
        if (!ok) continue;
        std::vector<int> ids;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) ids.push_back(order[i].job_id);
        }
        std::vector<int> sorted_ids = ids;
        std::sort(sorted_ids.begin(), sorted_ids.end());
        if (!have_best || weight > best.max_weight || (weight == best.max_weight && sorted_ids < best_ids)) {
            have_best = true;
            best.max_weight = weight;
            best.accepted = std::move(ids);
            best_ids = std::move(sorted_ids);
        }
    }
    return best;
}

}  // namespace dcoflow::singlemachine

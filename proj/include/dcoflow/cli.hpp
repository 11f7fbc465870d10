#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcoflow/sched.hpp"
#include "dcoflow/workload.hpp"

namespace dcoflow::cli {

enum class Source { synthetic, trace, instance, motivating, generalized };

struct ExperimentConfig {
    Source source = Source::synthetic;
    workload::SyntheticConfig synthetic;  // seed is overwritten per run
    std::filesystem::path trace_path;
    std::filesystem::path instance_path;
    double epsilon = 0.1;  // motivating / generalized examples

    workload::ArrivalConfig arrival;
    std::optional<double> update_frequency;  // empty: update on every arrival
    std::optional<double> horizon_time;

    std::vector<sched::Variant> schedulers{sched::Variant::wdcoflow};
    double gamma = 0.9;
    std::int64_t weight_scale = 1;
    std::vector<std::uint64_t> seeds{1};
    std::optional<std::filesystem::path> out;
    unsigned threads = 0;  // 0: hardware concurrency
    bool timing = true;

    void validate() const;
};

// Parses an experiment config document. Relative paths resolve against `base`.
// Throws ConfigError on unknown keys or bad values.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base = {});
nlohmann::json to_json(const ExperimentConfig& config);

// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string digest(const ExperimentConfig& config);

// Entry point. Exit codes: 0 success, 2 configuration error, 3 runtime error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dcoflow::cli

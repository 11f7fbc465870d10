#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dcoflow/model.hpp"
#include "dcoflow/sched.hpp"
#include "dcoflow/sim.hpp"

namespace dcoflow::io {

using nlohmann::json;

// {fabric:{machines, capacity}, coflows:[{id, deadline, weight, class, release,
// flows:[{src, dst, volume}]}]}. capacity is a number when every port shares
// it, otherwise an array of 2M numbers. Flow ids are positions, from 1.
json instance_to_json(const Instance& instance);

// Unknown keys, missing required fields and wrong types raise ParseError;
// model violations raise InputError. weight, class and release are optional.
Instance instance_from_json(const json& doc);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

// {order, accepted, prerejected}; prerejected lists the nonzero entries.
json sigma_to_json(const sched::SigmaOrder& sigma);

json metrics_to_json(const sim::RunMetrics& metrics);

}  // namespace dcoflow::io

#include "dcoflow/io.hpp"

#include <fstream>
#include <set>

#include "dcoflow/errors.hpp"

namespace dcoflow::io {

namespace {

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ParseError(std::string(where) + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.contains(key)) throw ParseError(std::string(where) + ": unknown field '" + key + "'");
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ParseError(what + " must be a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw ParseError(what + " must be an integer");
    return v.get<int>();
}

}  // namespace

json instance_to_json(const Instance& instance) {
    const Fabric& fabric = instance.fabric();
    json doc;
    doc["fabric"]["machines"] = fabric.num_machines;
    if (fabric.uniform_capacity() && !fabric.capacities.empty()) {
        doc["fabric"]["capacity"] = fabric.capacities.front();
    } else {
        doc["fabric"]["capacity"] = fabric.capacities;
    }
    json coflows = json::array();
    for (const Coflow& cf : instance.coflows()) {
        json flows = json::array();
        for (const Flow& f : cf.flows) flows.push_back({{"src", f.ingress}, {"dst", f.egress}, {"volume", f.volume}});
        coflows.push_back({{"id", cf.id},
                           {"deadline", cf.deadline},
                           {"weight", cf.weight},
                           {"class", cf.class_id},
                           {"release", cf.release},
                           {"flows", std::move(flows)}});
    }
    doc["coflows"] = std::move(coflows);
    return doc;
}

Instance instance_from_json(const json& doc) {
    check_keys(doc, "instance", {"fabric", "coflows"});
    const json& fab = require(doc, "fabric", "instance");
    check_keys(fab, "fabric", {"machines", "capacity"});
    Fabric fabric;
    fabric.num_machines = integer(require(fab, "machines", "fabric"), "fabric.machines");
    if (fabric.num_machines < 1) throw InputError("fabric.machines must be >= 1");
    const auto ports = static_cast<std::size_t>(fabric.num_ports());
    if (auto it = fab.find("capacity"); it == fab.end()) {
        fabric.capacities.assign(ports, 1.0);
    } else if (it->is_array()) {
        for (const json& c : *it) fabric.capacities.push_back(number(c, "fabric.capacity entry"));
    } else {
        fabric.capacities.assign(ports, number(*it, "fabric.capacity"));
    }

    const json& list = require(doc, "coflows", "instance");
    if (!list.is_array()) throw ParseError("coflows must be an array");
    std::vector<Coflow> coflows;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const json& c = list[i];
        const std::string where = "coflows[" + std::to_string(i) + "]";
        check_keys(c, where.c_str(), {"id", "deadline", "weight", "class", "release", "flows"});
        Coflow cf;
        cf.id = integer(require(c, "id", where), where + ".id");
        cf.deadline = number(require(c, "deadline", where), where + ".deadline");
        if (c.contains("weight")) cf.weight = number(c["weight"], where + ".weight");
        if (c.contains("class")) cf.class_id = integer(c["class"], where + ".class");
        if (c.contains("release")) cf.release = number(c["release"], where + ".release");
        const json& flows = require(c, "flows", where);
        if (!flows.is_array()) throw ParseError(where + ".flows must be an array");
        for (std::size_t j = 0; j < flows.size(); ++j) {
            const std::string fw = where + ".flows[" + std::to_string(j) + "]";
            check_keys(flows[j], fw.c_str(), {"src", "dst", "volume"});
            cf.flows.push_back({static_cast<int>(j + 1), integer(require(flows[j], "src", fw), fw + ".src"),
                                integer(require(flows[j], "dst", fw), fw + ".dst"),
                                number(require(flows[j], "volume", fw), fw + ".volume")});
        }
        coflows.push_back(std::move(cf));
    }
    return Instance(std::move(fabric), std::move(coflows));
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return instance_from_json(doc);
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << instance_to_json(instance).dump(2) << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

json sigma_to_json(const sched::SigmaOrder& sigma) {
    return {{"order", sigma.order}, {"accepted", sigma.accepted}, {"prerejected", sigma.prerejected_ids()}};
}

json metrics_to_json(const sim::RunMetrics& m) {
    json classes = json::object();
    for (const auto& [cls, car] : m.class_car) classes[std::to_string(cls)] = car;
    json outcomes = json::array();
    for (const sim::CoflowOutcome& o : m.outcomes) {
        outcomes.push_back({{"id", o.id},
                            {"class", o.class_id},
                            {"weight", o.weight},
                            {"deadline", o.deadline},
                            {"predicted", o.predicted},
                            {"cct", o.cct ? json(*o.cct) : json(nullptr)},
                            {"on_time", o.on_time}});
    }
    return {{"N", m.n},
            {"accepted", m.accepted},
            {"CAR", m.car},
            {"WCAR", m.wcar},
            {"class_car", std::move(classes)},
            {"predicted", m.predicted},
            {"realized", m.realized},
            {"pred_error", m.prediction_error},
            {"outcomes", std::move(outcomes)}};
}

}  // namespace dcoflow::io

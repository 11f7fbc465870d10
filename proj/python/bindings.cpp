#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dcoflow/errors.hpp"
#include "dcoflow/exact.hpp"
#include "dcoflow/io.hpp"
#include "dcoflow/sched.hpp"
#include "dcoflow/sim.hpp"
#include "dcoflow/singlemachine.hpp"
#include "dcoflow/workload.hpp"

namespace py = pybind11;
using namespace dcoflow;

namespace {

sched::SchedulerConfig scheduler(const std::string& name, double gamma, std::int64_t weight_scale) {
    return {sched::parse_variant(name), gamma, weight_scale};
}

py::dict metrics_dict(const sim::RunMetrics& m) {
    py::dict d;
    d["N"] = m.n;
    d["accepted"] = m.accepted;
    d["CAR"] = m.car;
    d["WCAR"] = m.wcar;
    d["class_car"] = m.class_car;
    d["predicted"] = m.predicted;
    d["realized"] = m.realized;
    d["pred_error"] = m.prediction_error;
    py::list outcomes;
    for (const auto& o : m.outcomes) {
        py::dict row;
        row["id"] = o.id;
        row["class"] = o.class_id;
        row["weight"] = o.weight;
        row["deadline"] = o.deadline;
        row["predicted"] = o.predicted;
        row["cct"] = o.cct;
        row["on_time"] = o.on_time;
        outcomes.append(row);
    }
    d["outcomes"] = outcomes;
    return d;
}

std::vector<singlemachine::Job> jobs_from(const std::vector<std::tuple<double, double, std::int64_t>>& rows) {
    std::vector<singlemachine::Job> jobs;
    int id = 1;
    for (const auto& [p, t, w] : rows) jobs.push_back({id++, p, t, w});
    return jobs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deadline-aware coflow scheduling core";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<LookupError>(m, "LookupError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<SizeError>(m, "SizeError", base.ptr());

    py::class_<Instance>(m, "Instance")
        .def_static(
            "from_json", [](const std::string& text) { return io::instance_from_json(io::json::parse(text)); },
            py::arg("text"))
        .def("to_json", [](const Instance& i) { return io::instance_to_json(i).dump(); })
        .def_property_readonly("machines", [](const Instance& i) { return i.fabric().num_machines; })
        .def_property_readonly("ids", &Instance::ids)
        .def("__len__", &Instance::size)
        .def(
            "processing_time", [](const Instance& i, PortId l, CoflowId k) { return processing_time(i, l, k); },
            py::arg("port"), py::arg("coflow"))
        .def(
            "isolation_cct", [](const Instance& i, CoflowId k) { return isolation_cct(i, k); }, py::arg("coflow"));

    m.def("motivating_example", &workload::motivating_example, py::arg("epsilon") = 0.1);
    m.def("generalized_example", &workload::generalized_example, py::arg("machines"), py::arg("epsilon") = 0.1);
    m.def(
        "gen_synthetic",
        [](int machines, int coflows, std::uint64_t seed, std::pair<double, double> alpha, double class2_prob,
           double class2_weight) {
            workload::SyntheticConfig cfg;
            cfg.machines = machines;
            cfg.coflows = coflows;
            cfg.seed = seed;
            cfg.alpha_range = alpha;
            cfg.class2_prob = class2_prob;
            cfg.class2_weight = class2_weight;
            return workload::gen_synthetic(cfg);
        },
        py::arg("machines") = 10, py::arg("coflows") = 60, py::arg("seed") = 1,
        py::arg("alpha") = std::pair{2.0, 4.0}, py::arg("class2_prob") = 0.0, py::arg("class2_weight") = 1.0);

    m.def("schedulers", [] {
        std::vector<std::string> names;
        for (auto v : sched::all_variants()) names.emplace_back(sched::to_string(v));
        return names;
    });
    m.def(
        "build_sigma",
        [](const Instance& inst, const std::string& name, double gamma, std::int64_t weight_scale) {
            const auto s = sched::build_sigma(inst, scheduler(name, gamma, weight_scale));
            py::dict d;
            d["order"] = s.order;
            d["accepted"] = s.accepted;
            d["prerejected"] = s.prerejected_ids();
            return d;
        },
        py::arg("instance"), py::arg("scheduler") = "wdcoflow", py::arg("gamma") = 0.9, py::arg("weight_scale") = 1);
    m.def(
        "run_offline",
        [](const Instance& inst, const std::string& name, double gamma, std::int64_t weight_scale) {
            return metrics_dict(sim::run_offline(inst, scheduler(name, gamma, weight_scale)));
        },
        py::arg("instance"), py::arg("scheduler") = "wdcoflow", py::arg("gamma") = 0.9, py::arg("weight_scale") = 1);
    m.def(
        "run_online_synthetic",
        [](int machines, double lambda, int total_coflows, std::uint64_t seed, const std::string& name,
           std::optional<double> frequency) {
            workload::SyntheticConfig syn;
            syn.machines = machines;
            syn.seed = seed;
            workload::ArrivalConfig arr;
            arr.lambda = lambda;
            arr.total_coflows = total_coflows;
            sim::OnlineConfig oc;
            oc.scheduler = scheduler(name, 0.9, 1);
            if (frequency) {
                oc.mode = sim::UpdateMode::periodic;
                oc.frequency = *frequency;
            }
            py::gil_scoped_release release;
            const auto stream = workload::gen_arrivals(syn, arr);
            auto metrics = sim::run_online(Fabric::uniform(machines), stream, oc);
            py::gil_scoped_acquire acquire;
            return metrics_dict(metrics);
        },
        py::arg("machines") = 10, py::arg("lambda_") = 8.0, py::arg("total_coflows") = 4000, py::arg("seed") = 1,
        py::arg("scheduler") = "wdcoflow", py::arg("frequency") = py::none());

    m.def(
        "brute_force_sigma_wcar",
        [](const Instance& inst) {
            const auto r = exact::brute_force_sigma_wcar(inst);
            py::dict d;
            d["opt_weight"] = r.opt_weight;
            d["accepted"] = r.accepted;
            d["order"] = r.order;
            return d;
        },
        py::arg("instance"));
    m.def(
        "export_lp",
        [](const Instance& inst) {
            std::ostringstream out;
            exact::write_lp(exact::build_ilp(inst), out);
            return out.str();
        },
        py::arg("instance"));

    m.def(
        "dp_weighted_late",
        [](const std::vector<std::tuple<double, double, std::int64_t>>& jobs) {
            const auto r = singlemachine::dp_weighted_late(jobs_from(jobs));
            return std::pair{r.max_weight, r.accepted};
        },
        py::arg("jobs"), "Jobs are (processing_time, deadline, weight); ids are 1-based positions.");
    m.def(
        "moore_hodgson",
        [](const std::vector<std::tuple<double, double, std::int64_t>>& jobs) {
            return singlemachine::moore_hodgson(jobs_from(jobs));
        },
        py::arg("jobs"));

    m.attr("CSV_HEADER") = std::string(sim::kCsvHeader);
}

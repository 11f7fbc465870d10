#include "dcoflow/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "dcoflow/errors.hpp"

namespace dcoflow::workload {

namespace {

using Rng = std::mt19937_64;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double uniform(Rng& rng, double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double isolation_time(const Fabric& fabric, const std::vector<Flow>& flows) {
    std::vector<double> load(static_cast<std::size_t>(fabric.num_ports()), 0.0);
    for (const Flow& f : flows) {
        load[static_cast<std::size_t>(f.ingress - 1)] += f.volume;
        load[static_cast<std::size_t>(f.egress - 1)] += f.volume;
    }
    double best = 0.0;
    for (std::size_t l = 0; l < load.size(); ++l) best = std::max(best, load[l] / fabric.capacities[l]);
    return best;
}

// Deadline, weight and class draws shared by synthetic and trace workloads.
void assign_deadline_and_class(Rng& rng, const Fabric& fabric, Range alpha_range, double class2_prob,
                               double class2_weight, Coflow& cf) {
    const double cct0 = isolation_time(fabric, cf.flows);
    const double alpha = uniform(rng, alpha_range.first, alpha_range.second);
    cf.deadline = cf.release + uniform(rng, cct0, alpha * cct0);
    const bool class2 = std::bernoulli_distribution(class2_prob)(rng);
    cf.class_id = class2 ? 2 : 1;
    cf.weight = class2 ? class2_weight : 1.0;
}

Coflow draw_coflow(Rng& rng, const SyntheticConfig& cfg, const Fabric& fabric, CoflowId id, double release) {
    const int m = cfg.machines;
    Coflow cf;
    cf.id = id;
    cf.release = release;
    const bool type2 = std::bernoulli_distribution(cfg.type2_prob)(rng);
    if (!type2) {
        const double v = uniform(rng, cfg.volume_range.first, cfg.volume_range.second);
        cf.flows.push_back({1, uniform_int(rng, 1, m), m + uniform_int(rng, 1, m), v});
    } else {
        const int width = uniform_int(rng, (2 * m + 2) / 3, m);
        std::vector<int> ingress(static_cast<std::size_t>(m));
        std::iota(ingress.begin(), ingress.end(), 1);
        std::shuffle(ingress.begin(), ingress.end(), rng);
        std::vector<int> egress(static_cast<std::size_t>(m));
        std::iota(egress.begin(), egress.end(), m + 1);
        if (cfg.distinct_egress) std::shuffle(egress.begin(), egress.end(), rng);
        for (int j = 0; j < width; ++j) {
            const int dst = cfg.distinct_egress ? egress[static_cast<std::size_t>(j)] : m + uniform_int(rng, 1, m);
            const double v = uniform(rng, cfg.volume_range.first, cfg.volume_range.second);
            cf.flows.push_back({j + 1, ingress[static_cast<std::size_t>(j)], dst, v});
        }
    }
    assign_deadline_and_class(rng, fabric, cfg.alpha_range, cfg.class2_prob, cfg.class2_weight, cf);
    return cf;
}

void validate_alpha(Range alpha) {
    if (!(alpha.first >= 1.0) || !(alpha.second >= alpha.first) || !std::isfinite(alpha.second)) {
        throw ConfigError("alpha range must satisfy 1 <= lo <= hi");
    }
}

void validate_classes(double class2_prob, double class2_weight) {
    if (!is_probability(class2_prob)) throw ConfigError("class2_prob must lie in [0, 1]");
    if (!(class2_weight >= 0.0) || !std::isfinite(class2_weight)) {
        throw ConfigError("class2_weight must be finite and nonnegative");
    }
}

}  // namespace

void SyntheticConfig::validate() const {
    if (machines < 1) throw ConfigError("machines must be >= 1");
    if (coflows < 0) throw ConfigError("coflows must be >= 0");
    validate_alpha(alpha_range);
    if (!is_probability(type2_prob)) throw ConfigError("type2_prob must lie in [0, 1]");
    validate_classes(class2_prob, class2_weight);
    if (!(volume_range.first > 0.0) || !(volume_range.second >= volume_range.first)) {
        throw ConfigError("volume range must satisfy 0 < lo <= hi");
    }
}

void ArrivalConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and > 0");
    if (total_coflows < 0) throw ConfigError("total_coflows must be >= 0");
    if (batch_size_range) {
        const auto [lo, hi] = *batch_size_range;
        if (lo < 1 || hi < lo) throw ConfigError("batch size range must satisfy 1 <= lo <= hi");
    }
}

Instance gen_synthetic(const SyntheticConfig& cfg, const Fabric& fabric) {
    cfg.validate();
    fabric.validate();
    if (fabric.num_machines != cfg.machines) {
        throw ConfigError("fabric has " + std::to_string(fabric.num_machines) + " machines, config expects " +
                          std::to_string(cfg.machines));
    }
    Rng rng(cfg.seed);
    std::vector<Coflow> coflows;
    coflows.reserve(static_cast<std::size_t>(cfg.coflows));
    for (int k = 1; k <= cfg.coflows; ++k) coflows.push_back(draw_coflow(rng, cfg, fabric, k, 0.0));
    return Instance(fabric, std::move(coflows));
}

Instance gen_synthetic(const SyntheticConfig& cfg) {
    if (cfg.machines < 1) throw ConfigError("machines must be >= 1");
    return gen_synthetic(cfg, Fabric::uniform(cfg.machines));
}

std::vector<Coflow> gen_arrivals(const SyntheticConfig& cfg, const ArrivalConfig& arrival) {
    cfg.validate();
    arrival.validate();
    const Fabric fabric = Fabric::uniform(cfg.machines);
    Rng rng(cfg.seed);
    const bool batched = arrival.batch_size_range.has_value();
    std::exponential_distribution<double> gap(batched ? arrival.lambda / 10.0 : arrival.lambda);

    std::vector<Coflow> out;
    out.reserve(static_cast<std::size_t>(arrival.total_coflows));
    double clock = 0.0;
    CoflowId next_id = 1;
    while (static_cast<int>(out.size()) < arrival.total_coflows) {
        clock += gap(rng);
        int batch = 1;
        if (batched) batch = uniform_int(rng, arrival.batch_size_range->first, arrival.batch_size_range->second);
        for (int b = 0; b < batch && static_cast<int>(out.size()) < arrival.total_coflows; ++b) {
            out.push_back(draw_coflow(rng, cfg, fabric, next_id++, clock));
        }
    }
    return out;
}

TraceFile parse_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trace " + path.string());
    return parse_trace(in, path.string());
}

TraceFile parse_trace(std::istream& in, std::string name) {
    TraceFile trace;
    trace.path = std::move(name);
    std::string line;
    int line_no = 0;
    int declared = -1;

    auto next_token = [&](std::istringstream& ss, const char* what) {
        std::string tok;
        if (!(ss >> tok)) throw ParseError(std::string("missing ") + what, line_no);
        return tok;
    };
    auto to_int = [&](const std::string& tok, const char* what) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw ParseError(std::string("bad ") + what + " '" + tok + "'", line_no);
        return v;
    };
    auto to_double = [&](const std::string& tok, const char* what) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || !std::isfinite(v)) {
            throw ParseError(std::string("bad ") + what + " '" + tok + "'", line_no);
        }
        return v;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ss(line);
        if (declared < 0) {
            trace.num_machines = to_int(next_token(ss, "machine count"), "machine count");
            declared = to_int(next_token(ss, "coflow count"), "coflow count");
            if (trace.num_machines < 1 || declared < 0) throw ParseError("bad header", line_no);
        } else {
            TraceRecord rec;
            rec.id = to_int(next_token(ss, "coflow id"), "coflow id");
            rec.arrival_ms = to_double(next_token(ss, "arrival time"), "arrival time");
            const int mappers = to_int(next_token(ss, "mapper count"), "mapper count");
            if (mappers < 0) throw ParseError("negative mapper count", line_no);
            for (int i = 0; i < mappers; ++i) rec.mappers.push_back(to_int(next_token(ss, "mapper"), "mapper"));
            const int reducers = to_int(next_token(ss, "reducer count"), "reducer count");
            if (reducers < 0) throw ParseError("negative reducer count", line_no);
            for (int i = 0; i < reducers; ++i) {
                const std::string tok = next_token(ss, "reducer");
                const auto colon = tok.find(':');
                if (colon == std::string::npos) throw ParseError("reducer '" + tok + "' lacks ':MB'", line_no);
                const double mb = to_double(tok.substr(colon + 1), "reducer size");
                if (mb < 0.0) throw ParseError("negative reducer size", line_no);
                rec.reducers.emplace_back(to_int(tok.substr(0, colon), "reducer"), mb);
            }
            std::string extra;
            if (ss >> extra) throw ParseError("trailing token '" + extra + "'", line_no);
            trace.records.push_back(std::move(rec));
        }
    }
    if (declared < 0) throw ParseError("missing header", line_no);
    if (static_cast<int>(trace.records.size()) != declared) {
        throw ParseError("header declares " + std::to_string(declared) + " coflows, body has " +
                             std::to_string(trace.records.size()),
                         line_no);
    }
    return trace;
}

Instance sample_trace(const TraceFile& trace, const TraceSampleConfig& cfg) {
    if (cfg.machines < 1) throw ConfigError("machines must be >= 1");
    if (cfg.coflows < 0) throw ConfigError("coflows must be >= 0");
    validate_alpha(cfg.alpha_range);
    validate_classes(cfg.class2_prob, cfg.class2_weight);

    const int m = cfg.machines;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const TraceRecord& rec = trace.records[i];
        double bytes = 0.0;
        for (const auto& [loc, mb] : rec.reducers) bytes += mb;
        if (rec.flow_count() >= 1 && rec.flow_count() <= static_cast<std::size_t>(m) && bytes > 0.0) {
            eligible.push_back(i);
        }
    }
    if (eligible.size() < static_cast<std::size_t>(cfg.coflows)) {
        throw ConfigError("trace has " + std::to_string(eligible.size()) + " coflows with at most " +
                          std::to_string(m) + " flows, " + std::to_string(cfg.coflows) + " requested");
    }
    Rng rng(cfg.seed);
    std::shuffle(eligible.begin(), eligible.end(), rng);
    eligible.resize(static_cast<std::size_t>(cfg.coflows));
    std::sort(eligible.begin(), eligible.end());

    const Fabric fabric = Fabric::uniform(m);
    std::vector<Coflow> coflows;
    for (std::size_t i : eligible) {
        const TraceRecord& rec = trace.records[i];
        Coflow cf;
        cf.id = rec.id;
        int flow_id = 1;
        for (const auto& [loc, mb] : rec.reducers) {
            if (mb <= 0.0) continue;
            const double share = mb / static_cast<double>(rec.mappers.size());
            for (int mapper : rec.mappers) {
                const int src = ((mapper % m) + m) % m + 1;
                const int dst = m + ((loc % m) + m) % m + 1;
                cf.flows.push_back({flow_id++, src, dst, share});
            }
        }
        assign_deadline_and_class(rng, fabric, cfg.alpha_range, cfg.class2_prob, cfg.class2_weight, cf);
        coflows.push_back(std::move(cf));
    }
    return Instance(fabric, std::move(coflows));
}

Instance generalized_example(int machines, double epsilon) {
    if (machines < 2) throw ConfigError("the generalized example needs at least two machines");
    const int m = machines;
    std::vector<Coflow> coflows;
    Coflow wide{1, {}, 1.0, 1.0, 0.0, 1};
    for (int i = 1; i <= m; ++i) wide.flows.push_back({i, i, m + i, 1.0});
    coflows.push_back(std::move(wide));
    for (int i = 1; i < m; ++i) {
        Coflow single{i + 1, {{1, i, m + (i % m) + 1, 1.0 + epsilon}}, 2.0, 1.0, 0.0, 1};
        coflows.push_back(std::move(single));
    }
    return Instance(Fabric::uniform(m), std::move(coflows));
}

Instance motivating_example(double epsilon) {
    constexpr int m = 4;
    std::vector<Coflow> coflows;
    Coflow wide{1, {}, 1.0, 1.0, 0.0, 1};
    for (int i = 1; i <= m; ++i) wide.flows.push_back({i, i, m + i, 1.0});
    coflows.push_back(std::move(wide));
    for (int i = 1; i <= m; ++i) {
        Coflow single{i + 1, {{1, i, m + (i % m) + 1, 1.0 + epsilon}}, 2.0, 1.0, 0.0, 1};
        coflows.push_back(std::move(single));
    }
    return Instance(Fabric::uniform(m), std::move(coflows));
}

}  // namespace dcoflow::workload

#include "dcoflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dcoflow/errors.hpp"
#include "dcoflow/exact.hpp"
#include "dcoflow/format.hpp"
#include "dcoflow/io.hpp"
#include "dcoflow/sim.hpp"

namespace dcoflow::cli {

using nlohmann::json;

namespace {

const char* source_name(Source s) {
    switch (s) {
        case Source::synthetic: return "synthetic";
        case Source::trace: return "trace";
        case Source::instance: return "instance";
        case Source::motivating: return "motivating";
        case Source::generalized: return "generalized";
    }
    return "synthetic";
}

Source parse_source(const std::string& name) {
    for (Source s : {Source::synthetic, Source::trace, Source::instance, Source::motivating, Source::generalized}) {
        if (name == source_name(s)) return s;
    }
    throw ConfigError("unknown workload source '" + name +
                      "' (valid: synthetic, trace, instance, motivating, generalized)");
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get(const json& v, const std::string& what) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(what + " has the wrong type");
    }
}

workload::Range get_range(const json& v, const std::string& what) {
    const auto r = get<std::vector<double>>(v, what);
    if (r.size() != 2) throw ConfigError(what + " must be a [lo, hi] pair");
    return {r[0], r[1]};
}

std::optional<double> parse_frequency(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "arrival") return std::nullopt;
        throw ConfigError("online.f must be a positive number or \"inf\"");
    }
    const double f = get<double>(v, "online.f");
    if (!(f > 0.0)) throw ConfigError("online.f must be > 0");
    if (std::isinf(f)) return std::nullopt;
    return f;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

std::string with_seed(const std::string& pattern, std::uint64_t seed) {
    std::string out = pattern;
    const std::string key = "{seed}";
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos)) {
        out.replace(pos, key.size(), std::to_string(seed));
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (schedulers.empty()) throw ConfigError("at least one scheduler is required");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (source == Source::trace && trace_path.empty()) throw ConfigError("trace workload needs a trace path");
    if (source == Source::instance && instance_path.empty()) throw ConfigError("instance workload needs a path");
    if (source == Source::synthetic) synthetic.validate();
    if (update_frequency && !(*update_frequency > 0.0)) throw ConfigError("update frequency must be > 0");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    arrival.validate();
    sched::SchedulerConfig sc{schedulers.front(), gamma, weight_scale};
    sc.validate();
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base) {
    check_keys(doc, "config",
               {"workload", "online", "schedulers", "seeds", "gamma", "weight_scale", "out", "threads", "timing"});
    ExperimentConfig cfg;
    if (auto it = doc.find("workload"); it != doc.end()) {
        const json& w = *it;
        check_keys(w, "workload",
                   {"source", "machines", "coflows", "alpha", "type2_prob", "class2_prob", "class2_weight", "volume",
                    "distinct_egress", "trace", "instance", "epsilon"});
        if (w.contains("source")) cfg.source = parse_source(get<std::string>(w["source"], "workload.source"));
        auto& s = cfg.synthetic;
        if (w.contains("machines")) s.machines = get<int>(w["machines"], "workload.machines");
        if (w.contains("coflows")) s.coflows = get<int>(w["coflows"], "workload.coflows");
        if (w.contains("alpha")) s.alpha_range = get_range(w["alpha"], "workload.alpha");
        if (w.contains("type2_prob")) s.type2_prob = get<double>(w["type2_prob"], "workload.type2_prob");
        if (w.contains("class2_prob")) s.class2_prob = get<double>(w["class2_prob"], "workload.class2_prob");
        if (w.contains("class2_weight")) s.class2_weight = get<double>(w["class2_weight"], "workload.class2_weight");
        if (w.contains("volume")) s.volume_range = get_range(w["volume"], "workload.volume");
        if (w.contains("distinct_egress")) s.distinct_egress = get<bool>(w["distinct_egress"], "workload.distinct_egress");
        if (w.contains("trace")) cfg.trace_path = resolve(get<std::string>(w["trace"], "workload.trace"), base);
        if (w.contains("instance")) {
            cfg.instance_path = resolve(get<std::string>(w["instance"], "workload.instance"), base);
        }
        if (w.contains("epsilon")) cfg.epsilon = get<double>(w["epsilon"], "workload.epsilon");
    }
    if (auto it = doc.find("online"); it != doc.end()) {
        const json& o = *it;
        check_keys(o, "online", {"lambda", "total_coflows", "batch", "f", "horizon_time"});
        if (o.contains("lambda")) cfg.arrival.lambda = get<double>(o["lambda"], "online.lambda");
        if (o.contains("total_coflows")) cfg.arrival.total_coflows = get<int>(o["total_coflows"], "online.total_coflows");
        if (o.contains("batch") && !o["batch"].is_null()) {
            const auto b = get<std::vector<int>>(o["batch"], "online.batch");
            if (b.size() != 2) throw ConfigError("online.batch must be a [lo, hi] pair");
            cfg.arrival.batch_size_range = std::pair{b[0], b[1]};
        }
        if (o.contains("f")) cfg.update_frequency = parse_frequency(o["f"]);
        if (o.contains("horizon_time") && !o["horizon_time"].is_null()) {
            cfg.horizon_time = get<double>(o["horizon_time"], "online.horizon_time");
        }
    }
    if (auto it = doc.find("schedulers"); it != doc.end()) {
        cfg.schedulers.clear();
        for (const auto& name : get<std::vector<std::string>>(*it, "schedulers")) {
            cfg.schedulers.push_back(sched::parse_variant(name));
        }
    }
    if (auto it = doc.find("seeds"); it != doc.end()) cfg.seeds = get<std::vector<std::uint64_t>>(*it, "seeds");
    if (auto it = doc.find("gamma"); it != doc.end()) cfg.gamma = get<double>(*it, "gamma");
    if (auto it = doc.find("weight_scale"); it != doc.end()) cfg.weight_scale = get<std::int64_t>(*it, "weight_scale");
    if (auto it = doc.find("out"); it != doc.end() && !it->is_null()) {
        cfg.out = resolve(get<std::string>(*it, "out"), base);
    }
    if (auto it = doc.find("threads"); it != doc.end()) cfg.threads = get<unsigned>(*it, "threads");
    if (auto it = doc.find("timing"); it != doc.end()) cfg.timing = get<bool>(*it, "timing");
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    const auto& s = cfg.synthetic;
    json names = json::array();
    for (sched::Variant v : cfg.schedulers) names.push_back(std::string(sched::to_string(v)));
    json online = {{"lambda", cfg.arrival.lambda},
                   {"total_coflows", cfg.arrival.total_coflows},
                   {"batch", cfg.arrival.batch_size_range
                                 ? json::array({cfg.arrival.batch_size_range->first, cfg.arrival.batch_size_range->second})
                                 : json(nullptr)},
                   {"f", cfg.update_frequency ? json(*cfg.update_frequency) : json("inf")},
                   {"horizon_time", cfg.horizon_time ? json(*cfg.horizon_time) : json(nullptr)}};
    return {{"workload",
             {{"source", source_name(cfg.source)},
              {"machines", s.machines},
              {"coflows", s.coflows},
              {"alpha", {s.alpha_range.first, s.alpha_range.second}},
              {"type2_prob", s.type2_prob},
              {"class2_prob", s.class2_prob},
              {"class2_weight", s.class2_weight},
              {"volume", {s.volume_range.first, s.volume_range.second}},
              {"distinct_egress", s.distinct_egress},
              {"trace", cfg.trace_path.string()},
              {"instance", cfg.instance_path.string()},
              {"epsilon", cfg.epsilon}}},
            {"online", std::move(online)},
            {"schedulers", std::move(names)},
            {"seeds", cfg.seeds},
            {"gamma", cfg.gamma},
            {"weight_scale", cfg.weight_scale},
            {"out", cfg.out ? json(cfg.out->string()) : json(nullptr)},
            {"threads", cfg.threads},
            {"timing", cfg.timing}};
}

std::string digest(const ExperimentConfig& cfg) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : to_json(cfg).dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

namespace {

enum class Mode { gen, offline, online, oracle, export_ilp };

struct Flags {
    std::string config;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> schedulers;
    std::string out;
    std::string trace;
    std::string instance;
    std::string source;
    std::string f;
    std::vector<double> alpha;
    int machines = 0;
    int coflows = 0;
    int total = 0;
    double lambda = 0.0;
    double p2 = 0.0;
    double w2 = 0.0;
    double epsilon = 0.0;
    unsigned threads = 0;
    bool no_timing = false;
};

struct Given {
    std::function<bool(const char*)> has;
};

ExperimentConfig load_config(const Flags& fl, const Given& given) {
    ExperimentConfig cfg;
    if (given.has("--config")) {
        const std::filesystem::path path(fl.config);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config " + path.string());
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
        if (doc.is_object() && doc.contains("fabric")) {
            cfg.source = Source::instance;
            cfg.instance_path = path;
        } else {
            cfg = parse_config(doc, path.parent_path());
        }
    }
    if (given.has("--source")) cfg.source = parse_source(fl.source);
    if (given.has("--trace")) {
        cfg.trace_path = fl.trace;
        if (!given.has("--source")) cfg.source = Source::trace;
    }
    if (given.has("--instance")) {
        cfg.instance_path = fl.instance;
        if (!given.has("--source")) cfg.source = Source::instance;
    }
    if (given.has("--seed")) cfg.seeds = fl.seeds;
    if (given.has("--scheduler")) {
        cfg.schedulers.clear();
        for (const std::string& name : fl.schedulers) cfg.schedulers.push_back(sched::parse_variant(name));
    }
    if (given.has("--out")) cfg.out = fl.out;
    if (given.has("--machines")) cfg.synthetic.machines = fl.machines;
    if (given.has("--coflows")) cfg.synthetic.coflows = fl.coflows;
    if (given.has("--alpha")) {
        if (fl.alpha.size() != 2) throw ConfigError("--alpha takes lo,hi");
        cfg.synthetic.alpha_range = {fl.alpha[0], fl.alpha[1]};
    }
    if (given.has("--p2")) cfg.synthetic.class2_prob = fl.p2;
    if (given.has("--w2")) cfg.synthetic.class2_weight = fl.w2;
    if (given.has("--epsilon")) cfg.epsilon = fl.epsilon;
    if (given.has("--lambda")) cfg.arrival.lambda = fl.lambda;
    if (given.has("--total-coflows")) cfg.arrival.total_coflows = fl.total;
    if (given.has("--f")) cfg.update_frequency = parse_frequency(fl.f == "inf" ? json("inf") : json(std::stod(fl.f)));
    if (given.has("--threads")) cfg.threads = fl.threads;
    if (fl.no_timing) cfg.timing = false;
    cfg.validate();
    return cfg;
}

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
    switch (cfg.source) {
        case Source::synthetic: {
            workload::SyntheticConfig s = cfg.synthetic;
            s.seed = seed;
            return workload::gen_synthetic(s);
        }
        case Source::trace: {
            const workload::TraceFile trace = workload::parse_trace(cfg.trace_path);
            workload::TraceSampleConfig s{cfg.synthetic.machines, cfg.synthetic.coflows, seed,
                                          cfg.synthetic.alpha_range, cfg.synthetic.class2_prob,
                                          cfg.synthetic.class2_weight};
            return workload::sample_trace(trace, s);
        }
        case Source::instance: return io::load_instance(cfg.instance_path);
        case Source::motivating: return workload::motivating_example(cfg.epsilon);
        case Source::generalized: return workload::generalized_example(cfg.synthetic.machines, cfg.epsilon);
    }
    throw ConfigError("unknown workload source");
}

std::string instance_label(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t seed, Mode mode) {
    const std::string m = std::to_string(inst.fabric().num_machines);
    switch (cfg.source) {
        case Source::synthetic:
            if (mode == Mode::online) {
                return "online-M" + m + "-n" + std::to_string(cfg.arrival.total_coflows) + "-s" + std::to_string(seed);
            }
            return "syn-M" + m + "-N" + std::to_string(inst.size()) + "-s" + std::to_string(seed);
        case Source::trace: return "trace-M" + m + "-N" + std::to_string(inst.size()) + "-s" + std::to_string(seed);
        case Source::instance: return cfg.instance_path.stem().string();
        case Source::motivating: return "motivating";
        case Source::generalized: return "generalized-M" + m;
    }
    return "instance";
}

// Writes completed results in job order, whatever order workers finish in.
class OrderedSink {
public:
    OrderedSink(std::ostream& out, std::size_t jobs) : out_(out), done_(jobs) {}

    void put(std::size_t job, std::string text) {
        std::lock_guard lock(mu_);
        done_[job] = std::move(text);
        while (next_ < done_.size() && done_[next_]) {
            out_ << *done_[next_];
            done_[next_].reset();
            ++next_;
        }
        out_.flush();
    }

private:
    std::mutex mu_;
    std::ostream& out_;
    std::vector<std::optional<std::string>> done_;
    std::size_t next_ = 0;
};

void run_jobs(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (!failed) {
                const std::size_t i = next++;
                if (i >= count) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

class Logger {
public:
    explicit Logger(std::ostream& err) : err_(err) {}
    void line(const std::string& text) {
        std::lock_guard lock(mu_);
        err_ << text << '\n';
    }

private:
    std::mutex mu_;
    std::ostream& err_;
};

// CSV destination: appends to an existing file after checking its header.
class CsvTarget {
public:
    CsvTarget(const std::optional<std::filesystem::path>& path, std::ostream& fallback) {
        if (!path) {
            stream_ = &fallback;
            sim::write_csv_header(fallback);
            return;
        }
        bool has_header = false;
        if (std::ifstream existing(*path); existing) {
            std::string first;
            if (std::getline(existing, first)) {
                if (first != sim::kCsvHeader) {
                    throw ConfigError(path->string() + " exists with a different CSV header");
                }
                has_header = true;
            }
        }
        file_.open(*path, std::ios::app);
        if (!file_) throw ConfigError("cannot write " + path->string());
        if (!has_header) sim::write_csv_header(file_);
        stream_ = &file_;
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string log_line(const std::string& digest, std::uint64_t seed, std::string_view scheduler, double ms) {
    return "digest=" + digest + " seed=" + std::to_string(seed) + " scheduler=" + std::string(scheduler) +
           " ms=" + format_number(ms);
}

int run_metrics_mode(Mode mode, const ExperimentConfig& cfg, std::ostream& out, Logger& log) {
    const std::string dig = digest(cfg);
    CsvTarget target(cfg.out, out);
    const std::size_t per_seed = mode == Mode::oracle ? 1 : cfg.schedulers.size();
    const std::size_t jobs = cfg.seeds.size() * per_seed;
    OrderedSink sink(target.stream(), jobs);

    run_jobs(jobs, cfg.threads, [&](std::size_t j) {
        const std::uint64_t seed = cfg.seeds[j / per_seed];
        sim::CsvRow row;
        row.seed = seed;
        const auto start = std::chrono::steady_clock::now();
        if (mode == Mode::online) {
            const sched::Variant v = cfg.schedulers[j % per_seed];
            sim::OnlineConfig oc;
            oc.mode = cfg.update_frequency ? sim::UpdateMode::periodic : sim::UpdateMode::on_arrival;
            oc.frequency = cfg.update_frequency.value_or(1.0);
            oc.horizon_time = cfg.horizon_time;
            oc.scheduler = {v, cfg.gamma, cfg.weight_scale};
            std::vector<Coflow> arrivals;
            Fabric fabric;
            if (cfg.source == Source::synthetic) {
                workload::SyntheticConfig s = cfg.synthetic;
                s.seed = seed;
                arrivals = workload::gen_arrivals(s, cfg.arrival);
                fabric = Fabric::uniform(s.machines);
                row.lambda = cfg.arrival.lambda;
            } else if (cfg.source == Source::trace) {
                throw ConfigError("online runs need a synthetic or instance workload");
            } else {
                const Instance inst = make_instance(cfg, seed);
                arrivals = inst.coflows();
                std::stable_sort(arrivals.begin(), arrivals.end(),
                                 [](const Coflow& a, const Coflow& b) { return a.release < b.release; });
                fabric = inst.fabric();
            }
            row.metrics = sim::run_online(fabric, arrivals, oc);
            row.instance_id = cfg.source == Source::synthetic
                                  ? "online-M" + std::to_string(fabric.num_machines) + "-n" +
                                        std::to_string(arrivals.size()) + "-s" + std::to_string(seed)
                                  : instance_label(cfg, Instance(fabric, arrivals), seed, mode);
            row.machines = fabric.num_machines;
            row.scheduler = std::string(sched::to_string(v));
            row.f = oc.f();
        } else {
            const Instance inst = make_instance(cfg, seed);
            row.instance_id = instance_label(cfg, inst, seed, mode);
            row.machines = inst.fabric().num_machines;
            if (mode == Mode::oracle) {
                const exact::SigmaWcarResult best = exact::brute_force_sigma_wcar(inst);
                std::vector<sim::CoflowOutcome> outcomes;
                for (const Coflow& cf : inst.coflows()) {
                    const bool in = std::binary_search(best.accepted.begin(), best.accepted.end(), cf.id);
                    outcomes.push_back({cf.id, cf.class_id, cf.weight, cf.release, cf.deadline, in, std::nullopt, in});
                }
                row.metrics = sim::summarize(std::move(outcomes));
                row.scheduler = "oracle";
            } else {
                const sched::Variant v = cfg.schedulers[j % per_seed];
                row.metrics = sim::run_offline(inst, {v, cfg.gamma, cfg.weight_scale});
                row.scheduler = std::string(sched::to_string(v));
            }
        }
        const double ms = elapsed_ms(start);
        row.runtime_ms = cfg.timing ? ms : 0.0;
        log.line(log_line(dig, seed, row.scheduler, ms));
        sink.put(j, sim::csv_line(row) + "\n");
    });
    return 0;
}

// Resolves the per-seed output of gen / export-ilp; empty means stdout.
std::string seed_output(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (!cfg.out) {
        if (cfg.seeds.size() > 1) throw ConfigError("several seeds need --out with a {seed} placeholder");
        return {};
    }
    const std::string pattern = cfg.out->string();
    if (cfg.seeds.size() > 1 && pattern.find("{seed}") == std::string::npos) {
        throw ConfigError("several seeds need --out with a {seed} placeholder");
    }
    return with_seed(pattern, seed);
}

int run_file_mode(Mode mode, const ExperimentConfig& cfg, std::ostream& out, Logger& log) {
    const std::string dig = digest(cfg);
    for (std::uint64_t seed : cfg.seeds) {
        const auto start = std::chrono::steady_clock::now();
        const Instance inst = make_instance(cfg, seed);
        const std::string path = seed_output(cfg, seed);
        if (mode == Mode::gen) {
            if (path.empty()) {
                out << io::instance_to_json(inst).dump(2) << '\n';
            } else {
                io::save_instance(inst, path);
            }
        } else if (path.empty()) {
            exact::write_lp(exact::build_ilp(inst), out);
        } else {
            exact::export_ilp(inst, path);
        }
        log.line(log_line(dig, seed, mode == Mode::gen ? "gen" : "export-ilp", elapsed_ms(start)));
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deadline-aware coflow scheduling experiments"};
    app.name("dcoflow");
    app.require_subcommand(1);
    Flags fl;

    struct Sub {
        Mode mode;
        CLI::App* app;
    };
    std::vector<Sub> subs;
    const std::vector<std::tuple<Mode, const char*, const char*>> modes{
        {Mode::gen, "gen", "Write a generated instance as JSON"},
        {Mode::offline, "run-offline", "Run schedulers on offline batches; append CSV rows"},
        {Mode::online, "run-online", "Run schedulers on arrival streams; append CSV rows"},
        {Mode::oracle, "oracle", "Brute-force sigma-WCAR optimum (N <= 8); append CSV rows"},
        {Mode::export_ilp, "export-ilp", "Write the sigma-WCAR integer program in LP format"},
    };
    for (const auto& [mode, name, help] : modes) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", fl.config, "Experiment config JSON, or an instance JSON");
        sub->add_option("--seed", fl.seeds, "Seeds (repeat or comma-separate)")->delimiter(',');
        sub->add_option("--scheduler", fl.schedulers, "Schedulers (comma-separated)")->delimiter(',');
        sub->add_option("--out", fl.out, "Output path; {seed} expands to the seed");
        sub->add_option("--source", fl.source, "synthetic | trace | instance | motivating | generalized");
        sub->add_option("--trace", fl.trace, "Shuffle trace file");
        sub->add_option("--instance", fl.instance, "Instance JSON file");
        sub->add_option("--machines", fl.machines, "Machines M");
        sub->add_option("--coflows", fl.coflows, "Coflows N (offline)");
        sub->add_option("--alpha", fl.alpha, "Deadline slack range lo,hi")->delimiter(',');
        sub->add_option("--p2", fl.p2, "Class-2 probability");
        sub->add_option("--w2", fl.w2, "Class-2 weight");
        sub->add_option("--epsilon", fl.epsilon, "Epsilon of the built-in examples");
        sub->add_option("--lambda", fl.lambda, "Arrival rate (online)");
        sub->add_option("--total-coflows", fl.total, "Arrivals per run (online)");
        sub->add_option("--f", fl.f, "Update frequency (online); inf = on every arrival");
        sub->add_option("--threads", fl.threads, "Worker threads; 0 = all cores");
        sub->add_flag("--no-timing", fl.no_timing, "Write runtime_ms as 0 for reproducible files");
        subs.push_back({mode, sub});
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Logger log(err);
    try {
        for (const Sub& s : subs) {
            if (!s.app->parsed()) continue;
            const Given given{[&](const char* name) { return s.app->count(name) > 0; }};
            const ExperimentConfig cfg = load_config(fl, given);
            switch (s.mode) {
                case Mode::gen:
                case Mode::export_ilp: return run_file_mode(s.mode, cfg, out, log);
                default: return run_metrics_mode(s.mode, cfg, out, log);
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace dcoflow::cli

#include "dcoflow/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "dcoflow/errors.hpp"
#include "dcoflow/format.hpp"

namespace dcoflow::exact {

namespace {

// Cumulative per-port load of a sequence served back to back.
bool append_fits(const Instance& instance, std::vector<double>& load, std::size_t ci, bool commit) {
    const double deadline = instance.at(ci).deadline;
    for (PortId l : instance.ports_used(ci)) {
        if (load[static_cast<std::size_t>(l - 1)] + instance.p(ci, l) > deadline + kTolerance) return false;
    }
    if (commit) {
        for (PortId l : instance.ports_used(ci)) load[static_cast<std::size_t>(l - 1)] += instance.p(ci, l);
    }
    return true;
}

struct Search {
    const Instance& instance;
    std::vector<std::size_t> by_id;  // coflow indices sorted by id
    std::unordered_map<std::uint32_t, std::vector<std::size_t>> first_order;  // feasible mask -> first sequence
    std::vector<std::size_t> seq;
    std::vector<double> load;

    void dfs(std::uint32_t mask) {
        first_order.try_emplace(mask, seq);
        for (std::size_t r = 0; r < by_id.size(); ++r) {
            if (mask & (1u << r)) continue;
            const std::size_t ci = by_id[r];
            if (!append_fits(instance, load, ci, false)) continue;
            const std::vector<double> saved = load;
            append_fits(instance, load, ci, true);
            seq.push_back(ci);
            dfs(mask | (1u << r));
            seq.pop_back();
            load = saved;
        }
    }
};

std::vector<CoflowId> ids_of(const Instance& instance, std::span<const std::size_t> indices) {
    std::vector<CoflowId> out;
    for (std::size_t ci : indices) out.push_back(instance.at(ci).id);
    return out;
}

std::string var(char prefix, long a) { return std::string(1, prefix) + "_" + std::to_string(a); }
std::string var(char prefix, long a, long b) { return var(prefix, a) + "_" + std::to_string(b); }

const char* sense_text(Sense s) {
    switch (s) {
        case Sense::le: return "<=";
        case Sense::ge: return ">=";
        case Sense::eq: return "=";
    }
    return "=";
}

class LineWriter {
public:
    explicit LineWriter(std::ostream& out) : out_(out) {}

    void start(const std::string& head) {
        line_ = " " + head;
    }
    void add(const std::string& piece) {
        if (line_.size() + 1 + piece.size() > kWidth) {
            out_ << line_ << '\n';
            line_ = "  " + piece;
        } else {
            line_ += " " + piece;
        }
    }
    void finish() {
        out_ << line_ << '\n';
        line_.clear();
    }

private:
    static constexpr std::size_t kWidth = 200;
    std::ostream& out_;
    std::string line_;
};

void write_terms(LineWriter& w, const std::vector<Term>& terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const Term& t = terms[i];
        std::string piece;
        if (t.coef < 0.0) {
            piece = "- ";
        } else if (i > 0) {
            piece = "+ ";
        }
        const double mag = std::abs(t.coef);
        if (mag != 1.0) piece += format_number(mag) + " ";
        piece += t.var;
        w.add(piece);
    }
}

struct Token {
    std::string text;
    int line;
};

bool is_sense(const std::string& t) {
    return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" || t == "<" || t == ">";
}

Sense to_sense(const std::string& t) {
    if (t == "=") return Sense::eq;
    if (t == ">=" || t == "=>" || t == ">") return Sense::ge;
    return Sense::le;
}

bool parse_number(const std::string& t, double& out) {
    if (t == "inf" || t == "+inf" || t == "infinity") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    if (t == "-inf" || t == "-infinity") {
        out = -std::numeric_limits<double>::infinity();
        return true;
    }
    std::size_t used = 0;
    try {
        out = std::stod(t, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == t.size();
}

// Linear expression starting at tokens[pos]; stops before a sense token or a label.
std::vector<Term> parse_expr(const std::vector<Token>& tokens, std::size_t& pos) {
    std::vector<Term> terms;
    while (pos < tokens.size()) {
        const std::string& t = tokens[pos].text;
        if (is_sense(t) || t.back() == ':') break;
        double sign = 1.0;
        while (pos < tokens.size() && (tokens[pos].text == "+" || tokens[pos].text == "-")) {
            if (tokens[pos].text == "-") sign = -sign;
            ++pos;
        }
        if (pos >= tokens.size()) throw ParseError("dangling sign", tokens.back().line);
        double coef = 1.0;
        double value = 0.0;
        if (parse_number(tokens[pos].text, value)) {
            coef = value;
            ++pos;
            if (pos >= tokens.size()) throw ParseError("coefficient without variable", tokens.back().line);
        }
        const Token& name = tokens[pos];
        if (is_sense(name.text) || name.text.back() == ':' || parse_number(name.text, value)) {
            throw ParseError("expected variable, got '" + name.text + "'", name.line);
        }
        terms.push_back({name.text, sign * coef});
        ++pos;
    }
    return terms;
}

enum class Section { none, objective, constraints, bounds, binary, general, end };

Section section_of(std::string line) {
    std::transform(line.begin(), line.end(), line.begin(), [](unsigned char c) { return std::tolower(c); });
    const auto b = line.find_first_not_of(" \t");
    const auto e = line.find_last_not_of(" \t");
    line = b == std::string::npos ? std::string() : line.substr(b, e - b + 1);
    if (line == "maximize" || line == "maximise" || line == "max") return Section::objective;
    if (line == "subject to" || line == "such that" || line == "st" || line == "s.t.") return Section::constraints;
    if (line == "bounds") return Section::bounds;
    if (line == "binary" || line == "binaries" || line == "bin") return Section::binary;
    if (line == "general" || line == "generals" || line == "gen") return Section::general;
    if (line == "end") return Section::end;
    return Section::none;
}

}  // namespace

bool order_feasible(const Instance& instance, std::span<const CoflowId> order) {
    std::vector<double> load(static_cast<std::size_t>(instance.fabric().num_ports()), 0.0);
    for (CoflowId k : order) {
        if (!append_fits(instance, load, instance.index_of(k), true)) return false;
    }
    return true;
}

SigmaWcarResult brute_force_sigma_wcar(const Instance& instance) {
    const std::size_t n = instance.size();
    if (n > kSigmaWcarLimit) {
        throw SizeError("brute-force sigma-WCAR handles at most " + std::to_string(kSigmaWcarLimit) +
                        " coflows, got " + std::to_string(n));
    }
    Search search{instance, {}, {}, {}, std::vector<double>(static_cast<std::size_t>(instance.fabric().num_ports()), 0.0)};
    for (std::size_t i = 0; i < n; ++i) search.by_id.push_back(i);
    std::sort(search.by_id.begin(), search.by_id.end(),
              [&](std::size_t a, std::size_t b) { return instance.at(a).id < instance.at(b).id; });
    search.dfs(0);

    SigmaWcarResult result;
    std::uint32_t best_mask = 0;
    std::vector<CoflowId> best_ids;
    for (const auto& [mask, seq] : search.first_order) {
        std::vector<std::size_t> members;
        double weight = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (mask & (1u << r)) {
                members.push_back(search.by_id[r]);
                weight += instance.at(search.by_id[r]).weight;
            }
        }
        std::vector<std::size_t> edd = members;
        std::sort(edd.begin(), edd.end(), [&](std::size_t a, std::size_t b) {
            const Coflow& x = instance.at(a);
            const Coflow& y = instance.at(b);
            return x.deadline != y.deadline ? x.deadline < y.deadline : x.id < y.id;
        });
        const std::vector<CoflowId> edd_ids = ids_of(instance, edd);
        if (!order_feasible(instance, edd_ids)) result.edd_consistent = false;

        const std::vector<CoflowId> ids = ids_of(instance, members);  // ascending: by_id order
        bool better = false;
        if (weight > result.opt_weight + kTolerance) {
            better = true;
        } else if (weight >= result.opt_weight - kTolerance) {
            const int pc = std::popcount(mask);
            const int best_pc = std::popcount(best_mask);
            better = pc < best_pc || (pc == best_pc && ids < best_ids);
        }
        if (better) {
            result.opt_weight = weight;
            best_mask = mask;
            best_ids = ids;
            result.order = order_feasible(instance, edd_ids) ? edd_ids : ids_of(instance, seq);
        }
    }
    result.accepted = best_ids;
    if (best_mask == 0) {
        result.opt_weight = 0.0;
        result.order.clear();
    }
    return result;
}

std::size_t IlpModel::count_rows(std::string_view family) const {
    std::size_t count = 0;
    for (const Row& r : rows) {
        if (r.name.size() > family.size() && r.name.compare(0, family.size(), family) == 0 &&
            r.name[family.size()] == '_') {
            ++count;
        }
    }
    return count;
}

IlpModel build_ilp(const Instance& instance) {
    if (instance.empty()) throw PreconditionError("cannot build an integer program for an empty instance");
    std::vector<std::size_t> order(instance.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return instance.at(a).id < instance.at(b).id; });
    const int ports = instance.fabric().num_ports();

    IlpModel m;
    for (std::size_t a : order) {
        const Coflow& k = instance.at(a);
        m.objective.push_back({var('z', k.id), k.weight});
        m.binaries.push_back(var('z', k.id));
    }
    for (std::size_t a : order) {
        for (std::size_t b : order) {
            if (a != b) m.binaries.push_back(var('d', instance.at(a).id, instance.at(b).id));
        }
    }
    for (std::size_t a : order) {
        for (std::size_t b : order) {
            if (a != b) m.binaries.push_back(var('y', instance.at(a).id, instance.at(b).id));
        }
    }
    for (std::size_t a : order) {
        for (int l = 1; l <= ports; ++l) m.continuous.push_back(var('c', l, instance.at(a).id));
    }

    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const CoflowId k = instance.at(order[i]).id;
            const CoflowId q = instance.at(order[j]).id;
            m.rows.push_back({"od1_" + std::to_string(k) + "_" + std::to_string(q),
                              {{var('d', k, q), 1.0}, {var('d', q, k), 1.0}}, Sense::eq, 1.0});
        }
    }
    for (std::size_t a : order) {
        for (std::size_t b : order) {
            for (std::size_t c : order) {
                if (a == b || b == c || a == c) continue;
                const CoflowId x = instance.at(a).id, y = instance.at(b).id, z = instance.at(c).id;
                m.rows.push_back({"od2_" + std::to_string(x) + "_" + std::to_string(y) + "_" + std::to_string(z),
                                  {{var('d', x, y), 1.0}, {var('d', y, z), 1.0}, {var('d', z, x), 1.0}},
                                  Sense::le,
                                  2.0});
            }
        }
    }
    for (std::size_t a : order) {
        for (std::size_t b : order) {
            if (a == b) continue;
            const CoflowId j = instance.at(a).id, k = instance.at(b).id;
            const std::string suffix = std::to_string(j) + "_" + std::to_string(k);
            const std::string y = var('y', j, k);
            m.rows.push_back({"y1a_" + suffix, {{y, 1.0}, {var('z', j), -1.0}}, Sense::le, 0.0});
            m.rows.push_back({"y1b_" + suffix, {{y, 1.0}, {var('d', j, k), -1.0}}, Sense::le, 0.0});
            m.rows.push_back(
                {"y1c_" + suffix, {{y, 1.0}, {var('z', j), -1.0}, {var('d', j, k), -1.0}}, Sense::ge, -1.0});
        }
    }
    for (std::size_t b : order) {
        const CoflowId k = instance.at(b).id;
        for (int l = 1; l <= ports; ++l) {
            Row row{"lb_" + std::to_string(l) + "_" + std::to_string(k), {{var('c', l, k), 1.0}}, Sense::ge, 0.0};
            for (std::size_t a : order) {
                if (a == b || instance.p(a, l) == 0.0) continue;
                row.terms.push_back({var('y', instance.at(a).id, k), -instance.p(a, l)});
            }
            if (instance.p(b, l) > 0.0) row.terms.push_back({var('z', k), -instance.p(b, l)});
            m.rows.push_back(std::move(row));
        }
    }
    for (std::size_t b : order) {
        const Coflow& k = instance.at(b);
        for (PortId l : instance.ports_used(b)) {
            m.rows.push_back({"dl_" + std::to_string(l) + "_" + std::to_string(k.id),
                              {{var('c', l, k.id), 1.0}, {var('z', k.id), -k.deadline}},
                              Sense::le,
                              0.0});
        }
    }
    return m;
}

void write_lp(const IlpModel& model, std::ostream& out) {
    LineWriter w(out);
    out << "Maximize\n";
    w.start(model.objective_name + ":");
    write_terms(w, model.objective);
    w.finish();
    out << "Subject To\n";
    for (const Row& r : model.rows) {
        w.start(r.name + ":");
        write_terms(w, r.terms);
        w.add(std::string(sense_text(r.sense)) + " " + format_number(r.rhs));
        w.finish();
    }
    out << "Bounds\n";
    for (const std::string& c : model.continuous) out << ' ' << c << " >= 0\n";
    out << "Binary\n";
    bool open = false;
    for (const std::string& b : model.binaries) {
        if (!open) {
            w.start(b);
            open = true;
        } else {
            w.add(b);
        }
    }
    if (open) w.finish();
    out << "End\n";
}

void export_ilp(const Instance& instance, const std::filesystem::path& path) {
    const IlpModel model = build_ilp(instance);
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_lp(model, out);
    out.flush();
    if (!out) throw Error("failed writing " + path.string());
}

IlpModel parse_lp(std::istream& in) {
    IlpModel model;
    model.objective_name.clear();
    std::map<Section, std::vector<Token>> tokens;
    Section current = Section::none;
    std::string line;
    int line_no = 0;
    bool ended = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto cut = line.find('\\'); cut != std::string::npos) line.erase(cut);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (const Section s = section_of(line); s != Section::none) {
            if (ended) throw ParseError("content after End", line_no);
            current = s;
            if (s == Section::end) ended = true;
            continue;
        }
        if (current == Section::none || ended) throw ParseError("text outside a section", line_no);
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            // split "name:" glued to the first term, e.g. "c1:x"
            const auto colon = tok.find(':');
            if (colon != std::string::npos && colon + 1 < tok.size()) {
                tokens[current].push_back({tok.substr(0, colon + 1), line_no});
                tokens[current].push_back({tok.substr(colon + 1), line_no});
            } else {
                tokens[current].push_back({tok, line_no});
            }
        }
    }
    if (!ended) throw ParseError("missing End", line_no);

    if (auto it = tokens.find(Section::objective); it != tokens.end()) {
        const auto& t = it->second;
        std::size_t pos = 0;
        if (!t.empty() && t[0].text.back() == ':') {
            model.objective_name = t[0].text.substr(0, t[0].text.size() - 1);
            pos = 1;
        }
        model.objective = parse_expr(t, pos);
        if (pos != t.size()) throw ParseError("unexpected '" + t[pos].text + "' in objective", t[pos].line);
    }
    if (auto it = tokens.find(Section::constraints); it != tokens.end()) {
        const auto& t = it->second;
        std::size_t pos = 0;
        while (pos < t.size()) {
            Row row;
            if (t[pos].text.back() == ':') {
                row.name = t[pos].text.substr(0, t[pos].text.size() - 1);
                ++pos;
            } else {
                row.name = "R" + std::to_string(model.rows.size() + 1);
            }
            row.terms = parse_expr(t, pos);
            if (pos >= t.size() || !is_sense(t[pos].text)) {
                throw ParseError("constraint " + row.name + " lacks a comparison", t[std::min(pos, t.size() - 1)].line);
            }
            row.sense = to_sense(t[pos].text);
            ++pos;
            double sign = 1.0;
            if (pos < t.size() && (t[pos].text == "-" || t[pos].text == "+")) {
                sign = t[pos].text == "-" ? -1.0 : 1.0;
                ++pos;
            }
            if (pos >= t.size() || !parse_number(t[pos].text, row.rhs)) {
                throw ParseError("constraint " + row.name + " lacks a right-hand side", t[std::min(pos, t.size() - 1)].line);
            }
            row.rhs *= sign;
            ++pos;
            model.rows.push_back(std::move(row));
        }
    }
    if (auto it = tokens.find(Section::bounds); it != tokens.end()) {
        const auto& t = it->second;
        for (std::size_t pos = 0; pos < t.size();) {
            if (pos + 2 >= t.size()) {
                throw ParseError("truncated bound", t[pos].line);
            }
            const std::string& name = t[pos].text;
            double lo = 0.0;
            if (t[pos + 1].text != ">=" || !parse_number(t[pos + 2].text, lo) || lo != 0.0) {
                throw ParseError("only 'x >= 0' bounds are supported", t[pos].line);
            }
            model.continuous.push_back(name);
            pos += 3;
        }
    }
    if (auto it = tokens.find(Section::binary); it != tokens.end()) {
        for (const Token& tok : it->second) model.binaries.push_back(tok.text);
    }
    if (tokens.contains(Section::general)) throw ParseError("General section is not supported", line_no);
    return model;
}

}  // namespace dcoflow::exact

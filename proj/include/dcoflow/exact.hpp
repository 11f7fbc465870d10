#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcoflow/model.hpp"

namespace dcoflow::exact {

inline constexpr std::size_t kSigmaWcarLimit = 8;

struct SigmaWcarResult {
    double opt_weight = 0.0;
    std::vector<CoflowId> accepted;  // ascending
    std::vector<CoflowId> order;     // a feasible order of `accepted`, EDD when EDD is feasible
    // Every feasible subset was also feasible in EDD order.
    bool edd_consistent = true;
};

// True iff serving `order` back to back meets every deadline: for each k and
// each port k uses, the processing time of k and of everything before it on
// that port stays within T_k.
bool order_feasible(const Instance& instance, std::span<const CoflowId> order);

// Exhaustive sigma-WCAR optimum over all subsets and permutations.
// Ties: smaller cardinality, then lexicographically smaller id set.
// SizeError when N > kSigmaWcarLimit.
SigmaWcarResult brute_force_sigma_wcar(const Instance& instance);

enum class Sense { le, ge, eq };

struct Term {
    std::string var;
    double coef = 0.0;

    bool operator==(const Term&) const = default;
};

struct Row {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;

    bool operator==(const Row&) const = default;
};

// sigma-WCAR integer program. Binaries z_k (accepted), d_k_j (k before j),
// y_j_k (j accepted and before k); continuous c_l_k >= 0 (completion bound
// of k on port l). Row families, by name prefix:
//   od1  d_k_j + d_j_k = 1                         k < j
//   od2  d_a_b + d_b_c + d_c_a <= 2                distinct ordered triples
//   y1a/y1b/y1c  y_j_k <= z_j, y_j_k <= d_j_k, y_j_k >= z_j + d_j_k - 1
//   lb   c_l_k - sum_j p_l_j y_j_k - p_l_k z_k >= 0
//   dl   c_l_k - T_k z_k <= 0                       ports used by k
struct IlpModel {
    std::string objective_name = "obj";
    std::vector<Term> objective;  // maximized
    std::vector<Row> rows;
    std::vector<std::string> binaries;
    std::vector<std::string> continuous;  // lower bound 0, no upper bound

    std::size_t count_rows(std::string_view family) const;
    bool operator==(const IlpModel&) const = default;
};

// PreconditionError on an empty instance.
IlpModel build_ilp(const Instance& instance);

// LP text: Maximize / Subject To / Bounds / Binary / End. Lines wrap near 200 columns.
void write_lp(const IlpModel& model, std::ostream& out);
void export_ilp(const Instance& instance, const std::filesystem::path& path);

// Reads the subset of the LP format written by write_lp. ParseError with line number.
IlpModel parse_lp(std::istream& in);

}  // namespace dcoflow::exact

#pragma once

#include "vcnet/ltl.hpp"
#include "vcnet/net.hpp"
#include "vcnet/structure.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vcnet {

// CNF with variables 1..n partitioned into parts 1..k, each with a target
// number of true variables. Literals are signed variable numbers.
struct pwsat_instance
{
    std::size_t num_vars = 0;
    std::vector<std::vector<int>> clauses;
    std::vector<std::size_t> part;   // per variable (index 0 is variable 1), values 1..k
    std::vector<std::size_t> target; // per part (index 0 is part 1)
    // Optional path decomposition of the primal graph, bags of variables.
    std::optional<std::vector<std::vector<std::size_t>>> decomposition;

    [[nodiscard]] std::size_t num_parts() const { return target.size(); }
    friend bool operator==(const pwsat_instance&, const pwsat_instance&) = default;
};

// Throws parse_error / malformed_instance.
[[nodiscard]] pwsat_instance parse_pwsat(std::string_view text);
[[nodiscard]] std::string format_pwsat(const pwsat_instance& inst);
void validate(const pwsat_instance& inst);

// Primal graph on vertices v1..vn.
[[nodiscard]] flow_graph primal_graph(const pwsat_instance& inst);
// Optimal path decomposition of a graph by vertex-separation search;
// at most 20 vertices.
[[nodiscard]] std::vector<std::vector<std::size_t>> optimal_path_decomposition(const flow_graph& g);
// The instance's decomposition, or an optimal one when absent (<= 15
// variables). Throws malformed_instance if the supplied one is invalid.
[[nodiscard]] std::vector<std::vector<std::size_t>> primal_decomposition(const pwsat_instance& inst);
[[nodiscard]] std::size_t decomposition_width(const std::vector<std::vector<std::size_t>>& bags);
// Clause indices ordered by the first bag holding all their variables.
[[nodiscard]] std::vector<std::size_t> clause_order(const pwsat_instance& inst,
                                                    const std::vector<std::vector<std::size_t>>& bags);

// Target marking is {s, g}.
[[nodiscard]] net_document sat_to_net(const pwsat_instance& inst);
[[nodiscard]] path_decomposition build_reduction_decomposition(const pwsat_instance& inst);
[[nodiscard]] bool brute_force_ppwsat(const pwsat_instance& inst);

// Variables over the shared domain 1..dom; each constraint lists its
// variables and admissible tuples.
struct csp_instance
{
    struct constraint
    {
        std::vector<std::string> vars;
        std::vector<std::vector<std::size_t>> tuples;
        friend bool operator==(const constraint&, const constraint&) = default;
    };
    std::vector<std::string> vars;
    std::size_t dom = 0;
    std::vector<constraint> constraints;

    // Most constraints any variable occurs in.
    [[nodiscard]] std::size_t degree() const;
    friend bool operator==(const csp_instance&, const csp_instance&) = default;
};

[[nodiscard]] csp_instance parse_csp(std::string_view text);
[[nodiscard]] std::string format_csp(const csp_instance& inst);
void validate(const csp_instance& inst);
// Target marking is {g}.
[[nodiscard]] net_document csp_to_net(const csp_instance& inst);
[[nodiscard]] bool brute_force_csp(const csp_instance& inst);

// Bipartite red/blue digraph with signed arcs. Per blue vertex: red vertices
// that must be pebbled (+ in) or unpebbled (- in) to enable it, and the
// red vertices it pebbles (+ out) or unpebbles (- out).
struct pebbling_instance
{
    struct blue_vertex
    {
        std::string name;
        place_set requires_on;
        place_set requires_off;
        place_set pebbles;
        place_set unpebbles;
        friend bool operator==(const blue_vertex&, const blue_vertex&) = default;
    };
    std::vector<std::string> red;
    std::vector<blue_vertex> blue;
    friend bool operator==(const pebbling_instance&, const pebbling_instance&) = default;
};

[[nodiscard]] pebbling_instance parse_pebbling(std::string_view text);
[[nodiscard]] std::string format_pebbling(const pebbling_instance& inst);
[[nodiscard]] pebbling_instance net_to_pebbling(const petri_net& net, const marking& m0, std::size_t goal);
// Blue moves from the empty state to the all-pebbled state, if any.
[[nodiscard]] std::optional<std::vector<std::size_t>> pebbling_reachable(const pebbling_instance& inst,
                                                                         std::size_t limit = 1'000'000);

// Places are the variables plus g1, g2; every assignment to the variables
// is the restriction of some reachable marking.
[[nodiscard]] net_document formula_gadget_net(const std::vector<std::string>& vars);
// !(true U f)
[[nodiscard]] formula gadget_property(const formula& f);
// Propositional satisfiability by enumeration over atoms(f).
[[nodiscard]] bool brute_force_sat(const formula& f);

// Controller p1..p4 drawing from a, b, c units of three raw materials.
[[nodiscard]] net_document manufacturing_system(std::size_t a, std::size_t b, std::size_t c);

} // namespace vcnet

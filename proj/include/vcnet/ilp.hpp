#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace vcnet {

enum class relation { le, eq, ge };

struct linear_term
{
    std::size_t var;
    std::int64_t coef;
};

struct linear_row
{
    std::vector<linear_term> terms;
    relation rel;
    std::int64_t rhs;
    std::string name;
};

// Integer variables with bounds [0, upper] and linear rows.
class linear_system
{
public:
    std::size_t add_variable(std::string name, std::int64_t upper);
    void add_row(std::vector<linear_term> terms, relation rel, std::int64_t rhs, std::string name = {});

    [[nodiscard]] std::size_t num_variables() const { return upper_.size(); }
    [[nodiscard]] const std::vector<std::int64_t>& upper() const { return upper_; }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] const std::vector<linear_row>& rows() const { return rows_; }

    [[nodiscard]] bool satisfied_by(const std::vector<std::int64_t>& x) const;
    // LP-style text rendering for debugging.
    [[nodiscard]] std::string to_lp(const std::string& title = {}) const;

private:
    std::vector<std::string> names_;
    std::vector<std::int64_t> upper_;
    std::vector<linear_row> rows_;
};

struct ilp_options
{
    bool lp_bound = true;               // prune and branch with the LP relaxation
    std::size_t node_limit = 2'000'000; // branch-and-bound nodes before limit_exceeded
};

struct ilp_stats
{
    std::size_t nodes = 0;
    std::size_t lp_solves = 0;
};

// Satisfying assignment or none. Deterministic; throws limit_exceeded.
[[nodiscard]] std::optional<std::vector<std::int64_t>> feasible(const linear_system& sys, const ilp_options& opt = {},
                                                                ilp_stats* stats = nullptr);

// LP relaxation over the given bounds. Returns a point or none if the
// relaxation is infeasible. Minimises the sum of the variables.
[[nodiscard]] std::optional<std::vector<double>> solve_relaxation(const linear_system& sys,
                                                                  const std::vector<std::int64_t>& lower,
                                                                  const std::vector<std::int64_t>& upper);

// Directed multigraph whose edges carry an optional label (an interface
// index; none for unconstrained edges).
struct labelled_graph
{
    struct edge
    {
        std::size_t from;
        std::size_t to;
        std::optional<std::size_t> label;
    };
    std::size_t num_nodes = 0;
    std::size_t num_labels = 0;
    std::vector<edge> edges;
};

struct flow_query
{
    std::size_t source;
    std::size_t target;
    std::vector<std::int64_t> budget; // per label: uses <= budget
    std::vector<bool> exhaust;        // per label: uses == budget
};

struct flow_options
{
    bool heuristic = true;     // try a cheapest-path witness before solving
    std::size_t max_cuts = 100;
    std::size_t search_limit = 2'000'000;
    ilp_options ilp{};
    std::ostream* dump = nullptr; // receives every linear system solved
};

struct flow_result
{
    std::vector<std::int64_t> multiplicity; // per edge
    std::size_t cuts = 0;
    bool from_search = false; // produced by the fallback search
};

// Edge multiplicities of a walk from source to target (for source == target,
// a nonempty closed walk) that uses each label within budget and exhausts
// the marked labels. Solved as flow conservation + budget rows with lazy
// connectivity cuts.
[[nodiscard]] std::optional<flow_result> connected_path_flow(const labelled_graph& g, const flow_query& q,
                                                             const flow_options& opt = {});

// The same question decided by search over (node, uses-per-label) states.
// Returns the walk as an edge sequence. Throws limit_exceeded.
[[nodiscard]] std::optional<std::vector<std::size_t>> budget_search(const labelled_graph& g, const flow_query& q,
                                                                    std::size_t limit = 2'000'000);

// Checks the flow rows (conservation, budgets, exhaustion) exactly.
[[nodiscard]] bool flow_rows_hold(const labelled_graph& g, const flow_query& q, const std::vector<std::int64_t>& mu);

// An edge sequence from source to target using edge e exactly mu[e] times,
// if the multiplicities form a single walk.
[[nodiscard]] std::optional<std::vector<std::size_t>> reconstruct_walk(const labelled_graph& g, std::size_t source,
                                                                       std::size_t target,
                                                                       const std::vector<std::int64_t>& mu);

} // namespace vcnet

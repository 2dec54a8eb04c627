#pragma once

#include "vcnet/automaton.hpp"
#include "vcnet/explicit_mc.hpp"
#include "vcnet/ilp.hpp"
#include "vcnet/net.hpp"
#include "vcnet/structure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace vcnet {

// Cover, formula places and one designated place per interface, with the
// per-interface budget of initial tokens outside that set.
struct special_set
{
    place_set cover;
    place_set members;                                 // S
    std::vector<std::size_t> places;                   // S ascending; bit i of an eca_state is places[i]
    std::vector<std::size_t> prop_places;              // formula places
    interface_map interfaces;
    std::vector<std::optional<std::size_t>> designated; // per interface
    std::vector<std::int64_t> budget;                  // per interface
    std::vector<std::vector<std::size_t>> outside;     // per interface: places not in S

    [[nodiscard]] std::optional<std::size_t> bit_of(std::size_t place) const;
};

// Throws invalid_cover, alphabet_mismatch, or structural_violation when the
// neighbourhood/interface counts exceed their bounds in the cover size.
[[nodiscard]] special_set special_places(const petri_net& net, const marking& m0, const place_set& cover,
                                         const std::vector<std::string>& props);

// 2^(2k) and 4^(2^(2k)), saturated at the largest size_t.
[[nodiscard]] std::size_t neighbourhood_bound(std::size_t k);
[[nodiscard]] std::size_t interface_bound(std::size_t k);

using eca_state = std::uint64_t;

// A net transition seen through S.
struct eca_move
{
    std::size_t transition;
    eca_state pre = 0;  // inputs in S
    eca_state post = 0; // outputs in S
    std::optional<std::size_t> consumes; // interface of a non-special input
    bool produces_outside = false;       // has a non-special output
    bool all_special = false;
};

struct eca
{
    struct edge
    {
        std::size_t from;
        std::size_t to;
        std::optional<std::size_t> label; // interface; none for the unconstrained label
        std::size_t transition;
    };
    struct overflow
    {
        std::size_t state;
        std::size_t transition;
        std::size_t place;
    };

    std::vector<std::size_t> special;       // S place indices, ascending
    std::vector<std::string> special_names;
    std::vector<eca_move> moves;
    std::vector<std::int64_t> budget;       // per interface
    eca_state initial = 0;
    std::vector<eca_state> states;          // reachable from initial; states[0] == initial
    std::unordered_map<eca_state, std::size_t> index;
    std::vector<edge> edges;
    std::vector<bool> final_states;         // per state
    std::vector<std::vector<bool>> exhaust; // per state, per interface
    std::vector<overflow> overflows;        // firings that would double-mark a special place

    [[nodiscard]] std::size_t num_interfaces() const { return budget.size(); }
    // Per the definition, for any subset of S.
    [[nodiscard]] bool is_final(eca_state s) const;
    [[nodiscard]] std::vector<bool> exhausted(eca_state s) const;
    [[nodiscard]] bool has_edge(eca_state from, std::optional<std::size_t> label, eca_state to) const;
    [[nodiscard]] eca_state restrict(const marking& m) const;
    [[nodiscard]] labelled_graph graph() const;
    [[nodiscard]] std::string format_state(eca_state s) const;
};

// Throws structural_violation when a transition touches two non-special
// places or |S| > 63.
[[nodiscard]] eca build_eca(const petri_net& net, const marking& m0, const special_set& special);

// Word of S-subsets with one label per step. With `maximal`, the final-state
// and exhaustion clauses apply to the last position.
[[nodiscard]] bool valid_run_check(const eca& a, const std::vector<eca_state>& word,
                                   const std::vector<std::optional<std::size_t>>& labels, bool maximal = true);

struct product_graph
{
    automaton_kind kind = automaton_kind::finite;
    std::vector<std::pair<std::size_t, std::size_t>> nodes; // (eca state index, automaton state)
    labelled_graph graph;
    std::vector<std::size_t> edge_transition;               // net transition per edge
    std::vector<std::size_t> initial;
    // Finite: eca state final and an accepting completion step exists.
    // Buchi: automaton state accepting.
    std::vector<bool> accepting;
};

// Reachable part of the synchronous product; the automaton reads the letter
// of the source state. Throws alphabet_mismatch when a proposition is not in S.
[[nodiscard]] product_graph build_product(const eca& a, const word_automaton& aut);

struct product_path
{
    std::vector<std::size_t> edges;         // product edges
    std::optional<std::size_t> loop_start;  // lasso: edges[loop_start..] repeat
};

struct acceptance_stats
{
    std::size_t queries = 0;
    std::size_t cuts = 0;
    std::size_t search_fallbacks = 0;
};

[[nodiscard]] std::optional<product_path> accepting_path_finite(const product_graph& prod, const eca& a,
                                                                const flow_options& opt = {},
                                                                acceptance_stats* stats = nullptr);
[[nodiscard]] std::optional<product_path> accepting_lasso(const product_graph& prod, const eca& a,
                                                          const flow_options& opt = {},
                                                          acceptance_stats* stats = nullptr);

// Same question by search over (node, uses-per-interface). Throws
// limit_exceeded.
[[nodiscard]] bool budget_graph_check(const product_graph& prod, const eca& a, std::size_t limit = 2'000'000);

struct fpt_options
{
    std::optional<place_set> cover; // minimum cover when absent
    flow_options flow{};
    bool check_one_safety = true;
};

struct fpt_report
{
    bool holds = true;
    std::string violation; // "finite" or "infinite" when the property fails
    std::optional<product_path> witness;
    std::vector<std::size_t> witness_transitions; // net transitions along the witness
    std::size_t cover_size = 0;
    std::size_t special_size = 0;
    std::size_t num_interfaces = 0;
    std::size_t eca_states = 0;
    std::size_t eca_edges = 0;
    std::size_t product_nodes = 0;
    acceptance_stats acceptance{};
};

// `bad` recognises violations. Throws one_safety_violation when an overflow
// on a special place is reachable within the budgets.
[[nodiscard]] fpt_report fpt_model_check(const petri_net& net, const marking& m0, const property_automata& bad,
                                         const fpt_options& opt = {});
[[nodiscard]] fpt_report fpt_model_check(const petri_net& net, const marking& m0, const formula& phi,
                                         const fpt_options& opt = {});

} // namespace vcnet

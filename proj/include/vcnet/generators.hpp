#pragma once

#include "vcnet/ilp.hpp"
#include "vcnet/ltl.hpp"
#include "vcnet/net.hpp"
#include "vcnet/reductions.hpp"

#include <random>
#include <string>
#include <vector>

namespace vcnet {

using rng_type = std::mt19937_64;

struct net_shape
{
    std::size_t max_places = 8;
    std::size_t max_transitions = 10;
    std::size_t min_places = 1;
    double marked = 0.4; // chance a place starts marked
};

// Random net whose reachable markings are all 1-safe (checked by search,
// rejected samples are redrawn). Places are p0.., transitions t0..
[[nodiscard]] net_document random_safe_net(rng_type& rng, const net_shape& shape = {});
// A single-token controller h0.. that consumes and occasionally returns
// marked resource places r0..; every transition touches a controller place.
[[nodiscard]] net_document random_hub_net(rng_type& rng, std::size_t max_hubs = 4, std::size_t max_resources = 6,
                                          std::size_t max_transitions = 10);

// Random LTL formula of syntactic depth <= depth over the given atoms.
[[nodiscard]] formula random_ltl(rng_type& rng, const std::vector<std::string>& atoms, std::size_t depth);
// Boolean connectives only.
[[nodiscard]] formula random_propositional(rng_type& rng, const std::vector<std::string>& atoms, std::size_t depth);

[[nodiscard]] pwsat_instance random_pwsat(rng_type& rng, std::size_t max_vars = 8, std::size_t max_clauses = 6);
[[nodiscard]] csp_instance random_csp(rng_type& rng, std::size_t max_vars = 5, std::size_t max_dom = 3);

// Random labelled digraph with a query over it.
struct flow_instance
{
    labelled_graph graph;
    flow_query query;
};
[[nodiscard]] flow_instance random_flow_instance(rng_type& rng, std::size_t max_nodes = 40, std::size_t max_labels = 3,
                                                 std::int64_t max_budget = 3);

} // namespace vcnet

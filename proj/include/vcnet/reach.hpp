#pragma once

#include "vcnet/net.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace vcnet {

inline constexpr std::size_t default_node_limit = 1'000'000;

struct reach_edge
{
    std::size_t from;
    std::size_t transition;
    std::size_t to;
    friend bool operator==(const reach_edge&, const reach_edge&) = default;
};

// Explicit state space. Nodes are sorted by marking order, edges by
// (from, transition).
struct reach_graph
{
    std::vector<marking> nodes;
    std::vector<reach_edge> edges;
    std::size_t initial = 0;
    std::vector<std::size_t> deadlocks;

    [[nodiscard]] std::optional<std::size_t> index_of(const marking& m) const;
    // Offsets into `edges` per node: edges of node i are [out_begin[i], out_begin[i+1]).
    [[nodiscard]] std::vector<std::size_t> out_offsets() const;
};

[[nodiscard]] reach_graph reachability_graph(const petri_net& net, const marking& m0,
                                             std::size_t node_limit = default_node_limit);

[[nodiscard]] bool is_reachable(const petri_net& net, const marking& m0, const marking& target,
                                std::size_t node_limit = default_node_limit);
[[nodiscard]] bool is_coverable(const petri_net& net, const marking& m0, const marking& target,
                                std::size_t node_limit = default_node_limit);

// Throws one_safety_violation at the first offending firing.
void verify_one_safe(const petri_net& net, const marking& m0, std::size_t node_limit = default_node_limit);

[[nodiscard]] std::size_t count_reachable(const petri_net& net, const marking& m0,
                                          std::size_t node_limit = default_node_limit);

// Every deadlock reachable from m0, found by a stubborn-set reduced search
// that visits far fewer markings than full exploration. Needs a 1-safe net.
[[nodiscard]] std::vector<marking> reachable_deadlocks(const petri_net& net, const marking& m0,
                                                       std::size_t node_limit = default_node_limit);
// Shortest firing sequence from m0 to some marking satisfying `goal`.
[[nodiscard]] std::optional<std::vector<std::size_t>>
find_firing_sequence(const petri_net& net, const marking& m0, const std::function<bool(const marking&)>& goal,
                     std::size_t node_limit = default_node_limit);

} // namespace vcnet

#pragma once

#include <cstddef>
#include <vector>

namespace vcnet {

struct scc_result
{
    std::vector<std::size_t> component; // per node
    std::size_t count = 0;
    std::vector<bool> nontrivial;       // per component: has an internal edge
};

// Tarjan's algorithm, iterative. Component ids are in reverse topological
// order of the condensation.
[[nodiscard]] scc_result strongly_connected_components(const std::vector<std::vector<std::size_t>>& adj);

} // namespace vcnet

#include "vcnet/scc.hpp"

#include <algorithm>
#include <limits>

namespace vcnet {

scc_result strongly_connected_components(const std::vector<std::vector<std::size_t>>& adj)
{
    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    const std::size_t n = adj.size();
    scc_result r;
    r.component.assign(n, unvisited);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> frames; // node, next edge
    std::size_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, next] = frames.back();
            if (next < adj[v].size()) {
                const std::size_t w = adj[v][next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    r.component[w] = r.count;
                } while (w != done);
                ++r.count;
            }
        }
    }
    r.nontrivial.assign(r.count, false);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w : adj[v])
            if (r.component[v] == r.component[w])
                r.nontrivial[r.component[v]] = true;
    return r;
}

} // namespace vcnet

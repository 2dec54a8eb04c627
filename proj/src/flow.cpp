#include "vcnet/errors.hpp"
#include "vcnet/ilp.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace vcnet {

namespace {

constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

void check_query(const labelled_graph& g, const flow_query& q)
{
    if (q.source >= g.num_nodes || q.target >= g.num_nodes)
        throw error("flow query endpoint out of range");
    if (q.budget.size() != g.num_labels || q.exhaust.size() != g.num_labels)
        throw error("flow query label vectors do not match the graph");
    for (const auto& e : g.edges)
        if (e.from >= g.num_nodes || e.to >= g.num_nodes || (e.label && *e.label >= g.num_labels))
            throw error("labelled graph edge out of range");
}

bool usable(const labelled_graph::edge& e, const flow_query& q)
{
    return !e.label || q.budget[*e.label] > 0;
}

std::vector<bool> reachable(const labelled_graph& g, const flow_query& q, std::size_t start, bool forward)
{
    std::vector<std::vector<std::size_t>> adj(g.num_nodes);
    for (const auto& e : g.edges)
        if (usable(e, q))
            (forward ? adj[e.from] : adj[e.to]).push_back(forward ? e.to : e.from);
    std::vector<bool> seen(g.num_nodes, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    return seen;
}

std::vector<std::int64_t> walk_multiplicity(const labelled_graph& g, const std::vector<std::size_t>& walk)
{
    std::vector<std::int64_t> mu(g.edges.size(), 0);
    for (std::size_t e : walk)
        ++mu[e];
    return mu;
}

// Walk with the fewest labelled edges (nonempty when source == target).
std::optional<std::vector<std::size_t>> cheapest_walk(const labelled_graph& g, const flow_query& q)
{
    // Node copies: 0 = before the first step, 1 = after at least one step.
    const std::size_t n = g.num_nodes;
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (usable(g.edges[e], q))
            out[g.edges[e].from].push_back(e);
    std::vector<std::size_t> dist(2 * n, none), via(2 * n, none), parent(2 * n, none);
    std::deque<std::size_t> work;
    dist[q.source] = 0;
    work.push_back(q.source);
    while (!work.empty()) {
        const std::size_t v = work.front();
        work.pop_front();
        for (std::size_t e : out[v % n]) {
            const std::size_t w = n + g.edges[e].to;
            const std::size_t cost = g.edges[e].label ? 1 : 0;
            if (dist[v] + cost < dist[w]) {
                dist[w] = dist[v] + cost;
                via[w] = e;
                parent[w] = v;
                cost ? work.push_back(w) : work.push_front(w);
            }
        }
    }
    std::size_t goal = n + q.target;
    if (dist[goal] == none) {
        if (q.source != q.target || dist[q.target] == none)
            return std::nullopt;
        goal = q.target;
    }
    if (q.source == q.target && goal < n)
        return std::nullopt;
    std::vector<std::size_t> walk;
    for (std::size_t v = goal; parent[v] != none; v = parent[v])
        walk.push_back(via[v]);
    std::reverse(walk.begin(), walk.end());
    return walk;
}

} // namespace

bool flow_rows_hold(const labelled_graph& g, const flow_query& q, const std::vector<std::int64_t>& mu)
{
    if (mu.size() != g.edges.size())
        return false;
    std::vector<std::int64_t> balance(g.num_nodes, 0), uses(g.num_labels, 0);
    std::int64_t source_out = 0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (mu[e] < 0)
            return false;
        const auto& ed = g.edges[e];
        balance[ed.from] += mu[e];
        balance[ed.to] -= mu[e];
        if (ed.from == q.source)
            source_out += mu[e];
        if (ed.label)
            uses[*ed.label] += mu[e];
    }
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        std::int64_t want = 0;
        if (q.source != q.target)
            want = (v == q.source ? 1 : 0) - (v == q.target ? 1 : 0);
        if (balance[v] != want)
            return false;
    }
    if (q.source == q.target && source_out < 1)
        return false;
    for (std::size_t l = 0; l < g.num_labels; ++l) {
        if (uses[l] > q.budget[l])
            return false;
        if (q.exhaust[l] && uses[l] != q.budget[l])
            return false;
    }
    return true;
}

std::optional<std::vector<std::size_t>> reconstruct_walk(const labelled_graph& g, std::size_t source,
                                                         std::size_t target, const std::vector<std::int64_t>& mu)
{
    if (mu.size() != g.edges.size())
        return std::nullopt;
    const std::int64_t total = std::accumulate(mu.begin(), mu.end(), std::int64_t{0});
    if (total == 0) {
        if (source == target)
            return std::vector<std::size_t>{};
        return std::nullopt;
    }
    std::vector<std::vector<std::size_t>> adj(g.num_nodes);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (mu[e] > 0)
            adj[g.edges[e].from].push_back(e);
    std::vector<std::int64_t> rem(mu);
    std::vector<std::size_t> ptr(g.num_nodes, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{source, none}};
    std::vector<std::size_t> walk;
    while (!stack.empty()) {
        const std::size_t v = stack.back().first;
        while (ptr[v] < adj[v].size() && rem[adj[v][ptr[v]]] == 0)
            ++ptr[v];
        if (ptr[v] < adj[v].size()) {
            const std::size_t e = adj[v][ptr[v]];
            --rem[e];
            stack.emplace_back(g.edges[e].to, e);
        } else {
            if (stack.back().second != none)
                walk.push_back(stack.back().second);
            stack.pop_back();
        }
    }
    std::reverse(walk.begin(), walk.end());
    if (static_cast<std::int64_t>(walk.size()) != total)
        return std::nullopt;
    std::size_t at = source;
    for (std::size_t e : walk) {
        if (g.edges[e].from != at)
            return std::nullopt;
        at = g.edges[e].to;
    }
    if (at != target)
        return std::nullopt;
    return walk;
}

std::optional<std::vector<std::size_t>> budget_search(const labelled_graph& g, const flow_query& q, std::size_t limit)
{
    check_query(g, q);
    // State code: node, moved flag, per-label uses in mixed radix.
    std::vector<std::uint64_t> radix(g.num_labels);
    std::uint64_t span = 1;
    for (std::size_t l = 0; l < g.num_labels; ++l) {
        if (q.budget[l] < 0)
            return std::nullopt;
        radix[l] = span;
        const auto width = static_cast<std::uint64_t>(q.budget[l]) + 1;
        if (span > (std::uint64_t{1} << 50) / width)
            throw limit_exceeded("budget search state space too large", 0);
        span *= width;
    }
    std::vector<std::vector<std::size_t>> out(g.num_nodes);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        out[g.edges[e].from].push_back(e);

    struct info
    {
        std::uint64_t parent;
        std::size_t via;
    };
    auto encode = [&](std::size_t node, bool moved, std::uint64_t uses) {
        return (static_cast<std::uint64_t>(node) * 2 + (moved ? 1 : 0)) * span + uses;
    };
    std::unordered_map<std::uint64_t, info> seen;
    std::deque<std::uint64_t> work;
    const std::uint64_t start = encode(q.source, false, 0);
    seen.emplace(start, info{start, none});
    work.push_back(start);
    auto is_goal = [&](std::uint64_t s) {
        const std::uint64_t uses = s % span;
        const std::uint64_t rest = s / span;
        if (rest / 2 != q.target || (q.source == q.target && rest % 2 == 0))
            return false;
        for (std::size_t l = 0; l < g.num_labels; ++l)
            if (q.exhaust[l] && static_cast<std::int64_t>((uses / radix[l]) % (q.budget[l] + 1)) != q.budget[l])
                return false;
        return true;
    };
    while (!work.empty()) {
        const std::uint64_t s = work.front();
        work.pop_front();
        if (is_goal(s)) {
            std::vector<std::size_t> walk;
            for (std::uint64_t x = s; seen.at(x).via != none; x = seen.at(x).parent)
                walk.push_back(seen.at(x).via);
            std::reverse(walk.begin(), walk.end());
            return walk;
        }
        const std::uint64_t uses = s % span;
        const std::size_t node = static_cast<std::size_t>(s / span / 2);
        for (std::size_t e : out[node]) {
            std::uint64_t nu = uses;
            if (const auto& lab = g.edges[e].label) {
                const auto used = static_cast<std::int64_t>((uses / radix[*lab]) % (q.budget[*lab] + 1));
                if (used >= q.budget[*lab])
                    continue;
                nu += radix[*lab];
            }
            const std::uint64_t t = encode(g.edges[e].to, true, nu);
            if (seen.contains(t))
                continue;
            if (seen.size() >= limit)
                throw limit_exceeded("budget search exceeded state limit", seen.size());
            seen.emplace(t, info{s, e});
            work.push_back(t);
        }
    }
    return std::nullopt;
}

std::optional<flow_result> connected_path_flow(const labelled_graph& g, const flow_query& q, const flow_options& opt)
{
    check_query(g, q);
    for (auto b : q.budget)
        if (b < 0)
            return std::nullopt;
    const auto fwd = reachable(g, q, q.source, true);
    const auto bwd = reachable(g, q, q.target, false);
    if (!fwd[q.target])
        return std::nullopt;
    std::vector<bool> keep(g.num_nodes);
    std::size_t kept = 0;
    for (std::size_t v = 0; v < g.num_nodes; ++v)
        if ((keep[v] = fwd[v] && bwd[v]))
            ++kept;
    std::vector<std::size_t> edges; // restricted edge -> graph edge
    std::vector<std::int64_t> label_edges(g.num_labels, 0);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (keep[g.edges[e].from] && keep[g.edges[e].to] && usable(g.edges[e], q)) {
            edges.push_back(e);
            if (g.edges[e].label)
                ++label_edges[*g.edges[e].label];
        }
    for (std::size_t l = 0; l < g.num_labels; ++l)
        if (q.exhaust[l] && q.budget[l] > 0 && label_edges[l] == 0)
            return std::nullopt;

    const bool unconstrained = std::all_of(label_edges.begin(), label_edges.end(), [](auto c) { return c == 0; });
    if (opt.heuristic || unconstrained) {
        auto walk = cheapest_walk(g, q);
        if (walk) {
            auto mu = walk_multiplicity(g, *walk);
            if (flow_rows_hold(g, q, mu))
                return flow_result{std::move(mu), 0, false};
        }
        if (unconstrained)
            return std::nullopt;
    }

    std::int64_t total_budget = 0;
    for (auto b : q.budget)
        total_budget += b;
    const std::int64_t free_bound = (total_budget + 1) * static_cast<std::int64_t>(kept);
    linear_system sys;
    for (std::size_t e : edges) {
        const auto& ed = g.edges[e];
        const std::int64_t ub = ed.label ? q.budget[*ed.label] : free_bound;
        sys.add_variable("mu_" + std::to_string(ed.from) + "_" + std::to_string(ed.to) + "_" + std::to_string(e), ub);
    }
    std::vector<std::vector<linear_term>> balance(g.num_nodes);
    std::vector<std::vector<linear_term>> uses(g.num_labels);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& ed = g.edges[edges[i]];
        balance[ed.from].push_back({i, 1});
        balance[ed.to].push_back({i, -1});
        if (ed.label)
            uses[*ed.label].push_back({i, 1});
    }
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        if (!keep[v])
            continue;
        std::int64_t want = 0;
        if (q.source != q.target)
            want = (v == q.source ? 1 : 0) - (v == q.target ? 1 : 0);
        sys.add_row(balance[v], relation::eq, want, "flow_" + std::to_string(v));
    }
    if (q.source == q.target) {
        std::vector<linear_term> out;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (g.edges[edges[i]].from == q.source)
                out.push_back({i, 1});
        sys.add_row(out, relation::ge, 1, "leave_source");
    }
    for (std::size_t l = 0; l < g.num_labels; ++l) {
        if (uses[l].empty())
            continue;
        sys.add_row(uses[l], relation::le, q.budget[l], "budget_" + std::to_string(l));
        if (q.exhaust[l])
            sys.add_row(uses[l], relation::eq, q.budget[l], "exhaust_" + std::to_string(l));
    }

    flow_result result;
    for (;;) {
        if (opt.dump)
            *opt.dump << sys.to_lp("flow system, cuts " + std::to_string(result.cuts)) << '\n';
        const auto x = feasible(sys, opt.ilp);
        if (!x)
            return std::nullopt;
        // Components of the support that miss the source.
        std::vector<std::size_t> comp(g.num_nodes);
        std::iota(comp.begin(), comp.end(), 0);
        auto find = [&](std::size_t v) {
            while (comp[v] != v)
                v = comp[v] = comp[comp[v]];
            return v;
        };
        std::vector<bool> active(g.num_nodes, false);
        for (std::size_t i = 0; i < edges.size(); ++i)
            if ((*x)[i] > 0) {
                const auto& ed = g.edges[edges[i]];
                active[ed.from] = active[ed.to] = true;
                comp[find(ed.from)] = find(ed.to);
            }
        active[q.source] = true;
        std::vector<std::size_t> roots;
        for (std::size_t v = 0; v < g.num_nodes; ++v)
            if (active[v] && find(v) != find(q.source) && std::find(roots.begin(), roots.end(), find(v)) == roots.end())
                roots.push_back(find(v));
        if (roots.empty()) {
            result.multiplicity.assign(g.edges.size(), 0);
            for (std::size_t i = 0; i < edges.size(); ++i)
                result.multiplicity[edges[i]] = (*x)[i];
            return result;
        }
        if (result.cuts >= opt.max_cuts) {
            auto walk = budget_search(g, q, opt.search_limit);
            if (!walk)
                return std::nullopt;
            return flow_result{walk_multiplicity(g, *walk), result.cuts, true};
        }
        for (std::size_t root : roots) {
            // Any edge used inside the stray component forces entry into it:
            // mu_e <= ub_e * (inflow), one row per internal edge.
            std::vector<linear_term> inflow;
            std::vector<std::size_t> inside;
            for (std::size_t i = 0; i < edges.size(); ++i) {
                const auto& ed = g.edges[edges[i]];
                const bool to_in = active[ed.to] && find(ed.to) == root;
                const bool from_in = active[ed.from] && find(ed.from) == root;
                if (from_in && to_in)
                    inside.push_back(i);
                else if (to_in)
                    inflow.push_back({i, 1});
            }
            for (std::size_t i : inside) {
                std::vector<linear_term> row{{i, 1}};
                for (auto t : inflow)
                    row.push_back({t.var, -sys.upper()[i]});
                sys.add_row(std::move(row), relation::le, 0,
                            "cut_" + std::to_string(result.cuts) + "_" + std::to_string(i));
            }
            ++result.cuts;
        }
    }
}

} // namespace vcnet

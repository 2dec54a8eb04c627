#include "vcnet/reach.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace vcnet {

namespace {

// Markings of nets with at most 64 places are packed into one word.
struct word_codec
{
    using state = std::uint64_t;
    using hasher = std::hash<std::uint64_t>;

    const petri_net& net;
    std::vector<std::uint64_t> pre, post;

    explicit word_codec(const petri_net& n) : net{n}
    {
        for (std::size_t t = 0; t < n.num_transitions(); ++t) {
            pre.push_back(pack(n.pre(t)));
            post.push_back(pack(n.post(t)));
        }
    }
    static std::uint64_t pack(const place_set& s)
    {
        std::uint64_t w = 0;
        s.for_each([&](std::size_t p) { w |= std::uint64_t{1} << p; });
        return w;
    }
    [[nodiscard]] state encode(const marking& m) const { return pack(m); }
    [[nodiscard]] marking decode(state s) const
    {
        marking m(net.num_places());
        while (s != 0) {
            m.set(static_cast<std::size_t>(std::countr_zero(s)));
            s &= s - 1;
        }
        return m;
    }
    [[nodiscard]] bool enabled(state s, std::size_t t) const { return (s & pre[t]) == pre[t]; }
    [[nodiscard]] state fire(state s, std::size_t t) const
    {
        const state rest = s & ~pre[t];
        if (const state clash = rest & post[t]; clash != 0)
            throw one_safety_violation(net.transition_name(t),
                                       net.place_name(static_cast<std::size_t>(std::countr_zero(clash))));
        return rest | post[t];
    }
    [[nodiscard]] bool covers(state s, state target) const { return (s & target) == target; }
};

struct set_codec
{
    using state = marking;
    using hasher = place_set_hash;

    const petri_net& net;

    [[nodiscard]] state encode(const marking& m) const { return m; }
    [[nodiscard]] marking decode(const state& s) const { return s; }
    [[nodiscard]] bool enabled(const state& s, std::size_t t) const { return is_enabled(net, s, t); }
    [[nodiscard]] state fire(const state& s, std::size_t t) const { return vcnet::fire(net, s, t); }
    [[nodiscard]] bool covers(const state& s, const state& target) const { return target.is_subset_of(s); }
};

template <typename Codec>
struct search
{
    using state = typename Codec::state;

    const Codec& codec;
    std::vector<state> states;
    std::vector<std::size_t> parent;
    std::vector<std::size_t> via;
    std::unordered_map<state, std::size_t, typename Codec::hasher> index;

    // BFS from s0. Stops early when stop(state) holds and returns that state's
    // index. on_edge(from, t, to) sees every firing.
    template <typename Stop, typename OnEdge>
    std::optional<std::size_t> run(const state& s0, std::size_t limit, Stop stop, OnEdge on_edge)
    {
        const std::size_t nt = codec.net.num_transitions();
        add(s0, static_cast<std::size_t>(-1), static_cast<std::size_t>(-1), limit);
        for (std::size_t head = 0; head < states.size(); ++head) {
            if (stop(states[head]))
                return head;
            for (std::size_t t = 0; t < nt; ++t) {
                if (!codec.enabled(states[head], t))
                    continue;
                state next = codec.fire(states[head], t);
                auto it = index.find(next);
                std::size_t to;
                if (it == index.end())
                    to = add(std::move(next), head, t, limit);
                else
                    to = it->second;
                on_edge(head, t, to);
            }
        }
        return std::nullopt;
    }

    std::size_t add(state s, std::size_t from, std::size_t t, std::size_t limit)
    {
        if (states.size() >= limit)
            throw limit_exceeded("reachability exploration exceeded node limit " + std::to_string(limit),
                                 states.size());
        const std::size_t id = states.size();
        index.emplace(s, id);
        states.push_back(std::move(s));
        parent.push_back(from);
        via.push_back(t);
        return id;
    }

    [[nodiscard]] std::vector<std::size_t> path_to(std::size_t node) const
    {
        std::vector<std::size_t> seq;
        while (parent[node] != static_cast<std::size_t>(-1)) {
            seq.push_back(via[node]);
            node = parent[node];
        }
        std::reverse(seq.begin(), seq.end());
        return seq;
    }
};

template <typename F>
decltype(auto) with_codec(const petri_net& net, F&& f)
{
    if (net.num_places() <= 64) {
        word_codec c(net);
        return f(c);
    }
    set_codec c{net};
    return f(c);
}

constexpr auto no_stop = [](const auto&) { return false; };
constexpr auto no_edge = [](std::size_t, std::size_t, std::size_t) {};

} // namespace

std::optional<std::size_t> reach_graph::index_of(const marking& m) const
{
    auto it = std::lower_bound(nodes.begin(), nodes.end(), m);
    if (it == nodes.end() || *it != m)
        return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
}

std::vector<std::size_t> reach_graph::out_offsets() const
{
    std::vector<std::size_t> off(nodes.size() + 1, 0);
    for (const auto& e : edges)
        ++off[e.from + 1];
    std::partial_sum(off.begin(), off.end(), off.begin());
    return off;
}

reach_graph reachability_graph(const petri_net& net, const marking& m0, std::size_t node_limit)
{
    return with_codec(net, [&](const auto& codec) {
        search<std::decay_t<decltype(codec)>> s{codec, {}, {}, {}, {}};
        std::vector<reach_edge> raw;
        s.run(codec.encode(m0), node_limit, no_stop,
              [&](std::size_t a, std::size_t t, std::size_t b) { raw.push_back({a, t, b}); });

        const std::size_t n = s.states.size();
        std::vector<marking> decoded;
        decoded.reserve(n);
        for (const auto& st : s.states)
            decoded.push_back(codec.decode(st));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return decoded[a] < decoded[b]; });
        std::vector<std::size_t> rank(n);
        for (std::size_t i = 0; i < n; ++i)
            rank[order[i]] = i;

        reach_graph g;
        g.nodes.reserve(n);
        for (std::size_t i : order)
            g.nodes.push_back(std::move(decoded[i]));
        g.initial = rank[0];
        g.edges.reserve(raw.size());
        std::vector<bool> has_out(n, false);
        for (const auto& e : raw) {
            g.edges.push_back({rank[e.from], e.transition, rank[e.to]});
            has_out[rank[e.from]] = true;
        }
        std::sort(g.edges.begin(), g.edges.end(), [](const reach_edge& a, const reach_edge& b) {
            return a.from != b.from ? a.from < b.from : a.transition < b.transition;
        });
        for (std::size_t i = 0; i < n; ++i)
            if (!has_out[i])
                g.deadlocks.push_back(i);
        return g;
    });
}

bool is_reachable(const petri_net& net, const marking& m0, const marking& target, std::size_t node_limit)
{
    return with_codec(net, [&](const auto& codec) {
        search<std::decay_t<decltype(codec)>> s{codec, {}, {}, {}, {}};
        const auto goal = codec.encode(target);
        return s.run(codec.encode(m0), node_limit, [&](const auto& st) { return st == goal; }, no_edge)
            .has_value();
    });
}

bool is_coverable(const petri_net& net, const marking& m0, const marking& target, std::size_t node_limit)
{
    return with_codec(net, [&](const auto& codec) {
        search<std::decay_t<decltype(codec)>> s{codec, {}, {}, {}, {}};
        const auto goal = codec.encode(target);
        return s.run(codec.encode(m0), node_limit, [&](const auto& st) { return codec.covers(st, goal); }, no_edge)
            .has_value();
    });
}

void verify_one_safe(const petri_net& net, const marking& m0, std::size_t node_limit)
{
    (void)count_reachable(net, m0, node_limit);
}

std::size_t count_reachable(const petri_net& net, const marking& m0, std::size_t node_limit)
{
    return with_codec(net, [&](const auto& codec) {
        search<std::decay_t<decltype(codec)>> s{codec, {}, {}, {}, {}};
        s.run(codec.encode(m0), node_limit, no_stop, no_edge);
        return s.states.size();
    });
}

std::optional<std::vector<std::size_t>>
find_firing_sequence(const petri_net& net, const marking& m0, const std::function<bool(const marking&)>& goal,
                     std::size_t node_limit)
{
    return with_codec(net, [&](const auto& codec) -> std::optional<std::vector<std::size_t>> {
        search<std::decay_t<decltype(codec)>> s{codec, {}, {}, {}, {}};
        auto hit = s.run(codec.encode(m0), node_limit, [&](const auto& st) { return goal(codec.decode(st)); },
                         no_edge);
        if (!hit)
            return std::nullopt;
        return s.path_to(*hit);
    });
}

std::vector<marking> reachable_deadlocks(const petri_net& net, const marking& m0, std::size_t node_limit)
{
    const std::size_t nt = net.num_transitions();
    std::vector<std::vector<std::size_t>> producers(net.num_places());
    for (std::size_t t = 0; t < nt; ++t)
        net.post(t).for_each([&](std::size_t p) { producers[p].push_back(t); });

    // Enabled members of a stubborn set grown from `seed`.
    auto stubborn = [&](const marking& m, std::size_t seed) {
        std::vector<bool> in(nt, false);
        std::vector<std::size_t> work{seed}, fire_now;
        in[seed] = true;
        while (!work.empty()) {
            const std::size_t t = work.back();
            work.pop_back();
            auto add = [&](std::size_t u) {
                if (!in[u]) {
                    in[u] = true;
                    work.push_back(u);
                }
            };
            if (is_enabled(net, m, t)) {
                fire_now.push_back(t);
                net.pre(t).for_each([&](std::size_t p) {
                    for (std::size_t u : net.consumers(p))
                        add(u);
                });
            } else {
                std::optional<std::size_t> scapegoat;
                net.pre(t).for_each([&](std::size_t p) {
                    if (!m.test(p) && (!scapegoat || producers[p].size() < producers[*scapegoat].size()))
                        scapegoat = p;
                });
                for (std::size_t u : producers[*scapegoat])
                    add(u);
            }
        }
        return fire_now;
    };

    std::unordered_set<marking, place_set_hash> seen;
    std::deque<marking> work{m0};
    seen.insert(m0);
    std::vector<marking> deadlocks;
    while (!work.empty()) {
        marking m = std::move(work.front());
        work.pop_front();
        const auto en = enabled(net, m);
        if (en.empty()) {
            deadlocks.push_back(m);
            continue;
        }
        std::vector<std::size_t> best;
        for (std::size_t seed : en) {
            auto cand = stubborn(m, seed);
            if (best.empty() || cand.size() < best.size())
                best = std::move(cand);
            if (best.size() == 1)
                break;
        }
        for (std::size_t t : best) {
            marking next = fire(net, m, t);
            if (seen.count(next))
                continue;
            if (seen.size() >= node_limit)
                throw limit_exceeded("reduced exploration exceeded node limit " + std::to_string(node_limit),
                                     seen.size());
            seen.insert(next);
            work.push_back(std::move(next));
        }
    }
    std::sort(deadlocks.begin(), deadlocks.end());
    return deadlocks;
}

} // namespace vcnet

#include "vcnet/explicit_mc.hpp"

#include "vcnet/scc.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace vcnet {

property_automata violation_automata(const formula& phi)
{
    const formula bad = make_not(phi);
    return {ltl_to_nfa(bad), ltl_to_buchi(bad)};
}

std::vector<std::size_t> proposition_places(const petri_net& net, const std::vector<std::string>& props)
{
    std::vector<std::size_t> out;
    for (const auto& p : props) {
        auto idx = net.place_index(p);
        if (!idx)
            throw alphabet_mismatch("proposition '" + p + "' is not a place of the net");
        out.push_back(*idx);
    }
    return out;
}

letter letter_of(const marking& m, const std::vector<std::size_t>& prop_places)
{
    letter l = 0;
    for (std::size_t i = 0; i < prop_places.size(); ++i)
        if (m.test(prop_places[i]))
            l |= letter{1} << i;
    return l;
}

namespace {

constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

// Reach graph synchronised with an automaton that reads the letter of the
// current marking on each step.
struct product
{
    const reach_graph& g;
    const word_automaton& a;
    std::vector<letter> letters; // per reach node
    std::vector<std::size_t> offsets;

    std::size_t id(std::size_t node, std::size_t state) const { return node * a.size() + state; }
    std::size_t node(std::size_t v) const { return v / a.size(); }
    std::size_t state(std::size_t v) const { return v % a.size(); }

    // (successor, transition)
    std::vector<std::pair<std::size_t, std::size_t>> successors(std::size_t v) const
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        const std::size_t n = node(v), s = state(v);
        for (const auto& ae : a.out[s]) {
            if (ae.label != letters[n])
                continue;
            for (std::size_t e = offsets[n]; e < offsets[n + 1]; ++e)
                out.emplace_back(id(g.edges[e].to, ae.dst), g.edges[e].transition);
        }
        return out;
    }
    std::vector<std::size_t> initial() const
    {
        std::vector<std::size_t> out;
        for (std::size_t s = 0; s < a.size(); ++s)
            if (a.initial[s])
                out.push_back(id(g.initial, s));
        return out;
    }
};

run_witness trace(const product& p, const std::vector<std::size_t>& parent, const std::vector<std::size_t>& via,
                  std::size_t v)
{
    run_witness w;
    std::vector<std::size_t> chain;
    for (std::size_t x = v; x != none; x = parent[x])
        chain.push_back(x);
    std::reverse(chain.begin(), chain.end());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        w.markings.push_back(p.g.nodes[p.node(chain[i])]);
        if (i > 0)
            w.transitions.push_back(via[chain[i]]);
    }
    return w;
}

std::optional<run_witness> finite_violation(const product& p)
{
    const std::size_t total = p.g.nodes.size() * p.a.size();
    std::vector<bool> deadlock(p.g.nodes.size(), false);
    for (std::size_t d : p.g.deadlocks)
        deadlock[d] = true;
    std::vector<std::size_t> parent(total, none), via(total, none);
    std::vector<bool> seen(total, false);
    std::deque<std::size_t> work;
    for (std::size_t v : p.initial()) {
        seen[v] = true;
        work.push_back(v);
    }
    while (!work.empty()) {
        const std::size_t v = work.front();
        work.pop_front();
        if (deadlock[p.node(v)]) {
            const letter l = p.letters[p.node(v)];
            for (const auto& ae : p.a.out[p.state(v)])
                if (ae.label == l && p.a.accepting[ae.dst])
                    return trace(p, parent, via, v);
        }
        for (auto [w, t] : p.successors(v))
            if (!seen[w]) {
                seen[w] = true;
                parent[w] = v;
                via[w] = t;
                work.push_back(w);
            }
    }
    return std::nullopt;
}

std::optional<run_witness> infinite_violation(const product& p)
{
    const std::size_t total = p.g.nodes.size() * p.a.size();
    std::vector<std::size_t> parent(total, none), via(total, none);
    std::vector<bool> seen(total, false);
    std::vector<std::size_t> order;
    std::deque<std::size_t> work;
    for (std::size_t v : p.initial()) {
        seen[v] = true;
        work.push_back(v);
    }
    while (!work.empty()) {
        const std::size_t v = work.front();
        work.pop_front();
        order.push_back(v);
        for (auto [w, t] : p.successors(v))
            if (!seen[w]) {
                seen[w] = true;
                parent[w] = v;
                via[w] = t;
                work.push_back(w);
            }
    }
    // SCCs of the reachable part, compacted.
    std::vector<std::size_t> local(total, none);
    for (std::size_t i = 0; i < order.size(); ++i)
        local[order[i]] = i;
    std::vector<std::vector<std::size_t>> adj(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto [w, t] : p.successors(order[i]))
            adj[i].push_back(local[w]);
    const auto scc = strongly_connected_components(adj);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t v = order[i];
        if (!p.a.accepting[p.state(v)] || !scc.nontrivial[scc.component[i]])
            continue;
        run_witness w = trace(p, parent, via, v);
        w.loop_start = w.markings.size() - 1;
        // Shortest cycle back to v inside its component.
        std::vector<std::size_t> back(order.size(), none), back_via(order.size(), none);
        std::deque<std::size_t> q;
        std::optional<std::size_t> closing;
        for (auto [x, t] : p.successors(v)) {
            const std::size_t lx = local[x];
            if (x == v) {
                closing = t;
                break;
            }
            if (scc.component[lx] == scc.component[i] && back[lx] == none) {
                back[lx] = i;
                back_via[lx] = t;
                q.push_back(lx);
            }
        }
        std::optional<std::size_t> last;
        while (!closing && !q.empty()) {
            const std::size_t x = q.front();
            q.pop_front();
            for (auto [y, t] : p.successors(order[x])) {
                const std::size_t ly = local[y];
                if (ly == i) {
                    closing = t;
                    last = x;
                    break;
                }
                if (scc.component[ly] == scc.component[i] && back[ly] == none) {
                    back[ly] = x;
                    back_via[ly] = t;
                    q.push_back(ly);
                }
            }
        }
        if (last) {
            std::vector<std::size_t> chain;
            for (std::size_t x = *last; x != i; x = back[x])
                chain.push_back(x);
            std::reverse(chain.begin(), chain.end());
            for (std::size_t x : chain) {
                w.transitions.push_back(back_via[x]);
                w.markings.push_back(p.g.nodes[p.node(order[x])]);
            }
        }
        w.transitions.push_back(*closing);
        return w;
    }
    return std::nullopt;
}

} // namespace

verdict explicit_model_check(const petri_net& net, const reach_graph& g, const property_automata& bad)
{
    if (bad.finite.kind != automaton_kind::finite || bad.buchi.kind != automaton_kind::buchi)
        throw error("expected a finite-word and a Buchi automaton");
    if (bad.finite.props != bad.buchi.props)
        throw alphabet_mismatch("finite and Buchi automata use different alphabets");
    const auto places = proposition_places(net, bad.finite.props);
    std::vector<letter> letters;
    letters.reserve(g.nodes.size());
    for (const auto& m : g.nodes)
        letters.push_back(letter_of(m, places));
    const auto offsets = g.out_offsets();

    verdict v;
    if (auto w = finite_violation(product{g, bad.finite, letters, offsets})) {
        v.holds = false;
        v.counterexample = std::move(w);
        return v;
    }
    if (auto w = infinite_violation(product{g, bad.buchi, letters, offsets})) {
        v.holds = false;
        v.counterexample = std::move(w);
    }
    return v;
}

verdict explicit_model_check(const petri_net& net, const marking& m0, const property_automata& bad,
                             std::size_t node_limit)
{
    (void)proposition_places(net, bad.finite.props);
    return explicit_model_check(net, reachability_graph(net, m0, node_limit), bad);
}

verdict explicit_model_check(const petri_net& net, const marking& m0, const formula& phi, std::size_t node_limit)
{
    (void)proposition_places(net, atoms(phi));
    return explicit_model_check(net, m0, violation_automata(phi), node_limit);
}

std::string format_run(const petri_net& net, const run_witness& run)
{
    std::string out;
    for (std::size_t i = 0; i < run.markings.size(); ++i) {
        if (run.loop_start && *run.loop_start == i)
            out += "loop: ";
        out += format_marking(net, run.markings[i]);
        if (i < run.transitions.size())
            out += " -" + net.transition_name(run.transitions[i]) + "-> ";
    }
    if (run.loop_start)
        out += "(back to loop start)";
    return out;
}

} // namespace vcnet

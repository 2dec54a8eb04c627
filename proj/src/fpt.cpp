#include "vcnet/fpt.hpp"

#include "vcnet/errors.hpp"
#include "vcnet/scc.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <map>
#include <set>

namespace vcnet {

namespace {

constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();

std::size_t saturating_add(std::size_t a, std::size_t b)
{
    return a > unbounded - b ? unbounded : a + b;
}

} // namespace

std::size_t neighbourhood_bound(std::size_t k)
{
    return 2 * k >= 64 ? unbounded : std::size_t{1} << (2 * k);
}

std::size_t interface_bound(std::size_t k)
{
    // 4^(2^(2k)) = 2^(2^(2k+1))
    if (2 * k + 1 >= 6)
        return unbounded;
    return std::size_t{1} << (std::size_t{1} << (2 * k + 1));
}

std::optional<std::size_t> special_set::bit_of(std::size_t place) const
{
    auto it = std::lower_bound(places.begin(), places.end(), place);
    if (it == places.end() || *it != place)
        return std::nullopt;
    return static_cast<std::size_t>(it - places.begin());
}

special_set special_places(const petri_net& net, const marking& m0, const place_set& cover,
                           const std::vector<std::string>& props)
{
    special_set s;
    s.cover = cover;
    s.interfaces = interfaces(net, cover);
    const std::size_t k = cover.count();
    if (s.interfaces.table.classes.size() > neighbourhood_bound(k))
        throw structural_violation("neighbourhood count " + std::to_string(s.interfaces.table.classes.size()) +
                                   " exceeds 2^(2k) for cover size " + std::to_string(k));
    if (s.interfaces.distinct.size() > interface_bound(k))
        throw structural_violation("interface count " + std::to_string(s.interfaces.distinct.size()) +
                                   " exceeds 4^(2^(2k)) for cover size " + std::to_string(k));
    s.prop_places = proposition_places(net, props);
    s.members = cover;
    for (std::size_t p : s.prop_places)
        s.members.set(p);
    const auto members = s.interfaces.members();
    s.designated.assign(members.size(), std::nullopt);
    place_set in_formula(net.num_places());
    for (std::size_t p : s.prop_places)
        in_formula.set(p);
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t p : members[i])
            if (!in_formula.test(p)) {
                s.designated[i] = p; // members are ascending, so this is the least name
                break;
            }
    for (const auto& d : s.designated)
        if (d)
            s.members.set(*d);
    s.budget.assign(members.size(), 0);
    s.outside.assign(members.size(), {});
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t p : members[i])
            if (!s.members.test(p)) {
                s.outside[i].push_back(p);
                if (m0.test(p))
                    ++s.budget[i];
            }
    s.places = s.members.indices();
    const std::size_t bound =
        saturating_add(saturating_add(k, s.prop_places.size()), interface_bound(k));
    if (s.places.size() > bound)
        throw structural_violation("special set larger than its bound");
    return s;
}

bool eca::is_final(eca_state s) const
{
    for (const auto& m : moves)
        if (!m.consumes && (m.pre & ~s) == 0)
            return false;
    return true;
}

std::vector<bool> eca::exhausted(eca_state s) const
{
    std::vector<bool> out(budget.size(), false);
    for (const auto& m : moves)
        if (m.consumes && (m.pre & ~s) == 0)
            out[*m.consumes] = true;
    return out;
}

bool eca::has_edge(eca_state from, std::optional<std::size_t> label, eca_state to) const
{
    for (const auto& m : moves) {
        if (m.produces_outside || m.consumes != label || (m.pre & ~from) != 0)
            continue;
        if ((m.post & ~m.pre & from) != 0)
            continue;
        if (((from & ~m.pre) | m.post) == to)
            return true;
    }
    return false;
}

eca_state eca::restrict(const marking& m) const
{
    eca_state s = 0;
    for (std::size_t i = 0; i < special.size(); ++i)
        if (m.test(special[i]))
            s |= eca_state{1} << i;
    return s;
}

labelled_graph eca::graph() const
{
    labelled_graph g;
    g.num_nodes = states.size();
    g.num_labels = budget.size();
    for (const auto& e : edges)
        g.edges.push_back({e.from, e.to, e.label});
    return g;
}

std::string eca::format_state(eca_state s) const
{
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < special.size(); ++i)
        if (s >> i & 1) {
            if (!first)
                out += ',';
            out += special_names[i];
            first = false;
        }
    return out + "}";
}

eca build_eca(const petri_net& net, const marking& m0, const special_set& special)
{
    if (special.places.size() > 63)
        throw structural_violation("special set has " + std::to_string(special.places.size()) +
                                   " places; at most 63 are supported");
    eca a;
    a.special = special.places;
    for (std::size_t p : a.special)
        a.special_names.push_back(net.place_name(p));
    a.budget = special.budget;
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        eca_move m;
        m.transition = t;
        std::optional<std::size_t> outside;
        auto touch = [&](std::size_t p) {
            if (outside && *outside != p)
                throw structural_violation("transition '" + net.transition_name(t) +
                                           "' touches two places outside the special set: '" +
                                           net.place_name(*outside) + "' and '" + net.place_name(p) + "'");
            outside = p;
        };
        net.pre(t).for_each([&](std::size_t p) {
            if (auto b = special.bit_of(p))
                m.pre |= eca_state{1} << *b;
            else {
                touch(p);
                m.consumes = special.interfaces.of_place[p];
                if (!m.consumes)
                    throw structural_violation("place '" + net.place_name(p) + "' has no interface");
            }
        });
        net.post(t).for_each([&](std::size_t p) {
            if (auto b = special.bit_of(p))
                m.post |= eca_state{1} << *b;
            else {
                touch(p);
                m.produces_outside = true;
            }
        });
        if (m.consumes && m.produces_outside)
            throw structural_violation("transition '" + net.transition_name(t) + "' has a self-loop outside the special set");
        m.all_special = !outside;
        a.moves.push_back(m);
    }

    a.initial = a.restrict(m0);
    a.states.push_back(a.initial);
    a.index.emplace(a.initial, 0);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        const eca_state s = a.states[i];
        for (const auto& m : a.moves) {
            if ((m.pre & ~s) != 0 || m.produces_outside)
                continue;
            const eca_state clash = m.post & ~m.pre & s;
            if (clash != 0) {
                const auto bit = static_cast<std::size_t>(std::countr_zero(clash));
                a.overflows.push_back({i, m.transition, a.special[bit]});
                continue;
            }
            const eca_state next = (s & ~m.pre) | m.post;
            auto [it, inserted] = a.index.emplace(next, a.states.size());
            if (inserted)
                a.states.push_back(next);
            a.edges.push_back({i, it->second, m.consumes, m.transition});
        }
    }
    for (eca_state s : a.states) {
        a.final_states.push_back(a.is_final(s));
        a.exhaust.push_back(a.exhausted(s));
    }
    return a;
}

bool valid_run_check(const eca& a, const std::vector<eca_state>& word,
                     const std::vector<std::optional<std::size_t>>& labels, bool maximal)
{
    if (word.empty() || labels.size() + 1 != word.size())
        return false;
    std::vector<std::int64_t> uses(a.num_interfaces(), 0);
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] && *labels[j] >= a.num_interfaces())
            return false;
        if (!a.has_edge(word[j], labels[j], word[j + 1]))
            return false;
        if (labels[j] && ++uses[*labels[j]] > a.budget[*labels[j]])
            return false;
    }
    if (!maximal)
        return true;
    if (!a.is_final(word.back()))
        return false;
    const auto ex = a.exhausted(word.back());
    for (std::size_t i = 0; i < ex.size(); ++i)
        if (ex[i] && uses[i] != a.budget[i])
            return false;
    return true;
}

product_graph build_product(const eca& a, const word_automaton& aut)
{
    std::vector<std::size_t> bits;
    for (const auto& p : aut.props) {
        auto it = std::find(a.special_names.begin(), a.special_names.end(), p);
        if (it == a.special_names.end())
            throw alphabet_mismatch("proposition '" + p + "' is not a special place");
        bits.push_back(static_cast<std::size_t>(it - a.special_names.begin()));
    }
    auto letter_of_state = [&](eca_state s) {
        letter l = 0;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (s >> bits[i] & 1)
                l |= letter{1} << i;
        return l;
    };
    std::vector<std::vector<std::size_t>> eca_out(a.states.size());
    for (std::size_t e = 0; e < a.edges.size(); ++e)
        eca_out[a.edges[e].from].push_back(e);

    product_graph prod;
    prod.kind = aut.kind;
    prod.graph.num_labels = a.num_interfaces();
    std::unordered_map<std::size_t, std::size_t> id;
    auto node = [&](std::size_t x, std::size_t q) {
        auto [it, inserted] = id.emplace(x * aut.size() + q, prod.nodes.size());
        if (inserted)
            prod.nodes.emplace_back(x, q);
        return it->second;
    };
    for (std::size_t q = 0; q < aut.size(); ++q)
        if (aut.initial[q])
            prod.initial.push_back(node(0, q));
    for (std::size_t v = 0; v < prod.nodes.size(); ++v) {
        const auto [x, q] = prod.nodes[v];
        const letter l = letter_of_state(a.states[x]);
        for (const auto& ae : aut.out[q]) {
            if (ae.label != l)
                continue;
            for (std::size_t e : eca_out[x]) {
                const std::size_t w = node(a.edges[e].to, ae.dst);
                prod.graph.edges.push_back({v, w, a.edges[e].label});
                prod.edge_transition.push_back(a.edges[e].transition);
            }
        }
    }
    prod.graph.num_nodes = prod.nodes.size();
    prod.accepting.assign(prod.nodes.size(), false);
    for (std::size_t v = 0; v < prod.nodes.size(); ++v) {
        const auto [x, q] = prod.nodes[v];
        if (aut.kind == automaton_kind::buchi) {
            prod.accepting[v] = aut.accepting[q];
            continue;
        }
        if (!a.final_states[x])
            continue;
        const letter l = letter_of_state(a.states[x]);
        for (const auto& ae : aut.out[q])
            if (ae.label == l && aut.accepting[ae.dst])
                prod.accepting[v] = true;
    }
    return prod;
}

namespace {

// Product graph plus a source feeding every initial node and a sink fed by
// every goal node, all over unconstrained edges.
labelled_graph with_terminals(const product_graph& prod, const std::vector<std::size_t>& goals)
{
    labelled_graph g = prod.graph;
    const std::size_t source = g.num_nodes, sink = g.num_nodes + 1;
    g.num_nodes += 2;
    for (std::size_t v : prod.initial)
        g.edges.push_back({source, v, std::nullopt});
    for (std::size_t v : goals)
        g.edges.push_back({v, sink, std::nullopt});
    return g;
}

struct terminal_walk
{
    std::vector<std::size_t> edges;
    std::size_t goal;
};

std::optional<terminal_walk> solve_terminal_query(const product_graph& prod, const eca& a,
                                                             const std::vector<std::size_t>& goals,
                                                             const std::vector<bool>& exhaust,
                                                             const flow_options& opt, acceptance_stats& stats)
{
    const labelled_graph g = with_terminals(prod, goals);
    const flow_query q{prod.graph.num_nodes, prod.graph.num_nodes + 1, a.budget, exhaust};
    ++stats.queries;
    const auto r = connected_path_flow(g, q, opt);
    if (!r)
        return std::nullopt;
    stats.cuts += r->cuts;
    if (r->from_search)
        ++stats.search_fallbacks;
    auto walk = reconstruct_walk(g, q.source, q.target, r->multiplicity);
    if (!walk || walk->size() < 2)
        throw error("flow solution does not form a walk");
    return terminal_walk{std::vector<std::size_t>(walk->begin() + 1, walk->end() - 1), g.edges[walk->back()].from};
}

// Nodes in a nontrivial component of the unconstrained-edge subgraph that
// contains an accepting node; one representative per component.
std::vector<std::size_t> lasso_anchors(const product_graph& prod, std::vector<std::size_t>* component = nullptr)
{
    std::vector<std::vector<std::size_t>> adj(prod.nodes.size());
    for (const auto& e : prod.graph.edges)
        if (!e.label)
            adj[e.from].push_back(e.to);
    const auto scc = strongly_connected_components(adj);
    std::vector<std::size_t> anchors;
    std::vector<bool> taken(scc.count, false);
    for (std::size_t v = 0; v < prod.nodes.size(); ++v) {
        const std::size_t c = scc.component[v];
        if (prod.accepting[v] && scc.nontrivial[c] && !taken[c]) {
            taken[c] = true;
            anchors.push_back(v);
        }
    }
    if (component)
        *component = scc.component;
    return anchors;
}

} // namespace

std::optional<product_path> accepting_path_finite(const product_graph& prod, const eca& a, const flow_options& opt,
                                                  acceptance_stats* stats)
{
    if (prod.kind != automaton_kind::finite)
        throw error("finite acceptance needs a finite-word product");
    acceptance_stats local;
    acceptance_stats& st = stats ? *stats : local;
    std::map<std::vector<bool>, std::vector<std::size_t>> groups;
    for (std::size_t v = 0; v < prod.nodes.size(); ++v)
        if (prod.accepting[v])
            groups[a.exhaust[prod.nodes[v].first]].push_back(v);
    for (const auto& [exhaust, goals] : groups)
        if (auto walk = solve_terminal_query(prod, a, goals, exhaust, opt, st))
            return product_path{std::move(walk->edges), std::nullopt};
    return std::nullopt;
}

std::optional<product_path> accepting_lasso(const product_graph& prod, const eca& a, const flow_options& opt,
                                            acceptance_stats* stats)
{
    if (prod.kind != automaton_kind::buchi)
        throw error("lasso acceptance needs a Buchi product");
    acceptance_stats local;
    acceptance_stats& st = stats ? *stats : local;
    std::vector<std::size_t> component;
    const auto anchors = lasso_anchors(prod, &component);
    if (anchors.empty())
        return std::nullopt;
    auto stem = solve_terminal_query(prod, a, anchors, std::vector<bool>(a.num_interfaces(), false), opt, st);
    if (!stem)
        return std::nullopt;
    const std::size_t start = stem->goal;
    // Shortest unconstrained cycle through the anchor inside its component.
    std::vector<std::size_t> via(prod.nodes.size(), unbounded);
    std::deque<std::size_t> work;
    std::vector<std::vector<std::size_t>> out(prod.nodes.size());
    for (std::size_t e = 0; e < prod.graph.edges.size(); ++e) {
        const auto& ed = prod.graph.edges[e];
        if (!ed.label && component[ed.from] == component[start] && component[ed.to] == component[start])
            out[ed.from].push_back(e);
    }
    std::optional<std::size_t> closing;
    work.push_back(start);
    while (!work.empty() && !closing) {
        const std::size_t v = work.front();
        work.pop_front();
        for (std::size_t e : out[v]) {
            const std::size_t w = prod.graph.edges[e].to;
            if (w == start) {
                closing = e;
                break;
            }
            if (via[w] == unbounded) {
                via[w] = e;
                work.push_back(w);
            }
        }
    }
    if (!closing)
        throw error("accepting component has no cycle");
    std::vector<std::size_t> cycle{*closing};
    for (std::size_t v = prod.graph.edges[*closing].from; v != start; v = prod.graph.edges[via[v]].from)
        cycle.push_back(via[v]);
    std::reverse(cycle.begin(), cycle.end());
    product_path path{std::move(stem->edges), std::nullopt};
    path.loop_start = path.edges.size();
    path.edges.insert(path.edges.end(), cycle.begin(), cycle.end());
    return path;
}

bool budget_graph_check(const product_graph& prod, const eca& a, std::size_t limit)
{
    std::vector<bool> goal(prod.nodes.size(), false);
    if (prod.kind == automaton_kind::buchi) {
        std::vector<std::size_t> component;
        const auto anchors = lasso_anchors(prod, &component);
        for (std::size_t v = 0; v < prod.nodes.size(); ++v)
            for (std::size_t r : anchors)
                if (component[v] == component[r])
                    goal[v] = true;
    } else {
        goal = prod.accepting;
    }
    std::vector<std::vector<std::size_t>> out(prod.nodes.size());
    for (std::size_t e = 0; e < prod.graph.edges.size(); ++e)
        out[prod.graph.edges[e].from].push_back(e);

    auto satisfied = [&](std::size_t v, const std::vector<std::int64_t>& uses) {
        if (!goal[v])
            return false;
        if (prod.kind == automaton_kind::buchi)
            return true;
        const auto& ex = a.exhaust[prod.nodes[v].first];
        for (std::size_t i = 0; i < ex.size(); ++i)
            if (ex[i] && uses[i] != a.budget[i])
                return false;
        return true;
    };
    using state = std::pair<std::size_t, std::vector<std::int64_t>>;
    std::set<state> seen;
    std::deque<state> work;
    for (std::size_t v : prod.initial) {
        state s{v, std::vector<std::int64_t>(a.num_interfaces(), 0)};
        if (seen.insert(s).second)
            work.push_back(std::move(s));
    }
    while (!work.empty()) {
        state s = std::move(work.front());
        work.pop_front();
        if (satisfied(s.first, s.second))
            return true;
        for (std::size_t e : out[s.first]) {
            const auto& ed = prod.graph.edges[e];
            state t{ed.to, s.second};
            if (ed.label && ++t.second[*ed.label] > a.budget[*ed.label])
                continue;
            if (seen.count(t))
                continue;
            if (seen.size() >= limit)
                throw limit_exceeded("budget graph search exceeded state limit", seen.size());
            seen.insert(t);
            work.push_back(std::move(t));
        }
    }
    return false;
}

namespace {

void check_overflows(const petri_net& net, const eca& a, std::size_t limit)
{
    if (a.overflows.empty())
        return;
    const labelled_graph g = a.graph();
    std::set<std::pair<std::size_t, std::optional<std::size_t>>> tried;
    for (const auto& o : a.overflows) {
        const auto& move = a.moves[o.transition];
        auto budget = a.budget;
        if (move.consumes) {
            if (budget[*move.consumes] == 0)
                continue;
            --budget[*move.consumes];
        }
        if (!tried.insert({o.state, move.consumes}).second)
            continue;
        bool reachable = o.state == 0;
        if (!reachable)
            reachable = budget_search(g, flow_query{0, o.state, budget, std::vector<bool>(budget.size(), false)},
                                      limit)
                            .has_value();
        if (reachable)
            throw one_safety_violation(net.transition_name(o.transition), net.place_name(o.place));
    }
}

} // namespace

fpt_report fpt_model_check(const petri_net& net, const marking& m0, const property_automata& bad,
                           const fpt_options& opt)
{
    if (bad.finite.kind != automaton_kind::finite || bad.buchi.kind != automaton_kind::buchi)
        throw error("expected a finite-word and a Buchi automaton");
    if (bad.finite.props != bad.buchi.props)
        throw alphabet_mismatch("finite and Buchi automata use different alphabets");
    const place_set cover = opt.cover ? *opt.cover : min_vertex_cover(make_flow_graph(net));
    const special_set special = special_places(net, m0, cover, bad.finite.props);
    const eca a = build_eca(net, m0, special);
    if (opt.check_one_safety)
        check_overflows(net, a, opt.flow.search_limit);

    fpt_report r;
    r.cover_size = cover.count();
    r.special_size = special.places.size();
    r.num_interfaces = a.num_interfaces();
    r.eca_states = a.states.size();
    r.eca_edges = a.edges.size();

    const product_graph fin = build_product(a, bad.finite);
    r.product_nodes += fin.nodes.size();
    if (auto w = accepting_path_finite(fin, a, opt.flow, &r.acceptance)) {
        r.holds = false;
        r.violation = "finite";
        for (std::size_t e : w->edges)
            r.witness_transitions.push_back(fin.edge_transition[e]);
        r.witness = std::move(w);
        return r;
    }
    const product_graph inf = build_product(a, bad.buchi);
    r.product_nodes += inf.nodes.size();
    if (auto w = accepting_lasso(inf, a, opt.flow, &r.acceptance)) {
        r.holds = false;
        r.violation = "infinite";
        for (std::size_t e : w->edges)
            r.witness_transitions.push_back(inf.edge_transition[e]);
        r.witness = std::move(w);
    }
    return r;
}

fpt_report fpt_model_check(const petri_net& net, const marking& m0, const formula& phi, const fpt_options& opt)
{
    (void)proposition_places(net, atoms(phi));
    return fpt_model_check(net, m0, violation_automata(phi), opt);
}

} // namespace vcnet

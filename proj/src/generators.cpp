#include "vcnet/generators.hpp"

#include "vcnet/reach.hpp"

#include <algorithm>
#include <numeric>

namespace vcnet {

namespace {

std::size_t uniform(rng_type& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(rng_type& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<std::string> pick_places(rng_type& rng, const std::vector<std::string>& names, std::size_t count)
{
    std::vector<std::string> out = names;
    std::shuffle(out.begin(), out.end(), rng);
    out.resize(std::min(count, out.size()));
    return out;
}

} // namespace

namespace {

// Arbitrary arcs; only a fraction of samples come out 1-safe and those
// tend to die quickly.
net_document arbitrary_net(rng_type& rng, std::size_t n, std::size_t m, double marked)
{
    std::vector<std::string> places;
    net_builder b("random");
    for (std::size_t p = 0; p < n; ++p) {
        places.push_back("p" + std::to_string(p));
        b.place(places.back(), coin(rng, marked));
    }
    for (std::size_t t = 0; t < m; ++t) {
        const std::size_t in = coin(rng, 0.05) ? 0 : uniform(rng, 1, std::min<std::size_t>(2, n));
        const std::size_t out = in == 0 ? 0 : coin(rng, 0.65) ? in : uniform(rng, 0, std::min<std::size_t>(2, n));
        b.transition("t" + std::to_string(t), pick_places(rng, places, in), pick_places(rng, places, out));
    }
    return b.build();
}

// Places split into sequential components holding at most one token each;
// transitions move tokens inside one or two components, occasionally
// dropping one. Safe by construction and long-lived.
net_document component_net(rng_type& rng, std::size_t n, std::size_t m, std::size_t max_m, double marked)
{
    const std::size_t k = uniform(rng, 1, std::max<std::size_t>(1, (n + 1) / 2));
    m = std::min(std::max(m, n), max_m);
    std::vector<std::vector<std::string>> comps(k);
    net_builder b("random");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n; ++i)
        comps[i < k ? i : uniform(rng, 0, k - 1)].push_back("p" + std::to_string(order[i]));
    for (const auto& c : comps) {
        const std::size_t token = coin(rng, std::max(marked, 0.85)) ? uniform(rng, 0, c.size() - 1) : c.size();
        for (std::size_t i = 0; i < c.size(); ++i)
            b.place(c[i], i == token);
    }
    for (std::size_t t = 0; t < m; ++t) {
        std::vector<std::string> pre, post;
        const std::size_t touched = k > 1 && coin(rng, 0.35) ? 2 : 1;
        std::vector<std::size_t> which(k);
        std::iota(which.begin(), which.end(), 0);
        std::shuffle(which.begin(), which.end(), rng);
        for (std::size_t j = 0; j < touched; ++j) {
            const auto& c = comps[which[j]];
            const std::size_t at = uniform(rng, 0, c.size() - 1);
            pre.push_back(c[at]);
            if (coin(rng, 0.1))
                continue;
            post.push_back(coin(rng, 0.7) ? c[(at + 1) % c.size()] : c[uniform(rng, 0, c.size() - 1)]);
        }
        b.transition("t" + std::to_string(t), pre, post);
    }
    return b.build();
}

} // namespace

net_document random_safe_net(rng_type& rng, const net_shape& shape)
{
    for (;;) {
        const std::size_t n = uniform(rng, std::max<std::size_t>(shape.min_places, 1), shape.max_places);
        const std::size_t m = uniform(rng, 1, std::max<std::size_t>(shape.max_transitions, 1));
        net_document doc =
            coin(rng, 0.75) ? component_net(rng, n, m, shape.max_transitions, shape.marked) : arbitrary_net(rng, n, m, shape.marked);
        try {
            verify_one_safe(doc.net, doc.initial);
        } catch (const one_safety_violation&) {
            continue;
        }
        return doc;
    }
}

net_document random_hub_net(rng_type& rng, std::size_t max_hubs, std::size_t max_resources,
                            std::size_t max_transitions)
{
    for (;;) {
        const std::size_t h = uniform(rng, 1, std::max<std::size_t>(max_hubs, 1));
        const std::size_t r = uniform(rng, 1, std::max<std::size_t>(max_resources, 1));
        const std::size_t m = uniform(rng, std::min(h, max_transitions), std::max<std::size_t>(max_transitions, 1));
        net_builder b("hub");
        for (std::size_t i = 0; i < h; ++i)
            b.place("h" + std::to_string(i), i == 0);
        for (std::size_t i = 0; i < r; ++i)
            b.place("r" + std::to_string(i), coin(rng, 0.75));
        for (std::size_t t = 0; t < m; ++t) {
            const std::size_t from = t < h ? t : uniform(rng, 0, h - 1);
            std::vector<std::string> pre{"h" + std::to_string(from)};
            std::vector<std::string> post;
            if (!coin(rng, 0.05))
                post.push_back("h" + std::to_string(coin(rng, 0.6) ? (from + 1) % h : uniform(rng, 0, h - 1)));
            if (coin(rng, 0.6))
                pre.push_back("r" + std::to_string(uniform(rng, 0, r - 1)));
            if (coin(rng, 0.2))
                post.push_back("r" + std::to_string(uniform(rng, 0, r - 1)));
            b.transition("t" + std::to_string(t), pre, post);
        }
        net_document doc = b.build();
        try {
            verify_one_safe(doc.net, doc.initial);
        } catch (const one_safety_violation&) {
            continue;
        }
        return doc;
    }
}

formula random_ltl(rng_type& rng, const std::vector<std::string>& atoms, std::size_t depth)
{
    if (depth == 0 || coin(rng, 0.25)) {
        const std::size_t r = uniform(rng, 0, 19);
        if (atoms.empty() || r == 0)
            return make_true();
        if (r == 1)
            return make_false();
        if (r == 2)
            return make_end();
        return make_atom(atoms[uniform(rng, 0, atoms.size() - 1)]);
    }
    static constexpr ltl_op unary[] = {ltl_op::negation, ltl_op::next, ltl_op::eventually, ltl_op::always};
    static constexpr ltl_op binary[] = {ltl_op::until, ltl_op::release, ltl_op::conjunction, ltl_op::disjunction,
                                        ltl_op::implication};
    if (coin(rng, 0.45))
        return make_unary(unary[uniform(rng, 0, 3)], random_ltl(rng, atoms, depth - 1));
    const ltl_op op = binary[uniform(rng, 0, 4)];
    auto lhs = random_ltl(rng, atoms, depth - 1);
    return make_binary(op, std::move(lhs), random_ltl(rng, atoms, depth - 1));
}

formula random_propositional(rng_type& rng, const std::vector<std::string>& atoms, std::size_t depth)
{
    if (depth == 0 || coin(rng, 0.2))
        return make_atom(atoms[uniform(rng, 0, atoms.size() - 1)]);
    switch (uniform(rng, 0, 3)) {
    case 0:
        return make_not(random_propositional(rng, atoms, depth - 1));
    case 1: {
        auto lhs = random_propositional(rng, atoms, depth - 1);
        return make_and(std::move(lhs), random_propositional(rng, atoms, depth - 1));
    }
    case 2: {
        auto lhs = random_propositional(rng, atoms, depth - 1);
        return make_or(std::move(lhs), random_propositional(rng, atoms, depth - 1));
    }
    default: {
        auto lhs = random_propositional(rng, atoms, depth - 1);
        return make_binary(ltl_op::implication, std::move(lhs), random_propositional(rng, atoms, depth - 1));
    }
    }
}

pwsat_instance random_pwsat(rng_type& rng, std::size_t max_vars, std::size_t max_clauses)
{
    pwsat_instance inst;
    inst.num_vars = uniform(rng, 1, max_vars);
    const std::size_t k = uniform(rng, 1, std::min<std::size_t>(3, inst.num_vars));
    inst.part.resize(inst.num_vars);
    for (std::size_t v = 0; v < inst.num_vars; ++v)
        inst.part[v] = v < k ? v + 1 : uniform(rng, 1, k);
    std::shuffle(inst.part.begin(), inst.part.end(), rng);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t p : inst.part)
        ++sizes[p - 1];
    for (std::size_t r = 0; r < k; ++r)
        inst.target.push_back(uniform(rng, 0, sizes[r]));
    const std::size_t m = uniform(rng, 0, max_clauses);
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<int> clause;
        const std::size_t len = coin(rng, 0.03) ? 0 : uniform(rng, 1, std::min<std::size_t>(3, inst.num_vars));
        for (std::size_t i = 0; i < len; ++i) {
            const int v = static_cast<int>(uniform(rng, 1, inst.num_vars));
            clause.push_back(coin(rng, 0.5) ? v : -v);
        }
        inst.clauses.push_back(std::move(clause));
    }
    return inst;
}

csp_instance random_csp(rng_type& rng, std::size_t max_vars, std::size_t max_dom)
{
    csp_instance inst;
    const std::size_t n = uniform(rng, 1, max_vars);
    inst.dom = uniform(rng, 1, max_dom);
    for (std::size_t i = 0; i < n; ++i)
        inst.vars.push_back("x" + std::to_string(i));
    auto add_constraint = [&](std::vector<std::string> vars) {
        csp_instance::constraint c;
        c.vars = std::move(vars);
        std::size_t total = 1;
        for (std::size_t i = 0; i < c.vars.size(); ++i)
            total *= inst.dom;
        const double density = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
        for (std::size_t code = 0; code < total; ++code) {
            if (!coin(rng, density))
                continue;
            std::vector<std::size_t> t;
            for (std::size_t i = 0, x = code; i < c.vars.size(); ++i, x /= inst.dom)
                t.push_back(x % inst.dom + 1);
            c.tuples.push_back(std::move(t));
        }
        inst.constraints.push_back(std::move(c));
    };
    const std::size_t m = uniform(rng, 1, n + 2);
    for (std::size_t j = 0; j < m; ++j)
        add_constraint(pick_places(rng, inst.vars, uniform(rng, 1, std::min<std::size_t>(3, n))));
    for (const auto& v : inst.vars) {
        const bool used = std::any_of(inst.constraints.begin(), inst.constraints.end(), [&](const auto& c) {
            return std::find(c.vars.begin(), c.vars.end(), v) != c.vars.end();
        });
        if (!used)
            add_constraint({v});
    }
    return inst;
}

flow_instance random_flow_instance(rng_type& rng, std::size_t max_nodes, std::size_t max_labels,
                                   std::int64_t max_budget)
{
    flow_instance f;
    auto& g = f.graph;
    g.num_nodes = uniform(rng, 2, max_nodes);
    g.num_labels = uniform(rng, 0, max_labels);
    const std::size_t m = uniform(rng, 1, 3 * g.num_nodes);
    for (std::size_t e = 0; e < m; ++e) {
        labelled_graph::edge ed{uniform(rng, 0, g.num_nodes - 1), uniform(rng, 0, g.num_nodes - 1), std::nullopt};
        if (g.num_labels > 0 && coin(rng, 0.4))
            ed.label = uniform(rng, 0, g.num_labels - 1);
        g.edges.push_back(ed);
    }
    f.query.source = uniform(rng, 0, g.num_nodes - 1);
    f.query.target = coin(rng, 0.15) ? f.query.source : uniform(rng, 0, g.num_nodes - 1);
    for (std::size_t l = 0; l < g.num_labels; ++l) {
        f.query.budget.push_back(std::uniform_int_distribution<std::int64_t>(0, max_budget)(rng));
        f.query.exhaust.push_back(coin(rng, 0.3));
    }
    return f;
}

} // namespace vcnet

// Runs the acceptance suite; one PASS/FAIL line per criterion.
#include "vcnet/explicit_mc.hpp"
#include "vcnet/fpt.hpp"
#include "vcnet/generators.hpp"
#include "vcnet/reach.hpp"
#include "vcnet/reductions.hpp"
#include "vcnet/structure.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace vcnet;

namespace {

struct outcome
{
    bool pass = true;
    std::string detail;
};

constexpr double criterion1_seconds = 300.0;
constexpr std::size_t oracle_limit = 20'000'000;

std::uint64_t base_seed = 20261015;

rng_type rng_for(int criterion) { return rng_type(base_seed * 1000003ULL + static_cast<std::uint64_t>(criterion)); }

// Nets seen by any criterion, rechecked for the structural bounds.
std::vector<net_document> structural_pool;

std::vector<std::string> random_atoms(rng_type& rng, const petri_net& net, std::size_t max_atoms)
{
    std::vector<std::string> names = net.places();
    std::shuffle(names.begin(), names.end(), rng);
    names.resize(std::uniform_int_distribution<std::size_t>(1, std::min(max_atoms, names.size()))(rng));
    return names;
}

// Both reductions target a dead marking, so a deadlock-preserving reduced
// search decides it; full search is used otherwise.
bool target_reachable(const net_document& doc)
{
    const marking& target = *doc.target;
    if (enabled(doc.net, target).empty()) {
        const auto dead = reachable_deadlocks(doc.net, doc.initial, oracle_limit);
        return std::binary_search(dead.begin(), dead.end(), target);
    }
    return is_reachable(doc.net, doc.initial, target, oracle_limit);
}

outcome engine_equivalence()
{
    auto rng = rng_for(1);
    const auto start = std::chrono::steady_clock::now();
    std::size_t checks = 0, agree = 0, failing = 0;
    std::string first_mismatch;
    for (std::size_t i = 0; i < 1000; ++i) {
        auto doc = i % 4 == 3 ? random_hub_net(rng) : random_safe_net(rng, {8, 10, 1, 0.4});
        for (int f = 0; f < 3; ++f) {
            const formula phi = random_ltl(rng, random_atoms(rng, doc.net, 3), 3);
            const bool expected = explicit_model_check(doc.net, doc.initial, phi).holds;
            const bool got = fpt_model_check(doc.net, doc.initial, phi).holds;
            ++checks;
            failing += expected ? 0 : 1;
            if (expected == got)
                ++agree;
            else if (first_mismatch.empty())
                first_mismatch = "; first mismatch: " + to_string(phi) + " on\n" + format_net(doc.net, doc.initial);
        }
        if (i % 20 == 0)
            structural_pool.push_back(std::move(doc));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream d;
    d << agree << "/" << checks << " verdicts agree (" << failing << " violated), " << secs << " s, limit "
      << criterion1_seconds << " s" << first_mismatch;
    return {agree == checks && secs <= criterion1_seconds, d.str()};
}

// Replaces, after the first moment an interface's places are all empty,
// every firing touching one of its non-special places by a firing of the
// same neighbourhood class on the designated place.
std::optional<std::vector<std::size_t>> normalise(const petri_net& net, const marking& m0, const special_set& s,
                                                  const std::vector<std::size_t>& seq)
{
    const auto members = s.interfaces.members();
    std::vector<bool> emptied(members.size(), false);
    auto update_emptied = [&](const marking& m) {
        for (std::size_t i = 0; i < members.size(); ++i)
            if (!emptied[i] && std::none_of(members[i].begin(), members[i].end(), [&](std::size_t p) { return m.test(p); }))
                emptied[i] = true;
    };
    marking m = m0;
    update_emptied(m);
    std::vector<std::size_t> out;
    for (std::size_t t : seq) {
        std::size_t chosen = t;
        std::optional<std::size_t> outside;
        (net.pre(t) | net.post(t)).for_each([&](std::size_t p) {
            if (!s.members.test(p))
                outside = p;
        });
        if (outside) {
            const std::size_t iface = *s.interfaces.of_place[*outside];
            if (emptied[iface]) {
                const std::size_t d = *s.designated[iface];
                const bool removes = net.pre(*outside, t);
                std::optional<std::size_t> swap;
                for (std::size_t u = 0; u < net.num_transitions() && !swap; ++u)
                    if (s.interfaces.table.class_of[u] == s.interfaces.table.class_of[t] &&
                        (removes ? net.pre(d, u) && !net.post(d, u) : net.post(d, u) && !net.pre(d, u)))
                        swap = u;
                if (!swap)
                    return std::nullopt;
                chosen = *swap;
            }
        }
        if (!is_enabled(net, m, chosen))
            return std::nullopt;
        m = fire(net, m, chosen);
        out.push_back(chosen);
        update_emptied(m);
    }
    return out;
}

std::optional<std::size_t> label_of(const eca& a, std::size_t t) { return a.moves[t].consumes; }

outcome run_construction()
{
    auto rng = rng_for(2);
    constexpr std::size_t depth = 8;
    std::size_t runs = 0, words = 0, bad = 0;
    std::string first;
    auto note = [&](const std::string& what) {
        ++bad;
        if (first.empty())
            first = "; first: " + what;
    };
    for (std::size_t i = 0; i < 50; ++i) {
        auto doc = random_safe_net(rng, {6, 8, 1, 0.5});
        const auto& net = doc.net;
        std::vector<std::string> props;
        if (std::bernoulli_distribution(0.7)(rng))
            props = random_atoms(rng, net, 2);
        const place_set cover = min_vertex_cover(make_flow_graph(net));
        const special_set s = special_places(net, doc.initial, cover, props);
        const eca a = build_eca(net, doc.initial, s);
        const auto phi_places = proposition_places(net, props);

        // Direction one: runs project to valid words.
        std::vector<std::size_t> seq;
        std::function<void(const marking&)> walk = [&](const marking& m) {
            const auto en = enabled(net, m);
            const bool deadlock = en.empty();
            ++runs;
            const auto norm = normalise(net, doc.initial, s, seq);
            if (!norm) {
                note("normalisation failed");
            } else {
                std::vector<eca_state> word{a.restrict(doc.initial)};
                std::vector<std::optional<std::size_t>> labels;
                marking cur = doc.initial, orig = doc.initial;
                bool props_match = true;
                for (std::size_t j = 0; j < norm->size(); ++j) {
                    cur = fire(net, cur, (*norm)[j]);
                    orig = fire(net, orig, seq[j]);
                    word.push_back(a.restrict(cur));
                    labels.push_back(label_of(a, (*norm)[j]));
                    if (letter_of(cur, phi_places) != letter_of(orig, phi_places))
                        props_match = false;
                }
                if (!props_match)
                    note("normalised run changes formula places");
                else if (!valid_run_check(a, word, labels, deadlock))
                    note(std::string(deadlock ? "maximal" : "prefix") + " run projection rejected");
            }
            if (seq.size() == depth)
                return;
            for (std::size_t t : en) {
                seq.push_back(t);
                walk(fire(net, m, t));
                seq.pop_back();
            }
        };
        walk(doc.initial);

        // Direction two: valid words lift to runs following the labels.
        std::set<std::tuple<std::size_t, std::vector<std::int64_t>, std::set<marking>, std::size_t>> done;
        std::function<void(std::size_t, std::vector<std::int64_t>&, const std::set<marking>&, std::size_t)> lift =
            [&](std::size_t state, std::vector<std::int64_t>& uses, const std::set<marking>& frontier, std::size_t len) {
                if (!done.insert({state, uses, frontier, len}).second)
                    return;
                ++words;
                if (frontier.empty()) {
                    note("valid word without a lift");
                    return;
                }
                bool maximal_valid = a.final_states[state];
                for (std::size_t l = 0; l < a.num_interfaces(); ++l)
                    if (a.exhaust[state][l] && uses[l] != a.budget[l])
                        maximal_valid = false;
                if (maximal_valid &&
                    std::none_of(frontier.begin(), frontier.end(), [&](const marking& m) { return enabled(net, m).empty(); }))
                    note("maximal word lifts to no deadlock");
                if (len == depth)
                    return;
                std::set<std::pair<std::size_t, std::optional<std::size_t>>> steps;
                for (const auto& e : a.edges)
                    if (e.from == state)
                        steps.insert({e.to, e.label});
                for (const auto& [to, label] : steps) {
                    if (label && uses[*label] == a.budget[*label])
                        continue;
                    std::set<marking> next;
                    for (const marking& m : frontier)
                        for (std::size_t t : enabled(net, m))
                            if (label_of(a, t) == label && !a.moves[t].produces_outside) {
                                marking m2 = fire(net, m, t);
                                if (a.restrict(m2) == a.states[to])
                                    next.insert(std::move(m2));
                            }
                    if (label)
                        ++uses[*label];
                    lift(to, uses, next, len + 1);
                    if (label)
                        --uses[*label];
                }
            };
        std::vector<std::int64_t> uses(a.num_interfaces(), 0);
        lift(0, uses, {doc.initial}, 0);
        structural_pool.push_back(std::move(doc));
    }
    std::ostringstream d;
    d << runs << " run prefixes and " << words << " automaton words checked, " << bad << " counterexamples" << first;
    return {bad == 0, d.str()};
}

outcome flow_vs_search()
{
    auto rng = rng_for(3);
    std::size_t products = 0, product_agree = 0, graphs = 0, graph_agree = 0, bad_witness = 0;
    std::size_t with_budget = 0;
    for (std::size_t round = 0; products < 200; ++round) {
        auto doc = round % 2 == 0 ? random_safe_net(rng, {8, 10, 1, 0.6}) : random_hub_net(rng, 3, 5, 8);
        const formula phi = random_ltl(rng, random_atoms(rng, doc.net, 2), 3);
        const place_set cover = min_vertex_cover(make_flow_graph(doc.net));
        const auto bad = violation_automata(phi);
        const special_set s = special_places(doc.net, doc.initial, cover, bad.finite.props);
        const eca a = build_eca(doc.net, doc.initial, s);
        for (const auto* aut : {&bad.finite, &bad.buchi}) {
            const product_graph prod = build_product(a, *aut);
            if (prod.nodes.size() > 40 || prod.nodes.empty())
                continue;
            std::int64_t top = 0;
            for (auto u : a.budget)
                top = std::max(top, u);
            if (top > 3)
                continue;
            with_budget += top > 0 ? 1 : 0;
            ++products;
            const auto path = aut->kind == automaton_kind::finite ? accepting_path_finite(prod, a)
                                                                  : accepting_lasso(prod, a);
            if (path.has_value() == budget_graph_check(prod, a))
                ++product_agree;
        }
    }
    for (std::size_t i = 0; i < 200; ++i) {
        const auto inst = random_flow_instance(rng, 40, 3, 3);
        ++graphs;
        const auto flow = connected_path_flow(inst.graph, inst.query);
        const auto search = budget_search(inst.graph, inst.query);
        if (flow.has_value() == search.has_value())
            ++graph_agree;
        if (flow) {
            const auto walk = reconstruct_walk(inst.graph, inst.query.source, inst.query.target, flow->multiplicity);
            if (!flow_rows_hold(inst.graph, inst.query, flow->multiplicity) || !walk)
                ++bad_witness;
        }
    }
    // Path 0 -> 1 plus a stray cycle 2 <-> 3 satisfies the flow rows, but
    // every connected walk spends the label twice.
    labelled_graph two_cycles;
    two_cycles.num_nodes = 4;
    two_cycles.num_labels = 1;
    two_cycles.edges = {{0, 1, std::nullopt}, {0, 2, 0}, {2, 3, 0}, {3, 2, std::nullopt}, {3, 1, std::nullopt}};
    const bool two_cycles_none = !connected_path_flow(two_cycles, {0, 1, {1}, {true}}).has_value() &&
                                 !budget_search(two_cycles, {0, 1, {1}, {true}}).has_value();
    std::ostringstream d;
    d << product_agree << "/" << products << " products agree (" << with_budget << " with budgets), " << graph_agree
      << "/" << graphs << " labelled graphs agree, " << bad_witness << " bad witnesses, disconnected two-cycle "
      << (two_cycles_none ? "none" : "FOUND");
    return {product_agree == products && graph_agree == graphs && bad_witness == 0 && two_cycles_none, d.str()};
}

outcome sat_reduction()
{
    auto rng = rng_for(4);
    std::size_t n = 0, agree = 0, unsafe = 0, bad_decomp = 0, positive = 0;
    for (; n < 200; ++n) {
        const auto inst = random_pwsat(rng, 8, 6);
        const auto doc = sat_to_net(inst);
        const bool expected = brute_force_ppwsat(inst);
        positive += expected ? 1 : 0;
        if (target_reachable(doc) == expected)
            ++agree;
        try {
            verify_one_safe(doc.net, doc.initial, oracle_limit);
        } catch (const one_safety_violation&) {
            ++unsafe;
        }
        const auto check = validate_path_decomposition(make_flow_graph(doc.net), build_reduction_decomposition(inst));
        const std::size_t pw = decomposition_width(primal_decomposition(inst));
        if (!check.valid() || *check.width > 3 * pw + 4 * inst.num_parts() + 7)
            ++bad_decomp;
        if (n % 20 == 0)
            structural_pool.push_back(doc);
    }
    std::ostringstream d;
    d << agree << "/" << n << " agree (" << positive << " satisfiable), " << unsafe << " unsafe nets, " << bad_decomp
      << " decompositions invalid or over 3pw+4k+7";
    return {agree == n && unsafe == 0 && bad_decomp == 0, d.str()};
}

outcome csp_reduction()
{
    auto rng = rng_for(5);
    std::size_t n = 0, agree = 0, deep = 0, positive = 0;
    for (; n < 200; ++n) {
        const auto inst = random_csp(rng, 5, 3);
        const auto doc = csp_to_net(inst);
        const bool expected = brute_force_csp(inst);
        positive += expected ? 1 : 0;
        if (target_reachable(doc) == expected)
            ++agree;
        if (benefit_depth(doc.net) > 2 + inst.degree() * (inst.dom + 1))
            ++deep;
        if (n % 20 == 0)
            structural_pool.push_back(doc);
    }
    std::ostringstream d;
    d << agree << "/" << n << " agree (" << positive << " satisfiable), " << deep << " over 2+deg(dom+1)";
    return {agree == n && deep == 0, d.str()};
}

outcome pebbling()
{
    auto rng = rng_for(6);
    std::size_t n = 0, agree = 0, positive = 0;
    for (; n < 100; ++n) {
        auto doc = random_safe_net(rng, {7, 10, 1, 0.4});
        const std::size_t goal = std::uniform_int_distribution<std::size_t>(0, doc.net.num_places() - 1)(rng);
        const bool expected =
            find_firing_sequence(doc.net, doc.initial, [&](const marking& m) { return m.test(goal); }).has_value();
        positive += expected ? 1 : 0;
        if (pebbling_reachable(net_to_pebbling(doc.net, doc.initial, goal)).has_value() == expected)
            ++agree;
        if (n % 10 == 0)
            structural_pool.push_back(std::move(doc));
    }
    std::ostringstream d;
    d << agree << "/" << n << " agree (" << positive << " goals reachable)";
    return {agree == n, d.str()};
}

outcome formula_gadget()
{
    auto rng = rng_for(7);
    std::size_t n = 0, agree = 0, wrong_cover = 0, unsat = 0;
    for (; n < 100; ++n) {
        const std::size_t vars = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        std::vector<std::string> names;
        for (std::size_t v = 1; v <= vars; ++v)
            names.push_back("q" + std::to_string(v));
        const formula f = random_propositional(rng, names, 4);
        const auto doc = formula_gadget_net(names);
        const auto report = fpt_model_check(doc.net, doc.initial, gadget_property(f));
        const bool sat = brute_force_sat(f);
        unsat += sat ? 0 : 1;
        if (report.holds == !sat)
            ++agree;
        if (min_vertex_cover(make_flow_graph(doc.net)).count() != 2 || report.cover_size != 2)
            ++wrong_cover;
        if (n % 10 == 0)
            structural_pool.push_back(doc);
    }
    std::ostringstream d;
    d << agree << "/" << n << " verdicts match satisfiability (" << unsat << " unsatisfiable), " << wrong_cover
      << " covers of size other than 2";
    return {agree == n && wrong_cover == 0, d.str()};
}

// Any vertex cover serves for the bounds; exact search on small nets,
// maximal matching otherwise.
place_set some_cover(const petri_net& net)
{
    const flow_graph g = make_flow_graph(net);
    if (net.num_places() <= 16)
        return min_vertex_cover(g);
    place_set c(g.size());
    for (auto [a, b] : g.edges())
        if (!c.test(a) && !c.test(b)) {
            c.set(a);
            c.set(b);
        }
    return c;
}

outcome structural_bounds()
{
    auto rng = rng_for(8);
    for (std::size_t i = 0; i < 200; ++i)
        structural_pool.push_back(random_safe_net(rng, {10, 12, 1, 0.4}));
    for (std::size_t a = 1; a <= 3; ++a)
        structural_pool.push_back(manufacturing_system(a, a, a));
    std::size_t fired = 0, exclusion = 0, checked = 0;
    std::size_t max_classes = 0;
    for (const auto& doc : structural_pool) {
        const place_set cover = some_cover(doc.net);
        const std::size_t k = cover.count();
        const auto im = interfaces(doc.net, cover);
        ++checked;
        max_classes = std::max(max_classes, im.table.classes.size());
        if (im.table.classes.size() > neighbourhood_bound(k) || im.distinct.size() > interface_bound(k))
            ++fired;
        if (doc.net.num_places() <= 12 &&
            check_interface_exclusion(doc.net, reachability_graph(doc.net, doc.initial), im))
            ++exclusion;
    }
    std::ostringstream d;
    d << checked << " nets, " << fired << " bound violations, " << exclusion
      << " interface exclusion failures, most neighbourhood classes " << max_classes;
    return {fired == 0 && exclusion == 0, d.str()};
}

outcome manufacturing()
{
    const formula phi = parse_ltl("G (end -> !p3)");
    std::size_t n = 0, agree = 0;
    std::string first;
    for (std::size_t a = 1; a <= 3; ++a)
        for (std::size_t b = 1; b <= 3; ++b)
            for (std::size_t c = 1; c <= 3; ++c) {
                const auto doc = manufacturing_system(a, b, c);
                const bool expected = c >= std::min(a, b);
                const bool fpt = fpt_model_check(doc.net, doc.initial, phi).holds;
                const bool oracle = explicit_model_check(doc.net, doc.initial, phi).holds;
                ++n;
                if (fpt == expected && oracle == expected)
                    ++agree;
                else if (first.empty())
                    first = "; first mismatch at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                            std::to_string(c) + ")";
            }
    std::ostringstream d;
    d << agree << "/" << n << " configurations match c >= min(a,b) and the oracle" << first;
    return {agree == n, d.str()};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance suite"};
    std::vector<int> only;
    app.add_option("--seed", base_seed, "base random seed");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<outcome()>>> criteria = {
        {"engine-equivalence", engine_equivalence}, {"run-construction", run_construction},
        {"flow-vs-search", flow_vs_search},         {"sat-reduction", sat_reduction},
        {"csp-reduction", csp_reduction},           {"pebbling", pebbling},
        {"formula-gadget", formula_gadget},         {"structural-bounds", structural_bounds},
        {"manufacturing", manufacturing},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << "criterion " << id << " " << criteria[i].first << ": " << (o.pass ? "PASS" : "FAIL") << " ("
                  << o.detail << ")" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

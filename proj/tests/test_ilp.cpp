#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vcnet/generators.hpp"
#include "vcnet/ilp.hpp"

#include <deque>
#include <map>
#include <set>
#include <sstream>

using namespace vcnet;

namespace {

bool row_holds(const linear_row& r, const std::vector<std::int64_t>& x)
{
    std::int64_t lhs = 0;
    for (const auto& t : r.terms)
        lhs += t.coef * x[t.var];
    return r.rel == relation::le ? lhs <= r.rhs : r.rel == relation::ge ? lhs >= r.rhs : lhs == r.rhs;
}

bool grid_feasible(const linear_system& sys)
{
    std::vector<std::int64_t> x(sys.num_variables(), 0);
    for (;;) {
        bool ok = true;
        for (const auto& r : sys.rows())
            ok = ok && row_holds(r, x);
        if (ok)
            return true;
        std::size_t i = 0;
        while (i < x.size() && x[i] == sys.upper()[i])
            x[i++] = 0;
        if (i == x.size())
            return false;
        ++x[i];
    }
}

linear_system random_system(rng_type& rng, std::int64_t scale)
{
    linear_system sys;
    const std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i)
        sys.add_variable("x" + std::to_string(i), static_cast<std::int64_t>(rng() % 6));
    const std::size_t m = 1 + rng() % 5;
    std::uniform_int_distribution<std::int64_t> coef(-scale, scale);
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<linear_term> terms;
        for (std::size_t i = 0; i < n; ++i)
            if (rng() % 2)
                terms.push_back({i, coef(rng)});
        const auto rel = static_cast<relation>(rng() % 3);
        sys.add_row(terms, rel, std::uniform_int_distribution<std::int64_t>(-2 * scale, 4 * scale)(rng));
    }
    return sys;
}

// Simple walks by brute force over (node, uses) states, independent of
// budget_search.
bool walk_exists(const labelled_graph& g, const flow_query& q)
{
    using key = std::pair<std::size_t, std::vector<std::int64_t>>;
    std::set<key> seen;
    std::deque<key> work;
    const std::vector<std::int64_t> zero(g.num_labels, 0);
    auto done = [&](const key& k) {
        if (k.first != q.target)
            return false;
        for (std::size_t l = 0; l < g.num_labels; ++l)
            if (q.exhaust[l] && k.second[l] != q.budget[l])
                return false;
        return true;
    };
    // Closed walks need at least one edge: seed with the source's successors.
    for (const auto& e : g.edges) {
        if (e.from != q.source)
            continue;
        key k{e.to, zero};
        if (e.label && ++k.second[*e.label] > q.budget[*e.label])
            continue;
        if (seen.insert(k).second)
            work.push_back(k);
    }
    if (q.source != q.target && done({q.source, zero}))
        return true;
    while (!work.empty()) {
        key k = work.front();
        work.pop_front();
        if (done(k))
            return true;
        for (const auto& e : g.edges) {
            if (e.from != k.first)
                continue;
            key n{e.to, k.second};
            if (e.label && ++n.second[*e.label] > q.budget[*e.label])
                continue;
            if (seen.insert(n).second)
                work.push_back(n);
        }
    }
    return false;
}

} // namespace

TEST_CASE("single variable bounds")
{
    linear_system sys;
    sys.add_variable("x", 5);
    sys.add_row({{0, 1}}, relation::le, 3);
    sys.add_row({{0, 1}}, relation::ge, 2);
    auto x = feasible(sys);
    REQUIRE(x.has_value());
    CHECK((*x)[0] == 2);
}

TEST_CASE("contradictory rows")
{
    linear_system sys;
    sys.add_variable("x", 3);
    sys.add_variable("y", 3);
    sys.add_row({{0, 1}, {1, 1}}, relation::eq, 1);
    sys.add_row({{0, 1}}, relation::ge, 1);
    sys.add_row({{1, 1}}, relation::ge, 1);
    CHECK_FALSE(feasible(sys).has_value());
}

TEST_CASE("integrality matters")
{
    linear_system sys;
    sys.add_variable("x", 10);
    sys.add_variable("y", 10);
    sys.add_row({{0, 2}, {1, 2}}, relation::eq, 3);
    CHECK_FALSE(feasible(sys).has_value());
    CHECK(solve_relaxation(sys, {0, 0}, {10, 10}).has_value());
}

TEST_CASE("grid enumeration agrees")
{
    rng_type rng(99);
    for (std::int64_t scale : {1, 3, 10}) {
        std::size_t yes = 0;
        for (int i = 0; i < 500; ++i) {
            auto sys = random_system(rng, scale);
            const bool expected = grid_feasible(sys);
            auto x = feasible(sys);
            REQUIRE(x.has_value() == expected);
            if (x) {
                CHECK(sys.satisfied_by(*x));
                ++yes;
            }
            auto plain = feasible(sys, {false, 2'000'000});
            CHECK(plain.has_value() == expected);
        }
        CHECK(yes > 50);
        CHECK(yes < 480);
    }
}

TEST_CASE("lp dump lists every row")
{
    linear_system sys;
    sys.add_variable("a", 2);
    sys.add_variable("b", 4);
    sys.add_row({{0, 1}, {1, -3}}, relation::le, 1, "first");
    sys.add_row({{1, 2}}, relation::eq, 4, "second");
    const std::string lp = sys.to_lp("demo");
    CHECK(lp.find("first") != std::string::npos);
    CHECK(lp.find("second") != std::string::npos);
    CHECK(lp.find("demo") != std::string::npos);
}

TEST_CASE("closed walk on a self loop")
{
    labelled_graph g;
    g.num_nodes = 1;
    g.edges = {{0, 0, std::nullopt}};
    auto r = connected_path_flow(g, {0, 0, {}, {}});
    REQUIRE(r.has_value());
    CHECK(r->multiplicity == std::vector<std::int64_t>{1});

    labelled_graph none;
    none.num_nodes = 1;
    CHECK_FALSE(connected_path_flow(none, {0, 0, {}, {}}).has_value());
}

TEST_CASE("disconnected cycles do not count")
{
    labelled_graph g;
    g.num_nodes = 6;
    g.num_labels = 1;
    // Path 0 -> 1, far cycle 2 <-> 3 carrying the label, and 4 <-> 5 unused.
    g.edges = {{0, 1, std::nullopt}, {2, 3, 0}, {3, 2, 0}, {4, 5, std::nullopt}, {5, 4, std::nullopt}};
    const flow_query q{0, 1, {2}, {true}};
    CHECK_FALSE(connected_path_flow(g, q).has_value());
    CHECK_FALSE(budget_search(g, q).has_value());
    CHECK_FALSE(walk_exists(g, q));

    for (bool heuristic : {true, false}) {
        flow_options opt;
        opt.heuristic = heuristic;
        CHECK_FALSE(connected_path_flow(g, q, opt).has_value());
    }
    g.edges.push_back({1, 2, std::nullopt});
    g.edges.push_back({2, 1, std::nullopt});
    auto r = connected_path_flow(g, q);
    REQUIRE(r.has_value());
    CHECK(reconstruct_walk(g, 0, 1, r->multiplicity).has_value());
}

TEST_CASE("exhaustion forces label uses")
{
    labelled_graph g;
    g.num_nodes = 2;
    g.num_labels = 1;
    g.edges = {{0, 1, std::nullopt}, {1, 1, 0}};
    auto r = connected_path_flow(g, {0, 1, {3}, {true}});
    REQUIRE(r.has_value());
    CHECK(r->multiplicity[1] == 3);
    CHECK(connected_path_flow(g, {0, 1, {3}, {false}})->multiplicity[1] == 0);
    CHECK_FALSE(connected_path_flow(g, {1, 0, {3}, {false}}).has_value());
}

TEST_CASE("random flow queries against brute force")
{
    rng_type rng(41);
    std::size_t found = 0;
    for (int i = 0; i < 400; ++i) {
        auto inst = random_flow_instance(rng, 12, 2, 3);
        const bool expected = walk_exists(inst.graph, inst.query);
        auto r = connected_path_flow(inst.graph, inst.query);
        REQUIRE(r.has_value() == expected);
        auto s = budget_search(inst.graph, inst.query);
        CHECK(s.has_value() == expected);
        if (!r)
            continue;
        ++found;
        CHECK(flow_rows_hold(inst.graph, inst.query, r->multiplicity));
        auto walk = reconstruct_walk(inst.graph, inst.query.source, inst.query.target, r->multiplicity);
        REQUIRE(walk.has_value());
        if (inst.query.source == inst.query.target)
            REQUIRE_FALSE(walk->empty());
        std::size_t at = inst.query.source;
        std::map<std::size_t, std::int64_t> used;
        for (auto e : *walk) {
            CHECK(inst.graph.edges[e].from == at);
            at = inst.graph.edges[e].to;
            ++used[e];
        }
        CHECK(at == inst.query.target);
        for (std::size_t e = 0; e < r->multiplicity.size(); ++e)
            CHECK(used[e] == r->multiplicity[e]);
    }
    CHECK(found > 40);
}

TEST_CASE("systems are dumped when asked")
{
    labelled_graph g;
    g.num_nodes = 3;
    g.num_labels = 1;
    g.edges = {{0, 1, 0}, {1, 2, std::nullopt}, {0, 2, 0}};
    std::ostringstream out;
    flow_options opt;
    opt.heuristic = false;
    opt.dump = &out;
    (void)connected_path_flow(g, {0, 2, {1}, {true}}, opt);
    CHECK_FALSE(out.str().empty());
}

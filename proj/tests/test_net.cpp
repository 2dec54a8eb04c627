#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vcnet/generators.hpp"
#include "vcnet/reach.hpp"
#include "vcnet/reductions.hpp"

using namespace vcnet;

namespace {

net_document chain() { return parse_net("place p marked\nplace q\ntrans t pre p post q\n"); }

std::size_t place(const petri_net& n, const char* id) { return *n.place_index(id); }
std::size_t trans(const petri_net& n, const char* id) { return *n.transition_index(id); }

} // namespace

TEST_CASE("smallest net parses")
{
    auto d = parse_net("place p marked; place q; trans t pre p post q");
    REQUIRE(d.net.num_places() == 2);
    REQUIRE(d.net.num_transitions() == 1);
    const auto p = place(d.net, "p"), q = place(d.net, "q"), t = trans(d.net, "t");
    CHECK(d.net.pre(p, t));
    CHECK(d.net.post(q, t));
    CHECK_FALSE(d.net.pre(q, t));
    CHECK(d.initial.test(p));
    CHECK_FALSE(d.initial.test(q));
}

TEST_CASE("parse errors carry line and name")
{
    try {
        (void)parse_net("place p\ntrans t pre zz post p\n");
        FAIL("accepted undeclared place");
    } catch (const parse_error& e) {
        CHECK(e.where == 2);
        CHECK(std::string(e.what()).find("zz") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_net("place p\nplace p\n"), parse_error);
    CHECK_THROWS_AS((void)parse_net("place p{q}\n"), parse_error);
    CHECK_THROWS_AS((void)parse_net("trans t post\nbogus\n"), parse_error);
    CHECK_THROWS_AS((void)parse_net("place p marked twice\n"), parse_error);
}

TEST_CASE("comments and separators")
{
    auto d = parse_net("# header; not a statement\nplace p marked # trailing; ignored\nplace q; trans t pre p post q\n");
    CHECK(d.net.num_places() == 2);
    CHECK(d.net.num_transitions() == 1);
    CHECK_THROWS_AS((void)parse_net("place p;\nplace p\n"), parse_error);
}

TEST_CASE("manufacturing net shape")
{
    auto d = manufacturing_system(1, 1, 1);
    CHECK(d.net.num_places() == 7);
    CHECK(d.net.num_transitions() == 4);
    auto en = enabled(d.net, d.initial);
    REQUIRE(en.size() == 1);
    CHECK(d.net.transition_name(en[0]) == "take_alpha1");
}

TEST_CASE("enabled and fire")
{
    auto d = chain();
    const auto p = place(d.net, "p"), q = place(d.net, "q"), t = trans(d.net, "t");
    CHECK(enabled(d.net, d.initial) == std::vector<std::size_t>{t});
    const marking after = fire(d.net, d.initial, t);
    CHECK(after.test(q));
    CHECK_FALSE(after.test(p));
    CHECK(enabled(d.net, after).empty());
    CHECK_THROWS_AS((void)fire(d.net, after, t), not_enabled_error);

    auto grow = parse_net("place p marked\nplace q marked\ntrans t pre p post p q\n");
    CHECK_THROWS_AS((void)fire(grow.net, grow.initial, 0), one_safety_violation);
}

TEST_CASE("sat gadget firing moves the choice token")
{
    pwsat_instance inst;
    inst.num_vars = 1;
    inst.clauses = {{1}};
    inst.part = {1};
    inst.target = {1};
    auto d = sat_to_net(inst);
    const marking m = fire(d.net, d.initial, trans(d.net, "t1"));
    CHECK_FALSE(m.test(place(d.net, "q1")));
    CHECK_FALSE(m.test(place(d.net, "s")));
    CHECK(m.test(place(d.net, "x1")));
    CHECK(m.test(place(d.net, "tup1")));
}

TEST_CASE("reachability graph basics")
{
    auto d = chain();
    auto g = reachability_graph(d.net, d.initial);
    CHECK(g.nodes.size() == 2);
    CHECK(g.edges.size() == 1);
    REQUIRE(g.deadlocks.size() == 1);
    CHECK(g.nodes[g.deadlocks[0]] == d.net.make_marking({"q"}));
    CHECK_THROWS_AS((void)reachability_graph(d.net, d.initial, 1), limit_exceeded);

    auto m = manufacturing_system(1, 1, 1);
    auto mg = reachability_graph(m.net, m.initial);
    CHECK(mg.nodes.size() == 5);
    CHECK(mg.edges.size() == 4);
}

TEST_CASE("reachable and coverable")
{
    auto d = chain();
    CHECK(is_reachable(d.net, d.initial, d.net.make_marking({"q"})));
    CHECK(is_coverable(d.net, d.initial, d.net.make_marking({"q"})));
    CHECK_FALSE(is_reachable(d.net, d.initial, d.net.make_marking({"p", "q"})));
    CHECK_FALSE(is_coverable(d.net, d.initial, d.net.make_marking({"p", "q"})));
    CHECK(is_coverable(d.net, d.initial, d.net.empty_marking()));
    CHECK_FALSE(is_reachable(d.net, d.initial, d.net.empty_marking()));
}

TEST_CASE("satisfiable sat reduction reaches its target")
{
    pwsat_instance inst;
    inst.num_vars = 2;
    inst.clauses = {{1, 2}, {-1}};
    inst.part = {1, 1};
    inst.target = {1};
    auto d = sat_to_net(inst);
    REQUIRE(brute_force_ppwsat(inst));
    CHECK(is_reachable(d.net, d.initial, *d.target));
}

TEST_CASE("random nets against the naive explorer")
{
    rng_type rng(7);
    for (int i = 0; i < 300; ++i) {
        auto d = random_safe_net(rng, {7, 9, 1, 0.5});
        const auto toy = oracle::from_document(d);
        const auto ref = oracle::explore(toy);
        CHECK_FALSE(ref.unsafe);
        auto g = reachability_graph(d.net, d.initial);
        REQUIRE(g.nodes.size() == ref.states.size());
        CHECK(g.edges.size() == ref.edges);
        CHECK(count_reachable(d.net, d.initial) == ref.states.size());

        std::set<oracle::state> dead_ref;
        for (const auto& s : ref.states)
            if (oracle::is_dead(toy, s))
                dead_ref.insert(s);
        CHECK(g.deadlocks.size() == dead_ref.size());
        const auto dead = reachable_deadlocks(d.net, d.initial);
        REQUIRE(dead.size() == dead_ref.size());
        for (const auto& m : dead) {
            oracle::state s(d.net.num_places());
            for (std::size_t p = 0; p < s.size(); ++p)
                s[p] = m.test(p);
            CHECK(dead_ref.count(s) == 1);
        }

        for (const auto& m : g.nodes)
            CHECK(is_reachable(d.net, d.initial, m));
    }
}

TEST_CASE("unsafe nets are reported")
{
    rng_type rng(11);
    int unsafe = 0;
    for (int i = 0; i < 400; ++i) {
        net_builder b("r");
        const int n = 1 + static_cast<int>(rng() % 5);
        std::vector<std::string> ids;
        for (int p = 0; p < n; ++p) {
            ids.push_back("p" + std::to_string(p));
            b.place(ids.back(), rng() % 2 == 0);
        }
        for (int t = 0; t < 4; ++t) {
            std::vector<std::string> pre, post;
            for (const auto& id : ids) {
                if (rng() % 3 == 0)
                    pre.push_back(id);
                if (rng() % 3 == 0)
                    post.push_back(id);
            }
            b.transition("t" + std::to_string(t), pre, post);
        }
        auto d = b.build();
        const bool ref_unsafe = oracle::explore(oracle::from_document(d)).unsafe;
        bool threw = false;
        try {
            verify_one_safe(d.net, d.initial);
        } catch (const one_safety_violation&) {
            threw = true;
        }
        CHECK(threw == ref_unsafe);
        unsafe += ref_unsafe ? 1 : 0;
    }
    CHECK(unsafe > 0);
}

TEST_CASE("firing sequences reach the goal")
{
    rng_type rng(5);
    for (int i = 0; i < 100; ++i) {
        auto d = random_safe_net(rng, {6, 8, 1, 0.5});
        const std::size_t goal = rng() % d.net.num_places();
        auto seq = find_firing_sequence(d.net, d.initial, [&](const marking& m) { return m.test(goal); });
        bool ref = false;
        for (const auto& s : oracle::explore(oracle::from_document(d)).states)
            ref = ref || s[goal];
        REQUIRE(seq.has_value() == ref);
        if (seq) {
            marking m = d.initial;
            for (auto t : *seq)
                m = fire(d.net, m, t);
            CHECK(m.test(goal));
        }
    }
}

TEST_CASE("format round trip")
{
    rng_type rng(3);
    for (int i = 0; i < 100; ++i) {
        auto d = random_safe_net(rng);
        const std::string text = format_net(d.net, d.initial);
        auto back = parse_net(text);
        CHECK(back.net == d.net);
        CHECK(back.initial == d.initial);
        CHECK(format_net(back.net, back.initial) == text);
    }
    auto m = manufacturing_system(2, 3, 1);
    auto back = parse_net(format_net(m.net, m.initial, m.net.make_marking({"p1"})));
    REQUIRE(back.target.has_value());
    CHECK(*back.target == m.net.make_marking({"p1"}));
}

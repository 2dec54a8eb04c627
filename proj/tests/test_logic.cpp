#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vcnet/automaton.hpp"
#include "vcnet/explicit_mc.hpp"
#include "vcnet/generators.hpp"
#include "vcnet/ltl.hpp"
#include "vcnet/reductions.hpp"

using namespace vcnet;

namespace {

bool holds_at(const std::vector<std::string>& props, letter l, const std::string& atom)
{
    auto it = std::find(props.begin(), props.end(), atom);
    return it != props.end() && ((l >> (it - props.begin())) & 1U);
}

// Position-by-position evaluation over a successor function; U and R by
// fixpoint iteration, so the same code serves finite words and lassos.
std::vector<bool> sat_positions(const formula& f, const std::vector<std::string>& props, const std::vector<letter>& w,
                                const std::vector<std::optional<std::size_t>>& next)
{
    const std::size_t n = w.size();
    auto sub = [&](const formula& g) { return sat_positions(g, props, w, next); };
    std::vector<bool> out(n);
    switch (f->op) {
    case ltl_op::tt:
        out.assign(n, true);
        break;
    case ltl_op::ff:
        break;
    case ltl_op::end:
        for (std::size_t i = 0; i < n; ++i)
            out[i] = !next[i].has_value();
        break;
    case ltl_op::atom:
        for (std::size_t i = 0; i < n; ++i)
            out[i] = holds_at(props, w[i], f->atom);
        break;
    case ltl_op::negation: {
        auto a = sub(f->lhs);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = !a[i];
        break;
    }
    case ltl_op::conjunction:
    case ltl_op::disjunction:
    case ltl_op::implication: {
        auto a = sub(f->lhs), b = sub(f->rhs);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = f->op == ltl_op::conjunction   ? a[i] && b[i]
                     : f->op == ltl_op::disjunction ? a[i] || b[i]
                                                    : !a[i] || b[i];
        break;
    }
    case ltl_op::next: {
        auto a = sub(f->lhs);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = next[i] && a[*next[i]];
        break;
    }
    case ltl_op::eventually:
    case ltl_op::until: {
        auto a = f->op == ltl_op::until ? sub(f->lhs) : std::vector<bool>(n, true);
        auto b = sub(f->op == ltl_op::until ? f->rhs : f->lhs);
        out = b;
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t i = 0; i < n; ++i)
                if (!out[i] && a[i] && next[i] && out[*next[i]])
                    out[i] = grew = true;
        }
        break;
    }
    case ltl_op::always:
    case ltl_op::release: {
        auto a = f->op == ltl_op::release ? sub(f->lhs) : std::vector<bool>(n, false);
        auto b = sub(f->op == ltl_op::release ? f->rhs : f->lhs);
        out = b;
        for (bool shrank = true; shrank;) {
            shrank = false;
            for (std::size_t i = 0; i < n; ++i)
                if (out[i] && !a[i] && next[i] && !out[*next[i]])
                    out[i] = !(shrank = true);
        }
        break;
    }
    }
    return out;
}

bool ref_eval(const formula& f, const std::vector<std::string>& props, const std::vector<letter>& word)
{
    std::vector<std::optional<std::size_t>> next(word.size());
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        next[i] = i + 1;
    return sat_positions(f, props, word, next)[0];
}

bool ref_eval(const formula& f, const std::vector<std::string>& props, const lasso& l)
{
    std::vector<letter> w = l.prefix;
    w.insert(w.end(), l.loop.begin(), l.loop.end());
    std::vector<std::optional<std::size_t>> next(w.size());
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        next[i] = i + 1;
    next.back() = l.prefix.size();
    return sat_positions(f, props, w, next)[0];
}

std::vector<std::vector<letter>> all_words(std::size_t props, std::size_t max_len)
{
    std::vector<std::vector<letter>> out, layer{{}};
    const letter letters = letter{1} << props;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<letter>> grown;
        for (const auto& w : layer)
            for (letter l = 0; l < letters; ++l) {
                grown.push_back(w);
                grown.back().push_back(l);
            }
        out.insert(out.end(), grown.begin(), grown.end());
        layer = std::move(grown);
    }
    return out;
}

std::vector<lasso> all_lassos(std::size_t props, std::size_t max_prefix, std::size_t max_loop)
{
    std::vector<lasso> out;
    auto words = all_words(props, std::max(max_prefix, max_loop));
    std::vector<std::vector<letter>> prefixes{{}};
    for (const auto& w : words)
        if (w.size() <= max_prefix)
            prefixes.push_back(w);
    for (const auto& p : prefixes)
        for (const auto& l : words)
            if (l.size() <= max_loop)
                out.push_back({p, l});
    return out;
}

} // namespace

TEST_CASE("parser shapes")
{
    auto f = parse_ltl("G (p3 -> !end)");
    REQUIRE(f->op == ltl_op::always);
    CHECK(f->lhs->op == ltl_op::implication);
    CHECK(f->lhs->lhs->atom == "p3");
    CHECK(f->lhs->rhs->op == ltl_op::negation);
    CHECK(f->lhs->rhs->lhs->op == ltl_op::end);

    CHECK(parse_ltl("p U q")->op == ltl_op::until);
    auto g = parse_ltl("!(true U (a & !b))");
    REQUIRE(g->op == ltl_op::negation);
    CHECK(g->lhs->op == ltl_op::until);
    CHECK(g->lhs->lhs->op == ltl_op::tt);

    CHECK(parse_ltl("a & b | c")->op == ltl_op::disjunction);
    CHECK(parse_ltl("a -> b -> c")->rhs->op == ltl_op::implication);
    CHECK(parse_ltl("F a U b")->op == ltl_op::until);
    CHECK(atoms(parse_ltl("b U (a & X b)")) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("parse errors report offsets")
{
    try {
        (void)parse_ltl("p & & q");
        FAIL("accepted");
    } catch (const parse_error& e) {
        CHECK(e.where == 4);
    }
    CHECK_THROWS_AS((void)parse_ltl(""), parse_error);
    CHECK_THROWS_AS((void)parse_ltl("(p"), parse_error);
    CHECK_THROWS_AS((void)parse_ltl("p q"), parse_error);
    CHECK_THROWS_AS((void)parse_ltl("p $ q"), parse_error);
}

TEST_CASE("printing round trip")
{
    rng_type rng(1);
    const std::vector<std::string> atoms{"a", "b", "p3"};
    for (int i = 0; i < 500; ++i) {
        auto f = random_ltl(rng, atoms, 4);
        CHECK(equal(parse_ltl(to_string(f)), f));
    }
}

TEST_CASE("finite word semantics")
{
    const std::vector<std::string> p{"p"}, pq{"p", "q"};
    CHECK(eval_ltl(parse_ltl("p"), p, std::vector<letter>{1}));
    CHECK_FALSE(eval_ltl(parse_ltl("X p"), p, std::vector<letter>{1}));
    CHECK(eval_ltl(parse_ltl("p U q"), pq, std::vector<letter>{1, 1, 2}));
    CHECK_FALSE(eval_ltl(parse_ltl("p U q"), pq, std::vector<letter>{1, 1, 1}));
    CHECK(eval_ltl(parse_ltl("F end"), p, std::vector<letter>{0, 0}));
    CHECK(eval_ltl(parse_ltl("G p"), p, std::vector<letter>{1, 1}));
    CHECK_THROWS_AS((void)eval_ltl(parse_ltl("p"), p, std::vector<letter>{}), error);
    CHECK_FALSE(eval_ltl(parse_ltl("F end"), p, lasso{{}, {1}}));
}

TEST_CASE("evaluator matches the reference on random formulas")
{
    rng_type rng(2);
    const std::vector<std::string> props{"a", "b"};
    const auto words = all_words(2, 4);
    const auto lassos = all_lassos(2, 2, 2);
    for (int i = 0; i < 150; ++i) {
        auto f = random_ltl(rng, props, 3);
        for (const auto& w : words)
            REQUIRE(eval_ltl(f, props, w) == ref_eval(f, props, w));
        for (const auto& l : lassos)
            REQUIRE(eval_ltl(f, props, l) == ref_eval(f, props, l));
    }
}

TEST_CASE("constant automata")
{
    auto nfa = ltl_to_nfa(make_true());
    CHECK(nfa.kind == automaton_kind::finite);
    CHECK_FALSE(accepts(nfa, std::vector<letter>{}));
    CHECK(accepts(nfa, std::vector<letter>{0}));
    CHECK(accepts(nfa, std::vector<letter>{0, 0, 0}));
    auto ba = ltl_to_buchi(make_true());
    CHECK(accepts(ba, lasso{{}, {0}}));
    CHECK_FALSE(accepts(ltl_to_buchi(make_false()), lasso{{0}, {0}}));

    auto p = ltl_to_nfa(make_atom("p"));
    REQUIRE(p.props == std::vector<std::string>{"p"});
    CHECK(accepts(p, std::vector<letter>{1}));
    CHECK(accepts(p, std::vector<letter>{1, 0}));
    CHECK_FALSE(accepts(p, std::vector<letter>{0, 1}));
}

TEST_CASE("end marker property over short words")
{
    auto f = parse_ltl("G (end -> !p3)");
    auto nfa = ltl_to_nfa(f);
    const std::vector<std::string> props{"p3", "z"};
    for (const auto& w : all_words(2, 4)) {
        std::vector<letter> proj;
        for (auto l : w)
            proj.push_back(l & 1U);
        CHECK(accepts(nfa, proj) == !(w.back() & 1U));
        CHECK(ref_eval(f, props, w) == !(w.back() & 1U));
    }
}

TEST_CASE("translations agree with the reference evaluator")
{
    rng_type rng(3);
    const std::vector<std::string> pool{"a", "b"};
    const auto words = all_words(2, 4);
    const auto lassos = all_lassos(2, 2, 2);
    for (int i = 0; i < 120; ++i) {
        auto f = random_ltl(rng, pool, 3);
        auto nfa = ltl_to_nfa(f);
        auto ba = ltl_to_buchi(f);
        auto dfa = determinize(nfa);
        REQUIRE(nfa.props == atoms(f));
        auto project = [&](letter l) {
            letter out = 0;
            for (std::size_t k = 0; k < nfa.props.size(); ++k)
                if (holds_at(pool, l, nfa.props[k]))
                    out |= letter{1} << k;
            return out;
        };
        for (const auto& w : words) {
            std::vector<letter> pw;
            for (auto l : w)
                pw.push_back(project(l));
            const bool expected = ref_eval(f, pool, w);
            CHECK(accepts(nfa, pw) == expected);
            CHECK(accepts(dfa, pw) == expected);
        }
        for (const auto& l : lassos) {
            lasso pl;
            for (auto x : l.prefix)
                pl.prefix.push_back(project(x));
            for (auto x : l.loop)
                pl.loop.push_back(project(x));
            CHECK(accepts(ba, pl) == ref_eval(f, pool, l));
        }
    }
}

TEST_CASE("automaton text round trip")
{
    rng_type rng(4);
    for (int i = 0; i < 50; ++i) {
        auto a = ltl_to_buchi(random_ltl(rng, {"x", "y"}, 3));
        auto back = parse_automaton(format_automaton(a), automaton_kind::finite);
        CHECK(back == a);
    }
    auto a = parse_automaton("alphabet p\nstate s init acc\nedge s {p} s\n", automaton_kind::finite);
    CHECK(a.kind == automaton_kind::finite);
    CHECK(accepts(a, std::vector<letter>{1, 1}));
    CHECK_FALSE(accepts(a, std::vector<letter>{1, 0}));
    CHECK_THROWS_AS((void)parse_automaton("state s\nedge s {p} t\n", automaton_kind::finite), parse_error);
}

TEST_CASE("explicit checks on small nets")
{
    auto d = parse_net("place p marked\nplace q\ntrans t pre p post q\n");
    CHECK(explicit_model_check(d.net, d.initial, parse_ltl("F q")).holds);
    auto v = explicit_model_check(d.net, d.initial, parse_ltl("G p"));
    REQUIRE_FALSE(v.holds);
    REQUIRE(v.counterexample.has_value());
    CHECK(v.counterexample->markings.size() == 2);
    CHECK_FALSE(v.counterexample->loop_start.has_value());
    CHECK(v.counterexample->markings.back() == d.net.make_marking({"q"}));
    CHECK_THROWS_AS((void)explicit_model_check(d.net, d.initial, parse_ltl("F r")), alphabet_mismatch);

    auto cyc = parse_net("place p marked\nplace q\ntrans t pre p post q\ntrans u pre q post p\n");
    auto w = explicit_model_check(cyc.net, cyc.initial, parse_ltl("F end"));
    REQUIRE_FALSE(w.holds);
    CHECK(w.counterexample->loop_start.has_value());
    CHECK(explicit_model_check(cyc.net, cyc.initial, parse_ltl("G F q")).holds);
}

TEST_CASE("manufacturing property by explicit search")
{
    const auto phi = parse_ltl("G (end -> !p3)");
    for (std::size_t a = 1; a <= 3; ++a)
        for (std::size_t b = 1; b <= 3; ++b)
            for (std::size_t c = 1; c <= 3; ++c) {
                auto m = manufacturing_system(a, b, c);
                // Every maximal run is the single controller loop; it dies
                // on the first material that runs out.
                const bool stuck_at_p3 = c < std::min(a, b);
                CHECK(explicit_model_check(m.net, m.initial, phi).holds == !stuck_at_p3);
            }
}

TEST_CASE("counterexamples replay as runs")
{
    rng_type rng(6);
    for (int i = 0; i < 150; ++i) {
        auto d = random_safe_net(rng);
        std::vector<std::string> names = d.net.places();
        names.resize(std::min<std::size_t>(2, names.size()));
        auto f = random_ltl(rng, names, 3);
        auto v = explicit_model_check(d.net, d.initial, f);
        if (v.holds)
            continue;
        const auto& run = *v.counterexample;
        REQUIRE(run.markings.front() == d.initial);
        for (std::size_t k = 0; k < run.transitions.size(); ++k) {
            if (k + 1 < run.markings.size())
                CHECK(fire(d.net, run.markings[k], run.transitions[k]) == run.markings[k + 1]);
            else
                CHECK(fire(d.net, run.markings[k], run.transitions[k]) == run.markings[*run.loop_start]);
        }
        auto props = proposition_places(d.net, atoms(f));
        std::vector<letter> word;
        for (const auto& m : run.markings)
            word.push_back(letter_of(m, props));
        if (run.loop_start) {
            lasso l{{word.begin(), word.begin() + static_cast<std::ptrdiff_t>(*run.loop_start)},
                    {word.begin() + static_cast<std::ptrdiff_t>(*run.loop_start), word.end()}};
            CHECK_FALSE(ref_eval(f, atoms(f), l));
        } else {
            CHECK(enabled(d.net, run.markings.back()).empty());
            CHECK_FALSE(ref_eval(f, atoms(f), word));
        }
    }
}

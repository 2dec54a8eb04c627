// vcnet: command-line front end. Reports are `key: value` lines on stdout.
// Exit codes: 0 holds/success, 1 property fails (or negative answer),
// 2 input error, 3 engine disagreement.
#include "vcnet/explicit_mc.hpp"
#include "vcnet/fpt.hpp"
#include "vcnet/generators.hpp"
#include "vcnet/reach.hpp"
#include "vcnet/reductions.hpp"
#include "vcnet/structure.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace vcnet;

namespace {

enum exit_code : int { holds = 0, fails = 1, input_error = 2, disagreement = 3 };

class report
{
public:
    template <typename T>
    void add(const std::string& key, const T& value)
    {
        std::ostringstream v;
        v << value;
        std::string s = v.str();
        // Multi-line values are indented so every report line stays key: value.
        for (std::size_t at = s.find('\n'); at != std::string::npos; at = s.find('\n', at + 3))
            s.replace(at, 1, "\n  ");
        std::cout << key << ": " << s << '\n';
    }
};

std::string read_text(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw error("cannot write '" + path + "'");
    out << text;
}

std::string join_places(const petri_net& net, const place_set& s)
{
    std::string out;
    s.for_each([&](std::size_t p) { out += (out.empty() ? "" : " ") + net.place_name(p); });
    return out.empty() ? "-" : out;
}

std::string join_transitions(const petri_net& net, const std::vector<std::size_t>& ts)
{
    std::string out;
    for (auto t : ts)
        out += (out.empty() ? "" : " ") + net.transition_name(t);
    return out.empty() ? "-" : out;
}

double millis_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string ms(double v)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << v;
    return s.str();
}

// check ----------------------------------------------------------------------

struct check_args
{
    std::string net;
    std::string ltl;
    std::string nfa;
    std::string buchi;
    std::string engine = "fpt";
    std::string cover;
    std::string dump_ilp;
    std::size_t node_limit = default_node_limit;
};

property_automata load_automata(const check_args& a)
{
    property_automata bad;
    std::optional<word_automaton> fin, inf;
    if (!a.nfa.empty())
        fin = read_automaton_file(a.nfa, automaton_kind::finite);
    if (!a.buchi.empty())
        inf = read_automaton_file(a.buchi, automaton_kind::buchi);
    if (fin && fin->kind != automaton_kind::finite)
        throw error("'" + a.nfa + "' is not a finite-word automaton");
    if (inf && inf->kind != automaton_kind::buchi)
        throw error("'" + a.buchi + "' is not a Buchi automaton");
    if (fin && inf && fin->props != inf->props)
        throw error("the two automata must share one alphabet");
    // A missing automaton accepts nothing.
    auto empty_like = [](const word_automaton& w, automaton_kind kind) {
        word_automaton e;
        e.kind = kind;
        e.props = w.props;
        return e;
    };
    bad.finite = fin ? *fin : empty_like(*inf, automaton_kind::finite);
    bad.buchi = inf ? *inf : empty_like(*fin, automaton_kind::buchi);
    return bad;
}

int cmd_check(const check_args& a)
{
    report r;
    const auto doc = read_net_file(a.net);
    r.add("command", "check");
    r.add("net", a.net);

    property_automata bad;
    if (!a.ltl.empty()) {
        const formula phi = parse_ltl(a.ltl);
        r.add("property", to_string(phi));
        bad = violation_automata(phi);
    } else {
        bad = load_automata(a);
        r.add("property", "automata " + (a.nfa.empty() ? std::string("-") : a.nfa) + " " +
                              (a.buchi.empty() ? std::string("-") : a.buchi));
    }
    (void)proposition_places(doc.net, bad.finite.props);

    fpt_options opt;
    if (!a.cover.empty())
        opt.cover = parse_cover(doc.net, read_text(a.cover));
    std::ofstream dump;
    if (!a.dump_ilp.empty()) {
        dump.open(a.dump_ilp);
        if (!dump)
            throw error("cannot write '" + a.dump_ilp + "'");
        opt.flow.dump = &dump;
    }

    bool run_fpt = a.engine != "explicit";
    bool run_explicit = a.engine != "fpt";
    r.add("engine", a.engine);

    std::optional<fpt_report> fast;
    if (run_fpt) {
        const auto start = std::chrono::steady_clock::now();
        try {
            fast = fpt_model_check(doc.net, doc.initial, bad, opt);
        } catch (const structural_violation& e) {
            if (a.engine == "both")
                throw;
            r.add("note", std::string("fpt engine unavailable (") + e.what() + "); fell back to explicit");
            run_explicit = true;
        }
        if (fast) {
            r.add("fpt.verdict", fast->holds ? "holds" : "fails");
            if (!fast->holds) {
                r.add("fpt.violation", fast->violation);
                r.add("fpt.witness", join_transitions(doc.net, fast->witness_transitions));
                if (fast->witness && fast->witness->loop_start)
                    r.add("fpt.witness_loop_start", *fast->witness->loop_start);
            }
            r.add("fpt.cover_size", fast->cover_size);
            r.add("fpt.special_places", fast->special_size);
            r.add("fpt.interfaces", fast->num_interfaces);
            r.add("fpt.eca_states", fast->eca_states);
            r.add("fpt.eca_edges", fast->eca_edges);
            r.add("fpt.product_nodes", fast->product_nodes);
            r.add("fpt.flow_queries", fast->acceptance.queries);
            r.add("fpt.cuts", fast->acceptance.cuts);
            r.add("fpt.time_ms", ms(millis_since(start)));
        }
    }

    std::optional<verdict> slow;
    if (run_explicit) {
        const auto start = std::chrono::steady_clock::now();
        slow = explicit_model_check(doc.net, doc.initial, bad, a.node_limit);
        r.add("explicit.verdict", slow->holds ? "holds" : "fails");
        if (slow->counterexample)
            r.add("explicit.counterexample", format_run(doc.net, *slow->counterexample));
        r.add("explicit.time_ms", ms(millis_since(start)));
    }

    if (fast && slow && fast->holds != slow->holds) {
        r.add("verdict", "disagreement");
        return disagreement;
    }
    if (fast && slow)
        r.add("agreement", "yes");
    const bool ok = fast ? fast->holds : slow->holds;
    r.add("verdict", ok ? "holds" : "fails");
    return ok ? holds : fails;
}

// params ---------------------------------------------------------------------

int cmd_params(const std::string& path, const std::string& cover_path)
{
    report r;
    const auto doc = read_net_file(path);
    r.add("command", "params");
    r.add("net", path);
    r.add("places", doc.net.num_places());
    r.add("transitions", doc.net.num_transitions());
    const flow_graph g = make_flow_graph(doc.net);
    r.add("flow_edges", g.num_edges());
    const place_set cover = cover_path.empty() ? min_vertex_cover(g) : parse_cover(doc.net, read_text(cover_path));
    if (!is_vertex_cover(g, cover))
        throw invalid_cover("supplied set does not cover the flow graph");
    r.add("cover", join_places(doc.net, cover));
    r.add("cover_size", cover.count());
    const auto im = interfaces(doc.net, cover);
    r.add("neighbourhoods", im.table.classes.size());
    r.add("neighbourhood_bound", neighbourhood_bound(cover.count()));
    r.add("interfaces", im.distinct.size());
    r.add("interface_bound", interface_bound(cover.count()));
    const auto members = im.members();
    for (std::size_t i = 0; i < members.size(); ++i) {
        place_set s(doc.net.num_places());
        for (auto p : members[i])
            s.set(p);
        r.add("interface." + std::to_string(i), join_places(doc.net, s));
    }
    r.add("benefit_depth", benefit_depth(doc.net));
    return holds;
}

// reduce ---------------------------------------------------------------------

struct reduce_args
{
    std::string kind;
    std::vector<std::string> inputs;
    std::string out;
    std::string decomposition_out;
    std::string goal;
    std::string formula_text;
};

int cmd_reduce(const reduce_args& a)
{
    report r;
    r.add("command", "reduce " + a.kind);
    auto need_input = [&](std::size_t n) {
        if (a.inputs.size() != n)
            throw error("reduce " + a.kind + " expects " + std::to_string(n) + " argument(s)");
    };
    net_document doc;
    if (a.kind == "ppwsat") {
        need_input(1);
        const auto inst = parse_pwsat(read_text(a.inputs[0]));
        doc = sat_to_net(inst);
        const auto pd = build_reduction_decomposition(inst);
        const std::size_t pw = decomposition_width(primal_decomposition(inst));
        const auto check = validate_path_decomposition(make_flow_graph(doc.net), pd);
        r.add("variables", inst.num_vars);
        r.add("clauses", inst.clauses.size());
        r.add("parts", inst.num_parts());
        r.add("primal_width", pw);
        r.add("decomposition_width", check.width ? std::to_string(*check.width) : "invalid");
        r.add("width_bound", 3 * pw + 4 * inst.num_parts() + 7);
        if (!a.decomposition_out.empty()) {
            write_text(a.decomposition_out, format_decomposition(pd));
            r.add("decomposition", a.decomposition_out);
        }
    } else if (a.kind == "csp") {
        need_input(1);
        const auto inst = parse_csp(read_text(a.inputs[0]));
        doc = csp_to_net(inst);
        r.add("variables", inst.vars.size());
        r.add("constraints", inst.constraints.size());
        r.add("degree", inst.degree());
        r.add("benefit_depth", benefit_depth(doc.net));
        r.add("benefit_bound", 2 + inst.degree() * (inst.dom + 1));
    } else if (a.kind == "pebbling") {
        need_input(1);
        const auto net = read_net_file(a.inputs[0]);
        const auto goal = net.net.place_index(a.goal);
        if (!goal)
            throw error("--goal must name a place of the net");
        const auto inst = net_to_pebbling(net.net, net.initial, *goal);
        write_text(a.out, format_pebbling(inst));
        r.add("red", inst.red.size());
        r.add("blue", inst.blue.size());
        r.add("output", a.out);
        return holds;
    } else if (a.kind == "gadget") {
        need_input(0);
        const formula f = parse_ltl(a.formula_text);
        doc = formula_gadget_net(atoms(f));
        r.add("property", to_string(gadget_property(f)));
    } else if (a.kind == "msys") {
        need_input(3);
        std::size_t abc[3];
        for (int i = 0; i < 3; ++i) {
            std::size_t used = 0;
            abc[i] = std::stoul(a.inputs[i], &used);
            if (used != a.inputs[i].size())
                throw error("msys expects three counts");
        }
        doc = manufacturing_system(abc[0], abc[1], abc[2]);
    } else {
        throw error("unknown reduction '" + a.kind + "'");
    }
    write_text(a.out, format_net(doc.net, doc.initial, doc.target));
    r.add("places", doc.net.num_places());
    r.add("transitions", doc.net.num_transitions());
    if (doc.target)
        r.add("target", join_places(doc.net, *doc.target));
    r.add("output", a.out);
    return holds;
}

// simulate / oracle ------------------------------------------------------------

int cmd_simulate(const std::string& path, std::size_t limit)
{
    report r;
    const auto inst = parse_pebbling(read_text(path));
    r.add("command", "simulate");
    r.add("red", inst.red.size());
    r.add("blue", inst.blue.size());
    const auto moves = pebbling_reachable(inst, limit);
    r.add("finish_reachable", moves ? "yes" : "no");
    if (moves) {
        std::string names;
        for (auto b : *moves)
            names += (names.empty() ? "" : " ") + inst.blue[b].name;
        r.add("moves", names.empty() ? "-" : names);
        r.add("move_count", moves->size());
    }
    return moves ? holds : fails;
}

int cmd_oracle(const std::string& kind, const std::string& input, const std::vector<std::string>& target,
               std::size_t node_limit)
{
    report r;
    r.add("command", "oracle " + kind);
    if (kind == "ppwsat") {
        const bool yes = brute_force_ppwsat(parse_pwsat(read_text(input)));
        r.add("satisfiable", yes ? "yes" : "no");
        return yes ? holds : fails;
    }
    if (kind == "csp") {
        const bool yes = brute_force_csp(parse_csp(read_text(input)));
        r.add("satisfiable", yes ? "yes" : "no");
        return yes ? holds : fails;
    }
    if (kind == "sat") {
        const bool yes = brute_force_sat(parse_ltl(input));
        r.add("satisfiable", yes ? "yes" : "no");
        return yes ? holds : fails;
    }
    if (kind != "net")
        throw error("unknown oracle '" + kind + "'");
    const auto doc = read_net_file(input);
    try {
        verify_one_safe(doc.net, doc.initial, node_limit);
        r.add("one_safe", "yes");
    } catch (const one_safety_violation& e) {
        r.add("one_safe", "no");
        r.add("violation", e.what());
        return fails;
    }
    const auto g = reachability_graph(doc.net, doc.initial, node_limit);
    r.add("reachable_markings", g.nodes.size());
    r.add("edges", g.edges.size());
    r.add("deadlocks", g.deadlocks.size());
    std::optional<marking> goal = doc.target;
    if (!target.empty())
        goal = doc.net.make_marking(target);
    if (!goal)
        return holds;
    r.add("target", join_places(doc.net, *goal));
    const auto seq =
        find_firing_sequence(doc.net, doc.initial, [&](const marking& m) { return m == *goal; }, node_limit);
    r.add("target_reachable", seq ? "yes" : "no");
    if (seq)
        r.add("firing_sequence", join_transitions(doc.net, *seq));
    return seq ? holds : fails;
}

// fuzz -------------------------------------------------------------------------

int cmd_fuzz(std::uint64_t seed, std::size_t count, std::size_t places)
{
    report r;
    r.add("command", "fuzz");
    r.add("seed", seed);
    rng_type rng(seed);
    std::size_t agree = 0, failing = 0;
    for (std::size_t i = 0; i < count; ++i) {
        auto doc = i % 4 == 3 ? random_hub_net(rng) : random_safe_net(rng, {places, places + 2, 1, 0.4});
        std::vector<std::string> atoms = doc.net.places();
        std::shuffle(atoms.begin(), atoms.end(), rng);
        atoms.resize(std::min<std::size_t>(atoms.size(), 1 + rng() % 3));
        const formula phi = random_ltl(rng, atoms, 3);
        const bool slow = explicit_model_check(doc.net, doc.initial, phi).holds;
        const bool fast = fpt_model_check(doc.net, doc.initial, phi).holds;
        failing += slow ? 0 : 1;
        if (slow == fast) {
            ++agree;
            continue;
        }
        r.add("checks", i + 1);
        r.add("disagreement", to_string(phi));
        r.add("explicit.verdict", slow ? "holds" : "fails");
        r.add("fpt.verdict", fast ? "holds" : "fails");
        r.add("net", format_net(doc.net, doc.initial));
        return disagreement;
    }
    r.add("checks", count);
    r.add("agree", agree);
    r.add("violated", failing);
    return holds;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Model checking of 1-safe Petri nets parameterised by vertex cover"};
    app.require_subcommand(1);

    check_args ca;
    auto* check = app.add_subcommand("check", "check a net against an LTL formula or violation automata");
    check->add_option("net", ca.net, "net file")->required();
    auto* ltl = check->add_option("--ltl", ca.ltl, "LTL formula");
    auto* nfa = check->add_option("--nfa", ca.nfa, "finite-word automaton of violating runs");
    auto* buchi = check->add_option("--buchi", ca.buchi, "Buchi automaton of violating runs");
    ltl->excludes(nfa)->excludes(buchi);
    check->add_option("--engine", ca.engine, "fpt, explicit or both")
        ->check(CLI::IsMember({"fpt", "explicit", "both"}));
    check->add_option("--cover", ca.cover, "vertex cover file (skips the cover search)");
    check->add_option("--dump-ilp", ca.dump_ilp, "write every linear system solved to this file");
    check->add_option("--node-limit", ca.node_limit, "explicit engine marking limit");

    std::string params_net, params_cover;
    auto* params = app.add_subcommand("params", "structural parameters of a net");
    params->add_option("net", params_net, "net file")->required();
    params->add_option("--cover", params_cover, "vertex cover file");

    reduce_args ra;
    auto* reduce = app.add_subcommand("reduce", "generate a net or pebbling instance");
    reduce->add_option("kind", ra.kind, "ppwsat, csp, pebbling, gadget or msys")
        ->required()
        ->check(CLI::IsMember({"ppwsat", "csp", "pebbling", "gadget", "msys"}));
    reduce->add_option("inputs", ra.inputs, "instance file (or a b c for msys)");
    reduce->add_option("-o,--output", ra.out, "output file")->required();
    reduce->add_option("--decomposition-out", ra.decomposition_out, "ppwsat: write the path decomposition here");
    reduce->add_option("--goal", ra.goal, "pebbling: goal place");
    reduce->add_option("--formula", ra.formula_text, "gadget: propositional formula");

    std::string sim_file;
    std::size_t sim_limit = 1'000'000;
    auto* simulate = app.add_subcommand("simulate", "play a pebbling instance from empty to full");
    simulate->add_option("instance", sim_file, "pebbling file")->required();
    simulate->add_option("--limit", sim_limit, "state limit");

    std::string oracle_kind, oracle_input;
    std::vector<std::string> oracle_target;
    std::size_t oracle_limit = default_node_limit;
    auto* oracle = app.add_subcommand("oracle", "brute-force answers: net, ppwsat, csp or sat");
    oracle->add_option("kind", oracle_kind, "net, ppwsat, csp or sat")
        ->required()
        ->check(CLI::IsMember({"net", "ppwsat", "csp", "sat"}));
    oracle->add_option("input", oracle_input, "file, or the formula for sat")->required();
    oracle->add_option("--target", oracle_target, "net: marked places of the target marking");
    oracle->add_option("--node-limit", oracle_limit, "marking limit");

    std::uint64_t seed = 20261015;
    std::size_t fuzz_count = 200, fuzz_places = 6;
    auto* fuzz = app.add_subcommand("fuzz", "compare both engines on random nets");
    fuzz->add_option("--seed", seed, "random seed");
    fuzz->add_option("--count", fuzz_count, "number of checks");
    fuzz->add_option("--places", fuzz_places, "maximum places per net");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : input_error;
    }

    try {
        if (*check) {
            if (ca.ltl.empty() && ca.nfa.empty() && ca.buchi.empty())
                throw error("give --ltl or at least one of --nfa/--buchi");
            return cmd_check(ca);
        }
        if (*params)
            return cmd_params(params_net, params_cover);
        if (*reduce) {
            if (ra.kind == "pebbling" && ra.goal.empty())
                throw error("reduce pebbling needs --goal");
            if (ra.kind == "gadget" && ra.formula_text.empty())
                throw error("reduce gadget needs --formula");
            return cmd_reduce(ra);
        }
        if (*simulate)
            return cmd_simulate(sim_file, sim_limit);
        if (*oracle)
            return cmd_oracle(oracle_kind, oracle_input, oracle_target, oracle_limit);
        if (*fuzz)
            return cmd_fuzz(seed, fuzz_count, fuzz_places);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << "error: parse\nposition: " << e.where << '\n';
        return input_error;
    } catch (const one_safety_violation& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << "error: not 1-safe\n";
        return input_error;
    } catch (const limit_exceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << "error: limit exceeded\n";
        return input_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << "error: input\n";
        return input_error;
    }
    return input_error;
}

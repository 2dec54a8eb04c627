#pragma once

#include "vcnet/automaton.hpp"
#include "vcnet/ltl.hpp"
#include "vcnet/net.hpp"
#include "vcnet/reach.hpp"

#include <optional>
#include <vector>

namespace vcnet {

// Automata recognising the violations of a property: finite maximal runs
// (finite kind) and infinite runs (buchi kind). Both share one alphabet.
struct property_automata
{
    word_automaton finite;
    word_automaton buchi;
};

// Translates !phi into both automata; the alphabet is atoms(phi).
[[nodiscard]] property_automata violation_automata(const formula& phi);

// Place index of every automaton proposition; throws alphabet_mismatch.
[[nodiscard]] std::vector<std::size_t> proposition_places(const petri_net& net, const std::vector<std::string>& props);
[[nodiscard]] letter letter_of(const marking& m, const std::vector<std::size_t>& prop_places);

struct run_witness
{
    std::vector<marking> markings;
    std::vector<std::size_t> transitions;  // transitions[i] leads markings[i] -> markings[i+1]
    std::optional<std::size_t> loop_start; // set for infinite runs: last marking steps back here
};

struct verdict
{
    bool holds = true;
    std::optional<run_witness> counterexample;
};

[[nodiscard]] verdict explicit_model_check(const petri_net& net, const marking& m0, const formula& phi,
                                           std::size_t node_limit = default_node_limit);
[[nodiscard]] verdict explicit_model_check(const petri_net& net, const marking& m0, const property_automata& bad,
                                           std::size_t node_limit = default_node_limit);
// Same check on an already explored state space.
[[nodiscard]] verdict explicit_model_check(const petri_net& net, const reach_graph& g, const property_automata& bad);

[[nodiscard]] std::string format_run(const petri_net& net, const run_witness& run);

} // namespace vcnet

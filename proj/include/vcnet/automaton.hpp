#pragma once

#include "vcnet/ltl.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vcnet {

enum class automaton_kind { finite, buchi };

// Automaton over letters that are subsets of `props` (see `letter`).
struct word_automaton
{
    struct edge
    {
        letter label;
        std::size_t dst;
        friend bool operator==(const edge&, const edge&) = default;
    };

    automaton_kind kind = automaton_kind::finite;
    std::vector<std::string> props;
    std::vector<std::string> state_names;
    std::vector<bool> initial;
    std::vector<bool> accepting;
    std::vector<std::vector<edge>> out; // per state, sorted by (label, dst)

    [[nodiscard]] std::size_t size() const { return state_names.size(); }
    [[nodiscard]] std::size_t num_edges() const;
    std::size_t add_state(std::string name, bool init = false, bool acc = false);
    void add_edge(std::size_t src, letter label, std::size_t dst);
    // Sorts and deduplicates edge lists.
    void normalize();

    friend bool operator==(const word_automaton&, const word_automaton&) = default;
};

// Acceptance of a finite word (finite kind) or lasso (buchi kind).
[[nodiscard]] bool accepts(const word_automaton& a, const std::vector<letter>& word);
[[nodiscard]] bool accepts(const word_automaton& a, const lasso& word);

// Tableau translations. Propositions are atoms(f).
[[nodiscard]] word_automaton ltl_to_nfa(const formula& f);
[[nodiscard]] word_automaton ltl_to_buchi(const formula& f);

// Subset construction; the result has one initial state and is complete.
[[nodiscard]] word_automaton determinize(const word_automaton& a);

// Text format: optional `kind finite|buchi`, optional `alphabet <id>*`,
// `state <id> [init] [acc]`, `edge <src> {<id>*} <dst>`.
[[nodiscard]] word_automaton parse_automaton(std::string_view text, automaton_kind default_kind);
[[nodiscard]] word_automaton read_automaton_file(const std::string& path, automaton_kind default_kind);
[[nodiscard]] std::string format_automaton(const word_automaton& a);

// Renders a letter as `{p,q}` using the automaton's proposition names.
[[nodiscard]] std::string format_letter(const std::vector<std::string>& props, letter l);

} // namespace vcnet

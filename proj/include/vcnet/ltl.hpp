#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vcnet {

enum class ltl_op {
    tt,
    ff,
    end,
    atom,
    negation,
    conjunction,
    disjunction,
    implication,
    next,
    until,
    release,
    eventually,
    always,
};

struct formula_node;
using formula = std::shared_ptr<const formula_node>;

struct formula_node
{
    ltl_op op;
    std::string atom; // for ltl_op::atom
    formula lhs;      // sole operand of unary operators
    formula rhs;
};

[[nodiscard]] formula make_true();
[[nodiscard]] formula make_false();
[[nodiscard]] formula make_end();
[[nodiscard]] formula make_atom(std::string name);
[[nodiscard]] formula make_unary(ltl_op op, formula a);
[[nodiscard]] formula make_binary(ltl_op op, formula a, formula b);
[[nodiscard]] formula make_not(formula a);
[[nodiscard]] formula make_and(formula a, formula b);
[[nodiscard]] formula make_or(formula a, formula b);

// Grammar: atoms are place identifiers; constants true false end; unary
// ! X F G; binary U R & | ->. Precedence from tightest: unary, U/R, &, |,
// ->. Binary operators associate to the right. Throws parse_error with a
// 0-based character offset.
[[nodiscard]] formula parse_ltl(std::string_view text);

// Fully parenthesised rendering that parse_ltl reads back to an equal tree.
[[nodiscard]] std::string to_string(const formula& f);
[[nodiscard]] bool equal(const formula& a, const formula& b);

// Sorted, duplicate-free atom names.
[[nodiscard]] std::vector<std::string> atoms(const formula& f);
[[nodiscard]] std::size_t formula_size(const formula& f);
[[nodiscard]] std::size_t temporal_depth(const formula& f);

// Letters are bitmasks over an ordered proposition list: bit i set iff
// props[i] holds.
using letter = std::uint64_t;

struct lasso
{
    std::vector<letter> prefix;
    std::vector<letter> loop;
};

// Finite-word semantics: X is strong, `end` holds only at the last
// position and U needs its witness inside the word. Throws error on an
// empty word or an atom missing from props.
[[nodiscard]] bool eval_ltl(const formula& f, const std::vector<std::string>& props, const std::vector<letter>& word);
// Infinite ultimately periodic word prefix·loop^ω; `end` never holds.
[[nodiscard]] bool eval_ltl(const formula& f, const std::vector<std::string>& props, const lasso& word);

} // namespace vcnet

#include "vcnet/ltl.hpp"

#include "vcnet/errors.hpp"

#include <algorithm>
#include <set>

namespace vcnet {

namespace {

formula node(ltl_op op, std::string atom = {}, formula a = nullptr, formula b = nullptr)
{
    return std::make_shared<const formula_node>(formula_node{op, std::move(atom), std::move(a), std::move(b)});
}

bool is_unary(ltl_op op)
{
    return op == ltl_op::negation || op == ltl_op::next || op == ltl_op::eventually || op == ltl_op::always;
}

bool ident_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
           c == '^' || c == '-';
}

struct token
{
    enum kind_t { ident, bang, amp, bar, arrow, lparen, rparen, eof } kind;
    std::string text;
    std::size_t pos;
};

std::vector<token> tokenize(std::string_view s)
{
    std::vector<token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
        } else if (c == '!') {
            out.push_back({token::bang, "!", i++});
        } else if (c == '&') {
            out.push_back({token::amp, "&", i++});
        } else if (c == '|') {
            out.push_back({token::bar, "|", i++});
        } else if (c == '(') {
            out.push_back({token::lparen, "(", i++});
        } else if (c == ')') {
            out.push_back({token::rparen, ")", i++});
        } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({token::arrow, "->", i});
            i += 2;
        } else if (ident_char(c)) {
            const std::size_t start = i;
            while (i < s.size() && ident_char(s[i]) && !(s[i] == '-' && i + 1 < s.size() && s[i + 1] == '>'))
                ++i;
            out.push_back({token::ident, std::string(s.substr(start, i - start)), start});
        } else {
            throw parse_error(i, "offset " + std::to_string(i) + ": unexpected character '" + std::string(1, c) + "'");
        }
    }
    out.push_back({token::eof, "", s.size()});
    return out;
}

class parser
{
public:
    explicit parser(std::string_view s) : toks_{tokenize(s)} {}

    formula parse()
    {
        formula f = implication();
        if (peek().kind != token::eof)
            fail("unexpected '" + peek().text + "'");
        return f;
    }

private:
    const token& peek() const { return toks_[i_]; }
    bool peek_word(std::string_view w) const { return peek().kind == token::ident && peek().text == w; }
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw parse_error(peek().pos, "offset " + std::to_string(peek().pos) + ": " + msg);
    }

    formula implication()
    {
        formula a = disjunction();
        if (peek().kind == token::arrow) {
            ++i_;
            return node(ltl_op::implication, {}, a, implication());
        }
        return a;
    }
    formula disjunction()
    {
        formula a = conjunction();
        if (peek().kind == token::bar) {
            ++i_;
            return node(ltl_op::disjunction, {}, a, disjunction());
        }
        return a;
    }
    formula conjunction()
    {
        formula a = until_release();
        if (peek().kind == token::amp) {
            ++i_;
            return node(ltl_op::conjunction, {}, a, conjunction());
        }
        return a;
    }
    formula until_release()
    {
        formula a = unary();
        if (peek_word("U")) {
            ++i_;
            return node(ltl_op::until, {}, a, until_release());
        }
        if (peek_word("R")) {
            ++i_;
            return node(ltl_op::release, {}, a, until_release());
        }
        return a;
    }
    formula unary()
    {
        if (peek().kind == token::bang) {
            ++i_;
            return node(ltl_op::negation, {}, unary());
        }
        if (peek_word("X")) {
            ++i_;
            return node(ltl_op::next, {}, unary());
        }
        if (peek_word("F")) {
            ++i_;
            return node(ltl_op::eventually, {}, unary());
        }
        if (peek_word("G")) {
            ++i_;
            return node(ltl_op::always, {}, unary());
        }
        return primary();
    }
    formula primary()
    {
        const token& t = peek();
        if (t.kind == token::lparen) {
            ++i_;
            formula f = implication();
            if (peek().kind != token::rparen)
                fail("expected ')'");
            ++i_;
            return f;
        }
        if (t.kind != token::ident)
            fail(t.kind == token::eof ? "unexpected end of formula" : "unexpected '" + t.text + "'");
        if (t.text == "U" || t.text == "R")
            fail("operator '" + t.text + "' is missing its left operand");
        ++i_;
        if (t.text == "true")
            return make_true();
        if (t.text == "false")
            return make_false();
        if (t.text == "end")
            return make_end();
        return make_atom(t.text);
    }

    std::vector<token> toks_;
    std::size_t i_ = 0;
};

void collect_atoms(const formula& f, std::set<std::string>& out)
{
    if (!f)
        return;
    if (f->op == ltl_op::atom)
        out.insert(f->atom);
    collect_atoms(f->lhs, out);
    collect_atoms(f->rhs, out);
}

std::string op_symbol(ltl_op op)
{
    switch (op) {
    case ltl_op::negation: return "!";
    case ltl_op::next: return "X ";
    case ltl_op::eventually: return "F ";
    case ltl_op::always: return "G ";
    case ltl_op::conjunction: return " & ";
    case ltl_op::disjunction: return " | ";
    case ltl_op::implication: return " -> ";
    case ltl_op::until: return " U ";
    case ltl_op::release: return " R ";
    default: return "";
    }
}

// Truth value of f at every position of a word of length n whose position i
// is followed by succ[i] (or by nothing when succ[i] == n).
std::vector<bool> evaluate(const formula& f, const std::vector<std::string>& props, const std::vector<letter>& word,
                           const std::vector<std::size_t>& succ, bool finite)
{
    const std::size_t n = word.size();
    auto has_next = [&](std::size_t i) { return succ[i] < n; };
    switch (f->op) {
    case ltl_op::tt:
        return std::vector<bool>(n, true);
    case ltl_op::ff:
        return std::vector<bool>(n, false);
    case ltl_op::end: {
        std::vector<bool> v(n, false);
        if (finite)
            v[n - 1] = true;
        return v;
    }
    case ltl_op::atom: {
        auto it = std::find(props.begin(), props.end(), f->atom);
        if (it == props.end())
            throw error("atom '" + f->atom + "' is not among the word's propositions");
        const letter bit = letter{1} << (it - props.begin());
        std::vector<bool> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = (word[i] & bit) != 0;
        return v;
    }
    case ltl_op::negation: {
        auto a = evaluate(f->lhs, props, word, succ, finite);
        a.flip();
        return a;
    }
    case ltl_op::next: {
        auto a = evaluate(f->lhs, props, word, succ, finite);
        std::vector<bool> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = has_next(i) && a[succ[i]];
        return v;
    }
    case ltl_op::eventually:
        return evaluate(make_binary(ltl_op::until, make_true(), f->lhs), props, word, succ, finite);
    case ltl_op::always:
        return evaluate(make_binary(ltl_op::release, make_false(), f->lhs), props, word, succ, finite);
    default:
        break;
    }
    const auto a = evaluate(f->lhs, props, word, succ, finite);
    const auto b = evaluate(f->rhs, props, word, succ, finite);
    std::vector<bool> v(n);
    switch (f->op) {
    case ltl_op::conjunction:
        for (std::size_t i = 0; i < n; ++i)
            v[i] = a[i] && b[i];
        return v;
    case ltl_op::disjunction:
        for (std::size_t i = 0; i < n; ++i)
            v[i] = a[i] || b[i];
        return v;
    case ltl_op::implication:
        for (std::size_t i = 0; i < n; ++i)
            v[i] = !a[i] || b[i];
        return v;
    case ltl_op::until:
    case ltl_op::release: {
        // Least (until) or greatest (release) fixpoint of the one-step
        // unfolding; n rounds reach it on any successor structure.
        const bool until = f->op == ltl_op::until;
        std::fill(v.begin(), v.end(), !until);
        for (std::size_t round = 0; round <= n; ++round) {
            bool changed = false;
            for (std::size_t k = n; k-- > 0;) {
                const bool later = has_next(k) ? v[succ[k]] : !until;
                const bool nv = until ? (b[k] || (a[k] && has_next(k) && later))
                                      : (b[k] && (a[k] || !has_next(k) || later));
                if (nv != v[k]) {
                    v[k] = nv;
                    changed = true;
                }
            }
            if (!changed)
                break;
        }
        return v;
    }
    default:
        throw error("malformed formula");
    }
}

} // namespace

formula make_true() { return node(ltl_op::tt); }
formula make_false() { return node(ltl_op::ff); }
formula make_end() { return node(ltl_op::end); }
formula make_atom(std::string name) { return node(ltl_op::atom, std::move(name)); }
formula make_unary(ltl_op op, formula a) { return node(op, {}, std::move(a)); }
formula make_binary(ltl_op op, formula a, formula b) { return node(op, {}, std::move(a), std::move(b)); }
formula make_not(formula a) { return make_unary(ltl_op::negation, std::move(a)); }
formula make_and(formula a, formula b) { return make_binary(ltl_op::conjunction, std::move(a), std::move(b)); }
formula make_or(formula a, formula b) { return make_binary(ltl_op::disjunction, std::move(a), std::move(b)); }

formula parse_ltl(std::string_view text)
{
    return parser(text).parse();
}

std::string to_string(const formula& f)
{
    switch (f->op) {
    case ltl_op::tt: return "true";
    case ltl_op::ff: return "false";
    case ltl_op::end: return "end";
    case ltl_op::atom: return f->atom;
    default: break;
    }
    if (is_unary(f->op))
        return op_symbol(f->op) + to_string(f->lhs);
    return "(" + to_string(f->lhs) + op_symbol(f->op) + to_string(f->rhs) + ")";
}

bool equal(const formula& a, const formula& b)
{
    if (!a || !b)
        return !a && !b;
    return a->op == b->op && a->atom == b->atom && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

std::vector<std::string> atoms(const formula& f)
{
    std::set<std::string> s;
    collect_atoms(f, s);
    return {s.begin(), s.end()};
}

std::size_t formula_size(const formula& f)
{
    if (!f)
        return 0;
    return 1 + formula_size(f->lhs) + formula_size(f->rhs);
}

std::size_t temporal_depth(const formula& f)
{
    if (!f)
        return 0;
    const std::size_t below = std::max(temporal_depth(f->lhs), temporal_depth(f->rhs));
    const bool temporal = f->op == ltl_op::next || f->op == ltl_op::until || f->op == ltl_op::release ||
                          f->op == ltl_op::eventually || f->op == ltl_op::always;
    return below + (temporal ? 1 : 0);
}

bool eval_ltl(const formula& f, const std::vector<std::string>& props, const std::vector<letter>& word)
{
    if (word.empty())
        throw error("cannot evaluate a formula on an empty run");
    std::vector<std::size_t> succ(word.size());
    for (std::size_t i = 0; i < word.size(); ++i)
        succ[i] = i + 1;
    return evaluate(f, props, word, succ, true)[0];
}

bool eval_ltl(const formula& f, const std::vector<std::string>& props, const lasso& word)
{
    if (word.loop.empty())
        throw error("lasso loop must be nonempty");
    std::vector<letter> flat = word.prefix;
    flat.insert(flat.end(), word.loop.begin(), word.loop.end());
    std::vector<std::size_t> succ(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i)
        succ[i] = i + 1 < flat.size() ? i + 1 : word.prefix.size();
    return evaluate(f, props, flat, succ, false)[0];
}

} // namespace vcnet
